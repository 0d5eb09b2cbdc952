// Exercises the photonkd binary end to end through a shell: exit codes,
// output schemas and byte-level determinism.

#include "photonkd/postproc.hpp"

#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

const fs::path &work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "photonkd_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path &path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

CommandResult run_cli(const std::string &args) {
    const fs::path out = work_dir() / "stdout.txt";
    const fs::path err = work_dir() / "stderr.txt";
    const std::string cmd = std::string(PHOTONKD_BIN) + " " + args + " > " +
                            out.string() + " 2> " + err.string();
    const int raw = std::system(cmd.c_str());
    CommandResult res;
    res.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    res.out = slurp(out);
    res.err = slurp(err);
    return res;
}

fs::path write_config(const std::string &name, const std::string &body) {
    const fs::path path = work_dir() / name;
    std::ofstream f(path);
    f << body;
    return path;
}

std::size_t count_lines(const std::string &s) {
    std::size_t n = 0;
    for (char c : s)
        n += c == '\n';
    return n;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("mubs --verify succeeds on the shipped table") {
    const CommandResult res = run_cli("mubs --verify");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("B4") != std::string::npos);
    CHECK(res.out.find("max | |<a|b>|^2 - 1/4 |") != std::string::npos);
}

TEST_CASE("mubs csv format emits a header and 8 real columns per state") {
    const CommandResult res = run_cli("mubs --format csv");
    CHECK(res.exit_code == 0);
    CHECK(res.out.rfind("re0,im0,re1,im1,re2,im2,re3,im3\n", 0) == 0);
    // header + 20 states + 2 report lines
    CHECK(count_lines(res.out) == 23);
}

TEST_CASE("mubs --basis restricts the output") {
    const CommandResult res = run_cli("mubs --basis B4 --format csv");
    CHECK(res.exit_code == 0);
    CHECK(count_lines(res.out) == 7);
    const CommandResult bad = run_cli("mubs --basis B7");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("simulate with a missing config exits 2 without partial output") {
    const fs::path stats = work_dir() / "missing_stats.json";
    const CommandResult res = run_cli("simulate " +
                                      (work_dir() / "no_such.json").string() +
                                      " --stats " + stats.string());
    CHECK(res.exit_code == 2);
    CHECK(!fs::exists(stats));
    CHECK(res.err.find("config error") != std::string::npos);
}

TEST_CASE("simulate rejects unknown keys with a diagnostic") {
    const fs::path cfg = write_config("bad_key.json", R"({
        "bases": ["B1", "B2"], "rounds": 100, "typo_field": 1
    })");
    const CommandResult res = run_cli("simulate " + cfg.string());
    CHECK(res.exit_code == 2);
    CHECK(res.err.find("typo_field") != std::string::npos);
}

TEST_CASE("simulate rejects malformed values") {
    const fs::path cfg = write_config("bad_value.json", R"({
        "bases": ["B1"], "rounds": 100
    })");
    CHECK(run_cli("simulate " + cfg.string()).exit_code == 2);
    const fs::path cfg2 = write_config("bad_json.json", "{ not json");
    CHECK(run_cli("simulate " + cfg2.string()).exit_code == 2);
}

TEST_CASE("simulate is byte-identical across reruns and worker counts") {
    const fs::path cfg = write_config("det.json", R"({
        "bases": ["B1", "B3", "B4"],
        "rounds": 20000,
        "seed": 9,
        "eve": {"enabled": true},
        "channel": {"transmission": 0.9}
    })");
    const std::string base = "simulate " + cfg.string();
    std::vector<std::string> outputs;
    for (const char *variant : {" --workers 1", " --workers 4", " --workers 1"}) {
        const fs::path stats = work_dir() / "det_stats.json";
        const fs::path records = work_dir() / "det_records.csv";
        const fs::path akey = work_dir() / "det_a.key";
        const fs::path bkey = work_dir() / "det_b.key";
        const CommandResult res =
            run_cli(base + variant + " --stats " + stats.string() +
                    " --records " + records.string() + " --alice-key " +
                    akey.string() + " --bob-key " + bkey.string());
        REQUIRE(res.exit_code == 0);
        outputs.push_back(slurp(stats) + "|" + slurp(records) + "|" +
                          slurp(akey) + "|" + slurp(bkey) + "|" + res.out);
    }
    CHECK(outputs[0] == outputs[1]);
    CHECK(outputs[0] == outputs[2]);
    // Changing the seed must change the byte stream.
    const fs::path stats = work_dir() / "det_stats.json";
    const CommandResult other =
        run_cli(base + " --seed 10 --stats " + stats.string());
    REQUIRE(other.exit_code == 0);
    CHECK(outputs[0].find(slurp(stats)) == std::string::npos);
}

TEST_CASE("simulate records CSV carries the header row") {
    const fs::path cfg = write_config("rec.json", R"({
        "bases": ["B1", "B2"], "rounds": 50, "seed": 3
    })");
    const fs::path records = work_dir() / "rec.csv";
    const CommandResult res =
        run_cli("simulate " + cfg.string() + " --records " + records.string());
    REQUIRE(res.exit_code == 0);
    const std::string body = slurp(records);
    CHECK(body.rfind("round,alice_basis,alice_state,eve_basis,eve_outcome,"
                     "photon_lost,bob_basis,bob_detector,bob_symbol,sifted\n",
                     0) == 0);
    CHECK(count_lines(body) == 51);
}

TEST_CASE("simulate --expect-qber gates the exit code") {
    const fs::path cfg = write_config("gate.json", R"({
        "bases": ["B1", "B2"], "rounds": 20000, "seed": 5,
        "eve": {"enabled": true}
    })");
    CHECK(run_cli("simulate " + cfg.string() + " --expect-qber 0.375 --tol 0.02")
              .exit_code == 0);
    const CommandResult miss =
        run_cli("simulate " + cfg.string() + " --expect-qber 0.05 --tol 0.02");
    CHECK(miss.exit_code == 1);
}

TEST_CASE("mzem scan emits dx,visibility pairs") {
    const CommandResult at_zero = run_cli("mzem --scan-dx 0 0 1 --mode tem00");
    CHECK(at_zero.exit_code == 0);
    CHECK(at_zero.out.rfind("dx,visibility\n", 0) == 0);
    CHECK(std::abs(std::stod(at_zero.out.substr(at_zero.out.find('\n') + 3)) -
                   1.0) < 1e-9);

    const CommandResult at_half =
        run_cli("mzem --scan-dx 0.5 0.5 1 --mode tem00");
    REQUIRE(at_half.exit_code == 0);
    const std::string row = at_half.out.substr(at_half.out.find('\n') + 1);
    const double v = std::stod(row.substr(row.find(',') + 1));
    CHECK(std::abs(v - std::exp(-0.5)) < 1e-4);

    CHECK(run_cli("mzem --scan-dx 0 1 5 --mode tem99").exit_code == 2);
    CHECK(run_cli("mzem").exit_code == 2);
}

TEST_CASE("mzem preset prints the visibility matrix") {
    const CommandResult res = run_cli("mzem --preset paper-tableIV");
    CHECK(res.exit_code == 0);
    CHECK(res.out.rfind("state,visibility_a,visibility_b,wrong_port_probability\n",
                        0) == 0);
    CHECK(res.out.find("H_TEMH,0.95,0.98,") != std::string::npos);
    CHECK(res.out.find("V_TEMV,0.68,0.75,") != std::string::npos);
    CHECK(count_lines(res.out) == 5);
    CHECK(run_cli("mzem --preset bogus").exit_code == 2);
}

TEST_CASE("distill runs the full post-processing path") {
    const fs::path cfg = write_config("keys.json", R"({
        "bases": ["B1", "B2"], "rounds": 6000, "seed": 12
    })");
    const fs::path akey = work_dir() / "alice.key";
    const fs::path bkey = work_dir() / "bob.key";
    REQUIRE(run_cli("simulate " + cfg.string() + " --alice-key " + akey.string() +
                    " --bob-key " + bkey.string())
                .exit_code == 0);
    const fs::path out = work_dir() / "final.key";
    const CommandResult res =
        run_cli("distill --alice " + akey.string() + " --bob " + bkey.string() +
                " --block-size 8 --passes 2 --margin 32 --out " + out.string());
    CHECK(res.exit_code == 0);
    CHECK(res.err.empty());
    CHECK(res.out.find("residual_disagreements: 0") != std::string::npos);

    // Error-free keys leak exactly ceil(n/8) parities per pass; the final
    // length must follow the formula.
    const photonkd::BitString alice = photonkd::read_key_file(akey.string());
    const std::size_t blocks = (alice.size() + 7) / 8;
    const std::size_t expected = alice.size() - 2 * blocks - 32;
    CHECK(res.out.find("final_key_bits: " + std::to_string(expected)) !=
          std::string::npos);
    CHECK(photonkd::read_key_file(out.string()).size() == expected);
}

TEST_CASE("distill reconciles noisy keys below 1e-3 residual") {
    // depolarizing 0.1 puts ~5% bit errors on the sifted key material.
    const fs::path cfg = write_config("noisy.json", R"({
        "bases": ["B1", "B2"], "rounds": 12000, "seed": 8,
        "channel": {"depolarizing": 0.1}
    })");
    const fs::path akey = work_dir() / "noisy_a.key";
    const fs::path bkey = work_dir() / "noisy_b.key";
    REQUIRE(run_cli("simulate " + cfg.string() + " --alice-key " + akey.string() +
                    " --bob-key " + bkey.string())
                .exit_code == 0);
    const CommandResult res = run_cli("distill --alice " + akey.string() +
                                      " --bob " + bkey.string() +
                                      " --block-size 8 --passes 4 --margin 64");
    REQUIRE(res.exit_code == 0);
    const std::string tag = "residual_disagreements: ";
    const auto pos = res.out.find(tag);
    REQUIRE(pos != std::string::npos);
    const long residual = std::stol(res.out.substr(pos + tag.size()));
    const std::size_t n_bits = photonkd::read_key_file(akey.string()).size();
    CHECK(residual <= static_cast<long>(n_bits / 1000));
    CHECK(res.out.find("residual_error_estimate: ") != std::string::npos);
}

TEST_CASE("distill exits 3 on mismatched or exhausted keys") {
    const fs::path a = work_dir() / "short_a.key";
    const fs::path b = work_dir() / "long_b.key";
    photonkd::write_key_file(a.string(), photonkd::BitString(100, 1));
    photonkd::write_key_file(b.string(), photonkd::BitString(120, 1));
    CHECK(run_cli("distill --alice " + a.string() + " --bob " + b.string())
              .exit_code == 3);

    const fs::path tiny = work_dir() / "tiny.key";
    photonkd::write_key_file(tiny.string(), photonkd::BitString(40, 0));
    // 40 bits, 5 block parities per pass x 4 passes + margin 64 > 40.
    CHECK(run_cli("distill --alice " + tiny.string() + " --bob " + tiny.string())
              .exit_code == 3);

    CHECK(run_cli("distill --alice " + (work_dir() / "nope.key").string() +
                  " --bob " + b.string())
              .exit_code == 3);
}

} // TEST_SUITE
