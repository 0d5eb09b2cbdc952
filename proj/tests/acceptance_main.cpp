// Acceptance suite: one check per release criterion, each printed as a
// single [PASS]/[FAIL] line. Exits nonzero if any criterion fails.

#include "photonkd/mub.hpp"
#include "photonkd/mzem.hpp"
#include "photonkd/postproc.hpp"
#include "photonkd/protocol.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace photonkd;
namespace fs = std::filesystem;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string &what) {
    if (!ok)
        throw Failure(what);
}

std::string num(double v) {
    std::ostringstream ss;
    ss.precision(9);
    ss << v;
    return ss.str();
}

double three_sigma(double p, double n) {
    return 3.0 * std::sqrt(p * (1.0 - p) / n);
}

// --- criterion 1: MUB correctness -----------------------------------------

void check_mub_correctness() {
    const auto t0 = std::chrono::steady_clock::now();
    const BasisTable table = build_basis_table();
    for (BasisId b : kAllBases)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const double expected = i == j ? 1.0 : 0.0;
                require(std::abs(overlap(table.state(b, i), table.state(b, j)) -
                                 expected) < 1e-10,
                        std::string("orthonormality broken in ") + basis_name(b));
            }
    const UnbiasednessReport rep = verify_unbiasedness(table);
    require(rep.max_deviation < 1e-10,
            "cross-basis deviation " + num(rep.max_deviation));
    for (BasisId b : kAllBases) {
        const auto &ops = table.csco[basis_index(b)];
        for (int a = 0; a < 3; ++a)
            for (int c = a + 1; c < 3; ++c)
                require((ops[a].mat() * ops[c].mat() - ops[c].mat() * ops[a].mat())
                                .cwiseAbs()
                                .maxCoeff() < 1e-10,
                        std::string("CSCO of ") + basis_name(b) + " does not commute");
        for (const auto &op : ops)
            for (int i = 0; i < 4; ++i) {
                const Vec4 v = table.state(b, i).amp();
                const Vec4 image = op.mat() * v;
                const Complex ev = v.dot(image);
                require((image - ev * v).cwiseAbs().maxCoeff() < 1e-10,
                        std::string("CSCO of ") + basis_name(b) +
                            " not diagonalized by its states");
            }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require(secs < 1.0, "runtime " + num(secs) + " s exceeds 1 s");
}

// --- criterion 2: preparation and measurement circuits --------------------

void check_circuit_fidelity() {
    const auto t0 = std::chrono::steady_clock::now();
    const BasisTable table = build_basis_table();
    for (BasisId b : kAllBases)
        for (int i = 0; i < 4; ++i) {
            const PrepCircuit circuit = prep_circuit(b, i);
            const PureState4 out = apply(compile(circuit.full()), circuit.input);
            require(fidelity(out, table.state(b, i)) > 1.0 - 1e-10,
                    std::string("prep circuit ") + basis_name(b) + " state " +
                        std::to_string(i));
        }
    for (BasisId b : kAllBases) {
        const Operator4 m = compile(measurement_circuit(b));
        std::array<bool, 4> used{};
        for (int i = 0; i < 4; ++i) {
            const PureState4 landed = apply(m, table.state(b, i));
            const int k = table.measured_b1_index[basis_index(b)][i];
            require(fidelity(landed, PureState4::computational(k)) > 1.0 - 1e-10,
                    std::string("measurement of ") + basis_name(b) + " state " +
                        std::to_string(i) + " misses the canonical basis");
            require(!used[k], "measurement map is not a bijection");
            used[k] = true;
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require(secs < 1.0, "runtime " + num(secs) + " s exceeds 1 s");
}

// --- criterion 3: Sagnac anchor points -------------------------------------

void check_sagnac_anchor() {
    Mat2 u;
    u << 1, 1, -1, 1;
    u /= std::sqrt(2.0);
    Mat4 expected = Mat4::Zero();
    expected.block<2, 2>(0, 0) = u;
    expected.block<2, 2>(2, 2) = u.adjoint();
    const Mat4 got = sagnac_operator(M_PI / 8.0).mat();
    require((got - expected).cwiseAbs().maxCoeff() < 1e-12,
            "sagnac(pi/8) deviates from the anchor matrix");
    require((sagnac_operator(0.0).mat() - Mat4::Identity()).cwiseAbs().maxCoeff() <
                1e-12,
            "sagnac(0) is not the identity");
}

// --- criterion 4: ideal detection bijection --------------------------------

void check_detection_bijection() {
    const MzemSettings ideal = MzemSettings::ideal();
    RandomStream rng(2024);
    std::array<int, 4> detector_of{};
    for (int k = 0; k < 4; ++k) {
        const PureState4 state = PureState4::computational(k);
        const int first = detect(state, ideal, rng).detector_index();
        for (int rep = 0; rep < 400; ++rep)
            require(detect(state, ideal, rng).detector_index() == first,
                    "ideal detection is not deterministic");
        detector_of[k] = first;
    }
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            require(detector_of[a] != detector_of[b],
                    "two canonical states share a detector");
    MzemSettings flipped = ideal;
    flipped.phi = M_PI;
    for (int k = 0; k < 4; ++k) {
        const PureState4 state = PureState4::computational(k);
        const PortProbabilities p0 = port_probabilities(state, ideal);
        const PortProbabilities p1 = port_probabilities(state, flipped);
        require(std::abs(p0.p_a - p1.p_b) < 1e-12 &&
                    std::abs(p0.p_b - p1.p_a) < 1e-12,
                "phase flip does not swap the ports exactly");
    }
}

// --- criterion 5: intercept-resend rates ------------------------------------

std::pair<double, double> enumerate_rates(const BasisTable &table,
                                          const std::vector<BasisId> &set) {
    double symbol = 0.0, bits = 0.0;
    const double w0 = 1.0 / (4.0 * set.size() * set.size());
    for (BasisId a : set)
        for (BasisId e : set)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    const double p = fidelity(table.state(e, j), table.state(a, i));
                    if (p < 1e-15)
                        continue;
                    for (int k = 0; k < 4; ++k) {
                        if (k == i)
                            continue;
                        const double w =
                            w0 * p * fidelity(table.state(a, k), table.state(e, j));
                        symbol += w;
                        bits += w * std::popcount(static_cast<unsigned>(k ^ i)) / 2.0;
                    }
                }
    return {symbol, bits};
}

void check_attack_rates() {
    const auto t0 = std::chrono::steady_clock::now();
    const BasisTable table = build_basis_table();
    struct Case {
        std::vector<BasisId> set;
        double symbol, bits;
    };
    const std::vector<Case> cases = {
        {{BasisId::kB1, BasisId::kB2}, 0.375, 0.25},
        {{BasisId::kB1, BasisId::kB2, BasisId::kB3, BasisId::kB4, BasisId::kB5},
         0.600,
         0.400},
    };
    for (const Case &c : cases) {
        const auto exact = enumerate_rates(table, c.set);
        require(std::abs(exact.first - c.symbol) < 1e-12 &&
                    std::abs(exact.second - c.bits) < 1e-12,
                "enumeration disagrees with the pinned rates");
        ProtocolConfig cfg;
        cfg.basis_set = c.set;
        cfg.n_rounds = 100000;
        cfg.seed = 1000 + c.set.size();
        cfg.eve.enabled = true;
        cfg.workers = 1;
        const ProtocolResult res = run_protocol(cfg, table);
        const double n = static_cast<double>(res.stats.n_sifted);
        const double m = static_cast<double>(c.set.size());
        require(std::abs(res.stats.symbol_error_rate - exact.first) <
                    three_sigma(exact.first, n),
                "symbol rate " + num(res.stats.symbol_error_rate) + " vs " +
                    num(exact.first));
        require(std::abs(res.stats.bit_error_rate - exact.second) <
                    three_sigma(exact.second, 2.0 * n),
                "bit rate " + num(res.stats.bit_error_rate) + " vs " +
                    num(exact.second));
        require(std::abs(res.stats.sifted_fraction - 1.0 / m) <
                    three_sigma(1.0 / m, 100000.0),
                "sifted fraction " + num(res.stats.sifted_fraction));
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require(secs < 30.0, "runtime " + num(secs) + " s exceeds 30 s");
}

// --- criterion 6: measured-visibility preset --------------------------------

void check_visibility_preset() {
    const MzemSettings s = MzemSettings::preset("paper-tableIV");
    RandomStream rng(77);
    const int n = 100000;
    for (int k = 0; k < 4; ++k) {
        const double p_a = port_a_probability_for_state(k, s);
        const bool a_correct = canonical_parity(k) == 1;
        const double expected = a_correct ? 1.0 - p_a : p_a;
        int wrong = 0;
        const PureState4 state = PureState4::computational(k);
        for (int i = 0; i < n; ++i) {
            const Port port = detect(state, s, rng).port;
            wrong += (port == Port::kA) != a_correct;
        }
        const double rate = static_cast<double>(wrong) / n;
        require(std::abs(rate - expected) < three_sigma(expected, n),
                "state " + std::to_string(k) + " misroutes at " + num(rate) +
                    " vs " + num(expected));
    }
}

// --- criterion 7: mode overlap ----------------------------------------------

void check_mode_overlap() {
    const std::vector<double> dxs = {0.0, 0.25, 0.5, 1.0, 2.0};
    const ModeProfile tem00 = ModeProfile::hermite_gaussian(0, 0, 1.0, 1024, 9.0);
    for (double dx : dxs) {
        const double got = std::abs(mirror_overlap(tem00, dx));
        const double want = std::exp(-2.0 * dx * dx);
        require(std::abs(got - want) < 1e-4,
                "TEM00 overlap at dx=" + num(dx) + ": " + num(got) + " vs " +
                    num(want));
    }
    const ModeProfile tem10 = ModeProfile::hermite_gaussian(1, 0, 1.0, 1024, 9.0);
    const Complex at_zero = mirror_overlap(tem10, 0.0);
    require(std::abs(at_zero - Complex(-1.0, 0.0)) < 1e-6,
            "TEM10 at dx=0 is " + num(at_zero.real()));
    // Independent high-resolution quadrature oracle.
    const ModeProfile fine = ModeProfile::hermite_gaussian(1, 0, 1.0, 2048, 10.0);
    for (double dx : dxs) {
        const double got = std::abs(mirror_overlap(tem10, dx));
        const double want = std::abs(mirror_overlap(fine, dx));
        require(std::abs(got - want) < 1e-4,
                "TEM10 overlap at dx=" + num(dx) + ": " + num(got) + " vs " +
                    num(want));
    }
}

// --- criterion 8: path geometry ---------------------------------------------

void check_path_geometry() {
    for (double dd : {0.0, 0.1, 1.0, 2.5, 17.25})
        require(path_difference(dd) == std::sqrt(2.0) * dd,
                "path difference is not sqrt(2) * displacement");
}

// --- criterion 9: post-processing -------------------------------------------

void check_postprocessing() {
    RandomStream rng(31415);
    const std::size_t n = 10000;
    const int trials = 100;
    double residual_sum = 0.0;
    for (int t = 0; t < trials; ++t) {
        BitString alice(n), bob(n);
        for (std::size_t i = 0; i < n; ++i) {
            alice[i] = static_cast<std::uint8_t>(rng.next_u64() & 1);
            bob[i] = alice[i] ^ static_cast<std::uint8_t>(rng.bernoulli(0.05));
        }
        const ReconcileReport rep = reconcile(alice, bob, 8, 4, rng);
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < n; ++i)
            wrong += rep.corrected[i] != alice[i];
        residual_sum += static_cast<double>(wrong) / static_cast<double>(n);
    }
    const double residual = residual_sum / trials;
    require(residual < 1e-3, "mean residual error " + num(residual));

    for (int rep = 0; rep < 10; ++rep) {
        BitString a(400), b(400);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = static_cast<std::uint8_t>(rng.next_u64() & 1);
            b[i] = static_cast<std::uint8_t>(rng.next_u64() & 1);
        }
        const std::uint64_t seed = rng.next_u64();
        const BitString ha = privacy_amplify(a, 100, seed, 20);
        require(ha.size() == 400 - 100 - 20, "output length violates the formula");
        BitString ab(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            ab[i] = a[i] ^ b[i];
        const BitString hb = privacy_amplify(b, 100, seed, 20);
        const BitString hab = privacy_amplify(ab, 100, seed, 20);
        for (std::size_t i = 0; i < ha.size(); ++i)
            require(hab[i] == (ha[i] ^ hb[i]), "hash is not GF(2)-linear");
    }
    bool threw = false;
    try {
        privacy_amplify(BitString(50, 1), 40, 1, 10);
    } catch (const std::invalid_argument &) {
        threw = true;
    }
    require(threw, "degenerate output length must be rejected");
}

// --- criterion 10: CLI determinism ------------------------------------------

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void check_cli_determinism() {
    const fs::path dir = fs::temp_directory_path() / "photonkd_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg = dir / "run.json";
    {
        std::ofstream f(cfg);
        f << R"({
            "bases": ["B1", "B2", "B4", "B5"],
            "rounds": 30000,
            "seed": 424242,
            "eve": {"enabled": true},
            "channel": {"transmission": 0.85},
            "mzem": {"preset": "paper-tableIV"}
        })";
    }
    std::vector<std::string> runs;
    for (const char *workers : {"1", "3", "1"}) {
        const fs::path stats = dir / "stats.json";
        const fs::path records = dir / "records.csv";
        const fs::path akey = dir / "a.key";
        const fs::path bkey = dir / "b.key";
        const std::string cmd = std::string(PHOTONKD_BIN) + " simulate " +
                                cfg.string() + " --workers " + workers +
                                " --stats " + stats.string() + " --records " +
                                records.string() + " --alice-key " +
                                akey.string() + " --bob-key " + bkey.string() +
                                " > " + (dir / "stdout.txt").string();
        require(std::system(cmd.c_str()) == 0, "simulate run failed");
        runs.push_back(slurp(stats) + slurp(records) + slurp(akey) + slurp(bkey) +
                       slurp(dir / "stdout.txt"));
    }
    require(runs[0] == runs[1], "worker counts 1 and 3 disagree byte-for-byte");
    require(runs[0] == runs[2], "identical reruns disagree byte-for-byte");
    fs::remove_all(dir);
}

struct Criterion {
    int id;
    const char *name;
    std::function<void()> check;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "MUB table: orthonormal, unbiased, CSCO-diagonalized (< 1 s)",
         check_mub_correctness},
        {2, "20 prep circuits + 5 measurement circuits, fidelity > 1-1e-10 (< 1 s)",
         check_circuit_fidelity},
        {3, "Sagnac anchor: pi/8 block matrix and identity at 0 (1e-12)",
         check_sagnac_anchor},
        {4, "Ideal MZEM: canonical states -> 4 distinct detectors; phase flip swaps ports",
         check_detection_bijection},
        {5, "Intercept-resend at N=1e5 matches enumeration within 3 sigma (< 30 s)",
         check_attack_rates},
        {6, "paper-tableIV preset: per-state misrouting matches the port formula (3 sigma)",
         check_visibility_preset},
        {7, "Mode overlap: TEM00 Gaussian closed form (1e-4), TEM10 vs fine quadrature",
         check_mode_overlap},
        {8, "Path geometry: sqrt(2) times the double-mirror displacement, exact",
         check_path_geometry},
        {9, "Post-processing: residual < 1e-3 on 5% keys; linear, length-exact hashing",
         check_postprocessing},
        {10, "simulate is byte-identical across reruns and worker counts",
         check_cli_determinism},
    };

    int failures = 0;
    for (const Criterion &c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = true;
        try {
            c.check();
        } catch (const std::exception &e) {
            ok = false;
            detail = e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << c.id << ": "
                  << c.name << "  (" << num(secs) << " s)";
        if (!ok)
            std::cout << "  -- " << detail;
        std::cout << "\n";
        failures += !ok;
    }
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
