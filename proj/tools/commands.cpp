#include "commands.hpp"

#include "photonkd/mub.hpp"
#include "photonkd/mzem.hpp"
#include "photonkd/postproc.hpp"
#include "photonkd/protocol.hpp"
#include "run_config.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace photonkd::cli {

namespace {

constexpr double kUnbiasednessGate = 1e-10;

std::string fmt(const char *pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, v);
    return buf;
}

std::string rate(double v) { return fmt("%.9g", v); }

std::string amplitude(const Complex &c) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%+.6f%+.6fi", c.real(), c.imag());
    return buf;
}

const char *csco_names(BasisId b) {
    static constexpr const char *kNames[5] = {"ZZ, ZI, IZ", "XX, XI, IX",
                                              "YY, YI, IY", "YX, XZ, ZY",
                                              "XY, YZ, ZX"};
    return kNames[basis_index(b)];
}

void print_report(std::ostream &os, const UnbiasednessReport &r) {
    os << "cross-basis pairs checked: " << r.pair_count << "\n";
    os << "max | |<a|b>|^2 - 1/4 | = " << rate(r.max_deviation) << " ("
       << basis_name(r.worst_basis_a) << " state " << r.worst_state_a << " vs "
       << basis_name(r.worst_basis_b) << " state " << r.worst_state_b << ")\n";
}

nlohmann::json stats_document(const ProtocolConfig &cfg,
                              const ProtocolStats &stats) {
    nlohmann::json bases = nlohmann::json::array();
    for (BasisId b : cfg.basis_set)
        bases.push_back(basis_name(b));
    return nlohmann::json{
        {"bases", bases},
        {"seed", cfg.seed},
        {"n_rounds", stats.n_rounds},
        {"n_sifted", stats.n_sifted},
        {"sifted_fraction", stats.sifted_fraction},
        {"symbol_error_rate", stats.symbol_error_rate},
        {"bit_error_rate", stats.bit_error_rate},
        {"raw_key_bits_per_photon", stats.raw_key_bits_per_photon},
        {"qber_threshold_exceeded", stats.qber_threshold_exceeded},
    };
}

void write_records_csv(std::ostream &os, const std::vector<RoundRecord> &records) {
    os << "round,alice_basis,alice_state,eve_basis,eve_outcome,photon_lost,"
          "bob_basis,bob_detector,bob_symbol,sifted\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const RoundRecord &r = records[i];
        os << i << ',' << basis_name(r.alice_basis) << ',' << r.alice_state_idx
           << ',';
        if (r.eve_basis)
            os << basis_name(*r.eve_basis);
        os << ',';
        if (r.eve_outcome)
            os << *r.eve_outcome;
        os << ',' << (r.photon_lost ? 1 : 0) << ',' << basis_name(r.bob_basis)
           << ',';
        if (r.bob_detector)
            os << *r.bob_detector;
        os << ',';
        if (r.bob_symbol)
            os << *r.bob_symbol;
        os << ',' << (r.sifted ? 1 : 0) << '\n';
    }
}

std::ofstream open_for_write(const std::string &path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f)
        throw std::runtime_error("cannot open output file: " + path);
    return f;
}

} // namespace

int cmd_mubs(const MubsOptions &opt) {
    if (opt.format != "table" && opt.format != "csv") {
        std::cerr << "error: unknown format \"" << opt.format << "\"\n";
        return kExitConfigError;
    }
    std::optional<BasisId> only;
    if (opt.basis) {
        only = basis_from_name(*opt.basis);
        if (!only) {
            std::cerr << "error: unknown basis \"" << *opt.basis << "\"\n";
            return kExitConfigError;
        }
    }

    BasisTable table;
    try {
        table = build_basis_table();
    } catch (const contract_error &e) {
        std::cerr << "basis table construction failed: " << e.what() << "\n";
        return kExitVerifyFailed;
    }

    if (opt.format == "csv") {
        std::cout << "re0,im0,re1,im1,re2,im2,re3,im3\n";
        for (BasisId b : kAllBases) {
            if (only && b != *only)
                continue;
            for (int i = 0; i < 4; ++i) {
                const Vec4 &amp = table.state(b, i).amp();
                for (int k = 0; k < 4; ++k) {
                    std::cout << rate(amp(k).real()) << ',' << rate(amp(k).imag());
                    std::cout << (k == 3 ? '\n' : ',');
                }
            }
        }
    } else {
        for (BasisId b : kAllBases) {
            if (only && b != *only)
                continue;
            std::cout << basis_name(b) << "  (CSCO: " << csco_names(b) << ")"
                      << (is_entangled_basis(b) ? "  [entangled]" : "") << "\n";
            for (int i = 0; i < 4; ++i) {
                std::cout << "  state " << i << ":";
                for (int k = 0; k < 4; ++k)
                    std::cout << "  " << amplitude(table.state(b, i)[k]);
                std::cout << "\n";
            }
        }
    }

    const UnbiasednessReport report = verify_unbiasedness(table);
    print_report(std::cout, report);
    if (opt.verify && report.max_deviation > kUnbiasednessGate) {
        std::cerr << "verification failed: deviation above " << kUnbiasednessGate
                  << "\n";
        return kExitVerifyFailed;
    }
    return kExitOk;
}

int cmd_simulate(const SimulateOptions &opt) {
    RunConfig cfg;
    try {
        cfg = load_run_config(opt.config_path);
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    // Flags win over the file.
    if (opt.seed)
        cfg.protocol.seed = *opt.seed;
    if (opt.rounds)
        cfg.protocol.n_rounds = *opt.rounds;
    if (opt.workers)
        cfg.protocol.workers = *opt.workers;
    if (opt.stats_path)
        cfg.output.stats = opt.stats_path;
    if (opt.records_path)
        cfg.output.records = opt.records_path;
    if (opt.alice_key_path)
        cfg.output.alice_key = opt.alice_key_path;
    if (opt.bob_key_path)
        cfg.output.bob_key = opt.bob_key_path;

    try {
        cfg.protocol.validate();
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    const ProtocolResult result = run_protocol(cfg.protocol);
    const nlohmann::json stats = stats_document(cfg.protocol, result.stats);

    if (cfg.output.stats) {
        auto f = open_for_write(*cfg.output.stats);
        f << stats.dump(2) << "\n";
    }
    if (cfg.output.records) {
        auto f = open_for_write(*cfg.output.records);
        write_records_csv(f, result.records);
    }
    if (cfg.output.alice_key)
        write_key_file(*cfg.output.alice_key, result.alice_bits);
    if (cfg.output.bob_key)
        write_key_file(*cfg.output.bob_key, result.bob_bits);

    std::cout << stats.dump(2) << "\n";
    if (result.stats.qber_threshold_exceeded)
        std::cerr << "warning: symbol error rate "
                  << rate(result.stats.symbol_error_rate)
                  << " exceeds the configured threshold\n";

    if (opt.expect_qber) {
        const double delta =
            std::abs(result.stats.symbol_error_rate - *opt.expect_qber);
        if (delta > opt.tolerance) {
            std::cerr << "expected symbol QBER " << rate(*opt.expect_qber)
                      << " +- " << rate(opt.tolerance) << ", measured "
                      << rate(result.stats.symbol_error_rate) << "\n";
            return kExitVerifyFailed;
        }
    }
    return kExitOk;
}

int cmd_mzem(const MzemOptions &opt) {
    if (opt.preset) {
        MzemSettings s;
        try {
            s = MzemSettings::preset(*opt.preset);
        } catch (const std::invalid_argument &e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitConfigError;
        }
        static constexpr const char *kStateNames[4] = {"H_TEMH", "H_TEMV",
                                                       "V_TEMH", "V_TEMV"};
        std::cout << "state,visibility_a,visibility_b,wrong_port_probability\n";
        for (int k = 0; k < 4; ++k) {
            const double p_a = port_a_probability_for_state(k, s);
            const bool a_correct = canonical_parity(k) == 1;
            const double wrong = a_correct ? 1.0 - p_a : p_a;
            std::cout << kStateNames[k] << ',' << rate(s.visibility_a[k]) << ','
                      << rate(s.visibility_b[k]) << ',' << rate(wrong) << "\n";
        }
        if (!opt.scan)
            return kExitOk;
    }
    if (!opt.scan) {
        std::cerr << "error: nothing to do; pass --scan-dx or --preset\n";
        return kExitConfigError;
    }
    int order_x = 0;
    if (opt.mode == "tem10")
        order_x = 1;
    else if (opt.mode != "tem00") {
        std::cerr << "error: unknown mode \"" << opt.mode
                  << "\" (expected tem00 or tem10)\n";
        return kExitConfigError;
    }
    if (opt.scan_steps < 1 || opt.scan_from < 0 || opt.scan_to < opt.scan_from) {
        std::cerr << "error: malformed scan range\n";
        return kExitConfigError;
    }
    // Size the grid extent to keep the largest displacement admissible.
    const double extent = std::max(6.0, 4.0 + 2.0 * opt.scan_to + 0.5);
    const ModeProfile profile =
        ModeProfile::hermite_gaussian(order_x, 0, 1.0, opt.grid, extent);
    std::cout << "dx,visibility\n";
    for (int i = 0; i < opt.scan_steps; ++i) {
        const double dx =
            opt.scan_steps == 1
                ? opt.scan_from
                : opt.scan_from + (opt.scan_to - opt.scan_from) * i /
                                      (opt.scan_steps - 1);
        std::cout << rate(dx) << ',' << rate(std::abs(mirror_overlap(profile, dx)))
                  << "\n";
    }
    return kExitOk;
}

int cmd_distill(const DistillOptions &opt) {
    BitString alice, bob;
    try {
        alice = read_key_file(opt.alice_path);
        bob = read_key_file(opt.bob_path);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataError;
    }
    if (alice.size() != bob.size() || alice.empty()) {
        std::cerr << "error: key files disagree in length (" << alice.size()
                  << " vs " << bob.size() << ")\n";
        return kExitDataError;
    }

    RandomStream rng = RandomStream(opt.seed).derive(1);
    const ReconcileReport report =
        reconcile(alice, bob, opt.block_size, opt.passes, rng);

    std::size_t disagreements = 0;
    for (std::size_t i = 0; i < alice.size(); ++i)
        disagreements += alice[i] != report.corrected[i];

    BitString final_key;
    try {
        final_key = privacy_amplify(alice, report.parity_bits_leaked, opt.seed,
                                    opt.security_margin);
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataError;
    }

    std::cout << "input_bits: " << alice.size() << "\n";
    std::cout << "reconcile_passes: " << report.passes << "\n";
    std::cout << "parity_bits_leaked: " << report.parity_bits_leaked << "\n";
    std::cout << "residual_error_estimate: " << rate(report.residual_error_estimate)
              << "\n";
    std::cout << "residual_disagreements: " << disagreements << "\n";
    std::cout << "security_margin: " << opt.security_margin << "\n";
    std::cout << "final_key_bits: " << final_key.size() << "\n";
    if (opt.out_path)
        write_key_file(*opt.out_path, final_key);
    return kExitOk;
}

} // namespace photonkd::cli
