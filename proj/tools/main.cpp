// photonkd: simulator CLI for two-qubit-per-photon quantum key distribution.
// Subcommands: mubs, simulate, mzem, distill.

#include "commands.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <vector>

int main(int argc, char **argv) {
    using namespace photonkd::cli;

    CLI::App app{"Polarization x transverse-mode BB84 simulator"};
    app.require_subcommand(1);

    MubsOptions mubs;
    CLI::App *mubs_cmd =
        app.add_subcommand("mubs", "Print the five mutually unbiased bases");
    mubs_cmd->add_flag("--verify", mubs.verify,
                       "Exit nonzero if the unbiasedness check fails");
    std::string basis_arg;
    mubs_cmd->add_option("--basis", basis_arg, "Print only this basis (B1..B5)");
    mubs_cmd->add_option("--format", mubs.format, "Output format: table or csv")
        ->capture_default_str();

    SimulateOptions sim;
    CLI::App *sim_cmd =
        app.add_subcommand("simulate", "Run the Monte Carlo protocol");
    sim_cmd->add_option("config", sim.config_path, "JSON run configuration")
        ->required();
    std::uint64_t seed_arg = 0, rounds_arg = 0;
    int workers_arg = 0;
    double expect_arg = 0.0;
    std::string stats_arg, records_arg, akey_arg, bkey_arg;
    CLI::Option *seed_opt =
        sim_cmd->add_option("--seed", seed_arg, "Override the root seed");
    CLI::Option *rounds_opt =
        sim_cmd->add_option("--rounds", rounds_arg, "Override the round count");
    CLI::Option *workers_opt =
        sim_cmd->add_option("--workers", workers_arg, "Worker thread count");
    CLI::Option *stats_opt =
        sim_cmd->add_option("--stats", stats_arg, "Write the stats JSON here");
    CLI::Option *records_opt = sim_cmd->add_option(
        "--records", records_arg, "Write the per-round CSV here");
    CLI::Option *akey_opt = sim_cmd->add_option("--alice-key", akey_arg,
                                                "Write Alice's sifted key here");
    CLI::Option *bkey_opt =
        sim_cmd->add_option("--bob-key", bkey_arg, "Write Bob's sifted key here");
    CLI::Option *expect_opt = sim_cmd->add_option(
        "--expect-qber", expect_arg, "Fail unless the symbol QBER matches");
    sim_cmd->add_option("--tol", sim.tolerance, "Tolerance for --expect-qber")
        ->capture_default_str();

    MzemOptions mz;
    CLI::App *mz_cmd =
        app.add_subcommand("mzem", "Interferometer visibility tools");
    std::vector<double> scan_args;
    mz_cmd->add_option("--scan-dx", scan_args,
                       "FROM TO STEPS: scan the lateral displacement (waists)")
        ->expected(3);
    mz_cmd->add_option("--mode", mz.mode, "Mode profile: tem00 or tem10")
        ->capture_default_str();
    mz_cmd->add_option("--grid", mz.grid, "Grid resolution")->capture_default_str();
    std::string preset_arg;
    mz_cmd->add_option("--preset", preset_arg,
                       "Print the per-state visibility matrix of a preset");

    DistillOptions dist;
    CLI::App *dist_cmd = app.add_subcommand(
        "distill", "Reconcile two key files and privacy-amplify");
    dist_cmd->add_option("--alice", dist.alice_path, "Alice key file")->required();
    dist_cmd->add_option("--bob", dist.bob_path, "Bob key file")->required();
    dist_cmd->add_option("--block-size", dist.block_size, "Parity block size")
        ->capture_default_str();
    dist_cmd->add_option("--passes", dist.passes, "Reconciliation passes")
        ->capture_default_str();
    dist_cmd->add_option("--margin", dist.security_margin, "Security margin bits")
        ->capture_default_str();
    dist_cmd->add_option("--seed", dist.seed, "Seed for permutations and hashing")
        ->capture_default_str();
    std::string out_arg;
    dist_cmd->add_option("--out", out_arg, "Write the final key here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        if (mubs_cmd->parsed()) {
            if (!basis_arg.empty())
                mubs.basis = basis_arg;
            return cmd_mubs(mubs);
        }
        if (sim_cmd->parsed()) {
            if (*seed_opt)
                sim.seed = seed_arg;
            if (*rounds_opt)
                sim.rounds = rounds_arg;
            if (*workers_opt)
                sim.workers = workers_arg;
            if (*stats_opt)
                sim.stats_path = stats_arg;
            if (*records_opt)
                sim.records_path = records_arg;
            if (*akey_opt)
                sim.alice_key_path = akey_arg;
            if (*bkey_opt)
                sim.bob_key_path = bkey_arg;
            if (*expect_opt)
                sim.expect_qber = expect_arg;
            return cmd_simulate(sim);
        }
        if (mz_cmd->parsed()) {
            if (!preset_arg.empty())
                mz.preset = preset_arg;
            if (!scan_args.empty()) {
                mz.scan = true;
                mz.scan_from = scan_args[0];
                mz.scan_to = scan_args[1];
                mz.scan_steps = static_cast<int>(scan_args[2]);
            }
            return cmd_mzem(mz);
        }
        if (dist_cmd->parsed()) {
            if (!out_arg.empty())
                dist.out_path = out_arg;
            return cmd_distill(dist);
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataError;
    }
    return kExitConfigError;
}
