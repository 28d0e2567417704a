// rcm_lab: config-driven experiment runner for the random connection model
// laboratory. One subcommand per experiment or oracle; every run writes a
// results CSV, a JSON manifest that reproduces it, and a text summary.
//
//   rcm_lab <subcommand> --config cfg.json [--seed S] [--reps N]
//           [--out DIR] [--threads T]
//   rcm_lab run --config manifest.json        # rerun from a manifest
//
// Exit codes: 0 success, 1 checked property failed, 2 invalid config.
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "rcm/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"random connection model laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    std::uint64_t reps_override = 0;
    bool reps_given = false;
    std::string out_override;
    unsigned threads_override = 0;

    std::vector<CLI::App*> subs;
    auto add_sub = [&](const std::string& name, const std::string& desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "config JSON (or manifest) path")
            ->required();
        sub->add_option("--seed", seed_override, "override the master seed")
            ->each([&](const std::string&) { seed_given = true; });
        sub->add_option("--reps", reps_override, "override the replication budget")
            ->each([&](const std::string&) { reps_given = true; });
        sub->add_option("--out", out_override, "output directory");
        sub->add_option("--threads", threads_override, "worker threads");
        subs.push_back(sub);
        return sub;
    };

    add_sub("run", "run whatever subcommand the config names");
    for (const auto& name : rcm::cli::subcommand_names())
        add_sub(name, "run the " + name + " experiment");

    CLI11_PARSE(app, argc, argv);

    try {
        rcm::cli::ExperimentConfig cfg = rcm::cli::load_config_file(config_path);
        const std::string invoked = app.get_subcommands().front()->get_name();
        if (invoked != "run" && invoked != cfg.subcommand) {
            std::cerr << "error: config names subcommand '" << cfg.subcommand
                      << "' but '" << invoked << "' was invoked\n";
            return 2;
        }
        if (seed_given) cfg.seed = seed_override;
        if (reps_given) {
            if (!cfg.params.contains("reps") && !cfg.params.contains("outer_reps")) {
                std::cerr << "error: --reps does not apply to " << cfg.subcommand
                          << "\n";
                return 2;
            }
            if (cfg.params.contains("reps")) cfg.params["reps"] = reps_override;
            if (cfg.params.contains("outer_reps"))
                cfg.params["outer_reps"] = reps_override;
        }
        if (!out_override.empty()) {
            cfg.out_dir = out_override;
        } else if (cfg.out_dir == ".") {
            if (const char* env = std::getenv("RCM_LAB_OUT")) cfg.out_dir = env;
        }
        if (threads_override > 0) cfg.threads = threads_override;

        const rcm::cli::RunResult result = rcm::cli::run(cfg);
        std::cout << result.summary;
        for (const auto& f : result.written_files) std::cout << "wrote " << f << "\n";
        return result.exit_code;
    } catch (const rcm::cli::ConfigError& e) {
        std::cerr << "config validation failed:\n";
        for (const auto& f : e.fields) std::cerr << "  - " << f << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
