#include "toric/config.hpp"
#include "toric/errors.hpp"
#include "toric/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

using namespace toric;

int main(int argc, char** argv) {
    CLI::App app{"toric-quench: exact quench dynamics of toric-code ground states on small tori"};
    app.require_subcommand(1);

    std::string config_path, preset_name, out_dir;
    int threads = 0;
    double t_max = 0.0, dt = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", out_dir,
                        "output directory (default: config output_dir, then "
                        "$TORIC_QUENCH_OUT/<name>, then out/<name>)");
        sub->add_option("--threads", threads, "worker threads (overrides the config)")
            ->check(CLI::Range(1, 256));
        sub->add_option("--t-max", t_max, "evolve to this time (overrides the config)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--dt", dt, "sampling step (overrides the config)")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* cmd_run = app.add_subcommand("run", "run the experiment described by a config file");
    cmd_run->add_option("config", config_path, "INI-style experiment description")->required();
    add_common(cmd_run);

    CLI::App* cmd_preset =
        app.add_subcommand("preset", "run one of the built-in experiments (fig1, fig2, fig3)");
    cmd_preset->add_option("which", preset_name, "fig1 | fig2 | fig3")->required();
    add_common(cmd_preset);

    CLI::App* cmd_validate =
        app.add_subcommand("validate", "check a config file and echo the resolved experiment");
    cmd_validate->add_option("config", config_path, "INI-style experiment description")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2; // bad command line is a configuration problem
    }

    auto apply_overrides = [&](ExperimentConfig& cfg, const CLI::App* sub) {
        if (sub->count("--threads")) cfg.threads = threads;
        if (sub->count("--t-max")) cfg.grid.t_max = t_max;
        if (sub->count("--dt")) cfg.grid.dt = dt;
        if (cfg.grid.t_max < cfg.grid.dt)
            throw ConfigError("t_max must be at least dt after command-line overrides");
        if (cfg.grid.t_max / cfg.grid.dt + 1 > 2e6)
            throw ConfigError("grid would have more than 2e6 samples after command-line "
                              "overrides; raise dt or lower t-max");
        if (cfg.measures.tavg_window_min >= cfg.grid.t_max)
            throw ConfigError("tavg_window_min " + format_double(cfg.measures.tavg_window_min) +
                              " is not below t_max " + format_double(cfg.grid.t_max) +
                              " after command-line overrides");
    };

    try {
        if (cmd_run->parsed()) {
            ExperimentConfig cfg = load_config_file(config_path);
            apply_overrides(cfg, cmd_run);
            return run_experiment(cfg, resolve_output_dir(cfg, out_dir), std::cout);
        }
        if (cmd_preset->parsed()) {
            ExperimentConfig cfg = preset_config(preset_name);
            apply_overrides(cfg, cmd_preset);
            return run_experiment(cfg, resolve_output_dir(cfg, out_dir), std::cout);
        }
        ExperimentConfig cfg = load_config_file(config_path); // validate
        std::cout << echo_config(cfg) << "ok\n";
        return 0;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return 3;
    } catch (const SizeLimitError& e) {
        std::cerr << "size limit: " << e.what() << "\n";
        return 4;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
