// graphgp CLI: runs and validates experiment configs.
//
//   graphgp run <config> [--out <dir>] [--seed <u64>] [--threads <n>]
//   graphgp validate <config>
//
// Exit codes: 0 success, 2 validation error, 3 numerical error.

#include "graphgp/experiments.hpp"
#include "graphgp/parallel.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>

namespace {

int do_validate(const std::string& config_path) {
    std::string text = graphgp::read_text_file(config_path);
    graphgp::ExperimentConfig config = graphgp::parse_experiment_config(text);
    std::cout << "config ok: " << to_string(config.kind) << "\n";
    for (const auto& note : config.resolved_defaults) std::cout << note << "\n";
    return 0;
}

int do_run(const std::string& config_path, const std::string& out_override,
           bool has_seed_override, std::uint64_t seed_override) {
    std::string text = graphgp::read_text_file(config_path);
    graphgp::ExperimentConfig config = graphgp::parse_experiment_config(text);
    if (!out_override.empty()) config.out_dir = out_override;
    if (has_seed_override) config.seed = seed_override;

    graphgp::ExperimentResult result = graphgp::run_experiment(config, text);
    std::cout << "wrote " << result.artifacts.size() << " artifacts + manifest to "
              << result.out_dir.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian-process kernels of graph transformers"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 1;

    CLI::App* run = app.add_subcommand("run", "execute an experiment config");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--out", out_dir, "output directory (overrides config)");
    CLI::Option* seed_opt = run->add_option("--seed", seed, "root seed (overrides config)");
    run->add_option("--threads", threads, "worker threads");

    CLI::App* validate = app.add_subcommand("validate", "validate a config without running");
    validate->add_option("config", config_path, "experiment config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(validate)) return do_validate(config_path);
        graphgp::set_max_threads(threads);
        return do_run(config_path, out_dir, seed_opt->count() > 0, seed);
    } catch (const graphgp::ValidationError& e) {
        std::cerr << "validation error:\n" << e.what() << "\n";
        return 2;
    } catch (const graphgp::ParseError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const graphgp::InvalidParameterError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const graphgp::Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
}
