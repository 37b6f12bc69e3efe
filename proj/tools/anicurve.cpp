#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "anicurve/harness/config.hpp"
#include "anicurve/harness/experiments.hpp"

int main(int argc, char** argv) {
    namespace h = anicurve::harness;
    CLI::App app{"anicurve: support-function flows of axisymmetric convex bodies with direction-dependent speed"};
    std::string experiment;
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    app.add_option("experiment", experiment, "flow | soliton | counterexample | validate | barriers")
        ->required()
        ->check(CLI::IsMember({"flow", "soliton", "counterexample", "validate", "barriers"}));
    app.add_option("--config", config_path, "key = value configuration file")->required();
    app.add_option("--out", out, "output directory (overrides the config's out key)");
    app.add_option("--seed", seed, "64-bit seed for randomized experiments (default 0)");
    CLI11_PARSE(app, argc, argv);

    try {
        h::ExperimentConfig cfg = h::load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (out) cfg.out = *out;
        return h::run_experiment(cfg, h::experiment_from_string(experiment), cfg.out);
    } catch (const h::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid parameters: " << e.what() << '\n';
    } catch (const std::domain_error& e) {
        std::cerr << "precondition violated: " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return h::kExitError;
}
