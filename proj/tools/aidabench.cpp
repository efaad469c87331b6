#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "aidaopt/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Deterministic benchmark runner for the aidaopt optimizers"};

    std::string config_path;
    std::string optimizer;
    std::string compare_list;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::int64_t steps = -1;
    double lr = 0.0;
    int k = 0;

    app.add_option("--config", config_path, "Config file (INI sections or JSON manifest)");
    app.add_option("--optimizer", optimizer, "Optimizer id (sgdm, adam, ..., laida)");
    app.add_option("--seed", seed, "Run seed");
    app.add_option("--steps", steps, "Total optimizer steps");
    app.add_option("--lr", lr, "Base learning rate");
    app.add_option("--k", k, "Projection count K");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--compare", compare_list,
                   "Comma-separated optimizer ids; runs each on the same data stream");

    CLI11_PARSE(app, argc, argv);

    try {
        aidaopt::RunConfig config;
        if (!config_path.empty()) {
            config = aidaopt::load_config(config_path);
        }
        // flags override file values
        if (app.count("--optimizer") > 0) config.optimizer = optimizer;
        if (app.count("--seed") > 0) config.seed = seed;
        if (app.count("--steps") > 0) {
            config.steps = steps;
            config.epochs = 0;
        }
        if (app.count("--lr") > 0) config.base_lr = lr;
        if (app.count("--k") > 0) config.hp.projections = k;
        if (app.count("--out") > 0) config.out_dir = out_dir;
        if (app.count("--compare") > 0) {
            config.compare.clear();
            std::string item;
            for (char c : compare_list) {
                if (c == ',') {
                    if (!item.empty()) config.compare.push_back(item);
                    item.clear();
                } else if (c != ' ') {
                    item += c;
                }
            }
            if (!item.empty()) config.compare.push_back(item);
        }

        const aidaopt::RunResult result =
            config.compare.empty() ? aidaopt::run(config) : aidaopt::compare(config);
        return result.exit_code;
    } catch (const aidaopt::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
