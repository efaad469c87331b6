#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "aidaopt/objectives.hpp"
#include "aidaopt/optim.hpp"

namespace aidaopt {

/// Raised for any malformed or rejected configuration (maps to exit 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ObjectiveSpec {
    std::string kind = "quadratic";  // quadratic | rosenbrock | mlp
    std::vector<QuadraticBlock> blocks = {{4, 100.0}, {3, 100.0}, {5, 100.0}};
    std::size_t rosenbrock_n = 10;
    std::vector<std::size_t> hidden = {32, 16};
    Activation activation = Activation::relu;
};

struct DatasetSpec {
    std::string kind = "synthetic";  // synthetic | idx
    std::size_t classes = 4;
    std::size_t per_class = 500;
    std::size_t dim = 20;
    double separation = 6.0;
    double val_fraction = 0.2;
    std::string images;  // idx paths
    std::string labels;
};

/// Full description of one experiment; everything the manifest records.
struct RunConfig {
    std::string optimizer = "adam";
    std::vector<std::string> compare;
    std::uint64_t seed = 1;
    std::int64_t steps = 500;
    std::int64_t epochs = 0;    // takes precedence over steps when > 0
    std::size_t batch_size = 128;
    std::int64_t log_every = 0;   // 0: every epoch-equivalent
    std::int64_t epoch_steps = 1; // epoch block for dataset-free objectives
    std::string out_dir = "out";

    HyperParams hp = default_hyperparams();
    double base_lr = 0.001;
    // Milestones in epoch-equivalents, applied from the following epoch.
    std::vector<std::pair<std::int64_t, double>> milestones = {{100, 0.1}, {160, 0.1}};

    ObjectiveSpec objective;
    DatasetSpec dataset;

    static HyperParams default_hyperparams();
    void validate() const;  // throws ConfigError
};

/// Parse a config file: JSON (object, possibly a previously written
/// manifest) or flat INI-style "key = value" sections. Unknown keys are
/// rejected.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

struct RunResult {
    int exit_code = 0;
    bool diverged = false;
    std::int64_t steps_completed = 0;
    double final_loss = 0.0;
    double final_val_metric = 0.0;
    double final_compactness = 1.0;
    std::filesystem::path out_dir;
};

/// Execute one deterministic training run; writes manifest.json and
/// metrics.csv under config.out_dir and prints the final metrics.
RunResult run(const RunConfig& config);

/// Run every optimizer in config.compare on the identical data stream and
/// write a summary.csv next to the per-optimizer artifacts.
RunResult compare(const RunConfig& config);

extern const char* const kArtifactVersion;

}  // namespace aidaopt
