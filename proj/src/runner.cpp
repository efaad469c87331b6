#include "aidaopt/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "aidaopt/telemetry.hpp"

namespace aidaopt {

using ordered_json = nlohmann::ordered_json;

const char* const kArtifactVersion = "aidaopt 0.1.0";

HyperParams RunConfig::default_hyperparams() {
    HyperParams hp;
    hp.weight_decay = 5e-4;
    return hp;
}

namespace {

double parse_double(const std::string& text, const std::string& key) {
    double v = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("config: bad number for " + key + ": '" + text + "'");
    }
    return v;
}

std::int64_t parse_int(const std::string& text, const std::string& key) {
    std::int64_t v = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("config: bad integer for " + key + ": '" + text + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& key) {
    std::uint64_t v = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("config: bad unsigned integer for " + key + ": '" + text + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, sep)) {
        parts.push_back(token);
    }
    return parts;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

// One table drives both the INI and the JSON loader; every recognized
// "section.key" has a setter, anything else is rejected.
const std::map<std::string, Setter>& config_setters() {
    static const std::map<std::string, Setter> setters = {
        {"run.optimizer", [](RunConfig& c, const std::string& v, const std::string&) { c.optimizer = v; }},
        {"run.compare",
         [](RunConfig& c, const std::string& v, const std::string&) {
             c.compare.clear();
             for (const auto& part : split(v, ',')) {
                 const std::string id = trim(part);
                 if (!id.empty()) c.compare.push_back(id);
             }
         }},
        {"run.seed", [](RunConfig& c, const std::string& v, const std::string& k) { c.seed = parse_u64(v, k); }},
        {"run.steps", [](RunConfig& c, const std::string& v, const std::string& k) { c.steps = parse_int(v, k); }},
        {"run.epochs", [](RunConfig& c, const std::string& v, const std::string& k) { c.epochs = parse_int(v, k); }},
        {"run.batch_size",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.batch_size = static_cast<std::size_t>(parse_u64(v, k));
         }},
        {"run.log_every", [](RunConfig& c, const std::string& v, const std::string& k) { c.log_every = parse_int(v, k); }},
        {"run.epoch_steps",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.epoch_steps = parse_int(v, k); }},
        {"run.out_dir", [](RunConfig& c, const std::string& v, const std::string&) { c.out_dir = v; }},

        {"optim.beta1", [](RunConfig& c, const std::string& v, const std::string& k) { c.hp.beta1 = parse_double(v, k); }},
        {"optim.beta2", [](RunConfig& c, const std::string& v, const std::string& k) { c.hp.beta2 = parse_double(v, k); }},
        {"optim.eps", [](RunConfig& c, const std::string& v, const std::string& k) { c.hp.eps = parse_double(v, k); }},
        {"optim.xi", [](RunConfig& c, const std::string& v, const std::string& k) { c.hp.xi = parse_double(v, k); }},
        {"optim.k",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.hp.projections = static_cast<int>(parse_int(v, k));
         }},
        {"optim.weight_decay",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.hp.weight_decay = parse_double(v, k); }},
        {"optim.decay_mode",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             if (v == "coupled") {
                 c.hp.decay_mode = DecayMode::coupled;
             } else if (v == "decoupled") {
                 c.hp.decay_mode = DecayMode::decoupled;
             } else {
                 throw ConfigError("config: " + k + " must be coupled or decoupled");
             }
         }},
        {"optim.hb_alpha", [](RunConfig& c, const std::string& v, const std::string& k) { c.hp.hb_alpha = parse_double(v, k); }},
        {"optim.hb_beta", [](RunConfig& c, const std::string& v, const std::string& k) { c.hp.hb_beta = parse_double(v, k); }},
        {"optim.hb_gamma", [](RunConfig& c, const std::string& v, const std::string& k) { c.hp.hb_gamma = parse_double(v, k); }},

        {"schedule.base_lr", [](RunConfig& c, const std::string& v, const std::string& k) { c.base_lr = parse_double(v, k); }},
        {"schedule.milestones",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.milestones.clear();
             for (const auto& part : split(v, ',')) {
                 const std::string item = trim(part);
                 if (item.empty()) continue;
                 const auto pieces = split(item, ':');
                 if (pieces.size() != 2) {
                     throw ConfigError("config: " + k + " entries must look like epoch:multiplier");
                 }
                 c.milestones.emplace_back(parse_int(trim(pieces[0]), k),
                                           parse_double(trim(pieces[1]), k));
             }
         }},

        {"objective.kind", [](RunConfig& c, const std::string& v, const std::string&) { c.objective.kind = v; }},
        {"objective.blocks",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.objective.blocks.clear();
             for (const auto& part : split(v, ',')) {
                 const std::string item = trim(part);
                 if (item.empty()) continue;
                 const auto pieces = split(item, ':');
                 if (pieces.size() != 2) {
                     throw ConfigError("config: " + k + " entries must look like dim:condition");
                 }
                 c.objective.blocks.push_back(
                     {static_cast<std::size_t>(parse_u64(trim(pieces[0]), k)),
                      parse_double(trim(pieces[1]), k)});
             }
         }},
        {"objective.n",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.objective.rosenbrock_n = static_cast<std::size_t>(parse_u64(v, k));
         }},
        {"objective.hidden",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.objective.hidden.clear();
             for (const auto& part : split(v, ',')) {
                 const std::string item = trim(part);
                 if (item.empty()) continue;
                 c.objective.hidden.push_back(static_cast<std::size_t>(parse_u64(item, k)));
             }
         }},
        {"objective.activation",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             if (v == "relu") {
                 c.objective.activation = Activation::relu;
             } else if (v == "tanh") {
                 c.objective.activation = Activation::tanh;
             } else {
                 throw ConfigError("config: " + k + " must be relu or tanh");
             }
         }},

        {"dataset.kind", [](RunConfig& c, const std::string& v, const std::string&) { c.dataset.kind = v; }},
        {"dataset.classes",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.dataset.classes = static_cast<std::size_t>(parse_u64(v, k));
         }},
        {"dataset.per_class",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.dataset.per_class = static_cast<std::size_t>(parse_u64(v, k));
         }},
        {"dataset.dim",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.dataset.dim = static_cast<std::size_t>(parse_u64(v, k));
         }},
        {"dataset.separation",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.dataset.separation = parse_double(v, k); }},
        {"dataset.val_fraction",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.dataset.val_fraction = parse_double(v, k); }},
        {"dataset.images", [](RunConfig& c, const std::string& v, const std::string&) { c.dataset.images = v; }},
        {"dataset.labels", [](RunConfig& c, const std::string& v, const std::string&) { c.dataset.labels = v; }},
    };
    return setters;
}

void apply_key(RunConfig& config, const std::string& section, const std::string& key,
               const std::string& value) {
    const std::string full = section + "." + key;
    const auto& setters = config_setters();
    const auto it = setters.find(full);
    if (it == setters.end()) {
        throw ConfigError("config: unknown key '" + full + "'");
    }
    it->second(config, value, full);
}

std::string json_scalar_to_string(const ordered_json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_float()) return format_double(v.get<double>());
    throw ConfigError("config: unsupported value type for " + key);
}

// Arrays flatten to the INI spelling: inner pairs join with ':', the outer
// list with ','.
std::string json_value_to_string(const ordered_json& v, const std::string& key) {
    if (!v.is_array()) return json_scalar_to_string(v, key);
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ',';
        const auto& item = v[i];
        if (item.is_array()) {
            for (std::size_t j = 0; j < item.size(); ++j) {
                if (j > 0) out += ':';
                out += json_scalar_to_string(item[j], key);
            }
        } else {
            out += json_scalar_to_string(item, key);
        }
    }
    return out;
}

RunConfig config_from_json(const ordered_json& doc, const std::string& origin) {
    if (!doc.is_object()) {
        throw ConfigError("config: " + origin + " is not a JSON object");
    }
    RunConfig config;
    for (const auto& [section, body] : doc.items()) {
        if (section == "version" || section == "status") {
            continue;  // manifest provenance, not configuration
        }
        if (!body.is_object()) {
            throw ConfigError("config: section '" + section + "' must be an object");
        }
        for (const auto& [key, value] : body.items()) {
            apply_key(config, section, key, json_value_to_string(value, section + "." + key));
        }
    }
    return config;
}

RunConfig config_from_ini(const std::string& text) {
    RunConfig config;
    std::string section;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') {
                throw ConfigError("config: malformed section header at line " +
                                  std::to_string(lineno));
            }
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
        }
        if (section.empty()) {
            throw ConfigError("config: key outside any [section] at line " +
                              std::to_string(lineno));
        }
        apply_key(config, section, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
    return config;
}

ordered_json milestones_to_json(const std::vector<std::pair<std::int64_t, double>>& ms) {
    ordered_json arr = ordered_json::array();
    for (const auto& [epoch, mult] : ms) {
        arr.push_back(ordered_json::array({epoch, mult}));
    }
    return arr;
}

ordered_json config_to_json(const RunConfig& c) {
    ordered_json doc;
    doc["version"] = kArtifactVersion;
    doc["run"] = {{"optimizer", c.optimizer}, {"compare", c.compare},
                  {"seed", c.seed},           {"steps", c.steps},
                  {"epochs", c.epochs},       {"batch_size", c.batch_size},
                  {"log_every", c.log_every}, {"epoch_steps", c.epoch_steps},
                  {"out_dir", c.out_dir}};
    doc["optim"] = {{"beta1", c.hp.beta1},
                    {"beta2", c.hp.beta2},
                    {"eps", c.hp.eps},
                    {"xi", c.hp.xi},
                    {"k", c.hp.projections},
                    {"weight_decay", c.hp.weight_decay},
                    {"decay_mode", c.hp.decay_mode == DecayMode::coupled ? "coupled" : "decoupled"},
                    {"hb_alpha", c.hp.hb_alpha},
                    {"hb_beta", c.hp.hb_beta},
                    {"hb_gamma", c.hp.hb_gamma}};
    doc["schedule"] = {{"base_lr", c.base_lr}, {"milestones", milestones_to_json(c.milestones)}};
    ordered_json objective = {{"kind", c.objective.kind}};
    if (c.objective.kind == "quadratic") {
        ordered_json blocks = ordered_json::array();
        for (const auto& b : c.objective.blocks) {
            blocks.push_back(ordered_json::array({b.dim, b.condition}));
        }
        objective["blocks"] = blocks;
    } else if (c.objective.kind == "rosenbrock") {
        objective["n"] = c.objective.rosenbrock_n;
    } else if (c.objective.kind == "mlp") {
        objective["hidden"] = c.objective.hidden;
        objective["activation"] = c.objective.activation == Activation::relu ? "relu" : "tanh";
    }
    doc["objective"] = objective;
    if (c.objective.kind == "mlp") {
        ordered_json dataset = {{"kind", c.dataset.kind}};
        if (c.dataset.kind == "synthetic") {
            dataset["classes"] = c.dataset.classes;
            dataset["per_class"] = c.dataset.per_class;
            dataset["dim"] = c.dataset.dim;
            dataset["separation"] = c.dataset.separation;
        } else {
            dataset["images"] = c.dataset.images;
            dataset["labels"] = c.dataset.labels;
        }
        dataset["val_fraction"] = c.dataset.val_fraction;
        doc["dataset"] = dataset;
    }
    return doc;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string());
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

void write_manifest(const std::filesystem::path& path, const RunConfig& config,
                    const RunResult& result) {
    ordered_json doc = config_to_json(config);
    doc["status"] = {{"diverged", result.diverged},
                     {"steps_completed", result.steps_completed},
                     {"final_loss", result.final_loss},
                     {"final_val_metric", result.final_val_metric}};
    write_text(path, doc.dump(2) + "\n");
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("config: cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path.string());
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        ordered_json doc;
        try {
            doc = ordered_json::parse(text);
        } catch (const std::exception& e) {
            throw ConfigError("config: JSON parse error in " + origin + ": " + e.what());
        }
        return config_from_json(doc, origin);
    }
    return config_from_ini(text);
}

void RunConfig::validate() const {
    auto fail = [](const std::string& message) { throw ConfigError("config: " + message); };

    const auto ids = optimizer_ids();
    auto known = [&](const std::string& id) {
        return std::find(ids.begin(), ids.end(), id) != ids.end();
    };
    if (!known(optimizer)) fail("unknown optimizer id '" + optimizer + "'");
    for (const auto& id : compare) {
        if (!known(id)) fail("unknown optimizer id '" + id + "' in compare list");
    }
    for (std::size_t i = 0; i < compare.size(); ++i) {
        for (std::size_t j = i + 1; j < compare.size(); ++j) {
            if (compare[i] == compare[j]) fail("duplicate optimizer in compare list");
        }
    }

    if (steps < 0 || epochs < 0) fail("steps and epochs must be >= 0");
    if (steps == 0 && epochs == 0) fail("one of steps or epochs must be > 0");
    if (batch_size == 0) fail("batch_size must be >= 1");
    if (log_every < 0) fail("log_every must be >= 0");
    if (epoch_steps < 1) fail("epoch_steps must be >= 1");
    if (out_dir.empty()) fail("out_dir must not be empty");

    try {
        hp.validate();
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }

    if (!(base_lr > 0.0) || !std::isfinite(base_lr)) fail("base_lr must be > 0");
    std::int64_t prev = std::numeric_limits<std::int64_t>::min();
    for (const auto& [epoch, mult] : milestones) {
        if (epoch <= prev) fail("milestones must be strictly increasing");
        if (!(mult > 0.0) || !std::isfinite(mult)) fail("milestone multipliers must be > 0");
        prev = epoch;
    }

    const auto& obj = objective;
    if (obj.kind == "quadratic") {
        if (obj.blocks.empty()) fail("quadratic objective needs at least one block");
        for (const auto& b : obj.blocks) {
            if (b.dim == 0) fail("quadratic block dim must be >= 1");
            if (!(b.condition >= 1.0) || !std::isfinite(b.condition)) {
                fail("quadratic block condition must be >= 1");
            }
        }
    } else if (obj.kind == "rosenbrock") {
        if (obj.rosenbrock_n < 2 || obj.rosenbrock_n % 2 != 0) {
            fail("rosenbrock n must be even and >= 2");
        }
    } else if (obj.kind == "mlp") {
        for (std::size_t h : obj.hidden) {
            if (h == 0) fail("mlp hidden sizes must be >= 1");
        }
        if (dataset.kind == "synthetic") {
            if (dataset.classes == 0 || dataset.per_class == 0 || dataset.dim == 0) {
                fail("synthetic dataset counts must be >= 1");
            }
            if (!(dataset.separation > 0.0) || !std::isfinite(dataset.separation)) {
                fail("synthetic dataset separation must be > 0");
            }
        } else if (dataset.kind == "idx") {
            if (dataset.images.empty() || dataset.labels.empty()) {
                fail("idx dataset needs images and labels paths");
            }
        } else {
            fail("unknown dataset kind '" + dataset.kind + "'");
        }
        if (!(dataset.val_fraction >= 0.0) || dataset.val_fraction >= 1.0) {
            fail("val_fraction must be in [0,1)");
        }
    } else {
        fail("unknown objective kind '" + obj.kind + "'");
    }
}

namespace {

struct RunSetup {
    std::unique_ptr<Objective> objective;
    const MlpObjective* mlp = nullptr;  // non-owning view when kind == mlp
    Dataset val;
    std::int64_t epoch_len = 1;
};

RunSetup build_objective(const RunConfig& config, Rng& data_rng) {
    RunSetup setup;
    if (config.objective.kind == "quadratic") {
        setup.objective = std::make_unique<QuadraticObjective>(
            quadratic_objective(config.objective.blocks, data_rng));
        setup.epoch_len = config.epoch_steps;
        return setup;
    }
    if (config.objective.kind == "rosenbrock") {
        setup.objective = std::make_unique<RosenbrockObjective>(config.objective.rosenbrock_n);
        setup.epoch_len = config.epoch_steps;
        return setup;
    }
    Dataset full = config.dataset.kind == "synthetic"
                       ? synth_gaussian_classes(config.dataset.per_class, config.dataset.classes,
                                                config.dataset.dim, config.dataset.separation,
                                                data_rng)
                       : load_idx(config.dataset.images, config.dataset.labels);
    auto [train, val] = split_train_val(full, config.dataset.val_fraction);
    setup.val = std::move(val);

    std::vector<std::size_t> sizes;
    sizes.push_back(train.cols);
    sizes.insert(sizes.end(), config.objective.hidden.begin(), config.objective.hidden.end());
    sizes.push_back(train.classes);
    auto mlp = std::make_unique<MlpObjective>(std::move(sizes), config.objective.activation,
                                              std::move(train));
    setup.mlp = mlp.get();
    setup.epoch_len = static_cast<std::int64_t>(
        (mlp->dataset()->rows + config.batch_size - 1) / config.batch_size);
    setup.objective = std::move(mlp);
    return setup;
}

}  // namespace

RunResult run(const RunConfig& config) {
    config.validate();

    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path out_dir(config.out_dir);

    Rng root(config.seed);
    Rng data_rng = root.split(1);
    Rng init_rng = root.split(2);
    Rng batch_rng = root.split(3);

    RunSetup setup = build_objective(config, data_rng);
    const Objective& objective = *setup.objective;

    auto opt = make_optimizer(config.optimizer, config.hp);
    LayeredParams params = objective.init_params(init_rng);
    OptimizerState state = opt->init_state(params);

    // epochs, when set, wins over the steps default
    const std::int64_t total_steps =
        config.epochs > 0 ? config.epochs * setup.epoch_len : config.steps;
    const std::int64_t log_every = config.log_every > 0 ? config.log_every : setup.epoch_len;

    Schedule schedule;
    schedule.base_lr = config.base_lr;
    for (const auto& [epoch, mult] : config.milestones) {
        // decay applies from the first step after `epoch` full epochs
        schedule.milestones.emplace_back(epoch * setup.epoch_len + 1, mult);
    }
    schedule.validate();

    RunResult result;
    result.out_dir = out_dir;
    std::vector<LoggedStep> series;

    const bool batched = setup.mlp != nullptr;
    const std::size_t n_rows = batched ? setup.mlp->dataset()->rows : 0;

    for (std::int64_t t = 1; t <= total_steps; ++t) {
        const double lr = lr_at(schedule, t);
        double loss;
        if (batched) {
            const auto rows = sample_batch(batch_rng, n_rows, config.batch_size);
            opt->step(params, objective.gradient_batch(params, rows), state, lr);
            loss = objective.eval_batch(params, rows);
        } else {
            opt->step(params, objective.gradient(params), state, lr);
            loss = objective.eval(params);
        }
        result.steps_completed = t;

        if (!std::isfinite(loss)) {
            result.diverged = true;
            result.exit_code = 3;
            result.final_loss = loss;
            result.final_val_metric = std::numeric_limits<double>::quiet_NaN();
            if (!series.empty()) {
                result.final_compactness = series.back().stats.compactness;
                export_csv(series, out_dir / "metrics.csv");
            } else {
                write_text(out_dir / "metrics.csv",
                           "step,layer,mean_stepsize,std_stepsize,loss,val_metric,lr\n");
            }
            write_manifest(out_dir / "manifest.json", config, result);
            std::cout << "optimizer=" << config.optimizer << " diverged at step " << t
                      << " loss=" << format_double(loss) << "\n";
            return result;
        }

        if (t % log_every == 0 || t == total_steps) {
            LoggedStep logged;
            logged.stats = stepsize_stats(state, config.hp, state.t, config.optimizer);
            logged.loss = batched ? objective.eval(params) : loss;
            logged.val_metric = (batched && setup.val.rows > 0)
                                    ? setup.mlp->accuracy(params, setup.val)
                                    : std::numeric_limits<double>::quiet_NaN();
            logged.lr = lr;
            series.push_back(std::move(logged));
        }
    }

    result.final_loss = series.back().loss;
    result.final_val_metric = series.back().val_metric;
    result.final_compactness = series.back().stats.compactness;
    export_csv(series, out_dir / "metrics.csv");
    write_manifest(out_dir / "manifest.json", config, result);

    std::cout << "optimizer=" << config.optimizer
              << " final_loss=" << format_double(result.final_loss)
              << " final_val_metric=" << format_double(result.final_val_metric) << "\n";
    return result;
}

RunResult compare(const RunConfig& config) {
    config.validate();
    if (config.compare.size() < 2) {
        throw ConfigError("config: compare needs at least two optimizer ids");
    }

    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path out_dir(config.out_dir);

    std::string summary = "optimizer,final_loss,final_val_metric,final_compactness\n";
    RunResult overall;
    overall.out_dir = out_dir;
    for (const auto& id : config.compare) {
        RunConfig member = config;
        member.optimizer = id;
        member.compare.clear();
        member.out_dir = (out_dir / id).string();
        const RunResult r = run(member);
        summary += id;
        summary += ',';
        summary += format_double(r.final_loss);
        summary += ',';
        summary += format_double(r.final_val_metric);
        summary += ',';
        summary += format_double(r.final_compactness);
        summary += '\n';
        overall.exit_code = std::max(overall.exit_code, r.exit_code);
        overall.diverged = overall.diverged || r.diverged;
    }
    write_text(out_dir / "summary.csv", summary);
    std::cout << summary;
    return overall;
}

}  // namespace aidaopt
