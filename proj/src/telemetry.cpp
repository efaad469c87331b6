#include "aidaopt/telemetry.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace aidaopt {

namespace {

enum class StepsizeKind {
    ones,                // sgdm
    corrected_plus_eps,  // adam, adamplus, adabelief
    corrected,           // adaml, adabeliefl, aida, aidagrad
    per_layer,           // ladam, ladabelief, laida
};

StepsizeKind kind_for(std::string_view id) {
    if (id == "sgdm") return StepsizeKind::ones;
    if (id == "adam" || id == "adamplus" || id == "adabelief") {
        return StepsizeKind::corrected_plus_eps;
    }
    if (id == "adaml" || id == "adabeliefl" || id == "aida" || id == "aidagrad") {
        return StepsizeKind::corrected;
    }
    if (id == "ladam" || id == "ladabelief" || id == "laida") {
        return StepsizeKind::per_layer;
    }
    throw std::invalid_argument("stepsize_stats: unknown optimizer id '" + std::string(id) + "'");
}

}  // namespace

StepStats stepsize_stats(const OptimizerState& state, const HyperParams& hp, std::int64_t t,
                         std::string_view optimizer_id) {
    if (t < 1) {
        throw std::invalid_argument("stepsize_stats: t must be >= 1");
    }
    const StepsizeKind kind = kind_for(optimizer_id);
    const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(t));
    const std::size_t layer_count = state.m.layer_count();

    StepStats stats;
    stats.step = t;
    stats.layers.reserve(layer_count);

    for (std::size_t l = 0; l < layer_count; ++l) {
        const std::size_t d = state.m.layer_dim(l);
        double mean = 0.0;
        double sq_mean = 0.0;
        switch (kind) {
            case StepsizeKind::ones: {
                mean = 1.0;
                sq_mean = 1.0;
                break;
            }
            case StepsizeKind::corrected_plus_eps:
            case StepsizeKind::corrected: {
                const auto* em = std::get_if<ElementwiseMoment>(&state.second);
                if (em == nullptr) {
                    throw std::invalid_argument("stepsize_stats: state/optimizer mismatch");
                }
                for (double v : em->v.layer(l)) {
                    double s = std::sqrt(v / bc2);
                    if (kind == StepsizeKind::corrected_plus_eps) s += hp.eps;
                    const double stepsize = 1.0 / s;
                    mean += stepsize;
                    sq_mean += stepsize * stepsize;
                }
                mean /= static_cast<double>(d);
                sq_mean /= static_cast<double>(d);
                break;
            }
            case StepsizeKind::per_layer: {
                const auto* pm = std::get_if<PerLayerMoment>(&state.second);
                if (pm == nullptr || pm->q.size() != layer_count) {
                    throw std::invalid_argument("stepsize_stats: state/optimizer mismatch");
                }
                const double stepsize = 1.0 / std::sqrt(pm->q[l] / bc2);
                mean = stepsize;
                sq_mean = stepsize * stepsize;
                break;
            }
        }
        const double variance = std::max(0.0, sq_mean - mean * mean);
        stats.layers.push_back({l, mean, std::sqrt(variance)});
    }

    double min_mean = stats.layers.front().mean_stepsize;
    double max_mean = min_mean;
    double max_std = stats.layers.front().std_stepsize;
    for (const auto& ls : stats.layers) {
        min_mean = std::min(min_mean, ls.mean_stepsize);
        max_mean = std::max(max_mean, ls.mean_stepsize);
        max_std = std::max(max_std, ls.std_stepsize);
    }
    stats.compactness = max_mean / min_mean;
    stats.spread = max_std;
    return stats;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void export_csv(std::span<const LoggedStep> series, const std::filesystem::path& path) {
    if (series.empty()) {
        throw std::invalid_argument("export_csv: empty series");
    }
    std::string body = "step,layer,mean_stepsize,std_stepsize,loss,val_metric,lr\n";
    for (const auto& row : series) {
        for (const auto& ls : row.stats.layers) {
            body += std::to_string(row.stats.step);
            body += ',';
            body += std::to_string(ls.layer);
            body += ',';
            body += format_double(ls.mean_stepsize);
            body += ',';
            body += format_double(ls.std_stepsize);
            body += ',';
            body += format_double(row.loss);
            body += ',';
            body += format_double(row.val_metric);
            body += ',';
            body += format_double(row.lr);
            body += '\n';
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("export_csv: cannot open " + path.string());
    }
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) {
        throw std::runtime_error("export_csv: write failed for " + path.string());
    }
}

}  // namespace aidaopt
