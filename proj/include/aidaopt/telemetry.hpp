#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "aidaopt/optim.hpp"

namespace aidaopt {

struct LayerStats {
    std::size_t layer = 0;
    double mean_stepsize = 0.0;  // layer mean of the elementwise adaptive stepsizes
    double std_stepsize = 0.0;   // population std over the layer
};

/// Per-layer stepsize statistics at one logged step, plus the global
/// compactness ratio (max layer mean / min layer mean) and spread (max std).
struct StepStats {
    std::int64_t step = 0;
    std::vector<LayerStats> layers;
    double compactness = 1.0;
    double spread = 0.0;
};

/// Elementwise adaptive stepsizes under each optimizer's own denominator
/// convention: adam/adamplus 1/(sqrt(v~)+eps), adabelief 1/(sqrt(s~)+eps),
/// adaml/adabeliefl/aida/aidagrad 1/sqrt(v~), the per-layer-scalar rules a
/// single 1/sqrt(q~) replicated (std 0), sgdm all ones.
StepStats stepsize_stats(const OptimizerState& state, const HyperParams& hp, std::int64_t t,
                         std::string_view optimizer_id);

struct LoggedStep {
    StepStats stats;
    double loss = 0.0;
    double val_metric = 0.0;  // NaN when the run has no validation metric
    double lr = 0.0;
};

/// CSV with header "step,layer,mean_stepsize,std_stepsize,loss,val_metric,lr",
/// one row per (step, layer); floats carry 17 significant digits.
void export_csv(std::span<const LoggedStep> series, const std::filesystem::path& path);

/// 17-significant-digit formatting shared by every exporter.
std::string format_double(double v);

}  // namespace aidaopt
