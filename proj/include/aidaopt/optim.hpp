#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "aidaopt/core.hpp"

namespace aidaopt {

enum class DecayMode { coupled, decoupled };

/// Shared knobs for all update rules. Defaults follow the common image
/// classification setting (beta1 0.9, beta2 0.999, eps 1e-8, xi 1e-20, K 2).
struct HyperParams {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double xi = 1e-20;
    int projections = 2;  // K, mutual projection count
    double weight_decay = 0.0;
    DecayMode decay_mode = DecayMode::coupled;
    // Heavy-ball scalars: m <- hb_beta*m + hb_alpha*g, theta -= lr*hb_gamma*m.
    double hb_alpha = 1.0;
    double hb_beta = 0.9;
    double hb_gamma = 1.0;

    void validate() const;  // throws std::invalid_argument
};

/// Piecewise-constant learning-rate schedule: lr(t) is base_lr times the
/// product of multipliers whose milestone step is <= t.
struct Schedule {
    double base_lr = 0.001;
    std::vector<std::pair<std::int64_t, double>> milestones;  // (step, multiplier)

    void validate() const;
};

double lr_at(const Schedule& schedule, std::int64_t t);

struct ElementwiseMoment {
    LayeredVector v;  // one entry per parameter
};

struct PerLayerMoment {
    std::vector<double> q;  // one scalar per layer
};

using SecondMoment = std::variant<std::monostate, ElementwiseMoment, PerLayerMoment>;

/// Moment buffers plus step counter. Raw EMAs are stored; bias correction
/// factors are applied at read time so telemetry can see both.
struct OptimizerState {
    std::int64_t t = 0;
    LayeredVector m;
    SecondMoment second;
};

/// K rounds of mutual vector projection. Each round maps the pair
/// (m, g) to (proj of m onto g's line, proj of g onto m's line), both
/// computed from the same previous pair. K = 0 returns the inputs.
std::pair<std::vector<double>, std::vector<double>> project_pair(std::span<const double> m,
                                                                 std::span<const double> g,
                                                                 int k, double xi);

/// Coupled decay: returns g + wd*theta (a no-op copy when wd == 0).
Grad apply_coupled_decay(const Grad& grad, const LayeredParams& params, double weight_decay);

/// Decoupled decay: theta -= lr*wd*theta, applied after the step.
void apply_decoupled_decay(LayeredParams& params, double lr, double weight_decay);

class Optimizer {
public:
    explicit Optimizer(HyperParams hp);
    virtual ~Optimizer() = default;

    virtual std::string_view id() const = 0;
    virtual OptimizerState init_state(const LayeredParams& params) const = 0;

    /// One update: validates shapes and gradient finiteness, applies weight
    /// decay per hp.decay_mode, advances t, runs the rule.
    void step(LayeredParams& params, const Grad& grad, OptimizerState& state, double lr) const;

    const HyperParams& hyper() const { return hp_; }

protected:
    virtual void update(LayeredParams& params, const Grad& grad, OptimizerState& state,
                        double lr) const = 0;

    HyperParams hp_;
};

/// The recognized optimizer identity strings.
std::span<const std::string_view> optimizer_ids();

/// Factory keyed by identity string; throws std::invalid_argument on an
/// unknown id or invalid hyperparameters.
std::unique_ptr<Optimizer> make_optimizer(std::string_view id, const HyperParams& hp);

}  // namespace aidaopt
