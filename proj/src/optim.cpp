#include "aidaopt/optim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace aidaopt {

void HyperParams::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(beta1) || beta1 < 0.0 || beta1 >= 1.0) {
        throw std::invalid_argument("HyperParams: beta1 must be in [0,1)");
    }
    if (!finite(beta2) || beta2 < 0.0 || beta2 >= 1.0) {
        throw std::invalid_argument("HyperParams: beta2 must be in [0,1)");
    }
    if (!finite(eps) || eps <= 0.0) {
        throw std::invalid_argument("HyperParams: eps must be > 0");
    }
    if (!finite(xi) || xi <= 0.0) {
        throw std::invalid_argument("HyperParams: xi must be > 0");
    }
    if (projections < 1) {
        throw std::invalid_argument("HyperParams: projection count must be >= 1");
    }
    if (!finite(weight_decay) || weight_decay < 0.0) {
        throw std::invalid_argument("HyperParams: weight_decay must be >= 0");
    }
    if (!finite(hb_alpha) || !finite(hb_beta) || !finite(hb_gamma)) {
        throw std::invalid_argument("HyperParams: non-finite heavy-ball scalar");
    }
}

void Schedule::validate() const {
    if (!std::isfinite(base_lr) || base_lr <= 0.0) {
        throw std::invalid_argument("Schedule: base_lr must be > 0");
    }
    std::int64_t prev = std::numeric_limits<std::int64_t>::min();
    for (const auto& [step, mult] : milestones) {
        if (step <= prev) {
            throw std::invalid_argument("Schedule: milestones must be strictly increasing");
        }
        if (!std::isfinite(mult) || mult <= 0.0) {
            throw std::invalid_argument("Schedule: multipliers must be > 0");
        }
        prev = step;
    }
}

double lr_at(const Schedule& schedule, std::int64_t t) {
    double lr = schedule.base_lr;
    for (const auto& [step, mult] : schedule.milestones) {
        if (step > t) {
            break;
        }
        lr *= mult;
    }
    return lr;
}

std::pair<std::vector<double>, std::vector<double>> project_pair(std::span<const double> m,
                                                                 std::span<const double> g,
                                                                 int k, double xi) {
    detail::require_same_length(m.size(), g.size(), "project_pair");
    if (k < 0) {
        throw std::invalid_argument("project_pair: negative projection count");
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!std::isfinite(m[i]) || !std::isfinite(g[i])) {
            throw std::invalid_argument("project_pair: non-finite input");
        }
    }
    std::vector<double> mp(m.begin(), m.end());
    std::vector<double> gp(g.begin(), g.end());
    std::vector<double> next_m(m.size());
    for (int round = 0; round < k; ++round) {
        // Both new vectors come from the same previous pair.
        const double inner = dot(mp, gp);
        const double cm = inner / (norm_sq(gp) + xi);
        const double cg = inner / (norm_sq(mp) + xi);
        for (std::size_t i = 0; i < mp.size(); ++i) {
            next_m[i] = cm * gp[i];
            gp[i] = cg * mp[i];
        }
        mp.swap(next_m);
    }
    return {std::move(mp), std::move(gp)};
}

Grad apply_coupled_decay(const Grad& grad, const LayeredParams& params, double weight_decay) {
    if (weight_decay < 0.0) {
        throw std::invalid_argument("apply_coupled_decay: negative weight decay");
    }
    Grad out = grad;
    if (weight_decay == 0.0) {
        return out;
    }
    auto g = out.flat();
    auto theta = params.flat();
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] += weight_decay * theta[i];
    }
    return out;
}

void apply_decoupled_decay(LayeredParams& params, double lr, double weight_decay) {
    if (weight_decay < 0.0) {
        throw std::invalid_argument("apply_decoupled_decay: negative weight decay");
    }
    if (weight_decay == 0.0) {
        return;
    }
    for (double& v : params.flat()) {
        v -= lr * weight_decay * v;
    }
}

Optimizer::Optimizer(HyperParams hp) : hp_(hp) { hp_.validate(); }

void Optimizer::step(LayeredParams& params, const Grad& grad, OptimizerState& state,
                     double lr) const {
    if (!params.same_shape(grad) || !params.same_shape(state.m)) {
        throw std::invalid_argument("Optimizer::step: shape mismatch");
    }
    if (!grad.all_finite()) {
        throw std::invalid_argument("Optimizer::step: non-finite gradient");
    }
    if (state.t == std::numeric_limits<std::int64_t>::max()) {
        throw std::overflow_error("Optimizer::step: step counter overflow");
    }
    state.t += 1;
    if (hp_.decay_mode == DecayMode::coupled && hp_.weight_decay > 0.0) {
        update(params, apply_coupled_decay(grad, params, hp_.weight_decay), state, lr);
    } else {
        update(params, grad, state, lr);
    }
    if (hp_.decay_mode == DecayMode::decoupled) {
        apply_decoupled_decay(params, lr, hp_.weight_decay);
    }
}

namespace {

void update_first_moment(LayeredVector& m, const Grad& grad, double beta1) {
    auto mv = m.flat();
    auto gv = grad.flat();
    for (std::size_t i = 0; i < mv.size(); ++i) {
        mv[i] = beta1 * mv[i] + (1.0 - beta1) * gv[i];
    }
}

ElementwiseMoment& elementwise_moment(OptimizerState& state) {
    auto* em = std::get_if<ElementwiseMoment>(&state.second);
    if (em == nullptr) {
        throw std::invalid_argument("Optimizer::step: state has no elementwise second moment");
    }
    return *em;
}

PerLayerMoment& per_layer_moment(OptimizerState& state, std::size_t layer_count) {
    auto* pm = std::get_if<PerLayerMoment>(&state.second);
    if (pm == nullptr || pm->q.size() != layer_count) {
        throw std::invalid_argument("Optimizer::step: state has no per-layer second moment");
    }
    return *pm;
}

class SgdMomentum final : public Optimizer {
public:
    using Optimizer::Optimizer;

    std::string_view id() const override { return "sgdm"; }

    OptimizerState init_state(const LayeredParams& params) const override {
        return {0, LayeredVector::zeros_like(params), std::monostate{}};
    }

protected:
    void update(LayeredParams& params, const Grad& grad, OptimizerState& state,
                double lr) const override {
        auto m = state.m.flat();
        auto g = grad.flat();
        auto theta = params.flat();
        for (std::size_t i = 0; i < m.size(); ++i) {
            m[i] = hp_.hb_beta * m[i] + hp_.hb_alpha * g[i];
            theta[i] -= lr * hp_.hb_gamma * m[i];
        }
    }
};

class Adam final : public Optimizer {
public:
    using Optimizer::Optimizer;

    std::string_view id() const override { return "adam"; }

    OptimizerState init_state(const LayeredParams& params) const override {
        return {0, LayeredVector::zeros_like(params),
                ElementwiseMoment{LayeredVector::zeros_like(params)}};
    }

protected:
    void update(LayeredParams& params, const Grad& grad, OptimizerState& state,
                double lr) const override {
        auto& moment = elementwise_moment(state);
        const double bc1 = 1.0 - std::pow(hp_.beta1, static_cast<double>(state.t));
        const double bc2 = 1.0 - std::pow(hp_.beta2, static_cast<double>(state.t));
        auto m = state.m.flat();
        auto v = moment.v.flat();
        auto g = grad.flat();
        auto theta = params.flat();
        for (std::size_t i = 0; i < m.size(); ++i) {
            m[i] = hp_.beta1 * m[i] + (1.0 - hp_.beta1) * g[i];
            v[i] = hp_.beta2 * v[i] + (1.0 - hp_.beta2) * g[i] * g[i];
            theta[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + hp_.eps);
        }
    }
};

// AdaBelief with the squared gradient as increment: eps inside the EMA and
// a trailing eps after the bias-corrected square root.
class AdamPlus final : public Optimizer {
public:
    using Optimizer::Optimizer;

    std::string_view id() const override { return "adamplus"; }

    OptimizerState init_state(const LayeredParams& params) const override {
        return {0, LayeredVector::zeros_like(params),
                ElementwiseMoment{LayeredVector::zeros_like(params)}};
    }

protected:
    void update(LayeredParams& params, const Grad& grad, OptimizerState& state,
                double lr) const override {
        auto& moment = elementwise_moment(state);
        const double bc1 = 1.0 - std::pow(hp_.beta1, static_cast<double>(state.t));
        const double bc2 = 1.0 - std::pow(hp_.beta2, static_cast<double>(state.t));
        auto m = state.m.flat();
        auto v = moment.v.flat();
        auto g = grad.flat();
        auto theta = params.flat();
        for (std::size_t i = 0; i < m.size(); ++i) {
            m[i] = hp_.beta1 * m[i] + (1.0 - hp_.beta1) * g[i];
            v[i] = hp_.beta2 * v[i] + (1.0 - hp_.beta2) * g[i] * g[i] + hp_.eps;
            theta[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + hp_.eps);
        }
    }
};

class AdaBelief final : public Optimizer {
public:
    using Optimizer::Optimizer;

    std::string_view id() const override { return "adabelief"; }

    OptimizerState init_state(const LayeredParams& params) const override {
        return {0, LayeredVector::zeros_like(params),
                ElementwiseMoment{LayeredVector::zeros_like(params)}};
    }

protected:
    void update(LayeredParams& params, const Grad& grad, OptimizerState& state,
                double lr) const override {
        auto& moment = elementwise_moment(state);
        const double bc1 = 1.0 - std::pow(hp_.beta1, static_cast<double>(state.t));
        const double bc2 = 1.0 - std::pow(hp_.beta2, static_cast<double>(state.t));
        auto m = state.m.flat();
        auto s = moment.v.flat();
        auto g = grad.flat();
        auto theta = params.flat();
        for (std::size_t i = 0; i < m.size(); ++i) {
            m[i] = hp_.beta1 * m[i] + (1.0 - hp_.beta1) * g[i];
            const double diff = m[i] - g[i];
            s[i] = hp_.beta2 * s[i] + (1.0 - hp_.beta2) * diff * diff + hp_.eps;
            theta[i] -= lr * (m[i] / bc1) / (std::sqrt(s[i] / bc2) + hp_.eps);
        }
    }
};

// Post-processed layerwise stepsizes: the layer mean of the elementwise
// stepsizes replaces them. No trailing eps; the eps inside the EMA already
// keeps the second moment positive.
class AdamL : public Optimizer {
public:
    using Optimizer::Optimizer;

    std::string_view id() const override { return "adaml"; }

    OptimizerState init_state(const LayeredParams& params) const override {
        return {0, LayeredVector::zeros_like(params),
                ElementwiseMoment{LayeredVector::zeros_like(params)}};
    }

protected:
    virtual double increment(double /*m*/, double g) const { return g * g; }

    void update(LayeredParams& params, const Grad& grad, OptimizerState& state,
                double lr) const override {
        auto& moment = elementwise_moment(state);
        const double bc1 = 1.0 - std::pow(hp_.beta1, static_cast<double>(state.t));
        const double bc2 = 1.0 - std::pow(hp_.beta2, static_cast<double>(state.t));
        update_first_moment(state.m, grad, hp_.beta1);
        for (std::size_t l = 0; l < params.layer_count(); ++l) {
            auto m = state.m.layer(l);
            auto v = moment.v.layer(l);
            auto g = grad.layer(l);
            auto theta = params.layer(l);
            double mean_stepsize = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                v[i] = hp_.beta2 * v[i] + (1.0 - hp_.beta2) * increment(m[i], g[i]) + hp_.eps;
                mean_stepsize += 1.0 / std::sqrt(v[i] / bc2);
            }
            mean_stepsize /= static_cast<double>(v.size());
            for (std::size_t i = 0; i < theta.size(); ++i) {
                theta[i] -= lr * mean_stepsize * (m[i] / bc1);
            }
        }
    }
};

class AdaBeliefL final : public AdamL {
public:
    using AdamL::AdamL;

    std::string_view id() const override { return "adabeliefl"; }

protected:
    double increment(double m, double g) const override { return (m - g) * (m - g); }
};

// Pre-processed layerwise stepsizes: one scalar EMA of the layer-mean
// squared increment per layer.
class LAdam : public Optimizer {
public:
    using Optimizer::Optimizer;

    std::string_view id() const override { return "ladam"; }

    OptimizerState init_state(const LayeredParams& params) const override {
        return {0, LayeredVector::zeros_like(params),
                PerLayerMoment{std::vector<double>(params.layer_count(), 0.0)}};
    }

protected:
    virtual double increment(double /*m*/, double g) const { return g * g; }

    void update(LayeredParams& params, const Grad& grad, OptimizerState& state,
                double lr) const override {
        auto& moment = per_layer_moment(state, params.layer_count());
        const double bc1 = 1.0 - std::pow(hp_.beta1, static_cast<double>(state.t));
        const double bc2 = 1.0 - std::pow(hp_.beta2, static_cast<double>(state.t));
        update_first_moment(state.m, grad, hp_.beta1);
        for (std::size_t l = 0; l < params.layer_count(); ++l) {
            auto m = state.m.layer(l);
            auto g = grad.layer(l);
            auto theta = params.layer(l);
            double mean_inc = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                mean_inc += increment(m[i], g[i]);
            }
            mean_inc /= static_cast<double>(g.size());
            double& q = moment.q[l];
            q = hp_.beta2 * q + (1.0 - hp_.beta2) * mean_inc + hp_.eps;
            const double stepsize = 1.0 / std::sqrt(q / bc2);
            for (std::size_t i = 0; i < theta.size(); ++i) {
                theta[i] -= lr * stepsize * (m[i] / bc1);
            }
        }
    }
};

class LAdaBelief final : public LAdam {
public:
    using LAdam::LAdam;

    std::string_view id() const override { return "ladabelief"; }

protected:
    double increment(double m, double g) const override { return (m - g) * (m - g); }
};

// Tracks the EMA of the squared difference of the K-fold mutually
// projected (m, g) pair per layer.
class Aida final : public Optimizer {
public:
    using Optimizer::Optimizer;

    std::string_view id() const override { return "aida"; }

    OptimizerState init_state(const LayeredParams& params) const override {
        return {0, LayeredVector::zeros_like(params),
                ElementwiseMoment{LayeredVector::zeros_like(params)}};
    }

protected:
    void update(LayeredParams& params, const Grad& grad, OptimizerState& state,
                double lr) const override {
        auto& moment = elementwise_moment(state);
        const double bc1 = 1.0 - std::pow(hp_.beta1, static_cast<double>(state.t));
        const double bc2 = 1.0 - std::pow(hp_.beta2, static_cast<double>(state.t));
        update_first_moment(state.m, grad, hp_.beta1);
        for (std::size_t l = 0; l < params.layer_count(); ++l) {
            auto m = state.m.layer(l);
            auto v = moment.v.layer(l);
            auto theta = params.layer(l);
            auto [mp, gp] = project_pair(m, grad.layer(l), hp_.projections, hp_.xi);
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double diff = mp[i] - gp[i];
                v[i] = hp_.beta2 * v[i] + (1.0 - hp_.beta2) * diff * diff + hp_.eps;
                theta[i] -= lr * (m[i] / bc1) / std::sqrt(v[i] / bc2);
            }
        }
    }
};

// Single projection of g onto the line of m; the EMA tracks the squared
// projected gradient.
class AidaGrad final : public Optimizer {
public:
    using Optimizer::Optimizer;

    std::string_view id() const override { return "aidagrad"; }

    OptimizerState init_state(const LayeredParams& params) const override {
        return {0, LayeredVector::zeros_like(params),
                ElementwiseMoment{LayeredVector::zeros_like(params)}};
    }

protected:
    void update(LayeredParams& params, const Grad& grad, OptimizerState& state,
                double lr) const override {
        auto& moment = elementwise_moment(state);
        const double bc1 = 1.0 - std::pow(hp_.beta1, static_cast<double>(state.t));
        const double bc2 = 1.0 - std::pow(hp_.beta2, static_cast<double>(state.t));
        update_first_moment(state.m, grad, hp_.beta1);
        for (std::size_t l = 0; l < params.layer_count(); ++l) {
            auto m = state.m.layer(l);
            auto v = moment.v.layer(l);
            auto g = grad.layer(l);
            auto theta = params.layer(l);
            const double coef = dot(m, g) / (norm_sq(m) + hp_.xi);
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double gp = coef * m[i];
                v[i] = hp_.beta2 * v[i] + (1.0 - hp_.beta2) * gp * gp + hp_.eps;
                theta[i] -= lr * (m[i] / bc1) / std::sqrt(v[i] / bc2);
            }
        }
    }
};

// Aida with pre-processed layerwise stepsizes: per-layer scalar EMA of the
// mean squared projected difference.
class LAida final : public Optimizer {
public:
    using Optimizer::Optimizer;

    std::string_view id() const override { return "laida"; }

    OptimizerState init_state(const LayeredParams& params) const override {
        return {0, LayeredVector::zeros_like(params),
                PerLayerMoment{std::vector<double>(params.layer_count(), 0.0)}};
    }

protected:
    void update(LayeredParams& params, const Grad& grad, OptimizerState& state,
                double lr) const override {
        auto& moment = per_layer_moment(state, params.layer_count());
        const double bc1 = 1.0 - std::pow(hp_.beta1, static_cast<double>(state.t));
        const double bc2 = 1.0 - std::pow(hp_.beta2, static_cast<double>(state.t));
        update_first_moment(state.m, grad, hp_.beta1);
        for (std::size_t l = 0; l < params.layer_count(); ++l) {
            auto m = state.m.layer(l);
            auto theta = params.layer(l);
            auto [mp, gp] = project_pair(m, grad.layer(l), hp_.projections, hp_.xi);
            double mean_inc = 0.0;
            for (std::size_t i = 0; i < mp.size(); ++i) {
                const double diff = mp[i] - gp[i];
                mean_inc += diff * diff;
            }
            mean_inc /= static_cast<double>(mp.size());
            double& q = moment.q[l];
            q = hp_.beta2 * q + (1.0 - hp_.beta2) * mean_inc + hp_.eps;
            const double stepsize = 1.0 / std::sqrt(q / bc2);
            for (std::size_t i = 0; i < theta.size(); ++i) {
                theta[i] -= lr * stepsize * (m[i] / bc1);
            }
        }
    }
};

constexpr std::string_view kOptimizerIds[] = {
    "sgdm",  "adam",       "adamplus", "adabelief", "adaml", "adabeliefl",
    "ladam", "ladabelief", "aida",     "aidagrad",  "laida",
};

}  // namespace

std::span<const std::string_view> optimizer_ids() { return kOptimizerIds; }

std::unique_ptr<Optimizer> make_optimizer(std::string_view id, const HyperParams& hp) {
    if (id == "sgdm") return std::make_unique<SgdMomentum>(hp);
    if (id == "adam") return std::make_unique<Adam>(hp);
    if (id == "adamplus") return std::make_unique<AdamPlus>(hp);
    if (id == "adabelief") return std::make_unique<AdaBelief>(hp);
    if (id == "adaml") return std::make_unique<AdamL>(hp);
    if (id == "adabeliefl") return std::make_unique<AdaBeliefL>(hp);
    if (id == "ladam") return std::make_unique<LAdam>(hp);
    if (id == "ladabelief") return std::make_unique<LAdaBelief>(hp);
    if (id == "aida") return std::make_unique<Aida>(hp);
    if (id == "aidagrad") return std::make_unique<AidaGrad>(hp);
    if (id == "laida") return std::make_unique<LAida>(hp);
    throw std::invalid_argument("make_optimizer: unknown optimizer id '" + std::string(id) + "'");
}

}  // namespace aidaopt
