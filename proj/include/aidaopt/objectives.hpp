#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aidaopt/core.hpp"
#include "aidaopt/data.hpp"

namespace aidaopt {

/// A differentiable objective over a layered parameter vector. eval/gradient
/// are reentrant; objectives are immutable after construction.
class Objective {
public:
    virtual ~Objective() = default;

    virtual const std::string& name() const = 0;
    virtual const std::vector<std::size_t>& shape() const = 0;

    /// Full objective value (over the whole bound dataset, if any).
    virtual double eval(const LayeredParams& params) const = 0;
    virtual Grad gradient(const LayeredParams& params) const = 0;

    /// Mini-batch variants; dataset-free objectives ignore the rows.
    virtual double eval_batch(const LayeredParams& params,
                              std::span<const std::size_t> rows) const;
    virtual Grad gradient_batch(const LayeredParams& params,
                                std::span<const std::size_t> rows) const;

    virtual const Dataset* dataset() const { return nullptr; }

    /// Deterministic starting point appropriate for this objective.
    virtual LayeredParams init_params(Rng& rng) const;
};

/// f(theta) = 1/2 sum_l theta_l^T A_l theta_l with diagonal positive
/// definite A_l. Unique minimum at zero.
class QuadraticObjective final : public Objective {
public:
    explicit QuadraticObjective(std::vector<std::vector<double>> diagonal_blocks);
    QuadraticObjective(std::initializer_list<std::vector<double>> diagonal_blocks)
        : QuadraticObjective(std::vector<std::vector<double>>(diagonal_blocks)) {}

    const std::string& name() const override { return name_; }
    const std::vector<std::size_t>& shape() const override { return shape_; }
    double eval(const LayeredParams& params) const override;
    Grad gradient(const LayeredParams& params) const override;
    LayeredParams init_params(Rng& rng) const override;

    const std::vector<std::vector<double>>& diagonals() const { return diag_; }

private:
    std::string name_ = "quadratic";
    std::vector<std::vector<double>> diag_;
    std::vector<std::size_t> shape_;
};

struct QuadraticBlock {
    std::size_t dim = 1;
    double condition = 1.0;  // ratio of largest to smallest eigenvalue
};

/// Blocks get eigenvalues log-spaced in [1, condition], assigned in
/// rng-shuffled coordinate order.
QuadraticObjective quadratic_objective(const std::vector<QuadraticBlock>& blocks, Rng& rng);

/// Chained Rosenbrock over independent coordinate pairs; single layer,
/// minimum 0 at all-ones. n must be even.
class RosenbrockObjective final : public Objective {
public:
    explicit RosenbrockObjective(std::size_t n);

    const std::string& name() const override { return name_; }
    const std::vector<std::size_t>& shape() const override { return shape_; }
    double eval(const LayeredParams& params) const override;
    Grad gradient(const LayeredParams& params) const override;
    LayeredParams init_params(Rng& rng) const override;

private:
    std::string name_ = "rosenbrock";
    std::vector<std::size_t> shape_;
};

enum class Activation { relu, tanh };

/// Multilayer perceptron with softmax cross-entropy over a bound dataset.
/// One parameter group per weight matrix and per bias vector.
class MlpObjective final : public Objective {
public:
    MlpObjective(std::vector<std::size_t> layer_sizes, Activation activation, Dataset data);

    const std::string& name() const override { return name_; }
    const std::vector<std::size_t>& shape() const override { return shape_; }
    double eval(const LayeredParams& params) const override;
    Grad gradient(const LayeredParams& params) const override;
    double eval_batch(const LayeredParams& params,
                      std::span<const std::size_t> rows) const override;
    Grad gradient_batch(const LayeredParams& params,
                        std::span<const std::size_t> rows) const override;
    const Dataset* dataset() const override { return &data_; }
    LayeredParams init_params(Rng& rng) const override;

    /// Fraction of rows whose argmax logit matches the label.
    double accuracy(const LayeredParams& params, const Dataset& data) const;

    const std::vector<std::size_t>& layer_sizes() const { return sizes_; }

private:
    double loss_and_grad(const LayeredParams& params, std::span<const std::size_t> rows,
                         Grad* grad_out) const;

    std::string name_ = "mlp";
    std::vector<std::size_t> sizes_;
    Activation activation_;
    Dataset data_;
    std::vector<std::size_t> shape_;
    std::vector<std::size_t> all_rows_;
};

/// Central finite differences of obj.eval, one coordinate at a time.
Grad finite_diff_grad(const Objective& obj, const LayeredParams& params, double h);

/// Batch indices sampled uniformly with replacement.
std::vector<std::size_t> sample_batch(Rng& rng, std::size_t n_rows, std::size_t batch_size);

}  // namespace aidaopt
