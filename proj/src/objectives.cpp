#include "aidaopt/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aidaopt {

double Objective::eval_batch(const LayeredParams& params,
                             std::span<const std::size_t> /*rows*/) const {
    return eval(params);
}

Grad Objective::gradient_batch(const LayeredParams& params,
                               std::span<const std::size_t> /*rows*/) const {
    return gradient(params);
}

LayeredParams Objective::init_params(Rng& rng) const {
    return make_params(shape(), InitSpec::Uniform(-1.0, 1.0), rng);
}

QuadraticObjective::QuadraticObjective(std::vector<std::vector<double>> diagonal_blocks)
    : diag_(std::move(diagonal_blocks)) {
    if (diag_.empty()) {
        throw std::invalid_argument("QuadraticObjective: need at least one block");
    }
    for (const auto& block : diag_) {
        if (block.empty()) {
            throw std::invalid_argument("QuadraticObjective: empty block");
        }
        for (double a : block) {
            if (!std::isfinite(a) || a <= 0.0) {
                throw std::invalid_argument("QuadraticObjective: diagonal must be positive");
            }
        }
        shape_.push_back(block.size());
    }
}

double QuadraticObjective::eval(const LayeredParams& params) const {
    double f = 0.0;
    for (std::size_t l = 0; l < diag_.size(); ++l) {
        auto theta = params.layer(l);
        detail::require_same_length(theta.size(), diag_[l].size(), "QuadraticObjective");
        for (std::size_t i = 0; i < theta.size(); ++i) {
            f += 0.5 * diag_[l][i] * theta[i] * theta[i];
        }
    }
    return f;
}

Grad QuadraticObjective::gradient(const LayeredParams& params) const {
    Grad g = Grad::zeros_like(params);
    for (std::size_t l = 0; l < diag_.size(); ++l) {
        auto theta = params.layer(l);
        auto gl = g.layer(l);
        for (std::size_t i = 0; i < theta.size(); ++i) {
            gl[i] = diag_[l][i] * theta[i];
        }
    }
    return g;
}

LayeredParams QuadraticObjective::init_params(Rng& rng) const {
    return make_params(shape_, InitSpec::Uniform(-1.0, 1.0), rng);
}

QuadraticObjective quadratic_objective(const std::vector<QuadraticBlock>& blocks, Rng& rng) {
    if (blocks.empty()) {
        throw std::invalid_argument("quadratic_objective: need at least one block");
    }
    std::vector<std::vector<double>> diag;
    diag.reserve(blocks.size());
    for (const auto& block : blocks) {
        if (block.dim == 0) {
            throw std::invalid_argument("quadratic_objective: block dim must be >= 1");
        }
        if (!std::isfinite(block.condition) || block.condition < 1.0) {
            throw std::invalid_argument("quadratic_objective: condition must be >= 1");
        }
        std::vector<double> eig(block.dim);
        if (block.dim == 1) {
            eig[0] = block.condition;
        } else {
            for (std::size_t i = 0; i < block.dim; ++i) {
                eig[i] = std::pow(block.condition,
                                  static_cast<double>(i) / static_cast<double>(block.dim - 1));
            }
        }
        for (std::size_t i = eig.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(
                (static_cast<unsigned __int128>(rng.next_u64()) * i) >> 64);
            std::swap(eig[i - 1], eig[j]);
        }
        diag.push_back(std::move(eig));
    }
    return QuadraticObjective(std::move(diag));
}

RosenbrockObjective::RosenbrockObjective(std::size_t n) : shape_{n} {
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument("RosenbrockObjective: n must be even and >= 2");
    }
}

double RosenbrockObjective::eval(const LayeredParams& params) const {
    auto theta = params.layer(0);
    detail::require_same_length(theta.size(), shape_[0], "RosenbrockObjective");
    double f = 0.0;
    for (std::size_t i = 0; i + 1 < theta.size(); i += 2) {
        const double x = theta[i];
        const double y = theta[i + 1];
        const double r = y - x * x;
        f += 100.0 * r * r + (1.0 - x) * (1.0 - x);
    }
    return f;
}

Grad RosenbrockObjective::gradient(const LayeredParams& params) const {
    auto theta = params.layer(0);
    Grad g = Grad::zeros_like(params);
    auto gl = g.layer(0);
    for (std::size_t i = 0; i + 1 < theta.size(); i += 2) {
        const double x = theta[i];
        const double y = theta[i + 1];
        const double r = y - x * x;
        gl[i] = -400.0 * x * r - 2.0 * (1.0 - x);
        gl[i + 1] = 200.0 * r;
    }
    return g;
}

LayeredParams RosenbrockObjective::init_params(Rng& rng) const {
    return make_params(shape_, InitSpec::Uniform(-1.0, 1.0), rng);
}

MlpObjective::MlpObjective(std::vector<std::size_t> layer_sizes, Activation activation,
                           Dataset data)
    : sizes_(std::move(layer_sizes)), activation_(activation), data_(std::move(data)) {
    if (sizes_.size() < 2) {
        throw std::invalid_argument("MlpObjective: need at least two layer sizes");
    }
    for (std::size_t s : sizes_) {
        if (s == 0) {
            throw std::invalid_argument("MlpObjective: zero layer size");
        }
    }
    data_.validate();
    if (data_.cols != sizes_.front()) {
        throw std::invalid_argument("MlpObjective: input size does not match dataset");
    }
    if (data_.classes != sizes_.back()) {
        throw std::invalid_argument("MlpObjective: output size does not match class count");
    }
    for (std::size_t j = 0; j + 1 < sizes_.size(); ++j) {
        shape_.push_back(sizes_[j] * sizes_[j + 1]);  // weight matrix, row-major
        shape_.push_back(sizes_[j + 1]);              // bias vector
    }
    all_rows_.resize(data_.rows);
    for (std::size_t i = 0; i < all_rows_.size(); ++i) all_rows_[i] = i;
}

double MlpObjective::eval(const LayeredParams& params) const {
    return loss_and_grad(params, all_rows_, nullptr);
}

Grad MlpObjective::gradient(const LayeredParams& params) const {
    Grad g = Grad::zeros_like(params);
    loss_and_grad(params, all_rows_, &g);
    return g;
}

double MlpObjective::eval_batch(const LayeredParams& params,
                                std::span<const std::size_t> rows) const {
    return loss_and_grad(params, rows, nullptr);
}

Grad MlpObjective::gradient_batch(const LayeredParams& params,
                                  std::span<const std::size_t> rows) const {
    Grad g = Grad::zeros_like(params);
    loss_and_grad(params, rows, &g);
    return g;
}

double MlpObjective::loss_and_grad(const LayeredParams& params,
                                   std::span<const std::size_t> rows, Grad* grad_out) const {
    if (rows.empty()) {
        throw std::invalid_argument("MlpObjective: empty batch");
    }
    if (params.shape() != shape_) {
        throw std::invalid_argument("MlpObjective: parameter shape mismatch");
    }
    const std::size_t n = rows.size();
    const std::size_t n_linear = sizes_.size() - 1;

    // activations[0] holds the input batch, activations[j+1] = act(Z_j)
    // (the last entry keeps the raw logits).
    std::vector<std::vector<double>> activations(n_linear + 1);
    activations[0].resize(n * sizes_[0]);
    for (std::size_t r = 0; r < n; ++r) {
        auto row = data_.row(rows[r]);
        std::copy(row.begin(), row.end(), activations[0].begin() + r * sizes_[0]);
    }

    for (std::size_t j = 0; j < n_linear; ++j) {
        const std::size_t in = sizes_[j];
        const std::size_t out = sizes_[j + 1];
        auto w = params.layer(2 * j);
        auto b = params.layer(2 * j + 1);
        const auto& a = activations[j];
        auto& z = activations[j + 1];
        z.assign(n * out, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            const double* arow = a.data() + r * in;
            double* zrow = z.data() + r * out;
            for (std::size_t c = 0; c < out; ++c) zrow[c] = b[c];
            for (std::size_t i = 0; i < in; ++i) {
                const double ai = arow[i];
                if (ai == 0.0) continue;
                const double* wrow = w.data() + i * out;
                for (std::size_t c = 0; c < out; ++c) zrow[c] += ai * wrow[c];
            }
        }
        if (j + 1 < n_linear) {
            if (activation_ == Activation::relu) {
                for (double& v : z) v = v > 0.0 ? v : 0.0;
            } else {
                for (double& v : z) v = std::tanh(v);
            }
        }
    }

    // Softmax cross-entropy via logsumexp; delta doubles as the logits
    // gradient when requested.
    const std::size_t classes = sizes_.back();
    auto& logits = activations[n_linear];
    std::vector<double> delta;
    if (grad_out != nullptr) delta.assign(n * classes, 0.0);
    double loss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double* zrow = logits.data() + r * classes;
        const int label = data_.labels[rows[r]];
        double zmax = zrow[0];
        for (std::size_t c = 1; c < classes; ++c) zmax = std::max(zmax, zrow[c]);
        double sum = 0.0;
        for (std::size_t c = 0; c < classes; ++c) sum += std::exp(zrow[c] - zmax);
        loss += std::log(sum) + zmax - zrow[label];
        if (grad_out != nullptr) {
            double* drow = delta.data() + r * classes;
            for (std::size_t c = 0; c < classes; ++c) {
                drow[c] = std::exp(zrow[c] - zmax) / sum / static_cast<double>(n);
            }
            drow[label] -= 1.0 / static_cast<double>(n);
        }
    }
    loss /= static_cast<double>(n);
    if (grad_out == nullptr) {
        return loss;
    }

    for (std::size_t j = n_linear; j-- > 0;) {
        const std::size_t in = sizes_[j];
        const std::size_t out = sizes_[j + 1];
        auto dw = grad_out->layer(2 * j);
        auto db = grad_out->layer(2 * j + 1);
        const auto& a = activations[j];
        for (std::size_t r = 0; r < n; ++r) {
            const double* arow = a.data() + r * in;
            const double* drow = delta.data() + r * out;
            for (std::size_t c = 0; c < out; ++c) db[c] += drow[c];
            for (std::size_t i = 0; i < in; ++i) {
                const double ai = arow[i];
                if (ai == 0.0) continue;
                double* dwrow = dw.data() + i * out;
                for (std::size_t c = 0; c < out; ++c) dwrow[c] += ai * drow[c];
            }
        }
        if (j == 0) break;
        auto w = params.layer(2 * j);
        std::vector<double> next_delta(n * in, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            const double* drow = delta.data() + r * out;
            const double* arow = a.data() + r * in;
            double* ndrow = next_delta.data() + r * in;
            for (std::size_t i = 0; i < in; ++i) {
                const double ai = arow[i];
                // relu': 1 for a > 0, 0 otherwise (0 at the kink);
                // tanh': 1 - a^2.
                double deriv;
                if (activation_ == Activation::relu) {
                    deriv = ai > 0.0 ? 1.0 : 0.0;
                } else {
                    deriv = 1.0 - ai * ai;
                }
                if (deriv == 0.0) continue;
                const double* wrow = w.data() + i * out;
                double acc = 0.0;
                for (std::size_t c = 0; c < out; ++c) acc += wrow[c] * drow[c];
                ndrow[i] = deriv * acc;
            }
        }
        delta.swap(next_delta);
    }
    return loss;
}

double MlpObjective::accuracy(const LayeredParams& params, const Dataset& data) const {
    if (data.cols != sizes_.front()) {
        throw std::invalid_argument("MlpObjective::accuracy: feature size mismatch");
    }
    const std::size_t n_linear = sizes_.size() - 1;
    std::size_t correct = 0;
    std::vector<double> a;
    std::vector<double> z;
    for (std::size_t r = 0; r < data.rows; ++r) {
        auto row = data.row(r);
        a.assign(row.begin(), row.end());
        for (std::size_t j = 0; j < n_linear; ++j) {
            const std::size_t in = sizes_[j];
            const std::size_t out = sizes_[j + 1];
            auto w = params.layer(2 * j);
            auto b = params.layer(2 * j + 1);
            z.assign(b.begin(), b.end());
            for (std::size_t i = 0; i < in; ++i) {
                const double ai = a[i];
                if (ai == 0.0) continue;
                const double* wrow = w.data() + i * out;
                for (std::size_t c = 0; c < out; ++c) z[c] += ai * wrow[c];
            }
            if (j + 1 < n_linear) {
                if (activation_ == Activation::relu) {
                    for (double& v : z) v = v > 0.0 ? v : 0.0;
                } else {
                    for (double& v : z) v = std::tanh(v);
                }
            }
            a.swap(z);
        }
        const std::size_t pred = static_cast<std::size_t>(
            std::max_element(a.begin(), a.end()) - a.begin());
        if (pred == static_cast<std::size_t>(data.labels[r])) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.rows);
}

LayeredParams MlpObjective::init_params(Rng& rng) const {
    LayeredParams params = LayeredParams::zeros(shape_);
    for (std::size_t j = 0; j + 1 < sizes_.size(); ++j) {
        const double stddev = 1.0 / std::sqrt(static_cast<double>(sizes_[j]));
        for (double& v : params.layer(2 * j)) {
            v = rng.gaussian(0.0, stddev);
        }
        // biases stay zero
    }
    return params;
}

Grad finite_diff_grad(const Objective& obj, const LayeredParams& params, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw std::invalid_argument("finite_diff_grad: h must be > 0");
    }
    LayeredParams probe = params;
    Grad g = Grad::zeros_like(params);
    auto values = probe.flat();
    auto out = g.flat();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double saved = values[i];
        values[i] = saved + h;
        const double fp = obj.eval(probe);
        values[i] = saved - h;
        const double fm = obj.eval(probe);
        values[i] = saved;
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            throw std::runtime_error("finite_diff_grad: non-finite evaluation");
        }
        out[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

std::vector<std::size_t> sample_batch(Rng& rng, std::size_t n_rows, std::size_t batch_size) {
    if (n_rows == 0 || batch_size == 0) {
        throw std::invalid_argument("sample_batch: counts must be >= 1");
    }
    std::vector<std::size_t> rows(batch_size);
    for (auto& r : rows) {
        r = static_cast<std::size_t>(
            (static_cast<unsigned __int128>(rng.next_u64()) * n_rows) >> 64);
    }
    return rows;
}

}  // namespace aidaopt
