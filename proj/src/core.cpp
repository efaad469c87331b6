#include "aidaopt/core.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace aidaopt {

LayeredVector::LayeredVector(const std::vector<std::vector<double>>& layers) {
    if (layers.empty()) {
        throw std::invalid_argument("LayeredVector: need at least one layer");
    }
    offsets_.reserve(layers.size() + 1);
    offsets_.push_back(0);
    for (const auto& l : layers) {
        if (l.empty()) {
            throw std::invalid_argument("LayeredVector: empty layer");
        }
        offsets_.push_back(offsets_.back() + l.size());
    }
    data_.reserve(offsets_.back());
    for (const auto& l : layers) {
        for (double v : l) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("LayeredVector: non-finite value");
            }
            data_.push_back(v);
        }
    }
}

LayeredVector LayeredVector::zeros(const std::vector<std::size_t>& shape) {
    if (shape.empty()) {
        throw std::invalid_argument("LayeredVector: empty shape");
    }
    std::vector<std::size_t> offsets;
    offsets.reserve(shape.size() + 1);
    offsets.push_back(0);
    for (std::size_t d : shape) {
        if (d == 0) {
            throw std::invalid_argument("LayeredVector: zero-length layer");
        }
        offsets.push_back(offsets.back() + d);
    }
    std::vector<double> data(offsets.back(), 0.0);
    return LayeredVector(std::move(data), std::move(offsets));
}

LayeredVector LayeredVector::zeros_like(const LayeredVector& other) {
    return LayeredVector(std::vector<double>(other.data_.size(), 0.0), other.offsets_);
}

std::vector<std::size_t> LayeredVector::shape() const {
    std::vector<std::size_t> s(layer_count());
    for (std::size_t l = 0; l < s.size(); ++l) {
        s[l] = layer_dim(l);
    }
    return s;
}

bool LayeredVector::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

namespace {

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : state_(mix64(mix64(seed + 0x9E3779B97F4A7C15ull) ^ (stream * 0xD1B54A32D192ED03ull + 1))),
      seed_(seed),
      stream_(stream) {}

std::uint64_t Rng::next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw std::invalid_argument("Rng::uniform: non-finite bounds");
    }
    return a + (b - a) * uniform();
}

double Rng::gaussian(double mean, double stddev) {
    if (!std::isfinite(mean) || !std::isfinite(stddev)) {
        throw std::invalid_argument("Rng::gaussian: non-finite parameters");
    }
    if (has_spare_) {
        has_spare_ = false;
        return mean + stddev * spare_;
    }
    // Marsaglia polar method: avoids sin/cos for cross-platform stability.
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return mean + stddev * u * f;
}

LayeredParams make_params(const std::vector<std::size_t>& shape, const InitSpec& init, Rng& rng) {
    if (!std::isfinite(init.a) || !std::isfinite(init.b)) {
        throw std::invalid_argument("make_params: non-finite init parameters");
    }
    LayeredParams params = LayeredParams::zeros(shape);
    auto values = params.flat();
    switch (init.kind) {
        case InitSpec::Kind::zeros:
            break;
        case InitSpec::Kind::constant:
            for (double& v : values) v = init.a;
            break;
        case InitSpec::Kind::uniform:
            for (double& v : values) v = rng.uniform(init.a, init.b);
            break;
        case InitSpec::Kind::gaussian:
            for (double& v : values) v = rng.gaussian(init.a, init.b);
            break;
    }
    return params;
}

namespace detail {

void require_same_length(std::size_t nx, std::size_t ny, const char* what) {
    if (nx != ny) {
        throw std::invalid_argument(std::string(what) + ": length mismatch (" +
                                    std::to_string(nx) + " vs " + std::to_string(ny) + ")");
    }
}

}  // namespace detail

std::vector<double> axpy_layer(double a, std::span<const double> x, std::span<const double> y) {
    detail::require_same_length(x.size(), y.size(), "axpy_layer");
    if (!std::isfinite(a)) {
        throw std::invalid_argument("axpy_layer: non-finite scale");
    }
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = a * x[i] + y[i];
    }
    return out;
}

double dot(std::span<const double> x, std::span<const double> y) {
    detail::require_same_length(x.size(), y.size(), "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += x[i] * y[i];
    }
    return acc;
}

double norm_sq(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) {
        acc += v * v;
    }
    return acc;
}

}  // namespace aidaopt
