#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace aidaopt {

/// Model vector partitioned into layer groups. Values are mutable, the
/// partition is fixed at construction (one group per parameter tensor).
class LayeredVector {
public:
    LayeredVector() = default;
    explicit LayeredVector(const std::vector<std::vector<double>>& layers);
    LayeredVector(std::initializer_list<std::vector<double>> layers)
        : LayeredVector(std::vector<std::vector<double>>(layers)) {}

    static LayeredVector zeros(const std::vector<std::size_t>& shape);
    static LayeredVector zeros_like(const LayeredVector& other);

    std::size_t layer_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t dim() const { return data_.size(); }
    std::size_t layer_dim(std::size_t l) const { return offsets_[l + 1] - offsets_[l]; }
    std::vector<std::size_t> shape() const;

    std::span<double> layer(std::size_t l) {
        return {data_.data() + offsets_[l], layer_dim(l)};
    }
    std::span<const double> layer(std::size_t l) const {
        return {data_.data() + offsets_[l], layer_dim(l)};
    }
    std::span<double> flat() { return {data_.data(), data_.size()}; }
    std::span<const double> flat() const { return {data_.data(), data_.size()}; }

    bool same_shape(const LayeredVector& other) const { return offsets_ == other.offsets_; }
    bool all_finite() const;

private:
    LayeredVector(std::vector<double> data, std::vector<std::size_t> offsets)
        : data_(std::move(data)), offsets_(std::move(offsets)) {}

    std::vector<double> data_;
    std::vector<std::size_t> offsets_;  // L+1 entries, offsets_[0] == 0
};

using LayeredParams = LayeredVector;
using Grad = LayeredVector;

/// Counter-based PRNG (splitmix64). Identical (seed, stream) gives an
/// identical sample sequence on every platform; split() derives an
/// independent stream from the same seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();
    double uniform();  // [0, 1)
    double uniform(double a, double b);
    double gaussian(double mean, double stddev);

    Rng split(std::uint64_t stream) const { return Rng(seed_, stream); }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::uint64_t state_;
    std::uint64_t seed_;
    std::uint64_t stream_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Parameter initialization recipe for make_params.
struct InitSpec {
    enum class Kind { zeros, constant, uniform, gaussian };

    static InitSpec Zeros() { return {Kind::zeros, 0.0, 0.0}; }
    static InitSpec Constant(double c) { return {Kind::constant, c, 0.0}; }
    static InitSpec Uniform(double a, double b) { return {Kind::uniform, a, b}; }
    static InitSpec Gaussian(double mean, double stddev) { return {Kind::gaussian, mean, stddev}; }

    Kind kind = Kind::zeros;
    double a = 0.0;  // constant value / lower bound / mean
    double b = 0.0;  // upper bound / stddev
};

/// Build params for the given layer shape. Deterministic for a given rng.
LayeredParams make_params(const std::vector<std::size_t>& shape, const InitSpec& init, Rng& rng);

/// a*x + y, elementwise. Throws on length mismatch or non-finite a.
std::vector<double> axpy_layer(double a, std::span<const double> x, std::span<const double> y);

double dot(std::span<const double> x, std::span<const double> y);
double norm_sq(std::span<const double> x);

namespace detail {
void require_same_length(std::size_t nx, std::size_t ny, const char* what);
}

}  // namespace aidaopt
