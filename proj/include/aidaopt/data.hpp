#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aidaopt/core.hpp"

namespace aidaopt {

/// Row-major feature matrix with integer class labels.
struct Dataset {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t classes = 0;
    std::vector<double> features;  // rows * cols
    std::vector<int> labels;       // rows, each in [0, classes)
    std::string split = "train";

    std::span<const double> row(std::size_t r) const { return {features.data() + r * cols, cols}; }
    void validate() const;  // throws std::invalid_argument
};

/// C isotropic unit-variance Gaussian clusters; every class mean has norm
/// equal to `separation` (direction drawn from the rng). Samples are
/// emitted in rng-shuffled order.
Dataset synth_gaussian_classes(std::size_t n_per_class, std::size_t classes, std::size_t dim,
                               double separation, Rng& rng);

enum class IdxErrorKind { bad_magic, truncated, count_mismatch };

class IdxError : public std::runtime_error {
public:
    IdxError(IdxErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    IdxErrorKind kind() const { return kind_; }

private:
    IdxErrorKind kind_;
};

/// Load an IDX image/label file pair (big-endian magics 0x00000803 and
/// 0x00000801). Pixels are scaled to [0,1].
Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path);

/// Write a dataset back to the IDX pair (features must be k/255 values, one
/// image row per sample).
void save_idx(const Dataset& data, const std::filesystem::path& images_path,
              const std::filesystem::path& labels_path);

/// Deterministic prefix split: the first (1 - val_fraction) rows become the
/// train split, the rest the val split.
std::pair<Dataset, Dataset> split_train_val(const Dataset& data, double val_fraction);

}  // namespace aidaopt
