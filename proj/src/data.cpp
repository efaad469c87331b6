#include "aidaopt/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

namespace aidaopt {

void Dataset::validate() const {
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("Dataset: empty");
    }
    if (features.size() != rows * cols || labels.size() != rows) {
        throw std::invalid_argument("Dataset: inconsistent sizes");
    }
    for (double v : features) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("Dataset: non-finite feature");
        }
    }
    for (int label : labels) {
        if (label < 0 || static_cast<std::size_t>(label) >= classes) {
            throw std::invalid_argument("Dataset: label out of range");
        }
    }
}

Dataset synth_gaussian_classes(std::size_t n_per_class, std::size_t classes, std::size_t dim,
                               double separation, Rng& rng) {
    if (n_per_class == 0 || classes == 0 || dim == 0) {
        throw std::invalid_argument("synth_gaussian_classes: counts must be >= 1");
    }
    if (!std::isfinite(separation) || separation <= 0.0) {
        throw std::invalid_argument("synth_gaussian_classes: separation must be > 0");
    }

    // Class means: random directions rescaled to the requested norm.
    std::vector<std::vector<double>> means(classes, std::vector<double>(dim));
    for (auto& mean : means) {
        double norm = 0.0;
        while (norm == 0.0) {
            for (double& v : mean) v = rng.gaussian(0.0, 1.0);
            norm = std::sqrt(norm_sq(mean));
        }
        for (double& v : mean) v *= separation / norm;
    }

    Dataset data;
    data.rows = n_per_class * classes;
    data.cols = dim;
    data.classes = classes;
    data.features.resize(data.rows * dim);
    data.labels.resize(data.rows);

    std::vector<std::size_t> order(data.rows);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    // Fisher-Yates under the same rng keeps the whole dataset a pure
    // function of (seed, stream).
    for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(
            (static_cast<unsigned __int128>(rng.next_u64()) * i) >> 64);
        std::swap(order[i - 1], order[j]);
    }

    for (std::size_t n = 0; n < data.rows; ++n) {
        const std::size_t slot = order[n];
        const std::size_t c = n / n_per_class;
        data.labels[slot] = static_cast<int>(c);
        double* out = data.features.data() + slot * dim;
        for (std::size_t j = 0; j < dim; ++j) {
            out[j] = means[c][j] + rng.gaussian(0.0, 1.0);
        }
    }
    return data;
}

namespace {

std::uint32_t read_u32_be(std::ifstream& in, const std::string& what) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4)) {
        throw IdxError(IdxErrorKind::bad_magic, what + ": file too short for header");
    }
    return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
           (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

void write_u32_be(std::ofstream& out, std::uint32_t v) {
    const unsigned char buf[4] = {static_cast<unsigned char>(v >> 24),
                                  static_cast<unsigned char>(v >> 16),
                                  static_cast<unsigned char>(v >> 8),
                                  static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(buf), 4);
}

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path) {
    std::ifstream images(images_path, std::ios::binary);
    if (!images) {
        throw std::runtime_error("load_idx: cannot open " + images_path.string());
    }
    std::ifstream labels(labels_path, std::ios::binary);
    if (!labels) {
        throw std::runtime_error("load_idx: cannot open " + labels_path.string());
    }

    if (read_u32_be(images, "images") != kImagesMagic) {
        throw IdxError(IdxErrorKind::bad_magic, "load_idx: bad images magic");
    }
    const std::uint32_t n_images = read_u32_be(images, "images");
    const std::uint32_t n_rows = read_u32_be(images, "images");
    const std::uint32_t n_cols = read_u32_be(images, "images");

    if (read_u32_be(labels, "labels") != kLabelsMagic) {
        throw IdxError(IdxErrorKind::bad_magic, "load_idx: bad labels magic");
    }
    const std::uint32_t n_labels = read_u32_be(labels, "labels");

    if (n_images != n_labels) {
        throw IdxError(IdxErrorKind::count_mismatch,
                       "load_idx: image count " + std::to_string(n_images) +
                           " != label count " + std::to_string(n_labels));
    }

    const std::size_t pixels = std::size_t(n_rows) * n_cols;
    std::vector<unsigned char> image_bytes(std::size_t(n_images) * pixels);
    if (!images.read(reinterpret_cast<char*>(image_bytes.data()),
                     static_cast<std::streamsize>(image_bytes.size()))) {
        throw IdxError(IdxErrorKind::truncated, "load_idx: truncated images file");
    }
    std::vector<unsigned char> label_bytes(n_labels);
    if (!labels.read(reinterpret_cast<char*>(label_bytes.data()),
                     static_cast<std::streamsize>(label_bytes.size()))) {
        throw IdxError(IdxErrorKind::truncated, "load_idx: truncated labels file");
    }

    Dataset data;
    data.rows = n_images;
    data.cols = pixels;
    data.features.resize(image_bytes.size());
    for (std::size_t i = 0; i < image_bytes.size(); ++i) {
        data.features[i] = image_bytes[i] / 255.0;
    }
    data.labels.assign(label_bytes.begin(), label_bytes.end());
    int max_label = 0;
    for (int label : data.labels) max_label = std::max(max_label, label);
    data.classes = static_cast<std::size_t>(max_label) + 1;
    data.validate();
    return data;
}

void save_idx(const Dataset& data, const std::filesystem::path& images_path,
              const std::filesystem::path& labels_path) {
    data.validate();
    if (data.classes > 256) {
        throw std::invalid_argument("save_idx: labels do not fit in one byte");
    }
    std::ofstream images(images_path, std::ios::binary);
    if (!images) {
        throw std::runtime_error("save_idx: cannot open " + images_path.string());
    }
    write_u32_be(images, kImagesMagic);
    write_u32_be(images, static_cast<std::uint32_t>(data.rows));
    write_u32_be(images, 1);
    write_u32_be(images, static_cast<std::uint32_t>(data.cols));
    std::vector<unsigned char> bytes(data.features.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        const double v = data.features[i];
        if (v < 0.0 || v > 1.0) {
            throw std::invalid_argument("save_idx: feature outside [0,1]");
        }
        bytes[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    images.write(reinterpret_cast<const char*>(bytes.data()),
                 static_cast<std::streamsize>(bytes.size()));

    std::ofstream labels(labels_path, std::ios::binary);
    if (!labels) {
        throw std::runtime_error("save_idx: cannot open " + labels_path.string());
    }
    write_u32_be(labels, kLabelsMagic);
    write_u32_be(labels, static_cast<std::uint32_t>(data.rows));
    for (int label : data.labels) {
        const unsigned char b = static_cast<unsigned char>(label);
        labels.write(reinterpret_cast<const char*>(&b), 1);
    }
}

std::pair<Dataset, Dataset> split_train_val(const Dataset& data, double val_fraction) {
    if (!(val_fraction >= 0.0) || val_fraction >= 1.0) {
        throw std::invalid_argument("split_train_val: val_fraction must be in [0,1)");
    }
    const std::size_t n_val = static_cast<std::size_t>(std::floor(data.rows * val_fraction));
    const std::size_t n_train = data.rows - n_val;

    auto take = [&](std::size_t begin, std::size_t count, const char* tag) {
        Dataset part;
        part.rows = count;
        part.cols = data.cols;
        part.classes = data.classes;
        part.split = tag;
        part.features.assign(data.features.begin() + begin * data.cols,
                             data.features.begin() + (begin + count) * data.cols);
        part.labels.assign(data.labels.begin() + begin, data.labels.begin() + begin + count);
        return part;
    };
    return {take(0, n_train, "train"), take(n_train, n_val, "val")};
}

}  // namespace aidaopt
