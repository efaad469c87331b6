#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "aidaopt/data.hpp"

using namespace aidaopt;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
    return fs::temp_directory_path() / (std::string("aidaopt_test_") + name);
}

void write_bytes(const fs::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

void push_u32_be(std::vector<unsigned char>& v, std::uint32_t x) {
    v.push_back(static_cast<unsigned char>(x >> 24));
    v.push_back(static_cast<unsigned char>(x >> 16));
    v.push_back(static_cast<unsigned char>(x >> 8));
    v.push_back(static_cast<unsigned char>(x));
}

// two 2x2 images, labels {0, 1}
std::vector<unsigned char> fixture_images() {
    std::vector<unsigned char> v;
    push_u32_be(v, 0x00000803);
    push_u32_be(v, 2);
    push_u32_be(v, 2);
    push_u32_be(v, 2);
    for (unsigned char b : {0, 1, 2, 3}) v.push_back(b);
    for (unsigned char b : {255, 254, 253, 252}) v.push_back(b);
    return v;
}

std::vector<unsigned char> fixture_labels(std::uint32_t count) {
    std::vector<unsigned char> v;
    push_u32_be(v, 0x00000801);
    push_u32_be(v, count);
    for (std::uint32_t i = 0; i < count; ++i) v.push_back(static_cast<unsigned char>(i % 2));
    return v;
}

}  // namespace

TEST_SUITE_BEGIN("data");

TEST_CASE("synthetic gaussian classes") {
    SUBCASE("same seed produces identical bytes") {
        Rng a(5, 1);
        Rng b(5, 1);
        const Dataset da = synth_gaussian_classes(50, 3, 4, 5.0, a);
        const Dataset db = synth_gaussian_classes(50, 3, 4, 5.0, b);
        REQUIRE(da.features.size() == db.features.size());
        CHECK(std::memcmp(da.features.data(), db.features.data(),
                          da.features.size() * sizeof(double)) == 0);
        CHECK(da.labels == db.labels);
    }

    SUBCASE("one class means all labels zero") {
        Rng rng(2);
        const Dataset d = synth_gaussian_classes(10, 1, 3, 4.0, rng);
        for (int label : d.labels) CHECK(label == 0);
        CHECK(d.classes == 1);
    }

    SUBCASE("well-separated clusters are recovered by a nearest-centroid rule") {
        Rng rng(1);
        const Dataset d = synth_gaussian_classes(500, 2, 2, 10.0, rng);
        // empirical centroids as the oracle classifier
        std::vector<std::vector<double>> centroid(2, std::vector<double>(d.cols, 0.0));
        std::vector<std::size_t> count(2, 0);
        for (std::size_t r = 0; r < d.rows; ++r) {
            auto row = d.row(r);
            auto& c = centroid[static_cast<std::size_t>(d.labels[r])];
            for (std::size_t j = 0; j < d.cols; ++j) c[j] += row[j];
            ++count[static_cast<std::size_t>(d.labels[r])];
        }
        for (std::size_t k = 0; k < 2; ++k) {
            for (double& v : centroid[k]) v /= static_cast<double>(count[k]);
        }
        std::size_t correct = 0;
        for (std::size_t r = 0; r < d.rows; ++r) {
            auto row = d.row(r);
            double best = 1e300;
            std::size_t arg = 0;
            for (std::size_t k = 0; k < 2; ++k) {
                double dist = 0.0;
                for (std::size_t j = 0; j < d.cols; ++j) {
                    dist += (row[j] - centroid[k][j]) * (row[j] - centroid[k][j]);
                }
                if (dist < best) {
                    best = dist;
                    arg = k;
                }
            }
            if (arg == static_cast<std::size_t>(d.labels[r])) ++correct;
        }
        CHECK(static_cast<double>(correct) / static_cast<double>(d.rows) >= 0.99);
    }

    SUBCASE("argument validation") {
        Rng rng(0);
        CHECK_THROWS_AS(synth_gaussian_classes(0, 2, 2, 1.0, rng), std::invalid_argument);
        CHECK_THROWS_AS(synth_gaussian_classes(5, 2, 2, 0.0, rng), std::invalid_argument);
    }
}

TEST_CASE("idx loading") {
    const fs::path images = temp_file("images.idx");
    const fs::path labels = temp_file("labels.idx");

    SUBCASE("hand-crafted fixture loads exactly") {
        write_bytes(images, fixture_images());
        write_bytes(labels, fixture_labels(2));
        const Dataset d = load_idx(images, labels);
        REQUIRE(d.rows == 2);
        REQUIRE(d.cols == 4);
        CHECK(d.classes == 2);
        CHECK(d.features[0] == 0.0);
        CHECK(d.features[1] == 1.0 / 255.0);
        CHECK(d.features[2] == 2.0 / 255.0);
        CHECK(d.features[4] == 1.0);
        CHECK(d.labels == std::vector<int>{0, 1});
        for (double v : d.features) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }

    SUBCASE("missing files are reported") {
        CHECK_THROWS_AS(load_idx(temp_file("nope_images"), temp_file("nope_labels")),
                        std::runtime_error);
    }

    SUBCASE("empty images file reports a bad magic") {
        write_bytes(images, {});
        write_bytes(labels, fixture_labels(2));
        try {
            load_idx(images, labels);
            FAIL("expected IdxError");
        } catch (const IdxError& e) {
            CHECK(e.kind() == IdxErrorKind::bad_magic);
        }
    }

    SUBCASE("wrong magic value is rejected") {
        auto bytes = fixture_images();
        bytes[3] = 0x42;
        write_bytes(images, bytes);
        write_bytes(labels, fixture_labels(2));
        try {
            load_idx(images, labels);
            FAIL("expected IdxError");
        } catch (const IdxError& e) {
            CHECK(e.kind() == IdxErrorKind::bad_magic);
        }
    }

    SUBCASE("labels file with fewer entries reports a count mismatch") {
        write_bytes(images, fixture_images());
        write_bytes(labels, fixture_labels(1));
        try {
            load_idx(images, labels);
            FAIL("expected IdxError");
        } catch (const IdxError& e) {
            CHECK(e.kind() == IdxErrorKind::count_mismatch);
        }
    }

    SUBCASE("payload shorter than the declared count reports truncation") {
        write_bytes(images, fixture_images());
        auto bytes = fixture_labels(2);
        bytes.pop_back();
        write_bytes(labels, bytes);
        try {
            load_idx(images, labels);
            FAIL("expected IdxError");
        } catch (const IdxError& e) {
            CHECK(e.kind() == IdxErrorKind::truncated);
        }
    }

    SUBCASE("save and reload round-trips exactly") {
        write_bytes(images, fixture_images());
        write_bytes(labels, fixture_labels(2));
        const Dataset d = load_idx(images, labels);

        const fs::path images2 = temp_file("images2.idx");
        const fs::path labels2 = temp_file("labels2.idx");
        save_idx(d, images2, labels2);
        const Dataset d2 = load_idx(images2, labels2);
        CHECK(d2.rows == d.rows);
        CHECK(d2.cols == d.cols);
        CHECK(d2.features == d.features);
        CHECK(d2.labels == d.labels);
    }
}

TEST_CASE("train/val split is a deterministic prefix") {
    Rng rng(8);
    const Dataset d = synth_gaussian_classes(25, 2, 3, 6.0, rng);
    const auto [train, val] = split_train_val(d, 0.2);
    CHECK(train.rows == 40);
    CHECK(val.rows == 10);
    CHECK(train.split == "train");
    CHECK(val.split == "val");
    for (std::size_t j = 0; j < d.cols; ++j) {
        CHECK(train.features[j] == d.features[j]);
        CHECK(val.features[j] == d.features[train.rows * d.cols + j]);
    }
    CHECK_THROWS_AS(split_train_val(d, 1.0), std::invalid_argument);
}

TEST_SUITE_END();
