#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "aidaopt/telemetry.hpp"

using namespace aidaopt;
namespace fs = std::filesystem;

namespace {

std::uint64_t bits_of(double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof(u));
    return u;
}

OptimizerState elementwise_state(std::vector<std::vector<double>> m,
                                 std::vector<std::vector<double>> v, std::int64_t t) {
    OptimizerState state;
    state.t = t;
    state.m = LayeredVector(std::move(m));
    state.second = ElementwiseMoment{LayeredVector(std::move(v))};
    return state;
}

}  // namespace

TEST_SUITE_BEGIN("telemetry");

TEST_CASE("per-layer-scalar optimizers report zero std") {
    HyperParams hp;
    OptimizerState state;
    state.t = 3;
    state.m = LayeredVector({{0.0, 0.0, 0.0}, {0.0}});
    state.second = PerLayerMoment{{0.02, 0.5}};
    const StepStats stats = stepsize_stats(state, hp, 3, "ladam");
    REQUIRE(stats.layers.size() == 2);
    CHECK(stats.layers[0].std_stepsize == 0.0);
    CHECK(stats.layers[1].std_stepsize == 0.0);
    CHECK(stats.compactness >= 1.0);
}

TEST_CASE("uniform second moment gives zero spread") {
    HyperParams hp;
    hp.beta2 = 0.5;  // bc2(t=1) = 0.5 keeps the arithmetic exact
    // v/bc2 = 0.25 in every slot -> stepsize 2 exactly
    const OptimizerState state =
        elementwise_state({{0.0, 0.0, 0.0, 0.0}}, {{0.125, 0.125, 0.125, 0.125}}, 1);
    const StepStats stats = stepsize_stats(state, hp, 1, "adaml");
    CHECK(stats.layers[0].mean_stepsize == 2.0);
    CHECK(stats.layers[0].std_stepsize == 0.0);
    CHECK(stats.compactness == 1.0);
    CHECK(stats.spread == 0.0);
}

TEST_CASE("hand-computed mean and std for a two-entry layer") {
    HyperParams hp;  // beta2 = 0.999, bc2(t=1) = 0.001
    // corrected v = {1, 4} -> stepsizes {1, 0.5}
    const OptimizerState state = elementwise_state({{0.0, 0.0}}, {{0.001, 0.004}}, 1);
    const StepStats stats = stepsize_stats(state, hp, 1, "adaml");
    CHECK(stats.layers[0].mean_stepsize == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(stats.layers[0].std_stepsize == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("sgdm reports unit stepsizes") {
    HyperParams hp;
    OptimizerState state;
    state.t = 1;
    state.m = LayeredVector({{0.0, 0.0}, {0.0}});
    const StepStats stats = stepsize_stats(state, hp, 1, "sgdm");
    for (const auto& layer : stats.layers) {
        CHECK(layer.mean_stepsize == 1.0);
        CHECK(layer.std_stepsize == 0.0);
    }
    CHECK(stats.compactness == 1.0);
}

TEST_CASE("stats arguments are validated") {
    HyperParams hp;
    OptimizerState state;
    state.t = 0;
    state.m = LayeredVector({{0.0}});
    state.second = ElementwiseMoment{LayeredVector({{0.1}})};
    CHECK_THROWS_AS(stepsize_stats(state, hp, 0, "adam"), std::invalid_argument);
    CHECK_THROWS_AS(stepsize_stats(state, hp, 1, "adamx"), std::invalid_argument);
    CHECK_THROWS_AS(stepsize_stats(state, hp, 1, "ladam"), std::invalid_argument);
}

TEST_CASE("projected increments never exceed the plain squared difference") {
    Rng rng(14);
    HyperParams hp;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform(0.0, 32.0));
        std::vector<double> m(n);
        std::vector<double> g(n);
        for (double& x : m) x = rng.gaussian(0.0, 1.0);
        for (double& x : g) x = rng.gaussian(0.0, 1.0);
        auto [mp, gp] = project_pair(m, g, hp.projections, hp.xi);
        double aida_inc = 0.0;
        double belief_inc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            aida_inc += (mp[i] - gp[i]) * (mp[i] - gp[i]);
            belief_inc += (m[i] - g[i]) * (m[i] - g[i]);
        }
        CHECK(aida_inc <= belief_inc + 1e-12 * std::max(1.0, belief_inc));
    }
}

TEST_CASE("csv export") {
    const fs::path path = fs::temp_directory_path() / "aidaopt_test_metrics.csv";

    SUBCASE("one step with two layers writes header plus two rows") {
        LoggedStep step;
        step.stats.step = 7;
        step.stats.layers = {{0, 0.5, 0.1}, {1, 0.25, 0.0}};
        step.stats.compactness = 2.0;
        step.loss = 1.5;
        step.val_metric = 0.75;
        step.lr = 0.001;
        export_csv(std::vector<LoggedStep>{step}, path);

        std::ifstream in(path);
        std::string line;
        std::vector<std::string> lines;
        while (std::getline(in, line)) lines.push_back(line);
        REQUIRE(lines.size() == 3);
        CHECK(lines[0] == "step,layer,mean_stepsize,std_stepsize,loss,val_metric,lr");
        CHECK(lines[1].rfind("7,0,", 0) == 0);
        CHECK(lines[2].rfind("7,1,", 0) == 0);
    }

    SUBCASE("round-trip parsing reproduces doubles bitwise") {
        LoggedStep step;
        step.stats.step = 1;
        step.stats.layers = {{0, 1.0 / 3.0, 0.30000000000000004}};
        step.loss = 3.141592653589793;
        step.val_metric = 2.0 / 7.0;
        step.lr = 1e-3;
        export_csv(std::vector<LoggedStep>{step}, path);

        std::ifstream in(path);
        std::string header, row;
        std::getline(in, header);
        std::getline(in, row);
        std::vector<std::string> fields;
        std::stringstream ss(row);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        REQUIRE(fields.size() == 7);
        CHECK(bits_of(std::strtod(fields[2].c_str(), nullptr)) == bits_of(1.0 / 3.0));
        CHECK(bits_of(std::strtod(fields[3].c_str(), nullptr)) ==
              bits_of(0.30000000000000004));
        CHECK(bits_of(std::strtod(fields[4].c_str(), nullptr)) ==
              bits_of(3.141592653589793));
        CHECK(bits_of(std::strtod(fields[5].c_str(), nullptr)) == bits_of(2.0 / 7.0));
        CHECK(bits_of(std::strtod(fields[6].c_str(), nullptr)) == bits_of(1e-3));
    }

    SUBCASE("an empty series is rejected before any file is created") {
        const fs::path missing = fs::temp_directory_path() / "aidaopt_test_missing.csv";
        fs::remove(missing);
        CHECK_THROWS_AS(export_csv({}, missing), std::invalid_argument);
        CHECK(!fs::exists(missing));
    }

    SUBCASE("an unwritable path is reported") {
        LoggedStep step;
        step.stats.step = 1;
        step.stats.layers = {{0, 1.0, 0.0}};
        const fs::path bad = fs::temp_directory_path() / "aidaopt_no_such_dir" / "metrics.csv";
        CHECK_THROWS_AS(export_csv(std::vector<LoggedStep>{step}, bad), std::runtime_error);
    }
}

TEST_SUITE_END();
