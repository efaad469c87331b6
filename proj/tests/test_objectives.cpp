#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aidaopt/objectives.hpp"
#include "aidaopt/optim.hpp"
#include "reference.hpp"

using namespace aidaopt;
using testref::rel_err;

namespace {

// f(theta) = a . theta — curvature-free probe for the finite-difference op.
class LinearObjective final : public Objective {
public:
    explicit LinearObjective(std::vector<double> a) : a_(std::move(a)), shape_{a_.size()} {}

    const std::string& name() const override { return name_; }
    const std::vector<std::size_t>& shape() const override { return shape_; }
    double eval(const LayeredParams& params) const override {
        return dot(a_, params.layer(0));
    }
    Grad gradient(const LayeredParams& params) const override {
        Grad g = Grad::zeros_like(params);
        std::copy(a_.begin(), a_.end(), g.layer(0).begin());
        return g;
    }

private:
    std::string name_ = "linear";
    std::vector<double> a_;
    std::vector<std::size_t> shape_;
};

Dataset two_class_batch() {
    Dataset d;
    d.rows = 4;
    d.cols = 3;
    d.classes = 2;
    d.features = {0.1, 0.5, -0.3, 0.9, -0.2, 0.4, -0.7, 0.3, 0.8, 0.2, -0.6, -0.1};
    d.labels = {0, 1, 0, 1};
    return d;
}

double max_fd_rel_err(const Objective& obj, const LayeredParams& params, double h) {
    const Grad analytic = obj.gradient(params);
    const Grad fd = finite_diff_grad(obj, params, h);
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.dim(); ++i) {
        const double a = analytic.flat()[i];
        const double f = fd.flat()[i];
        worst = std::max(worst, std::abs(f - a) / std::max(1.0, std::abs(a)));
    }
    return worst;
}

}  // namespace

TEST_SUITE_BEGIN("objectives");

TEST_CASE("quadratic hand values") {
    QuadraticObjective obj({{2.0}});
    LayeredParams theta({{3.0}});
    CHECK(obj.eval(theta) == 9.0);
    CHECK(obj.gradient(theta).flat()[0] == 6.0);

    LayeredParams zero = LayeredParams::zeros({1});
    CHECK(obj.eval(zero) == 0.0);
    CHECK(obj.gradient(zero).flat()[0] == 0.0);
}

TEST_CASE("quadratic factory spectra") {
    Rng rng(6);
    auto obj = quadratic_objective({{5, 100.0}, {1, 7.0}}, rng);
    REQUIRE(obj.shape() == std::vector<std::size_t>{5, 1});
    const auto& diag = obj.diagonals();
    const double lo = *std::min_element(diag[0].begin(), diag[0].end());
    const double hi = *std::max_element(diag[0].begin(), diag[0].end());
    CHECK(rel_err(lo, 1.0) < 1e-12);
    CHECK(rel_err(hi, 100.0) < 1e-12);
    CHECK(diag[1][0] == 7.0);
    CHECK_THROWS_AS(quadratic_objective({{3, 0.5}}, rng), std::invalid_argument);
    CHECK_THROWS_AS(quadratic_objective({}, rng), std::invalid_argument);

    // deterministic under the rng
    Rng r1(9), r2(9);
    auto a = quadratic_objective({{8, 50.0}}, r1);
    auto b = quadratic_objective({{8, 50.0}}, r2);
    CHECK(a.diagonals() == b.diagonals());
}

TEST_CASE("quadratic gradient matches finite differences") {
    Rng rng(13);
    auto obj = quadratic_objective({{4, 100.0}, {3, 10.0}}, rng);
    for (int trial = 0; trial < 5; ++trial) {
        auto theta = obj.init_params(rng);
        CHECK(max_fd_rel_err(obj, theta, 1e-5) < 1e-7);
    }
}

TEST_CASE("rosenbrock") {
    RosenbrockObjective obj(2);
    LayeredParams ones({{1.0, 1.0}});
    CHECK(obj.eval(ones) == 0.0);
    CHECK(obj.gradient(ones).flat()[0] == 0.0);

    LayeredParams origin({{0.0, 0.0}});
    CHECK(obj.eval(origin) == 1.0);
    CHECK(obj.gradient(origin).flat()[0] == -2.0);
    CHECK(obj.gradient(origin).flat()[1] == 0.0);

    CHECK_THROWS_AS(RosenbrockObjective(3), std::invalid_argument);
    CHECK_THROWS_AS(RosenbrockObjective(0), std::invalid_argument);

    RosenbrockObjective big(10);
    Rng rng(2);
    for (int trial = 0; trial < 5; ++trial) {
        auto theta = big.init_params(rng);
        CHECK(max_fd_rel_err(big, theta, 1e-5) < 1e-6);
    }
}

TEST_CASE("finite differences") {
    SUBCASE("linear objective is exact for any h") {
        LinearObjective obj({0.5, -2.0, 3.5});
        LayeredParams theta({{0.3, 0.1, -0.8}});
        for (double h : {1e-2, 1e-4, 1e-6}) {
            // no curvature: only cancellation noise (~eps/h) remains
            const double tol = 1e-14 / h;
            const Grad fd = finite_diff_grad(obj, theta, h);
            CHECK(rel_err(fd.flat()[0], 0.5) < tol);
            CHECK(rel_err(fd.flat()[1], -2.0) < tol);
            CHECK(rel_err(fd.flat()[2], 3.5) < tol);
        }
    }

    SUBCASE("halving h roughly quarters the truncation error") {
        RosenbrockObjective obj(4);
        LayeredParams theta({{0.3, -0.4, 1.2, 0.7}});
        const Grad exact = obj.gradient(theta);
        auto err_at = [&](double h) {
            const Grad fd = finite_diff_grad(obj, theta, h);
            double worst = 0.0;
            for (std::size_t i = 0; i < exact.dim(); ++i) {
                worst = std::max(worst, std::abs(fd.flat()[i] - exact.flat()[i]));
            }
            return worst;
        };
        const double coarse = err_at(1e-3);
        const double fine = err_at(5e-4);
        CHECK(fine < coarse / 2.5);  // ~4x for an O(h^2) scheme
    }

    SUBCASE("h must be positive") {
        LinearObjective obj({1.0});
        LayeredParams theta({{0.0}});
        CHECK_THROWS_AS(finite_diff_grad(obj, theta, 0.0), std::invalid_argument);
    }
}

TEST_CASE("mlp") {
    SUBCASE("zero weights on a balanced two-class batch give ln 2") {
        MlpObjective obj({3, 4, 2}, Activation::tanh, two_class_batch());
        auto zeros = LayeredParams::zeros(obj.shape());
        CHECK(rel_err(obj.eval(zeros), std::log(2.0)) < 1e-12);
    }

    SUBCASE("analytic gradient matches finite differences") {
        for (Activation act : {Activation::tanh, Activation::relu}) {
            MlpObjective obj({3, 5, 4, 2}, act, two_class_batch());
            Rng rng(31);
            for (int trial = 0; trial < 3; ++trial) {
                auto theta = obj.init_params(rng);
                CHECK(max_fd_rel_err(obj, theta, 1e-5) < 1e-5);
            }
        }
    }

    SUBCASE("permuting batch rows changes nothing") {
        MlpObjective obj({3, 4, 2}, Activation::tanh, two_class_batch());
        Rng rng(5);
        auto theta = obj.init_params(rng);
        const std::vector<std::size_t> fwd{0, 1, 2, 3};
        const std::vector<std::size_t> perm{3, 0, 2, 1};
        CHECK(obj.eval_batch(theta, fwd) == doctest::Approx(obj.eval_batch(theta, perm)).epsilon(1e-14));
        const Grad a = obj.gradient_batch(theta, fwd);
        const Grad b = obj.gradient_batch(theta, perm);
        for (std::size_t i = 0; i < a.dim(); ++i) {
            CHECK(std::abs(a.flat()[i] - b.flat()[i]) < 1e-14);
        }
    }

    SUBCASE("shape groups are one per weight matrix and per bias") {
        MlpObjective obj({3, 5, 2}, Activation::relu, two_class_batch());
        CHECK(obj.shape() == std::vector<std::size_t>{15, 5, 10, 2});
    }

    SUBCASE("construction rejects mismatched sizes") {
        CHECK_THROWS_AS(MlpObjective({4, 4, 2}, Activation::relu, two_class_batch()),
                        std::invalid_argument);  // input != dataset cols
        CHECK_THROWS_AS(MlpObjective({3, 4, 3}, Activation::relu, two_class_batch()),
                        std::invalid_argument);  // output != classes
        CHECK_THROWS_AS(MlpObjective({3}, Activation::relu, two_class_batch()),
                        std::invalid_argument);
    }
}

TEST_CASE("tiny-lr descent decreases a quadratic monotonically for every optimizer") {
    Rng shared(77);
    auto obj = quadratic_objective({{6, 50.0}}, shared);
    for (auto id : optimizer_ids()) {
        CAPTURE(id);
        HyperParams hp;
        hp.weight_decay = 0.0;
        auto opt = make_optimizer(id, hp);
        Rng init(123);
        auto theta = obj.init_params(init);
        auto state = opt->init_state(theta);
        double prev = obj.eval(theta);
        for (int t = 0; t < 200; ++t) {
            opt->step(theta, obj.gradient(theta), state, 1e-4);
            const double cur = obj.eval(theta);
            CHECK(cur <= prev);
            prev = cur;
        }
    }
}

TEST_CASE("analytic gradients track finite differences on 100 random points") {
    Rng rng(2718);
    auto quad = quadratic_objective({{5, 30.0}, {3, 4.0}}, rng);
    for (int point = 0; point < 40; ++point) {
        auto theta = quad.init_params(rng);
        CHECK(max_fd_rel_err(quad, theta, 1e-5) < 1e-7);
    }
    RosenbrockObjective rosen(8);
    for (int point = 0; point < 40; ++point) {
        auto theta = rosen.init_params(rng);
        CHECK(max_fd_rel_err(rosen, theta, 1e-5) < 1e-6);
    }
    MlpObjective mlp({3, 6, 2}, Activation::tanh, two_class_batch());
    for (int point = 0; point < 20; ++point) {
        auto theta = mlp.init_params(rng);
        CHECK(max_fd_rel_err(mlp, theta, 1e-5) < 1e-5);
    }
}

TEST_CASE("sample_batch is deterministic and in range") {
    Rng a(4, 3);
    Rng b(4, 3);
    const auto ra = sample_batch(a, 100, 32);
    const auto rb = sample_batch(b, 100, 32);
    CHECK(ra == rb);
    for (auto r : ra) CHECK(r < 100);
    CHECK_THROWS_AS(sample_batch(a, 0, 8), std::invalid_argument);
}

TEST_SUITE_END();
