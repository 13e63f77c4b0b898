#include <catch_amalgamated.hpp>

#include <random>

#include "feemarket/losses.hpp"
#include "oracles.hpp"

using namespace feemarket;
using Catch::Approx;

namespace {

ResourceVector rv(std::vector<double> v) { return ResourceVector(std::move(v)); }
PriceVector pv(std::vector<double> v) { return PriceVector(std::move(v)); }

LossSpec random_spec(std::mt19937_64& gen, std::size_t m) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> target(m);
    std::vector<double> limit(m);
    for (std::size_t i = 0; i < m; ++i) {
        limit[i] = 0.5 + 2.5 * u(gen);
        target[i] = (0.05 + 0.9 * u(gen)) * limit[i];
    }
    return LossSpec::make(u(gen) < 0.5 ? LossKind::target_box : LossKind::quadratic_overage, rv(target), rv(limit));
}

}  // namespace

TEST_CASE("loss_eval examples") {
    const auto box = LossSpec::box(rv({1, 2}), rv({4, 4}));
    CHECK(loss_eval(box, rv({1, 2})) == 0.0);
    CHECK(std::isinf(loss_eval(box, rv({1.5, 0}))));
    const auto quad = LossSpec::quadratic(rv({1}), rv({3}));
    CHECK(loss_eval(quad, rv({2})) == 0.5);
    CHECK(std::isinf(loss_eval(quad, rv({3.5}))));
    CHECK(std::isinf(loss_eval(quad, ResourceVector(std::vector<double>{-0.1}))));
    CHECK_THROWS_AS(loss_eval(quad, rv({1, 1})), DimensionError);
}

TEST_CASE("conjugate_eval examples") {
    const auto box = LossSpec::box(rv({1, 2}), rv({4, 4}));
    CHECK(conjugate_eval(box, pv({3, -1})) == 3.0);
    CHECK(conjugate_eval(box, pv({0, 0})) == 0.0);
    const auto quad = LossSpec::quadratic(rv({1}), rv({3}));
    CHECK(conjugate_eval(quad, pv({1})) == Approx(1.5).margin(1e-12));
    CHECK(conjugate_eval(quad, pv({1})) == Approx(oracle::grid_conjugate(false, 1, 3, 1, 1e-4)).margin(1e-6));
    CHECK_THROWS_AS(conjugate_eval(quad, pv({1, 2})), DimensionError);
}

TEST_CASE("conjugate_argmax examples") {
    const auto box = LossSpec::box(rv({1, 2}), rv({4, 4}));
    CHECK(conjugate_argmax(box, pv({3, -1})) == rv({1, 0}));
    CHECK(conjugate_argmax(box, pv({0, 0})) == rv({1, 2}));
    // b* is among the grid maximizers at p = 0
    CHECK(oracle::grid_conjugate(true, 2, 4, 0.0, 1e-3) == 0.0);
    const auto quad = LossSpec::quadratic(rv({1}), rv({3}));
    CHECK(conjugate_argmax(quad, pv({5})) == rv({3}));
    CHECK(conjugate_eval(quad, pv({5})) == Approx(oracle::grid_conjugate(false, 1, 3, 5, 1e-4)).margin(1e-6));
}

TEST_CASE("invalid loss specs are rejected") {
    CHECK_THROWS_AS(LossSpec::box(rv({3}), rv({2})), InvalidArgument);
    CHECK_THROWS_AS(LossSpec::box(rv({1, 1}), rv({2})), DimensionError);
    CHECK_THROWS_AS(LossSpec::quadratic(rv({-1}), rv({2})), InvalidArgument);
    CHECK(LossSpec::box(rv({1}), rv({2})).strictly_interior_target());
    CHECK_FALSE(LossSpec::box(rv({2}), rv({2})).strictly_interior_target());
}

TEST_CASE("Fenchel-Young inequality with equality at the maximizer") {
    std::mt19937_64 gen(101);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 5000; ++k) {
        const std::size_t m = 1 + k % 3;
        const auto spec = random_spec(gen, m);
        PriceVector p(m);
        ResourceVector y(m);
        for (std::size_t i = 0; i < m; ++i) {
            p[i] = -2.0 + 6.0 * u(gen);
            y[i] = u(gen) * (spec.kind == LossKind::target_box ? spec.target[i] : spec.limit[i]);
        }
        const double c = conjugate_eval(spec, p);
        CHECK(vec::dot(p.span(), y.span()) <= loss_eval(spec, y) + c + 1e-12);
        const auto ys = conjugate_argmax(spec, p);
        CHECK(vec::dot(p.span(), ys.span()) - loss_eval(spec, ys) == Approx(c).margin(1e-12));
    }
}

TEST_CASE("conjugate is convex along random segments") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        const std::size_t m = 1 + k % 2;
        const auto spec = random_spec(gen, m);
        PriceVector p(m), q(m), mid(m);
        const double lambda = u(gen);
        for (std::size_t i = 0; i < m; ++i) {
            p[i] = -3.0 + 8.0 * u(gen);
            q[i] = -3.0 + 8.0 * u(gen);
            mid[i] = lambda * p[i] + (1.0 - lambda) * q[i];
        }
        CHECK(conjugate_eval(spec, mid) <=
              lambda * conjugate_eval(spec, p) + (1.0 - lambda) * conjugate_eval(spec, q) + 1e-9);
    }
}

TEST_CASE("supply response stays in [0, b]") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int k = 0; k < 2000; ++k) {
        const auto spec = random_spec(gen, 2);
        const auto y = conjugate_argmax(spec, pv({u(gen), u(gen)}));
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(y[i] >= 0.0);
            CHECK(y[i] <= spec.limit[i]);
        }
    }
}

TEST_CASE("closed form matches grid supremum on small instances") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-2.0, 4.0);
    for (int k = 0; k < 40; ++k) {
        const std::size_t m = 1 + k % 2;
        const auto spec = random_spec(gen, m);
        PriceVector p(m);
        double grid = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            p[i] = u(gen);
            grid += oracle::grid_conjugate(spec.kind == LossKind::target_box, spec.target[i], spec.limit[i], p[i],
                                           1e-4);
        }
        CHECK(std::abs(conjugate_eval(spec, p) - grid) <= 1e-3);
    }
}

TEST_CASE("interior regime of the quadratic loss") {
    const auto quad = LossSpec::quadratic(rv({2}), rv({10}));
    CHECK(price_in_interior_regime(quad, pv({3})));
    CHECK_FALSE(price_in_interior_regime(quad, pv({8})));
    CHECK_FALSE(price_in_interior_regime(quad, pv({0})));
    CHECK(conjugate_interior_modulus(quad) == 1.0);
    CHECK(conjugate_interior_modulus(LossSpec::box(rv({1}), rv({2}))) == 0.0);
    // second difference of the conjugate equals the modulus inside the regime
    const double h = 1e-3;
    const double second = (conjugate_eval(quad, pv({3 + h})) - 2 * conjugate_eval(quad, pv({3})) +
                           conjugate_eval(quad, pv({3 - h}))) / (h * h);
    CHECK(second == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("loss JSON round trip") {
    const auto spec = LossSpec::quadratic(rv({1, 2}), rv({3, 4}));
    const auto back = loss_from_json(nlohmann::json::parse(to_json(spec).dump()));
    CHECK(back.kind == spec.kind);
    CHECK(back.target == spec.target);
    CHECK(back.limit == spec.limit);
    CHECK_THROWS_AS(loss_from_json(nlohmann::json::parse(R"({"kind": "cubic", "target": [1], "limit": [2]})")),
                    InvalidArgument);
}
