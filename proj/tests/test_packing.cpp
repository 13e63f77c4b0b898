#include <catch_amalgamated.hpp>

#include <random>

#include "feemarket/packing.hpp"
#include "oracles.hpp"

using namespace feemarket;

namespace {

BlockInstance two_tx(double q0, double q1, double a0, double a1, double b) {
    BlockInstance inst;
    inst.welfare = {q0, q1};
    inst.consumption = {{a0, a1}};
    inst.limit = ResourceVector(std::vector<double>{b});
    return inst;
}

PriceVector price(std::vector<double> p) { return PriceVector(std::move(p)); }

std::vector<std::uint8_t> bits(std::initializer_list<int> v) {
    std::vector<std::uint8_t> out;
    for (int x : v) out.push_back(static_cast<std::uint8_t>(x));
    return out;
}

}  // namespace

TEST_CASE("solve_exact examples") {
    const auto inst = two_tx(3, 2, 2, 1, 2);
    auto s = solve_exact(inst, price({0.5}));
    CHECK(s.chosen == bits({1, 0}));
    CHECK(s.objective == 2.0);
    s = solve_exact(inst, price({10}));
    CHECK(s.chosen == bits({0, 0}));
    CHECK(s.objective == 0.0);

    auto ex = two_tx(5, 5, 1, 1, 2);
    ex.exclusions = {{0, 1}};
    s = solve_exact(ex, price({0}));
    CHECK(s.chosen == bits({1, 0}));
    CHECK(s.objective == 5.0);
}

TEST_CASE("solve_exact errors") {
    BlockInstance big;
    big.limit = ResourceVector(std::vector<double>{1.0});
    big.welfare.assign(30, 1.0);
    big.consumption = {std::vector<double>(30, 0.01)};
    CHECK_THROWS_AS(solve_exact(big, price({0.1})), PackingTooLarge);
    CHECK_NOTHROW(solve_exact(big, price({0.1}), 30));
    auto bad = two_tx(1, 1, 3, 1, 2);
    CHECK_THROWS_AS(solve_exact(bad, price({0})), InvalidArgument);
    CHECK_THROWS_AS(solve_exact(two_tx(1, 1, 1, 1, 2), price({0, 0})), DimensionError);
}

TEST_CASE("solve_greedy examples") {
    BlockInstance one;
    one.welfare = {2};
    one.consumption = {{1}};
    one.limit = ResourceVector(std::vector<double>{2});
    CHECK(solve_greedy(one, price({1})).chosen == bits({1}));
    CHECK(solve_greedy(two_tx(3, 2, 2, 1, 2), price({0.5})).chosen == bits({1, 0}));
    const auto s = solve_greedy(two_tx(3, 2, 2, 1, 2), price({10}));
    CHECK(s.chosen == bits({0, 0}));
    CHECK(s.objective == 0.0);
}

TEST_CASE("solve_exact agrees with enumeration on random instances") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.5);
    for (int k = 0; k < 300; ++k) {
        const std::size_t m = 1 + k % 3;
        const std::size_t n = k % 13;
        const bool integral = k % 2 == 0;
        const auto inst = oracle::random_instance(gen, m, n, 0.15, integral);
        std::vector<double> p(m);
        for (auto& v : p) v = integral ? std::floor(3 * u(gen)) : u(gen);
        const auto exact = solve_exact(inst, PriceVector(p));
        const auto ref = oracle::enumerate_packing(inst, p);
        INFO("instance " << to_json(inst).dump());
        CHECK(exact.objective == Catch::Approx(ref.objective).margin(1e-9));
        CHECK(exact.chosen == ref.chosen);
        CHECK(is_feasible_selection(inst, exact.chosen));
        const auto recomputed = evaluate_selection(inst, PriceVector(p), exact.chosen);
        CHECK(recomputed.objective == Catch::Approx(exact.objective).margin(1e-12));
    }
}

TEST_CASE("greedy is feasible and never beats exact") {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> u(0.0, 1.5);
    for (int k = 0; k < 300; ++k) {
        const std::size_t m = 1 + k % 3;
        const auto inst = oracle::random_instance(gen, m, k % 12, 0.2);
        std::vector<double> p(m);
        for (auto& v : p) v = u(gen);
        const auto g = solve_greedy(inst, PriceVector(p));
        const auto e = solve_exact(inst, PriceVector(p));
        CHECK(is_feasible_selection(inst, g.chosen));
        CHECK(g.objective <= e.objective + 1e-12);
        CHECK(g.objective >= 0.0);
    }
}

TEST_CASE("packing value is convex and nonincreasing in price") {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int k = 0; k < 300; ++k) {
        const std::size_t m = 1 + k % 2;
        const auto inst = oracle::random_instance(gen, m, 1 + k % 8, 0.1);
        std::vector<double> p(m), q(m), mid(m);
        const double lambda = u(gen) / 2.0;
        for (std::size_t i = 0; i < m; ++i) {
            p[i] = u(gen);
            q[i] = u(gen);
            mid[i] = lambda * p[i] + (1 - lambda) * q[i];
        }
        const double hp = solve_exact(inst, PriceVector(p)).objective;
        const double hq = solve_exact(inst, PriceVector(q)).objective;
        CHECK(solve_exact(inst, PriceVector(mid)).objective <= lambda * hp + (1 - lambda) * hq + 1e-9);
        auto raised = p;
        raised[k % m] += u(gen);
        CHECK(solve_exact(inst, PriceVector(raised)).objective <= hp + 1e-12);
    }
}

TEST_CASE("usage stays within the limit") {
    std::mt19937_64 gen(31);
    for (int k = 0; k < 200; ++k) {
        const std::size_t m = 1 + k % 3;
        const auto inst = oracle::random_instance(gen, m, k % 10, 0.1);
        const auto s = solve_exact(inst, PriceVector(m, 0.0));
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(s.usage[i] >= 0.0);
            CHECK(s.usage[i] <= inst.limit[i]);
        }
    }
}

TEST_CASE("zero-profit transactions are included under the lowest-index preference") {
    auto inst = two_tx(0, 0, 1, 1, 2);
    CHECK(solve_exact(inst, price({0})).chosen == bits({1, 1}));
    inst.limit = ResourceVector(std::vector<double>{1});
    CHECK(solve_exact(inst, price({0})).chosen == bits({1, 0}));
}

TEST_CASE("envelope matches the exact packer at nonnegative prices") {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int k = 0; k < 200; ++k) {
        const std::size_t m = 1 + k % 3;
        const auto inst = oracle::random_instance(gen, m, k % 9, 0.2);
        const auto env = PackingEnvelope::build(inst);
        REQUIRE(env.has_value());
        for (int r = 0; r < 5; ++r) {
            std::vector<double> p(m);
            for (auto& v : p) v = u(gen);
            CHECK(env->value(p) == Catch::Approx(solve_exact(inst, PriceVector(p)).objective).margin(1e-12));
        }
    }
}
