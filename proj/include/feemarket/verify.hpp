#pragma once

// Self-check suites run by `feemarket verify`. Fixed seeds; each check yields
// one line of output.

#include <string>
#include <vector>

#include "feemarket/controllers.hpp"
#include "feemarket/evaluation.hpp"
#include "feemarket/losses.hpp"
#include "feemarket/rng.hpp"

namespace feemarket {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;

    [[nodiscard]] bool pass() const noexcept {
        for (const auto& c : checks) {
            if (!c.pass) return false;
        }
        return true;
    }
};

inline const std::vector<std::string>& verify_suite_names() {
    static const std::vector<std::string> names{"walk", "conjugates", "ftrl-equiv"};
    return names;
}

namespace detail {

inline std::string describe(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace detail

inline SuiteResult verify_walk(std::size_t samples = 100000, std::uint64_t seed = 12) {
    SuiteResult out{"walk", {}};
    {
        // all 16 sign sequences of length 4
        double total = 0.0;
        for (unsigned bits = 0; bits < 16; ++bits) total += std::abs(2.0 * std::popcount(bits) - 4.0);
        const double enumerated = total / 16.0;
        const double exact = exact_mean_abs_walk(4);
        out.checks.push_back({"T=4 exact E|X| = 1.5", enumerated == 1.5 && std::abs(exact - 1.5) < 1e-12,
                              "enumerated " + detail::describe(enumerated) + ", binomial " + detail::describe(exact)});
    }
    for (std::int64_t T : {std::int64_t{4}, std::int64_t{100}, std::int64_t{10000}}) {
        const auto r = walk_bound_verify(T, samples, seed);
        out.checks.push_back({"T=" + std::to_string(T) + " E|X| >= sqrt(T)/12", r.abs_pass,
                              "mean " + detail::describe(r.abs_sum.mean) + " se " +
                                  detail::describe(r.abs_sum.standard_error) + " threshold " +
                                  detail::describe(r.abs_threshold)});
        out.checks.push_back({"T=" + std::to_string(T) + " E[X+] >= sqrt(T)/24", r.positive_pass,
                              "mean " + detail::describe(r.positive_part.mean) + " se " +
                                  detail::describe(r.positive_part.standard_error) + " threshold " +
                                  detail::describe(r.positive_threshold)});
        if (T == 10000) {
            const bool ok = r.ratio_to_asymptotic >= 0.95 && r.ratio_to_asymptotic <= 1.05;
            out.checks.push_back({"T=10000 ratio to sqrt(2T/pi) in [0.95, 1.05]", ok,
                                  "ratio " + detail::describe(r.ratio_to_asymptotic)});
        }
    }
    return out;
}

namespace detail {

inline LossSpec random_loss(CounterRng& rng, std::size_t m) {
    std::vector<double> target(m);
    std::vector<double> limit(m);
    for (std::size_t i = 0; i < m; ++i) {
        limit[i] = rng.uniform(0.5, 3.0);
        target[i] = rng.uniform(0.05, 0.95) * limit[i];
    }
    const auto kind = rng.bernoulli(0.5) ? LossKind::target_box : LossKind::quadratic_overage;
    return LossSpec::make(kind, ResourceVector(target), ResourceVector(limit));
}

// sup over a grid of y in [0, limit_i] of p_i y - loss_i(y), summed over i
inline double grid_conjugate(const LossSpec& spec, const PriceVector& p, double resolution) {
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const LossSpec one = LossSpec::make(spec.kind, ResourceVector{std::vector<double>{spec.target[i]}},
                                            ResourceVector{std::vector<double>{spec.limit[i]}});
        const auto steps = static_cast<std::size_t>(std::ceil(spec.limit[i] / resolution));
        double best = -infinity;
        for (std::size_t k = 0; k <= steps; ++k) {
            const double y = std::min(static_cast<double>(k) * resolution, spec.limit[i]);
            const double l = loss_eval(one, ResourceVector{std::vector<double>{y}});
            if (std::isinf(l)) continue;
            best = std::max(best, p[i] * y - l);
        }
        total += best;
    }
    return total;
}

}  // namespace detail

inline SuiteResult verify_conjugates(std::uint64_t seed = 7) {
    SuiteResult out{"conjugates", {}};
    CounterRng rng(seed, {1});
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform_int(0, 1));
        const auto spec = detail::random_loss(rng, m);
        PriceVector p(m);
        for (double& v : p) v = rng.uniform(-2.0, 4.0);
        worst = std::max(worst, std::abs(conjugate_eval(spec, p) - detail::grid_conjugate(spec, p, 1e-4)));
    }
    out.checks.push_back({"closed form vs grid supremum", worst <= 1e-3, "max error " + detail::describe(worst)});

    std::size_t violations = 0;
    double equality_error = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform_int(0, 1));
        const auto spec = detail::random_loss(rng, m);
        PriceVector p(m);
        ResourceVector y(m);
        for (std::size_t i = 0; i < m; ++i) {
            p[i] = rng.uniform(-2.0, 4.0);
            const double hi = spec.kind == LossKind::target_box ? spec.target[i] : spec.limit[i];
            y[i] = rng.uniform(0.0, hi);
        }
        const double conj = conjugate_eval(spec, p);
        if (vec::dot(p.span(), y.span()) > loss_eval(spec, y) + conj + 1e-12) ++violations;
        const auto ystar = conjugate_argmax(spec, p);
        equality_error = std::max(equality_error,
                                  std::abs(vec::dot(p.span(), ystar.span()) - loss_eval(spec, ystar) - conj));
    }
    out.checks.push_back({"Fenchel-Young inequality on 10^4 triples", violations == 0,
                          std::to_string(violations) + " violations"});
    out.checks.push_back({"Fenchel-Young equality at the maximizer", equality_error <= 1e-12,
                          "max error " + detail::describe(equality_error)});
    return out;
}

inline SuiteResult verify_ftrl_equivalence(std::uint64_t seed = 3) {
    SuiteResult out{"ftrl-equiv", {}};
    CounterRng rng(seed, {2});
    double worst_norm = 0.0;
    double worst_exp = 0.0;
    std::size_t omd_mismatch = 0;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform_int(0, 2));
        const double eta = rng.uniform(0.001, 0.05);
        ChoiceFunction norm{ChoiceKind::norm_squared, PriceVector(m), 0.0};
        ChoiceFunction expo{ChoiceKind::exponential, PriceVector(m), 0.0};
        for (std::size_t i = 0; i < m; ++i) {
            // start far enough from zero that the projection stays inactive
            norm.p0[i] = rng.uniform(20.0, 30.0);
            expo.p0[i] = rng.uniform(0.1, 2.0);
        }
        const StepSchedule fixed{ScheduleKind::fixed, eta};
        auto sn = initial_state(norm, fixed);
        auto se = initial_state(expo, fixed);
        std::vector<double> sum(m, 0.0);
        PriceVector incremental_norm = norm.p0;
        for (int t = 0; t < 100; ++t) {
            GradientVector g(m);
            for (double& v : g) v = rng.uniform(-1.0, 1.0);
            for (std::size_t i = 0; i < m; ++i) {
                sum[i] += g[i];
                incremental_norm[i] = std::max(incremental_norm[i] - eta * g[i], 0.0);
            }
            const auto omd = omd_step(se.price, g, eta);
            sn = step(norm, std::move(sn), g).state;
            se = step(expo, std::move(se), g).state;
            if (!(omd == se.price)) ++omd_mismatch;
        }
        const auto ftrl_n = ftrl_price(norm, sum, eta);
        const auto ftrl_e = ftrl_price(expo, sum, eta);
        for (std::size_t i = 0; i < m; ++i) {
            worst_norm = std::max(worst_norm, std::abs(sn.price[i] - incremental_norm[i]) / std::abs(ftrl_n[i]));
            worst_norm = std::max(worst_norm, std::abs(sn.price[i] - ftrl_n[i]) / std::abs(ftrl_n[i]));
            worst_exp = std::max(worst_exp, std::abs(se.price[i] - ftrl_e[i]) / std::abs(ftrl_e[i]));
        }
    }
    out.checks.push_back({"gradient rule: incremental vs closed form", worst_norm <= 1e-10,
                          "max relative error " + detail::describe(worst_norm)});
    out.checks.push_back({"multiplicative rule: incremental vs closed form", worst_exp <= 1e-10,
                          "max relative error " + detail::describe(worst_exp)});
    out.checks.push_back({"mirror-descent step equals multiplicative step", omd_mismatch == 0,
                          std::to_string(omd_mismatch) + " mismatches"});
    return out;
}

inline SuiteResult run_verify_suite(const std::string& name) {
    if (name == "walk") return verify_walk();
    if (name == "conjugates") return verify_conjugates();
    if (name == "ftrl-equiv") return verify_ftrl_equivalence();
    throw InvalidArgument("unknown verify suite \"" + name + "\"");
}

}  // namespace feemarket
