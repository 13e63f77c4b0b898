#pragma once

// Dual-function evaluation, the offline oracle price minimizing the summed
// dual over a price box, regret and bound reports, and the Monte Carlo
// checks of the random-walk constant.

#include <algorithm>
#include <bit>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "feemarket/controllers.hpp"
#include "feemarket/core.hpp"
#include "feemarket/losses.hpp"
#include "feemarket/packing.hpp"
#include "feemarket/rng.hpp"

namespace feemarket {

/// f_t(p) = loss*(p) + h_t(p).
inline double dual_value(const LossSpec& loss, const BlockInstance& inst, const PriceVector& p,
                         std::size_t exact_threshold = default_exact_threshold) {
    require_same_dimension(loss.resources(), inst.resources(), "dual_value");
    return conjugate_eval(loss, p) + solve_exact(inst, p, exact_threshold).objective;
}

/// y*(p) - A x*(p), a subgradient of f_t at p.
inline GradientVector subgradient(const LossSpec& loss, const BlockInstance& inst, const PriceVector& p,
                                  std::size_t exact_threshold = default_exact_threshold) {
    require_same_dimension(loss.resources(), inst.resources(), "subgradient");
    const auto supply = conjugate_argmax(loss, p);
    const auto packing = solve_exact(inst, p, exact_threshold);
    GradientVector g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) g[i] = supply[i] - packing.usage[i];
    return g;
}

/// One block's dual function in one of two accountings:
///  - market:    loss*(p) + h_t(p), the packing re-solved at every price;
///  - committed: loss*(p) + sum_j x_j (w_j - a_j'p) with the packing x frozen
///    and welfare w taken from `accounted_welfare`. This is the accounting of
///    the lower-bound construction, where the adversary's transaction is
///    included at every price.
class DualTerm {
public:
    static DualTerm market(LossSpec loss, BlockInstance inst,
                           std::size_t exact_threshold = default_exact_threshold) {
        require_same_dimension(loss.resources(), inst.resources(), "dual term");
        DualTerm d;
        d.envelope_ = PackingEnvelope::build(inst);
        if (!d.envelope_) {
            require_valid(inst);
            if (inst.transactions() > exact_threshold) {
                throw PackingTooLarge("block too large for exact dual evaluation");
            }
        }
        d.loss_ = std::move(loss);
        d.inst_ = std::move(inst);
        d.exact_threshold_ = exact_threshold;
        return d;
    }

    static DualTerm committed(LossSpec loss, BlockInstance inst, std::vector<std::uint8_t> chosen,
                              std::vector<double> accounted_welfare) {
        require_same_dimension(loss.resources(), inst.resources(), "dual term");
        require_same_dimension(inst.transactions(), chosen.size(), "committed packing");
        require_same_dimension(inst.transactions(), accounted_welfare.size(), "accounted welfare");
        DualTerm d;
        d.committed_ = true;
        d.usage_ = std::vector<double>(inst.resources(), 0.0);
        for (std::size_t j = 0; j < chosen.size(); ++j) {
            if (!chosen[j]) continue;
            d.welfare_ += accounted_welfare[j];
            for (std::size_t i = 0; i < inst.resources(); ++i) d.usage_[i] += inst.consumption[i][j];
        }
        d.loss_ = std::move(loss);
        d.inst_ = std::move(inst);
        return d;
    }

    [[nodiscard]] std::size_t resources() const noexcept { return loss_.resources(); }
    [[nodiscard]] bool is_committed() const noexcept { return committed_; }
    [[nodiscard]] const LossSpec& loss() const noexcept { return loss_; }
    [[nodiscard]] const BlockInstance& instance() const noexcept { return inst_; }

    /// Value at p; the subgradient is written to `grad` when it is non-empty.
    double evaluate(std::span<const double> p, std::span<double> grad = {}) const {
        const std::size_t m = resources();
        require_same_dimension(m, p.size(), "dual term price");
        double value = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            value += detail::coordinate_conjugate(loss_.kind, loss_.target[i], loss_.limit[i], p[i]);
        }
        if (committed_) {
            value += welfare_ - vec::dot(usage_, p);
            if (!grad.empty()) std::copy(usage_.begin(), usage_.end(), grad.begin());
        } else if (envelope_ && vec::all_nonnegative(p)) {
            value += envelope_->evaluate(p, grad);
        } else {
            auto sol = solve_exact(inst_, PriceVector(std::vector<double>(p.begin(), p.end())), exact_threshold_);
            value += sol.objective;
            if (!grad.empty()) std::copy(sol.usage.begin(), sol.usage.end(), grad.begin());
        }
        // grad holds the usage here; turn it into supply minus usage
        for (std::size_t i = 0; i < grad.size(); ++i) {
            grad[i] = detail::coordinate_argmax(loss_.kind, loss_.target[i], loss_.limit[i], p[i]) - grad[i];
        }
        return value;
    }

    double value(const PriceVector& p) const { return evaluate(p.span()); }

private:
    LossSpec loss_;
    BlockInstance inst_;
    bool committed_ = false;
    std::optional<PackingEnvelope> envelope_;
    std::size_t exact_threshold_ = default_exact_threshold;
    double welfare_ = 0.0;
    std::vector<double> usage_;
};

template <typename T>
concept DualFunction = requires(const T& f, std::span<const double> p, std::span<double> g) {
    { f.evaluate(p, g) } -> std::convertible_to<double>;
    { f.resources() } -> std::convertible_to<std::size_t>;
};

/// A dual term repeated `weight` times; lets duplicate blocks share one term.
template <DualFunction Term>
class WeightedTerm {
public:
    WeightedTerm(Term term, double weight) : term_(std::move(term)), weight_(weight) {}
    [[nodiscard]] std::size_t resources() const noexcept { return term_.resources(); }
    [[nodiscard]] bool is_committed() const noexcept { return term_.is_committed(); }
    [[nodiscard]] double weight() const noexcept { return weight_; }
    double evaluate(std::span<const double> p, std::span<double> grad = {}) const {
        const double v = term_.evaluate(p, grad);
        for (double& g : grad) g *= weight_;
        return weight_ * v;
    }

private:
    Term term_;
    double weight_;
};

/// Sum of the dual terms and, if requested, of their subgradients.
template <DualFunction Term>
double aggregate_dual(std::span<const Term> terms, std::span<const double> p, std::span<double> grad = {}) {
    std::vector<double> g(p.size());
    if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
    double total = 0.0;
    for (const auto& term : terms) {
        total += term.evaluate(p, grad.empty() ? std::span<double>{} : std::span<double>(g));
        if (!grad.empty()) {
            for (std::size_t i = 0; i < p.size(); ++i) grad[i] += g[i];
        }
    }
    return total;
}

// Oracle -----------------------------------------------------------------------

struct OracleOptions {
    std::size_t subgradient_iterations = 200;
    /// Pattern search stops once the mesh is below this fraction of M.
    double mesh_tolerance = 1e-9;
    std::size_t random_directions = 8;
    std::uint64_t seed = 0x0dac1e;
    /// Extra starting points, clamped into the box and evaluated first.
    std::vector<PriceVector> candidates;
};

struct OracleResult {
    PriceVector price;
    double value = 0.0;
    std::size_t evaluations = 0;
};

/// Minimizes sum_t f_t(p) over the box [0, M]^m: projected subgradient descent
/// with averaging locates the basin, then a pattern search over the
/// {-1, 0, 1}^m directions (plus random ones when the mesh shrinks) refines it.
/// Deterministic given its inputs.
template <DualFunction Term>
OracleResult oracle_price(std::span<const Term> terms, double M, std::size_t m,
                          const OracleOptions& options = {}) {
    if (!(M > 0.0) || !std::isfinite(M)) throw InvalidArgument("oracle box bound must be positive");
    for (const auto& t : terms) require_same_dimension(m, t.resources(), "oracle term");
    OracleResult result;
    result.price = PriceVector(m, 0.0);
    if (terms.empty() || m == 0) return result;

    auto clamp_box = [&](std::vector<double>& p) {
        for (double& v : p) v = std::clamp(v, 0.0, M);
    };
    auto eval = [&](const std::vector<double>& p, std::span<double> g = {}) {
        ++result.evaluations;
        return aggregate_dual(terms, std::span<const double>(p), g);
    };

    std::vector<double> p(m, 0.5 * M);
    std::vector<double> grad(m);
    std::vector<double> best = p;
    double best_value = eval(p, grad);
    std::vector<double> average(m, 0.0);
    const double diameter = M * std::sqrt(static_cast<double>(m));
    for (std::size_t k = 0; k < options.subgradient_iterations; ++k) {
        const double value = k == 0 ? best_value : eval(p, grad);
        if (value < best_value) {
            best_value = value;
            best = p;
        }
        const double norm = vec::norm2(grad);
        if (norm == 0.0) break;
        const double step = diameter / (2.0 * std::sqrt(static_cast<double>(k + 1)));
        for (std::size_t i = 0; i < m; ++i) p[i] -= step * grad[i] / norm;
        clamp_box(p);
        for (std::size_t i = 0; i < m; ++i) average[i] += (p[i] - average[i]) / static_cast<double>(k + 1);
    }
    if (options.subgradient_iterations > 0) {
        const double avg_value = eval(average);
        if (avg_value < best_value) {
            best_value = avg_value;
            best = average;
        }
    }

    for (const auto& c : options.candidates) {
        require_same_dimension(m, c.size(), "oracle candidate");
        std::vector<double> q(c.begin(), c.end());
        clamp_box(q);
        const double v = eval(q);
        if (v < best_value) {
            best_value = v;
            best = q;
        }
    }

    std::vector<std::vector<double>> directions;
    {
        std::size_t count = 1;
        for (std::size_t i = 0; i < m; ++i) count *= 3;
        for (std::size_t code = 0; code < count; ++code) {
            std::vector<double> d(m);
            std::size_t c = code;
            bool zero = true;
            for (std::size_t i = 0; i < m; ++i) {
                d[i] = static_cast<double>(c % 3) - 1.0;
                zero = zero && d[i] == 0.0;
                c /= 3;
            }
            if (!zero) directions.push_back(std::move(d));
        }
    }

    CounterRng rng(options.seed, {m, terms.size()});
    double mesh = 0.25 * M;
    const double min_mesh = options.mesh_tolerance * M;
    std::vector<double> trial(m);
    auto poll = [&](const std::vector<double>& d) {
        for (std::size_t i = 0; i < m; ++i) trial[i] = best[i] + mesh * d[i];
        clamp_box(trial);
        if (trial == best) return false;
        const double v = eval(trial);
        if (v < best_value) {
            best_value = v;
            best = trial;
            return true;
        }
        return false;
    };
    while (mesh >= min_mesh) {
        bool improved = false;
        for (const auto& d : directions) {
            if (poll(d)) {
                improved = true;
                break;
            }
        }
        if (!improved && m > 1) {
            for (std::size_t r = 0; r < options.random_directions && !improved; ++r) {
                std::vector<double> d(m);
                for (double& v : d) v = rng.uniform(-1.0, 1.0);
                improved = poll(d);
            }
        }
        if (!improved) mesh *= 0.5;
    }
    result.price = PriceVector(best);
    result.value = best_value;
    return result;
}

template <DualFunction Term>
OracleResult oracle_price(const std::vector<Term>& terms, double M, const OracleOptions& options = {}) {
    const std::size_t m = terms.empty() ? 0 : terms.front().resources();
    return oracle_price(std::span<const Term>(terms), M, m, options);
}

/// Convenience overload over raw blocks with a shared loss.
inline OracleResult oracle_price(const LossSpec& loss, const std::vector<BlockInstance>& blocks, double M,
                                 const OracleOptions& options = {}) {
    std::vector<DualTerm> terms;
    terms.reserve(blocks.size());
    for (const auto& b : blocks) terms.push_back(DualTerm::market(loss, b));
    return oracle_price(std::span<const DualTerm>(terms), M, loss.resources(), options);
}

/// Minimizer over [0, M]^m of the linear objective sum_t g_t'p: M on every
/// coordinate whose gradient sum is <= 0, else 0.
inline PriceVector linear_oracle_price(const GradientVector& gradient_sum, double M) {
    PriceVector p(gradient_sum.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = gradient_sum[i] <= 0.0 ? M : 0.0;
    return p;
}

// Bounds -------------------------------------------------------------------------

/// Which guarantee applies to a controller configuration.
struct BoundContext {
    ChoiceKind kind = ChoiceKind::norm_squared;
    ScheduleKind schedule = ScheduleKind::fixed;
    double B = 1.0;     // |b|_2
    double M = 1.0;     // side of the price box
    double eps = 1.0;   // lower bound on p0 for exponential rules
    std::size_t m = 1;
    double mu = 1.0;    // strong convexity for inverse_t
    double slack = 1.5; // multiplier applied to the logarithmic bound
};

/// Radius of the price box in the norm the bound uses: the gradient rule's
/// guarantee needs |p*|_2 <= M, which the box [0, M]^m only gives for
/// sqrt(m) * M; the multiplicative rule is stated in the infinity norm.
inline double effective_price_bound(ChoiceKind kind, double M, std::size_t m) {
    return kind == ChoiceKind::norm_squared ? M * std::sqrt(static_cast<double>(m)) : M;
}

inline std::string price_bound_norm(ChoiceKind kind) {
    return kind == ChoiceKind::norm_squared ? "l2 (sqrt(m) * box side)" : "linf (box side)";
}

/// Bound on the average regret R / T; NaN when no guarantee applies.
inline double average_regret_bound(const BoundContext& c, std::int64_t T) {
    const double t = static_cast<double>(T);
    const double Me = effective_price_bound(c.kind, c.M, c.m);
    switch (c.schedule) {
        case ScheduleKind::fixed:
            if (c.kind == ChoiceKind::norm_squared) return c.B * Me / std::sqrt(t);
            return c.B * c.M * std::sqrt(static_cast<double>(c.m) * std::log(c.M / c.eps) / (2.0 * t));
        case ScheduleKind::inverse_sqrt:
            if (c.kind == ChoiceKind::norm_squared) return std::sqrt(2.0) * c.B * Me / std::sqrt(t);
            return std::numeric_limits<double>::quiet_NaN();
        case ScheduleKind::inverse_t:
            if (c.kind == ChoiceKind::norm_squared) return c.slack * c.B * c.B * std::log(t) / (c.mu * t);
            return std::numeric_limits<double>::quiet_NaN();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Regret ---------------------------------------------------------------------------

struct RegretReport {
    std::int64_t horizon = 0;
    double algo_total = 0.0;
    PriceVector oracle_price;
    double oracle_total = 0.0;
    double regret = 0.0;
    double avg_regret = 0.0;
    /// sum_t g_t'(p_t - p*), an upper bound on the regret.
    double linearized_regret = 0.0;
    double bound_value = 0.0;  // bound on avg_regret
    bool within_bound = false;
    double B = 0.0;
    double M = 0.0;
    double M_effective = 0.0;
    std::size_t m = 0;
    double eps = 0.0;
    std::string price_norm;
    std::string accounting = "market";
    std::size_t domain_exits = 0;
    std::size_t oracle_evaluations = 0;
    /// Regret under the other accounting of the lower-bound construction
    /// (packing re-solved at every price), when it applies.
    std::optional<double> alternative_regret;
};

/// Regret of a price path against the oracle price; `prices[t]` and
/// `gradients[t]` are the posted price and observed gradient of block t.
template <DualFunction Term>
RegretReport regret_report(std::span<const Term> terms, std::span<const PriceVector> prices,
                           std::span<const GradientVector> gradients, const BoundContext& bound,
                           std::optional<PriceVector> oracle = std::nullopt, const OracleOptions& options = {}) {
    if (terms.size() != prices.size() || terms.size() != gradients.size()) {
        throw InvalidArgument("trace and block sequence lengths differ");
    }
    if (terms.empty()) throw InvalidArgument("regret needs at least one block");
    const std::size_t m = terms.front().resources();
    RegretReport r;
    r.horizon = static_cast<std::int64_t>(terms.size());
    r.B = bound.B;
    r.M = bound.M;
    r.M_effective = effective_price_bound(bound.kind, bound.M, m);
    r.m = m;
    r.eps = bound.eps;
    r.price_norm = price_bound_norm(bound.kind);
    r.accounting = terms.front().is_committed() ? "committed" : "market";

    if (oracle) {
        r.oracle_price = *oracle;
        r.oracle_total = aggregate_dual(terms, r.oracle_price.span());
    } else {
        auto o = oracle_price(terms, bound.M, m, options);
        r.oracle_price = o.price;
        r.oracle_total = o.value;
        r.oracle_evaluations = o.evaluations;
    }
    for (std::size_t t = 0; t < terms.size(); ++t) {
        r.algo_total += terms[t].evaluate(prices[t].span());
        for (std::size_t i = 0; i < m; ++i) {
            r.linearized_regret += gradients[t][i] * (prices[t][i] - r.oracle_price[i]);
        }
    }
    r.regret = r.algo_total - r.oracle_total;
    r.avg_regret = r.regret / static_cast<double>(r.horizon);
    r.bound_value = average_regret_bound(bound, r.horizon);
    r.within_bound = std::isnan(r.bound_value) ? false : r.avg_regret <= r.bound_value;
    return r;
}

template <DualFunction Term>
RegretReport regret_report(const std::vector<Term>& terms, const std::vector<PriceVector>& prices,
                           const std::vector<GradientVector>& gradients, const BoundContext& bound,
                           std::optional<PriceVector> oracle = std::nullopt, const OracleOptions& options = {}) {
    return regret_report(std::span<const Term>(terms), std::span<const PriceVector>(prices),
                         std::span<const GradientVector>(gradients), bound, std::move(oracle), options);
}

inline nlohmann::json to_json(const RegretReport& r) {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    return {{"horizon", r.horizon},
            {"algo_total", r.algo_total},
            {"oracle_price", r.oracle_price.values()},
            {"oracle_total", r.oracle_total},
            {"regret", r.regret},
            {"avg_regret", r.avg_regret},
            {"linearized_regret", r.linearized_regret},
            {"bound_value", num(r.bound_value)},
            {"within_bound", r.within_bound},
            {"B", r.B},
            {"M", r.M},
            {"M_effective", r.M_effective},
            {"m", r.m},
            {"eps", r.eps},
            {"price_norm", r.price_norm},
            {"accounting", r.accounting},
            {"domain_exits", r.domain_exits},
            {"alternative_regret", r.alternative_regret ? nlohmann::json(*r.alternative_regret) : nlohmann::json(nullptr)}};
}

// Market clearing --------------------------------------------------------------------

/// sum_t (y_t*(p) - A_t x_t*(p)); zero when supply matches demand on aggregate.
inline GradientVector market_clearing_gap(const LossSpec& loss, const std::vector<BlockInstance>& blocks,
                                          const PriceVector& p) {
    GradientVector gap(p.size());
    for (const auto& b : blocks) {
        const auto g = subgradient(loss, b, p);
        for (std::size_t i = 0; i < p.size(); ++i) gap[i] += g[i];
    }
    return gap;
}

// Statistics ---------------------------------------------------------------------------

struct MeanEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t count = 0;
};

inline MeanEstimate estimate_mean(std::span<const double> xs) {
    MeanEstimate e;
    e.count = xs.size();
    if (xs.empty()) return e;
    // Welford
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t k = 0;
    for (double x : xs) {
        ++k;
        const double d = x - mean;
        mean += d / static_cast<double>(k);
        m2 += d * (x - mean);
    }
    e.mean = mean;
    if (k > 1) e.standard_error = std::sqrt(m2 / static_cast<double>(k - 1) / static_cast<double>(k));
    return e;
}

/// Runs fn(0..count-1) on up to `workers` threads; results keep index order.
template <typename Fn>
auto parallel_map(std::size_t count, std::size_t workers, Fn&& fn) {
    using R = std::invoke_result_t<Fn&, std::size_t>;
    std::vector<R> out(count);
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t k = 0; k < count; ++k) out[k] = fn(k);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t k = w; k < count; k += workers) out[k] = fn(k);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

// Random walk ------------------------------------------------------------------------------

/// E|X| for X a sum of T independent fair signs, from the binomial law.
inline double exact_mean_abs_walk(std::int64_t T) {
    if (T < 1) throw InvalidArgument("walk length must be >= 1");
    const double n = static_cast<double>(T);
    double total = 0.0;
    for (std::int64_t k = 0; k <= T; ++k) {
        const double log_p = std::lgamma(n + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                             std::lgamma(static_cast<double>(T - k) + 1.0) - n * std::numbers::ln2;
        total += std::exp(log_p) * std::abs(2.0 * static_cast<double>(k) - n);
    }
    return total;
}

struct WalkReport {
    std::int64_t T = 0;
    std::size_t samples = 0;
    MeanEstimate abs_sum;
    MeanEstimate positive_part;
    double abs_threshold = 0.0;       // sqrt(T) / 12
    double positive_threshold = 0.0;  // sqrt(T) / 24
    bool abs_pass = false;
    bool positive_pass = false;
    double exact_abs = 0.0;
    double ratio_to_asymptotic = 0.0;  // estimate / sqrt(2T / pi)

    [[nodiscard]] bool pass() const noexcept { return abs_pass && positive_pass; }
};

/// Draws one walk of length T and returns its endpoint.
inline std::int64_t sample_walk(CounterRng& rng, std::int64_t T) {
    std::int64_t ones = 0;
    std::int64_t remaining = T;
    while (remaining >= 64) {
        ones += std::popcount(rng());
        remaining -= 64;
    }
    if (remaining > 0) ones += std::popcount(rng() >> (64 - remaining));
    return 2 * ones - T;
}

/// Monte Carlo estimates of E|X| and E[(X)_+], checked against sqrt(T)/12 and
/// sqrt(T)/24 at three standard errors.
inline WalkReport walk_bound_verify(std::int64_t T, std::size_t samples, std::uint64_t seed) {
    if (T < 1 || samples < 1) throw InvalidArgument("walk length and sample count must be >= 1");
    WalkReport r;
    r.T = T;
    r.samples = samples;
    std::vector<double> abs_values(samples);
    std::vector<double> pos_values(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        CounterRng rng(seed, {static_cast<std::uint64_t>(T), s});
        const auto x = static_cast<double>(sample_walk(rng, T));
        abs_values[s] = std::abs(x);
        pos_values[s] = std::max(x, 0.0);
    }
    r.abs_sum = estimate_mean(abs_values);
    r.positive_part = estimate_mean(pos_values);
    const double root = std::sqrt(static_cast<double>(T));
    r.abs_threshold = root / 12.0;
    r.positive_threshold = root / 24.0;
    r.abs_pass = r.abs_sum.mean - 3.0 * r.abs_sum.standard_error >= r.abs_threshold;
    r.positive_pass = r.positive_part.mean - 3.0 * r.positive_part.standard_error >= r.positive_threshold;
    r.exact_abs = exact_mean_abs_walk(T);
    r.ratio_to_asymptotic = r.abs_sum.mean / std::sqrt(2.0 * static_cast<double>(T) / std::numbers::pi);
    return r;
}

inline nlohmann::json to_json(const WalkReport& r) {
    return {{"T", r.T},
            {"samples", r.samples},
            {"mean_abs", r.abs_sum.mean},
            {"se_abs", r.abs_sum.standard_error},
            {"mean_positive", r.positive_part.mean},
            {"se_positive", r.positive_part.standard_error},
            {"abs_threshold", r.abs_threshold},
            {"positive_threshold", r.positive_threshold},
            {"abs_pass", r.abs_pass},
            {"positive_pass", r.positive_pass},
            {"exact_abs", r.exact_abs},
            {"ratio_to_sqrt_2T_over_pi", r.ratio_to_asymptotic}};
}

}  // namespace feemarket
