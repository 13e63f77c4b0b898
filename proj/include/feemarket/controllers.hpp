#pragma once

// Price-update rules written as choice functions: the next price is the
// gradient of a smooth convex F at minus the step-scaled gradient sum.
//
//   norm_squared         F(z) = 1/2 |(p0 + z)_+|^2     grad F(z) = (p0 + z)_+
//   exponential          F(z) = sum p0_i exp(z_i)      grad F(z) = p0 o exp(z)
//   exponential_clipped  exponential until p0_i exp(z_i) reaches M, then
//                        continued linearly with slope M, so the price caps at M
//
// The norm_squared form includes the projection onto nonnegative prices, which
// keeps it a single smooth choice function (sigma = 1).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include "feemarket/core.hpp"

namespace feemarket {

enum class ChoiceKind { norm_squared, exponential, exponential_clipped };

struct ChoiceFunction {
    ChoiceKind kind = ChoiceKind::norm_squared;
    PriceVector p0;
    /// Price cap M; used by exponential_clipped only.
    double price_cap = 0.0;

    [[nodiscard]] std::size_t resources() const noexcept { return p0.size(); }
    [[nodiscard]] bool is_exponential() const noexcept { return kind != ChoiceKind::norm_squared; }

    void validate() const {
        if (p0.empty()) throw InvalidArgument("choice function needs at least one resource");
        require_finite(p0.span(), "p0");
        if (!vec::all_nonnegative(p0.span())) throw InvalidArgument("p0 must be nonnegative");
        if (is_exponential()) {
            for (double v : p0) {
                if (!(v > 0.0)) throw InvalidArgument("exponential choice functions need p0 > 0");
            }
        }
        if (kind == ChoiceKind::exponential_clipped) {
            if (!(price_cap > 0.0) || !std::isfinite(price_cap)) {
                throw InvalidArgument("exponential_clipped needs a finite price_cap > 0");
            }
            for (double v : p0) {
                if (v > price_cap) throw InvalidArgument("p0 exceeds price_cap");
            }
        }
    }
};

enum class ScheduleKind { fixed, inverse_sqrt, inverse_t };

/// eta_t = value, value / sqrt(t) or value / t.
struct StepSchedule {
    ScheduleKind kind = ScheduleKind::fixed;
    double value = 0.0;

    void validate() const {
        if (!(value > 0.0) || !std::isfinite(value)) throw InvalidArgument("step size parameter must be positive");
    }
    [[nodiscard]] double eta(std::int64_t t) const {
        switch (kind) {
            case ScheduleKind::fixed:
                return value;
            case ScheduleKind::inverse_sqrt:
                return value / std::sqrt(static_cast<double>(t));
            case ScheduleKind::inverse_t:
                return value / static_cast<double>(t);
        }
        return value;
    }
};

/// Neumaier-compensated running sum of gradient vectors.
class CompensatedSum {
public:
    CompensatedSum() = default;
    explicit CompensatedSum(std::size_t m) : sum_(m, 0.0), carry_(m, 0.0) {}

    void add(std::span<const double> g) {
        require_same_dimension(sum_.size(), g.size(), "gradient");
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double s = sum_[i] + g[i];
            if (std::abs(sum_[i]) >= std::abs(g[i])) {
                carry_[i] += (sum_[i] - s) + g[i];
            } else {
                carry_[i] += (g[i] - s) + sum_[i];
            }
            sum_[i] = s;
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return sum_.size(); }
    [[nodiscard]] GradientVector value() const {
        GradientVector out(sum_.size());
        for (std::size_t i = 0; i < sum_.size(); ++i) out[i] = sum_[i] + carry_[i];
        return out;
    }

private:
    std::vector<double> sum_;
    std::vector<double> carry_;
};

struct ControllerState {
    PriceVector initial_price;
    CompensatedSum cumulative_gradient;
    /// Index of the next block to be priced, starting at 1.
    std::int64_t step = 1;
    StepSchedule schedule;
    PriceVector price;
};

inline ControllerState initial_state(const ChoiceFunction& cf, const StepSchedule& schedule) {
    cf.validate();
    schedule.validate();
    ControllerState s;
    s.initial_price = cf.p0;
    s.cumulative_gradient = CompensatedSum(cf.resources());
    s.schedule = schedule;
    s.price = cf.p0;
    return s;
}

// Choice-function calculus ----------------------------------------------------

/// grad F(z), the price produced at dual point z.
inline PriceVector choice_gradient(const ChoiceFunction& cf, std::span<const double> z) {
    require_same_dimension(cf.resources(), z.size(), "choice_gradient");
    PriceVector p(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        switch (cf.kind) {
            case ChoiceKind::norm_squared:
                p[i] = std::max(cf.p0[i] + z[i], 0.0);
                break;
            case ChoiceKind::exponential:
                p[i] = cf.p0[i] * std::exp(z[i]);
                break;
            case ChoiceKind::exponential_clipped:
                p[i] = std::min(cf.p0[i] * std::exp(z[i]), cf.price_cap);
                break;
        }
    }
    return p;
}

/// F(z).
inline double choice_value(const ChoiceFunction& cf, std::span<const double> z) {
    require_same_dimension(cf.resources(), z.size(), "choice_value");
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        switch (cf.kind) {
            case ChoiceKind::norm_squared: {
                const double v = std::max(cf.p0[i] + z[i], 0.0);
                total += 0.5 * v * v;
                break;
            }
            case ChoiceKind::exponential:
                total += cf.p0[i] * std::exp(z[i]);
                break;
            case ChoiceKind::exponential_clipped: {
                const double knee = std::log(cf.price_cap / cf.p0[i]);
                total += z[i] <= knee ? cf.p0[i] * std::exp(z[i])
                                      : cf.price_cap * (z[i] - knee + 1.0);
                break;
            }
        }
    }
    return total;
}

/// grad R(p) for the regularizer R = F* (the inverse of choice_gradient on
/// the price range the choice function can produce).
inline std::vector<double> regularizer_gradient(const ChoiceFunction& cf, const PriceVector& p) {
    require_same_dimension(cf.resources(), p.size(), "regularizer_gradient");
    std::vector<double> z(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        switch (cf.kind) {
            case ChoiceKind::norm_squared:
                z[i] = p[i] - cf.p0[i];
                break;
            case ChoiceKind::exponential:
            case ChoiceKind::exponential_clipped:
                if (!(p[i] > 0.0)) throw InvalidArgument("entropy regularizer needs positive prices");
                z[i] = std::log(p[i] / cf.p0[i]);
                break;
        }
    }
    return z;
}

/// Smoothness constant of F: 1 for norm_squared, |p0|_inf * M for exponential
/// on {|z|_inf <= log M}, m * M for exponential_clipped.
inline double smoothness_constant(const ChoiceFunction& cf, double M) {
    switch (cf.kind) {
        case ChoiceKind::norm_squared:
            return 1.0;
        case ChoiceKind::exponential:
            return vec::norm_inf(cf.p0.span()) * M;
        case ChoiceKind::exponential_clipped:
            return static_cast<double>(cf.resources()) * cf.price_cap;
    }
    return 1.0;
}

/// The exponential rule's smoothness argument needs |z|_inf <= log M; this
/// reports whether the price implies a dual point outside that box.
inline bool outside_exponential_domain(const ChoiceFunction& cf, const PriceVector& p, double M) {
    if (cf.kind != ChoiceKind::exponential || !(M > 1.0)) return false;
    const double radius = std::log(M);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] > 0.0)) return true;
        if (std::abs(std::log(p[i] / cf.p0[i])) > radius) return true;
    }
    return false;
}

// Updates ---------------------------------------------------------------------

/// grad F(-eta * cumulative_gradient).
inline PriceVector ftrl_price(const ChoiceFunction& cf, std::span<const double> cumulative_gradient,
                              double eta) {
    require_same_dimension(cf.resources(), cumulative_gradient.size(), "ftrl_price");
    require_finite(cumulative_gradient, "cumulative gradient");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("eta must be positive and finite");
    std::vector<double> z(cumulative_gradient.begin(), cumulative_gradient.end());
    for (double& v : z) v *= -eta;
    return choice_gradient(cf, z);
}

/// One multiplicative (mirror-descent) step p o exp(-eta g).
inline PriceVector omd_step(const PriceVector& pt, const GradientVector& g, double eta) {
    require_same_dimension(pt.size(), g.size(), "omd_step");
    PriceVector out(pt.size());
    for (std::size_t i = 0; i < pt.size(); ++i) {
        if (!(pt[i] > 0.0)) throw InvalidArgument("omd_step needs strictly positive prices");
        out[i] = pt[i] * std::exp(-eta * g[i]);
    }
    return out;
}

/// Sum over coordinates of the nonnegative-entropy Bregman divergence
/// p log p - q log q - (log q + 1)(p - q), with 0 log 0 = 0.
inline double bregman_divergence_entropy(const PriceVector& p, const PriceVector& q) {
    require_same_dimension(q.size(), p.size(), "bregman_divergence_entropy");
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(q[i] > 0.0)) throw InvalidArgument("reference price has a zero or negative coordinate");
        if (!(p[i] >= 0.0)) throw InvalidArgument("price must be nonnegative");
        const double plogp = p[i] > 0.0 ? p[i] * std::log(p[i]) : 0.0;
        total += plogp - q[i] * std::log(q[i]) - (std::log(q[i]) + 1.0) * (p[i] - q[i]);
    }
    return total;
}

class GradientBoundViolated : public Error {
public:
    using Error::Error;
};

struct StepResult {
    ControllerState state;
    PriceVector price;
};

/// Consumes the gradient observed at the current price and produces the next
/// price. With a fixed step the norm_squared and clipped rules are evaluated
/// in closed form from the compensated gradient sum; the exponential rule and
/// every time-varying schedule use the incremental form.
inline StepResult step(const ChoiceFunction& cf, ControllerState state, const GradientVector& g,
                       double gradient_bound = std::numeric_limits<double>::infinity()) {
    require_same_dimension(cf.resources(), g.size(), "step gradient");
    require_finite(g.span(), "gradient");
    const double norm = vec::norm2(g.span());
    if (norm > gradient_bound * (1.0 + 1e-12) + 1e-15) {
        throw GradientBoundViolated("gradient norm " + std::to_string(norm) + " exceeds bound " +
                                    std::to_string(gradient_bound));
    }
    const double eta = state.schedule.eta(state.step);
    state.cumulative_gradient.add(g.span());

    PriceVector next(g.size());
    const bool fixed = state.schedule.kind == ScheduleKind::fixed;
    if (fixed && cf.kind != ChoiceKind::exponential) {
        next = ftrl_price(cf, state.cumulative_gradient.value().span(), eta);
    } else {
        for (std::size_t i = 0; i < g.size(); ++i) {
            switch (cf.kind) {
                case ChoiceKind::norm_squared:
                    next[i] = std::max(state.price[i] - eta * g[i], 0.0);
                    break;
                case ChoiceKind::exponential:
                    next[i] = state.price[i] * std::exp(-eta * g[i]);
                    break;
                case ChoiceKind::exponential_clipped:
                    next[i] = std::min(state.price[i] * std::exp(-eta * g[i]), cf.price_cap);
                    break;
            }
        }
    }
    state.price = next;
    ++state.step;
    return {std::move(state), std::move(next)};
}

/// Convenience wrapper holding a choice function and its state.
class Controller {
public:
    Controller(ChoiceFunction cf, StepSchedule schedule,
               double gradient_bound = std::numeric_limits<double>::infinity())
        : cf_(std::move(cf)), state_(initial_state(cf_, schedule)), gradient_bound_(gradient_bound) {}

    [[nodiscard]] const PriceVector& price() const noexcept { return state_.price; }
    [[nodiscard]] const ControllerState& state() const noexcept { return state_; }
    [[nodiscard]] const ChoiceFunction& choice() const noexcept { return cf_; }

    const PriceVector& update(const GradientVector& g) {
        auto result = step(cf_, std::move(state_), g, gradient_bound_);
        state_ = std::move(result.state);
        return state_.price;
    }

private:
    ChoiceFunction cf_;
    ControllerState state_;
    double gradient_bound_;
};

// Horizon-tuned step size -------------------------------------------------------

/// F(0) + sup F*(p~) over the admissible optimal prices.
inline double choice_offset(const ChoiceFunction& cf, double M, double eps) {
    const double m = static_cast<double>(cf.resources());
    if (cf.kind == ChoiceKind::norm_squared) {
        const double p0 = vec::norm2(cf.p0.span());
        return 0.5 * p0 * p0 + 0.5 * M * M;
    }
    return vec::norm1(cf.p0.span()) + m * std::max(M * std::log(M / eps) - M, 0.0);
}

/// Default smoothness used when tuning eta: 1, M and m * M for the three kinds.
inline double default_tuning_sigma(const ChoiceFunction& cf, double M) {
    switch (cf.kind) {
        case ChoiceKind::norm_squared:
            return 1.0;
        case ChoiceKind::exponential:
            return M;
        case ChoiceKind::exponential_clipped:
            return static_cast<double>(cf.resources()) * M;
    }
    return 1.0;
}

/// eta = sqrt((F(0) + F*(p~)) / (sigma T B^2 / 2)), the step balancing the two
/// terms of the choice-function regret bound. Pass sigma <= 0 for the default.
inline double fixed_eta_for_horizon(const ChoiceFunction& cf, double B, double M, std::int64_t T,
                                    double eps = 1.0, double sigma = 0.0) {
    cf.validate();
    if (!(B > 0.0) || !(M > 0.0) || !std::isfinite(B) || !std::isfinite(M)) {
        throw InvalidArgument("B and M must be positive");
    }
    if (T < 1) throw InvalidArgument("horizon must be at least 1");
    if (cf.is_exponential()) {
        if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("eps must lie in (0, 1]");
        for (double v : cf.p0) {
            if (v < eps) throw InvalidArgument("exponential rules need p0 >= eps");
        }
    }
    if (!(sigma > 0.0)) sigma = default_tuning_sigma(cf, M);
    const double offset = choice_offset(cf, M, eps);
    return std::sqrt(offset / (sigma * static_cast<double>(T) * B * B / 2.0));
}

// JSON -------------------------------------------------------------------------

inline std::string to_string(ChoiceKind k) {
    switch (k) {
        case ChoiceKind::norm_squared:
            return "norm_squared";
        case ChoiceKind::exponential:
            return "exponential";
        case ChoiceKind::exponential_clipped:
            return "exponential_clipped";
    }
    return "?";
}

inline std::string to_string(ScheduleKind k) {
    switch (k) {
        case ScheduleKind::fixed:
            return "fixed";
        case ScheduleKind::inverse_sqrt:
            return "inverse_sqrt";
        case ScheduleKind::inverse_t:
            return "inverse_t";
    }
    return "?";
}

inline ChoiceKind choice_kind_from_string(const std::string& s) {
    if (s == "norm_squared" || s == "gradient") return ChoiceKind::norm_squared;
    if (s == "exponential" || s == "multiplicative") return ChoiceKind::exponential;
    if (s == "exponential_clipped") return ChoiceKind::exponential_clipped;
    throw InvalidArgument("unknown controller kind \"" + s + "\"");
}

inline ScheduleKind schedule_kind_from_string(const std::string& s) {
    if (s == "fixed") return ScheduleKind::fixed;
    if (s == "inverse_sqrt") return ScheduleKind::inverse_sqrt;
    if (s == "inverse_t") return ScheduleKind::inverse_t;
    throw InvalidArgument("unknown schedule kind \"" + s + "\"");
}

}  // namespace feemarket
