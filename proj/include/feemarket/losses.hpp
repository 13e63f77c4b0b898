#pragma once

// Network loss functions, their Fenchel conjugates and conjugate maximizers.
// Both supported losses are separable over resources, so every routine works
// one coordinate at a time.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "feemarket/core.hpp"

namespace feemarket {

enum class LossKind {
    /// zero on the box 0 <= y <= target, +inf elsewhere
    target_box,
    /// 1/2 |(y - target)_+|^2 on 0 <= y <= limit, +inf elsewhere
    quadratic_overage,
};

struct LossSpec {
    LossKind kind = LossKind::target_box;
    ResourceVector target;
    ResourceVector limit;

    [[nodiscard]] std::size_t resources() const noexcept { return limit.size(); }

    static LossSpec box(ResourceVector target, ResourceVector limit) {
        return make(LossKind::target_box, std::move(target), std::move(limit));
    }
    static LossSpec quadratic(ResourceVector target, ResourceVector limit) {
        return make(LossKind::quadratic_overage, std::move(target), std::move(limit));
    }
    static LossSpec make(LossKind kind, ResourceVector target, ResourceVector limit) {
        LossSpec s{kind, std::move(target), std::move(limit)};
        s.validate();
        return s;
    }

    /// 0 <= target <= limit elementwise, all finite.
    void validate() const {
        require_same_dimension(limit.size(), target.size(), "loss target");
        require_resource_vector(target, "loss target");
        require_resource_vector(limit, "loss limit");
        for (std::size_t i = 0; i < limit.size(); ++i) {
            if (target[i] > limit[i]) throw InvalidArgument("loss target exceeds limit");
        }
    }

    /// Strict version needed by the lower-bound adversary: 0 < target < limit.
    [[nodiscard]] bool strictly_interior_target() const noexcept {
        for (std::size_t i = 0; i < limit.size(); ++i) {
            if (!(target[i] > 0.0 && target[i] < limit[i])) return false;
        }
        return true;
    }
};

inline constexpr double infinity = std::numeric_limits<double>::infinity();

inline double loss_eval(const LossSpec& spec, const ResourceVector& y) {
    require_same_dimension(spec.resources(), y.size(), "loss_eval");
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double v = y[i];
        if (!(v >= 0.0)) return infinity;
        switch (spec.kind) {
            case LossKind::target_box:
                if (v > spec.target[i]) return infinity;
                break;
            case LossKind::quadratic_overage: {
                if (v > spec.limit[i]) return infinity;
                const double over = std::max(v - spec.target[i], 0.0);
                total += 0.5 * over * over;
                break;
            }
        }
    }
    return total;
}

namespace detail {

// Maximizer of p*y - loss_i(y) for one coordinate. Ties at p == 0 resolve to
// the target; negative prices give y = 0.
inline double coordinate_argmax(LossKind kind, double target, double limit, double p) {
    if (p < 0.0) return 0.0;
    switch (kind) {
        case LossKind::target_box:
            return target;
        case LossKind::quadratic_overage:
            return std::min(target + p, limit);
    }
    return target;
}

inline double coordinate_conjugate(LossKind kind, double target, double limit, double p) {
    if (p <= 0.0) return 0.0;
    switch (kind) {
        case LossKind::target_box:
            return target * p;
        case LossKind::quadratic_overage: {
            const double y = std::min(target + p, limit);
            const double over = y - target;
            return p * y - 0.5 * over * over;
        }
    }
    return 0.0;
}

}  // namespace detail

/// sup_y (p'y - loss(y)); closed form per coordinate.
inline double conjugate_eval(const LossSpec& spec, const PriceVector& p) {
    require_same_dimension(spec.resources(), p.size(), "conjugate_eval");
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        total += detail::coordinate_conjugate(spec.kind, spec.target[i], spec.limit[i], p[i]);
    }
    return total;
}

/// The supply response y*(p). Always satisfies 0 <= y*(p) <= limit.
inline ResourceVector conjugate_argmax(const LossSpec& spec, const PriceVector& p) {
    require_same_dimension(spec.resources(), p.size(), "conjugate_argmax");
    ResourceVector y(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        y[i] = detail::coordinate_argmax(spec.kind, spec.target[i], spec.limit[i], p[i]);
    }
    return y;
}

/// Strong-convexity modulus of the conjugate on prices where every coordinate
/// of conjugate_argmax is strictly inside (0, limit): 1 for quadratic_overage,
/// 0 for the box loss (its conjugate is piecewise linear).
inline double conjugate_interior_modulus(const LossSpec& spec) noexcept {
    return spec.kind == LossKind::quadratic_overage ? 1.0 : 0.0;
}

/// Price box on which the quadratic_overage conjugate is strongly convex:
/// 0 < p_i < limit_i - target_i.
inline bool price_in_interior_regime(const LossSpec& spec, const PriceVector& p) {
    if (spec.kind != LossKind::quadratic_overage) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] > 0.0 && p[i] < spec.limit[i] - spec.target[i])) return false;
    }
    return true;
}

inline std::string to_string(LossKind kind) {
    return kind == LossKind::target_box ? "target_box" : "quadratic_overage";
}

inline nlohmann::json to_json(const LossSpec& spec) {
    return {{"kind", to_string(spec.kind)},
            {"target", spec.target.values()},
            {"limit", spec.limit.values()}};
}

inline LossSpec loss_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
        throw InvalidArgument("loss spec needs a string \"kind\"");
    }
    const auto kind = j.at("kind").get<std::string>();
    LossKind k;
    if (kind == "target_box") {
        k = LossKind::target_box;
    } else if (kind == "quadratic_overage") {
        k = LossKind::quadratic_overage;
    } else {
        throw InvalidArgument("unknown loss kind \"" + kind + "\"");
    }
    return LossSpec::make(k, ResourceVector(json_reals(j, "target")),
                          ResourceVector(json_reals(j, "limit")));
}

}  // namespace feemarket
