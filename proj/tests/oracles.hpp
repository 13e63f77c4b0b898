#pragma once

// Reference implementations used only by the tests. They share no code with
// the library beyond the data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "feemarket/core.hpp"

namespace oracle {

using feemarket::BlockInstance;

struct Packing {
    std::vector<std::uint8_t> chosen;
    double objective = 0.0;
    bool found = false;
};

inline bool feasible(const BlockInstance& inst, std::uint32_t mask) {
    const std::size_t n = inst.transactions();
    for (std::size_t i = 0; i < inst.resources(); ++i) {
        double used = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (mask >> j & 1u) used += inst.consumption[i][j];
        }
        if (used > inst.limit[i]) return false;
    }
    for (const auto& [a, b] : inst.exclusions) {
        if ((mask >> a & 1u) && (mask >> b & 1u)) return false;
    }
    return true;
}

/// Exhaustive search. Values within `tie` count as equal, and among equal
/// values the vector preferring lower indices wins (x_0 = 1 before x_0 = 0).
inline Packing enumerate_packing(const BlockInstance& inst, const std::vector<double>& price, double tie = 1e-12) {
    const std::size_t n = inst.transactions();
    std::vector<double> profit(n);
    for (std::size_t j = 0; j < n; ++j) {
        profit[j] = inst.welfare[j];
        for (std::size_t i = 0; i < inst.resources(); ++i) profit[j] -= inst.consumption[i][j] * price[i];
    }
    auto prefers = [n](std::uint32_t a, std::uint32_t b) {
        for (std::size_t j = 0; j < n; ++j) {
            const bool xa = a >> j & 1u;
            const bool xb = b >> j & 1u;
            if (xa != xb) return xa;
        }
        return false;
    };
    Packing best;
    std::uint32_t best_mask = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (!feasible(inst, mask)) continue;
        double v = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (mask >> j & 1u) v += profit[j];
        }
        if (!best.found || v > best.objective + tie ||
            (std::abs(v - best.objective) <= tie && prefers(mask, best_mask))) {
            best.found = true;
            best.objective = v;
            best_mask = mask;
        }
    }
    best.chosen.assign(n, 0);
    for (std::size_t j = 0; j < n; ++j) best.chosen[j] = best_mask >> j & 1u;
    return best;
}

/// The loss of one coordinate, written out from its definition.
inline double coordinate_loss(bool box, double target, double limit, double y) {
    if (y < 0.0) return std::numeric_limits<double>::infinity();
    if (box) return y <= target ? 0.0 : std::numeric_limits<double>::infinity();
    if (y > limit) return std::numeric_limits<double>::infinity();
    const double over = std::max(y - target, 0.0);
    return 0.5 * over * over;
}

/// sup over y in {0, h, 2h, ..., limit} of p y - loss(y).
inline double grid_conjugate(bool box, double target, double limit, double p, double h) {
    double best = -std::numeric_limits<double>::infinity();
    const auto steps = static_cast<long>(std::ceil(limit / h));
    for (long k = 0; k <= steps; ++k) {
        const double y = std::min(static_cast<double>(k) * h, limit);
        const double l = coordinate_loss(box, target, limit, y);
        if (std::isfinite(l)) best = std::max(best, p * y - l);
    }
    return best;
}

inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x, std::size_t i, double h) {
    const double x0 = x[i];
    x[i] = x0 + h;
    const double up = f(x);
    x[i] = x0 - h;
    const double down = f(x);
    return (up - down) / (2.0 * h);
}

/// One-sided slopes, to detect kinks.
inline std::pair<double, double> one_sided(const std::function<double(const std::vector<double>&)>& f,
                                           std::vector<double> x, std::size_t i, double h) {
    const double mid = f(x);
    const double x0 = x[i];
    x[i] = x0 + h;
    const double up = f(x);
    x[i] = x0 - h;
    const double down = f(x);
    return {(mid - down) / h, (up - mid) / h};
}

/// Random valid instance; integer data when `integral` is set so that sums
/// are exact and ties are real.
inline BlockInstance random_instance(std::mt19937_64& gen, std::size_t m, std::size_t n, double exclusion_p,
                                     bool integral = false) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BlockInstance inst;
    std::vector<double> limit(m);
    for (auto& b : limit) b = integral ? std::floor(2.0 + 6.0 * u(gen)) : 0.5 + 2.5 * u(gen);
    inst.limit = feemarket::ResourceVector(limit);
    inst.welfare.resize(n);
    inst.consumption.assign(m, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        inst.welfare[j] = integral ? std::floor(6.0 * u(gen)) : 3.0 * u(gen);
        for (std::size_t i = 0; i < m; ++i) {
            inst.consumption[i][j] = integral ? std::floor((limit[i] + 1.0) * u(gen)) * 1.0 : limit[i] * u(gen) * 0.8;
            inst.consumption[i][j] = std::min(inst.consumption[i][j], limit[i]);
        }
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (u(gen) < exclusion_p) inst.exclusions.emplace_back(a, b);
        }
    }
    return inst;
}

}  // namespace oracle
