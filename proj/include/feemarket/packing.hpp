#pragma once

// The block builders' packing problem: choose x in S_t maximizing
// (q - A'p)'x, where S_t is the set of binary vectors respecting the
// per-block cap and the pairwise exclusions.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "feemarket/core.hpp"

namespace feemarket {

struct PackingSolution {
    std::vector<std::uint8_t> chosen;
    double objective = 0.0;
    ResourceVector usage;
};

class PackingTooLarge : public Error {
public:
    using Error::Error;
};

inline constexpr std::size_t default_exact_threshold = 24;

/// Per-transaction profit q_j - a_j'p.
inline std::vector<double> transaction_profits(const BlockInstance& inst, const PriceVector& p) {
    require_same_dimension(inst.resources(), p.size(), "transaction_profits");
    std::vector<double> profit(inst.welfare);
    for (std::size_t j = 0; j < profit.size(); ++j) {
        double fee = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) fee += inst.consumption[i][j] * p[i];
        profit[j] -= fee;
    }
    return profit;
}

/// Objective and usage of a given selection, summed in transaction order.
inline PackingSolution evaluate_selection(const BlockInstance& inst, const PriceVector& p,
                                          std::vector<std::uint8_t> chosen) {
    require_same_dimension(inst.transactions(), chosen.size(), "evaluate_selection");
    const auto profit = transaction_profits(inst, p);
    PackingSolution sol;
    sol.usage = ResourceVector(inst.resources());
    for (std::size_t j = 0; j < chosen.size(); ++j) {
        if (!chosen[j]) continue;
        sol.objective += profit[j];
        for (std::size_t i = 0; i < inst.resources(); ++i) sol.usage[i] += inst.consumption[i][j];
    }
    sol.chosen = std::move(chosen);
    return sol;
}

/// True iff `chosen` respects the cap and every exclusion.
inline bool is_feasible_selection(const BlockInstance& inst, const std::vector<std::uint8_t>& chosen) {
    if (chosen.size() != inst.transactions()) return false;
    for (std::size_t i = 0; i < inst.resources(); ++i) {
        double used = 0.0;
        for (std::size_t j = 0; j < chosen.size(); ++j) {
            if (chosen[j]) used += inst.consumption[i][j];
        }
        if (used > inst.limit[i]) return false;
    }
    for (const auto& [a, b] : inst.exclusions) {
        if (chosen[a] && chosen[b]) return false;
    }
    return true;
}

namespace detail {

inline std::vector<std::vector<std::size_t>> exclusion_lists(const BlockInstance& inst) {
    std::vector<std::vector<std::size_t>> out(inst.transactions());
    for (const auto& [a, b] : inst.exclusions) {
        out[a].push_back(b);
        out[b].push_back(a);
    }
    return out;
}

// Depth-first branch and bound. Transactions are decided in index order with
// the include branch first, and the incumbent is only replaced by a strictly
// better value, so among optimal selections the first one found wins: the
// one that includes the lowest-indexed transactions.
class BranchAndBound {
public:
    BranchAndBound(const BlockInstance& inst, const PriceVector& p)
        : inst_(inst),
          m_(inst.resources()),
          n_(inst.transactions()),
          profit_(transaction_profits(inst, p)),
          conflicts_(exclusion_lists(inst)),
          blocked_(n_, 0),
          current_(n_, 0),
          usage_((n_ + 1) * m_, 0.0) {
        double scale = 1.0;
        for (double v : profit_) scale += std::abs(v);
        tolerance_ = 1e-9 * scale;
        by_ratio_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            auto& order = by_ratio_[i];
            order.resize(n_);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return ratio(i, a) > ratio(i, b);
            });
        }
    }

    PackingSolution solve() {
        search(0, 0.0);
        PackingSolution sol;
        sol.chosen = best_;
        sol.objective = best_value_;
        sol.usage = ResourceVector(m_);
        for (std::size_t j = 0; j < n_; ++j) {
            if (!best_[j]) continue;
            for (std::size_t i = 0; i < m_; ++i) sol.usage[i] += inst_.consumption[i][j];
        }
        return sol;
    }

private:
    double ratio(std::size_t i, std::size_t j) const {
        const double a = inst_.consumption[i][j];
        if (a <= 0.0) return profit_[j] > 0.0 ? infinity_ : -infinity_;
        return profit_[j] / a;
    }

    // Fractional single-resource relaxations over the undecided transactions;
    // each is a valid upper bound, so the tightest one is used.
    double upper_bound(std::size_t from) const {
        const double* usage = usage_.data() + from * m_;
        double positive = 0.0;
        for (std::size_t j = from; j < n_; ++j) {
            if (!blocked_[j] && profit_[j] > 0.0) positive += profit_[j];
        }
        double bound = positive;
        for (std::size_t i = 0; i < m_ && bound > 0.0; ++i) {
            double room = inst_.limit[i] - usage[i];
            double gain = 0.0;
            for (std::size_t j : by_ratio_[i]) {
                if (j < from || blocked_[j] || profit_[j] <= 0.0) continue;
                const double a = inst_.consumption[i][j];
                if (a <= room) {
                    gain += profit_[j];
                    room -= a;
                } else {
                    gain += profit_[j] * (room / a);
                    break;
                }
            }
            bound = std::min(bound, gain);
        }
        return bound;
    }

    bool fits(std::size_t j) const {
        if (blocked_[j]) return false;
        const double* usage = usage_.data() + j * m_;
        for (std::size_t i = 0; i < m_; ++i) {
            if (usage[i] + inst_.consumption[i][j] > inst_.limit[i]) return false;
        }
        return true;
    }

    void search(std::size_t j, double value) {
        if (j == n_) {
            if (!have_best_ || value > best_value_) {
                have_best_ = true;
                best_value_ = value;
                best_ = current_;
            }
            return;
        }
        if (have_best_ && value + upper_bound(j) + tolerance_ <= best_value_) return;

        // usage_ row j holds the usage of the decisions on transactions < j
        double* here = usage_.data() + j * m_;
        double* next = here + m_;
        if (fits(j)) {
            for (std::size_t i = 0; i < m_; ++i) next[i] = here[i] + inst_.consumption[i][j];
            for (std::size_t k : conflicts_[j]) ++blocked_[k];
            current_[j] = 1;
            search(j + 1, value + profit_[j]);
            current_[j] = 0;
            for (std::size_t k : conflicts_[j]) --blocked_[k];
        }
        std::copy(here, next, next);
        search(j + 1, value);
    }

    static constexpr double infinity_ = std::numeric_limits<double>::infinity();

    const BlockInstance& inst_;
    std::size_t m_;
    std::size_t n_;
    std::vector<double> profit_;
    std::vector<std::vector<std::size_t>> conflicts_;
    std::vector<std::vector<std::size_t>> by_ratio_;
    std::vector<int> blocked_;
    std::vector<std::uint8_t> current_;
    std::vector<double> usage_;
    std::vector<std::uint8_t> best_;
    double best_value_ = 0.0;
    bool have_best_ = false;
    double tolerance_ = 0.0;
};

}  // namespace detail

/// Global maximizer of the packing problem. Among optimal selections the one
/// preferring the lowest transaction indices is returned, which also means
/// zero-profit transactions are included whenever some optimum allows it.
inline PackingSolution solve_exact(const BlockInstance& inst, const PriceVector& p,
                                   std::size_t max_transactions = default_exact_threshold) {
    require_same_dimension(inst.resources(), p.size(), "solve_exact");
    require_finite(p.span(), "solve_exact price");
    if (inst.transactions() > max_transactions) {
        throw PackingTooLarge("exact packing limited to " + std::to_string(max_transactions) +
                              " transactions, block has " + std::to_string(inst.transactions()));
    }
    require_valid(inst);
    return detail::BranchAndBound(inst, p).solve();
}

/// Feasible but possibly suboptimal packing for large mempools: the better of
/// a greedy pass by descending profit per unit of total resource and a greedy
/// pass by descending profit. Nonpositive-profit transactions are never taken.
inline PackingSolution solve_greedy(const BlockInstance& inst, const PriceVector& p) {
    require_same_dimension(inst.resources(), p.size(), "solve_greedy");
    require_finite(p.span(), "solve_greedy price");
    require_valid(inst);

    const std::size_t n = inst.transactions();
    const std::size_t m = inst.resources();
    const auto profit = transaction_profits(inst, p);
    const auto conflicts = detail::exclusion_lists(inst);

    std::vector<std::size_t> candidates;
    for (std::size_t j = 0; j < n; ++j) {
        if (profit[j] > 0.0) candidates.push_back(j);
    }

    auto run = [&](auto&& key) {
        std::vector<std::size_t> order(candidates);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
        std::vector<std::uint8_t> chosen(n, 0);
        std::vector<double> used(m, 0.0);
        for (std::size_t j : order) {
            bool ok = true;
            for (std::size_t k : conflicts[j]) ok = ok && !chosen[k];
            for (std::size_t i = 0; i < m && ok; ++i) ok = used[i] + inst.consumption[i][j] <= inst.limit[i];
            if (!ok) continue;
            chosen[j] = 1;
            for (std::size_t i = 0; i < m; ++i) used[i] += inst.consumption[i][j];
        }
        return evaluate_selection(inst, p, std::move(chosen));
    };

    auto by_ratio = run([&](std::size_t j) {
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) total += inst.consumption[i][j];
        return total > 0.0 ? profit[j] / total : std::numeric_limits<double>::infinity();
    });
    auto by_profit = run([&](std::size_t j) { return profit[j]; });
    return by_profit.objective > by_ratio.objective ? by_profit : by_ratio;
}

/// h_t(p) as an upper envelope of affine functions w_k - u_k'p, one per
/// undominated feasible selection. Valid for nonnegative prices only, where a
/// selection with no more welfare and no less usage can never be the maximum.
/// Used by the offline oracle, which evaluates the same block many times.
class PackingEnvelope {
public:
    static constexpr std::size_t max_transactions = 16;

    static std::optional<PackingEnvelope> build(const BlockInstance& inst) {
        if (inst.transactions() > max_transactions) return std::nullopt;
        require_valid(inst);
        PackingEnvelope env;
        env.m_ = inst.resources();
        const auto conflicts = detail::exclusion_lists(inst);
        const std::size_t n = inst.transactions();

        std::vector<Piece> all;
        std::vector<double> usage(env.m_, 0.0);
        std::vector<int> blocked(n, 0);
        auto visit = [&](auto&& self, std::size_t j, double welfare) -> void {
            if (j == n) {
                all.push_back({welfare, usage});
                return;
            }
            bool fits = blocked[j] == 0;
            for (std::size_t i = 0; i < env.m_ && fits; ++i) {
                fits = usage[i] + inst.consumption[i][j] <= inst.limit[i];
            }
            if (fits) {
                auto saved = usage;
                for (std::size_t i = 0; i < env.m_; ++i) usage[i] += inst.consumption[i][j];
                for (std::size_t k : conflicts[j]) ++blocked[k];
                self(self, j + 1, welfare + inst.welfare[j]);
                for (std::size_t k : conflicts[j]) --blocked[k];
                usage = std::move(saved);
            }
            self(self, j + 1, welfare);
        };
        visit(visit, 0, 0.0);

        std::stable_sort(all.begin(), all.end(), [](const Piece& a, const Piece& b) {
            if (a.welfare != b.welfare) return a.welfare > b.welfare;
            return std::accumulate(a.usage.begin(), a.usage.end(), 0.0) <
                   std::accumulate(b.usage.begin(), b.usage.end(), 0.0);
        });
        for (auto& piece : all) {
            bool dominated = false;
            for (const auto& kept : env.pieces_) {
                bool le = true;
                for (std::size_t i = 0; i < env.m_ && le; ++i) le = kept.usage[i] <= piece.usage[i];
                if (le) {
                    dominated = true;
                    break;
                }
            }
            if (!dominated) env.pieces_.push_back(std::move(piece));
        }
        return env;
    }

    [[nodiscard]] std::size_t pieces() const noexcept { return pieces_.size(); }

    /// Value and the usage of a maximizing selection.
    double evaluate(std::span<const double> p, std::span<double> usage_out) const {
        std::size_t best = 0;
        double best_value = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < pieces_.size(); ++k) {
            double v = pieces_[k].welfare;
            for (std::size_t i = 0; i < m_; ++i) v -= pieces_[k].usage[i] * p[i];
            if (v > best_value) {
                best_value = v;
                best = k;
            }
        }
        for (std::size_t i = 0; i < m_ && !usage_out.empty(); ++i) usage_out[i] = pieces_[best].usage[i];
        return best_value;
    }

    double value(std::span<const double> p) const { return evaluate(p, {}); }

private:
    struct Piece {
        double welfare;
        std::vector<double> usage;
    };
    std::size_t m_ = 0;
    std::vector<Piece> pieces_;
};

}  // namespace feemarket
