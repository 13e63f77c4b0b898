#pragma once

// The pricing loop: post a price, draw a block, pack it, observe the gradient,
// update the controller. Also the Monte Carlo drivers built on top of it.

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "feemarket/adversaries.hpp"
#include "feemarket/controllers.hpp"
#include "feemarket/evaluation.hpp"
#include "feemarket/packing.hpp"

namespace feemarket {

/// Recorded blocks replayed in order under a given loss.
struct ReplayScenario {
    std::vector<BlockInstance> blocks;
    LossSpec loss;
};

using Scenario = std::variant<StochasticModel, LowerBoundAdversary, ReplayScenario>;

inline const LossSpec& scenario_loss(const Scenario& s, LossSpec& storage) {
    if (const auto* m = std::get_if<StochasticModel>(&s)) return m->loss;
    if (const auto* a = std::get_if<LowerBoundAdversary>(&s)) {
        storage = a->loss();
        return storage;
    }
    return std::get<ReplayScenario>(s).loss;
}

inline LossSpec scenario_loss(const Scenario& s) {
    LossSpec storage;
    return scenario_loss(s, storage);
}

inline ResourceVector scenario_limit(const Scenario& s) {
    if (const auto* m = std::get_if<StochasticModel>(&s)) return m->limit;
    if (const auto* a = std::get_if<LowerBoundAdversary>(&s)) return a->limit;
    return std::get<ReplayScenario>(s).loss.limit;
}

inline bool is_lower_bound(const Scenario& s) { return std::holds_alternative<LowerBoundAdversary>(s); }

inline void validate_scenario(const Scenario& s) {
    std::visit(
        [](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, ReplayScenario>) {
                v.loss.validate();
                for (const auto& b : v.blocks) {
                    require_same_dimension(v.loss.resources(), b.resources(), "replayed block");
                    require_valid(b);
                }
            } else {
                v.validate();
            }
        },
        s);
}

enum class PackerKind { exact, greedy, automatic };

inline PackerKind packer_from_string(const std::string& s) {
    if (s == "exact") return PackerKind::exact;
    if (s == "greedy") return PackerKind::greedy;
    if (s == "auto") return PackerKind::automatic;
    throw InvalidArgument("unknown packer \"" + s + "\"");
}

struct SimulationOptions {
    PackerKind packer = PackerKind::exact;
    std::size_t exact_threshold = default_exact_threshold;
    /// M; used to flag exponential iterates that leave the bounded domain.
    double price_bound = 1.0;
    /// Build the per-block dual terms needed for regret evaluation.
    bool keep_terms = true;
};

struct RunResult {
    std::vector<TraceRecord> trace;
    std::vector<BlockInstance> blocks;
    /// Dual terms under the accounting used for regret.
    std::vector<DualTerm> terms;
    /// Lower-bound runs only: terms with the packing re-solved at every price.
    std::vector<DualTerm> alternative_terms;
    bool committed_accounting = false;
};

inline PackingSolution pack(const BlockInstance& inst, const PriceVector& p, const SimulationOptions& o) {
    switch (o.packer) {
        case PackerKind::exact:
            return solve_exact(inst, p, o.exact_threshold);
        case PackerKind::greedy:
            require_valid(inst);
            return solve_greedy(inst, p);
        case PackerKind::automatic:
            if (inst.transactions() <= o.exact_threshold) return solve_exact(inst, p, o.exact_threshold);
            require_valid(inst);
            return solve_greedy(inst, p);
    }
    return solve_exact(inst, p, o.exact_threshold);
}

/// Runs T blocks of the scenario against the controller.
inline RunResult simulate(const Scenario& scenario, const ChoiceFunction& cf, const StepSchedule& schedule,
                          std::int64_t T, std::uint64_t replication = 0, const SimulationOptions& options = {}) {
    if (T < 1) throw InvalidArgument("horizon must be at least 1");
    validate_scenario(scenario);
    const LossSpec loss = scenario_loss(scenario);
    require_same_dimension(loss.resources(), cf.resources(), "controller p0");
    const auto* replay = std::get_if<ReplayScenario>(&scenario);
    if (replay && static_cast<std::size_t>(T) > replay->blocks.size()) {
        throw InvalidArgument("horizon exceeds the number of replayed blocks");
    }
    const double B = vec::norm2(loss.limit.span());
    Controller controller(cf, schedule, B);

    RunResult run;
    run.committed_accounting = is_lower_bound(scenario);
    run.trace.reserve(static_cast<std::size_t>(T));
    run.blocks.reserve(static_cast<std::size_t>(T));
    for (std::int64_t t = 1; t <= T; ++t) {
        const PriceVector price = controller.price();
        BlockInstance inst;
        std::visit(
            [&](const auto& s) {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, StochasticModel>) {
                    inst = sample_stochastic_block(s, t, replication);
                } else if constexpr (std::is_same_v<S, LowerBoundAdversary>) {
                    inst = lower_bound_block(s, t, price, replication).instance;
                } else {
                    inst = s.blocks[static_cast<std::size_t>(t - 1)];
                }
            },
            scenario);

        const auto sol = pack(inst, price, options);
        const auto supply = conjugate_argmax(loss, price);
        TraceRecord rec;
        rec.block_height = t;
        rec.price = price;
        rec.chosen = sol.chosen;
        rec.usage = sol.usage;
        rec.supply_opt = supply;
        rec.gradient = GradientVector(price.size());
        for (std::size_t i = 0; i < price.size(); ++i) rec.gradient[i] = supply[i] - sol.usage[i];
        rec.dual_value = conjugate_eval(loss, price) + sol.objective;
        rec.domain_exit = outside_exponential_domain(cf, price, options.price_bound);

        if (options.keep_terms) {
            if (const auto* adv = std::get_if<LowerBoundAdversary>(&scenario)) {
                // the construction's transaction is held in the block at every price
                std::vector<double> accounted(inst.transactions(), adv->delta);
                run.terms.push_back(DualTerm::committed(loss, inst, sol.chosen, accounted));
                BlockInstance bare = inst;
                for (double& w : bare.welfare) w = adv->delta;
                run.alternative_terms.push_back(DualTerm::market(loss, std::move(bare)));
            } else {
                run.terms.push_back(DualTerm::market(loss, inst, options.exact_threshold));
            }
        }
        controller.update(rec.gradient);
        run.trace.push_back(std::move(rec));
        run.blocks.push_back(std::move(inst));
    }
    return run;
}

// Step sizes --------------------------------------------------------------------

/// Bound parameters of a run: B = |b|_2, the configured box side M and eps.
inline BoundContext bound_context(const ChoiceFunction& cf, const StepSchedule& schedule, const LossSpec& loss,
                                  double M, double eps) {
    BoundContext c;
    c.kind = cf.kind;
    c.schedule = schedule.kind;
    c.B = vec::norm2(loss.limit.span());
    c.M = M;
    c.eps = eps;
    c.m = loss.resources();
    c.mu = conjugate_interior_modulus(loss);
    return c;
}

/// Default step parameter when the configuration leaves it out:
///  fixed: the horizon-tuned eta; inverse_sqrt: C = eta(T = 1) / sqrt(2);
///  inverse_t: 1 / mu (1 when the loss has no curvature).
inline double default_step_value(const ChoiceFunction& cf, ScheduleKind kind, const LossSpec& loss, double M,
                                 double eps, std::int64_t T) {
    const double B = vec::norm2(loss.limit.span());
    const double Me = effective_price_bound(cf.kind, M, loss.resources());
    switch (kind) {
        case ScheduleKind::fixed:
            return fixed_eta_for_horizon(cf, B, Me, T, eps);
        case ScheduleKind::inverse_sqrt:
            return fixed_eta_for_horizon(cf, B, Me, 1, eps) / std::sqrt(2.0);
        case ScheduleKind::inverse_t: {
            const double mu = conjugate_interior_modulus(loss);
            return mu > 0.0 ? 1.0 / mu : 1.0;
        }
    }
    return 1.0;
}

/// eta = 2M / (B^2 sqrt(T)), the stochastic gradient step.
inline double stochastic_eta(const LossSpec& loss, double M, std::int64_t T) {
    const double B = vec::norm2(loss.limit.span());
    if (!(B > 0.0) || !(M > 0.0) || T < 1) throw InvalidArgument("stochastic step needs B, M > 0 and T >= 1");
    return 2.0 * M / (B * B * std::sqrt(static_cast<double>(T)));
}

// Regret of a run -------------------------------------------------------------------

inline PriceVector average_price(const std::vector<TraceRecord>& trace) {
    if (trace.empty()) return {};
    CompensatedSum sum(trace.front().price.size());
    for (const auto& r : trace) sum.add(r.price.span());
    auto total = sum.value();
    PriceVector out(total.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = total[i] / static_cast<double>(trace.size());
    return out;
}

inline RegretReport run_regret(const RunResult& run, const BoundContext& bound, OracleOptions options = {}) {
    if (run.terms.size() != run.trace.size()) throw InvalidArgument("run was simulated without dual terms");
    std::vector<PriceVector> prices;
    std::vector<GradientVector> gradients;
    prices.reserve(run.trace.size());
    gradients.reserve(run.trace.size());
    std::size_t exits = 0;
    for (const auto& r : run.trace) {
        prices.push_back(r.price);
        gradients.push_back(r.gradient);
        exits += r.domain_exit ? 1 : 0;
    }
    std::optional<PriceVector> oracle;
    if (run.committed_accounting) {
        // every committed term is affine in p on the box, so the minimizer is a vertex
        CompensatedSum sum(bound.m);
        for (const auto& term : run.terms) {
            std::vector<double> g(bound.m);
            std::vector<double> mid(bound.m, 0.5 * bound.M);
            term.evaluate(mid, g);
            sum.add(g);
        }
        oracle = linear_oracle_price(sum.value(), bound.M);
    } else {
        options.candidates.push_back(average_price(run.trace));
        options.candidates.push_back(run.trace.back().price);
    }
    auto report = regret_report(run.terms, prices, gradients, bound, oracle, options);
    report.domain_exits = exits;
    if (!run.alternative_terms.empty()) {
        OracleOptions alt = options;
        alt.candidates.push_back(report.oracle_price);
        const auto o = oracle_price(run.alternative_terms, bound.M, alt);
        double total = 0.0;
        for (std::size_t t = 0; t < run.alternative_terms.size(); ++t) {
            total += run.alternative_terms[t].evaluate(prices[t].span());
        }
        report.alternative_regret = total - o.value;
    }
    return report;
}

// Stochastic convergence ------------------------------------------------------------

struct StochasticReport {
    std::int64_t horizon = 0;
    std::size_t replications = 0;
    std::size_t heldout_samples = 0;
    double eta = 0.0;
    double B = 0.0;
    double M = 0.0;
    MeanEstimate gap;
    std::vector<double> gaps;
    double bound_value = 0.0;  // B^2 M / sqrt(T)
    bool within_bound = false; // mean gap <= bound + 2 SE
};

/// Held-out blocks of a replication, merged into weighted terms.
inline std::vector<WeightedTerm<DualTerm>> heldout_terms(const StochasticModel& model, std::uint64_t replication,
                                                         std::size_t samples) {
    std::map<std::string, std::size_t> index;
    std::vector<BlockInstance> distinct;
    std::vector<double> counts;
    for (std::size_t k = 1; k <= samples; ++k) {
        auto inst = sample_stochastic_block(model, static_cast<std::int64_t>(k), replication, SampleStream::heldout);
        auto key = to_json(inst).dump();
        auto [it, inserted] = index.emplace(std::move(key), distinct.size());
        if (inserted) {
            distinct.push_back(std::move(inst));
            counts.push_back(0.0);
        }
        counts[it->second] += 1.0;
    }
    std::vector<WeightedTerm<DualTerm>> terms;
    terms.reserve(distinct.size());
    for (std::size_t k = 0; k < distinct.size(); ++k) {
        terms.emplace_back(DualTerm::market(model.loss, std::move(distinct[k])),
                           counts[k] / static_cast<double>(samples));
    }
    return terms;
}

/// Per replication: run T blocks, average the posted prices, and compare
/// the held-out dual at the average with the held-out minimum.
inline StochasticReport stochastic_report(const StochasticModel& model, const ChoiceFunction& cf,
                                          const StepSchedule& schedule, std::int64_t T, std::size_t replications,
                                          std::size_t heldout_samples, double M, std::size_t workers = 1,
                                          const SimulationOptions& sim = {}) {
    if (replications < 1) throw InvalidArgument("replications must be >= 1");
    if (heldout_samples < 1) throw InvalidArgument("heldout_samples must be >= 1");
    model.validate();
    StochasticReport r;
    r.horizon = T;
    r.replications = replications;
    r.heldout_samples = heldout_samples;
    r.eta = schedule.value;
    r.B = vec::norm2(model.limit.span());
    r.M = M;
    SimulationOptions opts = sim;
    opts.keep_terms = false;
    r.gaps = parallel_map(replications, workers, [&](std::size_t rep) {
        const auto run = simulate(model, cf, schedule, T, rep, opts);
        const auto average = average_price(run.trace);
        const auto terms = heldout_terms(model, rep, heldout_samples);
        OracleOptions oo;
        oo.candidates.push_back(average);
        const auto best = oracle_price(terms, M, oo);
        const double at_average = aggregate_dual(std::span<const WeightedTerm<DualTerm>>(terms), average.span());
        return at_average - best.value;
    });
    r.gap = estimate_mean(r.gaps);
    r.bound_value = r.B * r.B * M / std::sqrt(static_cast<double>(T));
    r.within_bound = r.gap.mean <= r.bound_value + 2.0 * r.gap.standard_error;
    return r;
}

inline nlohmann::json to_json(const StochasticReport& r) {
    return {{"horizon", r.horizon},
            {"replications", r.replications},
            {"heldout_samples", r.heldout_samples},
            {"eta", r.eta},
            {"B", r.B},
            {"M", r.M},
            {"mean_gap", r.gap.mean},
            {"se_gap", r.gap.standard_error},
            {"bound_value", r.bound_value},
            {"within_bound", r.within_bound}};
}

// Lower bound ---------------------------------------------------------------------------

struct LowerBoundReport {
    std::int64_t horizon = 0;
    std::size_t replications = 0;
    double M = 0.0;
    double swing_total = 0.0;  // 1'b~
    MeanEstimate regret;
    std::vector<double> regrets;
    double threshold = 0.0;    // M (1'b~) sqrt(T) / 24
    bool lower_pass = false;   // mean - 3 SE >= threshold
    double ratio = 0.0;        // mean / sqrt(T)
    double ratio_low = 0.0;    // M (1'b~) / 24
    double ratio_high = 0.0;   // M (1'b~) sqrt(2 / pi) * 1.1
    bool ratio_pass = false;
    /// max over replications of |R - sum_t g_t'(p_t - p*)|
    double linearization_gap = 0.0;
    MeanEstimate alternative_regret;

    [[nodiscard]] bool pass() const noexcept { return lower_pass && ratio_pass; }
};

inline LowerBoundReport lower_bound_report(const LowerBoundAdversary& adv, const ChoiceFunction& cf,
                                           const StepSchedule& schedule, std::int64_t T, std::size_t replications,
                                           std::size_t workers = 1, bool with_alternative = false) {
    if (replications < 1) throw InvalidArgument("replications must be >= 1");
    adv.validate();
    LowerBoundReport r;
    r.horizon = T;
    r.replications = replications;
    r.M = adv.price_bound;
    r.swing_total = vec::norm1(adv.swing().span());
    SimulationOptions opts;
    opts.price_bound = adv.price_bound;
    const auto bound = bound_context(cf, schedule, adv.loss(), adv.price_bound, 1.0);
    struct One {
        double regret = 0.0;
        double linear_gap = 0.0;
        double alternative = 0.0;
    };
    auto results = parallel_map(replications, workers, [&](std::size_t rep) {
        auto run = simulate(adv, cf, schedule, T, rep, opts);
        if (!with_alternative) run.alternative_terms.clear();
        const auto report = run_regret(run, bound);
        One o;
        o.regret = report.regret;
        o.linear_gap = std::abs(report.regret - report.linearized_regret);
        o.alternative = report.alternative_regret.value_or(0.0);
        return o;
    });
    std::vector<double> alternative;
    for (const auto& o : results) {
        r.regrets.push_back(o.regret);
        alternative.push_back(o.alternative);
        r.linearization_gap = std::max(r.linearization_gap, o.linear_gap);
    }
    r.regret = estimate_mean(r.regrets);
    if (with_alternative) r.alternative_regret = estimate_mean(alternative);
    const double root = std::sqrt(static_cast<double>(T));
    r.threshold = r.M * r.swing_total * root / 24.0;
    r.lower_pass = r.regret.mean - 3.0 * r.regret.standard_error >= r.threshold;
    r.ratio = r.regret.mean / root;
    r.ratio_low = r.M * r.swing_total / 24.0;
    r.ratio_high = r.M * r.swing_total * std::sqrt(2.0 / std::numbers::pi) * 1.1;
    r.ratio_pass = r.ratio >= r.ratio_low && r.ratio <= r.ratio_high;
    return r;
}

inline nlohmann::json to_json(const LowerBoundReport& r) {
    nlohmann::json j = {{"horizon", r.horizon},
                        {"replications", r.replications},
                        {"M", r.M},
                        {"swing_total", r.swing_total},
                        {"mean_regret", r.regret.mean},
                        {"se_regret", r.regret.standard_error},
                        {"threshold", r.threshold},
                        {"lower_pass", r.lower_pass},
                        {"ratio", r.ratio},
                        {"ratio_low", r.ratio_low},
                        {"ratio_high", r.ratio_high},
                        {"ratio_pass", r.ratio_pass},
                        {"linearization_gap", r.linearization_gap}};
    if (r.alternative_regret.count > 0) {
        j["alternative_mean_regret"] = r.alternative_regret.mean;
        j["alternative_se_regret"] = r.alternative_regret.standard_error;
    }
    return j;
}

// Trace CSV ------------------------------------------------------------------------------

inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Columns t, p_1..p_m, g_1..g_m, usage_1..usage_m, f_t.
inline void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
    const std::size_t m = trace.empty() ? 0 : trace.front().price.size();
    out << 't';
    for (const char* prefix : {"p_", "g_", "usage_"}) {
        for (std::size_t i = 1; i <= m; ++i) out << ',' << prefix << i;
    }
    out << ",f_t\n";
    for (const auto& r : trace) {
        out << r.block_height;
        for (double v : r.price) out << ',' << format_real(v);
        for (double v : r.gradient) out << ',' << format_real(v);
        for (double v : r.usage) out << ',' << format_real(v);
        out << ',' << format_real(r.dual_value) << '\n';
    }
}

/// Reads a trace written by write_trace_csv; only the numeric columns survive.
inline std::vector<TraceRecord> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) return {};
    std::size_t columns = 1;
    for (char c : line) columns += c == ',' ? 1 : 0;
    if (columns < 2 || (columns - 2) % 3 != 0 || line.rfind("t,", 0) != 0) {
        throw Error("trace header is not t, p_*, g_*, usage_*, f_t");
    }
    const std::size_t m = (columns - 2) / 3;
    std::vector<TraceRecord> trace;
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        std::vector<double> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                cells.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw Error("trace line " + std::to_string(number) + ": bad number \"" + cell + "\"");
            }
        }
        if (cells.size() != columns) throw Error("trace line " + std::to_string(number) + ": wrong column count");
        TraceRecord r;
        r.block_height = static_cast<std::int64_t>(cells[0]);
        r.price = PriceVector(std::vector<double>(cells.begin() + 1, cells.begin() + 1 + m));
        r.gradient = GradientVector(std::vector<double>(cells.begin() + 1 + m, cells.begin() + 1 + 2 * m));
        r.usage = ResourceVector(std::vector<double>(cells.begin() + 1 + 2 * m, cells.begin() + 1 + 3 * m));
        r.dual_value = cells.back();
        trace.push_back(std::move(r));
    }
    return trace;
}

}  // namespace feemarket
