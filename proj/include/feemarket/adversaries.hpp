#pragma once

// Block sequences fed to the price controllers: i.i.d. stochastic demand, the
// sign-flipping lower-bound adversary, and replay of recorded blocks.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "feemarket/core.hpp"
#include "feemarket/losses.hpp"
#include "feemarket/rng.hpp"

namespace feemarket {

/// Bounded nonnegative scalar distribution.
struct Distribution {
    enum class Kind { constant, uniform, two_point };
    Kind kind = Kind::constant;
    double low = 0.0;   // constant value, uniform lower end, or first point
    double high = 0.0;  // uniform upper end or second point
    double probability = 0.5;  // two_point: probability of `high`

    static Distribution constant(double v) { return {Kind::constant, v, v, 0.5}; }
    static Distribution uniform(double lo, double hi) { return {Kind::uniform, lo, hi, 0.5}; }
    static Distribution two_point(double a, double b, double p_b) { return {Kind::two_point, a, b, p_b}; }

    [[nodiscard]] double upper() const noexcept { return kind == Kind::constant ? low : std::max(low, high); }

    void validate(const char* what) const {
        if (!std::isfinite(low) || !std::isfinite(high) || low < 0.0 || high < 0.0) {
            throw InvalidArgument(std::string(what) + ": distribution must be finite and nonnegative");
        }
        if (kind == Kind::uniform && high < low) throw InvalidArgument(std::string(what) + ": uniform needs low <= high");
        if (kind == Kind::two_point && !(probability >= 0.0 && probability <= 1.0)) {
            throw InvalidArgument(std::string(what) + ": probability outside [0, 1]");
        }
    }

    double sample(CounterRng& rng) const {
        switch (kind) {
            case Kind::constant:
                return low;
            case Kind::uniform:
                return rng.uniform(low, high);
            case Kind::two_point:
                return rng.bernoulli(probability) ? high : low;
        }
        return low;
    }
};

/// i.i.d. block model. Either draws each transaction independently, or, when
/// `outcomes` is non-empty, picks one whole block per draw with the given
/// weights (a finite sample space).
struct StochasticModel {
    std::uint64_t rng_seed = 0;
    std::size_t tx_min = 0;
    std::size_t tx_max = 0;
    Distribution welfare;
    std::vector<Distribution> consumption;  // one per resource
    double exclusion_probability = 0.0;
    ResourceVector limit;
    LossSpec loss;
    std::vector<BlockInstance> outcomes;
    std::vector<double> outcome_weights;

    [[nodiscard]] std::size_t resources() const noexcept { return limit.size(); }

    void validate() const {
        require_resource_vector(limit, "model limit");
        loss.validate();
        require_same_dimension(limit.size(), loss.resources(), "model loss");
        if (!outcomes.empty()) {
            if (!outcome_weights.empty() && outcome_weights.size() != outcomes.size()) {
                throw InvalidArgument("outcome_weights must match outcomes");
            }
            double total = 0.0;
            for (double w : outcome_weights) {
                if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("outcome weights must be nonnegative");
                total += w;
            }
            if (!outcome_weights.empty() && !(total > 0.0)) throw InvalidArgument("outcome weights sum to zero");
            for (const auto& o : outcomes) {
                require_same_dimension(limit.size(), o.resources(), "outcome block");
                if (o.limit != limit) throw InvalidArgument("outcome block limit differs from model limit");
                require_valid(o);
            }
            return;
        }
        if (tx_min > tx_max) throw InvalidArgument("tx_count range is empty");
        require_same_dimension(limit.size(), consumption.size(), "consumption distributions");
        welfare.validate("welfare");
        for (std::size_t i = 0; i < consumption.size(); ++i) {
            consumption[i].validate("consumption");
            if (consumption[i].upper() > limit[i]) {
                throw InvalidArgument("consumption distribution can exceed the limit of resource " + std::to_string(i));
            }
        }
        if (!(exclusion_probability >= 0.0 && exclusion_probability <= 1.0)) {
            throw InvalidArgument("exclusion_probability outside [0, 1]");
        }
    }
};

/// Stream tags keep training blocks and held-out evaluation blocks disjoint.
enum class SampleStream : std::uint64_t { training = 0, heldout = 1 };

/// Block t (t >= 1) of the given replication; a pure function of
/// (seed, stream, replication, t).
inline BlockInstance sample_stochastic_block(const StochasticModel& model, std::int64_t t,
                                             std::uint64_t replication = 0,
                                             SampleStream stream = SampleStream::training) {
    if (t < 1) throw InvalidArgument("block height must be >= 1");
    CounterRng rng(model.rng_seed, {static_cast<std::uint64_t>(stream), replication,
                                    static_cast<std::uint64_t>(t)});
    if (!model.outcomes.empty()) {
        std::size_t pick = 0;
        if (model.outcome_weights.empty()) {
            pick = static_cast<std::size_t>(rng.uniform_int(0, model.outcomes.size() - 1));
        } else {
            double total = 0.0;
            for (double w : model.outcome_weights) total += w;
            double u = rng.uniform() * total;
            pick = model.outcomes.size() - 1;
            for (std::size_t k = 0; k < model.outcome_weights.size(); ++k) {
                if (u < model.outcome_weights[k]) {
                    pick = k;
                    break;
                }
                u -= model.outcome_weights[k];
            }
        }
        return model.outcomes[pick];
    }

    const std::size_t m = model.resources();
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(model.tx_min, model.tx_max));
    BlockInstance inst;
    inst.limit = model.limit;
    inst.welfare.resize(n);
    inst.consumption.assign(m, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        inst.welfare[j] = model.welfare.sample(rng);
        for (std::size_t i = 0; i < m; ++i) {
            inst.consumption[i][j] = std::min(model.consumption[i].sample(rng), model.limit[i]);
        }
    }
    if (model.exclusion_probability > 0.0) {
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                if (rng.bernoulli(model.exclusion_probability)) inst.exclusions.emplace_back(a, b);
            }
        }
    }
    return inst;
}

/// Adversary whose single zero-welfare transaction consumes b* - eps_t o b~
/// with uniformly random signs eps_t, so the observed gradient is eps_t o b~.
struct LowerBoundAdversary {
    std::uint64_t rng_seed = 0;
    ResourceVector target;
    ResourceVector limit;
    double price_bound = 1.0;
    /// Welfare margin that makes the packer include the transaction.
    double delta = 1e-9;

    [[nodiscard]] std::size_t resources() const noexcept { return limit.size(); }

    void validate() const {
        require_same_dimension(limit.size(), target.size(), "adversary target");
        require_resource_vector(target, "adversary target");
        require_resource_vector(limit, "adversary limit");
        for (std::size_t i = 0; i < limit.size(); ++i) {
            if (!(target[i] > 0.0 && target[i] < limit[i])) {
                throw InvalidArgument("adversary needs 0 < target < limit elementwise");
            }
        }
        if (!(price_bound > 0.0)) throw InvalidArgument("price bound must be positive");
        if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
    }

    /// b~_i = min(b*_i, b_i - b*_i).
    [[nodiscard]] ResourceVector swing() const {
        ResourceVector out(limit.size());
        for (std::size_t i = 0; i < limit.size(); ++i) out[i] = std::min(target[i], limit[i] - target[i]);
        return out;
    }

    [[nodiscard]] LossSpec loss() const { return LossSpec::box(target, limit); }
};

struct AdversaryBlock {
    BlockInstance instance;
    ResourceVector expected_usage;
    std::vector<double> signs;
};

/// The sign vector eps_t of block t.
inline std::vector<double> adversary_signs(const LowerBoundAdversary& adv, std::int64_t t,
                                           std::uint64_t replication = 0) {
    CounterRng rng(adv.rng_seed, {replication, static_cast<std::uint64_t>(t)});
    std::vector<double> eps(adv.resources());
    for (double& e : eps) e = rng.sign();
    return eps;
}

/// Block t against the posted price. The welfare is set to p'a + delta so the
/// transaction is strictly profitable at the posted price; at p = 0 it is delta.
inline AdversaryBlock lower_bound_block(const LowerBoundAdversary& adv, std::int64_t t,
                                        const PriceVector& posted, std::uint64_t replication = 0) {
    if (t < 1) throw InvalidArgument("block height must be >= 1");
    require_same_dimension(adv.resources(), posted.size(), "posted price");
    const auto swing = adv.swing();
    AdversaryBlock out;
    out.signs = adversary_signs(adv, t, replication);
    out.expected_usage = ResourceVector(adv.resources());
    for (std::size_t i = 0; i < adv.resources(); ++i) {
        const double a = adv.target[i] - out.signs[i] * swing[i];
        out.expected_usage[i] = std::clamp(a, 0.0, adv.limit[i]);
    }
    double fee = 0.0;
    for (std::size_t i = 0; i < adv.resources(); ++i) fee += out.expected_usage[i] * std::max(posted[i], 0.0);
    out.instance.limit = adv.limit;
    out.instance.welfare = {fee + adv.delta};
    out.instance.consumption.resize(adv.resources());
    for (std::size_t i = 0; i < adv.resources(); ++i) out.instance.consumption[i] = {out.expected_usage[i]};
    return out;
}

inline AdversaryBlock lower_bound_block(const LowerBoundAdversary& adv, std::int64_t t) {
    return lower_bound_block(adv, t, PriceVector(adv.resources()));
}

// Replay ----------------------------------------------------------------------

class ReplayError : public Error {
public:
    ReplayError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Reads JSON-lines BlockInstance records; blank lines are skipped. Every
/// record is validated and errors name the 1-based line.
inline std::vector<BlockInstance> replay_blocks(std::istream& in) {
    std::vector<BlockInstance> blocks;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ReplayError(number, std::string("parse error: ") + e.what());
        }
        BlockInstance inst;
        try {
            inst = block_from_json(j);
        } catch (const Error& e) {
            throw ReplayError(number, e.what());
        }
        auto report = validate_instance(inst);
        if (!report) throw ReplayError(number, "invalid block: " + report.summary());
        if (!blocks.empty() && blocks.front().resources() != inst.resources()) {
            throw ReplayError(number, "resource dimension changes within the file");
        }
        blocks.push_back(std::move(inst));
    }
    return blocks;
}

inline std::vector<BlockInstance> replay_blocks(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open replay file " + path);
    return replay_blocks(in);
}

inline void write_blocks(std::ostream& out, const std::vector<BlockInstance>& blocks) {
    for (const auto& b : blocks) out << to_json(b).dump() << '\n';
}

}  // namespace feemarket
