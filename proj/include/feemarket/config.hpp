#pragma once

// RunConfig: the single JSON document that drives every CLI command.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "feemarket/simulation.hpp"

namespace feemarket {

class ConfigError : public Error {
public:
    using Error::Error;
};

struct ControllerConfig {
    ChoiceFunction choice;
    ScheduleKind schedule_kind = ScheduleKind::fixed;
    /// Absent means "derive from the horizon and bounds".
    std::optional<double> schedule_value;
};

struct RunConfig {
    Scenario scenario;
    ControllerConfig controller;
    std::int64_t horizon = 0;
    std::size_t replications = 1;
    std::uint64_t seed = 0;
    double price_bound = 1.0;  // M
    double price_floor = 1.0;  // eps
    std::size_t workers = 1;
    PackerKind packer = PackerKind::exact;
    std::size_t exact_threshold = default_exact_threshold;
    std::size_t heldout_samples = 2000;
    std::string output_dir;

    [[nodiscard]] LossSpec loss() const { return scenario_loss(scenario); }
    [[nodiscard]] std::size_t resources() const { return scenario_limit(scenario).size(); }

    [[nodiscard]] SimulationOptions simulation_options() const {
        SimulationOptions o;
        o.packer = packer;
        o.exact_threshold = exact_threshold;
        o.price_bound = price_bound;
        return o;
    }

    [[nodiscard]] StepSchedule schedule() const {
        StepSchedule s;
        s.kind = controller.schedule_kind;
        s.value = controller.schedule_value.value_or(0.0);
        if (!controller.schedule_value) {
            s.value = default_step_value(controller.choice, s.kind, loss(), price_bound, price_floor, horizon);
        }
        return s;
    }

    [[nodiscard]] BoundContext bound() const {
        return bound_context(controller.choice, schedule(), loss(), price_bound, price_floor);
    }
};

namespace detail {

inline const nlohmann::json& need(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing \"" + key + "\"");
    return j.at(key);
}

inline double real_field(const nlohmann::json& j, const char* key, const std::string& where) {
    const auto& v = need(j, key, where);
    if (!v.is_number()) throw ConfigError(where + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

inline std::int64_t int_field(const nlohmann::json& j, const char* key, const std::string& where) {
    const auto& v = need(j, key, where);
    if (!v.is_number_integer()) throw ConfigError(where + ": \"" + key + "\" must be an integer");
    return v.get<std::int64_t>();
}

inline std::size_t count_field(const nlohmann::json& j, const char* key, std::size_t fallback,
                               const std::string& where) {
    if (!j.contains(key)) return fallback;
    const auto v = int_field(j, key, where);
    if (v < 0) throw ConfigError(where + ": \"" + key + "\" must be nonnegative");
    return static_cast<std::size_t>(v);
}

inline std::string string_field(const nlohmann::json& j, const char* key, const std::string& where) {
    const auto& v = need(j, key, where);
    if (!v.is_string()) throw ConfigError(where + ": \"" + key + "\" must be a string");
    return v.get<std::string>();
}

}  // namespace detail

/// A number is a constant; otherwise {"kind": "constant", "value": v},
/// {"kind": "uniform", "low": a, "high": b} or
/// {"kind": "two_point", "values": [a, b], "probability": p_b}.
inline Distribution distribution_from_json(const nlohmann::json& j, const std::string& where) {
    if (j.is_number()) return Distribution::constant(j.get<double>());
    const auto kind = detail::string_field(j, "kind", where);
    Distribution d;
    if (kind == "constant") {
        d = Distribution::constant(detail::real_field(j, "value", where));
    } else if (kind == "uniform") {
        d = Distribution::uniform(detail::real_field(j, "low", where), detail::real_field(j, "high", where));
    } else if (kind == "two_point") {
        const auto values = json_reals(j, "values");
        if (values.size() != 2) throw ConfigError(where + ": two_point needs two values");
        d = Distribution::two_point(values[0], values[1], detail::real_field(j, "probability", where));
    } else {
        throw ConfigError(where + ": unknown distribution kind \"" + kind + "\"");
    }
    d.validate(where.c_str());
    return d;
}

inline nlohmann::json to_json(const Distribution& d) {
    switch (d.kind) {
        case Distribution::Kind::constant:
            return {{"kind", "constant"}, {"value", d.low}};
        case Distribution::Kind::uniform:
            return {{"kind", "uniform"}, {"low", d.low}, {"high", d.high}};
        case Distribution::Kind::two_point:
            return {{"kind", "two_point"}, {"values", {d.low, d.high}}, {"probability", d.probability}};
    }
    return nullptr;
}

inline Scenario scenario_from_json(const nlohmann::json& j, std::uint64_t seed, double price_bound,
                                   const std::filesystem::path& base) {
    const std::string where = "scenario";
    const auto type = detail::string_field(j, "type", where);
    if (type == "stochastic") {
        StochasticModel m;
        m.rng_seed = seed;
        m.limit = ResourceVector(json_reals(j, "limit"));
        m.loss = loss_from_json(detail::need(j, "loss", where));
        if (j.contains("outcomes")) {
            for (const auto& o : j.at("outcomes")) m.outcomes.push_back(block_from_json(o));
            if (j.contains("outcome_weights")) m.outcome_weights = json_reals(j, "outcome_weights");
        } else {
            const auto& range = detail::need(j, "tx_count", where);
            if (!range.is_array() || range.size() != 2 || !range[0].is_number_unsigned() ||
                !range[1].is_number_unsigned()) {
                throw ConfigError("scenario: \"tx_count\" must be [n_min, n_max]");
            }
            m.tx_min = range[0].get<std::size_t>();
            m.tx_max = range[1].get<std::size_t>();
            m.welfare = distribution_from_json(detail::need(j, "welfare", where), "welfare");
            const auto& cons = detail::need(j, "consumption", where);
            if (!cons.is_array()) throw ConfigError("scenario: \"consumption\" must be an array");
            for (const auto& c : cons) m.consumption.push_back(distribution_from_json(c, "consumption"));
            if (j.contains("exclusion_probability")) {
                m.exclusion_probability = detail::real_field(j, "exclusion_probability", where);
            }
        }
        m.validate();
        return m;
    }
    if (type == "lower_bound") {
        LowerBoundAdversary a;
        a.rng_seed = seed;
        a.target = ResourceVector(json_reals(j, "target"));
        a.limit = ResourceVector(json_reals(j, "limit"));
        a.price_bound = price_bound;
        if (j.contains("delta")) a.delta = detail::real_field(j, "delta", where);
        a.validate();
        return a;
    }
    if (type == "replay") {
        ReplayScenario r;
        std::filesystem::path path = detail::string_field(j, "path", where);
        if (path.is_relative()) path = base / path;
        r.blocks = replay_blocks(path.string());
        r.loss = loss_from_json(detail::need(j, "loss", where));
        validate_scenario(r);
        return r;
    }
    throw ConfigError("scenario: unknown type \"" + type + "\"");
}

inline ControllerConfig controller_from_json(const nlohmann::json& j) {
    const std::string where = "controller";
    ControllerConfig c;
    c.choice.kind = choice_kind_from_string(detail::string_field(j, "kind", where));
    c.choice.p0 = PriceVector(json_reals(j, "p0"));
    if (j.contains("price_cap") && !j.at("price_cap").is_null()) {
        c.choice.price_cap = detail::real_field(j, "price_cap", where);
    }
    c.choice.validate();
    if (j.contains("schedule")) {
        const auto& s = j.at("schedule");
        c.schedule_kind = schedule_kind_from_string(detail::string_field(s, "kind", "schedule"));
        if (s.contains("value") && !s.at("value").is_null()) {
            c.schedule_value = detail::real_field(s, "value", "schedule");
            StepSchedule{c.schedule_kind, *c.schedule_value}.validate();
        }
    }
    return c;
}

/// Parses and validates a configuration. Relative replay paths resolve
/// against `base`.
inline RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base = ".") {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    c.horizon = j.contains("horizon") ? detail::int_field(j, "horizon", "config") : 0;
    if (c.horizon < 1) throw ConfigError("horizon must be >= 1");
    c.replications = detail::count_field(j, "replications", 1, "config");
    if (c.replications < 1) throw ConfigError("replications must be >= 1");
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    c.price_bound = detail::real_field(j, "price_bound", "config");
    if (!(c.price_bound > 0.0) || !std::isfinite(c.price_bound)) throw ConfigError("price_bound must be positive");
    if (j.contains("price_floor")) c.price_floor = detail::real_field(j, "price_floor", "config");
    if (!(c.price_floor > 0.0)) throw ConfigError("price_floor must be positive");
    c.workers = detail::count_field(j, "workers", 1, "config");
    if (c.workers < 1) throw ConfigError("workers must be >= 1");
    if (j.contains("packer")) c.packer = packer_from_string(detail::string_field(j, "packer", "config"));
    c.exact_threshold = detail::count_field(j, "exact_threshold", default_exact_threshold, "config");
    c.heldout_samples = detail::count_field(j, "heldout_samples", 2000, "config");
    if (c.heldout_samples < 1) throw ConfigError("heldout_samples must be >= 1");
    if (j.contains("output_dir")) c.output_dir = detail::string_field(j, "output_dir", "config");

    c.scenario = scenario_from_json(detail::need(j, "scenario", "config"), c.seed, c.price_bound, base);
    c.controller = controller_from_json(detail::need(j, "controller", "config"));
    require_same_dimension(c.resources(), c.controller.choice.resources(), "controller p0");
    if (const auto* replay = std::get_if<ReplayScenario>(&c.scenario)) {
        if (static_cast<std::size_t>(c.horizon) > replay->blocks.size()) {
            throw ConfigError("horizon exceeds the number of replayed blocks");
        }
    }
    if (c.controller.choice.is_exponential() && !c.controller.schedule_value &&
        !(c.price_floor > 0.0 && c.price_floor <= 1.0)) {
        throw ConfigError("price_floor must lie in (0, 1] for multiplicative rules");
    }
    (void)c.schedule();
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return config_from_json(j, path.parent_path());
}

}  // namespace feemarket
