// feemarket: run fee-market simulations and check them against their bounds.
//
// Exit codes: 0 pass, 1 bound check failed, 2 configuration or usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "feemarket/feemarket.hpp"

namespace fs = std::filesystem;
using namespace feemarket;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_bound_failure = 1;
constexpr int exit_config_error = 2;

struct Options {
    std::string config;
    std::string output_dir;
    std::string trace;
    std::string blocks;
    std::string suite = "all";
};

fs::path resolve_output_dir(const Options& o, const RunConfig* config) {
    fs::path dir = ".";
    if (!o.output_dir.empty()) {
        dir = o.output_dir;
    } else if (const char* env = std::getenv("FEEMARKET_OUTPUT_DIR"); env && *env) {
        dir = env;
    } else if (config && !config->output_dir.empty()) {
        dir = config->output_dir;
    }
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

std::string suffixed(const std::string& stem, const std::string& ext, std::size_t rep, std::size_t reps) {
    return reps == 1 ? stem + ext : stem + "_" + std::to_string(rep) + ext;
}

nlohmann::json run_header(const RunConfig& c, const StepSchedule& schedule) {
    const auto bound = c.bound();
    return {{"controller", to_string(c.controller.choice.kind)},
            {"schedule", to_string(schedule.kind)},
            {"schedule_value", schedule.value},
            {"horizon", c.horizon},
            {"replications", c.replications},
            {"seed", c.seed},
            {"B", bound.B},
            {"M", bound.M},
            {"M_effective", effective_price_bound(bound.kind, bound.M, bound.m)},
            {"eps", bound.eps},
            {"m", bound.m}};
}

std::vector<RunResult> run_all(const RunConfig& c, const StepSchedule& schedule) {
    const auto opts = c.simulation_options();
    return parallel_map(c.replications, c.workers, [&](std::size_t rep) {
        return simulate(c.scenario, c.controller.choice, schedule, c.horizon, rep, opts);
    });
}

std::string verdict(const RegretReport& r) {
    if (std::isnan(r.bound_value)) return "NO-BOUND";
    return r.within_bound ? "PASS" : "FAIL";
}

int cmd_simulate(const Options& o) {
    const auto c = load_config(o.config);
    const auto dir = resolve_output_dir(o, &c);
    const auto schedule = c.schedule();
    const auto runs = run_all(c, schedule);
    auto summary = run_header(c, schedule);
    summary["command"] = "simulate";
    summary["runs"] = nlohmann::json::array();
    for (std::size_t rep = 0; rep < runs.size(); ++rep) {
        {
            auto out = open_output(dir / suffixed("trace", ".csv", rep, runs.size()));
            write_trace_csv(out, runs[rep].trace);
        }
        {
            auto out = open_output(dir / suffixed("blocks", ".jsonl", rep, runs.size()));
            write_blocks(out, runs[rep].blocks);
        }
        auto report = run_regret(runs[rep], c.bound());
        summary["runs"].push_back(to_json(report));
        std::cout << "replication " << rep << ": avg_regret " << format_real(report.avg_regret) << " bound "
                  << format_real(report.bound_value) << '\n';
    }
    write_json(dir / "summary.json", summary);
    return exit_pass;
}

RegretReport regret_from_trace(const RunConfig& c, const std::vector<TraceRecord>& trace,
                               const std::vector<BlockInstance>& blocks) {
    if (trace.size() != blocks.size()) throw InvalidArgument("trace and block file lengths differ");
    if (trace.empty()) throw InvalidArgument("empty trace");
    const auto loss = c.loss();
    RunResult run;
    run.trace = trace;
    run.blocks = blocks;
    const auto* adv = std::get_if<LowerBoundAdversary>(&c.scenario);
    run.committed_accounting = adv != nullptr;
    for (std::size_t t = 0; t < blocks.size(); ++t) {
        require_same_dimension(loss.resources(), trace[t].price.size(), "trace price");
        if (adv) {
            const auto sol = solve_exact(blocks[t], trace[t].price, c.exact_threshold);
            run.terms.push_back(DualTerm::committed(
                loss, blocks[t], sol.chosen, std::vector<double>(blocks[t].transactions(), adv->delta)));
        } else {
            run.terms.push_back(DualTerm::market(loss, blocks[t], c.exact_threshold));
        }
    }
    return run_regret(run, c.bound());
}

int cmd_regret(const Options& o) {
    const auto c = load_config(o.config);
    const auto dir = resolve_output_dir(o, &c);
    const auto schedule = c.schedule();
    auto summary = run_header(c, schedule);
    summary["command"] = "regret";
    std::vector<RegretReport> reports;
    if (!o.trace.empty() || !o.blocks.empty()) {
        if (o.trace.empty() || o.blocks.empty()) throw ConfigError("--trace and --blocks go together");
        std::ifstream in(o.trace);
        if (!in) throw ConfigError("cannot open trace " + o.trace);
        reports.push_back(regret_from_trace(c, read_trace_csv(in), replay_blocks(o.blocks)));
    } else {
        for (const auto& run : run_all(c, schedule)) reports.push_back(run_regret(run, c.bound()));
    }
    bool ok = true;
    summary["reports"] = nlohmann::json::array();
    for (std::size_t k = 0; k < reports.size(); ++k) {
        const auto& r = reports[k];
        summary["reports"].push_back(to_json(r));
        const auto v = verdict(r);
        ok = ok && v != "FAIL";
        std::cout << "regret " << v << " replication " << k << " avg_regret " << format_real(r.avg_regret)
                  << " bound " << format_real(r.bound_value) << '\n';
    }
    summary["pass"] = ok;
    write_json(dir / "regret.json", summary);
    return ok ? exit_pass : exit_bound_failure;
}

int cmd_stochastic(const Options& o) {
    const auto c = load_config(o.config);
    const auto* model = std::get_if<StochasticModel>(&c.scenario);
    if (!model) throw ConfigError("stochastic needs a stochastic scenario");
    const auto dir = resolve_output_dir(o, &c);
    StepSchedule schedule{ScheduleKind::fixed, 0.0};
    if (c.controller.schedule_kind != ScheduleKind::fixed) throw ConfigError("stochastic uses a fixed step");
    const double Me = effective_price_bound(c.controller.choice.kind, c.price_bound, c.resources());
    schedule.value = c.controller.schedule_value.value_or(stochastic_eta(c.loss(), Me, c.horizon));
    const auto r = stochastic_report(*model, c.controller.choice, schedule, c.horizon, c.replications,
                                     c.heldout_samples, Me, c.workers, c.simulation_options());
    auto j = to_json(r);
    j["command"] = "stochastic";
    write_json(dir / "stochastic.json", j);
    std::cout << "stochastic " << (r.within_bound ? "PASS" : "FAIL") << " mean_gap " << format_real(r.gap.mean)
              << " se " << format_real(r.gap.standard_error) << " bound " << format_real(r.bound_value) << '\n';
    return r.within_bound ? exit_pass : exit_bound_failure;
}

int cmd_lowerbound(const Options& o) {
    const auto c = load_config(o.config);
    const auto* adv = std::get_if<LowerBoundAdversary>(&c.scenario);
    if (!adv) throw ConfigError("lowerbound needs a lower_bound scenario");
    const auto dir = resolve_output_dir(o, &c);
    const auto schedule = c.schedule();
    const auto r = lower_bound_report(*adv, c.controller.choice, schedule, c.horizon, c.replications, c.workers);
    auto j = to_json(r);
    j["command"] = "lowerbound";
    j["schedule_value"] = schedule.value;
    write_json(dir / "lowerbound.json", j);
    std::cout << "lowerbound " << (r.pass() ? "PASS" : "FAIL") << " mean_regret " << format_real(r.regret.mean)
              << " se " << format_real(r.regret.standard_error) << " threshold " << format_real(r.threshold)
              << " ratio " << format_real(r.ratio) << " in [" << format_real(r.ratio_low) << ", "
              << format_real(r.ratio_high) << "]\n";
    return r.pass() ? exit_pass : exit_bound_failure;
}

int cmd_verify(const Options& o) {
    std::vector<std::string> suites;
    if (o.suite == "all") {
        suites = verify_suite_names();
    } else {
        suites.push_back(o.suite);
    }
    bool ok = true;
    for (const auto& name : suites) {
        const auto result = run_verify_suite(name);
        for (const auto& check : result.checks) {
            std::cout << (check.pass ? "PASS " : "FAIL ") << name << ": " << check.name << " (" << check.detail
                      << ")\n";
        }
        ok = ok && result.pass();
    }
    return ok ? exit_pass : exit_bound_failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fee-market price controller simulations and bound checks"};
    app.require_subcommand(1);
    Options o;

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("-c,--config", o.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--output-dir", o.output_dir, "output directory");
    };
    auto* simulate = app.add_subcommand("simulate", "run the pricing loop and write traces");
    add_config(simulate);
    auto* regret = app.add_subcommand("regret", "regret against the offline oracle price");
    add_config(regret);
    regret->add_option("--trace", o.trace, "recompute from a trace CSV instead of simulating");
    regret->add_option("--blocks", o.blocks, "block file (JSON lines) matching --trace");
    auto* stochastic = app.add_subcommand("stochastic", "averaged-price convergence on i.i.d. blocks");
    add_config(stochastic);
    auto* lowerbound = app.add_subcommand("lowerbound", "regret of the sign-flipping adversary");
    add_config(lowerbound);
    auto* verify = app.add_subcommand("verify", "built-in verification suites");
    auto names = verify_suite_names();
    names.push_back("all");
    verify->add_option("-s,--suite", o.suite, "walk, conjugates, ftrl-equiv or all")->check(CLI::IsMember(names));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config_error;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(o);
        if (regret->parsed()) return cmd_regret(o);
        if (stochastic->parsed()) return cmd_stochastic(o);
        if (lowerbound->parsed()) return cmd_lowerbound(o);
        if (verify->parsed()) return cmd_verify(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config_error;
    }
    return exit_config_error;
}
