#include "tipcue/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "tipcue/error.hpp"
#include "tipcue/scenario.hpp"
#include "tipcue/scheduler.hpp"
#include "tipcue/tips.hpp"
#include "tipcue/visibility.hpp"

namespace tipcue {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string scenario;
    std::string out{"."};
    std::optional<double> lambda;
    std::string lambdas{"0,0.25,0.5,0.75,1"};
    std::optional<std::uint64_t> seed;
    std::optional<double> eta, rho, eps, t_img;
    std::optional<int> max_iters;
    std::optional<std::string> sampling;
    // tips
    std::string predictions;
    std::optional<double> theta, alpha, lead_h, cutoff;
};

void setup_logging() {
    auto logger = std::make_shared<spdlog::logger>("tipcue", std::make_shared<spdlog::sinks::stderr_sink_st>());
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("TIPCUE_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path.string());
    out << content;
    if (!out) throw Error("failed writing file: " + path.string());
}

ScenarioSpec load_with_overrides(const Options& o) {
    ScenarioSpec spec = load_scenario(o.scenario);
    if (o.seed) spec.seed = *o.seed;
    if (o.lambda) spec.ranking.lambda = *o.lambda;
    if (o.eta) spec.optimizer.eta = *o.eta;
    if (o.rho) spec.penalty.rho = *o.rho;
    if (o.eps) spec.optimizer.epsilon = *o.eps;
    if (o.max_iters) spec.optimizer.max_iters = *o.max_iters;
    if (o.t_img) {
        for (auto& s : spec.satellites) s.dwell_time_s = *o.t_img;
    }
    if (o.sampling) {
        if (*o.sampling == "theoretical") spec.sampling.mode = TheoreticalSampling{};
        else if (*o.sampling == "practical") spec.sampling.mode = PracticalSampling{};
        else spec.sampling.mode = AlgorithmicSampling{};
    }
    validate(spec);
    return spec;
}

double epoch_unix(const ScenarioSpec& spec) { return parse_iso8601(spec.epoch); }

std::string hms(double unix_s) { return format_iso8601(unix_s).substr(11, 8); }

struct Prepared {
    std::vector<Cue> cues;
    std::vector<WindowSet> windows;
};

Prepared prepare(const ScenarioSpec& spec) {
    Prepared p;
    p.cues = generate_cues(spec);
    spdlog::info("{} cues, {} satellites", p.cues.size(), spec.satellites.size());
    if (spec.horizon_end <= spec.horizon_start || spec.satellites.empty()) {
        p.windows.assign(p.cues.size(), WindowSet{});
        return p;
    }
    WindowComputer wc(spec.satellites, spec.sampling);
    for (const auto& c : p.cues) p.windows.push_back(wc.windows_for(c));
    return p;
}

std::string windows_csv(const Prepared& p) {
    std::string s = "cue_id,satellite_id,start,end\n";
    for (std::size_t i = 0; i < p.cues.size(); ++i) {
        for (const auto& iv : p.windows[i].intervals()) {
            s += fmt::format("{},{},{:.3f},{:.3f}\n", p.cues[i].id, iv.satellite_id, iv.start, iv.end);
        }
    }
    return s;
}

json schedule_json(const ScenarioSpec& spec, const std::vector<Cue>& cues, const ScheduleResult& r, double lambda) {
    const double e0 = epoch_unix(spec);
    json entries = json::array();
    for (const auto& e : r.schedule.entries) {
        entries.push_back({{"cue_id", e.cue_id},
                           {"satellite_id", e.satellite_id},
                           {"time_iso", format_iso8601(e0 + e.time)},
                           {"time_s", e.time},
                           {"utility", e.utility_at_time}});
    }
    json rank_order = json::array();
    for (std::size_t i : r.ranked) rank_order.push_back(cues[i].id);
    return {{"epoch", spec.epoch},
            {"lambda", lambda},
            {"seed", spec.seed},
            {"feasible_cues", r.feasible_count},
            {"scheduled", r.schedule.entries.size()},
            {"binary_search", r.schedule.phase_counts.binary_search},
            {"refinement", r.schedule.phase_counts.refinement},
            {"total_utility", r.schedule.total_utility},
            {"rank_order", rank_order},
            {"entries", entries}};
}

std::string loss_trace_csv(const ScheduleResult& r) {
    std::string s = "evaluation,k,feasible,iteration,loss\n";
    for (std::size_t n = 0; n < r.evaluations.size(); ++n) {
        const auto& ev = r.evaluations[n];
        for (std::size_t m = 0; m < ev.trace.size(); ++m) {
            s += fmt::format("{},{},{},{},{:.12g}\n", n, ev.k, ev.feasible ? 1 : 0, m, ev.trace[m]);
        }
    }
    return s;
}

std::string summary_line(const Schedule& s) {
    return fmt::format("scheduled={} binary={} refine={} u_total={:.6f}", s.entries.size(),
                       s.phase_counts.binary_search, s.phase_counts.refinement, s.total_utility);
}

void log_rank_order(const std::vector<Cue>& cues, const ScheduleResult& r) {
    std::string order;
    for (std::size_t i : r.ranked) order += (order.empty() ? "" : ",") + cues[i].id;
    spdlog::info("rank order: {}", order);
}

int cmd_windows(const Options& o) {
    const ScenarioSpec spec = load_with_overrides(o);
    fs::create_directories(o.out);
    const Prepared p = prepare(spec);
    write_file(fs::path(o.out) / "windows.csv", windows_csv(p));
    const double e0 = epoch_unix(spec);
    for (const auto& sat : spec.satellites) {
        std::vector<TimeInterval> all;
        for (const auto& w : p.windows) {
            for (const auto& iv : w.intervals()) {
                if (iv.satellite_id == sat.id) all.push_back({iv.start, iv.end, "*"});
            }
        }
        const auto merged = WindowSet(std::move(all)).merged();
        if (merged.empty()) {
            std::cout << fmt::format("{}: no window\n", sat.id);
            continue;
        }
        std::string line = sat.id + ":";
        for (const auto& [lo, hi] : merged) {
            line += fmt::format(" {}-{} ({:.0f} s)", hms(e0 + lo), hms(e0 + hi), hi - lo);
        }
        std::cout << line << '\n';
    }
    std::size_t feasible = 0;
    for (const auto& w : p.windows) feasible += w.empty() ? 0 : 1;
    std::cout << fmt::format("feasible_cues={} of {}\n", feasible, p.cues.size());
    return 0;
}

int cmd_schedule(const Options& o) {
    const ScenarioSpec spec = load_with_overrides(o);
    fs::create_directories(o.out);
    Prepared p = prepare(spec);
    const ScheduleResult r = schedule_with_windows(p.cues, std::move(p.windows), spec.satellites, spec.ranking,
                                                   spec.penalty, spec.optimizer);
    log_rank_order(p.cues, r);
    write_file(fs::path(o.out) / "schedule.json", schedule_json(spec, p.cues, r, spec.ranking.lambda).dump(2) + "\n");
    write_file(fs::path(o.out) / "loss_trace.csv", loss_trace_csv(r));
    std::cout << summary_line(r.schedule) << '\n';
    return 0;
}

std::vector<double> parse_lambdas(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("invalid lambda list: " + s);
        }
        validate(RankingParams{out.back()});
    }
    if (out.empty()) throw ConfigError("empty lambda list");
    return out;
}

int cmd_sweep(const Options& o) {
    const ScenarioSpec spec = load_with_overrides(o);
    const auto lambdas = parse_lambdas(o.lambdas);
    fs::create_directories(o.out);
    const Prepared p = prepare(spec);
    const SweepResult sw = run_sweep(p.cues, p.windows, spec, lambdas);
    for (std::size_t n = 0; n < sw.runs.size(); ++n) {
        const std::string tag = fmt::format("lambda_{}", lambdas[n]);
        log_rank_order(p.cues, sw.runs[n]);
        write_file(fs::path(o.out) / fmt::format("schedule_{}.json", tag),
                   schedule_json(spec, p.cues, sw.runs[n], lambdas[n]).dump(2) + "\n");
        write_file(fs::path(o.out) / fmt::format("loss_trace_{}.csv", tag), loss_trace_csv(sw.runs[n]));
    }
    const std::string csv = sweep_csv(sw);
    write_file(fs::path(o.out) / "sweep.csv", csv);
    std::cout << csv;
    return 0;
}

int cmd_tips(const Options& o) {
    TipScoringParams params;
    double cutoff = HUGE_VAL;
    double side_m = 200.0;
    fs::path predictions = o.predictions;
    if (!o.scenario.empty()) {
        const ScenarioSpec spec = load_scenario(o.scenario);
        if (spec.dynamic) {
            params = spec.dynamic->scoring;
            cutoff = spec.dynamic->cutoff;
            side_m = spec.dynamic->side_m;
            if (predictions.empty()) predictions = spec.dynamic->predictions;
        }
    }
    if (predictions.empty()) throw ConfigError("tips needs --predictions or a scenario with dynamic cues");
    if (o.theta) params.theta = *o.theta;
    if (o.alpha) params.alpha = *o.alpha;
    if (o.lead_h) params.delta_lead_h = *o.lead_h;
    if (o.cutoff) cutoff = *o.cutoff;
    validate(params);
    const auto rows = load_predictions_csv(predictions);
    const auto tips = extract_ais_tips(rows, params, cutoff, side_m);
    std::string csv = "time,lat,lon,error_km,score\n";
    for (const auto& t : tips) {
        csv += fmt::format("{:.3f},{:.6f},{:.6f},{:.6f},{:.6f}\n", t.tip.detect_time, t.position.lat_deg,
                           t.position.lon_deg, t.error_km, t.tip.score);
    }
    fs::create_directories(o.out);
    write_file(fs::path(o.out) / "tips.csv", csv);
    std::cout << fmt::format("tips={}\n", tips.size());
    return 0;
}

}  // namespace

Schedule parse_schedule_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        Schedule s;
        for (const auto& e : j.at("entries")) {
            s.entries.push_back({e.at("cue_id").get<std::string>(), e.at("time_s").get<double>(),
                                 e.at("satellite_id").get<std::string>(), e.at("utility").get<double>()});
        }
        s.total_utility = j.at("total_utility").get<double>();
        s.phase_counts = {j.at("binary_search").get<std::size_t>(), j.at("refinement").get<std::size_t>()};
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("schedule document: ") + e.what());
    }
}

int run_cli(int argc, const char* const* argv) {
    setup_logging();
    Options o;
    CLI::App app{"Tip-and-cue tasking: windows, schedules, sweeps and tips"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", o.scenario, "Scenario file (JSON)")->required();
        cmd->add_option("--out", o.out, "Output directory");
        cmd->add_option("--seed", o.seed, "Random seed override");
        cmd->add_option("--eta", o.eta, "Step size (hours per unit gradient)");
        cmd->add_option("--rho", o.rho, "Penalty weight");
        cmd->add_option("--eps", o.eps, "Convergence threshold");
        cmd->add_option("--max-iters", o.max_iters, "Maximum PGD iterations");
        cmd->add_option("--t-img", o.t_img, "Dwell time override for every satellite (s)");
        cmd->add_option("--sampling", o.sampling, "Window sampling mode")
            ->check(CLI::IsMember({"theoretical", "practical", "algorithmic"}));
    };
    auto* windows = app.add_subcommand("windows", "Compute feasible windows");
    add_common(windows);
    auto* sched = app.add_subcommand("schedule", "Schedule the scenario's cues");
    add_common(sched);
    sched->add_option("--lambda", o.lambda, "Ranking balance in [0, 1]");
    auto* sweep = app.add_subcommand("sweep", "Schedule for several lambda values");
    add_common(sweep);
    sweep->add_option("--lambdas", o.lambdas, "Comma-separated lambda values");
    auto* tips = app.add_subcommand("tips", "Extract AIS tips from a prediction file");
    tips->add_option("--predictions", o.predictions, "Prediction CSV");
    tips->add_option("--scenario", o.scenario, "Scenario providing defaults");
    tips->add_option("--out", o.out, "Output directory");
    tips->add_option("--theta", o.theta, "Error threshold (km)");
    tips->add_option("--alpha", o.alpha, "Deviation/urgency balance");
    tips->add_option("--lead", o.lead_h, "Lead time (h)");
    tips->add_option("--cutoff", o.cutoff, "Latest row time considered (s)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (*windows) return cmd_windows(o);
        if (*sched) return cmd_schedule(o);
        if (*sweep) return cmd_sweep(o);
        return cmd_tips(o);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace tipcue
