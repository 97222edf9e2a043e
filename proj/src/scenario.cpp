#include "tipcue/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "tipcue/error.hpp"

namespace tipcue {

using nlohmann::json;

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
    return g.next();
}

namespace {

void check_bounds(const Bounds& b, const char* what) {
    if (!(std::isfinite(b.lo) && std::isfinite(b.hi) && b.lo <= b.hi)) {
        throw ConfigError(fmt::format("{} range must satisfy lo <= hi", what));
    }
}

// Days from 1970-01-01 to y-m-d in the proleptic Gregorian calendar.
long days_from_civil(long y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

}  // namespace

double parse_iso8601(const std::string& s) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, n = 0;
    double sec = 0.0;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%lf%n", &y, &mo, &d, &h, &mi, &sec, &n) != 6 ||
        static_cast<std::size_t>(n) + 1 != s.size() || s.back() != 'Z' || mo < 1 || mo > 12 || d < 1 ||
        d > 31 || h > 23 || mi > 59 || sec < 0.0 || sec >= 61.0) {
        throw ConfigError("invalid ISO-8601 UTC time: " + s);
    }
    return static_cast<double>(days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d))) * 86400.0 +
           h * 3600.0 + mi * 60.0 + sec;
}

std::string format_iso8601(double unix_seconds) {
    const double whole = std::floor(unix_seconds);
    long long ms = std::llround((unix_seconds - whole) * 1000.0);
    auto secs = static_cast<std::time_t>(whole);
    if (ms == 1000) {
        ms = 0;
        ++secs;
    }
    std::tm tm{};
    gmtime_r(&secs, &tm);
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                       tm.tm_hour, tm.tm_min, tm.tm_sec, ms);
}

void validate(const ScenarioSpec& spec) {
    parse_iso8601(spec.epoch);
    if (!(spec.horizon_start <= spec.horizon_end)) throw ConfigError("horizon end precedes start");
    check_bounds(spec.lat, "latitude");
    check_bounds(spec.lon, "longitude");
    if (spec.lat.lo < -90.0 || spec.lat.hi > 90.0 || spec.lon.lo < -180.0 || spec.lon.hi > 180.0) {
        throw ConfigError("region bounds outside valid coordinates");
    }
    const auto& st = spec.statics;
    check_bounds(st.side_m, "static side");
    check_bounds(st.priority, "static priority");
    check_bounds(st.peak, "static peak");
    check_bounds(st.sigma_h, "static sigma");
    if (st.count > 0) {
        if (!(st.side_m.lo > 0.0)) throw ConfigError("static side lengths must be positive");
        if (!(st.priority.lo >= 0.0 && st.priority.hi <= 1.0)) throw ConfigError("static priorities must lie in [0, 1]");
        if (!(st.sigma_h.lo > 0.0)) throw ConfigError("static sigma must be positive");
    }
    if (spec.dynamic) {
        validate(spec.dynamic->scoring);
        if (!(spec.dynamic->decay_per_h > 0.0)) throw ConfigError("dynamic decay rate must be positive");
        if (!(spec.dynamic->side_m > 0.0)) throw ConfigError("dynamic side must be positive");
        if (!(spec.dynamic->track_step_s > 0.0)) throw ConfigError("track step must be positive");
    }
    validate(spec.constraints);
    for (const auto& s : spec.satellites) validate(s);
    for (std::size_t i = 0; i < spec.satellites.size(); ++i) {
        for (std::size_t j = i + 1; j < spec.satellites.size(); ++j) {
            if (spec.satellites[i].id == spec.satellites[j].id) {
                throw ConfigError("duplicate satellite id: " + spec.satellites[i].id);
            }
        }
    }
    validate(spec.ranking);
    validate(spec.penalty);
    validate(spec.optimizer);
}

namespace {

Bounds read_bounds(const json& j) {
    if (!j.is_array() || j.size() != 2) throw ConfigError("expected a [lo, hi] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

template <class T>
void read_opt(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

Satellite read_satellite(const json& j, const std::filesystem::path& base) {
    Satellite s;
    s.id = j.at("id").get<std::string>();
    s.sensor_type = parse_sensor_type(j.value("sensor", std::string("EO")));
    s.gsd_nadir_cm = j.at("gsd_nadir_cm").get<double>();
    s.slew_rate_deg_s = j.at("slew_rate_deg_s").get<double>();
    s.dwell_time_s = j.value("dwell_time_s", 1.0);
    s.max_off_nadir_deg = j.value("max_off_nadir_deg", 90.0);
    const json& orbit = j.at("orbit");
    if (orbit.contains("overhead_pass")) {
        const json& o = orbit.at("overhead_pass");
        s.ephemeris = overhead_pass({o.at("lat").get<double>(), o.at("lon").get<double>()}, o.at("time").get<double>(),
                                    o.at("alt_km").get<double>(), o.at("inclination_deg").get<double>(),
                                    o.value("ascending", false));
    } else if (orbit.contains("kepler")) {
        const json& o = orbit.at("kepler");
        KeplerElements k{o.at("a_km").get<double>(),   o.value("e", 0.0),         o.at("i_deg").get<double>(),
                         o.value("raan_deg", 0.0),     o.value("argp_deg", 0.0), o.value("mean_anomaly_deg", 0.0),
                         o.value("epoch", 0.0)};
        validate(k);
        s.ephemeris = k;
    } else if (orbit.contains("ephemeris_csv")) {
        std::filesystem::path p = orbit.at("ephemeris_csv").get<std::string>();
        if (p.is_relative()) p = base / p;
        s.ephemeris = EphemerisTable::load_csv(p);
    } else {
        throw ConfigError("satellite " + s.id + ": orbit needs overhead_pass, kepler or ephemeris_csv");
    }
    return s;
}

SamplingConfig read_sampling(const json& j) {
    SamplingConfig sc;
    const std::string mode = j.value("mode", std::string("algorithmic"));
    if (mode == "theoretical") {
        TheoreticalSampling m;
        read_opt(j, "d_min_m", m.d_min_m);
        sc.mode = m;
    } else if (mode == "practical") {
        PracticalSampling m;
        read_opt(j, "safety_factor", m.safety_factor);
        sc.mode = m;
    } else if (mode == "algorithmic") {
        AlgorithmicSampling m;
        read_opt(j, "initial_rate_hz", m.initial_rate_hz);
        read_opt(j, "midpoints_per_gap", m.midpoints_per_gap);
        read_opt(j, "max_doublings", m.max_doublings);
        sc.mode = m;
    } else {
        throw ConfigError("unknown sampling mode: " + mode);
    }
    return sc;
}

}  // namespace

ScenarioSpec parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
    ScenarioSpec spec;
    try {
        const json j = json::parse(text);
        read_opt(j, "epoch", spec.epoch);
        read_opt(j, "seed", spec.seed);
        if (j.contains("horizon")) {
            const Bounds h = read_bounds(j.at("horizon"));
            spec.horizon_start = h.lo;
            spec.horizon_end = h.hi;
        }
        if (j.contains("region")) {
            spec.lat = read_bounds(j.at("region").at("lat"));
            spec.lon = read_bounds(j.at("region").at("lon"));
        }
        if (j.contains("static")) {
            const json& s = j.at("static");
            read_opt(s, "count", spec.statics.count);
            if (s.contains("side_m")) spec.statics.side_m = read_bounds(s.at("side_m"));
            if (s.contains("priority")) spec.statics.priority = read_bounds(s.at("priority"));
            if (s.contains("peak")) spec.statics.peak = read_bounds(s.at("peak"));
            if (s.contains("sigma_h")) spec.statics.sigma_h = read_bounds(s.at("sigma_h"));
        }
        if (j.contains("dynamic") && !j.at("dynamic").is_null()) {
            const json& d = j.at("dynamic");
            DynamicCueSpec dyn;
            dyn.predictions = d.at("predictions").get<std::string>();
            if (dyn.predictions.is_relative()) dyn.predictions = base_dir / dyn.predictions;
            read_opt(d, "theta_km", dyn.scoring.theta);
            read_opt(d, "alpha", dyn.scoring.alpha);
            read_opt(d, "lead_h", dyn.scoring.delta_lead_h);
            read_opt(d, "decay_per_h", dyn.decay_per_h);
            read_opt(d, "side_m", dyn.side_m);
            read_opt(d, "cutoff", dyn.cutoff);
            read_opt(d, "track_step_s", dyn.track_step_s);
            spec.dynamic = dyn;
        }
        if (j.contains("constraints")) {
            const json& c = j.at("constraints");
            if (c.contains("sensor")) spec.constraints.sensor_type = parse_sensor_type(c.at("sensor").get<std::string>());
            read_opt(c, "max_cloud_cover", spec.constraints.max_cloud_cover);
            read_opt(c, "max_gsd_cm", spec.constraints.max_gsd_cm);
            read_opt(c, "max_off_nadir_deg", spec.constraints.max_off_nadir_deg);
        }
        for (const auto& s : j.value("satellites", json::array())) spec.satellites.push_back(read_satellite(s, base_dir));
        if (j.contains("sampling")) spec.sampling = read_sampling(j.at("sampling"));
        if (j.contains("ranking")) read_opt(j.at("ranking"), "lambda", spec.ranking.lambda);
        if (j.contains("optimizer")) {
            const json& o = j.at("optimizer");
            read_opt(o, "eta", spec.optimizer.eta);
            read_opt(o, "epsilon", spec.optimizer.epsilon);
            read_opt(o, "max_iters", spec.optimizer.max_iters);
            read_opt(o, "rho", spec.penalty.rho);
            read_opt(o, "r", spec.penalty.r);
            read_opt(o, "beta", spec.penalty.beta);
            read_opt(o, "margin", spec.penalty.margin);
            if (o.contains("lipschitz")) spec.optimizer.lipschitz_estimate = o.at("lipschitz").get<double>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    spec.sampling.horizon_start = spec.horizon_start;
    spec.sampling.horizon_end = spec.horizon_end;
    validate(spec);
    return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_scenario(ss.str(), path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::vector<Cue> generate_static(const ScenarioSpec& spec, std::uint64_t seed) {
    const auto& st = spec.statics;
    std::vector<Cue> cues;
    cues.reserve(st.count);
    for (std::size_t n = 0; n < st.count; ++n) {
        SplitMix64 rng(derive_seed(seed, n));
        const GeoPoint center{rng.uniform(spec.lat.lo, spec.lat.hi), rng.uniform(spec.lon.lo, spec.lon.hi)};
        const double w = rng.uniform(st.side_m.lo, st.side_m.hi);
        const double h = rng.uniform(st.side_m.lo, st.side_m.hi);
        const double s = rng.uniform(st.priority.lo, st.priority.hi);
        const double peak = rng.uniform(st.peak.lo, st.peak.hi);
        const double sigma = rng.uniform(st.sigma_h.lo, st.sigma_h.hi) * kSecondsPerHour;
        cues.push_back(build_static_cue(fmt::format("S{:03}", n + 1), center, w, h, s, peak, sigma, spec.constraints));
    }
    return cues;
}

std::vector<std::pair<Tip, Cue>> generate_dynamic(const ScenarioSpec& spec) {
    std::vector<std::pair<Tip, Cue>> out;
    if (!spec.dynamic) return out;
    const auto& d = *spec.dynamic;
    const auto rows = load_predictions_csv(d.predictions);
    const auto tips = extract_ais_tips(rows, d.scoring, d.cutoff, d.side_m);
    for (std::size_t n = 0; n < tips.size(); ++n) {
        auto track = tip_trajectory(tips[n], rows, spec.horizon_end, d.track_step_s);
        out.emplace_back(tips[n].tip, build_dynamic_cue(fmt::format("D{}", n + 1), tips[n].tip, std::move(track),
                                                        d.decay_per_h, d.side_m, spec.constraints));
    }
    return out;
}

std::vector<Cue> generate_cues(const ScenarioSpec& spec) {
    std::vector<Cue> cues;
    for (auto& [tip, cue] : generate_dynamic(spec)) cues.push_back(std::move(cue));
    for (auto& c : generate_static(spec, spec.seed)) cues.push_back(std::move(c));
    return cues;
}

SweepResult run_sweep(std::span<const Cue> cues, std::span<const WindowSet> windows, const ScenarioSpec& spec,
                      std::span<const double> lambdas) {
    SweepResult out;
    for (double lambda : lambdas) {
        ScheduleResult r = schedule_with_windows(cues, {windows.begin(), windows.end()}, spec.satellites,
                                                 RankingParams{lambda}, spec.penalty, spec.optimizer);
        const auto& pc = r.schedule.phase_counts;
        out.rows.push_back({lambda, pc.binary_search, pc.refinement, r.schedule.entries.size(),
                            r.schedule.total_utility});
        out.runs.push_back(std::move(r));
    }
    return out;
}

SweepResult run_sweep(const ScenarioSpec& spec, std::span<const double> lambdas) {
    const auto cues = generate_cues(spec);
    WindowComputer wc(spec.satellites, spec.sampling);
    std::vector<WindowSet> windows;
    for (const auto& c : cues) windows.push_back(wc.windows_for(c));
    return run_sweep(cues, windows, spec, lambdas);
}

std::string sweep_csv(const SweepResult& r) {
    std::string s = "lambda,binary,refine,total,u_total\n";
    for (const auto& row : r.rows) {
        s += fmt::format("{},{},{},{},{:.6f}\n", row.lambda, row.binary, row.refine, row.total, row.u_total);
    }
    return s;
}

namespace {

// Grid candidates of one cue with everything the separation test needs.
struct Candidate {
    double time;
    double utility;
    Vec3 sat_pos;
    Vec3 center;
};

std::vector<std::vector<Candidate>> build_grid(std::span<const Cue> cues, std::span<const WindowSet> windows,
                                               const Satellite& sat, double grid_step, std::size_t budget) {
    if (!(grid_step > 0.0)) throw ConfigError("grid step must be positive");
    std::size_t total = 0;
    for (const auto& w : windows) {
        for (const auto& iv : w.intervals()) {
            if (iv.satellite_id == sat.id) total += static_cast<std::size_t>(iv.length() / grid_step) + 2;
        }
    }
    if (total > budget) throw Error(fmt::format("oracle grid of {} points exceeds budget {}", total, budget));
    std::vector<std::vector<Candidate>> grid(cues.size());
    for (std::size_t i = 0; i < cues.size(); ++i) {
        for (const auto& iv : windows[i].intervals()) {
            if (iv.satellite_id != sat.id) continue;
            std::vector<double> ts;
            for (std::size_t k = 0;; ++k) {
                const double t = iv.start + static_cast<double>(k) * grid_step;
                if (t > iv.end) break;
                ts.push_back(t);
            }
            if (ts.back() != iv.end) ts.push_back(iv.end);
            for (double t : ts) {
                grid[i].push_back({t, cues[i].utility.value(t), propagate(sat.ephemeris, t).position,
                                   to_ecef(cues[i].footprint.center_at(t), 0.0)});
            }
        }
        // Best first, earliest among equals.
        std::stable_sort(grid[i].begin(), grid[i].end(), [](const Candidate& a, const Candidate& b) {
            return a.utility != b.utility ? a.utility > b.utility : a.time < b.time;
        });
    }
    return grid;
}

bool separated(const Candidate& a, const Candidate& b, const Satellite& sat) {
    const double d = std::abs(a.time - b.time);
    const Vec3& p = a.time <= b.time ? a.sat_pos : b.sat_pos;
    const double gamma = angle_between(a.center - p, b.center - p) * kRadToDeg;
    return d >= SeparationModel::of(sat).buffer(gamma);
}

}  // namespace

OracleResult brute_force_oracle(std::span<const Cue> cues, std::span<const WindowSet> windows,
                                const Satellite& sat, double grid_step, std::size_t budget) {
    if (cues.size() > 6) throw ConfigError("brute-force oracle handles at most 6 cues");
    const auto grid = build_grid(cues, windows, sat, grid_step, budget);
    const std::size_t n = cues.size();
    std::vector<double> rest(n + 1, 0.0);  // sum of best utilities of cues i..n-1
    for (std::size_t i = n; i-- > 0;) rest[i] = rest[i + 1] + (grid[i].empty() ? 0.0 : grid[i].front().utility);

    OracleResult best;
    std::vector<const Candidate*> chosen(n, nullptr);
    double best_u = -1.0;
    auto search = [&](auto&& self, std::size_t i, double u) -> void {
        if (i == n) {
            if (u > best_u) {
                best_u = u;
                best.cues.clear();
                best.times.clear();
                for (std::size_t k = 0; k < n; ++k) {
                    if (!chosen[k]) continue;
                    best.cues.push_back(k);
                    best.times.push_back(chosen[k]->time);
                }
            }
            return;
        }
        if (u + rest[i] <= best_u) return;
        for (const auto& c : grid[i]) {
            if (u + c.utility + rest[i + 1] <= best_u) break;
            bool ok = true;
            for (std::size_t k = 0; k < i && ok; ++k) {
                if (chosen[k]) ok = separated(*chosen[k], c, sat);
            }
            if (!ok) continue;
            chosen[i] = &c;
            self(self, i + 1, u + c.utility);
            chosen[i] = nullptr;
        }
        self(self, i + 1, u);
    };
    search(search, 0, 0.0);
    best.utility = std::max(best_u, 0.0);
    return best;
}

OracleResult greedy_baseline(std::span<const Cue> cues, std::span<const WindowSet> windows,
                             const Satellite& sat, std::span<const std::size_t> order, double grid_step,
                             std::size_t budget) {
    const auto grid = build_grid(cues, windows, sat, grid_step, budget);
    std::vector<const Candidate*> placed;
    OracleResult out;
    for (std::size_t i : order) {
        for (const auto& c : grid[i]) {
            const bool ok = std::all_of(placed.begin(), placed.end(),
                                        [&](const Candidate* p) { return separated(*p, c, sat); });
            if (!ok) continue;
            placed.push_back(&c);
            out.cues.push_back(i);
            out.times.push_back(c.time);
            out.utility += c.utility;
            break;
        }
    }
    return out;
}

}  // namespace tipcue
