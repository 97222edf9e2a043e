// One line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <cfloat>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "support.hpp"
#include "tipcue/cli.hpp"
#include "tipcue/scenario.hpp"
#include "tipcue/scheduler.hpp"
#include "tipcue/tips.hpp"
#include "tipcue/visibility.hpp"

using namespace tipcue;

namespace {

constexpr double H = 3600.0;
const GeoPoint kSite{40.5, -73.4};

struct Outcome {
    bool pass{};
    std::string detail;
};

// Every scheduler output produced below is validated here (criterion 4).
struct FeasibilityLog {
    std::size_t checked{};
    std::vector<std::string> failures;

    void check(const Schedule& s, std::span<const Cue> cues, std::span<const WindowSet> w,
               std::span<const Satellite> sats, const std::string& where) {
        ++checked;
        try {
            validate_schedule(s, cues, w, sats);
        } catch (const std::exception& e) {
            failures.push_back(where + ": " + e.what());
        }
    }
} g_feasibility;

std::filesystem::path default_scenario() { return fixture::source_dir() / "scenarios" / "default.json"; }

// --- 1 ----------------------------------------------------------------------

Outcome closed_form() {
    const PenaltyParams fig{5.0, 2.0, 100.0, 0.0};
    struct Check {
        const char* name;
        double got;
        double want;
    };
    const auto g = UtilityFunction::gaussian(5 * H, H, 1.0);
    const Check checks[] = {
        {"kappa(D/2)", kappa(1.5, 3.0, fig), 0.96875 * 0.96875},
        {"kappa(0)", kappa(0.0, 3.0, fig), 1.0},
        {"kappa(D)", kappa(3.0, 3.0, fig), 0.0},
        {"urg(0)", urg_score(0.0), 1.0},
        {"urg(e-1)", urg_score(std::exp(1.0) - 1.0), 0.5},
        {"urg(3)", urg_score(3.0), 1.0 / (1.0 + std::log(4.0))},
        {"tip_score", tip_score({3.0, 0.5, 3.0}, 6.0), 0.25 + 0.5 / (1.0 + std::log(4.0))},
        {"psi(tp+s)", g.value(6 * H), std::exp(-1.0)},
        {"psi(tp-s)", g.value(4 * H), std::exp(-1.0)},
    };
    std::string bad;
    for (const auto& c : checks)
        if (!(std::abs(c.got - c.want) <= 1e-9)) bad += fmt::format(" {}={:.12g}", c.name, c.got);
    if (std::abs(kappa(1.5, 3.0, fig) - 0.938476562) > 1e-9) bad += " kappa literal";
    // The quoted 0.419075 / 0.459538 do not equal 1/(1+ln 4) = 0.4190598 and
    // 0.25 + 0.5/(1+ln 4) = 0.4595299; the formula values are the reference.
    return {bad.empty(), (bad.empty() ? "9 values within 1e-9" : "mismatch:" + bad) +
                             fmt::format("; urg(3)={:.7f}, tip_score={:.7f}", urg_score(3.0),
                                         tip_score({3.0, 0.5, 3.0}, 6.0))};
}

// --- 2 ----------------------------------------------------------------------

Outcome gradients() {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(0, 1);
    double worst_u = 0.0, worst_l = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double s = 0.05 + 0.95 * U(rng);
        UtilityFunction u = UtilityFunction::gaussian(0, 1, 1);
        double t;
        if (k % 2 == 0) {
            const double tp = 66600 + 19740 * U(rng), sigma = (0.5 + 1.5 * U(rng)) * H;
            u = UtilityFunction::gaussian(tp, sigma, s);
            t = tp + (6 * U(rng) - 3) * sigma;
        } else {
            const double t0 = 60000 + 6600 * U(rng);
            u = UtilityFunction::exp_decay(t0, (0.05 + U(rng)) / H, s);
            t = t0 + 1 + 20 * H * U(rng);
        }
        const double h = 1e-2;
        const double fd = (u.unfloored(t + h) - u.unfloored(t - h)) / (2 * h);
        const double a = u.derivative(t);
        const double roundoff = 10 * DBL_EPSILON * u.priority() / h;
        worst_u = std::max(worst_u, std::abs(a - fd) / (std::abs(fd) + roundoff / 1e-5));
    }
    const PenaltyParams p;
    int lchecked = 0;
    for (int inst = 0; inst < 100; ++inst) {
        std::vector<UtilityFunction> us;
        std::vector<double> t;
        for (int k = 0; k < 5; ++k) {
            us.push_back(UtilityFunction::gaussian(70000 + 300 * U(rng), (0.5 + 1.5 * U(rng)) * H, 0.05 + 0.2 * U(rng)));
            t.push_back(70000 + 15 * U(rng));
        }
        std::vector<const UtilityFunction*> ptr;
        for (auto& u : us) ptr.push_back(&u);
        std::vector<FrozenPair> pairs;
        for (std::size_t a = 0; a < 5; ++a)
            for (std::size_t b = a + 1; b < 5; ++b) pairs.push_back({a, b, 1.0 + 4 * U(rng)});
        const auto lg = loss_and_grad(t, ptr, pairs, p, H);
        const double h = 1e-2 / H;  // hours
        for (std::size_t i = 0; i < 5; ++i) {
            bool kink = false;
            for (const auto& pr : pairs) {
                if (pr.a != i && pr.b != i) continue;
                const double d = std::abs(t[pr.a] - t[pr.b]);
                kink |= d < 2e-2 || std::abs(d - pr.delta) < 2e-2;
            }
            if (kink) continue;
            auto tp = t, tm = t;
            tp[i] += h * H;
            tm[i] -= h * H;
            const double fd = (loss_and_grad(tp, ptr, pairs, p, H).loss - loss_and_grad(tm, ptr, pairs, p, H).loss) /
                              (2 * h);
            const double roundoff = 10 * DBL_EPSILON * (std::abs(lg.loss) + p.rho * pairs.size()) / h;
            worst_l = std::max(worst_l, std::abs(lg.grad[i] - fd) / (std::abs(fd) + roundoff / 1e-5));
            ++lchecked;
        }
    }
    const bool ok = worst_u <= 1e-5 && worst_l <= 1e-5;
    return {ok, fmt::format("max rel err utility {:.2e} (1000 samples), loss {:.2e} ({} coordinates)", worst_u, worst_l,
                            lchecked)};
}

// --- 3 ----------------------------------------------------------------------

struct Instance {
    std::vector<Satellite> sats;
    std::vector<Cue> cues;
    std::vector<WindowSet> windows;
};

// Cues scattered over a 30 km square, each seen by a random non-empty subset
// of up to three passes with 90-150 s windows; peaks within an hour of the
// passes so that many initial times pile up on window boundaries.
Instance random_instance(std::uint64_t seed, int max_cues, int max_sats) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0, 1);
    Instance in;
    const int n_sats = 1 + static_cast<int>(U(rng) * max_sats);
    const int n_cues = 2 + static_cast<int>(U(rng) * (max_cues - 1));
    std::vector<std::pair<double, double>> pass;
    for (int s = 0; s < n_sats; ++s) {
        const double tc = 70000 + 900.0 * s + 200 * U(rng);
        const std::string id = "SAT" + std::to_string(s);
        in.sats.push_back(fixture::overhead_sat(id, offset_enu(kSite, (U(rng) - 0.5) * 20000, 0), tc, 500, 30,
                                                4 + 4 * U(rng), 1.0));
        const double half = 45 + 30 * U(rng);
        pass.emplace_back(tc - half, tc + half);
    }
    for (int k = 0; k < n_cues; ++k) {
        const GeoPoint c = offset_enu(kSite, (U(rng) - 0.5) * 30000, (U(rng) - 0.5) * 30000);
        const double tp = 70000 + 900.0 * (n_sats - 1) * U(rng) + (U(rng) - 0.5) * 2 * H;
        in.cues.push_back(fixture::square_cue(fmt::format("c{:02d}", k), c, 300, 0.05 + 0.2 * U(rng), tp,
                                              (0.5 + 1.5 * U(rng)) * H));
        std::vector<TimeInterval> iv;
        for (int s = 0; s < n_sats; ++s) {
            if (U(rng) < 0.6 || (s == n_sats - 1 && iv.empty())) {
                const double a = pass[s].first + 10 * U(rng), b = pass[s].second - 10 * U(rng);
                iv.push_back({a, b, in.sats[s].id});
            }
        }
        in.windows.emplace_back(iv);
    }
    return in;
}

Outcome pgd_convergence() {
    int converged = 0, in_windows = 0, bound = 0, total = 0, worst_iters = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto in = random_instance(1000 + seed, 20, 3);
        const auto ranked = rank(in.cues, in.windows, {0.5});
        const auto r = pgd(ranked, in.cues, in.windows, in.sats, PenaltyParams{}, OptimizerConfig{});
        ++total;
        converged += r.converged;
        in_windows += r.iterates_in_windows;
        bound += r.step_bound_held;
        if (r.converged) worst_iters = std::max(worst_iters, r.iterations);
        const auto s = schedule_with_windows(in.cues, in.windows, in.sats, {0.5}, {}, OptimizerConfig{});
        g_feasibility.check(s.schedule, in.cues, s.windows, in.sats, fmt::format("random instance {}", seed));
    }
    const double rate = static_cast<double>(converged) / total;
    const bool ok = rate >= 0.95 && in_windows == total && bound == total;
    return {ok, fmt::format("converged {}/{} (slowest {} iterations), iterates in windows {}/{}, step bound {}/{}",
                            converged, total, worst_iters, in_windows, total, bound, total)};
}

// --- 5 ----------------------------------------------------------------------

Outcome oracle_comparison() {
    std::vector<double> ratios;
    int beats_greedy = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        std::mt19937_64 rng(5000 + seed);
        std::uniform_real_distribution<double> U(0, 1);
        std::vector<Satellite> sats{fixture::overhead_sat("A", kSite, 70000, 500, 30, 2 + 4 * U(rng), 1.0)};
        const int n = 2 + static_cast<int>(U(rng) * 4);
        std::vector<Cue> cues;
        std::vector<WindowSet> w;
        for (int k = 0; k < n; ++k) {
            const GeoPoint c = offset_enu(kSite, (U(rng) - 0.5) * 30000, (U(rng) - 0.5) * 30000);
            cues.push_back(fixture::square_cue(fmt::format("c{}", k), c, 300, 0.05 + 0.2 * U(rng),
                                               70000 + (U(rng) - 0.5) * 2 * H, (0.5 + 1.5 * U(rng)) * H));
            const double a = 69990 + 6 * U(rng), b = 70004 + 6 * U(rng);
            w.emplace_back(std::vector<TimeInterval>{{a, b, "A"}});
        }
        const auto r = schedule_with_windows(cues, w, sats, {0.5}, {}, OptimizerConfig{});
        g_feasibility.check(r.schedule, cues, r.windows, sats, fmt::format("desk instance {}", seed));
        const auto oracle = brute_force_oracle(cues, r.windows, sats[0], 0.1);
        const auto greedy = greedy_baseline(cues, r.windows, sats[0], r.ranked, 0.1);
        const double u = r.schedule.total_utility;
        ratios.push_back(oracle.utility > 0 ? u / oracle.utility : 1.0);
        beats_greedy += u >= greedy.utility * (1 - 1e-12);
        ++total;
    }
    std::sort(ratios.begin(), ratios.end());
    const double median = 0.5 * (ratios[49] + ratios[50]);
    const bool ok = median >= 0.9 && beats_greedy >= 95;
    return {ok, fmt::format("median U/U_oracle {:.4f} (min {:.4f}, max {:.4f}), U >= greedy on {}/{}", median,
                            ratios.front(), ratios.back(), beats_greedy, total)};
}

// --- 6 ----------------------------------------------------------------------

Outcome default_scenario_scale() {
    auto spec = load_scenario(default_scenario());
    const auto cues = generate_cues(spec);
    std::vector<WindowSet> windows;
    for (const auto& c : cues) windows.push_back(compute_windows(c, spec.satellites, spec.sampling));
    std::size_t feasible = 0;
    for (const auto& w : windows) feasible += !w.empty();

    const double lambdas[] = {0, 0.25, 0.5, 0.75, 1};
    const auto sweep = run_sweep(cues, windows, spec, lambdas);
    bool a = true, b = true, d = true;
    double umin = 1e300, umax = -1e300;
    std::string rows;
    std::size_t violations = 0;
    for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
        const auto& row = sweep.rows[i];
        const auto& run = sweep.runs[i];
        g_feasibility.check(run.schedule, cues, run.windows, spec.satellites, fmt::format("sweep lambda={}", row.lambda));
        a &= row.total >= 0.85 * static_cast<double>(feasible);
        b &= row.refine >= 1;
        umin = std::min(umin, row.u_total);
        umax = std::max(umax, row.u_total);
        for (const auto& ev : run.evaluations) {
            const auto& L = ev.trace;
            for (std::size_t m = 10; m + 1 < L.size(); ++m)
                if (L[m + 1] > L[m] + 0.01 * std::abs(L[m])) ++violations;
        }
        rows += fmt::format(" [{}: {}+{}={} U={:.4f}]", row.lambda, row.binary, row.refine, row.total, row.u_total);
    }
    d = violations == 0;
    const double spread = (umax - umin) / umax;
    const bool c = spread < 0.05;
    const bool windows_ok = [&] {
        for (const auto& sat : spec.satellites) {
            std::vector<TimeInterval> all;
            for (const auto& w : windows)
                for (const auto& iv : w.intervals())
                    if (iv.satellite_id == sat.id) all.push_back({iv.start, iv.end, "*"});
            const auto m = WindowSet(all).merged();
            if (m.size() != 1 || m[0].second - m[0].first < 80 || m[0].second - m[0].first > 90) return false;
        }
        return true;
    }();
    return {a && b && c && d && windows_ok && cues.size() == 104,
            fmt::format("{} cues, {} feasible, one 80-90 s window per satellite: {}; (a) {} (b) {} (c) spread {:.2f}% "
                        "(d) {} trace violations;{}",
                        cues.size(), feasible, windows_ok ? "yes" : "no", a ? "ok" : "FAIL", b ? "ok" : "FAIL",
                        100 * spread, violations, rows)};
}

// --- 7 ----------------------------------------------------------------------

double relative_ground_speed(double alt_km, double incl_deg, double phi_deg) {
    const double R = 6371.0, d2r = 3.14159265358979323846 / 180.0;
    const double a = R + alt_km;
    const double n = std::sqrt(398600.4418 / (a * a * a));
    const double sin_az = std::cos(incl_deg * d2r) / std::cos(phi_deg * d2r);
    const double north = n * std::sqrt(1 - sin_az * sin_az);
    const double east = n * sin_az - 7.2921159e-5 * std::cos(phi_deg * d2r);
    return R * std::sqrt(north * north + east * east);
}

Outcome window_computation() {
    // pass duration for point-like targets under each default pass
    struct Pass {
        GeoPoint target;
        double t;
        double alt;
        double incl;
        bool asc;
    };
    const Pass passes[] = {{{40.4, -73.2}, 69210, 500, 97.4, true},
                           {{40.4, -73.7}, 68220, 500, 97.4, true},
                           {{40.4, -73.4}, 72330, 520, 97.5, false}};
    double worst = 0.0;
    std::string durations;
    for (const auto& p : passes) {
        Satellite sat = fixture::overhead_sat("P", p.target, p.t, p.alt, 25.0, 6.0, 1.0, p.asc);
        sat.ephemeris = overhead_pass(p.target, p.t, p.alt, p.incl, p.asc);
        const auto cue = fixture::square_cue("c", p.target, 10, 0.2, p.t, 4 * H);
        SamplingConfig sc;
        sc.mode = PracticalSampling{2.0};
        sc.horizon_start = p.t - 1000;
        sc.horizon_end = p.t + 1000;
        const auto w = compute_windows(cue, std::span(&sat, 1), sc);
        SatelliteState st;
        st.altitude_km = p.alt;
        const double oracle = 2 * visibility_radius(st, 25.0) / relative_ground_speed(p.alt, p.incl, p.target.lat_deg);
        // [first, last] visible samples: each end within one step of t_pass -/+ D/2
        const double step = base_sampling_step(sc, sat);
        const double lo = w.size() == 1 ? w[0].start : -1e9, hi = w.size() == 1 ? w[0].end : 1e9;
        worst = std::max({worst, std::abs(lo - (p.t - oracle / 2)) / step, std::abs(hi - (p.t + oracle / 2)) / step});
        durations += fmt::format(" {:.1f}/{:.1f}", hi - lo, oracle);
    }

    // algorithmic vs practical on every default cue and satellite
    const auto spec = load_scenario(default_scenario());
    const auto cues = generate_cues(spec);
    SamplingConfig prac = spec.sampling, algo = spec.sampling;
    prac.mode = PracticalSampling{2.0};
    algo.mode = AlgorithmicSampling{};
    std::size_t intervals = 0, uncovered = 0;
    for (const auto& c : cues) {
        const auto wp = compute_windows(c, spec.satellites, prac);
        const auto wa = compute_windows(c, spec.satellites, algo);
        for (const auto& iv : wp.intervals()) {
            ++intervals;
            const auto& sat = *std::find_if(spec.satellites.begin(), spec.satellites.end(),
                                            [&](const Satellite& s) { return s.id == iv.satellite_id; });
            const double step = base_sampling_step(prac, sat);
            bool covered = false;
            for (const auto& jv : wa.intervals())
                covered |= jv.satellite_id == iv.satellite_id && jv.start <= iv.start + step && iv.end - step <= jv.end;
            uncovered += !covered;
        }
    }
    const bool ok = worst <= 1.0 && uncovered == 0 && intervals > 0;
    return {ok, fmt::format("pass durations (got/oracle s){}, worst endpoint offset {:.2f} steps; {} practical intervals, {} not "
                            "covered by algorithmic windows",
                            durations, worst, intervals, uncovered)};
}

// --- 8 ----------------------------------------------------------------------

Outcome determinism() {
    const auto scenario = default_scenario().string();
    std::vector<std::string> json, csv;
    std::ostringstream sink;
    auto* old = std::cout.rdbuf(sink.rdbuf());
    int codes = 0;
    for (int k = 0; k < 2; ++k) {
        const auto dir = fixture::temp_dir(fmt::format("acceptance_det{}", k));
        codes |= run_cli(std::vector<std::string>{"tipcue", "schedule", "--scenario", scenario, "--out", dir.string()});
        codes |= run_cli(std::vector<std::string>{"tipcue", "sweep", "--scenario", scenario, "--out", dir.string()});
        json.push_back(fixture::read_text(dir / "schedule.json"));
        csv.push_back(fixture::read_text(dir / "sweep.csv"));
    }
    std::cout.rdbuf(old);
    const bool ok = codes == 0 && !json[0].empty() && json[0] == json[1] && !csv[0].empty() && csv[0] == csv[1];
    return {ok, fmt::format("schedule.json identical: {}, sweep.csv identical: {}", json[0] == json[1],
                            csv[0] == csv[1])};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> criteria{
        {1, "closed-form values", 1, closed_form},
        {2, "gradient correctness", 10, gradients},
        {3, "PGD convergence", 60, pgd_convergence},
        {5, "oracle comparison", 300, oracle_comparison},
        {6, "default scenario structure", 120, default_scenario_scale},
        {7, "window computation", 30, window_computation},
        {8, "determinism", 1e9, determinism},
    };
    std::vector<std::pair<int, std::string>> lines;
    bool all = true;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_s) {
            o.pass = false;
            o.detail += fmt::format("; over the {:.0f} s budget", c.budget_s);
        }
        all &= o.pass;
        lines.emplace_back(c.id, fmt::format("criterion {} {}: {} ({:.2f} s) {}", c.id, o.pass ? "PASS" : "FAIL", c.name,
                                             secs, o.detail));
    }
    const bool feas = g_feasibility.failures.empty() && g_feasibility.checked > 0;
    all &= feas;
    lines.emplace_back(4, fmt::format("criterion 4 {}: exact feasibility ({} schedules validated){}",
                                      feas ? "PASS" : "FAIL", g_feasibility.checked,
                                      g_feasibility.failures.empty() ? "" : "; first failure: " + g_feasibility.failures.front()));
    std::sort(lines.begin(), lines.end());
    for (const auto& [id, line] : lines) std::cout << line << '\n';
    return all ? 0 : 1;
}
