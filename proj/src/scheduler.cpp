#include "tipcue/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <string_view>
#include <tuple>

#include "tipcue/error.hpp"

namespace tipcue {

namespace {

std::size_t satellite_index(std::span<const Satellite> sats, std::string_view id) {
    for (std::size_t k = 0; k < sats.size(); ++k) {
        if (sats[k].id == id) return k;
    }
    throw Error("unknown satellite: " + std::string(id));
}

// Largest buffer a satellite can ever need: dwell plus a half-turn slew.
double max_buffer(const Satellite& sat) { return sat.dwell_time_s + 180.0 / sat.slew_rate_deg_s; }

Vec3 centroid_ecef(const Cue& c, double t) { return to_ecef(c.footprint.center_at(t), 0.0); }

double buffer_from(const Vec3& sat_pos, const Vec3& ci, const Vec3& cj, const Satellite& sat) {
    const double gamma = angle_between(ci - sat_pos, cj - sat_pos) * kRadToDeg;
    return SeparationModel::of(sat).buffer(gamma);
}

bool in_window_of(const WindowSet& w, double t, std::string_view sat_id) {
    return std::any_of(w.intervals().begin(), w.intervals().end(),
                       [&](const TimeInterval& iv) { return iv.satellite_id == sat_id && iv.contains(t); });
}

}  // namespace

void validate(const RankingParams& p) {
    if (!(p.lambda >= 0.0 && p.lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
}

void validate(const PenaltyParams& p) {
    if (!(p.r > 0.0)) throw ConfigError("penalty exponent r must be positive");
    if (!(p.beta >= 2.0)) throw ConfigError("penalty exponent beta must be at least 2");
    if (!(p.rho > 0.0)) throw ConfigError("penalty weight rho must be positive");
    if (!(p.margin >= 0.0)) throw ConfigError("separation margin must be non-negative");
}

void validate(const OptimizerConfig& oc) {
    if (!(oc.eta > 0.0)) throw ConfigError("step size eta must be positive");
    if (!(oc.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (oc.max_iters < 1) throw ConfigError("max iterations must be at least 1");
    if (oc.lipschitz_estimate && !(*oc.lipschitz_estimate > 0.0)) {
        throw ConfigError("Lipschitz estimate must be positive");
    }
    if (!(oc.time_unit_s > 0.0)) throw ConfigError("time unit must be positive");
}

double availability(std::size_t i, std::span<const WindowSet> windows) {
    if (windows[i].empty()) throw Error("availability of a cue without windows");
    const std::size_t n = windows.size();
    if (n < 2) return 1.0;
    const auto wi = windows[i].merged();
    const double mi = windows[i].measure();
    if (mi <= 0.0) return 1.0;
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const auto wj = windows[j].merged();
        sum += overlap_length(wi, wj) / mi;
    }
    return std::clamp(1.0 - sum / static_cast<double>(n - 1), 0.0, 1.0);
}

std::vector<std::size_t> rank(std::span<const Cue> cues, std::span<const WindowSet> windows,
                              const RankingParams& p) {
    validate(p);
    std::vector<std::size_t> idx;
    std::vector<WindowSet> present;
    for (std::size_t i = 0; i < cues.size(); ++i) {
        if (windows[i].empty()) continue;
        idx.push_back(i);
        present.push_back(windows[i]);
    }
    std::vector<double> score(cues.size(), 0.0);
    for (std::size_t n = 0; n < idx.size(); ++n) {
        const std::size_t i = idx[n];
        const double umax = cues[i].utility.value(init_time(cues[i], windows[i]).time);
        score[i] = p.lambda * availability(n, present) + (1.0 - p.lambda) * umax;
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (score[a] != score[b]) return score[a] > score[b];
        return cues[a].id < cues[b].id;
    });
    return idx;
}

double slew_angle_deg(double ti, double tj, const Cue& cue_i, const Cue& cue_j, const Satellite& sat) {
    const SatelliteState s = propagate(sat.ephemeris, std::min(ti, tj));
    return angle_between(centroid_ecef(cue_i, ti) - s.position, centroid_ecef(cue_j, tj) - s.position) * kRadToDeg;
}

double delta_ij(double ti, double tj, const Cue& cue_i, const Cue& cue_j, const Satellite& sat) {
    const SatelliteState s = propagate(sat.ephemeris, std::min(ti, tj));
    return buffer_from(s.position, centroid_ecef(cue_i, ti), centroid_ecef(cue_j, tj), sat);
}

double kappa(double d, double delta, const PenaltyParams& p) {
    if (d >= delta) return 0.0;
    const double x = d / delta;
    return std::pow(1.0 - std::pow(x, p.r), p.beta);
}

double kappa_slope(double d, double delta, const PenaltyParams& p) {
    if (d >= delta) return 0.0;
    const double x = d / delta;
    const double xr1 = (p.r == 1.0) ? 1.0 : std::pow(x, p.r - 1.0);
    return -p.beta * p.r * xr1 * std::pow(1.0 - std::pow(x, p.r), p.beta - 1.0) / delta;
}

double kappa_curvature_bound(const PenaltyParams& p) {
    // g(x) = (1 - x^r)^beta,
    // g'' = beta r x^(r-2) (1-x^r)^(beta-2) [ (beta-1) r x^r - (r-1)(1-x^r) ]
    double best = 0.0;
    constexpr int n = 4000;
    for (int k = 0; k <= n; ++k) {
        const double x = 1e-3 + (1.0 - 1e-3) * k / n;
        const double xr = std::pow(x, p.r);
        const double bracket = (p.beta - 1.0) * p.r * xr - (p.r - 1.0) * (1.0 - xr);
        const double g2 = p.beta * p.r * std::pow(x, p.r - 2.0) * std::pow(1.0 - xr, p.beta - 2.0) * bracket;
        if (std::isfinite(g2)) best = std::max(best, std::abs(g2));
    }
    return best;
}

double penalty(const Assignment& a, std::span<const Cue> cues, std::span<const Satellite> sats,
               const PenaltyParams& p) {
    double total = 0.0;
    for (std::size_t x = 0; x < a.cues.size(); ++x) {
        for (std::size_t y = x + 1; y < a.cues.size(); ++y) {
            if (a.sats[x] != a.sats[y]) continue;
            const Satellite& sat = sats[a.sats[x]];
            const double d = std::abs(a.times[x] - a.times[y]);
            if (d >= max_buffer(sat)) continue;
            total += kappa(d, delta_ij(a.times[x], a.times[y], cues[a.cues[x]], cues[a.cues[y]], sat), p);
        }
    }
    return total;
}

std::vector<FrozenPair> freeze_pairs(const Assignment& a, std::span<const Cue> cues,
                                     std::span<const Satellite> sats, const PenaltyParams& p) {
    const std::size_t n = a.cues.size();
    std::vector<Vec3> sat_pos(n), center(n);
    for (std::size_t x = 0; x < n; ++x) {
        sat_pos[x] = propagate(sats[a.sats[x]].ephemeris, a.times[x]).position;
        center[x] = centroid_ecef(cues[a.cues[x]], a.times[x]);
    }
    std::vector<FrozenPair> pairs;
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = x + 1; y < n; ++y) {
            if (a.sats[x] != a.sats[y]) continue;
            const Satellite& sat = sats[a.sats[x]];
            if (std::abs(a.times[x] - a.times[y]) >= max_buffer(sat) * (1.0 + p.margin)) continue;
            const std::size_t first = a.times[y] < a.times[x] ? y : x;
            const double delta = buffer_from(sat_pos[first], center[x], center[y], sat);
            pairs.push_back({x, y, delta * (1.0 + p.margin)});
        }
    }
    return pairs;
}

LossGrad loss_and_grad(std::span<const double> times, std::span<const UtilityFunction* const> utils,
                       std::span<const FrozenPair> pairs, const PenaltyParams& p, double time_unit_s) {
    LossGrad out{0.0, std::vector<double>(times.size(), 0.0)};
    for (std::size_t i = 0; i < times.size(); ++i) {
        out.loss -= utils[i]->unfloored(times[i]);
        out.grad[i] = -utils[i]->derivative(times[i]) * time_unit_s;
    }
    for (const auto& pr : pairs) {
        const double ta = times[pr.a], tb = times[pr.b];
        const double d = std::abs(ta - tb);
        if (d >= pr.delta) continue;
        out.loss += p.rho * kappa(d, pr.delta, p);
        const double slope = p.rho * kappa_slope(d, pr.delta, p) * time_unit_s;
        // d|ta - tb|/dta: -1 when a is earlier (or tied, a listed first).
        const double sign_a = (ta < tb || (ta == tb && pr.a < pr.b)) ? -1.0 : 1.0;
        out.grad[pr.a] += slope * sign_a;
        out.grad[pr.b] -= slope * sign_a;
    }
    return out;
}

std::optional<double> argmax_over(const UtilityFunction& u, std::span<const Range> ranges) {
    std::optional<double> best;
    double best_val = -HUGE_VAL;
    auto consider = [&](double t) {
        const double v = u.unfloored(t);
        if (v > best_val || (v == best_val && t < *best)) {
            best = t;
            best_val = v;
        }
    };
    const auto peak = u.stationary_point();
    for (const auto& [lo, hi] : ranges) {
        consider(lo);
        consider(hi);
        if (peak && *peak > lo && *peak < hi) consider(*peak);
    }
    return best;
}

Projection init_time(const Cue& cue, const WindowSet& windows) {
    if (windows.empty()) throw Error("no feasible window");
    Projection best{};
    double best_val = -HUGE_VAL;
    for (std::size_t k = 0; k < windows.size(); ++k) {
        const Range r{windows[k].start, windows[k].end};
        const double t = *argmax_over(cue.utility, std::span<const Range>(&r, 1));
        const double v = cue.utility.unfloored(t);
        if (v > best_val || (v == best_val && t < best.time)) {
            best = {t, k};
            best_val = v;
        }
    }
    return best;
}

PgdResult pgd(std::span<const std::size_t> members, std::span<const Cue> cues,
              std::span<const WindowSet> windows, std::span<const Satellite> sats,
              const PenaltyParams& p, const OptimizerConfig& oc) {
    validate(p);
    validate(oc);
    const std::size_t n = members.size();
    const double unit = oc.time_unit_s;
    PgdResult res;
    Assignment& a = res.solution;
    a.cues.assign(members.begin(), members.end());
    a.times.resize(n);
    a.sats.resize(n);
    std::vector<const UtilityFunction*> utils(n);
    std::vector<std::vector<std::size_t>> interval_sat(n);

    double lip_util = 0.0;
    double min_dwell = HUGE_VAL;
    for (std::size_t x = 0; x < n; ++x) {
        const Cue& c = cues[members[x]];
        const WindowSet& w = windows[members[x]];
        utils[x] = &c.utility;
        for (const auto& iv : w.intervals()) interval_sat[x].push_back(satellite_index(sats, iv.satellite_id));
        const Projection start = init_time(c, w);
        a.times[x] = start.time;
        a.sats[x] = interval_sat[x][start.interval];
        lip_util = std::max(lip_util, c.utility.lipschitz_bound(unit));
        for (std::size_t k : interval_sat[x]) min_dwell = std::min(min_dwell, sats[k].dwell_time_s);
    }
    if (n == 0) {
        res.converged = true;
        return res;
    }

    // L' = max(L_util, L_pen) with the penalty curvature taken at the smallest
    // frozen buffer, so the step adapts as the buffers change.
    const double curvature = kappa_curvature_bound(p);
    const double floor_sep = min_dwell * (1.0 + p.margin);
    res.step_size = HUGE_VAL;
    auto step_for = [&](const std::vector<FrozenPair>& pairs) {
        double lip = 0.0;
        if (oc.lipschitz_estimate) {
            lip = *oc.lipschitz_estimate;
        } else {
            double sep = HUGE_VAL;
            for (const auto& pr : pairs) sep = std::min(sep, pr.delta);
            sep = std::max(sep, floor_sep) / unit;
            const double lip_pen = pairs.empty() ? 0.0 : 2.0 * p.rho * curvature / (sep * sep);
            lip = std::max(lip_util, lip_pen);
        }
        const double eta = oc.eta * lip < 1.0 ? oc.eta : 0.9 / lip;
        if (!(eta * lip < 1.0)) res.step_bound_held = false;
        res.lipschitz = std::max(res.lipschitz, lip);
        res.step_size = std::min(res.step_size, eta);
        return eta;
    };

    auto project = [&](std::size_t x, double t) {
        const WindowSet& w = windows[a.cues[x]];
        const Projection pr = w.project(t, sats[a.sats[x]].id);
        return std::pair{pr.time, interval_sat[x][pr.interval]};
    };
    // Norm of the gradient mapping (t - P(t - eta g)) / eta, expressed per
    // second like loss_and_grad's default output.
    auto mapping_norm = [&](const std::vector<double>& g, double eta) {
        double s = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            const double moved = project(x, a.times[x] - eta * g[x] * unit).first;
            const double gm = (a.times[x] - moved) / (eta * unit * unit);
            s += gm * gm;
        }
        return std::sqrt(s);
    };

    auto frozen = freeze_pairs(a, cues, sats, p);
    LossGrad lg = loss_and_grad(a.times, utils, frozen, p, unit);
    double eta = step_for(frozen);
    res.trace.push_back(lg.loss);
    res.final_grad_norm = mapping_norm(lg.grad, eta);
    if (res.final_grad_norm < oc.epsilon) {
        res.converged = true;
        return res;
    }
    for (int m = 1; m <= oc.max_iters; ++m) {
        for (std::size_t x = 0; x < n; ++x) {
            const auto [t, k] = project(x, a.times[x] - eta * lg.grad[x] * unit);
            a.times[x] = t;
            a.sats[x] = k;
            if (!in_window_of(windows[a.cues[x]], t, sats[k].id)) res.iterates_in_windows = false;
        }
        res.iterations = m;
        frozen = freeze_pairs(a, cues, sats, p);
        lg = loss_and_grad(a.times, utils, frozen, p, unit);
        eta = step_for(frozen);
        res.trace.push_back(lg.loss);
        res.final_grad_norm = mapping_norm(lg.grad, eta);
        if (res.final_grad_norm < oc.epsilon) {
            res.converged = true;
            break;
        }
    }
    return res;
}

bool exactly_feasible(const Assignment& a, std::span<const Cue> cues, std::span<const WindowSet> windows,
                      std::span<const Satellite> sats) {
    for (std::size_t x = 0; x < a.cues.size(); ++x) {
        if (!in_window_of(windows[a.cues[x]], a.times[x], sats[a.sats[x]].id)) return false;
    }
    for (std::size_t x = 0; x < a.cues.size(); ++x) {
        for (std::size_t y = x + 1; y < a.cues.size(); ++y) {
            if (a.sats[x] != a.sats[y]) continue;
            const Satellite& sat = sats[a.sats[x]];
            const double d = std::abs(a.times[x] - a.times[y]);
            if (d >= max_buffer(sat)) continue;
            if (d < delta_ij(a.times[x], a.times[y], cues[a.cues[x]], cues[a.cues[y]], sat)) return false;
        }
    }
    return true;
}

BinarySearchResult binary_search_prefix(std::span<const std::size_t> ranked, std::span<const Cue> cues,
                                        std::span<const WindowSet> windows, std::span<const Satellite> sats,
                                        const PenaltyParams& p, const OptimizerConfig& oc) {
    BinarySearchResult out;
    std::size_t k_min = 1, k_max = ranked.size();
    while (k_min <= k_max) {
        const std::size_t k = (k_min + k_max) / 2;
        PgdResult r = pgd(ranked.first(k), cues, windows, sats, p, oc);
        const bool ok = exactly_feasible(r.solution, cues, windows, sats);
        out.evaluations.push_back({k, ok, r.converged, r.iterations, r.trace});
        if (ok) {
            out.k_star = k;
            out.solution = r.solution;
            out.best = std::move(r);
            k_min = k + 1;
        } else {
            k_max = k - 1;
        }
    }
    return out;
}

namespace {

struct Placement {
    double utility{};
    double time{};
    std::size_t sat{};
};

// Best exactly separated time for cue `ci` against the members of `a`
// (member `skip` ignored). Forbidden zones are widened by `margin`, then
// grown until the exact check passes.
std::optional<Placement> best_placement(const Assignment& a, std::size_t ci, std::optional<std::size_t> skip,
                                        std::span<const Cue> cues, std::span<const WindowSet> windows,
                                        std::span<const Satellite> sats, double margin) {
    constexpr int kMaxWiden = 64;
    const Cue& cue = cues[ci];
    std::optional<std::tuple<double, double, std::size_t>> best;  // (-utility, time, sat)
    for (const auto& iv : windows[ci].intervals()) {
        const std::size_t k = satellite_index(sats, iv.satellite_id);
        const Satellite& sat = sats[k];
        std::vector<std::size_t> others;
        std::vector<double> half;
        for (std::size_t x = 0; x < a.cues.size(); ++x) {
            if (a.sats[x] != k || (skip && x == *skip)) continue;
            const double tj = a.times[x];
            const double near = std::clamp(tj, iv.start, iv.end);
            others.push_back(x);
            half.push_back(delta_ij(near, tj, cue, cues[a.cues[x]], sat) * (1.0 + margin));
        }
        for (int iter = 0; iter < kMaxWiden; ++iter) {
            std::vector<Range> forbidden;
            for (std::size_t o = 0; o < others.size(); ++o) {
                const double tj = a.times[others[o]];
                forbidden.emplace_back(tj - half[o], tj + half[o]);
            }
            const auto survivors = subtract_ranges({iv.start, iv.end}, forbidden);
            const auto cand = argmax_over(cue.utility, survivors);
            if (!cand) break;
            std::optional<std::size_t> violated;
            double needed = 0.0;
            for (std::size_t o = 0; o < others.size(); ++o) {
                const double tj = a.times[others[o]];
                const double d = std::abs(*cand - tj);
                const double delta = delta_ij(*cand, tj, cue, cues[a.cues[others[o]]], sat);
                if (d < delta) {
                    violated = o;
                    needed = delta;
                    break;
                }
            }
            if (!violated) {
                const std::tuple<double, double, std::size_t> key{-cue.utility.unfloored(*cand), *cand, k};
                if (!best || key < *best) best = key;
                break;
            }
            const std::size_t o = *violated;
            half[o] = std::max({needed * (1.0 + margin), half[o] * (1.0 + 1e-9) + 1e-9});
        }
    }
    if (!best) return std::nullopt;
    return Placement{-std::get<0>(*best), std::get<1>(*best), std::get<2>(*best)};
}

}  // namespace

std::size_t refine(Assignment& a, std::span<const std::size_t> ranked, std::span<const Cue> cues,
                   std::span<const WindowSet> windows, std::span<const Satellite> sats, const PenaltyParams& p) {
    std::size_t added = 0;
    for (std::size_t ci : ranked) {
        if (std::find(a.cues.begin(), a.cues.end(), ci) != a.cues.end()) continue;
        if (const auto best = best_placement(a, ci, std::nullopt, cues, windows, sats, p.margin)) {
            a.cues.push_back(ci);
            a.times.push_back(best->time);
            a.sats.push_back(best->sat);
            ++added;
        }
    }
    return added;
}

std::size_t tighten(Assignment& a, std::span<const Cue> cues, std::span<const WindowSet> windows,
                    std::span<const Satellite> sats, int max_sweeps) {
    std::size_t moves = 0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool moved = false;
        for (std::size_t x = 0; x < a.cues.size(); ++x) {
            const UtilityFunction& u = cues[a.cues[x]].utility;
            const auto best = best_placement(a, a.cues[x], x, cues, windows, sats, 0.0);
            if (best && best->utility > u.unfloored(a.times[x])) {
                a.times[x] = best->time;
                a.sats[x] = best->sat;
                moved = true;
                ++moves;
            }
        }
        if (!moved) break;
    }
    return moves;
}

Schedule make_schedule(const Assignment& a, std::span<const Cue> cues, std::span<const Satellite> sats,
                       std::size_t from_binary_search) {
    Schedule s;
    for (std::size_t x = 0; x < a.cues.size(); ++x) {
        const Cue& c = cues[a.cues[x]];
        s.entries.push_back({c.id, a.times[x], sats[a.sats[x]].id, c.utility.value(a.times[x])});
    }
    std::sort(s.entries.begin(), s.entries.end(), [](const ScheduledCue& l, const ScheduledCue& r) {
        return std::tie(l.time, l.cue_id) < std::tie(r.time, r.cue_id);
    });
    for (const auto& e : s.entries) s.total_utility += e.utility_at_time;
    s.phase_counts = {from_binary_search, a.cues.size() - from_binary_search};
    return s;
}

ScheduleResult schedule_with_windows(std::span<const Cue> cues, std::vector<WindowSet> windows,
                                     std::span<const Satellite> sats, const RankingParams& rp,
                                     const PenaltyParams& pp, const OptimizerConfig& oc) {
    validate(rp);
    validate(pp);
    validate(oc);
    if (windows.size() != cues.size()) throw Error("one window set per cue required");
    ScheduleResult out;
    out.windows = std::move(windows);
    out.ranked = rank(cues, out.windows, rp);
    out.feasible_count = out.ranked.size();
    if (out.ranked.empty()) return out;
    BinarySearchResult bs = binary_search_prefix(out.ranked, cues, out.windows, sats, pp, oc);
    out.evaluations = std::move(bs.evaluations);
    Assignment a = std::move(bs.solution);
    refine(a, out.ranked, cues, out.windows, sats, pp);
    tighten(a, cues, out.windows, sats);
    out.schedule = make_schedule(a, cues, sats, bs.k_star);
    return out;
}

ScheduleResult schedule(std::span<const Cue> cues, std::span<const Satellite> sats, const RankingParams& rp,
                        const PenaltyParams& pp, const OptimizerConfig& oc, const SamplingConfig& sc) {
    WindowComputer wc(sats, sc);
    std::vector<WindowSet> windows;
    windows.reserve(cues.size());
    for (const auto& c : cues) windows.push_back(wc.windows_for(c));
    return schedule_with_windows(cues, std::move(windows), sats, rp, pp, oc);
}

void validate_schedule(const Schedule& s, std::span<const Cue> cues, std::span<const WindowSet> windows,
                       std::span<const Satellite> sats) {
    std::map<std::string, std::size_t, std::less<>> by_id;
    for (std::size_t i = 0; i < cues.size(); ++i) by_id.emplace(cues[i].id, i);
    Assignment a;
    double total = 0.0;
    for (const auto& e : s.entries) {
        const auto it = by_id.find(e.cue_id);
        if (it == by_id.end()) throw Error("schedule references unknown cue " + e.cue_id);
        if (std::find(a.cues.begin(), a.cues.end(), it->second) != a.cues.end()) {
            throw Error("cue scheduled twice: " + e.cue_id);
        }
        const std::size_t k = satellite_index(sats, e.satellite_id);
        if (!in_window_of(windows[it->second], e.time, e.satellite_id)) {
            throw Error("cue " + e.cue_id + " scheduled outside its windows");
        }
        const double u = cues[it->second].utility.value(e.time);
        if (std::abs(u - e.utility_at_time) > 1e-12) throw Error("utility mismatch for cue " + e.cue_id);
        a.cues.push_back(it->second);
        a.times.push_back(e.time);
        a.sats.push_back(k);
        total += e.utility_at_time;
    }
    if (!exactly_feasible(a, cues, windows, sats)) throw Error("separation violated in schedule");
    if (std::abs(total - s.total_utility) > 1e-9) throw Error("total utility mismatch");
    if (s.phase_counts.binary_search + s.phase_counts.refinement != s.entries.size()) {
        throw Error("phase counts do not add up");
    }
}

}  // namespace tipcue
