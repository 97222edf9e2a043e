#include "tipcue/visibility.hpp"

#include <algorithm>
#include <cmath>

#include "tipcue/error.hpp"

namespace tipcue {

namespace {

// Earth-fixed speed of the ground track can exceed the inertial estimate by
// the equatorial rotation speed.
constexpr double kEarthSurfaceSpeedKmS = kEarthRotationRadPerS * kEarthRadiusKm;

double horizon_angle(double alt_km) {
    return std::acos(kEarthRadiusKm / (kEarthRadiusKm + alt_km));
}

}  // namespace

double visibility_radius(const SatelliteState& state, double max_off_nadir_deg) {
    const double eta = max_off_nadir_deg * kDegToRad;
    const double ratio = (kEarthRadiusKm + state.altitude_km) / kEarthRadiusKm;
    const double s = ratio * std::sin(eta);
    const double beta = s >= 1.0 ? horizon_angle(state.altitude_km) : std::asin(s) - eta;
    return kEarthRadiusKm * std::min(beta, horizon_angle(state.altitude_km));
}

double off_nadir_deg(const SatelliteState& state, GeoPoint target) {
    const double beta = central_angle_rad(state.subsatellite, target);
    const double r = kEarthRadiusKm + state.altitude_km;
    return std::atan2(kEarthRadiusKm * std::sin(beta), r - kEarthRadiusKm * std::cos(beta)) * kRadToDeg;
}

bool sensor_compatible(const FeasibilityConstraints& fc, const Satellite& sat) {
    return fc.sensor_type == sat.sensor_type && sat.gsd_nadir_cm <= fc.max_gsd_cm;
}

bool is_visible(const SatelliteState& state, const Footprint& fp, double t,
                const FeasibilityConstraints& fc, const Satellite& sat) {
    if (!sensor_compatible(fc, sat)) return false;
    const double eta = std::min(fc.max_off_nadir_deg, sat.max_off_nadir_deg);
    const double radius = visibility_radius(state, eta);
    const std::vector<GeoPoint> pts = fp.test_points_at(t);
    double closest = HUGE_VAL;
    for (const auto& p : pts) closest = std::min(closest, haversine_km(state.subsatellite, p));
    if (closest > radius) return false;
    return off_nadir_deg(state, pts.back()) <= fc.max_off_nadir_deg;
}

void validate(const SamplingConfig& sc) {
    if (!(sc.horizon_end > sc.horizon_start)) throw ConfigError("sampling horizon must be non-degenerate");
    std::visit(
        [](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, TheoreticalSampling>) {
                if (!(m.d_min_m > 0.0)) throw ConfigError("d_min must be positive");
            } else if constexpr (std::is_same_v<M, PracticalSampling>) {
                if (!(m.safety_factor > 1.0)) throw ConfigError("sampling safety factor must exceed 1");
            } else {
                if (!(m.initial_rate_hz > 0.0)) throw ConfigError("initial sampling rate must be positive");
                if (m.midpoints_per_gap < 1) throw ConfigError("midpoints per gap must be >= 1");
                if (m.max_doublings < 0) throw ConfigError("max doublings must be >= 0");
            }
        },
        sc.mode);
}

double base_sampling_step(const SamplingConfig& sc, const Satellite& sat) {
    if (const auto* th = std::get_if<TheoreticalSampling>(&sc.mode)) {
        const double v_km_s = propagate(sat.ephemeris, sc.horizon_start).ground_speed_km_s;
        return th->d_min_m / (1000.0 * v_km_s);
    }
    if (const auto* pr = std::get_if<PracticalSampling>(&sc.mode)) {
        return sat.dwell_time_s / pr->safety_factor;
    }
    return 1.0 / std::get<AlgorithmicSampling>(sc.mode).initial_rate_hz;
}

WindowComputer::WindowComputer(std::span<const Satellite> satellites, SamplingConfig config)
    : sats_(satellites), config_(std::move(config)) {
    validate(config_);
    if (sats_.empty()) throw ConfigError("window computation needs at least one satellite");
    for (const auto& s : sats_) base_step_.push_back(base_sampling_step(config_, s));
    grids_.resize(sats_.size());
    last_levels_.assign(sats_.size(), 0);
}

const WindowComputer::Grid& WindowComputer::grid(std::size_t sat, int level) {
    auto& cache = grids_[sat];
    if (auto it = cache.find(level); it != cache.end()) return it->second;
    Grid g;
    g.step = std::ldexp(base_step_[sat], -level);
    const double span = config_.horizon_end - config_.horizon_start;
    const auto count = static_cast<std::size_t>(std::floor(span / g.step + 1e-9));
    g.states.reserve(count + 2);
    for (std::size_t k = 0; k <= count; ++k) {
        g.states.push_back(propagate(sats_[sat].ephemeris, config_.horizon_start + static_cast<double>(k) * g.step));
    }
    if (g.states.back().time < config_.horizon_end) {
        g.states.push_back(propagate(sats_[sat].ephemeris, config_.horizon_end));
    }
    g.horizon.reserve(g.states.size());
    for (const auto& s : g.states) g.horizon.push_back(horizon_angle(s.altitude_km));
    return cache.emplace(level, std::move(g)).first->second;
}

std::vector<TimeInterval> WindowComputer::sample_satellite(const Cue& cue, std::size_t sat_index,
                                                           double lo, double hi) {
    const Satellite& sat = sats_[sat_index];
    last_levels_[sat_index] = 0;
    if (!sensor_compatible(cue.constraints, sat)) return {};

    const auto* algo = std::get_if<AlgorithmicSampling>(&config_.mode);
    const int max_level = algo ? algo->max_doublings : 0;

    // Angular size of the footprint around its center, for the prefilter.
    double extent = 0.0;
    {
        const double t_mid = 0.5 * (lo + hi);
        const GeoPoint c = cue.footprint.center_at(t_mid);
        for (const auto& p : cue.footprint.polygon_at(t_mid)) extent = std::max(extent, central_angle_rad(c, p));
    }
    const double target_speed = cue.footprint.max_speed_km_s();
    const double eta = std::min(cue.constraints.max_off_nadir_deg, sat.max_off_nadir_deg);

    for (int level = 0;; ++level) {
        const Grid& g = grid(sat_index, level);
        const auto& states = g.states;
        const std::size_t n = states.size();
        const double t0 = config_.horizon_start;
        const auto first = static_cast<std::size_t>(std::clamp(std::floor((lo - t0) / g.step) - 1.0, 0.0, double(n - 1)));
        const auto last = static_cast<std::size_t>(std::clamp(std::ceil((hi - t0) / g.step) + 1.0, 0.0, double(n - 1)));

        std::vector<char> vis(last - first + 1, 0);
        std::vector<double> clearance(vis.size(), 0.0);  // angular, rad
        for (std::size_t k = first; k <= last; ++k) {
            const SatelliteState& st = states[k];
            const Vec3 target = to_ecef(cue.footprint.center_at(st.time), 0.0);
            const double angle = angle_between(st.position, target) - extent;
            double& c = clearance[k - first];
            c = angle - g.horizon[k];
            if (c > 0.0) continue;
            c = angle - visibility_radius(st, eta) / kEarthRadiusKm;
            if (c > 0.0) continue;
            vis[k - first] = is_visible(st, cue.footprint, st.time, cue.constraints, sat) ? 1 : 0;
        }

        bool verified = true;
        if (algo && level < max_level) {
            const int m = algo->midpoints_per_gap;
            for (std::size_t k = first; k < last && verified; ++k) {
                const char a = vis[k - first];
                if (a != vis[k + 1 - first]) continue;
                const double ta = states[k].time, tb = states[k + 1].time;
                if (!a) {
                    // Neither the satellite nor the target can close the gap in time.
                    const double reach = (states[k].ground_speed_km_s + kEarthSurfaceSpeedKmS + target_speed) *
                                         (tb - ta) / kEarthRadiusKm;
                    if (clearance[k - first] > reach && clearance[k + 1 - first] > reach) continue;
                }
                for (int j = 1; j <= m; ++j) {
                    const double t = ta + (tb - ta) * j / (m + 1);
                    const SatelliteState st = propagate(sat.ephemeris, t);
                    if ((is_visible(st, cue.footprint, t, cue.constraints, sat) ? 1 : 0) != a) {
                        verified = false;
                        break;
                    }
                }
            }
        }
        if (!verified) continue;

        last_levels_[sat_index] = level;
        std::vector<TimeInterval> out;
        for (std::size_t k = first; k <= last; ++k) {
            if (!vis[k - first]) continue;
            const double t = states[k].time;
            if (k > first && vis[k - 1 - first]) {
                out.back().end = t;
            } else {
                out.push_back({t, t, sat.id});
            }
        }
        return out;
    }
}

WindowSet WindowComputer::windows_for(const Cue& cue) {
    const auto support = cue.utility.support();
    if (!support) {
        std::fill(last_levels_.begin(), last_levels_.end(), 0);
        return {};
    }
    const double lo = std::max(support->first, config_.horizon_start);
    const double hi = std::min(support->second, config_.horizon_end);
    if (lo > hi) return {};
    std::vector<TimeInterval> all;
    for (std::size_t s = 0; s < sats_.size(); ++s) {
        auto part = sample_satellite(cue, s, lo, hi);
        all.insert(all.end(), part.begin(), part.end());
    }
    return WindowSet(std::move(all)).clipped(support->first, support->second);
}

WindowSet compute_windows(const Cue& cue, std::span<const Satellite> sats, const SamplingConfig& sc) {
    WindowComputer wc(sats, sc);
    return wc.windows_for(cue);
}

}  // namespace tipcue
