#pragma once

#include <map>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "tipcue/model.hpp"
#include "tipcue/orbit.hpp"
#include "tipcue/windows.hpp"

namespace tipcue {

/// Ground radius (km) of the region a satellite can see with its line of
/// sight at most `max_off_nadir_deg` from nadir. Clamped to the horizon
/// distance once the line of sight stops intersecting the Earth.
double visibility_radius(const SatelliteState& state, double max_off_nadir_deg);

/// Off-nadir angle (deg) from the satellite to a ground point.
double off_nadir_deg(const SatelliteState& state, GeoPoint target);

/// Satellite/sensor compatibility plus footprint geometry at time t:
/// the closest footprint test point (vertices and centroid) lies within the
/// visibility radius, and the centroid is within the cue's off-nadir limit.
bool is_visible(const SatelliteState& state, const Footprint& fp, double t,
                const FeasibilityConstraints& fc, const Satellite& sat);

/// Sensor type and GSD only; geometry-independent part of is_visible.
bool sensor_compatible(const FeasibilityConstraints& fc, const Satellite& sat);

/// G > v_sat / d_min.
struct TheoreticalSampling {
    double d_min_m{200.0};
};

/// G = c / T_img (T_img is the satellite's dwell time).
struct PracticalSampling {
    double safety_factor{2.0};
};

/// Start at `initial_rate_hz` and double the rate until every gap between
/// agreeing samples is confirmed by `midpoints_per_gap` interior checks.
struct AlgorithmicSampling {
    double initial_rate_hz{2.0};
    int midpoints_per_gap{4};
    int max_doublings{3};
};

struct SamplingConfig {
    std::variant<TheoreticalSampling, PracticalSampling, AlgorithmicSampling> mode{PracticalSampling{}};
    double horizon_start{};
    double horizon_end{};
};

void validate(const SamplingConfig& sc);

/// Sampling step (s) the configuration uses for one satellite, before any doubling.
double base_sampling_step(const SamplingConfig& sc, const Satellite& sat);

/// Computes feasible windows for many cues against a fixed satellite set,
/// caching propagated states on each sampling grid.
class WindowComputer {
public:
    WindowComputer(std::span<const Satellite> satellites, SamplingConfig config);

    WindowSet windows_for(const Cue& cue);

    /// Doubling level the algorithmic mode settled on for the last
    /// windows_for call, per satellite. Zero for the other modes.
    const std::vector<int>& last_levels() const { return last_levels_; }

private:
    struct Grid {
        double step{};
        std::vector<SatelliteState> states;
        std::vector<double> horizon;  // horizon central angle per state, rad
    };

    const Grid& grid(std::size_t sat, int level);
    std::vector<TimeInterval> sample_satellite(const Cue& cue, std::size_t sat, double lo, double hi);

    std::span<const Satellite> sats_;
    SamplingConfig config_;
    std::vector<double> base_step_;
    std::vector<std::map<int, Grid>> grids_;
    std::vector<int> last_levels_;
};

/// Feasible windows of one cue: per-satellite sampled visibility, runs of
/// visible samples turned into closed intervals, clipped to the cue's
/// positive-utility support. An empty result means the cue is unschedulable.
WindowSet compute_windows(const Cue& cue, std::span<const Satellite> sats, const SamplingConfig& sc);

}  // namespace tipcue
