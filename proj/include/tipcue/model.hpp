#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tipcue/geo.hpp"
#include "tipcue/orbit.hpp"
#include "tipcue/utility.hpp"

namespace tipcue {

enum class SensorType { EO, SAR };
enum class TipSource { External, Feedback };

std::string_view to_string(SensorType s);
SensorType parse_sensor_type(std::string_view s);  // throws ConfigError

/// Alert anchoring a region of interest at a detection time.
struct Tip {
    Polygon region;
    double detect_time{};
    double score{};
    TipSource source{TipSource::External};
};

/// Throws ConfigError unless score is in [0, 1] and the region is a valid polygon.
void validate(const Tip& tip);

struct FeasibilityConstraints {
    SensorType sensor_type{SensorType::EO};
    double max_cloud_cover{100.0};  // percent; never binding here
    double max_gsd_cm{100.0};
    double max_off_nadir_deg{90.0};
};

void validate(const FeasibilityConstraints& fc);

struct Waypoint {
    double t{};
    GeoPoint center;
};

/// Spatial target of a cue, either fixed or moving along a track.
///
/// A moving footprint is a `side_m` square (local east/north axes) whose center
/// is interpolated linearly in lat/lon between waypoints and held at the first
/// or last waypoint outside their time span.
class Footprint {
public:
    struct Static {
        Polygon polygon;
    };
    struct Trajectory {
        std::vector<Waypoint> waypoints;
        double side_m{};
    };

    static Footprint fixed(Polygon polygon);
    static Footprint trajectory(std::vector<Waypoint> waypoints, double side_m);

    GeoPoint center_at(double t) const;
    Polygon polygon_at(double t) const;
    /// Vertices followed by the centroid; the visibility test set.
    std::vector<GeoPoint> test_points_at(double t) const;
    /// Upper bound on the center's ground speed, km/s (zero when static).
    double max_speed_km_s() const;

    bool is_static() const { return std::holds_alternative<Static>(shape_); }
    const std::variant<Static, Trajectory>& shape() const { return shape_; }

private:
    explicit Footprint(std::variant<Static, Trajectory> shape) : shape_(std::move(shape)) {}
    std::variant<Static, Trajectory> shape_;
};

struct Cue {
    std::string id;
    Footprint footprint;
    UtilityFunction utility;
    FeasibilityConstraints constraints;
    std::optional<Tip> origin_tip;
};

struct Satellite {
    std::string id;
    EphemerisSource ephemeris;
    SensorType sensor_type{SensorType::EO};
    double gsd_nadir_cm{};
    double slew_rate_deg_s{};
    double dwell_time_s{};
    /// Agility limit of the platform; the effective pointing limit is the
    /// smaller of this and the cue's max_off_nadir_deg.
    double max_off_nadir_deg{90.0};
};

void validate(const Satellite& sat);

struct ScheduledCue {
    std::string cue_id;
    double time{};
    std::string satellite_id;
    double utility_at_time{};

    friend bool operator==(const ScheduledCue&, const ScheduledCue&) = default;
};

struct PhaseCounts {
    std::size_t binary_search{};
    std::size_t refinement{};

    friend bool operator==(const PhaseCounts&, const PhaseCounts&) = default;
};

struct Schedule {
    std::vector<ScheduledCue> entries;
    double total_utility{};
    PhaseCounts phase_counts;

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

}  // namespace tipcue
