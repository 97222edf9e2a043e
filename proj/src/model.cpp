#include "tipcue/model.hpp"

#include <algorithm>
#include <cmath>

#include "tipcue/error.hpp"

namespace tipcue {

std::string_view to_string(SensorType s) { return s == SensorType::EO ? "EO" : "SAR"; }

SensorType parse_sensor_type(std::string_view s) {
    if (s == "EO") return SensorType::EO;
    if (s == "SAR") return SensorType::SAR;
    throw ConfigError("unknown sensor type '" + std::string(s) + "' (expected EO or SAR)");
}

void validate(const Tip& tip) {
    if (!(tip.score >= 0.0 && tip.score <= 1.0)) throw ConfigError("tip score must lie in [0, 1]");
    if (!is_simple_polygon(tip.region)) {
        throw ConfigError("tip region needs >= 3 valid, non-collinear vertices");
    }
}

void validate(const FeasibilityConstraints& fc) {
    if (!(fc.max_off_nadir_deg > 0.0 && fc.max_off_nadir_deg <= 90.0)) {
        throw ConfigError("max off-nadir angle must lie in (0, 90]");
    }
    if (!(fc.max_gsd_cm > 0.0)) throw ConfigError("max GSD must be positive");
}

void validate(const Satellite& sat) {
    if (!(sat.slew_rate_deg_s > 0.0)) throw ConfigError("satellite " + sat.id + ": slew rate must be positive");
    if (!(sat.dwell_time_s > 0.0)) throw ConfigError("satellite " + sat.id + ": dwell time must be positive");
    if (!(sat.max_off_nadir_deg > 0.0 && sat.max_off_nadir_deg <= 90.0)) {
        throw ConfigError("satellite " + sat.id + ": max off-nadir angle must lie in (0, 90]");
    }
    if (const auto* el = std::get_if<KeplerElements>(&sat.ephemeris)) validate(*el);
}

Footprint Footprint::fixed(Polygon polygon) {
    if (!is_simple_polygon(polygon)) throw ConfigError("static footprint must be a simple polygon");
    return Footprint(Static{std::move(polygon)});
}

Footprint Footprint::trajectory(std::vector<Waypoint> waypoints, double side_m) {
    if (waypoints.empty()) throw ConfigError("trajectory footprint needs at least one waypoint");
    if (!(side_m > 0.0)) throw ConfigError("trajectory footprint side must be positive");
    for (std::size_t i = 0; i < waypoints.size(); ++i) {
        if (!is_valid(waypoints[i].center)) throw ConfigError("trajectory waypoint has invalid coordinates");
        if (i > 0 && !(waypoints[i].t > waypoints[i - 1].t)) {
            throw ConfigError("trajectory waypoints must be strictly increasing in time");
        }
    }
    return Footprint(Trajectory{std::move(waypoints), side_m});
}

GeoPoint Footprint::center_at(double t) const {
    if (const auto* s = std::get_if<Static>(&shape_)) return centroid(s->polygon);
    const auto& wp = std::get<Trajectory>(shape_).waypoints;
    if (t <= wp.front().t) return wp.front().center;
    if (t >= wp.back().t) return wp.back().center;
    auto it = std::upper_bound(wp.begin(), wp.end(), t, [](double v, const Waypoint& w) { return v < w.t; });
    const Waypoint& b = *it;
    const Waypoint& a = *(it - 1);
    const double f = (t - a.t) / (b.t - a.t);
    return {a.center.lat_deg + f * (b.center.lat_deg - a.center.lat_deg),
            a.center.lon_deg + f * (b.center.lon_deg - a.center.lon_deg)};
}

Polygon Footprint::polygon_at(double t) const {
    if (const auto* s = std::get_if<Static>(&shape_)) return s->polygon;
    const double side = std::get<Trajectory>(shape_).side_m;
    return enu_rectangle(center_at(t), side, side);
}

std::vector<GeoPoint> Footprint::test_points_at(double t) const {
    std::vector<GeoPoint> pts = polygon_at(t);
    pts.push_back(center_at(t));
    return pts;
}

double Footprint::max_speed_km_s() const {
    const auto* tr = std::get_if<Trajectory>(&shape_);
    if (!tr) return 0.0;
    double v = 0.0;
    for (std::size_t i = 1; i < tr->waypoints.size(); ++i) {
        const auto& a = tr->waypoints[i - 1];
        const auto& b = tr->waypoints[i];
        v = std::max(v, haversine_km(a.center, b.center) / (b.t - a.t));
    }
    return v;
}

}  // namespace tipcue
