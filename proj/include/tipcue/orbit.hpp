#pragma once

#include <filesystem>
#include <variant>
#include <vector>

#include "tipcue/geo.hpp"

namespace tipcue {

/// Classical two-body elements. Angles in degrees, `epoch` in scenario seconds.
struct KeplerElements {
    double semi_major_axis_km{};
    double eccentricity{};
    double inclination_deg{};
    double raan_deg{};
    double arg_perigee_deg{};
    double mean_anomaly_deg{};
    double epoch{};

    double mean_motion() const;  // rad/s
    double period() const;       // s
};

struct EphemerisSample {
    double t{};
    double lat_deg{};
    double lon_deg{};
    double alt_km{};
};

/// Pre-computed geodetic track, e.g. exported from an external SGP4 run.
class EphemerisTable {
public:
    /// Requires >= 2 samples with strictly increasing times.
    explicit EphemerisTable(std::vector<EphemerisSample> samples);

    /// CSV with header `t,lat_deg,lon_deg,alt_km`. Throws ConfigError naming
    /// the path (missing file) or the line number (malformed row).
    static EphemerisTable load_csv(const std::filesystem::path& path);

    const std::vector<EphemerisSample>& samples() const { return samples_; }

private:
    std::vector<EphemerisSample> samples_;
};

using EphemerisSource = std::variant<KeplerElements, EphemerisTable>;

/// Throws ConfigError unless a > Earth radius and 0 <= e < 1.
void validate(const KeplerElements& el);

struct SatelliteState {
    double time{};
    GeoPoint subsatellite;
    double altitude_km{};
    double ground_speed_km_s{};  // orbital angular rate times Earth radius
    Vec3 position;               // Earth-fixed, km
};

/// Earth rotation angle at scenario time t; zero at the scenario epoch.
double earth_rotation_angle(double t);

/// Kepler: two-body motion, Kepler's equation solved by Newton iteration to
/// 1e-12 rad, then a uniform sidereal rotation into the Earth-fixed frame.
/// Table: linear interpolation in lat/lon/alt with longitude unwrapping;
/// queries up to one sample gap outside the table are extrapolated, anything
/// further throws Error("ephemeris out of range").
SatelliteState propagate(const EphemerisSource& src, double t);

/// Circular orbit whose ground track crosses `target` at time `t_pass`.
/// Throws ConfigError if the latitude is unreachable for the inclination.
KeplerElements overhead_pass(GeoPoint target, double t_pass, double altitude_km,
                             double inclination_deg, bool ascending, double epoch = 0.0);

}  // namespace tipcue
