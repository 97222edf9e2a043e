#include "tipcue/orbit.hpp"

#include <algorithm>
#include <cmath>

#include "csv.hpp"
#include "tipcue/error.hpp"

namespace tipcue {

double KeplerElements::mean_motion() const {
    return std::sqrt(kMuKm3PerS2 / (semi_major_axis_km * semi_major_axis_km * semi_major_axis_km));
}

double KeplerElements::period() const { return 2.0 * kPi / mean_motion(); }

void validate(const KeplerElements& el) {
    if (!(el.semi_major_axis_km > kEarthRadiusKm)) {
        throw ConfigError("semi-major axis must exceed the Earth radius");
    }
    if (!(el.eccentricity >= 0.0 && el.eccentricity < 1.0)) {
        throw ConfigError("eccentricity must lie in [0, 1)");
    }
}

EphemerisTable::EphemerisTable(std::vector<EphemerisSample> samples) : samples_(std::move(samples)) {
    if (samples_.size() < 2) throw ConfigError("ephemeris table needs at least two samples");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& s = samples_[i];
        if (!is_valid({s.lat_deg, s.lon_deg}) || !(s.alt_km > 0.0)) {
            throw ConfigError("ephemeris sample " + std::to_string(i) + " has invalid coordinates");
        }
        if (i > 0 && !(s.t > samples_[i - 1].t)) {
            throw ConfigError("ephemeris times must be strictly increasing (sample " +
                              std::to_string(i) + ")");
        }
    }
}

EphemerisTable EphemerisTable::load_csv(const std::filesystem::path& path) {
    csv::Reader reader(path, "t,lat_deg,lon_deg,alt_km");
    std::vector<EphemerisSample> samples;
    for (const auto& row : reader.rows()) {
        reader.expect_columns(row);
        EphemerisSample s{reader.number(row, 0), reader.number(row, 1), reader.number(row, 2),
                          reader.number(row, 3)};
        if (!samples.empty() && !(s.t > samples.back().t)) reader.fail(row, "time not increasing");
        samples.push_back(s);
    }
    try {
        return EphemerisTable(std::move(samples));
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

double earth_rotation_angle(double t) { return kEarthRotationRadPerS * t; }

namespace {

double solve_kepler(double mean_anomaly, double e) {
    double m = std::fmod(mean_anomaly, 2.0 * kPi);
    if (m < 0.0) m += 2.0 * kPi;
    double E = e < 0.8 ? m : kPi;
    for (int it = 0; it < 100; ++it) {
        const double f = E - e * std::sin(E) - m;
        const double step = f / (1.0 - e * std::cos(E));
        E -= step;
        if (std::abs(step) < 1e-12) break;
    }
    return E;
}

SatelliteState from_kepler(const KeplerElements& el, double t) {
    const double n = el.mean_motion();
    const double e = el.eccentricity;
    const double E = solve_kepler(el.mean_anomaly_deg * kDegToRad + n * (t - el.epoch), e);
    const double nu = 2.0 * std::atan2(std::sqrt(1.0 + e) * std::sin(E / 2.0),
                                       std::sqrt(1.0 - e) * std::cos(E / 2.0));
    const double a = el.semi_major_axis_km;
    const double r = a * (1.0 - e * std::cos(E));
    const double u = el.arg_perigee_deg * kDegToRad + nu;
    const double raan = el.raan_deg * kDegToRad;
    const double inc = el.inclination_deg * kDegToRad;

    const double x = r * (std::cos(raan) * std::cos(u) - std::sin(raan) * std::sin(u) * std::cos(inc));
    const double y = r * (std::sin(raan) * std::cos(u) + std::cos(raan) * std::sin(u) * std::cos(inc));
    const double z = r * std::sin(u) * std::sin(inc);

    const double theta = earth_rotation_angle(t);
    const Vec3 ecef{std::cos(theta) * x + std::sin(theta) * y, -std::sin(theta) * x + std::cos(theta) * y, z};

    // Specific angular momentum over r^2 is the orbital angular rate.
    const double h = std::sqrt(kMuKm3PerS2 * a * (1.0 - e * e));
    SatelliteState s;
    s.time = t;
    s.subsatellite = {std::asin(std::clamp(z / r, -1.0, 1.0)) * kRadToDeg,
                      std::atan2(ecef.y, ecef.x) * kRadToDeg};
    s.altitude_km = r - kEarthRadiusKm;
    s.ground_speed_km_s = kEarthRadiusKm * h / (r * r);
    s.position = ecef;
    return s;
}

SatelliteState from_table(const EphemerisTable& table, double t) {
    const auto& s = table.samples();
    const double first_gap = s[1].t - s[0].t;
    const double last_gap = s[s.size() - 1].t - s[s.size() - 2].t;
    if (t < s.front().t - first_gap || t > s.back().t + last_gap || !std::isfinite(t)) {
        throw Error("ephemeris out of range");
    }
    auto it = std::upper_bound(s.begin(), s.end(), t,
                               [](double v, const EphemerisSample& x) { return v < x.t; });
    std::size_t hi = static_cast<std::size_t>(it - s.begin());
    hi = std::clamp<std::size_t>(hi, 1, s.size() - 1);
    const EphemerisSample& a = s[hi - 1];
    const EphemerisSample& b = s[hi];
    const double f = (t - a.t) / (b.t - a.t);
    const double dlon = wrap_lon_deg(b.lon_deg - a.lon_deg);

    SatelliteState st;
    st.time = t;
    st.subsatellite = {a.lat_deg + f * (b.lat_deg - a.lat_deg), wrap_lon_deg(a.lon_deg + f * dlon)};
    st.altitude_km = a.alt_km + f * (b.alt_km - a.alt_km);
    st.ground_speed_km_s = haversine_km({a.lat_deg, a.lon_deg}, {b.lat_deg, b.lon_deg}) / (b.t - a.t);
    st.position = to_ecef(st.subsatellite, st.altitude_km);
    return st;
}

}  // namespace

SatelliteState propagate(const EphemerisSource& src, double t) {
    if (const auto* el = std::get_if<KeplerElements>(&src)) return from_kepler(*el, t);
    return from_table(std::get<EphemerisTable>(src), t);
}

KeplerElements overhead_pass(GeoPoint target, double t_pass, double altitude_km,
                             double inclination_deg, bool ascending, double epoch) {
    const double inc = inclination_deg * kDegToRad;
    const double lat = target.lat_deg * kDegToRad;
    const double sin_u = std::sin(lat) / std::sin(inc);
    if (!(std::abs(sin_u) <= 1.0)) {
        throw ConfigError("target latitude is not reachable with this inclination");
    }
    const double u = ascending ? std::asin(sin_u) : kPi - std::asin(sin_u);
    const double lon_in_plane = std::atan2(std::cos(inc) * std::sin(u), std::cos(u));
    const double raan = target.lon_deg * kDegToRad + earth_rotation_angle(t_pass) - lon_in_plane;

    KeplerElements el;
    el.semi_major_axis_km = kEarthRadiusKm + altitude_km;
    el.eccentricity = 0.0;
    el.inclination_deg = inclination_deg;
    el.raan_deg = std::fmod(std::fmod(raan * kRadToDeg, 360.0) + 360.0, 360.0);
    el.arg_perigee_deg = 0.0;
    el.epoch = epoch;
    const double m0 = u - el.mean_motion() * (t_pass - epoch);
    el.mean_anomaly_deg = std::fmod(std::fmod(m0 * kRadToDeg, 360.0) + 360.0, 360.0);
    validate(el);
    return el;
}

}  // namespace tipcue
