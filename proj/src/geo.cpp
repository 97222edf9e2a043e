#include "tipcue/geo.hpp"

#include <algorithm>
#include <cmath>

namespace tipcue {

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

double angle_between(const Vec3& a, const Vec3& b) {
    return std::atan2(norm(cross(a, b)), dot(a, b));
}

bool is_valid(GeoPoint p) {
    return std::isfinite(p.lat_deg) && std::isfinite(p.lon_deg) && p.lat_deg >= -90.0 &&
           p.lat_deg <= 90.0 && p.lon_deg >= -180.0 && p.lon_deg <= 360.0;
}

double central_angle_rad(GeoPoint a, GeoPoint b) {
    const double phi1 = a.lat_deg * kDegToRad;
    const double phi2 = b.lat_deg * kDegToRad;
    const double dphi = phi2 - phi1;
    const double dlambda = (b.lon_deg - a.lon_deg) * kDegToRad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double h = std::clamp(s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2, 0.0, 1.0);
    return 2.0 * std::asin(std::sqrt(h));
}

double haversine_km(GeoPoint a, GeoPoint b) { return kEarthRadiusKm * central_angle_rad(a, b); }

Vec3 to_ecef(GeoPoint p, double alt_km) {
    const double r = kEarthRadiusKm + alt_km;
    const double lat = p.lat_deg * kDegToRad;
    const double lon = p.lon_deg * kDegToRad;
    return {r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon), r * std::sin(lat)};
}

GeoPoint offset_enu(GeoPoint origin, double east_m, double north_m) {
    const double r_m = kEarthRadiusKm * 1000.0;
    const double dlat = north_m / r_m * kRadToDeg;
    const double dlon = east_m / (r_m * std::cos(origin.lat_deg * kDegToRad)) * kRadToDeg;
    return {origin.lat_deg + dlat, origin.lon_deg + dlon};
}

double wrap_lon_deg(double lon) {
    double w = std::fmod(lon + 180.0, 360.0);
    if (w < 0.0) w += 360.0;
    return w - 180.0;
}

namespace {

// Signed area (deg^2) and centroid of a ring relative to its first vertex.
struct RingMoments {
    double area{};
    double cx{};
    double cy{};
};

RingMoments moments(std::span<const GeoPoint> ring) {
    RingMoments m;
    const GeoPoint o = ring.front();
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const GeoPoint& p = ring[i];
        const GeoPoint& q = ring[(i + 1) % ring.size()];
        const double x0 = p.lon_deg - o.lon_deg, y0 = p.lat_deg - o.lat_deg;
        const double x1 = q.lon_deg - o.lon_deg, y1 = q.lat_deg - o.lat_deg;
        const double c = x0 * y1 - x1 * y0;
        m.area += c;
        m.cx += (x0 + x1) * c;
        m.cy += (y0 + y1) * c;
    }
    m.area *= 0.5;
    return m;
}

double orient(GeoPoint a, GeoPoint b, GeoPoint c) {
    return (b.lon_deg - a.lon_deg) * (c.lat_deg - a.lat_deg) -
           (b.lat_deg - a.lat_deg) * (c.lon_deg - a.lon_deg);
}

bool segments_cross(GeoPoint a, GeoPoint b, GeoPoint c, GeoPoint d) {
    const double o1 = orient(a, b, c), o2 = orient(a, b, d);
    const double o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 &&
           o4 != 0;
}

}  // namespace

GeoPoint centroid(std::span<const GeoPoint> ring) {
    if (ring.empty()) return {};
    const RingMoments m = moments(ring);
    if (std::abs(m.area) > 1e-18) {
        const GeoPoint o = ring.front();
        return {o.lat_deg + m.cy / (6.0 * m.area), o.lon_deg + m.cx / (6.0 * m.area)};
    }
    GeoPoint mean{};
    for (const auto& p : ring) {
        mean.lat_deg += p.lat_deg;
        mean.lon_deg += p.lon_deg;
    }
    mean.lat_deg /= static_cast<double>(ring.size());
    mean.lon_deg /= static_cast<double>(ring.size());
    return mean;
}

Polygon enu_rectangle(GeoPoint center, double width_m, double height_m) {
    const double hw = width_m / 2.0, hh = height_m / 2.0;
    return {offset_enu(center, -hw, -hh), offset_enu(center, hw, -hh), offset_enu(center, hw, hh),
            offset_enu(center, -hw, hh)};
}

double polygon_area_km2(std::span<const GeoPoint> ring) {
    if (ring.size() < 3) return 0.0;
    const GeoPoint c = centroid(ring);
    const double kx = kEarthRadiusKm * kDegToRad * std::cos(c.lat_deg * kDegToRad);
    const double ky = kEarthRadiusKm * kDegToRad;
    double a = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const GeoPoint& p = ring[i];
        const GeoPoint& q = ring[(i + 1) % ring.size()];
        a += (p.lon_deg - c.lon_deg) * kx * (q.lat_deg - c.lat_deg) * ky -
             (q.lon_deg - c.lon_deg) * kx * (p.lat_deg - c.lat_deg) * ky;
    }
    return std::abs(a) / 2.0;
}

bool is_simple_polygon(std::span<const GeoPoint> ring) {
    const std::size_t n = ring.size();
    if (n < 3) return false;
    if (!std::all_of(ring.begin(), ring.end(), [](GeoPoint p) { return is_valid(p); })) return false;
    if (std::abs(moments(ring).area) <= 1e-18) return false;  // collinear
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (segments_cross(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n])) return false;
        }
    }
    return true;
}

}  // namespace tipcue
