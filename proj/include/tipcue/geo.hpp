#pragma once

#include <span>
#include <vector>

namespace tipcue {

// Spherical Earth.
inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kMuKm3PerS2 = 398600.4418;
inline constexpr double kEarthRotationRadPerS = 7.2921159e-5;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

struct GeoPoint {
    double lat_deg{};
    double lon_deg{};

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct Vec3 {
    double x{};
    double y{};
    double z{};
};

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double norm(const Vec3& v);

/// Angle between two vectors in radians, stable for nearly parallel inputs.
double angle_between(const Vec3& a, const Vec3& b);

bool is_valid(GeoPoint p);

/// Great-circle central angle (haversine form), radians.
double central_angle_rad(GeoPoint a, GeoPoint b);

/// Great-circle distance on the spherical Earth, km.
double haversine_km(GeoPoint a, GeoPoint b);

/// Earth-fixed Cartesian position of a point at altitude `alt_km`.
Vec3 to_ecef(GeoPoint p, double alt_km);

/// Shift a point by a local east/north offset in meters (flat tangent plane).
GeoPoint offset_enu(GeoPoint origin, double east_m, double north_m);

/// Wrap longitude into [-180, 180).
double wrap_lon_deg(double lon);

using Polygon = std::vector<GeoPoint>;

/// Area-weighted centroid in the lat/lon plane; falls back to the vertex mean
/// for degenerate (zero-area) rings.
GeoPoint centroid(std::span<const GeoPoint> ring);

/// Axis-aligned rectangle (local ENU) centered on `center`, counter-clockwise.
Polygon enu_rectangle(GeoPoint center, double width_m, double height_m);

/// Area in km^2 using a local equirectangular projection about the centroid.
double polygon_area_km2(std::span<const GeoPoint> ring);

/// At least three vertices, valid coordinates, non-zero area and no two
/// non-adjacent edges crossing.
bool is_simple_polygon(std::span<const GeoPoint> ring);

}  // namespace tipcue
