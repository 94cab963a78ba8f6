#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "zooguide/error.hpp"

namespace zooguide::geo {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kMetersPerDegree = kEarthRadiusM * kDegToRad;

struct GeoPoint {
  double latitude = 0.0;
  double longitude = 0.0;
  bool operator==(const GeoPoint&) const = default;
};

inline bool is_valid(const GeoPoint& p) noexcept {
  return std::isfinite(p.latitude) && std::isfinite(p.longitude) && std::fabs(p.latitude) <= 90.0 &&
         std::fabs(p.longitude) <= 180.0;
}

/// Map raster coordinates: x grows rightward, y grows downward.
struct PixelPoint {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const PixelPoint&) const = default;
};

/// Great-circle distance on the mean-radius sphere.
inline double haversine_m(const GeoPoint& a, const GeoPoint& b) noexcept {
  const double dlat = (b.latitude - a.latitude) * kDegToRad;
  const double dlon = (b.longitude - a.longitude) * kDegToRad;
  const double s_lat = std::sin(dlat / 2);
  const double s_lon = std::sin(dlon / 2);
  double h = s_lat * s_lat +
             std::cos(a.latitude * kDegToRad) * std::cos(b.latitude * kDegToRad) * s_lon * s_lon;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

/// Planar east/north offsets in meters.
struct EnuOffset {
  double east = 0.0;
  double north = 0.0;
};

/// Equirectangular tangent plane at a fixed origin. Good to well under a
/// millimetre over a few hundred metres, which is all the geofence and
/// simulator need.
class LocalFrame {
 public:
  explicit LocalFrame(GeoPoint origin) noexcept
      : origin_(origin), m_per_deg_lon_(kMetersPerDegree * std::cos(origin.latitude * kDegToRad)) {}

  const GeoPoint& origin() const noexcept { return origin_; }

  EnuOffset to_local(const GeoPoint& p) const noexcept {
    return {(p.longitude - origin_.longitude) * m_per_deg_lon_,
            (p.latitude - origin_.latitude) * kMetersPerDegree};
  }

  GeoPoint to_geo(const EnuOffset& o) const noexcept {
    return {origin_.latitude + o.north / kMetersPerDegree, origin_.longitude + o.east / m_per_deg_lon_};
  }

 private:
  GeoPoint origin_;
  double m_per_deg_lon_;
};

struct ControlPoint {
  GeoPoint geo;
  PixelPoint pixel;
  bool operator==(const ControlPoint&) const = default;
};

/// x = a*lon + b*lat + c,  y = d*lon + e*lat + f
struct MapCalibration {
  double a = 1.0, b = 0.0, c = 0.0;
  double d = 0.0, e = 1.0, f = 0.0;
  double rms_residual = 0.0;
  std::vector<ControlPoint> control_points;

  static MapCalibration identity() { return {}; }
  double determinant() const noexcept { return a * e - b * d; }
  bool operator==(const MapCalibration&) const = default;
};

inline PixelPoint geo_to_pixel(const MapCalibration& cal, const GeoPoint& p) noexcept {
  return {cal.a * p.longitude + cal.b * p.latitude + cal.c,
          cal.d * p.longitude + cal.e * p.latitude + cal.f};
}

inline GeoPoint pixel_to_geo(const MapCalibration& cal, const PixelPoint& q) {
  const double det = cal.determinant();
  if (!(std::fabs(det) >= 1e-12))
    throw Error(ErrorCode::DegenerateGeometry, "calibration matrix is singular");
  const double dx = q.x - cal.c;
  const double dy = q.y - cal.f;
  return {(cal.a * dy - cal.d * dx) / det, (cal.e * dx - cal.b * dy) / det};
}

inline double rms_residual(const MapCalibration& cal, std::span<const ControlPoint> pairs) noexcept {
  if (pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& cp : pairs) {
    const PixelPoint m = geo_to_pixel(cal, cp.geo);
    sum += (m.x - cp.pixel.x) * (m.x - cp.pixel.x) + (m.y - cp.pixel.y) * (m.y - cp.pixel.y);
  }
  return std::sqrt(sum / static_cast<double>(pairs.size()));
}

/// Least-squares affine fit of pixels against (lon, lat). The normal
/// equations are formed on centred coordinates, which keeps them well
/// conditioned for sites far from (0, 0).
inline MapCalibration fit_affine(std::span<const ControlPoint> pairs) {
  if (pairs.size() < 3)
    throw Error(ErrorCode::InsufficientPoints,
                "insufficient control points: need at least 3, got " + std::to_string(pairs.size()));

  const double n = static_cast<double>(pairs.size());
  double mu = 0, mv = 0, mx = 0, my = 0;
  for (const auto& cp : pairs) {
    mu += cp.geo.longitude;
    mv += cp.geo.latitude;
    mx += cp.pixel.x;
    my += cp.pixel.y;
  }
  mu /= n, mv /= n, mx /= n, my /= n;

  double suu = 0, suv = 0, svv = 0, sux = 0, svx = 0, suy = 0, svy = 0;
  for (const auto& cp : pairs) {
    const double u = cp.geo.longitude - mu;
    const double v = cp.geo.latitude - mv;
    const double x = cp.pixel.x - mx;
    const double y = cp.pixel.y - my;
    suu += u * u, suv += u * v, svv += v * v;
    sux += u * x, svx += v * x, suy += u * y, svy += v * y;
  }
  const double det = suu * svv - suv * suv;
  if (!(suu > 0 && svv > 0 && det > 1e-12 * suu * svv))
    throw Error(ErrorCode::DegenerateGeometry, "control points are collinear");

  MapCalibration cal;
  cal.a = (sux * svv - svx * suv) / det;
  cal.b = (svx * suu - sux * suv) / det;
  cal.c = mx - cal.a * mu - cal.b * mv;
  cal.d = (suy * svv - svy * suv) / det;
  cal.e = (svy * suu - suy * suv) / det;
  cal.f = my - cal.d * mu - cal.e * mv;
  cal.control_points.assign(pairs.begin(), pairs.end());
  cal.rms_residual = rms_residual(cal, pairs);
  return cal;
}

}  // namespace zooguide::geo
