#pragma once

// The interactive map's layer math. The background map and the hotspot
// markers move with the viewport; the cursor is never part of this state,
// it is always drawn at screen_center().

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "zooguide/error.hpp"
#include "zooguide/geo.hpp"
#include "zooguide/geofence.hpp"

namespace zooguide::viewport {

using geo::GeoPoint;
using geo::PixelPoint;

inline constexpr std::array<double, 5> kZoomLadder{0.5, 0.75, 1.0, 1.5, 2.0};
inline constexpr std::size_t kDefaultZoomIndex = 2;

struct ScreenPoint {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const ScreenPoint&) const = default;
};

struct ScreenSize {
  double width = 480;
  double height = 640;
  bool operator==(const ScreenSize&) const = default;
};

struct MapExtent {
  double width = 0;
  double height = 0;
  bool operator==(const MapExtent&) const = default;
};

struct Viewport {
  PixelPoint center;
  std::size_t zoom_index = kDefaultZoomIndex;
  ScreenSize screen;
  MapExtent map_extent;

  double zoom() const noexcept { return kZoomLadder[zoom_index]; }
  ScreenPoint screen_center() const noexcept { return {screen.width / 2, screen.height / 2}; }
  bool operator==(const Viewport&) const = default;

  /// Map midpoint under the cursor at zoom 1.0.
  static Viewport make(ScreenSize screen, MapExtent extent) {
    if (!(screen.width > 0 && screen.height > 0))
      throw Error(ErrorCode::ConfigInvalid, "screen size must be positive");
    if (!(extent.width > 0 && extent.height > 0))
      throw Error(ErrorCode::ConfigInvalid, "map extent must be positive");
    return Viewport{{extent.width / 2, extent.height / 2}, kDefaultZoomIndex, screen, extent};
  }
};

inline Viewport center_on(Viewport v, const PixelPoint& fix_px) noexcept {
  v.center = fix_px;
  return v;
}

/// One rung along the ladder, clamped at both ends. Positive direction
/// zooms in, negative zooms out.
inline Viewport zoom_step(Viewport v, int direction) noexcept {
  if (direction > 0 && v.zoom_index + 1 < kZoomLadder.size()) ++v.zoom_index;
  if (direction < 0 && v.zoom_index > 0) --v.zoom_index;
  return v;
}

inline ScreenPoint map_to_screen(const Viewport& v, const PixelPoint& p) noexcept {
  const ScreenPoint mid = v.screen_center();
  return {(p.x - v.center.x) * v.zoom() + mid.x, (p.y - v.center.y) * v.zoom() + mid.y};
}

inline PixelPoint screen_to_map(const Viewport& v, const ScreenPoint& s) noexcept {
  const ScreenPoint mid = v.screen_center();
  return {(s.x - mid.x) / v.zoom() + v.center.x, (s.y - mid.y) / v.zoom() + v.center.y};
}

struct VisibleHotspot {
  std::string id;
  ScreenPoint position;
  bool operator==(const VisibleHotspot&) const = default;
};

/// Hotspots whose anchor lands on screen (edges inclusive), ordered by id.
inline std::vector<VisibleHotspot> visible_hotspots(const Viewport& v,
                                                    std::span<const geofence::Hotspot> hotspots,
                                                    const geo::MapCalibration& cal) {
  std::vector<VisibleHotspot> out;
  for (const auto& h : hotspots) {
    const ScreenPoint s = map_to_screen(v, geo::geo_to_pixel(cal, geofence::anchor(h)));
    if (s.x >= 0 && s.x <= v.screen.width && s.y >= 0 && s.y <= v.screen.height) out.push_back({h.id, s});
  }
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.id < r.id; });
  return out;
}

/// Geographic rectangle of the site plus an optional margin in metres.
struct ZooBounds {
  double min_lat = 0, max_lat = 0;
  double min_lon = 0, max_lon = 0;
  double margin_m = 0;

  bool valid() const noexcept {
    return min_lat < max_lat && min_lon < max_lon && margin_m >= 0 && std::fabs(min_lat) <= 90 &&
           std::fabs(max_lat) <= 90 && std::fabs(min_lon) <= 180 && std::fabs(max_lon) <= 180;
  }
  bool operator==(const ZooBounds&) const = default;
};

/// Inclusive rectangle test; the margin is converted to degrees at the
/// bounds' mid-latitude.
inline bool in_zoo_range(const GeoPoint& p, const ZooBounds& b) noexcept {
  const double mid_lat = (b.min_lat + b.max_lat) / 2;
  const double dlat = b.margin_m / geo::kMetersPerDegree;
  const double dlon = b.margin_m / (geo::kMetersPerDegree * std::cos(mid_lat * geo::kDegToRad));
  return p.latitude >= b.min_lat - dlat && p.latitude <= b.max_lat + dlat && p.longitude >= b.min_lon - dlon &&
         p.longitude <= b.max_lon + dlon;
}

}  // namespace zooguide::viewport
