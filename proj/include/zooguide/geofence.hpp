#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "zooguide/geo.hpp"

namespace zooguide::geofence {

using geo::GeoPoint;

struct Circle {
  GeoPoint center;
  double radius_m = 0.0;
  bool operator==(const Circle&) const = default;
};

/// Implicitly closed; the last vertex connects back to the first.
struct Polygon {
  std::vector<GeoPoint> vertices;
  bool operator==(const Polygon&) const = default;
};

using Geometry = std::variant<Circle, Polygon>;

struct Hotspot {
  std::string id;
  std::string name;
  Geometry geometry;
  std::string content_id;
  std::string category;
  bool operator==(const Hotspot&) const = default;
};

/// Area centroid computed in degree space, falling back to the vertex mean
/// for zero-area input.
inline GeoPoint centroid(const Polygon& poly) {
  const auto& v = poly.vertices;
  if (v.empty()) return {};
  const GeoPoint ref = v.front();
  double area2 = 0, cx = 0, cy = 0;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const double xj = v[j].longitude - ref.longitude, yj = v[j].latitude - ref.latitude;
    const double xi = v[i].longitude - ref.longitude, yi = v[i].latitude - ref.latitude;
    const double cross = xj * yi - xi * yj;
    area2 += cross;
    cx += (xj + xi) * cross;
    cy += (yj + yi) * cross;
  }
  if (area2 == 0.0) {
    GeoPoint mean{0, 0};
    for (const auto& p : v) mean.latitude += p.latitude, mean.longitude += p.longitude;
    mean.latitude /= static_cast<double>(v.size());
    mean.longitude /= static_cast<double>(v.size());
    return mean;
  }
  return {ref.latitude + cy / (3.0 * area2), ref.longitude + cx / (3.0 * area2)};
}

/// Circle centre or polygon centroid: where the map marker goes and what
/// distance rankings measure to.
inline GeoPoint anchor(const Geometry& g) {
  if (const auto* c = std::get_if<Circle>(&g)) return c->center;
  return centroid(std::get<Polygon>(g));
}

inline GeoPoint anchor(const Hotspot& h) { return anchor(h.geometry); }

namespace detail {

struct Vec {
  double x, y;
};

inline double cross(Vec o, Vec a, Vec b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

inline double segment_distance(Vec p, Vec a, Vec b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = a.x + t * dx - p.x, ey = a.y + t * dy - p.y;
  return std::sqrt(ex * ex + ey * ey);
}

inline bool on_segment(Vec p, Vec a, Vec b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

inline bool segments_intersect(Vec p1, Vec p2, Vec q1, Vec q2) {
  const double d1 = cross(q1, q2, p1), d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1), d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(p1, q1, q2)) return true;
  if (d2 == 0 && on_segment(p2, q1, q2)) return true;
  if (d3 == 0 && on_segment(q1, p1, p2)) return true;
  if (d4 == 0 && on_segment(q2, p1, p2)) return true;
  return false;
}

// Polygon and point projected into the tangent plane at the centroid.
struct PlanarPolygon {
  std::vector<Vec> ring;
  Vec point;

  PlanarPolygon(const Polygon& poly, const GeoPoint& p) {
    const geo::LocalFrame frame(centroid(poly));
    ring.reserve(poly.vertices.size());
    for (const auto& v : poly.vertices) {
      const auto o = frame.to_local(v);
      ring.push_back({o.east, o.north});
    }
    const auto o = frame.to_local(p);
    point = {o.east, o.north};
  }

  double boundary_distance() const {
    double best = INFINITY;
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++)
      best = std::min(best, segment_distance(point, ring[j], ring[i]));
    return best;
  }

  bool parity_inside() const {
    bool inside = false;
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
      const Vec a = ring[i], b = ring[j];
      if ((a.y > point.y) != (b.y > point.y) &&
          point.x < (b.x - a.x) * (point.y - a.y) / (b.y - a.y) + a.x)
        inside = !inside;
    }
    return inside;
  }
};

inline constexpr double kBoundaryToleranceM = 1e-9;

}  // namespace detail

/// Problems that make a geometry unusable as a geofence; empty when valid.
inline std::vector<std::string> geometry_problems(const Geometry& g) {
  std::vector<std::string> out;
  if (const auto* c = std::get_if<Circle>(&g)) {
    if (!geo::is_valid(c->center)) out.emplace_back("circle center out of range");
    if (!(c->radius_m > 0) || !std::isfinite(c->radius_m)) out.emplace_back("radius_m must be > 0");
    return out;
  }
  const auto& poly = std::get<Polygon>(g);
  if (poly.vertices.size() < 3) {
    out.emplace_back("polygon needs at least 3 vertices");
    return out;
  }
  for (const auto& v : poly.vertices) {
    if (!geo::is_valid(v)) {
      out.emplace_back("polygon vertex out of range");
      return out;
    }
  }
  const detail::PlanarPolygon planar(poly, poly.vertices.front());
  const auto& r = planar.ring;
  const std::size_t n = r.size();
  double area2 = 0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) area2 += r[j].x * r[i].y - r[i].x * r[j].y;
  if (!(std::fabs(area2) / 2 > 1e-6)) {
    out.emplace_back("polygon has zero area");
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (r[i].x == r[(i + 1) % n].x && r[i].y == r[(i + 1) % n].y) {
      out.emplace_back("polygon has repeated consecutive vertices");
      return out;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      const detail::Vec a1 = r[i], a2 = r[(i + 1) % n], b1 = r[j], b2 = r[(j + 1) % n];
      if (adjacent) {
        // Adjacent edges share a vertex; they may only meet there.
        const detail::Vec shared = (j == i + 1) ? a2 : a1;
        const detail::Vec far_a = (j == i + 1) ? a1 : a2;
        const detail::Vec far_b = (j == i + 1) ? b2 : b1;
        if (detail::cross(shared, far_a, far_b) == 0 &&
            (far_a.x - shared.x) * (far_b.x - shared.x) + (far_a.y - shared.y) * (far_b.y - shared.y) > 0) {
          out.emplace_back("polygon edges overlap");
          return out;
        }
        continue;
      }
      if (detail::segments_intersect(a1, a2, b1, b2)) {
        out.emplace_back("polygon is self-intersecting");
        return out;
      }
    }
  }
  return out;
}

/// Boundary counts as inside.
inline bool contains(const Geometry& g, const GeoPoint& p) {
  if (const auto* c = std::get_if<Circle>(&g)) return geo::haversine_m(c->center, p) <= c->radius_m;
  const detail::PlanarPolygon planar(std::get<Polygon>(g), p);
  return planar.boundary_distance() <= detail::kBoundaryToleranceM || planar.parity_inside();
}

inline bool contains(const Hotspot& h, const GeoPoint& p) { return contains(h.geometry, p); }

/// True while p stays within the geometry grown by buffer_m metres.
inline bool within_buffer(const Geometry& g, const GeoPoint& p, double buffer_m) {
  if (const auto* c = std::get_if<Circle>(&g)) return geo::haversine_m(c->center, p) <= c->radius_m + buffer_m;
  const detail::PlanarPolygon planar(std::get<Polygon>(g), p);
  return planar.parity_inside() || planar.boundary_distance() <= std::max(buffer_m, detail::kBoundaryToleranceM);
}

struct FenceState {
  std::set<std::string> inside;
  bool operator==(const FenceState&) const = default;
};

struct FenceEvent {
  enum class Kind { Entered, Exited };
  Kind kind;
  std::string hotspot_id;
  bool operator==(const FenceEvent&) const = default;
};

struct FenceUpdate {
  FenceState state;
  std::vector<FenceEvent> events;
};

/// Enter on the geometry itself, leave only once outside geometry + buffer.
/// Events come out ordered by hotspot id.
inline FenceUpdate update(FenceState state, std::span<const Hotspot> hotspots, const GeoPoint& p,
                          double exit_buffer_m) {
  std::vector<const Hotspot*> ordered;
  ordered.reserve(hotspots.size());
  for (const auto& h : hotspots) ordered.push_back(&h);
  std::sort(ordered.begin(), ordered.end(), [](const Hotspot* l, const Hotspot* r) { return l->id < r->id; });

  FenceUpdate out;
  for (const Hotspot* h : ordered) {
    const bool was_inside = state.inside.contains(h->id);
    if (!was_inside && contains(h->geometry, p)) {
      state.inside.insert(h->id);
      out.events.push_back({FenceEvent::Kind::Entered, h->id});
    } else if (was_inside && !within_buffer(h->geometry, p, exit_buffer_m)) {
      state.inside.erase(h->id);
      out.events.push_back({FenceEvent::Kind::Exited, h->id});
    }
  }
  out.state = std::move(state);
  return out;
}

struct RankedHotspot {
  std::string id;
  double distance_m = 0.0;
  bool operator==(const RankedHotspot&) const = default;
};

/// k closest anchors, ascending by distance, ties broken by id.
inline std::vector<RankedHotspot> nearest_hotspots(std::span<const Hotspot> hotspots, const GeoPoint& p,
                                                   std::size_t k) {
  std::vector<RankedHotspot> ranked;
  ranked.reserve(hotspots.size());
  for (const auto& h : hotspots) ranked.push_back({h.id, geo::haversine_m(anchor(h), p)});
  const auto less = [](const RankedHotspot& l, const RankedHotspot& r) {
    return l.distance_m != r.distance_m ? l.distance_m < r.distance_m : l.id < r.id;
  };
  const std::size_t keep = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(), less);
  ranked.resize(keep);
  return ranked;
}

}  // namespace zooguide::geofence
