#pragma once

// Independent reference computations for tests. Nothing here calls into the
// code path it is used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "zooguide/content.hpp"
#include "zooguide/geo.hpp"
#include "zooguide/geofence.hpp"

namespace oracle {

inline std::uint8_t xor_bytes(const std::string& body) {
  unsigned v = 0;
  for (unsigned char c : body) v = v ^ c;
  return static_cast<std::uint8_t>(v);
}

// Plain haversine in long double, written out separately from the library.
inline long double sphere_distance(long double lat1, long double lon1, long double lat2, long double lon2) {
  const long double r = 6371000.0L;
  const long double k = 3.14159265358979323846264338327950288L / 180.0L;
  const long double a = std::pow(std::sin((lat2 - lat1) * k / 2), 2) +
                        std::cos(lat1 * k) * std::cos(lat2 * k) * std::pow(std::sin((lon2 - lon1) * k / 2), 2);
  return 2 * r * std::asin(std::sqrt(std::min<long double>(1.0L, a)));
}

// Least squares through the raw (uncentred) 3x3 normal equations
// [sum(u u^T)] k = sum(u t) with u = (lon, lat, 1), solved by Gaussian
// elimination with partial pivoting in long double. Returns a,b,c,d,e,f.
inline std::array<long double, 6> normal_equations_fit(const std::vector<zooguide::geo::ControlPoint>& pts) {
  long double m[3][3] = {};
  long double rx[3] = {}, ry[3] = {};
  for (const auto& p : pts) {
    const long double u[3] = {p.geo.longitude, p.geo.latitude, 1.0L};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m[i][j] += u[i] * u[j];
      rx[i] += u[i] * p.pixel.x;
      ry[i] += u[i] * p.pixel.y;
    }
  }
  const auto solve = [](long double a[3][3], const long double rhs[3]) {
    long double aug[3][4];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) aug[i][j] = a[i][j];
      aug[i][3] = rhs[i];
    }
    for (int col = 0; col < 3; ++col) {
      int piv = col;
      for (int r = col + 1; r < 3; ++r)
        if (std::fabs(aug[r][col]) > std::fabs(aug[piv][col])) piv = r;
      for (int j = 0; j < 4; ++j) std::swap(aug[col][j], aug[piv][j]);
      for (int r = col + 1; r < 3; ++r) {
        const long double f = aug[r][col] / aug[col][col];
        for (int j = col; j < 4; ++j) aug[r][j] -= f * aug[col][j];
      }
    }
    std::array<long double, 3> x{};
    for (int i = 2; i >= 0; --i) {
      long double s = aug[i][3];
      for (int j = i + 1; j < 3; ++j) s -= aug[i][j] * x[j];
      x[i] = s / aug[i][i];
    }
    return x;
  };
  const auto kx = solve(m, rx);
  const auto ky = solve(m, ry);
  return {kx[0], kx[1], kx[2], ky[0], ky[1], ky[2]};
}

inline long double residual_sum(const std::vector<zooguide::geo::ControlPoint>& pts, const std::array<long double, 6>& k) {
  long double s = 0;
  for (const auto& p : pts) {
    const long double x = k[0] * p.geo.longitude + k[1] * p.geo.latitude + k[2] - p.pixel.x;
    const long double y = k[3] * p.geo.longitude + k[4] * p.geo.latitude + k[5] - p.pixel.y;
    s += x * x + y * y;
  }
  return s;
}

// Winding number of a closed ring around (x, y), in the ring's own
// coordinates (here: lon as x, lat as y). Nonzero means inside.
inline int winding_number(const std::vector<zooguide::geo::GeoPoint>& ring, double lat, double lon) {
  int wn = 0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = ring[i];
    const auto& b = ring[(i + 1) % n];
    const double is_left = (b.longitude - a.longitude) * (lat - a.latitude) - (lon - a.longitude) * (b.latitude - a.latitude);
    if (a.latitude <= lat) {
      if (b.latitude > lat && is_left > 0) ++wn;
    } else {
      if (b.latitude <= lat && is_left < 0) --wn;
    }
  }
  return wn;
}

// Star-shaped (hence simple) random polygon around a centre.
inline std::vector<zooguide::geo::GeoPoint> random_star_polygon(std::mt19937_64& rng, zooguide::geo::GeoPoint c,
                                                                double max_radius_deg, int min_n = 3, int max_n = 12) {
  std::uniform_int_distribution<int> count(min_n, max_n);
  std::uniform_real_distribution<double> angle(0.0, 2 * 3.14159265358979323846);
  std::uniform_real_distribution<double> radius(0.2 * max_radius_deg, max_radius_deg);
  const int n = count(rng);
  std::vector<double> angles(n);
  for (auto& a : angles) a = angle(rng);
  std::sort(angles.begin(), angles.end());
  std::vector<zooguide::geo::GeoPoint> out;
  for (double a : angles) {
    const double r = radius(rng);
    out.push_back({c.latitude + r * std::sin(a), c.longitude + r * std::cos(a)});
  }
  return out;
}

// Events overlap [t0, t1] iff start < t1 and end > t0; sorted by (start, id).
inline std::vector<std::string> overlapping_ids(const std::vector<zooguide::content::EventRecord>& events, int t0, int t1) {
  std::vector<std::pair<int, std::string>> hits;
  for (const auto& e : events)
    if (e.start.seconds < t1 && e.end.seconds > t0) hits.emplace_back(e.start.seconds, e.id);
  std::sort(hits.begin(), hits.end());
  std::vector<std::string> out;
  for (auto& h : hits) out.push_back(h.second);
  return out;
}

inline std::string lower(std::string s) {
  for (auto& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

// Linear scan: (best field rank, id) for every animal with any match.
inline std::vector<std::string> search_ids(const std::vector<zooguide::content::AnimalRecord>& animals,
                                           const std::string& query) {
  if (query.empty()) return {};
  const std::string q = lower(query);
  std::vector<std::pair<int, std::string>> hits;
  for (const auto& a : animals) {
    const std::string fields[3] = {lower(a.name), lower(a.species), lower(a.description)};
    for (int rank = 0; rank < 3; ++rank) {
      if (fields[rank].find(q) != std::string::npos) {
        hits.emplace_back(rank, a.id);
        break;
      }
    }
  }
  std::sort(hits.begin(), hits.end());
  std::vector<std::string> out;
  for (auto& h : hits) out.push_back(h.second);
  return out;
}

}  // namespace oracle
