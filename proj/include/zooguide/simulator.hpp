#pragma once

// Stand-in for the GPS receiver: scripted walks rendered as NMEA streams,
// with Gaussian position noise and injected connection faults, plus replay
// of streams or recorded .nmea logs into any sink.
//
// Randomness is fully specified so streams are byte-identical across
// platforms: std::mt19937_64 seeded with the script seed, uniforms taken as
// the top 53 bits, normals by the Box-Muller transform (both values used).
// Garbage bytes come from a second mt19937_64 seeded with seed ^ kGarbageSalt
// so fault windows never shift the noise of later samples.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "zooguide/error.hpp"
#include "zooguide/geo.hpp"
#include "zooguide/nmea.hpp"

namespace zooguide::simulator {

using geo::GeoPoint;

inline constexpr std::uint64_t kGarbageSalt = 0x9E3779B97F4A7C15ULL;
inline constexpr double kWalkingSpeedMps = 1.4;

enum class FaultKind { Silence, NoFixQuality, GarbageBytes };

inline std::string_view to_string(FaultKind k) {
  switch (k) {
    case FaultKind::Silence: return "silence";
    case FaultKind::NoFixQuality: return "no_fix";
    case FaultKind::GarbageBytes: return "garbage";
  }
  return "silence";
}

struct FaultWindow {
  double start_s = 0;
  double end_s = 0;
  FaultKind kind = FaultKind::Silence;

  bool covers(double t) const noexcept { return start_s <= t && t < end_s; }
};

struct WalkScript {
  std::vector<GeoPoint> waypoints;
  double speed_mps = kWalkingSpeedMps;
  double sample_rate_hz = 1.0;
  double noise_sigma_m = 0.0;
  std::uint64_t seed = 0;
  std::vector<FaultWindow> faults;
  nmea::UtcTime start_utc;
};

enum class ItemKind { Sentence, Garbage };

struct StreamItem {
  double elapsed_s = 0;
  std::string bytes;
  ItemKind kind = ItemKind::Sentence;
  bool operator==(const StreamItem&) const = default;
};

using FixStream = std::vector<StreamItem>;

class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    return r * std::cos(theta);
  }

  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Polyline through waypoints, measured by haversine per segment and
/// interpolated linearly in degrees within a segment.
class Path {
 public:
  explicit Path(std::vector<GeoPoint> waypoints) : points_(std::move(waypoints)) {
    cumulative_.push_back(0.0);
    for (std::size_t i = 1; i < points_.size(); ++i)
      cumulative_.push_back(cumulative_.back() + geo::haversine_m(points_[i - 1], points_[i]));
  }

  double length_m() const noexcept { return cumulative_.back(); }

  GeoPoint at(double distance_m) const noexcept {
    if (points_.size() == 1 || distance_m <= 0) return points_.front();
    if (distance_m >= length_m()) return points_.back();
    std::size_t seg = 1;
    while (seg + 1 < cumulative_.size() && cumulative_[seg] < distance_m) ++seg;
    const double len = cumulative_[seg] - cumulative_[seg - 1];
    const double f = len > 0 ? (distance_m - cumulative_[seg - 1]) / len : 0.0;
    const GeoPoint& a = points_[seg - 1];
    const GeoPoint& b = points_[seg];
    return {a.latitude + f * (b.latitude - a.latitude), a.longitude + f * (b.longitude - a.longitude)};
  }

 private:
  std::vector<GeoPoint> points_;
  std::vector<double> cumulative_;
};

inline std::vector<std::string> script_problems(const WalkScript& s) {
  std::vector<std::string> out;
  if (s.waypoints.size() < 2) out.emplace_back("a walk needs at least 2 waypoints");
  for (std::size_t i = 0; i < s.waypoints.size(); ++i) {
    if (!geo::is_valid(s.waypoints[i])) out.push_back("waypoint " + std::to_string(i) + " is out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (s.waypoints[i] == s.waypoints[j])
        out.push_back("waypoints " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
  }
  if (!(s.speed_mps > 0) || !std::isfinite(s.speed_mps)) out.emplace_back("speed_mps must be > 0");
  if (!(s.sample_rate_hz > 0) || !std::isfinite(s.sample_rate_hz)) out.emplace_back("sample_rate_hz must be > 0");
  if (!(s.noise_sigma_m >= 0) || !std::isfinite(s.noise_sigma_m)) out.emplace_back("noise_sigma_m must be >= 0");
  for (std::size_t i = 0; i < s.faults.size(); ++i)
    if (!(s.faults[i].start_s < s.faults[i].end_s) || s.faults[i].start_s < 0)
      out.push_back("fault " + std::to_string(i) + " needs 0 <= start_s < end_s");
  return out;
}

/// One sample per 1/sample_rate seconds from t = 0 until the walk's end,
/// each perturbed by isotropic ENU noise and shaped by the fault windows.
inline FixStream build_walk(const WalkScript& script) {
  if (const auto problems = script_problems(script); !problems.empty())
    throw Error(ErrorCode::ScriptInvalid, problems.front());

  const Path path(script.waypoints);
  const double duration = path.length_m() / script.speed_mps;
  const auto last = static_cast<std::size_t>(std::floor(duration * script.sample_rate_hz + 1e-6));

  NormalSource noise(script.seed);
  NormalSource garbage(script.seed ^ kGarbageSalt);
  FixStream out;
  out.reserve(last + 1);
  for (std::size_t k = 0; k <= last; ++k) {
    const double t = static_cast<double>(k) / script.sample_rate_hz;
    const double east = script.noise_sigma_m * noise.normal();
    const double north = script.noise_sigma_m * noise.normal();

    const FaultWindow* fault = nullptr;
    for (const auto& w : script.faults) {
      if (w.covers(t)) {
        fault = &w;
        break;
      }
    }
    if (fault && fault->kind == FaultKind::Silence) continue;

    if (fault && fault->kind == FaultKind::GarbageBytes) {
      const std::size_t len = 10 + garbage.bits() % 71;
      std::string bytes;
      bytes.reserve(len);
      while (bytes.size() < len) {
        const char c = static_cast<char>(garbage.bits() & 0xFF);
        if (c != '$' && c != '\r' && c != '\n') bytes.push_back(c);
      }
      out.push_back({t, std::move(bytes), ItemKind::Garbage});
      continue;
    }

    const GeoPoint truth = path.at(script.speed_mps * t);
    const GeoPoint p = geo::LocalFrame(truth).to_geo({east, north});
    nmea::GeoFix fix;
    fix.latitude = p.latitude;
    fix.longitude = p.longitude;
    fix.timestamp = nmea::UtcTime::from_seconds_of_day(script.start_utc.seconds_of_day() + t);
    fix.quality = fault ? nmea::FixQuality::NoFix : nmea::FixQuality::GpsFix;
    fix.satellites = fault ? 0 : 8;
    if (!fault) fix.hdop = 0.9;
    fix.altitude_m = 30.0;
    out.push_back({t, nmea::format_gga(fix), ItemKind::Sentence});
  }
  return out;
}

/// Walk scripts are JSON lines: one "walk" header record, then "waypoint"
/// and "fault" records in any order (waypoints keep file order).
inline WalkScript parse_walk(const std::string& text, const std::string& file = "walk") {
  using nlohmann::json;
  WalkScript script;
  bool header = false;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  const auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::ScriptInvalid, file + ":" + std::to_string(n) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(std::string("invalid JSON: ") + e.what());
    }
    if (!rec.is_object() || !rec.contains("type") || !rec["type"].is_string()) fail("record needs a string 'type'");
    const auto number = [&](const char* key, std::optional<double> fallback) -> double {
      if (!rec.contains(key)) {
        if (!fallback) fail(std::string("missing field '") + key + "'");
        return *fallback;
      }
      if (!rec[key].is_number()) fail(std::string("field '") + key + "' must be a number");
      return rec[key].get<double>();
    };
    const std::string type = rec["type"];
    if (type == "walk") {
      if (header) fail("duplicate walk header");
      header = true;
      script.speed_mps = number("speed_mps", kWalkingSpeedMps);
      script.sample_rate_hz = number("sample_rate_hz", 1.0);
      script.noise_sigma_m = number("noise_sigma_m", 0.0);
      if (rec.contains("seed")) {
        if (!rec["seed"].is_number_unsigned()) fail("field 'seed' must be a non-negative integer");
        script.seed = rec["seed"].get<std::uint64_t>();
      }
      if (rec.contains("start_utc")) {
        if (!rec["start_utc"].is_string()) fail("field 'start_utc' must be \"HH:MM:SS\"");
        const std::string s = rec["start_utc"];
        int h = 0, m = 0, sec = 0;
        if (s.size() != 8 || std::sscanf(s.c_str(), "%2d:%2d:%2d", &h, &m, &sec) != 3 || h > 23 || m > 59 || sec > 59)
          fail("field 'start_utc' must be \"HH:MM:SS\"");
        script.start_utc = {h, m, static_cast<double>(sec)};
      }
    } else if (type == "waypoint") {
      script.waypoints.push_back({number("lat", std::nullopt), number("lon", std::nullopt)});
    } else if (type == "fault") {
      FaultWindow w;
      w.start_s = number("start_s", std::nullopt);
      w.end_s = number("end_s", std::nullopt);
      const std::string kind = rec.value("kind", "");
      if (kind == "silence")
        w.kind = FaultKind::Silence;
      else if (kind == "no_fix")
        w.kind = FaultKind::NoFixQuality;
      else if (kind == "garbage")
        w.kind = FaultKind::GarbageBytes;
      else
        fail("fault kind must be silence, no_fix or garbage");
      script.faults.push_back(w);
    } else {
      fail("unknown record type '" + type + "'");
    }
  }
  if (const auto problems = script_problems(script); !problems.empty())
    throw Error(ErrorCode::ScriptInvalid, file + ": " + problems.front());
  return script;
}

inline WalkScript load_walk(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot read walk script " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_walk(ss.str(), path.filename().string());
}

/// One item per line, CR LF terminated. Timing is not stored; see read_nmea_log.
inline std::string dump_nmea(const FixStream& stream) {
  std::string out;
  for (const auto& item : stream) {
    std::string_view b = item.bytes;
    while (!b.empty() && (b.back() == '\r' || b.back() == '\n')) b.remove_suffix(1);
    out.append(b);
    out += "\r\n";
  }
  return out;
}

/// Rebuilds timing from sentence UTC stamps where present, otherwise one
/// sample period after the previous line. Works on real receiver logs.
inline FixStream read_nmea_log(const std::string& text, double sample_rate_hz = 1.0) {
  FixStream out;
  const double period = 1.0 / sample_rate_hz;
  std::optional<std::pair<double, double>> base;  // (elapsed, utc seconds)
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    start = end + 1;
    while (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const double next = out.empty() ? 0.0 : out.back().elapsed_s + period;
    double elapsed = next;
    ItemKind kind = ItemKind::Sentence;
    try {
      const auto parsed = nmea::parse_sentence(line);
      const nmea::GeoFix* fix = nullptr;
      if (const auto* g = std::get_if<nmea::GgaFix>(&parsed)) fix = &g->fix;
      if (const auto* r = std::get_if<nmea::RmcFix>(&parsed)) fix = &r->fix;
      if (fix != nullptr) {
        const double utc = fix->timestamp.seconds_of_day();
        if (!base) base = {next, utc};
        double delta = utc - base->second;
        if (delta < 0) delta += 86400.0;
        const double stamped = base->first + delta;
        if (out.empty() || stamped > out.back().elapsed_s) elapsed = stamped;
      }
    } catch (const Error&) {
      kind = ItemKind::Garbage;
    }
    out.push_back({elapsed, std::move(line), kind});
  }
  return out;
}

struct ReplayItem {
  double elapsed_s = 0;
  std::string_view raw;
  std::optional<nmea::ParsedSentence> parsed;
  std::optional<ErrorCode> error;  // ChecksumMismatch or MalformedField

  std::optional<nmea::GeoFix> fix() const { return parsed ? nmea::position_of(*parsed) : std::nullopt; }
};

struct ReplaySummary {
  std::size_t delivered = 0;  // items carrying a usable fix
  std::size_t dropped = 0;    // parsed, but no usable fix
  std::size_t garbage = 0;    // failed to parse
  bool operator==(const ReplaySummary&) const = default;
};

enum class Pacing { AsFastAsPossible, RealTime };

/// Parses one stream item. The result borrows the item's bytes.
inline ReplayItem decode(const StreamItem& item) {
  ReplayItem r;
  r.elapsed_s = item.elapsed_s;
  r.raw = item.bytes;
  try {
    r.parsed = nmea::parse_sentence(item.bytes);
  } catch (const Error& e) {
    r.error = e.code();
  }
  return r;
}

inline void tally(ReplaySummary& summary, const ReplayItem& r) {
  if (r.error)
    ++summary.garbage;
  else if (r.fix())
    ++summary.delivered;
  else
    ++summary.dropped;
}

/// Parses each item and hands it to the sink, in order, on the calling thread.
template <typename Sink>
ReplaySummary replay(const FixStream& stream, Sink&& sink, Pacing pacing = Pacing::AsFastAsPossible) {
  ReplaySummary summary;
  const auto started = std::chrono::steady_clock::now();
  for (const auto& item : stream) {
    if (pacing == Pacing::RealTime)
      std::this_thread::sleep_until(started + std::chrono::duration<double>(item.elapsed_s));
    const ReplayItem r = decode(item);
    tally(summary, r);
    sink(r);
  }
  return summary;
}

}  // namespace zooguide::simulator
