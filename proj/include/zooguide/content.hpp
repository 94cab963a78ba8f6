#pragma once

// Content packs: the guide's relational store laid out as a directory.
//
//   manifest.json     pack metadata, map extent, zoo bounds, cached calibration
//   calibration.csv   control points, one "lat,lon,x_px,y_px" record per line
//   animals.jsonl     one AnimalRecord per line
//   hotspots.jsonl    one Hotspot per line
//   events.jsonl      one EventRecord per line
//   map/, media/      referenced assets
//
// The relational constraints (unique ids, references, calibration agreement)
// are enforced by the loader, which reports every violation it finds with a
// file/line/record locator rather than stopping at the first.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "zooguide/error.hpp"
#include "zooguide/geo.hpp"
#include "zooguide/geofence.hpp"
#include "zooguide/viewport.hpp"

namespace zooguide::content {

inline constexpr int kFormatVersion = 1;

/// Local time of day in whole seconds since midnight; the timetable repeats
/// daily so there are no dates.
struct TimeOfDay {
  int seconds = 0;

  static std::optional<TimeOfDay> parse(std::string_view text) {
    const auto two = [&](std::size_t at) -> int {
      if (at + 2 > text.size() || !std::isdigit(static_cast<unsigned char>(text[at])) ||
          !std::isdigit(static_cast<unsigned char>(text[at + 1])))
        return -1;
      return (text[at] - '0') * 10 + (text[at + 1] - '0');
    };
    if (text.size() != 5 && text.size() != 8) return std::nullopt;
    const int h = two(0), m = two(3);
    if (text[2] != ':' || h < 0 || h > 23 || m < 0 || m > 59) return std::nullopt;
    int s = 0;
    if (text.size() == 8) {
      s = two(6);
      if (text[5] != ':' || s < 0 || s > 59) return std::nullopt;
    }
    return TimeOfDay{h * 3600 + m * 60 + s};
  }

  std::string to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", seconds / 3600, (seconds / 60) % 60, seconds % 60);
    return buf;
  }

  auto operator<=>(const TimeOfDay&) const = default;
};

enum class MediaKind { Image, Audio, Video, Text };

inline std::string_view to_string(MediaKind k) {
  switch (k) {
    case MediaKind::Image: return "image";
    case MediaKind::Audio: return "audio";
    case MediaKind::Video: return "video";
    case MediaKind::Text: return "text";
  }
  return "text";
}

inline std::optional<MediaKind> media_kind_from(std::string_view s) {
  if (s == "image") return MediaKind::Image;
  if (s == "audio") return MediaKind::Audio;
  if (s == "video") return MediaKind::Video;
  if (s == "text") return MediaKind::Text;
  return std::nullopt;
}

struct MediaRef {
  MediaKind kind = MediaKind::Text;
  std::string path;  // pack-relative
  std::string caption;
  bool operator==(const MediaRef&) const = default;
};

struct AnimalRecord {
  std::string id;
  std::string name;
  std::string species;
  std::string description;
  std::vector<MediaRef> media;
  bool operator==(const AnimalRecord&) const = default;
};

struct EventRecord {
  std::string id;
  std::string title;
  std::optional<std::string> location_hotspot_id;
  TimeOfDay start;
  TimeOfDay end;
  bool operator==(const EventRecord&) const = default;
};

struct Manifest {
  int format_version = kFormatVersion;
  std::string name;
  std::string version;
  std::string map_image;
  viewport::MapExtent map_extent;
  viewport::ZooBounds bounds;
  std::string calibration_source = "calibration.csv";
  geo::MapCalibration calibration;  // re-fit from the control points at load
  bool operator==(const Manifest&) const = default;
};

struct ContentPack {
  std::filesystem::path root;
  Manifest manifest;
  std::vector<AnimalRecord> animals;
  std::vector<geofence::Hotspot> hotspots;
  std::vector<EventRecord> events;

  const AnimalRecord* find_animal(std::string_view id) const {
    for (const auto& a : animals)
      if (a.id == id) return &a;
    return nullptr;
  }
  const geofence::Hotspot* find_hotspot(std::string_view id) const {
    for (const auto& h : hotspots)
      if (h.id == id) return &h;
    return nullptr;
  }
  bool operator==(const ContentPack&) const = default;
};

/// One validation finding. line is 1-based, 0 when the finding concerns a
/// whole file.
struct Diagnostic {
  ErrorCode code;
  std::string file;
  std::size_t line = 0;
  std::string record_id;
  std::string message;

  std::string to_string() const {
    std::string out = file;
    if (line > 0) out += ":" + std::to_string(line);
    if (!record_id.empty()) out += " [" + record_id + "]";
    out += " ";
    out += zooguide::to_string(code);
    out += ": " + message;
    return out;
  }
  bool operator==(const Diagnostic&) const = default;
};

class PackError : public Error {
 public:
  explicit PackError(std::vector<Diagnostic> diagnostics)
      : Error(diagnostics.front().code, summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  static std::string summarize(const std::vector<Diagnostic>& d) {
    std::string out = d.front().to_string();
    if (d.size() > 1) out += " (and " + std::to_string(d.size() - 1) + " more)";
    return out;
  }
  std::vector<Diagnostic> diagnostics_;
};

struct PackInspection {
  std::optional<ContentPack> pack;  // present only when diagnostics is empty
  std::vector<Diagnostic> diagnostics;
};

inline bool is_slug(std::string_view s) {
  if (s.empty() || s.front() == '-' || s.back() == '-') return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-'; });
}

/// Relative, forward-slash, no "..", no drive letters.
inline bool is_pack_relative(std::string_view path) {
  if (path.empty() || path.front() == '/' || path.find('\\') != std::string_view::npos ||
      path.find(':') != std::string_view::npos)
    return false;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto slash = path.find('/', start);
    const auto part = path.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start);
    if (part.empty() || part == "..") return false;
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return true;
}

namespace detail {

using nlohmann::json;

inline const std::string kManifest = "manifest.json";
inline const std::string kAnimals = "animals.jsonl";
inline const std::string kHotspots = "hotspots.jsonl";
inline const std::string kEvents = "events.jsonl";

// Reads typed fields off one JSON object, turning every problem into a
// diagnostic against the current record.
class FieldReader {
 public:
  FieldReader(const json& obj, std::vector<Diagnostic>& sink, std::string file, std::size_t line)
      : obj_(obj), sink_(sink), file_(std::move(file)), line_(line) {}

  void set_record(std::string id) { record_ = std::move(id); }
  bool failed() const noexcept { return failed_; }

  void mark_failed() noexcept { failed_ = true; }

  void fail(ErrorCode code, const std::string& message) {
    failed_ = true;
    sink_.push_back({code, file_, line_, record_, message});
  }

  const json* field(const char* name, bool required = true) {
    const auto it = obj_.find(name);
    if (it == obj_.end() || it->is_null()) {
      if (required) fail(ErrorCode::SchemaViolation, std::string("missing field '") + name + "'");
      return nullptr;
    }
    return &*it;
  }

  std::optional<std::string> string(const char* name, bool required = true, bool non_empty = true) {
    const json* v = field(name, required);
    if (v == nullptr) return std::nullopt;
    if (!v->is_string() || (non_empty && v->get_ref<const std::string&>().empty())) {
      fail(ErrorCode::SchemaViolation, std::string("field '") + name + "' must be a " +
                                           (non_empty ? "non-empty " : "") + "string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<std::string> slug(const char* name, bool required = true) {
    auto s = string(name, required);
    if (s && !is_slug(*s)) {
      fail(ErrorCode::SchemaViolation, std::string("field '") + name + "' is not a slug: '" + *s + "'");
      return std::nullopt;
    }
    return s;
  }

  std::optional<double> number(const char* name, bool required = true) {
    const json* v = field(name, required);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number() || !std::isfinite(v->get<double>())) {
      fail(ErrorCode::SchemaViolation, std::string("field '") + name + "' must be a finite number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<geo::GeoPoint> point(const json& v, const std::string& what) {
    if (!v.is_object() || !v.contains("lat") || !v.contains("lon") || !v["lat"].is_number() ||
        !v["lon"].is_number()) {
      fail(ErrorCode::SchemaViolation, what + " must be an object with numeric 'lat' and 'lon'");
      return std::nullopt;
    }
    geo::GeoPoint p{v["lat"].get<double>(), v["lon"].get<double>()};
    if (!geo::is_valid(p)) {
      fail(ErrorCode::SchemaViolation, what + " is outside latitude/longitude range");
      return std::nullopt;
    }
    return p;
  }

 private:
  const json& obj_;
  std::vector<Diagnostic>& sink_;
  std::string file_;
  std::size_t line_;
  std::string record_;
  bool failed_ = false;
};

inline std::optional<std::string> read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Line {
  std::size_t number;
  std::string text;
};

// Non-blank lines, CR stripped, '#' comment lines skipped.
inline std::vector<Line> records_of(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back({n, std::move(line)});
  }
  return out;
}

inline std::optional<std::string> load_file(const std::filesystem::path& root, const std::string& name,
                                            std::vector<Diagnostic>& diags) {
  const auto path = root / name;
  if (!std::filesystem::is_regular_file(path)) {
    diags.push_back({ErrorCode::MissingFile, name, 0, "", "file not found"});
    return std::nullopt;
  }
  auto text = read_text(path);
  if (!text) throw Error(ErrorCode::MissingFile, "cannot read " + path.string());
  return text;
}

// JSON-lines table: yields (line, object) for each record that parses as a
// JSON object, reporting the rest.
template <typename Fn>
void for_each_record(const std::string& file, const std::string& text, std::vector<Diagnostic>& diags, Fn&& fn) {
  for (const auto& line : records_of(text)) {
    json obj;
    try {
      obj = json::parse(line.text);
    } catch (const json::parse_error& e) {
      diags.push_back({ErrorCode::SchemaViolation, file, line.number, "", std::string("invalid JSON: ") + e.what()});
      continue;
    }
    if (!obj.is_object()) {
      diags.push_back({ErrorCode::SchemaViolation, file, line.number, "", "record must be a JSON object"});
      continue;
    }
    fn(line.number, obj);
  }
}

inline void check_unique(FieldReader& r, std::set<std::string>& seen, const std::string& id) {
  if (!seen.insert(id).second) r.fail(ErrorCode::SchemaViolation, "duplicate id '" + id + "'");
}

struct ManifestRead {
  Manifest manifest;
  bool bounds_ok = false;
  std::optional<std::array<double, 7>> cached;  // a..f, rms
};

inline std::optional<ManifestRead> parse_manifest(const std::string& text, std::vector<Diagnostic>& diags) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    diags.push_back({ErrorCode::SchemaViolation, kManifest, 0, "", std::string("invalid JSON: ") + e.what()});
    return std::nullopt;
  }
  if (!obj.is_object()) {
    diags.push_back({ErrorCode::SchemaViolation, kManifest, 0, "", "manifest must be a JSON object"});
    return std::nullopt;
  }
  ManifestRead out;
  Manifest& m = out.manifest;
  FieldReader r(obj, diags, kManifest, 0);

  if (const json* v = r.field("format_version")) {
    if (!v->is_number_integer()) {
      r.fail(ErrorCode::SchemaViolation, "field 'format_version' must be an integer");
    } else if (v->get<int>() != kFormatVersion) {
      r.fail(ErrorCode::SchemaViolation, "unsupported format_version " + std::to_string(v->get<long long>()) +
                                             " (this loader reads version " + std::to_string(kFormatVersion) + ")");
    } else {
      m.format_version = kFormatVersion;
    }
  }
  if (auto s = r.string("name")) m.name = *s;
  if (auto s = r.string("version")) m.version = *s;

  if (const json* map = r.field("map")) {
    if (!map->is_object()) {
      r.fail(ErrorCode::SchemaViolation, "field 'map' must be an object");
    } else {
      FieldReader mr(*map, diags, kManifest, 0);
      mr.set_record("map");
      if (auto s = mr.string("image")) {
        if (!is_pack_relative(*s))
          mr.fail(ErrorCode::SchemaViolation, "map image path must be pack-relative: '" + *s + "'");
        else
          m.map_image = *s;
      }
      const auto w = mr.number("width");
      const auto h = mr.number("height");
      if (w && h) {
        if (*w > 0 && *h > 0)
          m.map_extent = {*w, *h};
        else
          mr.fail(ErrorCode::SchemaViolation, "map width and height must be positive");
      }
    }
  }

  if (const json* b = r.field("bounds")) {
    if (!b->is_object()) {
      r.fail(ErrorCode::SchemaViolation, "field 'bounds' must be an object");
    } else {
      FieldReader br(*b, diags, kManifest, 0);
      br.set_record("bounds");
      const auto a = br.number("min_lat"), c = br.number("max_lat");
      const auto d = br.number("min_lon"), e = br.number("max_lon");
      const auto margin = br.number("margin_m", false);
      if (!br.failed()) {
        m.bounds = {*a, *c, *d, *e, margin.value_or(0.0)};
        if (m.bounds.valid())
          out.bounds_ok = true;
        else
          br.fail(ErrorCode::SchemaViolation, "bounds need min < max on both axes and margin_m >= 0");
      }
    }
  }

  if (const json* c = r.field("calibration")) {
    if (!c->is_object()) {
      r.fail(ErrorCode::SchemaViolation, "field 'calibration' must be an object");
    } else {
      FieldReader cr(*c, diags, kManifest, 0);
      cr.set_record("calibration");
      if (auto s = cr.string("source", false)) {
        if (is_pack_relative(*s))
          m.calibration_source = *s;
        else
          cr.fail(ErrorCode::SchemaViolation, "calibration source must be pack-relative");
      }
      std::array<double, 7> k{};
      const char* names[] = {"a", "b", "c", "d", "e", "f", "rms_residual"};
      bool ok = true;
      for (std::size_t i = 0; i < 7; ++i) {
        const auto v = cr.number(names[i]);
        ok = ok && v.has_value();
        if (v) k[i] = *v;
      }
      if (ok) out.cached = k;
    }
  }
  return out;
}

struct NumberedPoint {
  std::size_t line;
  geo::ControlPoint point;
};

inline std::vector<NumberedPoint> parse_control_points(const std::string& file, const std::string& text,
                                                       std::vector<Diagnostic>& diags) {
  std::vector<NumberedPoint> out;
  bool first = true;
  for (const auto& line : records_of(text)) {
    std::vector<std::string> cells;
    std::stringstream ss(line.text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (first) {
      first = false;
      if (!cells.empty() && !cells[0].empty() && std::isalpha(static_cast<unsigned char>(cells[0][0]))) {
        if (cells != std::vector<std::string>{"lat", "lon", "x_px", "y_px"})
          diags.push_back({ErrorCode::SchemaViolation, file, line.number, "",
                           "header must be 'lat,lon,x_px,y_px'"});
        continue;
      }
    }
    if (cells.size() != 4) {
      diags.push_back({ErrorCode::SchemaViolation, file, line.number, "",
                       "expected 4 fields (lat,lon,x_px,y_px), got " + std::to_string(cells.size())});
      continue;
    }
    double v[4];
    bool ok = true;
    for (int i = 0; i < 4; ++i) {
      try {
        std::size_t used = 0;
        v[i] = std::stod(cells[i], &used);
        ok = ok && used == cells[i].size() && std::isfinite(v[i]);
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) {
      diags.push_back({ErrorCode::SchemaViolation, file, line.number, "", "non-numeric control point field"});
      continue;
    }
    const geo::ControlPoint cp{{v[0], v[1]}, {v[2], v[3]}};
    if (!geo::is_valid(cp.geo)) {
      diags.push_back({ErrorCode::SchemaViolation, file, line.number, "", "control point outside lat/lon range"});
      continue;
    }
    out.push_back({line.number, cp});
  }
  return out;
}

}  // namespace detail

/// Reads and validates a pack, collecting every finding. Throws only when
/// the root itself is missing or a file exists but cannot be read.
inline PackInspection inspect_pack(const std::filesystem::path& root) {
  using detail::FieldReader;
  using nlohmann::json;
  namespace fs = std::filesystem;

  if (!fs::is_directory(root)) throw Error(ErrorCode::MissingFile, "pack directory not found: " + root.string());

  PackInspection result;
  auto& diags = result.diagnostics;
  ContentPack pack;
  pack.root = root;

  // manifest + calibration
  std::optional<detail::ManifestRead> manifest;
  if (auto text = detail::load_file(root, detail::kManifest, diags)) manifest = detail::parse_manifest(*text, diags);
  if (manifest) {
    pack.manifest = manifest->manifest;
    const auto& m = pack.manifest;
    if (!m.map_image.empty() && !fs::is_regular_file(root / m.map_image))
      diags.push_back({ErrorCode::MissingFile, detail::kManifest, 0, "map", "map image not found: " + m.map_image});

    const std::string& cal_file = m.calibration_source;
    if (auto text = detail::load_file(root, cal_file, diags)) {
      const std::size_t before = diags.size();
      const auto numbered = detail::parse_control_points(cal_file, *text, diags);
      std::vector<geo::ControlPoint> points;
      viewport::ZooBounds strict = m.bounds;
      strict.margin_m = 0;
      for (const auto& [line, cp] : numbered) {
        points.push_back(cp);
        if (manifest->bounds_ok && !viewport::in_zoo_range(cp.geo, strict))
          diags.push_back({ErrorCode::SchemaViolation, cal_file, line, "", "control point lies outside the zoo bounds"});
      }
      if (diags.size() == before) {
        try {
          pack.manifest.calibration = geo::fit_affine(points);
          if (manifest->cached) {
            const auto& k = *manifest->cached;
            const auto& fit = pack.manifest.calibration;
            const double got[] = {fit.a, fit.b, fit.c, fit.d, fit.e, fit.f};
            const char* names = "abcdef";
            for (int i = 0; i < 6; ++i) {
              if (std::fabs(k[i] - got[i]) > 1e-6 * std::max(std::fabs(got[i]), 1.0)) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "cached coefficient %c = %.10g but control points fit %.10g", names[i],
                              k[i], got[i]);
                diags.push_back({ErrorCode::CalibrationMismatch, detail::kManifest, 0, "calibration", buf});
                break;
              }
            }
          }
        } catch (const Error& e) {
          diags.push_back({ErrorCode::SchemaViolation, cal_file, 0, "", e.what()});
        }
      }
    }
  }

  // animals
  std::set<std::string> animal_ids;
  if (auto text = detail::load_file(root, detail::kAnimals, diags)) {
    std::set<std::string> seen;
    detail::for_each_record(detail::kAnimals, *text, diags, [&](std::size_t line, const json& obj) {
      FieldReader r(obj, diags, detail::kAnimals, line);
      AnimalRecord a;
      if (const json* id = obj.contains("id") ? &obj["id"] : nullptr; id && id->is_string()) {
        r.set_record(id->get<std::string>());
        animal_ids.insert(id->get<std::string>());
      }
      if (auto s = r.slug("id")) {
        a.id = *s;
        detail::check_unique(r, seen, *s);
      }
      if (auto s = r.string("name")) a.name = *s;
      if (auto s = r.string("species")) a.species = *s;
      if (auto s = r.string("description", true, false)) a.description = *s;
      if (const json* media = r.field("media", false)) {
        if (!media->is_array()) {
          r.fail(ErrorCode::SchemaViolation, "field 'media' must be an array");
        } else {
          for (std::size_t i = 0; i < media->size(); ++i) {
            const json& item = (*media)[i];
            const std::string where = "media[" + std::to_string(i) + "]";
            if (!item.is_object()) {
              r.fail(ErrorCode::SchemaViolation, where + " must be an object");
              continue;
            }
            FieldReader mr(item, diags, detail::kAnimals, line);
            mr.set_record(a.id.empty() ? where : a.id + "/" + where);
            MediaRef ref;
            if (auto k = mr.string("kind")) {
              if (auto kind = media_kind_from(*k))
                ref.kind = *kind;
              else
                mr.fail(ErrorCode::SchemaViolation, "unknown media kind '" + *k + "'");
            }
            if (auto p = mr.string("path")) {
              if (!is_pack_relative(*p))
                mr.fail(ErrorCode::SchemaViolation, "media path must be pack-relative: '" + *p + "'");
              else if (!fs::is_regular_file(root / *p))
                mr.fail(ErrorCode::MissingFile, "media file not found: " + *p);
              ref.path = *p;
            }
            if (auto c = mr.string("caption", false, false)) ref.caption = *c;
            if (mr.failed()) r.mark_failed();
            a.media.push_back(std::move(ref));
          }
        }
      }
      if (!r.failed()) pack.animals.push_back(std::move(a));
    });
  }

  // hotspots
  std::set<std::string> hotspot_ids;
  if (auto text = detail::load_file(root, detail::kHotspots, diags)) {
    std::set<std::string> seen;
    detail::for_each_record(detail::kHotspots, *text, diags, [&](std::size_t line, const json& obj) {
      FieldReader r(obj, diags, detail::kHotspots, line);
      geofence::Hotspot h;
      if (obj.contains("id") && obj["id"].is_string()) {
        r.set_record(obj["id"].get<std::string>());
        hotspot_ids.insert(obj["id"].get<std::string>());
      }
      if (auto s = r.slug("id")) {
        h.id = *s;
        detail::check_unique(r, seen, *s);
      }
      if (auto s = r.string("name")) h.name = *s;
      if (auto s = r.string("category", false)) h.category = *s;
      if (auto s = r.slug("content_id")) {
        h.content_id = *s;
        if (!animal_ids.contains(*s))
          r.fail(ErrorCode::BrokenReference, "content_id '" + *s + "' does not match any animal");
      }
      if (const json* g = r.field("geometry")) {
        const std::string type = g->is_object() && g->contains("type") && (*g)["type"].is_string()
                                     ? (*g)["type"].get<std::string>()
                                     : "";
        if (type == "circle") {
          FieldReader gr(*g, diags, detail::kHotspots, line);
          gr.set_record(h.id);
          geofence::Circle c;
          std::optional<geo::GeoPoint> center;
          if (const json* cj = gr.field("center")) center = gr.point(*cj, "geometry.center");
          const auto radius = gr.number("radius_m");
          if (center && radius) {
            c = {*center, *radius};
            h.geometry = c;
          }
          if (gr.failed()) r.mark_failed();
        } else if (type == "polygon") {
          geofence::Polygon poly;
          const json* vs = g->contains("vertices") ? &(*g)["vertices"] : nullptr;
          if (vs == nullptr || !vs->is_array()) {
            r.fail(ErrorCode::SchemaViolation, "geometry.vertices must be an array");
          } else {
            for (std::size_t i = 0; i < vs->size(); ++i) {
              if (auto p = r.point((*vs)[i], "geometry.vertices[" + std::to_string(i) + "]"))
                poly.vertices.push_back(*p);
            }
            h.geometry = poly;
          }
        } else {
          r.fail(ErrorCode::SchemaViolation, "geometry.type must be 'circle' or 'polygon'");
        }
        if (!r.failed()) {
          for (const auto& problem : geofence::geometry_problems(h.geometry)) {
            r.fail(ErrorCode::SchemaViolation, "geometry: " + problem);
            break;
          }
        }
      }
      if (!r.failed()) pack.hotspots.push_back(std::move(h));
    });
  }

  // events
  if (auto text = detail::load_file(root, detail::kEvents, diags)) {
    std::set<std::string> seen;
    detail::for_each_record(detail::kEvents, *text, diags, [&](std::size_t line, const json& obj) {
      FieldReader r(obj, diags, detail::kEvents, line);
      EventRecord ev;
      if (obj.contains("id") && obj["id"].is_string()) r.set_record(obj["id"].get<std::string>());
      if (auto s = r.slug("id")) {
        ev.id = *s;
        detail::check_unique(r, seen, *s);
      }
      if (auto s = r.string("title")) ev.title = *s;
      if (auto s = r.slug("location_hotspot_id", false)) {
        ev.location_hotspot_id = *s;
        if (!hotspot_ids.contains(*s))
          r.fail(ErrorCode::BrokenReference, "location_hotspot_id '" + *s + "' does not match any hotspot");
      }
      const auto start_text = r.string("start");
      const auto end_text = r.string("end");
      std::optional<TimeOfDay> start, end;
      if (start_text && !(start = TimeOfDay::parse(*start_text)))
        r.fail(ErrorCode::SchemaViolation, "start '" + *start_text + "' is not HH:MM or HH:MM:SS");
      if (end_text && !(end = TimeOfDay::parse(*end_text)))
        r.fail(ErrorCode::SchemaViolation, "end '" + *end_text + "' is not HH:MM or HH:MM:SS");
      if (start && end) {
        ev.start = *start;
        ev.end = *end;
        if (!(ev.end > ev.start)) r.fail(ErrorCode::SchemaViolation, "end must be later than start");
      }
      if (!r.failed()) pack.events.push_back(std::move(ev));
    });
  }

  if (diags.empty()) result.pack = std::move(pack);
  return result;
}

/// Validated pack or PackError carrying every finding.
inline ContentPack load_pack(const std::filesystem::path& root) {
  auto inspection = inspect_pack(root);
  if (!inspection.diagnostics.empty()) throw PackError(std::move(inspection.diagnostics));
  return std::move(*inspection.pack);
}

namespace detail {

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

/// Case-insensitive substring search. Name matches rank before species
/// matches, which rank before description matches; then by id.
inline std::vector<AnimalRecord> search(const ContentPack& pack, std::string_view query) {
  if (query.empty()) return {};
  const std::string needle = detail::ascii_lower(query);
  std::vector<std::pair<int, const AnimalRecord*>> hits;
  for (const auto& a : pack.animals) {
    int rank = -1;
    if (detail::ascii_lower(a.name).find(needle) != std::string::npos)
      rank = 0;
    else if (detail::ascii_lower(a.species).find(needle) != std::string::npos)
      rank = 1;
    else if (detail::ascii_lower(a.description).find(needle) != std::string::npos)
      rank = 2;
    if (rank >= 0) hits.emplace_back(rank, &a);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& l, const auto& r) {
    return l.first != r.first ? l.first < r.first : l.second->id < r.second->id;
  });
  std::vector<AnimalRecord> out;
  out.reserve(hits.size());
  for (const auto& [rank, a] : hits) out.push_back(*a);
  return out;
}

/// Events overlapping [t0, t1]: start < t1 and end > t0, by start then id.
inline std::vector<EventRecord> events_between(const ContentPack& pack, TimeOfDay t0, TimeOfDay t1) {
  if (t1 < t0) throw Error(ErrorCode::InvalidArgument, "events window must have from <= to");
  std::vector<EventRecord> out;
  for (const auto& e : pack.events)
    if (e.start < t1 && e.end > t0) out.push_back(e);
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    return l.start != r.start ? l.start < r.start : l.id < r.id;
  });
  return out;
}

inline const AnimalRecord& get_content(const ContentPack& pack, std::string_view hotspot_id) {
  const auto* h = pack.find_hotspot(hotspot_id);
  if (h == nullptr) throw Error(ErrorCode::UnknownHotspot, "no hotspot '" + std::string(hotspot_id) + "'");
  const auto* a = pack.find_animal(h->content_id);
  if (a == nullptr)
    throw Error(ErrorCode::BrokenReference, "hotspot '" + h->id + "' references missing '" + h->content_id + "'");
  return *a;
}

}  // namespace zooguide::content
