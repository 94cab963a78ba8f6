#pragma once

// NMEA-0183 GGA/RMC sentences: checksum, coordinate decoding, parsing and
// GGA emission. Everything here is a pure function.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "zooguide/error.hpp"

namespace zooguide::nmea {

enum class FixQuality { NoFix = 0, GpsFix = 1, DgpsFix = 2 };

struct UtcTime {
  int hour = 0;
  int minute = 0;
  double second = 0.0;

  double seconds_of_day() const noexcept { return hour * 3600.0 + minute * 60.0 + second; }

  static UtcTime from_seconds_of_day(double s) noexcept {
    s = std::fmod(s, 86400.0);
    if (s < 0) s += 86400.0;
    UtcTime t;
    t.hour = static_cast<int>(s / 3600.0);
    s -= t.hour * 3600.0;
    t.minute = static_cast<int>(s / 60.0);
    t.second = s - t.minute * 60.0;
    return t;
  }

  bool operator==(const UtcTime&) const = default;
};

/// One position report. When quality is NoFix the coordinates carry no
/// meaning and has_position() is false; such fixes must never be used for
/// geofencing.
struct GeoFix {
  double latitude = 0.0;
  double longitude = 0.0;
  UtcTime timestamp;
  FixQuality quality = FixQuality::NoFix;
  int satellites = 0;
  std::optional<double> hdop;
  double altitude_m = 0.0;

  bool has_position() const noexcept { return quality != FixQuality::NoFix; }
  bool operator==(const GeoFix&) const = default;
};

struct GgaFix {
  GeoFix fix;
  bool operator==(const GgaFix&) const = default;
};

struct RmcFix {
  GeoFix fix;
  bool active = false;
  std::optional<double> speed_knots;
  std::optional<double> course_deg;
  std::string date;  // ddmmyy as transmitted
  bool operator==(const RmcFix&) const = default;
};

struct Unsupported {
  std::string talker;
  std::string type;
  bool operator==(const Unsupported&) const = default;
};

using ParsedSentence = std::variant<GgaFix, RmcFix, Unsupported>;

inline std::uint8_t checksum_byte(std::string_view body) noexcept {
  std::uint8_t sum = 0;
  for (char ch : body) sum ^= static_cast<std::uint8_t>(ch);
  return sum;
}

inline std::string compute_checksum(std::string_view body) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  const std::uint8_t sum = checksum_byte(body);
  return {kHex[sum >> 4], kHex[sum & 0x0F]};
}

namespace detail {

[[noreturn]] inline void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedField, what);
}

inline bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

// digits[.digits], optionally with a leading '-'. No exponents, no inf/nan.
inline std::optional<double> parse_decimal(std::string_view s, bool allow_sign) {
  std::size_t i = 0;
  if (allow_sign && i < s.size() && s[i] == '-') ++i;
  std::size_t digits = 0;
  bool dot = false;
  for (std::size_t j = i; j < s.size(); ++j) {
    if (is_digit(s[j])) {
      ++digits;
    } else if (s[j] == '.' && !dot) {
      dot = true;
    } else {
      return std::nullopt;
    }
  }
  if (digits == 0 || s.back() == '.') return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

inline std::optional<int> parse_count(std::string_view s) {
  if (s.empty() || s.size() > 4) return std::nullopt;
  int value = 0;
  for (char c : s) {
    if (!is_digit(c)) return std::nullopt;
    value = value * 10 + (c - '0');
  }
  return value;
}

inline std::vector<std::string_view> split_fields(std::string_view body) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = body.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(body.substr(start));
      return out;
    }
    out.push_back(body.substr(start, comma - start));
    start = comma + 1;
  }
}

inline UtcTime parse_time(std::string_view s) {
  if (s.size() < 6) malformed("time field '" + std::string(s) + "'");
  for (std::size_t i = 0; i < 6; ++i)
    if (!is_digit(s[i])) malformed("time field '" + std::string(s) + "'");
  UtcTime t;
  t.hour = (s[0] - '0') * 10 + (s[1] - '0');
  t.minute = (s[2] - '0') * 10 + (s[3] - '0');
  const auto sec = parse_decimal(s.substr(4), false);
  if (!sec || t.hour > 23 || t.minute > 59 || *sec >= 61.0)
    malformed("time field '" + std::string(s) + "'");
  t.second = *sec;
  return t;
}

inline char single_char(std::string_view s, std::string_view what) {
  if (s.size() != 1) malformed(std::string(what) + " '" + std::string(s) + "'");
  return s[0];
}

}  // namespace detail

/// Decodes `ddmm.mmmm` / `dddmm.mmmm` into signed decimal degrees.
inline double ddmm_to_degrees(std::string_view field, char hemisphere) {
  using detail::is_digit;
  const std::string shown(field);
  if (field.empty()) detail::malformed("empty coordinate");
  const auto dot = field.find('.');
  const std::size_t int_len = dot == std::string_view::npos ? field.size() : dot;
  if (int_len < 2 || int_len > 5) detail::malformed("coordinate '" + shown + "'");
  for (std::size_t i = 0; i < int_len; ++i)
    if (!is_digit(field[i])) detail::malformed("coordinate '" + shown + "'");

  int degrees = 0;
  for (std::size_t i = 0; i + 2 < int_len; ++i) degrees = degrees * 10 + (field[i] - '0');
  const auto minutes = detail::parse_decimal(field.substr(int_len - 2), false);
  if (!minutes) detail::malformed("coordinate '" + shown + "'");
  if (*minutes >= 60.0) detail::malformed("minutes >= 60 in '" + shown + "'");

  const double value = degrees + *minutes / 60.0;
  double limit = 0.0;
  bool negative = false;
  switch (hemisphere) {
    case 'N': limit = 90.0; break;
    case 'S': limit = 90.0; negative = true; break;
    case 'E': limit = 180.0; break;
    case 'W': limit = 180.0; negative = true; break;
    default: detail::malformed(std::string("hemisphere '") + hemisphere + "'");
  }
  if (value > limit) detail::malformed("coordinate out of range '" + shown + "'");
  if (value == 0.0) return 0.0;
  return negative ? -value : value;
}

inline double ddmm_to_degrees(std::string_view field, std::string_view hemisphere) {
  return ddmm_to_degrees(field, detail::single_char(hemisphere, "hemisphere"));
}

namespace detail {

inline void parse_position(std::string_view lat, std::string_view ns, std::string_view lon,
                           std::string_view ew, GeoFix& fix) {
  const char ns_c = single_char(ns, "latitude hemisphere");
  const char ew_c = single_char(ew, "longitude hemisphere");
  if (ns_c != 'N' && ns_c != 'S') malformed(std::string("latitude hemisphere '") + ns_c + "'");
  if (ew_c != 'E' && ew_c != 'W') malformed(std::string("longitude hemisphere '") + ew_c + "'");
  fix.latitude = ddmm_to_degrees(lat, ns_c);
  fix.longitude = ddmm_to_degrees(lon, ew_c);
}

inline bool all_empty(std::initializer_list<std::string_view> fields) {
  for (auto f : fields)
    if (!f.empty()) return false;
  return true;
}

inline GgaFix parse_gga(const std::vector<std::string_view>& f) {
  if (f.size() < 10) malformed("GGA needs at least 10 fields, got " + std::to_string(f.size()));
  GgaFix out;
  GeoFix& fix = out.fix;

  const char q = single_char(f[6], "fix quality");
  if (!is_digit(q)) malformed(std::string("fix quality '") + q + "'");
  fix.quality = q == '0' ? FixQuality::NoFix : q == '2' ? FixQuality::DgpsFix : FixQuality::GpsFix;

  if (!f[1].empty()) {
    fix.timestamp = parse_time(f[1]);
  } else if (fix.has_position()) {
    malformed("empty time on a valid fix");
  }

  if (fix.has_position() || !all_empty({f[2], f[3], f[4], f[5]}))
    parse_position(f[2], f[3], f[4], f[5], fix);

  if (!f[7].empty()) {
    const auto sats = parse_count(f[7]);
    if (!sats) malformed("satellite count '" + std::string(f[7]) + "'");
    fix.satellites = *sats;
  }
  if (!f[8].empty()) {
    fix.hdop = parse_decimal(f[8], false);
    if (!fix.hdop) malformed("hdop '" + std::string(f[8]) + "'");
  }
  if (!f[9].empty()) {
    const auto alt = parse_decimal(f[9], true);
    if (!alt) malformed("altitude '" + std::string(f[9]) + "'");
    fix.altitude_m = *alt;
  }
  return out;
}

inline RmcFix parse_rmc(const std::vector<std::string_view>& f) {
  if (f.size() < 10) malformed("RMC needs at least 10 fields, got " + std::to_string(f.size()));
  RmcFix out;
  GeoFix& fix = out.fix;

  const char status = single_char(f[2], "RMC status");
  if (status != 'A' && status != 'V') malformed(std::string("RMC status '") + status + "'");
  out.active = status == 'A';
  fix.quality = out.active ? FixQuality::GpsFix : FixQuality::NoFix;
  if (out.active && f.size() > 12 && f[12] == "D") fix.quality = FixQuality::DgpsFix;

  if (!f[1].empty()) {
    fix.timestamp = parse_time(f[1]);
  } else if (fix.has_position()) {
    malformed("empty time on a valid fix");
  }
  if (fix.has_position() || !all_empty({f[3], f[4], f[5], f[6]}))
    parse_position(f[3], f[4], f[5], f[6], fix);

  if (!f[7].empty()) {
    out.speed_knots = parse_decimal(f[7], false);
    if (!out.speed_knots) malformed("speed '" + std::string(f[7]) + "'");
  }
  if (!f[8].empty()) {
    out.course_deg = parse_decimal(f[8], false);
    if (!out.course_deg) malformed("course '" + std::string(f[8]) + "'");
  }
  if (!f[9].empty()) {
    if (f[9].size() != 6 || !parse_count(f[9].substr(0, 4)) || !parse_count(f[9].substr(4)))
      malformed("date '" + std::string(f[9]) + "'");
    out.date = std::string(f[9]);
  }
  return out;
}

}  // namespace detail

/// Parses one sentence. Trailing CR/LF is optional. Unknown sentence types
/// come back as Unsupported; corruption throws ChecksumMismatch and
/// unreadable GGA/RMC fields throw MalformedField.
inline ParsedSentence parse_sentence(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  if (line.empty() || line.front() != '$') detail::malformed("sentence does not start with '$'");
  if (line.size() < 4 || line[line.size() - 3] != '*')
    detail::malformed("sentence has no '*' checksum suffix");

  const std::string_view body = line.substr(1, line.size() - 4);
  const std::string_view given = line.substr(line.size() - 2);
  for (char c : given) {
    if (!detail::is_digit(c) && !(c >= 'A' && c <= 'F'))
      detail::malformed("checksum '" + std::string(given) + "' is not two uppercase hex digits");
  }
  const std::string expected = compute_checksum(body);
  if (given != expected)
    throw Error(ErrorCode::ChecksumMismatch,
                "expected " + expected + ", sentence carries " + std::string(given));

  for (char c : body) {
    if (c < 0x20 || c > 0x7E || c == '$' || c == '*')
      detail::malformed("non-printable or reserved character in body");
  }

  const auto fields = detail::split_fields(body);
  const std::string_view address = fields.front();
  if (address.size() < 3 || address.size() > 6) detail::malformed("address '" + std::string(address) + "'");
  for (char c : address) {
    if (!detail::is_digit(c) && !(c >= 'A' && c <= 'Z'))
      detail::malformed("address '" + std::string(address) + "'");
  }

  const std::size_t talker_len = address.front() == 'P' ? 1 : 2;
  const std::string_view type = address.substr(talker_len);
  if (talker_len == 2 && type == "GGA") return detail::parse_gga(fields);
  if (talker_len == 2 && type == "RMC") return detail::parse_rmc(fields);
  return Unsupported{std::string(address.substr(0, talker_len)), std::string(type)};
}

/// The fix carried by a parsed sentence, if it carries a usable position.
inline std::optional<GeoFix> position_of(const ParsedSentence& sentence) {
  const GeoFix* fix = nullptr;
  if (const auto* gga = std::get_if<GgaFix>(&sentence)) fix = &gga->fix;
  if (const auto* rmc = std::get_if<RmcFix>(&sentence)) fix = &rmc->fix;
  if (fix == nullptr || !fix->has_position()) return std::nullopt;
  return *fix;
}

namespace detail {

// Fixed-point 1e-4 arc-minute rendering; the rounding happens once on the
// integer count, so minutes can never print as 60.0000.
inline std::string format_ddmm(double degrees, int degree_digits) {
  const long long units = std::llround(std::fabs(degrees) * 600000.0);
  const long long whole = units / 600000;
  const long long rem = units % 600000;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*lld%02lld.%04lld", degree_digits, whole, rem / 10000,
                rem % 10000);
  return buf;
}

inline std::string format_time(const UtcTime& t) {
  const long long cs = std::llround(t.seconds_of_day() * 100.0) % 8640000LL;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02lld%02lld%02lld.%02lld", cs / 360000, (cs / 6000) % 60,
                (cs / 100) % 60, cs % 100);
  return buf;
}

}  // namespace detail

/// Emits `$GPGGA,...*CS\r\n`. NoFix fixes are written with empty position
/// fields and quality 0, the way receivers report no lock.
inline std::string format_gga(const GeoFix& fix) {
  std::string body = "GPGGA,";
  body += detail::format_time(fix.timestamp);
  body += ',';
  char buf[64];
  if (fix.has_position()) {
    const bool south = fix.latitude < 0 && std::llround(-fix.latitude * 600000.0) > 0;
    const bool west = fix.longitude < 0 && std::llround(-fix.longitude * 600000.0) > 0;
    body += detail::format_ddmm(fix.latitude, 2);
    body += south ? ",S," : ",N,";
    body += detail::format_ddmm(fix.longitude, 3);
    body += west ? ",W," : ",E,";
    body += std::to_string(static_cast<int>(fix.quality));
  } else {
    body += ",,,,0";
  }
  std::snprintf(buf, sizeof buf, ",%02d,", fix.satellites < 0 ? 0 : fix.satellites > 99 ? 99 : fix.satellites);
  body += buf;
  if (fix.hdop) {
    std::snprintf(buf, sizeof buf, "%.1f", *fix.hdop);
    body += buf;
  }
  if (fix.has_position()) {
    std::snprintf(buf, sizeof buf, ",%.1f,M,0.0,M,,", fix.altitude_m);
    body += buf;
  } else {
    body += ",,M,,M,,";
  }
  return "$" + body + "*" + compute_checksum(body) + "\r\n";
}

}  // namespace zooguide::nmea
