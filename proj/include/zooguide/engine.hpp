#pragma once

// The guide session: connection lifecycle, fix intake, viewport and
// geofence updates, and the six-item menu.
//
// Connection transitions (anything not listed leaves the state unchanged):
//
//   Splash      --tick >= splash_seconds-------------------> Connecting (attempt 1)
//   Connecting  --usable fix-------------------------------> Connected
//   Connecting  --tick >= entered + connect_timeout_s------> Failed
//   Connected   --tick >= last fix + fix_gap_s-------------> Lost
//   Lost        --usable fix-------------------------------> Connected
//   Lost        --tick >= entered + connect_timeout_s------> Failed
//   Failed      --restart (attempt 1)----------------------> Connecting (attempt 2)
//   Failed      --reached with attempt 2-------------------> Exited (same instant)
//   any         --menu Close-------------------------------> Exited
//
// Exited is terminal: ticks and fixes are ignored, everything else throws
// SessionClosed. Timed transitions are stamped at their deadline, so one
// large tick replays every transition it skipped over.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "zooguide/content.hpp"
#include "zooguide/error.hpp"
#include "zooguide/geo.hpp"
#include "zooguide/geofence.hpp"
#include "zooguide/nmea.hpp"
#include "zooguide/viewport.hpp"

namespace zooguide::engine {

enum class ConnectionState { Splash, Connecting, Connected, Lost, Failed, Exited };

inline constexpr std::string_view to_string(ConnectionState s) {
  switch (s) {
    case ConnectionState::Splash: return "splash";
    case ConnectionState::Connecting: return "connecting";
    case ConnectionState::Connected: return "connected";
    case ConnectionState::Lost: return "lost";
    case ConnectionState::Failed: return "failed";
    case ConnectionState::Exited: return "exited";
  }
  return "exited";
}

struct Config {
  double splash_seconds = 5.0;
  double connect_timeout_s = 30.0;
  double fix_gap_s = 10.0;
  double exit_buffer_m = 5.0;
  viewport::ScreenSize screen{480, 640};
  std::size_t tour_guide_k = 5;

  void validate() const {
    const auto positive = [](double v) { return v > 0 && std::isfinite(v); };
    if (!(splash_seconds >= 0 && std::isfinite(splash_seconds)))
      throw Error(ErrorCode::ConfigInvalid, "splash_seconds must be >= 0");
    if (!positive(connect_timeout_s)) throw Error(ErrorCode::ConfigInvalid, "connect_timeout_s must be > 0");
    if (!positive(fix_gap_s)) throw Error(ErrorCode::ConfigInvalid, "fix_gap_s must be > 0");
    if (!(exit_buffer_m >= 0 && std::isfinite(exit_buffer_m)))
      throw Error(ErrorCode::ConfigInvalid, "exit_buffer_m must be >= 0");
    if (!positive(screen.width) || !positive(screen.height))
      throw Error(ErrorCode::ConfigInvalid, "screen size must be positive");
    if (tour_guide_k < 1) throw Error(ErrorCode::ConfigInvalid, "tour_guide_k must be >= 1");
  }
};

struct ContentSummary {
  std::string content_id;
  std::string name;
  std::string species;
  bool operator==(const ContentSummary&) const = default;
};

struct FixAccepted {
  nmea::GeoFix fix;
  geo::PixelPoint pixel;
  bool in_range = true;
  bool operator==(const FixAccepted&) const = default;
};

struct HotspotEntered {
  std::string hotspot_id;
  ContentSummary content;
  bool operator==(const HotspotEntered&) const = default;
};

struct HotspotExited {
  std::string hotspot_id;
  bool operator==(const HotspotExited&) const = default;
};

struct ConnectionChanged {
  ConnectionState state;
  int attempt = 0;
  bool operator==(const ConnectionChanged&) const = default;
};

struct OutOfRange {
  nmea::GeoFix fix;
  bool operator==(const OutOfRange&) const = default;
};

using GuideEvent = std::variant<FixAccepted, HotspotEntered, HotspotExited, ConnectionChanged, OutOfRange>;

struct LoggedEvent {
  std::uint64_t seq = 0;
  double elapsed_s = 0;
  GuideEvent event;
  bool operator==(const LoggedEvent&) const = default;
};

namespace menu {
struct CheckConnection {};
struct ShowCoordinates {};
struct TourGuide {};
struct Search {
  std::string query;
};
struct Events {
  content::TimeOfDay from;
  content::TimeOfDay to;
};
struct Close {};
}  // namespace menu

/// Exactly the six submenus; nothing else can be expressed.
using MenuAction = std::variant<menu::CheckConnection, menu::ShowCoordinates, menu::TourGuide, menu::Search,
                                menu::Events, menu::Close>;
static_assert(std::variant_size_v<MenuAction> == 6);

struct ConnectionReport {
  ConnectionState state;
  int attempt = 0;
  std::optional<double> seconds_since_fix;
};

struct CoordinatesReport {
  double latitude = 0;
  double longitude = 0;
  std::string text;
};

struct TourGuideEntry {
  std::string hotspot_id;
  std::string name;
  double distance_m = 0;
};

struct TourGuideReport {
  std::vector<TourGuideEntry> nearest;
};

struct SearchReport {
  std::vector<content::AnimalRecord> results;
};

struct EventsReport {
  std::vector<content::EventRecord> events;
};

struct ClosedReport {};

using MenuResponse =
    std::variant<ConnectionReport, CoordinatesReport, TourGuideReport, SearchReport, EventsReport, ClosedReport>;

inline std::string format_coordinates(double latitude, double longitude) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "lat %.6f, lon %.6f", latitude, longitude);
  return buf;
}

class Session {
 public:
  Session(std::shared_ptr<const content::ContentPack> pack, Config config)
      : pack_(std::move(pack)), config_(config) {
    if (!pack_) throw Error(ErrorCode::ConfigInvalid, "session needs a content pack");
    config_.validate();
    viewport_ = viewport::Viewport::make(config_.screen, pack_->manifest.map_extent);
  }

  ConnectionState state() const noexcept { return state_; }
  int attempt() const noexcept { return attempt_; }
  double now() const noexcept { return now_; }
  bool out_of_range() const noexcept { return out_of_range_; }
  const viewport::Viewport& viewport() const noexcept { return viewport_; }
  const geofence::FenceState& fence() const noexcept { return fence_; }
  const std::optional<nmea::GeoFix>& last_fix() const noexcept { return last_fix_; }
  const std::vector<LoggedEvent>& log() const noexcept { return log_; }
  const content::ContentPack& pack() const noexcept { return *pack_; }
  const Config& config() const noexcept { return config_; }

  std::vector<GuideEvent> on_tick(double elapsed_s) {
    std::vector<GuideEvent> out;
    if (state_ == ConnectionState::Exited || !(elapsed_s >= now_)) return out;
    now_ = elapsed_s;
    for (;;) {
      const auto deadline = pending_deadline();
      if (!deadline || now_ < *deadline) break;
      switch (state_) {
        case ConnectionState::Splash:
          attempt_ = 1;
          transition(ConnectionState::Connecting, *deadline, out);
          break;
        case ConnectionState::Connected:
          transition(ConnectionState::Lost, *deadline, out);
          break;
        case ConnectionState::Connecting:
        case ConnectionState::Lost:
          transition(ConnectionState::Failed, *deadline, out);
          if (attempt_ >= 2) transition(ConnectionState::Exited, *deadline, out);
          break;
        default:
          return out;
      }
    }
    return out;
  }

  std::vector<GuideEvent> on_fix(const nmea::GeoFix& fix) {
    std::vector<GuideEvent> out;
    if (!fix.has_position()) return out;
    if (state_ == ConnectionState::Splash || state_ == ConnectionState::Failed || state_ == ConnectionState::Exited)
      return out;
    if (state_ == ConnectionState::Connecting || state_ == ConnectionState::Lost)
      transition(ConnectionState::Connected, now_, out);

    last_fix_ = fix;
    last_fix_at_ = now_;
    const geo::GeoPoint p{fix.latitude, fix.longitude};
    if (!viewport::in_zoo_range(p, pack_->manifest.bounds)) {
      out_of_range_ = true;
      emit(OutOfRange{fix}, now_, out);
      return out;
    }
    out_of_range_ = false;
    const geo::PixelPoint px = geo::geo_to_pixel(pack_->manifest.calibration, p);
    viewport_ = viewport::center_on(viewport_, px);
    emit(FixAccepted{fix, px, true}, now_, out);

    auto update = geofence::update(std::move(fence_), pack_->hotspots, p, config_.exit_buffer_m);
    fence_ = std::move(update.state);
    for (const auto& ev : update.events) {
      if (ev.kind == geofence::FenceEvent::Kind::Entered) {
        const auto& animal = content::get_content(*pack_, ev.hotspot_id);
        emit(HotspotEntered{ev.hotspot_id, {animal.id, animal.name, animal.species}}, now_, out);
      } else {
        emit(HotspotExited{ev.hotspot_id}, now_, out);
      }
    }
    return out;
  }

  GuideEvent restart() {
    ensure_open();
    if (state_ != ConnectionState::Failed)
      throw Error(ErrorCode::InvalidState, std::string("restart is only possible after a failed connection, state is ") +
                                               std::string(to_string(state_)));
    if (attempt_ != 1) throw Error(ErrorCode::InvalidState, "the single restart has already been used");
    attempt_ = 2;
    std::vector<GuideEvent> out;
    transition(ConnectionState::Connecting, now_, out);
    return out.front();
  }

  MenuResponse menu_action(const MenuAction& action) {
    ensure_open();
    if (std::holds_alternative<menu::CheckConnection>(action)) {
      std::optional<double> since;
      if (last_fix_) since = now_ - last_fix_at_;
      return ConnectionReport{state_, attempt_, since};
    }
    if (std::holds_alternative<menu::Close>(action)) {
      std::vector<GuideEvent> out;
      transition(ConnectionState::Exited, now_, out);
      return ClosedReport{};
    }
    if (state_ != ConnectionState::Connected)
      throw Error(ErrorCode::NotReady, "menu needs a GPS connection, state is " + std::string(to_string(state_)));

    if (std::holds_alternative<menu::ShowCoordinates>(action))
      return CoordinatesReport{last_fix_->latitude, last_fix_->longitude,
                               format_coordinates(last_fix_->latitude, last_fix_->longitude)};
    if (std::holds_alternative<menu::TourGuide>(action)) {
      TourGuideReport report;
      const geo::GeoPoint here{last_fix_->latitude, last_fix_->longitude};
      for (auto& r : geofence::nearest_hotspots(pack_->hotspots, here, config_.tour_guide_k))
        report.nearest.push_back({r.id, pack_->find_hotspot(r.id)->name, r.distance_m});
      return report;
    }
    if (const auto* s = std::get_if<menu::Search>(&action)) return SearchReport{content::search(*pack_, s->query)};
    const auto& ev = std::get<menu::Events>(action);
    return EventsReport{content::events_between(*pack_, ev.from, ev.to)};
  }

  const viewport::Viewport& zoom_step(int direction) {
    ensure_open();
    viewport_ = viewport::zoom_step(viewport_, direction);
    return viewport_;
  }

 private:
  std::optional<double> pending_deadline() const {
    switch (state_) {
      case ConnectionState::Splash: return config_.splash_seconds;
      case ConnectionState::Connecting:
      case ConnectionState::Lost: return entered_at_ + config_.connect_timeout_s;
      case ConnectionState::Connected: return last_fix_at_ + config_.fix_gap_s;
      default: return std::nullopt;
    }
  }

  void ensure_open() const {
    if (state_ == ConnectionState::Exited) throw Error(ErrorCode::SessionClosed, "session has exited");
  }

  void transition(ConnectionState next, double at, std::vector<GuideEvent>& out) {
    state_ = next;
    entered_at_ = at;
    emit(ConnectionChanged{next, attempt_}, at, out);
  }

  void emit(GuideEvent ev, double at, std::vector<GuideEvent>& out) {
    log_.push_back({next_seq_++, at, ev});
    out.push_back(std::move(ev));
  }

  std::shared_ptr<const content::ContentPack> pack_;
  Config config_;
  viewport::Viewport viewport_;
  geofence::FenceState fence_;
  ConnectionState state_ = ConnectionState::Splash;
  int attempt_ = 0;
  double now_ = 0;
  double entered_at_ = 0;
  double last_fix_at_ = 0;
  bool out_of_range_ = false;
  std::optional<nmea::GeoFix> last_fix_;
  std::vector<LoggedEvent> log_;
  std::uint64_t next_seq_ = 1;
};

inline Session new_session(std::shared_ptr<const content::ContentPack> pack, Config config = {}) {
  return Session(std::move(pack), config);
}

// Event log export: one JSON object per line with fixed-precision numbers,
// so identical runs produce identical bytes.

namespace detail {

inline std::string json_string(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline std::string utc_text(const nmea::UtcTime& t) {
  const long long cs = std::llround(t.seconds_of_day() * 100.0) % 8640000LL;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld.%02lld", cs / 360000, (cs / 6000) % 60, (cs / 100) % 60,
                cs % 100);
  return buf;
}

inline std::string_view quality_text(nmea::FixQuality q) {
  switch (q) {
    case nmea::FixQuality::NoFix: return "none";
    case nmea::FixQuality::GpsFix: return "gps";
    case nmea::FixQuality::DgpsFix: return "dgps";
  }
  return "none";
}

inline std::string fix_fields(const nmea::GeoFix& f) {
  return ",\"utc\":" + json_string(utc_text(f.timestamp)) + ",\"lat\":" + fixed(f.latitude, 6) +
         ",\"lon\":" + fixed(f.longitude, 6) + ",\"quality\":" + json_string(quality_text(f.quality)) +
         ",\"satellites\":" + std::to_string(f.satellites);
}

}  // namespace detail

inline std::string_view event_tag(const GuideEvent& ev) {
  struct {
    std::string_view operator()(const FixAccepted&) const { return "fix_accepted"; }
    std::string_view operator()(const HotspotEntered&) const { return "hotspot_entered"; }
    std::string_view operator()(const HotspotExited&) const { return "hotspot_exited"; }
    std::string_view operator()(const ConnectionChanged&) const { return "connection_changed"; }
    std::string_view operator()(const OutOfRange&) const { return "out_of_range"; }
  } visitor;
  return std::visit(visitor, ev);
}

/// The event's payload fields as a JSON object body (leading comma, no braces).
inline std::string event_payload(const GuideEvent& ev) {
  using detail::fixed;
  using detail::json_string;
  if (const auto* e = std::get_if<FixAccepted>(&ev))
    return detail::fix_fields(e->fix) + ",\"x\":" + fixed(e->pixel.x, 2) + ",\"y\":" + fixed(e->pixel.y, 2) +
           ",\"in_range\":" + (e->in_range ? "true" : "false");
  if (const auto* e = std::get_if<HotspotEntered>(&ev))
    return ",\"hotspot\":" + json_string(e->hotspot_id) + ",\"content_id\":" + json_string(e->content.content_id) +
           ",\"name\":" + json_string(e->content.name) + ",\"species\":" + json_string(e->content.species);
  if (const auto* e = std::get_if<HotspotExited>(&ev)) return ",\"hotspot\":" + json_string(e->hotspot_id);
  if (const auto* e = std::get_if<ConnectionChanged>(&ev))
    return ",\"state\":" + json_string(to_string(e->state)) + ",\"attempt\":" + std::to_string(e->attempt);
  return detail::fix_fields(std::get<OutOfRange>(ev).fix);
}

inline std::string format_log_line(const LoggedEvent& e) {
  return "{\"seq\":" + std::to_string(e.seq) + ",\"t\":" + detail::fixed(e.elapsed_s, 3) +
         ",\"type\":" + detail::json_string(event_tag(e.event)) + event_payload(e.event) + "}";
}

inline std::string export_log(std::span<const LoggedEvent> log) {
  std::string out;
  for (const auto& e : log) {
    out += format_log_line(e);
    out += '\n';
  }
  return out;
}

}  // namespace zooguide::engine
