#pragma once

// Stream protocol between the guide service and its UI. Every frame is one
// JSON object with "protocol_version", "session_id" and a "type" tag.
//
// client -> server
//   steer        {"x", "y"}                screen point to walk towards
//   zoom_step    {"direction"}             +1 in, -1 out
//   menu_action  {"action", ...}           check_connection | show_coordinates |
//                                          tour_guide | search {"query"} |
//                                          events {"from", "to"} | close
//   restart      {}
//
// server -> client
//   hello          {"pack", "snapshot"}     first frame on every connection
//   snapshot       {"state", "attempt", "center", "zoom", "zoom_index",
//                   "screen", "cursor", "out_of_range", "inside",
//                   "visible_hotspots", "walking_to"}
//   event          {"record"}               one event-log record, as exported
//   menu_response  {"action", "result"}
//   error          {"code", "message", "in_reply_to"}
//   walk_complete  {"delivered", "dropped", "garbage"}
//
// A frame that cannot be honoured gets an error frame; the connection stays.

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "zooguide/content.hpp"
#include "zooguide/engine.hpp"
#include "zooguide/error.hpp"
#include "zooguide/simulator.hpp"

namespace zooguide::service::wire {

using nlohmann::json;

inline constexpr int kProtocolVersion = 1;

struct Steer {
  viewport::ScreenPoint target;
  bool operator==(const Steer&) const = default;
};

struct ZoomStep {
  int direction = 0;
  bool operator==(const ZoomStep&) const = default;
};

struct Menu {
  engine::MenuAction action;
};

struct Restart {
  bool operator==(const Restart&) const = default;
};

using ClientMessage = std::variant<Steer, ZoomStep, Menu, Restart>;

/// Why a client frame was refused. code is a stable tag for the error frame.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(std::string code, const std::string& message, std::string in_reply_to = {})
      : std::runtime_error(message), code_(std::move(code)), in_reply_to_(std::move(in_reply_to)) {}
  const std::string& code() const noexcept { return code_; }
  const std::string& in_reply_to() const noexcept { return in_reply_to_; }

 private:
  std::string code_;
  std::string in_reply_to_;
};

/// Parses one client frame addressed to session_id. Throws ProtocolError
/// with code MalformedMessage, UnsupportedVersion, SessionMismatch,
/// UnknownType or InvalidArgument.
ClientMessage parse_client(std::string_view text, std::string_view session_id);

std::string_view menu_tag(const engine::MenuAction& action);

// Frame builders for the client side (tests, tools).
std::string steer(std::string_view session_id, viewport::ScreenPoint target);
std::string zoom(std::string_view session_id, int direction);
std::string menu(std::string_view session_id, const engine::MenuAction& action);
std::string restart(std::string_view session_id);

// Shared JSON shapes, also used by the HTTP API.
json to_json(const content::AnimalRecord& a);
json to_json(const content::EventRecord& e);
json to_json(const geofence::Hotspot& h, const geo::MapCalibration& cal);
json to_json(const geo::MapCalibration& cal);
json manifest_json(const content::ContentPack& pack, const engine::Config& config);
json menu_result(const engine::MenuResponse& response);
json snapshot_body(const engine::Session& session, const std::optional<geo::GeoPoint>& walking_to = {});

// Server frames.
std::string hello(std::string_view session_id, const engine::Session& session);
std::string snapshot(std::string_view session_id, const engine::Session& session,
                     const std::optional<geo::GeoPoint>& walking_to = {});
std::string event(std::string_view session_id, const engine::LoggedEvent& e);
std::string menu_response(std::string_view session_id, std::string_view action, const engine::MenuResponse& r);
std::string error(std::string_view session_id, std::string_view code, std::string_view message,
                  std::string_view in_reply_to = {});
std::string walk_complete(std::string_view session_id, const simulator::ReplaySummary& summary);

}  // namespace zooguide::service::wire
