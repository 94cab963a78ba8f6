#include "zooguide/service/wire.hpp"

#include <cmath>

namespace zooguide::service::wire {

namespace {

json envelope(std::string_view session_id, std::string_view type) {
  return json{{"protocol_version", kProtocolVersion}, {"session_id", std::string(session_id)},
              {"type", std::string(type)}};
}

std::string media_url(const std::string& pack_relative) { return "/media/" + pack_relative; }

json point(const geo::GeoPoint& p) { return json{{"lat", p.latitude}, {"lon", p.longitude}}; }

double finite_number(const json& msg, const char* key, const std::string& type) {
  if (!msg.contains(key)) throw ProtocolError("InvalidArgument", std::string("missing field '") + key + "'", type);
  const json& v = msg[key];
  if (!v.is_number() || !std::isfinite(v.get<double>()))
    throw ProtocolError("InvalidArgument", std::string("field '") + key + "' must be a finite number", type);
  return v.get<double>();
}

std::string text_field(const json& msg, const char* key, const std::string& type) {
  if (!msg.contains(key) || !msg[key].is_string())
    throw ProtocolError("InvalidArgument", std::string("field '") + key + "' must be a string", type);
  return msg[key].get<std::string>();
}

content::TimeOfDay time_field(const json& msg, const char* key, const std::string& type) {
  const auto text = text_field(msg, key, type);
  const auto t = content::TimeOfDay::parse(text);
  if (!t) throw ProtocolError("InvalidArgument", std::string("field '") + key + "' must be HH:MM or HH:MM:SS", type);
  return *t;
}

engine::MenuAction parse_menu(const json& msg) {
  const std::string type = "menu_action";
  const auto action = text_field(msg, "action", type);
  if (action == "check_connection") return engine::menu::CheckConnection{};
  if (action == "show_coordinates") return engine::menu::ShowCoordinates{};
  if (action == "tour_guide") return engine::menu::TourGuide{};
  if (action == "search") return engine::menu::Search{text_field(msg, "query", type)};
  if (action == "events") return engine::menu::Events{time_field(msg, "from", type), time_field(msg, "to", type)};
  if (action == "close") return engine::menu::Close{};
  throw ProtocolError("UnknownType", "unknown menu action '" + action + "'", type);
}

}  // namespace

ClientMessage parse_client(std::string_view text, std::string_view session_id) {
  json msg;
  try {
    msg = json::parse(text);
  } catch (const json::parse_error&) {
    throw ProtocolError("MalformedMessage", "frame is not valid JSON");
  }
  if (!msg.is_object()) throw ProtocolError("MalformedMessage", "frame must be a JSON object");
  if (!msg.contains("type") || !msg["type"].is_string())
    throw ProtocolError("MalformedMessage", "frame needs a string 'type'");
  const std::string type = msg["type"];
  if (!msg.contains("protocol_version") || !msg["protocol_version"].is_number_integer())
    throw ProtocolError("MalformedMessage", "frame needs an integer 'protocol_version'", type);
  if (msg["protocol_version"].get<long long>() != kProtocolVersion)
    throw ProtocolError("UnsupportedVersion",
                        "protocol_version " + msg["protocol_version"].dump() + " is not supported, expected 1", type);
  if (!msg.contains("session_id") || !msg["session_id"].is_string())
    throw ProtocolError("MalformedMessage", "frame needs a string 'session_id'", type);
  if (msg["session_id"].get<std::string>() != session_id)
    throw ProtocolError("SessionMismatch", "frame addressed to another session", type);

  if (type == "steer") return Steer{{finite_number(msg, "x", type), finite_number(msg, "y", type)}};
  if (type == "zoom_step") {
    if (!msg.contains("direction") || !msg["direction"].is_number_integer() ||
        std::abs(msg["direction"].get<long long>()) != 1)
      throw ProtocolError("InvalidArgument", "field 'direction' must be 1 or -1", type);
    return ZoomStep{static_cast<int>(msg["direction"].get<long long>())};
  }
  if (type == "menu_action") return Menu{parse_menu(msg)};
  if (type == "restart") return Restart{};
  throw ProtocolError("UnknownType", "unknown message type '" + type + "'", type);
}

std::string_view menu_tag(const engine::MenuAction& action) {
  struct {
    std::string_view operator()(const engine::menu::CheckConnection&) const { return "check_connection"; }
    std::string_view operator()(const engine::menu::ShowCoordinates&) const { return "show_coordinates"; }
    std::string_view operator()(const engine::menu::TourGuide&) const { return "tour_guide"; }
    std::string_view operator()(const engine::menu::Search&) const { return "search"; }
    std::string_view operator()(const engine::menu::Events&) const { return "events"; }
    std::string_view operator()(const engine::menu::Close&) const { return "close"; }
  } visitor;
  return std::visit(visitor, action);
}

std::string steer(std::string_view session_id, viewport::ScreenPoint target) {
  auto m = envelope(session_id, "steer");
  m["x"] = target.x;
  m["y"] = target.y;
  return m.dump();
}

std::string zoom(std::string_view session_id, int direction) {
  auto m = envelope(session_id, "zoom_step");
  m["direction"] = direction;
  return m.dump();
}

std::string menu(std::string_view session_id, const engine::MenuAction& action) {
  auto m = envelope(session_id, "menu_action");
  m["action"] = std::string(menu_tag(action));
  if (const auto* s = std::get_if<engine::menu::Search>(&action)) m["query"] = s->query;
  if (const auto* e = std::get_if<engine::menu::Events>(&action)) {
    m["from"] = e->from.to_string();
    m["to"] = e->to.to_string();
  }
  return m.dump();
}

std::string restart(std::string_view session_id) { return envelope(session_id, "restart").dump(); }

json to_json(const content::AnimalRecord& a) {
  json media = json::array();
  for (const auto& m : a.media)
    media.push_back({{"kind", std::string(content::to_string(m.kind))},
                     {"path", m.path},
                     {"url", media_url(m.path)},
                     {"caption", m.caption}});
  return {{"id", a.id}, {"name", a.name}, {"species", a.species}, {"description", a.description}, {"media", media}};
}

json to_json(const content::EventRecord& e) {
  return {{"id", e.id},
          {"title", e.title},
          {"location_hotspot_id", e.location_hotspot_id ? json(*e.location_hotspot_id) : json(nullptr)},
          {"start", e.start.to_string()},
          {"end", e.end.to_string()}};
}

json to_json(const geofence::Hotspot& h, const geo::MapCalibration& cal) {
  json geometry;
  if (const auto* c = std::get_if<geofence::Circle>(&h.geometry)) {
    geometry = {{"type", "circle"}, {"center", point(c->center)}, {"radius_m", c->radius_m}};
  } else {
    json vertices = json::array();
    for (const auto& v : std::get<geofence::Polygon>(h.geometry).vertices) vertices.push_back(point(v));
    geometry = {{"type", "polygon"}, {"vertices", vertices}};
  }
  const auto a = geofence::anchor(h);
  const auto px = geo::geo_to_pixel(cal, a);
  return {{"id", h.id},         {"name", h.name},         {"content_id", h.content_id},
          {"category", h.category}, {"geometry", geometry}, {"anchor", point(a)},
          {"anchor_px", {{"x", px.x}, {"y", px.y}}}};
}

json to_json(const geo::MapCalibration& cal) {
  return {{"a", cal.a}, {"b", cal.b}, {"c", cal.c}, {"d", cal.d}, {"e", cal.e}, {"f", cal.f},
          {"rms_residual", cal.rms_residual}};
}

json manifest_json(const content::ContentPack& pack, const engine::Config& config) {
  const auto& m = pack.manifest;
  return {{"protocol_version", kProtocolVersion},
          {"format_version", m.format_version},
          {"name", m.name},
          {"version", m.version},
          {"map",
           {{"image", m.map_image},
            {"url", media_url(m.map_image)},
            {"width", m.map_extent.width},
            {"height", m.map_extent.height}}},
          {"bounds",
           {{"min_lat", m.bounds.min_lat},
            {"max_lat", m.bounds.max_lat},
            {"min_lon", m.bounds.min_lon},
            {"max_lon", m.bounds.max_lon},
            {"margin_m", m.bounds.margin_m}}},
          {"calibration", to_json(m.calibration)},
          {"screen", {{"width", config.screen.width}, {"height", config.screen.height}}},
          {"zoom_ladder", viewport::kZoomLadder},
          {"counts", {{"animals", pack.animals.size()}, {"hotspots", pack.hotspots.size()}, {"events", pack.events.size()}}}};
}

json menu_result(const engine::MenuResponse& response) {
  if (const auto* r = std::get_if<engine::ConnectionReport>(&response))
    return {{"state", std::string(engine::to_string(r->state))},
            {"attempt", r->attempt},
            {"seconds_since_fix", r->seconds_since_fix ? json(*r->seconds_since_fix) : json(nullptr)}};
  if (const auto* r = std::get_if<engine::CoordinatesReport>(&response))
    return {{"lat", r->latitude}, {"lon", r->longitude}, {"text", r->text}};
  if (const auto* r = std::get_if<engine::TourGuideReport>(&response)) {
    json nearest = json::array();
    for (const auto& n : r->nearest)
      nearest.push_back({{"hotspot_id", n.hotspot_id}, {"name", n.name}, {"distance_m", n.distance_m}});
    return {{"nearest", nearest}};
  }
  if (const auto* r = std::get_if<engine::SearchReport>(&response)) {
    json results = json::array();
    for (const auto& a : r->results) results.push_back(to_json(a));
    return {{"results", results}};
  }
  if (const auto* r = std::get_if<engine::EventsReport>(&response)) {
    json events = json::array();
    for (const auto& e : r->events) events.push_back(to_json(e));
    return {{"events", events}};
  }
  return json::object();
}

json snapshot_body(const engine::Session& session, const std::optional<geo::GeoPoint>& walking_to) {
  const auto& v = session.viewport();
  const auto& pack = session.pack();
  json visible = json::array();
  for (const auto& h : viewport::visible_hotspots(v, pack.hotspots, pack.manifest.calibration))
    visible.push_back({{"id", h.id}, {"x", h.position.x}, {"y", h.position.y}});
  const auto cursor = v.screen_center();
  return {{"state", std::string(engine::to_string(session.state()))},
          {"attempt", session.attempt()},
          {"t", session.now()},
          {"center", {{"x", v.center.x}, {"y", v.center.y}}},
          {"zoom", v.zoom()},
          {"zoom_index", v.zoom_index},
          {"screen", {{"width", v.screen.width}, {"height", v.screen.height}}},
          {"cursor", {{"x", cursor.x}, {"y", cursor.y}}},
          {"out_of_range", session.out_of_range()},
          {"inside", session.fence().inside},
          {"visible_hotspots", visible},
          {"walking_to", walking_to ? point(*walking_to) : json(nullptr)}};
}

std::string hello(std::string_view session_id, const engine::Session& session) {
  auto m = envelope(session_id, "hello");
  m["pack"] = {{"name", session.pack().manifest.name}, {"version", session.pack().manifest.version}};
  m["snapshot"] = snapshot_body(session);
  return m.dump();
}

std::string snapshot(std::string_view session_id, const engine::Session& session,
                     const std::optional<geo::GeoPoint>& walking_to) {
  auto m = envelope(session_id, "snapshot");
  m.update(snapshot_body(session, walking_to));
  return m.dump();
}

std::string event(std::string_view session_id, const engine::LoggedEvent& e) {
  // The record is spliced in verbatim so it keeps the export's fixed-precision bytes.
  std::string head = envelope(session_id, "event").dump();
  head.pop_back();
  return head + ",\"record\":" + engine::format_log_line(e) + "}";
}

std::string menu_response(std::string_view session_id, std::string_view action, const engine::MenuResponse& r) {
  auto m = envelope(session_id, "menu_response");
  m["action"] = std::string(action);
  m["result"] = menu_result(r);
  return m.dump();
}

std::string error(std::string_view session_id, std::string_view code, std::string_view message,
                  std::string_view in_reply_to) {
  auto m = envelope(session_id, "error");
  m["code"] = std::string(code);
  m["message"] = std::string(message);
  m["in_reply_to"] = in_reply_to.empty() ? json(nullptr) : json(std::string(in_reply_to));
  return m.dump();
}

std::string walk_complete(std::string_view session_id, const simulator::ReplaySummary& summary) {
  auto m = envelope(session_id, "walk_complete");
  m["delivered"] = summary.delivered;
  m["dropped"] = summary.dropped;
  m["garbage"] = summary.garbage;
  return m.dump();
}

}  // namespace zooguide::service::wire
