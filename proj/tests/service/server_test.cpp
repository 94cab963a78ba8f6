#include <gtest/gtest.h>

#include <spdlog/spdlog.h>

#include "support/scratch.hpp"
#include "support/stream_client.hpp"
#include "zooguide/service/commands.hpp"
#include "zooguide/service/server.hpp"
#include "zooguide/service/wire.hpp"

namespace svc = zooguide::service;
namespace wire = svc::wire;
namespace menu = zooguide::engine::menu;
using nlohmann::json;
using stream_client::get;

namespace {

std::shared_ptr<const zooguide::content::ContentPack> pack() {
  static const auto p =
      std::make_shared<const zooguide::content::ContentPack>(zooguide::content::load_pack(scratch::fixture_pack()));
  return p;
}

std::unique_ptr<svc::Server> start(std::optional<std::string> walk, bool fast) {
  spdlog::set_level(spdlog::level::warn);
  svc::ServeOptions options;
  options.port = 0;
  options.fast = fast;
  std::optional<zooguide::simulator::FixStream> stream;
  if (walk) stream = svc::load_fix_stream(scratch::walk(*walk));
  auto server = std::make_unique<svc::Server>(pack(), std::move(stream), options);
  server->start();
  return server;
}

svc::Server& scripted() {
  static auto server = start("big-cats-tour.jsonl", true);
  return *server;
}

svc::Server& steerable() {
  static auto server = start(std::nullopt, false);
  return *server;
}

std::vector<json> log_records(const std::string& log) {
  std::vector<json> out;
  std::istringstream in(log);
  for (std::string l; std::getline(in, l);) out.push_back(json::parse(l));
  return out;
}

std::vector<json> event_records(const std::vector<json>& frames) {
  std::vector<json> out;
  for (const auto& f : frames)
    if (f["type"] == "event") out.push_back(f["record"]);
  return out;
}

}  // namespace

TEST(Http, ManifestCarriesMapAndCalibration) {
  const auto r = get(scripted().port(), "/api/manifest");
  ASSERT_EQ(r.status, 200u);
  EXPECT_EQ(r.content_type, "application/json");
  const auto m = json::parse(r.body);
  EXPECT_EQ(m["name"], "big-cats");
  EXPECT_EQ(m["protocol_version"], 1);
  EXPECT_EQ(m["map"]["url"], "/media/map/big-cats.svg");
  EXPECT_EQ(m["calibration"]["e"].get<double>(), pack()->manifest.calibration.e);
}

TEST(Http, AnimalSearch) {
  const auto tiger = json::parse(get(scripted().port(), "/api/animals?q=tiger").body);
  ASSERT_EQ(tiger["results"].size(), 1u);
  EXPECT_EQ(tiger["results"][0]["id"], "tiger");
  EXPECT_EQ(tiger["query"], "tiger");

  const auto spaced = json::parse(get(scripted().port(), "/api/animals?q=Panthera%20pardus").body);
  ASSERT_EQ(spaced["results"].size(), 1u);
  EXPECT_EQ(spaced["results"][0]["id"], "leopard");

  const auto all = json::parse(get(scripted().port(), "/api/animals").body);
  EXPECT_EQ(all["results"].size(), 4u);
  EXPECT_TRUE(all["query"].is_null());

  EXPECT_EQ(json::parse(get(scripted().port(), "/api/animals?q=").body)["results"].size(), 0u);
}

TEST(Http, EventsWindow) {
  const auto r = json::parse(get(scripted().port(), "/api/events?from=10:00&to=11:00").body);
  ASSERT_EQ(r["events"].size(), 1u);
  EXPECT_EQ(r["events"][0]["id"], "tiger-keeper-talk");
  EXPECT_EQ(json::parse(get(scripted().port(), "/api/events").body)["events"].size(), 3u);

  const auto bad = get(scripted().port(), "/api/events?from=noon&to=11:00");
  EXPECT_EQ(bad.status, 400u);
  EXPECT_EQ(json::parse(bad.body)["error"]["code"], "InvalidArgument");
  const auto reversed = get(scripted().port(), "/api/events?from=12:00&to=11:00");
  EXPECT_EQ(reversed.status, 400u);
  EXPECT_EQ(json::parse(reversed.body)["error"]["code"], "InvalidArgument");
}

TEST(Http, Hotspots) {
  const auto r = json::parse(get(scripted().port(), "/api/hotspots").body);
  ASSERT_EQ(r["hotspots"].size(), 4u);
  std::set<std::string> kinds;
  for (const auto& h : r["hotspots"]) kinds.insert(h["geometry"]["type"].get<std::string>());
  EXPECT_EQ(kinds, (std::set<std::string>{"circle", "polygon"}));
}

TEST(Http, MediaIsConfinedToPackAssets) {
  const auto svg = get(scripted().port(), "/media/media/tiger.svg");
  EXPECT_EQ(svg.status, 200u);
  EXPECT_EQ(svg.content_type, "image/svg+xml");
  EXPECT_EQ(svg.body, scratch::read(scratch::fixture_pack() / "media" / "tiger.svg"));
  EXPECT_EQ(get(scripted().port(), "/media/map/big-cats.svg").status, 200u);
  EXPECT_EQ(get(scripted().port(), "/media/media/none.svg").status, 404u);
  EXPECT_EQ(get(scripted().port(), "/media/manifest.json").status, 404u);
  EXPECT_EQ(get(scripted().port(), "/media/media/../manifest.json").status, 404u);
  EXPECT_EQ(get(scripted().port(), "/media/media/%2e%2e/manifest.json").status, 404u);
}

TEST(Http, RootAndUnknownPaths) {
  const auto root = get(scripted().port(), "/");
  EXPECT_EQ(root.status, 200u);
  EXPECT_NE(root.content_type.find("text/html"), std::string::npos);
  const auto missing = get(scripted().port(), "/api/nothing");
  EXPECT_EQ(missing.status, 404u);
  EXPECT_EQ(json::parse(missing.body)["error"]["code"], "NotFound");
}

TEST(Http, RepeatedGetsAreIdentical) {
  for (const char* path : {"/api/manifest", "/api/animals?q=cat", "/api/events", "/api/hotspots"})
    EXPECT_EQ(get(scripted().port(), path).body, get(scripted().port(), path).body) << path;
}

TEST(Stream, ScriptedSessionMatchesHeadlessTour) {
  stream_client::Session client(scripted().port());
  EXPECT_EQ(client.hello()["type"], "hello");
  EXPECT_EQ(client.hello()["protocol_version"], 1);
  const auto done = client.read_until("walk_complete");
  const auto want = log_records(svc::tour_log(scratch::fixture_pack(), scratch::walk("big-cats-tour.jsonl")));
  const auto got = event_records(client.seen());
  ASSERT_EQ(got.size(), want.size());
  EXPECT_TRUE(got == want);
  const auto stream = svc::load_fix_stream(scratch::walk("big-cats-tour.jsonl"));
  EXPECT_EQ(done["delivered"].get<std::size_t>(), stream.size());
  for (const auto& f : client.seen()) {
    EXPECT_EQ(f["protocol_version"], 1);
    EXPECT_EQ(f["session_id"], client.id());
  }
}

TEST(Stream, SessionsAreIndependent) {
  stream_client::Session a(scripted().port());
  stream_client::Session b(scripted().port());
  EXPECT_NE(a.id(), b.id());
  a.read_until("walk_complete");
  b.read_until("walk_complete");
  EXPECT_TRUE(event_records(a.seen()) == event_records(b.seen()));
}

TEST(Stream, ZoomAtMaximumEchoesUnchangedZoom) {
  stream_client::Session client(scripted().port());
  client.read_until("walk_complete");
  json snap;
  for (int i = 0; i < 6; ++i) {
    client.send(wire::zoom(client.id(), 1));
    snap = client.read_until("snapshot");
  }
  EXPECT_EQ(snap["zoom"], 2.0);
  EXPECT_EQ(snap["zoom_index"], 4);
  client.send(wire::zoom(client.id(), 1));
  const auto again = client.read_until("snapshot");
  EXPECT_EQ(again["zoom"], 2.0);
  EXPECT_EQ(again["zoom_index"], 4);
}

TEST(Stream, MalformedFrameGetsErrorAndConnectionSurvives) {
  stream_client::Session client(scripted().port());
  client.read_until("walk_complete");
  for (const std::string& bad : {std::string("{oops"), std::string(R"({"type":"teleport","protocol_version":1,"session_id":")") +
                                                         client.id() + "\"}"}) {
    client.send(bad);
    const auto err = client.read_until("error");
    EXPECT_TRUE(err["code"] == "MalformedMessage" || err["code"] == "UnknownType") << err;
    EXPECT_EQ(err["session_id"], client.id());
  }
  client.send(wire::zoom(client.id(), -1));
  EXPECT_EQ(client.read_until("snapshot")["zoom"], 0.75);
}

TEST(Stream, MenuOverTheWire) {
  stream_client::Session client(scripted().port());
  client.read_until("walk_complete");
  client.send(wire::menu(client.id(), menu::ShowCoordinates{}));
  const auto coords = client.read_until("menu_response");
  EXPECT_EQ(coords["action"], "show_coordinates");
  EXPECT_EQ(coords["result"]["text"].get<std::string>().rfind("lat -37.78", 0), 0u);

  client.send(wire::menu(client.id(), menu::Search{"jaguar"}));
  EXPECT_EQ(client.read_until("menu_response")["result"]["results"][0]["id"], "jaguar");

  client.send(wire::restart(client.id()));
  const auto refused = client.read_until("error");
  EXPECT_EQ(refused["code"], "InvalidState");
  EXPECT_EQ(refused["in_reply_to"], "restart");

  client.send(wire::menu(client.id(), menu::Close{}));
  EXPECT_EQ(client.read_until("menu_response")["action"], "close");
  const auto exited = client.read_until("event");
  EXPECT_EQ(exited["record"]["state"], "exited");

  client.send(wire::zoom(client.id(), 1));
  EXPECT_EQ(client.read_until("error")["code"], "SessionClosed");
}

TEST(Stream, SteeringWalksTowardTheClickedPoint) {
  stream_client::Session client(steerable().port());
  const auto start = client.hello()["snapshot"];
  // A point 100 screen px east of the cursor, converted the way the server should.
  zooguide::viewport::Viewport v = zooguide::viewport::Viewport::make({480, 640}, pack()->manifest.map_extent);
  v.center = {start["center"]["x"].get<double>(), start["center"]["y"].get<double>()};
  const auto target_px = zooguide::viewport::screen_to_map(v, {340, 320});
  const auto target = zooguide::geo::pixel_to_geo(pack()->manifest.calibration, target_px);

  client.send(wire::steer(client.id(), {340, 320}));
  const auto echo = client.read_until("snapshot");
  ASSERT_FALSE(echo["walking_to"].is_null()) << echo;
  EXPECT_NEAR(echo["walking_to"]["lat"].get<double>(), target.latitude, 1e-9);
  EXPECT_NEAR(echo["walking_to"]["lon"].get<double>(), target.longitude, 1e-9);
}

TEST(Stream, SteeringIsRefusedDuringScriptedWalk) {
  svc::ServeOptions options;
  options.port = 0;
  svc::Server server(pack(), svc::load_fix_stream(scratch::walk("big-cats-tour.jsonl")), options);
  server.start();
  stream_client::Session client(server.port());
  client.send(wire::steer(client.id(), {0, 0}));
  const auto err = client.read_until("error");
  EXPECT_EQ(err["code"], "InvalidState");
  EXPECT_EQ(err["in_reply_to"], "steer");
}

TEST(Stream, NonStreamUpgradeIsRefused) {
  EXPECT_EQ(get(scripted().port(), "/ws/session").status, 404u);
}

TEST(Serve, StartupFailuresExitNonZero) {
  std::ostringstream out, err;
  svc::ServeCommand missing;
  missing.pack_dir = "/nonexistent/pack";
  EXPECT_EQ(svc::cmd_serve(missing, out, err), 2);

  svc::ServeCommand taken;
  taken.pack_dir = scratch::fixture_pack();
  taken.options.port = scripted().port();
  taken.options.address = "127.0.0.1";
  // Same port without SO_REUSEPORT: bind fails while the first server listens.
  std::ostringstream out2, err2;
  EXPECT_EQ(svc::cmd_serve(taken, out2, err2), 2);
  EXPECT_NE(err2.str().find("cannot serve"), std::string::npos) << err2.str();
}
