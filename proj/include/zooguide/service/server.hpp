#pragma once

// HTTP API and session stream.
//
//   GET /api/manifest              pack metadata, map image URL, calibration
//   GET /api/animals[?q=]          all animals, or search results for q
//   GET /api/events[?from=&to=]    timetable entries overlapping the window
//   GET /api/hotspots              hotspot geometry with map anchors
//   GET /media/<path>              pack assets under map/ and media/
//   GET /ws/session                WebSocket upgrade; one guide session per connection
//   GET /                          UI assets (static dir) or a placeholder page
//
// Errors are JSON bodies {"error": {"code", "message"}} with a 4xx status.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "zooguide/content.hpp"
#include "zooguide/engine.hpp"
#include "zooguide/simulator.hpp"

namespace zooguide::service {

struct ServeOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  // 0 picks a free port
  bool fast = false;           // replay a scripted walk as fast as possible
  std::optional<std::filesystem::path> static_dir;
  engine::Config config;
  unsigned threads = 2;
};

class Server {
 public:
  /// walk: the scripted stream every connection replays. Without one each
  /// connection gets a steerable walker.
  Server(std::shared_ptr<const content::ContentPack> pack, std::optional<simulator::FixStream> walk,
         ServeOptions options = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts the worker threads. Throws std::system_error when the
  /// address cannot be bound.
  void start();
  unsigned short port() const noexcept;
  void stop();
  /// Blocks until SIGINT or SIGTERM, then stops.
  void run_until_signal();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Applies ZOOOZ_LOG (trace, debug, info, warn, error, critical, off).
void configure_logging();

struct ServeCommand {
  std::filesystem::path pack_dir;
  std::optional<std::filesystem::path> walk;
  std::optional<std::uint64_t> seed;
  ServeOptions options;
};

int cmd_serve(const ServeCommand& command, std::ostream& out, std::ostream& err);

}  // namespace zooguide::service
