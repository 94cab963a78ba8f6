#include "zooguide/service/server.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <csignal>
#include <deque>
#include <future>
#include <map>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include "zooguide/service/commands.hpp"
#include "zooguide/service/wire.hpp"
#include "zooguide/tour.hpp"

namespace zooguide::service {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace fs = std::filesystem;
using tcp = net::ip::tcp;
using Clock = std::chrono::steady_clock;
using nlohmann::json;

namespace {

struct Shared {
  std::shared_ptr<const content::ContentPack> pack;
  std::optional<simulator::FixStream> walk;
  ServeOptions options;
};

// ---- HTTP ------------------------------------------------------------------

using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

std::string_view std_view(beast::string_view s) { return {s.data(), s.size()}; }

std::string percent_decode(std::string_view s, bool plus_is_space) {
  std::string out;
  out.reserve(s.size());
  const auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && hex(s[i + 1]) >= 0 && hex(s[i + 2]) >= 0) {
      out.push_back(static_cast<char>(hex(s[i + 1]) * 16 + hex(s[i + 2])));
      i += 2;
    } else if (plus_is_space && s[i] == '+') {
      out.push_back(' ');
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

struct Target {
  std::string path;
  std::map<std::string, std::string> query;
};

Target split_target(std::string_view target) {
  Target t;
  const auto q = target.find('?');
  t.path = percent_decode(target.substr(0, q), false);
  if (q == std::string_view::npos) return t;
  std::string_view rest = target.substr(q + 1);
  while (!rest.empty()) {
    const auto amp = rest.find('&');
    const auto pair = rest.substr(0, amp);
    const auto eq = pair.find('=');
    const auto key = percent_decode(pair.substr(0, eq), true);
    const auto value = eq == std::string_view::npos ? std::string() : percent_decode(pair.substr(eq + 1), true);
    if (!key.empty()) t.query.emplace(key, value);
    rest = amp == std::string_view::npos ? std::string_view() : rest.substr(amp + 1);
  }
  return t;
}

std::string_view mime_type(const fs::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".gif") return "image/gif";
  if (ext == ".txt") return "text/plain; charset=utf-8";
  if (ext == ".html") return "text/html; charset=utf-8";
  if (ext == ".css") return "text/css; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript; charset=utf-8";
  if (ext == ".json") return "application/json";
  if (ext == ".mp3") return "audio/mpeg";
  if (ext == ".ogg") return "audio/ogg";
  if (ext == ".mp4") return "video/mp4";
  return "application/octet-stream";
}

Response reply(const Request& req, http::status status, std::string_view type, std::string body) {
  Response res{status, req.version()};
  res.set(http::field::server, "zooguide");
  res.set(http::field::content_type, beast::string_view(type.data(), type.size()));
  res.keep_alive(req.keep_alive());
  res.body() = std::move(body);
  res.prepare_payload();
  return res;
}

Response json_reply(const Request& req, const json& body, http::status status = http::status::ok) {
  auto res = reply(req, status, "application/json", body.dump());
  res.set(http::field::cache_control, "no-store");
  return res;
}

Response error_reply(const Request& req, http::status status, std::string_view code, std::string_view message) {
  return json_reply(req, {{"error", {{"code", std::string(code)}, {"message", std::string(message)}}}}, status);
}

std::optional<std::string> read_file(const fs::path& p) {
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) return std::nullopt;
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Response file_reply(const Request& req, const fs::path& p) {
  auto body = read_file(p);
  if (!body) return error_reply(req, http::status::not_found, "NotFound", "no such asset");
  return reply(req, http::status::ok, mime_type(p), std::move(*body));
}

constexpr std::string_view kPlaceholderPage = R"(<!doctype html>
<html lang="en">
<head><meta charset="utf-8"><title>ZooOz guide service</title></head>
<body>
<h1>ZooOz guide service</h1>
<p>No UI bundle is being served. Start with <code>--static DIR</code> to serve one.</p>
<ul>
<li><a href="/api/manifest">/api/manifest</a></li>
<li><a href="/api/animals">/api/animals</a></li>
<li><a href="/api/events">/api/events</a></li>
<li><a href="/api/hotspots">/api/hotspots</a></li>
<li>WebSocket: <code>/ws/session</code></li>
</ul>
</body>
</html>
)";

Response handle_request(const Shared& shared, const Request& req) {
  if (req.method() != http::verb::get && req.method() != http::verb::head) {
    auto res = error_reply(req, http::status::method_not_allowed, "MethodNotAllowed", "only GET is supported");
    res.set(http::field::allow, "GET, HEAD");
    return res;
  }
  const auto target = split_target(std_view(req.target()));
  const auto& path = target.path;
  const auto& pack = *shared.pack;
  const auto param = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = target.query.find(key);
    if (it == target.query.end()) return std::nullopt;
    return it->second;
  };

  if (path == "/api/manifest") return json_reply(req, wire::manifest_json(pack, shared.options.config));

  if (path == "/api/animals") {
    json results = json::array();
    const auto q = param("q");
    if (q) {
      for (const auto& a : content::search(pack, *q)) results.push_back(wire::to_json(a));
    } else {
      for (const auto& a : pack.animals) results.push_back(wire::to_json(a));
    }
    return json_reply(req, {{"query", q ? json(*q) : json(nullptr)}, {"results", results}});
  }

  if (path == "/api/events") {
    const auto from_text = param("from").value_or("00:00");
    const auto to_text = param("to").value_or("23:59:59");
    const auto from = content::TimeOfDay::parse(from_text);
    const auto to = content::TimeOfDay::parse(to_text);
    if (!from || !to)
      return error_reply(req, http::status::bad_request, "InvalidArgument", "from and to must be HH:MM or HH:MM:SS");
    try {
      json events = json::array();
      for (const auto& e : content::events_between(pack, *from, *to)) events.push_back(wire::to_json(e));
      return json_reply(req, {{"from", from->to_string()}, {"to", to->to_string()}, {"events", events}});
    } catch (const Error& e) {
      return error_reply(req, http::status::bad_request, to_string(e.code()), e.what());
    }
  }

  if (path == "/api/hotspots") {
    json hotspots = json::array();
    for (const auto& h : pack.hotspots) hotspots.push_back(wire::to_json(h, pack.manifest.calibration));
    return json_reply(req, {{"hotspots", hotspots}});
  }

  if (path.rfind("/media/", 0) == 0) {
    const std::string rel = path.substr(7);
    const auto slash = rel.find('/');
    const auto top = rel.substr(0, slash);
    if (!content::is_pack_relative(rel) || slash == std::string::npos || (top != "map" && top != "media"))
      return error_reply(req, http::status::not_found, "NotFound", "no such asset");
    return file_reply(req, pack.root / rel);
  }

  if (path.rfind("/api/", 0) == 0 || path == "/ws/session")
    return error_reply(req, http::status::not_found, "NotFound", "no such endpoint: " + path);

  if (shared.options.static_dir) {
    std::string rel = path == "/" ? "index.html" : path.substr(1);
    if (!rel.empty() && rel.back() == '/') rel += "index.html";
    if (!content::is_pack_relative(rel)) return error_reply(req, http::status::not_found, "NotFound", "no such page");
    return file_reply(req, *shared.options.static_dir / rel);
  }
  if (path == "/" || path == "/index.html")
    return reply(req, http::status::ok, "text/html; charset=utf-8", std::string(kPlaceholderPage));
  return error_reply(req, http::status::not_found, "NotFound", "no such page: " + path);
}

// ---- session stream --------------------------------------------------------

std::string new_session_id() {
  static std::atomic<std::uint64_t> counter{0};
  static const std::uint64_t salt = std::random_device{}() ^ (std::uint64_t{std::random_device{}()} << 32);
  char buf[40];
  std::snprintf(buf, sizeof buf, "s%llx-%llu", static_cast<unsigned long long>(salt & 0xFFFFFFFFFFULL),
                static_cast<unsigned long long>(++counter));
  return buf;
}

/// One guide session bound to one WebSocket. Every handler runs on the
/// connection's strand, so the session sees a single writer.
class StreamSession : public std::enable_shared_from_this<StreamSession> {
 public:
  StreamSession(tcp::socket&& socket, std::shared_ptr<const Shared> shared)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        shared_(std::move(shared)),
        id_(new_session_id()),
        session_(shared_->pack, shared_->options.config) {}

  void run(Request req) {
    req_ = std::move(req);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req_, beast::bind_front_handler(&StreamSession::on_accept, shared_from_this()));
  }

 private:
  enum class Mode { Script, Walker, Idle };

  void on_accept(beast::error_code ec) {
    if (ec) {
      spdlog::warn("session handshake failed: {}", ec.message());
      return;
    }
    ws_.text(true);
    spdlog::info("session {} opened", id_);
    base_ = Clock::now();
    send(wire::hello(id_, session_));
    do_read();
    if (shared_->walk) {
      mode_ = Mode::Script;
      realtime_ = !shared_->options.fast;
    } else {
      start_walker(home());
    }
    schedule();
  }

  // -- outbound

  void send(std::string frame) {
    if (closed_) return;
    outbox_.push_back(std::move(frame));
    if (!writing_) do_write();
  }

  void do_write() {
    writing_ = true;
    ws_.async_write(net::buffer(outbox_.front()),
                    beast::bind_front_handler(&StreamSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) return shut("write failed: " + ec.message());
    outbox_.pop_front();
    if (outbox_.empty())
      writing_ = false;
    else
      do_write();
  }

  void shut(const std::string& why) {
    if (closed_) return;
    closed_ = true;
    timer_.cancel();
    spdlog::info("session {} closed ({})", id_, why);
  }

  /// Sends every log entry not yet sent, then a snapshot if anything changed.
  void flush(bool force_snapshot = false) {
    const auto& log = session_.log();
    const bool changed = sent_ < log.size();
    for (; sent_ < log.size(); ++sent_) send(wire::event(id_, log[sent_]));
    if (changed || force_snapshot) send(wire::snapshot(id_, session_, walker_target()));
  }

  // -- inbound

  void do_read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&StreamSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return shut(ec == websocket::error::closed ? "client closed" : ec.message());
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    handle(text);
    if (!closed_) do_read();
  }

  void handle(const std::string& text) {
    wire::ClientMessage msg;
    try {
      msg = wire::parse_client(text, id_);
    } catch (const wire::ProtocolError& e) {
      spdlog::debug("session {} rejected frame: {}", id_, e.what());
      send(wire::error(id_, e.code(), e.what(), e.in_reply_to()));
      return;
    }
    std::string_view tag = "";
    try {
      if (const auto* s = std::get_if<wire::Steer>(&msg)) {
        tag = "steer";
        steer(s->target);
      } else if (const auto* z = std::get_if<wire::ZoomStep>(&msg)) {
        tag = "zoom_step";
        session_.zoom_step(z->direction);
        flush(true);
      } else if (const auto* m = std::get_if<wire::Menu>(&msg)) {
        tag = "menu_action";
        const auto response = session_.menu_action(m->action);
        send(wire::menu_response(id_, wire::menu_tag(m->action), response));
        flush();
        if (session_.state() == engine::ConnectionState::Exited) stop_driving();
      } else {
        tag = "restart";
        session_.restart();
        flush();
      }
    } catch (const Error& e) {
      send(wire::error(id_, to_string(e.code()), e.what(), tag));
    }
  }

  // -- driving the session clock and its position source

  double wall_elapsed() const { return std::chrono::duration<double>(Clock::now() - base_).count(); }

  geo::GeoPoint home() const {
    if (const auto& f = session_.last_fix()) return {f->latitude, f->longitude};
    const auto& m = session_.pack().manifest;
    return geo::pixel_to_geo(m.calibration, {m.map_extent.width / 2, m.map_extent.height / 2});
  }

  std::optional<geo::GeoPoint> walker_target() const {
    if (mode_ == Mode::Walker && target_) return target_;
    return std::nullopt;
  }

  void start_walker(geo::GeoPoint from) {
    mode_ = Mode::Walker;
    realtime_ = true;
    position_ = from;
    walker_clock_ = session_.now();
    base_ = Clock::now() - std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(session_.now()));
  }

  void stop_driving() {
    mode_ = Mode::Idle;
    timer_.cancel();
  }

  void steer(viewport::ScreenPoint s) {
    if (mode_ == Mode::Script)
      throw Error(ErrorCode::InvalidState, "steering starts once the scripted walk has completed");
    if (session_.state() == engine::ConnectionState::Exited) throw Error(ErrorCode::SessionClosed, "session has exited");
    const auto px = viewport::screen_to_map(session_.viewport(), s);
    const auto target = geo::pixel_to_geo(session_.pack().manifest.calibration, px);
    if (mode_ == Mode::Idle) {
      start_walker(home());
      target_ = target;
      schedule();
    } else {
      target_ = target;
    }
    flush(true);
  }

  void schedule() {
    if (closed_ || mode_ == Mode::Idle) return;
    if (mode_ == Mode::Script && !realtime_) {
      net::post(ws_.get_executor(), beast::bind_front_handler(&StreamSession::step, shared_from_this(),
                                                              beast::error_code{}));
      return;
    }
    // Real time: wake for the next item or the next one-second heartbeat,
    // whichever comes first, so timeouts fire even while the stream is silent.
    double next = std::floor(session_.now()) + 1.0;
    if (mode_ == Mode::Script) next = std::min(next, (*shared_->walk)[next_item_].elapsed_s);
    timer_.expires_at(base_ + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(next)));
    timer_.async_wait(beast::bind_front_handler(&StreamSession::step, shared_from_this()));
  }

  void step(beast::error_code ec) {
    if (ec || closed_ || mode_ == Mode::Idle) return;
    if (mode_ == Mode::Script)
      step_script();
    else
      step_walker();
    if (session_.state() == engine::ConnectionState::Exited) stop_driving();
    schedule();
  }

  void step_script() {
    const auto& stream = *shared_->walk;
    constexpr std::size_t kBatch = 32;
    const double until = realtime_ ? wall_elapsed() : 0.0;
    std::size_t fed = 0;
    while (next_item_ < stream.size()) {
      const auto& item = stream[next_item_];
      if (realtime_ ? item.elapsed_s > until : fed == kBatch) break;
      const auto r = simulator::decode(item);
      simulator::tally(summary_, r);
      feed(session_, r);
      ++next_item_;
      ++fed;
    }
    if (realtime_) session_.on_tick(until);
    flush();
    if (next_item_ == stream.size()) {
      send(wire::walk_complete(id_, summary_));
      spdlog::info("session {} finished its scripted walk", id_);
      // Fast replays stop the clock so the log matches a headless tour; in
      // real time the visitor keeps standing where the walk ended.
      if (realtime_)
        start_walker(home());
      else
        mode_ = Mode::Idle;
    }
  }

  void step_walker() {
    const double now = std::max(wall_elapsed(), session_.now());
    if (now - walker_clock_ >= 1.0 - 1e-6) {
      if (target_) {
        const geo::LocalFrame frame(*position_);
        const auto offset = frame.to_local(*target_);
        const double remaining = std::hypot(offset.east, offset.north);
        const double stride = simulator::kWalkingSpeedMps * (now - walker_clock_);
        if (remaining <= stride) {
          position_ = *target_;
          target_.reset();
        } else {
          const double k = stride / remaining;
          position_ = frame.to_geo({offset.east * k, offset.north * k});
        }
      }
      walker_clock_ = now;
      session_.on_tick(now);
      nmea::GeoFix fix;
      fix.latitude = position_->latitude;
      fix.longitude = position_->longitude;
      fix.timestamp = nmea::UtcTime::from_seconds_of_day(now);
      fix.quality = nmea::FixQuality::GpsFix;
      fix.satellites = 8;
      fix.hdop = 0.9;
      // Through the same parse path as a receiver's bytes.
      const simulator::StreamItem item{now, nmea::format_gga(fix), simulator::ItemKind::Sentence};
      feed(session_, simulator::decode(item));
    } else {
      session_.on_tick(now);
    }
    flush();
  }

  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  std::shared_ptr<const Shared> shared_;
  std::string id_;
  engine::Session session_;
  Request req_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  bool writing_ = false;
  bool closed_ = false;
  std::size_t sent_ = 0;

  Mode mode_ = Mode::Idle;
  bool realtime_ = true;
  Clock::time_point base_;
  std::size_t next_item_ = 0;
  simulator::ReplaySummary summary_;
  std::optional<geo::GeoPoint> position_;
  std::optional<geo::GeoPoint> target_;
  double walker_clock_ = 0;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, std::shared_ptr<const Shared> shared)
      : stream_(std::move(socket)), shared_(std::move(shared)) {}

  void run() {
    net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::do_read, shared_from_this()));
  }

 private:
  void do_read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) return close();
    if (ec) return;
    if (websocket::is_upgrade(req_)) {
      if (split_target(std_view(req_.target())).path == "/ws/session") {
        stream_.expires_never();
        std::make_shared<StreamSession>(stream_.release_socket(), shared_)->run(std::move(req_));
        return;
      }
      return send(error_reply(req_, http::status::not_found, "NotFound", "streams are served at /ws/session"));
    }
    Response res;
    try {
      res = handle_request(*shared_, req_);
    } catch (const std::exception& e) {
      spdlog::error("request {} failed: {}", std::string(req_.target()), e.what());
      res = error_reply(req_, http::status::internal_server_error, "Internal", e.what());
    }
    if (req_.method() == http::verb::head) res.body().clear();
    spdlog::debug("{} {} -> {}", std::string(req_.method_string()), std::string(req_.target()), res.result_int());
    send(std::move(res));
  }

  void send(Response res) {
    auto msg = std::make_shared<Response>(std::move(res));
    http::async_write(stream_, *msg, [self = shared_from_this(), msg](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (msg->need_eof()) return self->close();
      self->do_read();
    });
  }

  void close() {
    beast::error_code ec;
    stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  Request req_;
  std::shared_ptr<const Shared> shared_;
};

}  // namespace

struct Server::Impl {
  net::io_context ioc;
  std::shared_ptr<const Shared> shared;
  tcp::acceptor acceptor{ioc};
  std::vector<std::thread> threads;
  unsigned short port = 0;
  bool running = false;

  void accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec != net::error::operation_aborted) spdlog::warn("accept failed: {}", ec.message());
        if (!acceptor.is_open()) return;
      } else {
        std::make_shared<HttpSession>(std::move(socket), shared)->run();
      }
      accept();
    });
  }
};

Server::Server(std::shared_ptr<const content::ContentPack> pack, std::optional<simulator::FixStream> walk,
               ServeOptions options)
    : impl_(std::make_unique<Impl>()) {
  if (!pack) throw Error(ErrorCode::ConfigInvalid, "server needs a content pack");
  options.config.validate();
  if (walk && walk->empty()) throw Error(ErrorCode::ScriptInvalid, "scripted walk has no samples");
  impl_->shared = std::make_shared<const Shared>(Shared{std::move(pack), std::move(walk), std::move(options)});
}

Server::~Server() { stop(); }

void Server::start() {
  auto& impl = *impl_;
  if (impl.running) return;
  const auto& opts = impl.shared->options;
  const tcp::endpoint endpoint{net::ip::make_address(opts.address), opts.port};
  impl.acceptor.open(endpoint.protocol());
  impl.acceptor.set_option(net::socket_base::reuse_address(true));
  impl.acceptor.bind(endpoint);
  impl.acceptor.listen(net::socket_base::max_listen_connections);
  impl.port = impl.acceptor.local_endpoint().port();
  impl.accept();
  impl.running = true;
  for (unsigned i = 0; i < std::max(1u, opts.threads); ++i) impl.threads.emplace_back([&impl] { impl.ioc.run(); });
  spdlog::debug("serving {} on http://{}:{}", impl.shared->pack->manifest.name, opts.address, impl.port);
}

unsigned short Server::port() const noexcept { return impl_->port; }

void Server::stop() {
  auto& impl = *impl_;
  if (!impl.running) return;
  impl.running = false;
  impl.ioc.stop();
  for (auto& t : impl.threads)
    if (t.joinable()) t.join();
  impl.threads.clear();
  beast::error_code ec;
  impl.acceptor.close(ec);
}

void Server::run_until_signal() {
  auto& impl = *impl_;
  net::signal_set signals(impl.ioc, SIGINT, SIGTERM);
  std::promise<void> stopping;
  auto stopped = stopping.get_future();
  signals.async_wait([&](beast::error_code, int sig) {
    spdlog::info("signal {} received, shutting down", sig);
    stopping.set_value();
  });
  stopped.wait();
  stop();
}

void configure_logging() {
  const char* env = std::getenv("ZOOOZ_LOG");
  if (env == nullptr || *env == '\0') return;
  const std::string name(env);
  const auto level = spdlog::level::from_str(name);
  if (level == spdlog::level::off && name != "off") {
    spdlog::warn("ZOOOZ_LOG={} is not a log level, keeping {}", name,
                 spdlog::level::to_string_view(spdlog::get_level()));
    return;
  }
  spdlog::set_level(level);
}

int cmd_serve(const ServeCommand& command, std::ostream& out, std::ostream& err) {
  std::shared_ptr<const content::ContentPack> pack;
  std::optional<simulator::FixStream> walk;
  try {
    pack = std::make_shared<const content::ContentPack>(content::load_pack(command.pack_dir));
    if (command.walk) walk = load_fix_stream(*command.walk, command.seed);
  } catch (const content::PackError& e) {
    for (const auto& d : e.diagnostics()) err << d.to_string() << '\n';
    return kExitInvalid;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  try {
    Server server(pack, std::move(walk), command.options);
    server.start();
    out << "serving " << pack->manifest.name << " on http://" << command.options.address << ':' << server.port()
        << '\n'
        << std::flush;
    server.run_until_signal();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: cannot serve on " << command.options.address << ':' << command.options.port << ": " << e.what()
        << '\n';
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace zooguide::service
