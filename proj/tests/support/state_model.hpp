#pragma once

// Exhaustive check of the session's connection state machine against a
// table written out independently of the implementation.
//
// Every reachable (state, attempt) configuration is set up from a fresh
// session by a fixed prefix that leaves it having just entered the state
// at the current clock. Each input is then applied once and the observed
// (state, attempt, connection events, error) compared with the table.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zooguide/engine.hpp"

namespace state_model {

using zooguide::ErrorCode;
using zooguide::engine::ConnectionState;
using S = ConnectionState;

enum class Input { TickShort, TickToDeadline, UsableFix, NoFix, Restart, CheckConnection, ShowCoordinates, Close };

inline const std::vector<Input> kInputs{Input::TickShort, Input::TickToDeadline, Input::UsableFix,
                                        Input::NoFix,     Input::Restart,        Input::CheckConnection,
                                        Input::ShowCoordinates, Input::Close};

inline const char* name(Input i) {
  switch (i) {
    case Input::TickShort: return "tick_short";
    case Input::TickToDeadline: return "tick_to_deadline";
    case Input::UsableFix: return "usable_fix";
    case Input::NoFix: return "no_fix";
    case Input::Restart: return "restart";
    case Input::CheckConnection: return "check_connection";
    case Input::ShowCoordinates: return "show_coordinates";
    case Input::Close: return "close";
  }
  return "?";
}

struct Config {
  S state;
  int attempt;
};

struct Outcome {
  S state;
  int attempt;
  std::vector<S> announced;  // ConnectionChanged states, in order
  std::optional<ErrorCode> error;
  bool operator==(const Outcome&) const = default;
};

// The documented table.
inline Outcome expected(Config c, Input in) {
  const auto same = [&](std::optional<ErrorCode> e = std::nullopt) { return Outcome{c.state, c.attempt, {}, e}; };
  if (c.state == S::Exited) {
    if (in == Input::TickShort || in == Input::TickToDeadline || in == Input::UsableFix || in == Input::NoFix)
      return same();
    return same(ErrorCode::SessionClosed);
  }
  switch (in) {
    case Input::TickShort:
    case Input::NoFix: return same();
    case Input::TickToDeadline:
      switch (c.state) {
        case S::Splash: return {S::Connecting, 1, {S::Connecting}, {}};
        case S::Connected: return {S::Lost, c.attempt, {S::Lost}, {}};
        case S::Connecting:
        case S::Lost:
          if (c.attempt >= 2) return {S::Exited, c.attempt, {S::Failed, S::Exited}, {}};
          return {S::Failed, c.attempt, {S::Failed}, {}};
        default: return same();
      }
    case Input::UsableFix:
      if (c.state == S::Connecting || c.state == S::Lost) return {S::Connected, c.attempt, {S::Connected}, {}};
      return same();
    case Input::Restart:
      if (c.state == S::Failed && c.attempt == 1) return {S::Connecting, 2, {S::Connecting}, {}};
      return same(ErrorCode::InvalidState);
    case Input::CheckConnection: return same();
    case Input::ShowCoordinates:
      return c.state == S::Connected ? same() : same(ErrorCode::NotReady);
    case Input::Close: return {S::Exited, c.attempt, {S::Exited}, {}};
  }
  return same();
}

struct Harness {
  std::shared_ptr<const zooguide::content::ContentPack> pack;
  zooguide::nmea::GeoFix fix;  // a usable in-range fix
  zooguide::engine::Config config{};

  // Fresh session driven into the configuration, entered at session.now().
  zooguide::engine::Session reach(Config c) const {
    auto s = zooguide::engine::new_session(pack, config);
    const double splash = config.splash_seconds, timeout = config.connect_timeout_s, gap = config.fix_gap_s;
    const auto to_connecting = [&] { s.on_tick(splash); };
    const auto connect = [&] { s.on_fix(fix); };
    const auto to_failed = [&] { s.on_tick(s.now() + timeout); };
    const auto lose = [&] { s.on_tick(s.now() + gap); };
    if (c.state == S::Splash) return s;
    if (c.state == S::Exited) {
      s.menu_action(zooguide::engine::menu::Close{});
      return s;
    }
    to_connecting();
    if (c.attempt == 2) {
      to_failed();
      s.restart();
    }
    if (c.state == S::Connected) connect();
    if (c.state == S::Lost) connect(), lose();
    if (c.state == S::Failed) to_failed();
    return s;
  }

  double dwell(S state) const {
    switch (state) {
      case S::Splash: return config.splash_seconds;
      case S::Connecting:
      case S::Lost: return config.connect_timeout_s;
      case S::Connected: return config.fix_gap_s;
      default: return 1000.0;
    }
  }

  Outcome apply(Config c, Input in) const {
    auto s = reach(c);
    const std::size_t before = s.log().size();
    Outcome out{};
    try {
      switch (in) {
        case Input::TickShort: s.on_tick(s.now() + 1.0); break;
        case Input::TickToDeadline: s.on_tick(s.now() + dwell(c.state)); break;
        case Input::UsableFix: s.on_fix(fix); break;
        case Input::NoFix: {
          auto bad = fix;
          bad.quality = zooguide::nmea::FixQuality::NoFix;
          s.on_fix(bad);
          break;
        }
        case Input::Restart: s.restart(); break;
        case Input::CheckConnection: s.menu_action(zooguide::engine::menu::CheckConnection{}); break;
        case Input::ShowCoordinates: s.menu_action(zooguide::engine::menu::ShowCoordinates{}); break;
        case Input::Close: s.menu_action(zooguide::engine::menu::Close{}); break;
      }
    } catch (const zooguide::Error& e) {
      out.error = e.code();
    }
    out.state = s.state();
    out.attempt = s.attempt();
    for (std::size_t i = before; i < s.log().size(); ++i)
      if (const auto* cc = std::get_if<zooguide::engine::ConnectionChanged>(&s.log()[i].event))
        out.announced.push_back(cc->state);
    return out;
  }
};

// Every configuration a session can actually sit in.
inline const std::vector<Config> kConfigs{{S::Splash, 0},    {S::Connecting, 1}, {S::Connected, 1}, {S::Lost, 1},
                                          {S::Failed, 1},    {S::Connecting, 2}, {S::Connected, 2}, {S::Lost, 2},
                                          {S::Exited, 0}};

struct Mismatch {
  Config config;
  Input input;
  Outcome want, got;
};

inline std::vector<Mismatch> enumerate(const Harness& h) {
  std::vector<Mismatch> out;
  for (const auto& c : kConfigs) {
    const auto start = h.reach(c);
    if (start.state() != c.state || start.attempt() != c.attempt) {
      out.push_back({c, Input::TickShort, {c.state, c.attempt, {}, {}}, {start.state(), start.attempt(), {}, {}}});
      continue;
    }
    for (Input in : kInputs) {
      const Outcome want = expected(c, in);
      const Outcome got = h.apply(c, in);
      if (!(want == got)) out.push_back({c, in, want, got});
    }
  }
  return out;
}

inline std::string describe(const Mismatch& m) {
  const auto st = [](S s) { return std::string(zooguide::engine::to_string(s)); };
  return st(m.config.state) + "/" + std::to_string(m.config.attempt) + " + " + name(m.input) + ": want " +
         st(m.want.state) + "/" + std::to_string(m.want.attempt) + " got " + st(m.got.state) + "/" +
         std::to_string(m.got.attempt);
}

}  // namespace state_model
