#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "zooguide/service/commands.hpp"
#include "zooguide/service/server.hpp"

namespace svc = zooguide::service;

int main(int argc, char** argv) {
  CLI::App app{"ZooOz guide: content packs, calibration, headless tours and the guide service"};
  app.require_subcommand(1);

  std::string validate_dir;
  auto* validate = app.add_subcommand("validate", "Check a content pack and list every finding");
  validate->add_option("dir", validate_dir, "Pack directory")->required();

  std::string points_file;
  auto* calibrate = app.add_subcommand("calibrate", "Fit the map calibration to control points");
  calibrate->add_option("file", points_file, "Control points CSV (lat,lon,x_px,y_px)")->required();

  svc::TourOptions tour_options;
  std::string tour_dir, tour_walk, tour_out;
  std::optional<std::uint64_t> tour_seed;
  auto* tour = app.add_subcommand("tour", "Replay a walk through a session and write the event log");
  tour->add_option("dir", tour_dir, "Pack directory")->required();
  tour->add_option("--walk", tour_walk, "Walk script (.jsonl) or NMEA log (.nmea)")->required();
  tour->add_option("--out", tour_out, "Event log to write, - for stdout")->required();
  tour->add_option("--seed", tour_seed, "Override the walk's noise seed");

  std::string sim_walk, sim_out;
  std::optional<std::uint64_t> sim_seed;
  auto* simulate = app.add_subcommand("simulate", "Render a walk script as an NMEA log");
  simulate->add_option("--walk", sim_walk, "Walk script (.jsonl)")->required();
  simulate->add_option("--out", sim_out, "NMEA log to write, - for stdout")->required();
  simulate->add_option("--seed", sim_seed, "Override the walk's noise seed");

  svc::ServeCommand serve_cmd;
  std::string serve_dir;
  std::optional<std::string> serve_walk, serve_static;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API and the session stream");
  serve->add_option("dir", serve_dir, "Pack directory")->required();
  serve->add_option("--port", serve_cmd.options.port, "TCP port, 0 for any free port")->capture_default_str();
  serve->add_option("--address", serve_cmd.options.address, "Address to bind")->capture_default_str();
  serve->add_option("--walk", serve_walk, "Scripted walk every connection replays; otherwise steerable");
  serve->add_option("--seed", serve_cmd.seed, "Override the walk's noise seed");
  serve->add_flag("--fast", serve_cmd.options.fast, "Replay the scripted walk as fast as possible");
  serve->add_option("--static", serve_static, "Directory of UI assets served at /");

  CLI11_PARSE(app, argc, argv);

  spdlog::set_level(spdlog::level::info);
  svc::configure_logging();

  if (*validate) return svc::cmd_validate(validate_dir, std::cout, std::cerr);
  if (*calibrate) return svc::cmd_calibrate(points_file, std::cout, std::cerr);
  if (*tour) {
    tour_options.pack_dir = tour_dir;
    tour_options.walk = tour_walk;
    tour_options.out = tour_out;
    tour_options.seed = tour_seed;
    return svc::cmd_tour(tour_options, std::cout, std::cerr);
  }
  if (*simulate) return svc::cmd_simulate({sim_walk, sim_out, sim_seed}, std::cout, std::cerr);

  serve_cmd.pack_dir = serve_dir;
  if (serve_walk) serve_cmd.walk = *serve_walk;
  if (serve_static) serve_cmd.options.static_dir = *serve_static;
  return svc::cmd_serve(serve_cmd, std::cout, std::cerr);
}
