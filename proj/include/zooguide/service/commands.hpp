#pragma once

// The command-line verbs as plain functions: each writes its report to out,
// problems to err, and returns the process exit status.
//
//   0  success
//   1  the input was read but is invalid (pack findings, bad walk, too few points)
//   2  the input could not be read or the output could not be written

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "zooguide/engine.hpp"
#include "zooguide/simulator.hpp"

namespace zooguide::service {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitIo = 2;

/// Exit status for a library error: unreadable inputs are I/O failures,
/// everything else is invalid input.
int exit_code_for(const Error& e);

/// A walk for replay: a JSON-lines walk script, or a recorded NMEA log
/// (.nmea, .log or .txt). seed overrides the script's noise seed.
simulator::FixStream load_fix_stream(const std::filesystem::path& walk, std::optional<std::uint64_t> seed = {});

/// The event log of a headless tour, byte-for-byte as cmd_tour writes it.
std::string tour_log(const std::filesystem::path& pack_dir, const std::filesystem::path& walk,
                     std::optional<std::uint64_t> seed = {}, const engine::Config& config = {});

int cmd_validate(const std::filesystem::path& pack_dir, std::ostream& out, std::ostream& err);

int cmd_calibrate(const std::filesystem::path& points_file, std::ostream& out, std::ostream& err);

struct TourOptions {
  std::filesystem::path pack_dir;
  std::filesystem::path walk;
  std::filesystem::path out;  // "-" writes to stdout
  std::optional<std::uint64_t> seed;
};

int cmd_tour(const TourOptions& options, std::ostream& out, std::ostream& err);

struct SimulateOptions {
  std::filesystem::path walk;
  std::filesystem::path out;  // "-" writes to stdout
  std::optional<std::uint64_t> seed;
};

/// Renders a walk script as the NMEA byte stream a receiver would send.
int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);

}  // namespace zooguide::service
