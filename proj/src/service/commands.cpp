#include "zooguide/service/commands.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "zooguide/content.hpp"
#include "zooguide/geo.hpp"
#include "zooguide/tour.hpp"

namespace zooguide::service {

namespace fs = std::filesystem;

namespace {

std::string plural_errors(std::size_t n) { return std::to_string(n) + (n == 1 ? " error" : " errors"); }

std::optional<std::string> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_nmea_log(const fs::path& p) {
  const auto ext = p.extension().string();
  return ext == ".nmea" || ext == ".log" || ext == ".txt";
}

// Writes to stdout for "-", otherwise to the file. False on write failure.
bool emit(const fs::path& target, const std::string& bytes, std::ostream& out) {
  if (target == "-") {
    out << bytes;
    return static_cast<bool>(out);
  }
  std::ofstream file(target, std::ios::binary | std::ios::trunc);
  if (!file) return false;
  file << bytes;
  file.close();
  return static_cast<bool>(file);
}

void report(const Error& e, std::ostream& err) {
  if (const auto* pe = dynamic_cast<const content::PackError*>(&e)) {
    for (const auto& d : pe->diagnostics()) err << d.to_string() << '\n';
    err << plural_errors(pe->diagnostics().size()) << '\n';
    return;
  }
  err << "error: " << e.what() << '\n';
}

}  // namespace

int exit_code_for(const Error& e) {
  if (dynamic_cast<const content::PackError*>(&e) != nullptr) return kExitInvalid;
  return e.code() == ErrorCode::MissingFile ? kExitIo : kExitInvalid;
}

simulator::FixStream load_fix_stream(const fs::path& walk, std::optional<std::uint64_t> seed) {
  if (is_nmea_log(walk)) {
    const auto text = slurp(walk);
    if (!text) throw Error(ErrorCode::MissingFile, "cannot read NMEA log " + walk.string());
    return simulator::read_nmea_log(*text);
  }
  auto script = simulator::load_walk(walk);
  if (seed) script.seed = *seed;
  return simulator::build_walk(script);
}

std::string tour_log(const fs::path& pack_dir, const fs::path& walk, std::optional<std::uint64_t> seed,
                     const engine::Config& config) {
  auto pack = std::make_shared<const content::ContentPack>(content::load_pack(pack_dir));
  const auto stream = load_fix_stream(walk, seed);
  const auto session = run_tour(std::move(pack), stream, config);
  return engine::export_log(session.log());
}

int cmd_validate(const fs::path& pack_dir, std::ostream& out, std::ostream& err) {
  content::PackInspection inspection;
  try {
    inspection = content::inspect_pack(pack_dir);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  for (const auto& d : inspection.diagnostics) out << d.to_string() << '\n';
  out << plural_errors(inspection.diagnostics.size()) << '\n';
  return inspection.diagnostics.empty() ? kExitOk : kExitInvalid;
}

int cmd_calibrate(const fs::path& points_file, std::ostream& out, std::ostream& err) {
  const auto text = slurp(points_file);
  if (!text) {
    err << "error: cannot read control points " << points_file.string() << '\n';
    return kExitIo;
  }
  std::vector<content::Diagnostic> diags;
  const auto file = points_file.filename().string();
  const auto numbered = content::detail::parse_control_points(file, *text, diags);
  if (!diags.empty()) {
    for (const auto& d : diags) err << d.to_string() << '\n';
    err << plural_errors(diags.size()) << '\n';
    return kExitInvalid;
  }
  std::vector<geo::ControlPoint> points;
  for (const auto& n : numbered) points.push_back(n.point);

  geo::MapCalibration cal;
  try {
    cal = geo::fit_affine(points);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  char line[128];
  const std::pair<const char*, double> rows[] = {{"a", cal.a}, {"b", cal.b}, {"c", cal.c},
                                                 {"d", cal.d}, {"e", cal.e}, {"f", cal.f}};
  out << "x = a*lon + b*lat + c, y = d*lon + e*lat + f\n";
  for (const auto& [name, value] : rows) {
    std::snprintf(line, sizeof line, "%s = %.17g\n", name, value);
    out << line;
  }
  std::snprintf(line, sizeof line, "rms_residual = %.6f px over %zu points\n", cal.rms_residual, points.size());
  out << line;

  nlohmann::ordered_json block;
  block["calibration"] = {{"source", file}, {"a", cal.a}, {"b", cal.b}, {"c", cal.c}, {"d", cal.d},
                          {"e", cal.e},     {"f", cal.f}, {"rms_residual", cal.rms_residual}};
  out << "\nmanifest block:\n" << block.dump(2) << '\n';
  return kExitOk;
}

int cmd_tour(const TourOptions& options, std::ostream& out, std::ostream& err) {
  std::string log;
  try {
    log = tour_log(options.pack_dir, options.walk, options.seed);
  } catch (const Error& e) {
    report(e, err);
    return exit_code_for(e);
  }
  if (!emit(options.out, log, out)) {
    err << "error: cannot write " << options.out.string() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err) {
  std::string bytes;
  try {
    auto script = simulator::load_walk(options.walk);
    if (options.seed) script.seed = *options.seed;
    bytes = simulator::dump_nmea(simulator::build_walk(script));
  } catch (const Error& e) {
    report(e, err);
    return exit_code_for(e);
  }
  if (!emit(options.out, bytes, out)) {
    err << "error: cannot write " << options.out.string() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace zooguide::service
