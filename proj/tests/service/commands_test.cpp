#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "support/oracles.hpp"
#include "support/scratch.hpp"
#include "support/tour_oracle.hpp"
#include "zooguide/service/commands.hpp"

namespace svc = zooguide::service;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int status;
  std::string out, err;
};

template <typename Fn>
Run capture(Fn&& fn) {
  std::ostringstream out, err;
  const int status = fn(out, err);
  return {status, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

fs::path golden() { return fs::path(ZOOGUIDE_GOLDEN_DIR) / "big_cats_tour.jsonl"; }

// Each defect, applied alone to the fixture, yields exactly one finding.
struct Defect {
  const char* name;
  const char* file;
  const char* from;
  const char* to;
};

const std::vector<Defect> kDefects{
    {"ghost content reference", "hotspots.jsonl", R"("content_id": "lion")", R"("content_id": "ghost")"},
    {"event ends before it starts", "events.jsonl", R"("start": "10:30", "end": "10:45")",
     R"("start": "10:30", "end": "10:15")"},
    {"event at unknown hotspot", "events.jsonl", R"("location_hotspot_id": "lion-spot")",
     R"("location_hotspot_id": "nowhere")"},
    {"missing media file", "animals.jsonl", R"("path": "media/lion.svg")", R"("path": "media/lion-gone.svg")"},
    {"stale cached calibration", "manifest.json", R"("a": 285498.5585748018)", R"("a": 285000.0)"},
    {"empty animal name", "animals.jsonl", R"("name": "Leopard")", R"("name": "")"},
};

std::size_t findings(const Run& r) {
  const auto ls = lines_of(r.out);
  return ls.empty() ? 0 : ls.size() - 1;  // the last line is the count
}

}  // namespace

TEST(Validate, FixtureIsClean) {
  const auto r = capture([](auto& o, auto& e) { return svc::cmd_validate(scratch::fixture_pack(), o, e); });
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "0 errors\n");
}

TEST(Validate, MissingDirectoryIsIoFailure) {
  const auto r = capture([](auto& o, auto& e) { return svc::cmd_validate("/nonexistent/pack", o, e); });
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("not found"), std::string::npos);
}

TEST(Validate, EachSeededDefectIsOneFinding) {
  for (const auto& d : kDefects) {
    scratch::PackCopy copy;
    ASSERT_TRUE(copy.replace(d.file, d.from, d.to)) << d.name;
    const auto r = capture([&](auto& o, auto& e) { return svc::cmd_validate(copy.root(), o, e); });
    EXPECT_EQ(r.status, 1) << d.name;
    EXPECT_EQ(findings(r), 1u) << d.name << "\n" << r.out;
  }
}

TEST(Validate, ThreeSeededDefectsAreExactlyThreeFindings) {
  const std::size_t n = kDefects.size();
  int combos = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        scratch::PackCopy copy;
        for (std::size_t x : {i, j, k}) ASSERT_TRUE(copy.replace(kDefects[x].file, kDefects[x].from, kDefects[x].to));
        const auto r = capture([&](auto& o, auto& e) { return svc::cmd_validate(copy.root(), o, e); });
        EXPECT_EQ(r.status, 1);
        EXPECT_EQ(findings(r), 3u) << kDefects[i].name << ", " << kDefects[j].name << ", " << kDefects[k].name << "\n"
                                   << r.out;
        EXPECT_EQ(lines_of(r.out).back(), "3 errors");
        ++combos;
      }
  EXPECT_EQ(combos, 20);
}

TEST(Validate, FindingsCarryLocators) {
  scratch::PackCopy copy;
  ASSERT_TRUE(copy.replace("hotspots.jsonl", R"("content_id": "lion")", R"("content_id": "ghost")"));
  const auto r = capture([&](auto& o, auto& e) { return svc::cmd_validate(copy.root(), o, e); });
  ASSERT_EQ(findings(r), 1u);
  EXPECT_EQ(lines_of(r.out)[0].rfind("hotspots.jsonl:3 [lion-spot] BrokenReference", 0), 0u) << r.out;
}

TEST(Calibrate, FixtureMatchesNormalEquationsOracle) {
  const auto file = scratch::fixture_pack() / "calibration.csv";
  const auto r = capture([&](auto& o, auto& e) { return svc::cmd_calibrate(file, o, e); });
  ASSERT_EQ(r.status, 0) << r.err;
  const auto block = json::parse(r.out.substr(r.out.find('{')))["calibration"];

  std::vector<zooguide::geo::ControlPoint> pts;
  for (const auto& l : lines_of(scratch::read(file))) {
    double v[4];
    if (std::sscanf(l.c_str(), "%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2], &v[3]) == 4)
      pts.push_back({{v[0], v[1]}, {v[2], v[3]}});
  }
  ASSERT_EQ(pts.size(), 6u);
  const auto k = oracle::normal_equations_fit(pts);
  const char* names[] = {"a", "b", "c", "d", "e", "f"};
  for (int i = 0; i < 6; ++i) {
    const double want = static_cast<double>(k[i]);
    EXPECT_NEAR(block[names[i]].get<double>(), want, 1e-6 * std::max(1.0, std::fabs(want))) << names[i];
  }
  EXPECT_EQ(block["source"], "calibration.csv");
  EXPECT_NE(r.out.find("rms_residual = "), std::string::npos);
}

TEST(Calibrate, IdentityPoints) {
  scratch::TempDir dir;
  const auto file = dir.path() / "identity.csv";
  scratch::write(file, "lat,lon,x_px,y_px\n0,0,0,0\n0,1,1,0\n1,0,0,1\n1,1,1,1\n");
  const auto r = capture([&](auto& o, auto& e) { return svc::cmd_calibrate(file, o, e); });
  ASSERT_EQ(r.status, 0) << r.err;
  const auto block = json::parse(r.out.substr(r.out.find('{')))["calibration"];
  const double want[] = {1, 0, 0, 0, 1, 0};
  const char* names[] = {"a", "b", "c", "d", "e", "f"};
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(block[names[i]].get<double>(), want[i], 1e-12) << names[i];
  EXPECT_NEAR(block["rms_residual"].get<double>(), 0.0, 1e-12);
}

TEST(Calibrate, TwoPointsAreInsufficient) {
  scratch::TempDir dir;
  const auto file = dir.path() / "two.csv";
  scratch::write(file, "lat,lon,x_px,y_px\n0,0,0,0\n0,1,1,0\n");
  const auto r = capture([&](auto& o, auto& e) { return svc::cmd_calibrate(file, o, e); });
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("insufficient control points"), std::string::npos) << r.err;
}

TEST(Calibrate, CollinearPointsAreDegenerate) {
  scratch::TempDir dir;
  const auto file = dir.path() / "line.csv";
  scratch::write(file, "0,0,0,0\n1,1,1,1\n2,2,2,2\n");
  const auto r = capture([&](auto& o, auto& e) { return svc::cmd_calibrate(file, o, e); });
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("DegenerateGeometry"), std::string::npos) << r.err;
}

TEST(Calibrate, BadRowsAreReportedWithLines) {
  scratch::TempDir dir;
  const auto file = dir.path() / "bad.csv";
  scratch::write(file, "lat,lon,x_px,y_px\n0,0,0,0\n0,one,1,0\n1,0,0,1\n");
  const auto r = capture([&](auto& o, auto& e) { return svc::cmd_calibrate(file, o, e); });
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("bad.csv:3"), std::string::npos) << r.err;
}

TEST(Calibrate, MissingFileIsIoFailure) {
  const auto r = capture([](auto& o, auto& e) { return svc::cmd_calibrate("/nonexistent/points.csv", o, e); });
  EXPECT_EQ(r.status, 2);
}

TEST(Tour, ReproducesGoldenLogByteForByte) {
  scratch::TempDir dir;
  const auto out = dir.path() / "tour.jsonl";
  const auto r = capture([&](auto& o, auto& e) {
    return svc::cmd_tour({scratch::fixture_pack(), scratch::walk("big-cats-tour.jsonl"), out, {}}, o, e);
  });
  ASSERT_EQ(r.status, 0) << r.err;
  const auto want = scratch::read(golden());
  ASSERT_FALSE(want.empty());
  EXPECT_TRUE(scratch::read(out) == want);
}

TEST(Tour, GoldenAgreesWithOracleReplay) {
  const auto pack = zooguide::content::load_pack(scratch::fixture_pack());
  const auto stream = svc::load_fix_stream(scratch::walk("big-cats-tour.jsonl"));
  const auto want = tour_oracle::replay(pack, stream, 5.0, 5.0);
  const auto got = tour_oracle::project(scratch::read(golden()));
  EXPECT_EQ(got, want);

  std::vector<std::string> entered;
  for (const auto& e : got)
    if (e.type == "hotspot_entered") entered.push_back(e.label);
  EXPECT_EQ(entered, (std::vector<std::string>{"tiger-spot", "leopard-spot", "lion-spot", "jaguar-spot"}));
  ASSERT_GE(got.size(), 2u);
  EXPECT_EQ(got[0], (tour_oracle::Expected{5.0, "connection_changed", "connecting"}));
  EXPECT_EQ(got[1].label, "connected");
}

TEST(Tour, SameCommandTwiceIsIdentical) {
  scratch::TempDir dir;
  for (const char* name : {"a.jsonl", "b.jsonl"}) {
    const auto r = capture([&](auto& o, auto& e) {
      return svc::cmd_tour({scratch::fixture_pack(), scratch::walk("gate-to-tiger-faults.jsonl"), dir.path() / name, 7},
                           o, e);
    });
    ASSERT_EQ(r.status, 0) << r.err;
  }
  EXPECT_EQ(scratch::read(dir.path() / "a.jsonl"), scratch::read(dir.path() / "b.jsonl"));
}

TEST(Tour, SeedChangesTheNoise) {
  const auto a = svc::tour_log(scratch::fixture_pack(), scratch::walk("big-cats-tour.jsonl"), 1);
  const auto b = svc::tour_log(scratch::fixture_pack(), scratch::walk("big-cats-tour.jsonl"), 2);
  EXPECT_NE(a, b);
}

TEST(Tour, OutsideWalkHasNoFenceEvents) {
  const auto log = svc::tour_log(scratch::fixture_pack(), scratch::walk("outside-zoo.jsonl"));
  std::set<std::string> types;
  for (const auto& l : lines_of(log)) types.insert(json::parse(l)["type"].get<std::string>());
  EXPECT_EQ(types, (std::set<std::string>{"connection_changed", "out_of_range"}));
}

TEST(Tour, StdoutTarget) {
  const auto r = capture([&](auto& o, auto& e) {
    return svc::cmd_tour({scratch::fixture_pack(), scratch::walk("big-cats-tour.jsonl"), "-", {}}, o, e);
  });
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out, scratch::read(golden()));
}

TEST(Tour, ErrorsMapToExitCodes) {
  const auto missing_walk = capture([](auto& o, auto& e) {
    return svc::cmd_tour({scratch::fixture_pack(), "/nonexistent/walk.jsonl", "-", {}}, o, e);
  });
  EXPECT_EQ(missing_walk.status, 2);

  const auto missing_pack = capture([](auto& o, auto& e) {
    return svc::cmd_tour({"/nonexistent/pack", scratch::walk("big-cats-tour.jsonl"), "-", {}}, o, e);
  });
  EXPECT_EQ(missing_pack.status, 2);

  scratch::PackCopy copy;
  ASSERT_TRUE(copy.replace("hotspots.jsonl", R"("content_id": "lion")", R"("content_id": "ghost")"));
  const auto broken = capture([&](auto& o, auto& e) {
    return svc::cmd_tour({copy.root(), scratch::walk("big-cats-tour.jsonl"), "-", {}}, o, e);
  });
  EXPECT_EQ(broken.status, 1);
  EXPECT_NE(broken.err.find("hotspots.jsonl:3 [lion-spot]"), std::string::npos) << broken.err;

  scratch::TempDir dir;
  const auto bad_walk = dir.path() / "bad.jsonl";
  scratch::write(bad_walk, "{\"type\":\"walk\"}\n{\"type\":\"waypoint\",\"lat\":-37.78}\n");
  const auto invalid = capture([&](auto& o, auto& e) {
    return svc::cmd_tour({scratch::fixture_pack(), bad_walk, "-", {}}, o, e);
  });
  EXPECT_EQ(invalid.status, 1);
  EXPECT_NE(invalid.err.find("bad.jsonl:2"), std::string::npos) << invalid.err;

  const auto unwritable = capture([](auto& o, auto& e) {
    return svc::cmd_tour({scratch::fixture_pack(), scratch::walk("big-cats-tour.jsonl"), "/nonexistent/dir/out", {}},
                         o, e);
  });
  EXPECT_EQ(unwritable.status, 2);
}

TEST(Simulate, NmeaLogReplaysToTheSameTour) {
  scratch::TempDir dir;
  const auto nmea = dir.path() / "walk.nmea";
  const auto r = capture([&](auto& o, auto& e) {
    return svc::cmd_simulate({scratch::walk("big-cats-tour.jsonl"), nmea, {}}, o, e);
  });
  ASSERT_EQ(r.status, 0) << r.err;
  const auto from_log = svc::load_fix_stream(nmea);
  const auto from_script = svc::load_fix_stream(scratch::walk("big-cats-tour.jsonl"));
  ASSERT_EQ(from_log.size(), from_script.size());
  for (std::size_t i = 0; i < from_log.size(); ++i) {
    EXPECT_DOUBLE_EQ(from_log[i].elapsed_s, from_script[i].elapsed_s);
    EXPECT_EQ(from_log[i].bytes + "\r\n", from_script[i].bytes);
  }
  EXPECT_EQ(svc::tour_log(scratch::fixture_pack(), nmea), scratch::read(golden()));
}
