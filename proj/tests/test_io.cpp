#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "tda/errors.hpp"
#include "tda/io.hpp"
#include "tda/scene.hpp"

using namespace tda;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tda_io_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("format_double round trips") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, double(i % 20) - 10.0);
    CHECK(std::stod(io::format_double(v)) == v);
  }
  CHECK(io::format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("grid CSV round trip") {
  const auto dir = scratch("grid");
  Grid<double> g(3, 4);
  for (std::size_t i = 0; i < g.size(); ++i) g.data[i] = 0.1 * double(i) - 0.35;
  g(1, 2) = std::numeric_limits<double>::quiet_NaN();
  io::write_grid_csv(dir / "g.csv", g, {{"b_perp", "150"}, {"kind", "dual_antenna"}});
  const auto back = io::read_grid_csv(dir / "g.csv");
  CHECK(back.grid.rows == 3);
  CHECK(back.grid.cols == 4);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::isnan(g.data[i]))
      CHECK(std::isnan(back.grid.data[i]));
    else
      CHECK(back.grid.data[i] == g.data[i]);
  }
  CHECK(back.number("b_perp") == 150.0);
  CHECK(back.text("kind") == "dual_antenna");
  const auto m = io::mask_from_grid(back.grid);
  CHECK(m(1, 2) == 0);
  CHECK(count_valid(m) == 11);
}

TEST_CASE("corrupt grid files name the file and line") {
  const auto dir = scratch("corrupt");
  write_text(dir / "short.csv", "rows,cols\n2,2\n1,2\n");
  auto e = error_of([&] { io::read_grid_csv(dir / "short.csv"); });
  CHECK(e.find("short.csv") != std::string::npos);
  CHECK(e.find("line 4") != std::string::npos);

  write_text(dir / "bad.csv", "rows,cols\n2,2\n1,2\n1,x\n");
  e = error_of([&] { io::read_grid_csv(dir / "bad.csv"); });
  CHECK(e.find("bad.csv") != std::string::npos);
  CHECK(e.find("line 4") != std::string::npos);
  CHECK(e.find("column 2") != std::string::npos);

  write_text(dir / "wide.csv", "rows,cols\n2,2\n1,2,3\n1,2\n");
  e = error_of([&] { io::read_grid_csv(dir / "wide.csv"); });
  CHECK(e.find("line 3") != std::string::npos);

  write_text(dir / "tail.csv", "rows,cols\n1,1\n1\n5\n");
  e = error_of([&] { io::read_grid_csv(dir / "tail.csv"); });
  CHECK(e.find("unexpected data") != std::string::npos);

  CHECK_THROWS_AS(io::read_grid_csv(dir / "missing.csv"), ValidationError);
}

TEST_CASE("height CSV round trip") {
  const auto dir = scratch("height");
  auto h = canopy_scene(6, 7, 20.0, 2.0, 0.5, 9);
  io::write_height_csv(dir / "h.csv", h, RadarGeometry::defaults());
  const auto back = io::read_height_csv(dir / "h.csv");
  CHECK(back.mask.data == h.mask.data);
  for (std::size_t i = 0; i < h.heights.size(); ++i)
    if (h.mask.data[i]) CHECK(back.heights.data[i] == h.heights.data[i]);
}

TEST_CASE("geometry JSON round trip") {
  auto g = RadarGeometry::defaults();
  g.azimuth_time_step = 0.025;
  const auto back = io::geometry_from_json(io::geometry_to_json(g));
  CHECK(back.wavelength == g.wavelength);
  CHECK(back.slant_range == g.slant_range);
  CHECK(back.incidence == g.incidence);
  CHECK(back.range_spacing == g.range_spacing);
  CHECK(back.azimuth_spacing == g.azimuth_spacing);
  CHECK(back.azimuth_time_step == g.azimuth_time_step);
}

TEST_CASE("stack round trip and mismatches") {
  const auto dir = scratch("stack");
  const auto g = RadarGeometry::defaults();
  SimulationOptions opt;
  opt.config = {15.0, 300.0, BaselineMode::Config2};
  opt.seed = 4;
  const auto sim = simulate_stack(ramp_scene(8, 9, 20.0), g, opt);
  io::write_stack(dir, sim.stack, 4, {{"note", "x"}}, fs::path("truth.csv"));
  const auto back = io::read_stack(dir / "manifest.json");
  CHECK(back.seed == 4);
  CHECK(back.extra.at("note") == "x");
  REQUIRE(back.truth.has_value());
  CHECK(back.truth->filename() == "truth.csv");
  REQUIRE(back.stack.interferograms.size() == 3);
  CHECK(back.stack.reference_pixel == sim.stack.reference_pixel);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(back.stack.interferograms[k].b_perp == sim.stack.interferograms[k].b_perp);
    CHECK(back.stack.interferograms[k].kind == sim.stack.interferograms[k].kind);
    CHECK(back.stack.interferograms[k].wrapped_phase.data == sim.stack.interferograms[k].wrapped_phase.data);
  }

  io::write_grid_csv(dir / "ifg_2.csv", Grid<double>(8, 10, 0.0),
                     {{"b_perp", io::format_double(sim.stack.interferograms[2].b_perp)},
                      {"coherence", "0.99"},
                      {"kind", "dual_satellite_bistatic"}});
  const auto e = error_of([&] { io::read_stack(dir / "manifest.json"); });
  CHECK(e.find("ifg_2.csv") != std::string::npos);
  CHECK(e.find("8x10") != std::string::npos);

  auto manifest = io::read_json(dir / "manifest.json");
  manifest["schema"] = "other/9";
  io::write_json(dir / "manifest.json", manifest);
  CHECK_THROWS_WITH_AS(io::read_stack(dir / "manifest.json"), doctest::Contains("schema"), ValidationError);
}

TEST_CASE("invalid JSON") {
  const auto dir = scratch("json");
  write_text(dir / "x.json", "{\"a\": ");
  CHECK_THROWS_WITH_AS(io::read_json(dir / "x.json"), doctest::Contains("invalid JSON"), ValidationError);
}

TEST_CASE("design CSV header") {
  const auto dir = scratch("design");
  DesignReport r;
  DesignPoint p;
  p.l1 = 15;
  p.l2 = 300;
  p.sr_analytic = 0.97;
  p.feasible = true;
  p.binding_link = 1;
  r.points.push_back(p);
  io::write_design_csv(dir / "d.csv", {r});
  std::ifstream in(dir / "d.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "l1,l2,mode,sr_analytic,sr_empirical,sigma_h,h_amb,feasible,binding_link");
  CHECK(row == "15,300,2,0.97,,0,0,1,1");
}

TEST_CASE("histogram CSV") {
  const auto dir = scratch("hist");
  io::write_histogram_csv(dir / "h.csv", {{-1.0, 0.0, 3}, {0.0, 1.0, 5}});
  std::ifstream in(dir / "h.csv");
  std::string l;
  std::getline(in, l);
  CHECK(l == "bin_left,bin_right,count");
  std::getline(in, l);
  CHECK(l == "-1,0,3");
}
