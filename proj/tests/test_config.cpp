#include <doctest.h>

#include <fstream>

#include "tda/config.hpp"
#include "tda/errors.hpp"
#include "tda/io.hpp"

using namespace tda;
using namespace tda::cli;
using json = nlohmann::json;

namespace {

json base() { return {{"schema", kConfigSchema}}; }

std::string field_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("minimal config uses defaults") {
  const auto c = parse_config(base());
  CHECK(c.configuration.mode == BaselineMode::Config2);
  CHECK(c.configuration.antenna_baseline == 15.0);
  CHECK(c.configuration.satellite_baseline == 300.0);
  CHECK(c.coherence == std::vector<double>{0.99});
  CHECK(c.scene.generator == "ramp_blocks");
  CHECK(c.geometry.wavelength == doctest::Approx(kSpeedOfLight / 9.6e9));
  CHECK_FALSE(c.orbit.has_value());
}

TEST_CASE("schema") {
  CHECK(field_of(json::object()) == "schema");
  CHECK(field_of({{"schema", "tda-experiment/0"}}) == "schema");
}

TEST_CASE("unknown keys are rejected with their dotted path") {
  auto j = base();
  j["bogus"] = 1;
  CHECK(field_of(j) == "bogus");
  j = base();
  j["geometry"] = {{"slant_rang", 1}};
  CHECK(field_of(j) == "geometry.slant_rang");
  j = base();
  j["errors"] = {{"orbit", {{"delta_bx", 0.1}}}};
  CHECK(field_of(j) == "errors.orbit.delta_bx");
  j = base();
  j["design"] = {{"alpha", 0.02}, {"extra", true}};
  CHECK(field_of(j) == "design.extra");
  j = base();
  j["scene"] = {{"generator", "ramp_blocks"}, {"blocks", {{{"row0", 1}, {"col0", 1}, {"rows", 2}, {"cols", 2}, {"height", 3}, {"h", 1}}}}};
  CHECK(field_of(j).rfind("scene.blocks", 0) == 0);
}

TEST_CASE("field-level validation") {
  auto with = [](const std::string& key, json v) {
    auto j = base();
    j[key] = std::move(v);
    return field_of(j);
  };
  CHECK(with("seed", -1) == "seed");
  CHECK(with("trials", 0) == "trials");
  CHECK(with("coherence", 1.5) == "coherence");
  CHECK(with("coherence", json::array({0.9, 0.9})) == "coherence");
  CHECK(with("configuration", {{"mode", 5}}) == "configuration.mode");
  CHECK(with("geometry", {{"frequency_ghz", 9.6}, {"wavelength", 0.03}}) == "geometry");
  CHECK(with("geometry", {{"slant_range", -5}}).rfind("geometry.", 0) == 0);
  CHECK(with("scene", {{"generator", "cube"}}) == "scene.generator");
  CHECK(with("scene", {{"generator", "canopy"}, {"mean_height", -1}}) == "scene.mean_height");
  CHECK(with("scene", {{"generator", "ramp_blocks"}, {"rows", 10}, {"cols", 10},
                       {"blocks", {{{"row0", 8}, {"col0", 0}, {"rows", 5}, {"cols", 1}, {"height", 1}}}}}) ==
        "scene.blocks[0]");
  CHECK(with("reference_pixel", json::array({500, 0})) == "reference_pixel");
  CHECK(with("estimation", {{"mode", "tristatic"}}) == "estimation.mode");
  CHECK(with("unwrap", {{"residual_window", 0}}) == "unwrap.residual_window");
  CHECK(with("f_test", {{"var1", 0}}) == "f_test.var1");
  CHECK(with("design", {{"alpha", 1.5}}).rfind("design.", 0) == 0);
  CHECK(with("design", {{"satellite_grid", {{"start", 10}, {"stop", 5}, {"step", 1}}}}) == "design.satellite_grid.stop");
}

TEST_CASE("design grids and inheritance") {
  auto j = base();
  j["seed"] = 9;
  j["trials"] = 123;
  j["coherence"] = 0.95;
  j["design"] = {{"antenna_grid", {{"start", 1}, {"stop", 2}, {"step", 0.5}}}, {"satellite_grid", {100, 200}}, {"modes", {1, 3}}};
  const auto c = parse_config(j);
  CHECK(c.design.settings.antenna_grid == std::vector<double>{1.0, 1.5, 2.0});
  CHECK(c.design.settings.satellite_grid == std::vector<double>{100.0, 200.0});
  CHECK(c.design.modes.size() == 2);
  CHECK(c.design.settings.trials == 123);
  CHECK(c.design.settings.seed == 9);
  CHECK(c.design.settings.coherence == std::vector<double>{0.95});
}

TEST_CASE("scenes are built from the config") {
  auto j = base();
  j["scene"] = {{"generator", "ramp_blocks"}, {"rows", 12}, {"cols", 16}, {"max_height", 30},
                {"blocks", {{{"row0", 2}, {"col0", 2}, {"rows", 3}, {"cols", 3}, {"height", 5}}}}};
  const auto c = parse_config(j);
  const auto s = build_scene(c);
  CHECK(s.rows() == 12);
  CHECK(s.cols() == 16);
  CHECK(s.heights(0, 15) == doctest::Approx(30.0));
  CHECK(s.heights(3, 3) == doctest::Approx(5.0 + 30.0 * 3.0 / 15.0));

  const auto dir = std::filesystem::temp_directory_path() / "tda_config_test";
  std::filesystem::create_directories(dir);
  io::write_height_csv(dir / "dem.csv", s, c.geometry);
  auto d = base();
  d["scene"] = {{"generator", "dem"}, {"path", "dem.csv"}};
  io::write_json(dir / "cfg.json", d);
  const auto loaded = load_config(dir / "cfg.json");
  CHECK(build_scene(loaded).heights.data == s.heights.data);
}

TEST_CASE("example configs parse") {
  CHECK_NOTHROW(load_config(std::filesystem::path(TDA_SOURCE_DIR) / "configs" / "mode2_ramp.json"));
}
