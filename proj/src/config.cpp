#include "tda/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "tda/errors.hpp"
#include "tda/io.hpp"
#include "tda/random.hpp"

namespace tda::cli {

namespace {

using json = nlohmann::json;

bool non_negative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

// Reads fields from one JSON object and rejects whatever was not read.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_.empty() ? "config" : path_, "must be a JSON object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ValidationError(field(key), "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(field(key), "must be finite");
    return d;
  }
  double positive(const std::string& key, double fallback) {
    const double d = number(key, fallback);
    if (!(d > 0.0)) throw ValidationError(field(key), "must be positive");
    return d;
  }
  std::uint64_t whole(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!non_negative_integer(v)) throw ValidationError(field(key), "must be a non-negative integer");
    return v.get<std::uint64_t>();
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ValidationError(field(key), "must be true or false");
    return v.get<bool>();
  }
  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ValidationError(field(key), "must be a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ValidationError(field(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<double> number_list(const json& v, const std::string& field) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) throw ValidationError(field, "list entries must be numbers");
      out.push_back(x.get<double>());
    }
  } else {
    throw ValidationError(field, "must be a number or a list of numbers");
  }
  if (out.empty()) throw ValidationError(field, "list is empty");
  return out;
}

std::vector<double> grid_spec(const json& v, const std::string& field) {
  if (v.is_object()) {
    Reader r(v, field);
    const double start = r.positive("start", 0.0);
    const double stop = r.positive("stop", 0.0);
    const double step = r.positive("step", 0.0);
    r.finish();
    if (stop < start) throw ValidationError(field + ".stop", "must not be below start");
    return make_grid(start, stop, step);
  }
  return number_list(v, field);
}

Pixel pixel_spec(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2 || !non_negative_integer(v[0]) || !non_negative_integer(v[1]))
    throw ValidationError(field, "must be [row, col]");
  return {v[0].get<std::size_t>(), v[1].get<std::size_t>()};
}

void check_coherence(const std::vector<double>& c, const std::string& field, std::size_t expected) {
  if (c.size() != 1 && c.size() != expected)
    throw ValidationError(field, "give one coherence or one per interferogram");
  for (double g : c)
    if (!(g > 0.0 && g <= 1.0)) throw ValidationError(field, "coherence must lie in (0, 1]");
}

RadarGeometry parse_geometry(const json& j) {
  Reader r(j, "geometry");
  RadarGeometry g = RadarGeometry::defaults();
  const bool has_f = r.has("frequency_ghz");
  const bool has_l = r.has("wavelength");
  if (has_f && has_l) throw ValidationError("geometry", "give frequency_ghz or wavelength, not both");
  if (has_f) g.wavelength = kSpeedOfLight / (r.positive("frequency_ghz", 9.6) * 1e9);
  if (has_l) g.wavelength = r.positive("wavelength", g.wavelength);
  g.slant_range = r.positive("slant_range", g.slant_range);
  if (r.has("incidence_deg")) g.incidence = r.number("incidence_deg", 30.0) * std::numbers::pi / 180.0;
  g.range_spacing = r.positive("range_spacing", g.range_spacing);
  g.azimuth_spacing = r.positive("azimuth_spacing", g.azimuth_spacing);
  g.azimuth_time_step = r.positive("azimuth_time_step", g.azimuth_spacing / 7000.0);
  r.finish();
  try {
    g.validate();
  } catch (const ValidationError& e) {
    throw ValidationError("geometry." + e.field(), e.message());
  }
  return g;
}

SceneSpec parse_scene(const json& j) {
  Reader r(j, "scene");
  SceneSpec s;
  s.generator = r.text("generator", s.generator);
  if (s.generator == "dem") {
    s.path = r.text("path", "");
    if (s.path.empty()) throw ValidationError("scene.path", "required for the dem generator");
    r.finish();
    return s;
  }
  s.rows = r.whole("rows", s.rows);
  s.cols = r.whole("cols", s.cols);
  if (s.rows < 2 || s.cols < 2) throw ValidationError("scene", "dimensions must be at least 2x2");
  if (s.generator == "ramp_blocks") {
    s.max_height = r.number("max_height", s.max_height);
    if (s.max_height < 0) throw ValidationError("scene.max_height", "must be non-negative");
    if (r.has("blocks")) {
      const json& b = r.at("blocks");
      if (!b.is_array()) throw ValidationError("scene.blocks", "must be a list");
      for (std::size_t i = 0; i < b.size(); ++i) {
        const std::string f = "scene.blocks[" + std::to_string(i) + "]";
        Reader br(b[i], f);
        Block blk;
        blk.row0 = br.whole("row0", 0);
        blk.col0 = br.whole("col0", 0);
        blk.rows = br.whole("rows", 0);
        blk.cols = br.whole("cols", 0);
        blk.height = br.number("height", 0.0);
        br.finish();
        if (blk.rows == 0 || blk.cols == 0 || blk.row0 + blk.rows > s.rows || blk.col0 + blk.cols > s.cols)
          throw ValidationError(f, "block outside the grid");
        s.blocks.push_back(blk);
      }
    }
  } else if (s.generator == "canopy") {
    s.mean_height = r.number("mean_height", s.mean_height);
    s.jitter_std = r.number("jitter_std", s.jitter_std);
    s.density = r.number("density", s.density);
    if (s.mean_height < 0) throw ValidationError("scene.mean_height", "must be non-negative");
    if (s.jitter_std < 0) throw ValidationError("scene.jitter_std", "must be non-negative");
    if (!(s.density > 0 && s.density <= 1)) throw ValidationError("scene.density", "must lie in (0, 1]");
  } else {
    throw ValidationError("scene.generator", "must be ramp_blocks, canopy or dem");
  }
  r.finish();
  return s;
}

BaselineConfiguration parse_configuration(const json& j) {
  Reader r(j, "configuration");
  BaselineConfiguration c;
  const auto mode = r.whole("mode", 2);
  if (mode < 1 || mode > 4) throw ValidationError("configuration.mode", "must be 1, 2, 3 or 4");
  c.mode = static_cast<BaselineMode>(mode);
  c.antenna_baseline = r.positive("antenna_baseline", 15.0);
  c.satellite_baseline = r.positive("satellite_baseline", 300.0);
  r.finish();
  return c;
}

std::vector<BaselineMode> parse_modes(const json& v) {
  if (!v.is_array() || v.empty()) throw ValidationError("design.modes", "must be a non-empty list");
  std::vector<BaselineMode> out;
  for (const auto& m : v) {
    if (!non_negative_integer(m) || m.get<int>() < 1 || m.get<int>() > 4)
      throw ValidationError("design.modes", "entries must be 1, 2, 3 or 4");
    out.push_back(static_cast<BaselineMode>(m.get<int>()));
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  Reader r(j, "");
  ExperimentConfig c;
  const std::string schema = r.text("schema", "");
  if (schema != kConfigSchema) throw ValidationError("schema", std::string("must be \"") + kConfigSchema + "\"");

  c.seed = r.whole("seed", 0);
  c.trials = r.whole("trials", c.trials);
  if (c.trials < 1) throw ValidationError("trials", "must be at least 1");
  c.threads = static_cast<unsigned>(r.whole("threads", 1));
  c.output_dir = r.text("output_dir", "");
  c.max_int = static_cast<int>(r.whole("max_int", 5));
  if (r.has("geometry")) c.geometry = parse_geometry(r.at("geometry"));
  if (r.has("scene")) c.scene = parse_scene(r.at("scene"));
  if (r.has("configuration")) c.configuration = parse_configuration(r.at("configuration"));
  if (r.has("coherence")) c.coherence = number_list(r.at("coherence"), "coherence");
  check_coherence(c.coherence, "coherence", 3);
  if (r.has("reference_pixel")) {
    c.reference_pixel = pixel_spec(r.at("reference_pixel"), "reference_pixel");
    if (c.scene.generator != "dem" && (c.reference_pixel->row >= c.scene.rows || c.reference_pixel->col >= c.scene.cols))
      throw ValidationError("reference_pixel", "outside the scene");
  }

  if (r.has("errors")) {
    Reader er(r.at("errors"), "errors");
    if (er.has("orbit")) {
      Reader o(er.at("orbit"), "errors.orbit");
      OrbitErrorParams p;
      p.delta_bc = o.number("delta_bc", 0.0);
      p.delta_bc_rate = o.number("delta_bc_rate", 0.0);
      p.delta_bn = o.number("delta_bn", 0.0);
      p.delta_bn_rate = o.number("delta_bn_rate", 0.0);
      o.finish();
      c.orbit = p;
    }
    if (er.has("atmosphere")) {
      Reader a(er.at("atmosphere"), "errors.atmosphere");
      AtmosphereSpec s;
      s.rms = a.number("rms", s.rms);
      if (s.rms < 0) throw ValidationError("errors.atmosphere.rms", "must be non-negative");
      s.exponent = a.positive("exponent", s.exponent);
      s.outer_scale = a.number("outer_scale", s.outer_scale);
      if (s.outer_scale < 0) throw ValidationError("errors.atmosphere.outer_scale", "must be non-negative");
      s.layer_height = a.positive("layer_height", s.layer_height);
      s.bistatic_path_delay = a.boolean("bistatic_path_delay", s.bistatic_path_delay);
      a.finish();
      c.atmosphere = s;
    }
    er.finish();
  }

  if (r.has("unwrap")) {
    Reader u(r.at("unwrap"), "unwrap");
    c.residual_window = u.whole("residual_window", c.residual_window);
    if (c.residual_window < 1) throw ValidationError("unwrap.residual_window", "must be at least 1");
    u.finish();
  }

  auto& d = c.design;
  d.settings.coherence = c.coherence;
  if (r.has("design")) {
    Reader dr(r.at("design"), "design");
    d.settings.alpha = dr.number("alpha", d.settings.alpha);
    d.settings.expected_height_precision = dr.positive("expected_height_precision", d.settings.expected_height_precision);
    d.settings.max_height_difference = dr.positive("max_height_difference", d.settings.max_height_difference);
    if (dr.has("antenna_grid")) d.settings.antenna_grid = grid_spec(dr.at("antenna_grid"), "design.antenna_grid");
    if (dr.has("satellite_grid")) d.settings.satellite_grid = grid_spec(dr.at("satellite_grid"), "design.satellite_grid");
    if (dr.has("modes")) d.modes = parse_modes(dr.at("modes"));
    d.settings.monte_carlo_top_k = dr.whole("monte_carlo_top_k", 0);
    if (dr.has("coherence_sweep")) {
      d.coherence_sweep = number_list(dr.at("coherence_sweep"), "design.coherence_sweep");
      for (double g : d.coherence_sweep)
        if (!(g > 0.0 && g <= 1.0)) throw ValidationError("design.coherence_sweep", "coherence must lie in (0, 1]");
    }
    d.simplified_comparison = dr.boolean("simplified_comparison", false);
    dr.finish();
  }
  d.settings.trials = c.trials;
  d.settings.seed = c.seed;
  d.settings.threads = c.threads;
  d.settings.max_int = c.max_int;
  try {
    d.settings.validate();
  } catch (const ValidationError& e) {
    throw ValidationError("design." + e.field(), e.message());
  }

  if (r.has("estimation")) {
    Reader e(r.at("estimation"), "estimation");
    const std::string mode = e.text("mode", "bistatic");
    if (mode == "bistatic") c.estimation.mode = EstimationMode::Bistatic;
    else if (mode == "monostatic") c.estimation.mode = EstimationMode::Monostatic;
    else throw ValidationError("estimation.mode", "must be bistatic or monostatic");
    c.estimation.compensate_orbit = e.boolean("compensate_orbit", true);
    c.estimation.histogram_bins = e.whole("histogram_bins", 20);
    if (c.estimation.histogram_bins < 1) throw ValidationError("estimation.histogram_bins", "must be at least 1");
    e.finish();
  }

  if (r.has("f_test")) {
    Reader f(r.at("f_test"), "f_test");
    FTestSpec s;
    s.var1 = f.positive("var1", 1.0);
    s.var2 = f.positive("var2", 1.0);
    if (f.has("critical")) s.critical = f.positive("critical", 1.0);
    f.finish();
    c.f_test = s;
  }
  r.finish();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  ExperimentConfig c = parse_config(io::read_json(path));
  c.base_dir = path.parent_path();
  return c;
}

HeightField build_scene(const ExperimentConfig& cfg) {
  const auto& s = cfg.scene;
  if (s.generator == "dem") {
    std::filesystem::path p = s.path;
    if (p.is_relative()) p = cfg.base_dir / p;
    return io::read_height_csv(p);
  }
  if (s.generator == "canopy")
    return canopy_scene(s.rows, s.cols, s.mean_height, s.jitter_std, s.density, derive_seed(cfg.seed, "scene"));
  return blocks_scene(ramp_scene(s.rows, s.cols, s.max_height), s.blocks);
}

SimulationOptions simulation_options(const ExperimentConfig& cfg, std::size_t rows, std::size_t cols) {
  SimulationOptions o;
  o.config = cfg.configuration;
  o.coherence = cfg.coherence;
  o.orbit = cfg.orbit;
  o.reference_pixel = cfg.reference_pixel;
  o.seed = cfg.seed;
  o.max_int = cfg.max_int;
  if (cfg.atmosphere) {
    const auto& a = *cfg.atmosphere;
    o.atmosphere = turbulence_screen(rows, cols, a.rms, a.exponent, a.outer_scale, derive_seed(cfg.seed, "atmosphere"));
    o.bistatic_path_delay = a.bistatic_path_delay;
    o.layer_height = a.layer_height;
  }
  return o;
}

}  // namespace tda::cli
