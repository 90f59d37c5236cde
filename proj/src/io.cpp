#include "tda/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "tda/errors.hpp"

namespace tda::io {

namespace {

[[noreturn]] void format_error(const fs::path& path, std::size_t line, const std::string& what) {
  throw ValidationError(path.string(), "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(',', start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "nan" || s == "NaN" || s == "NAN") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ComputationError("cannot write " + path.string());
  return f;
}

std::size_t to_size(const GridFile& f, const std::string& key) {
  const double v = f.number(key);
  if (!(v >= 0.0) || v != std::floor(v)) throw ValidationError(f.path.string(), key + " must be a whole number");
  return static_cast<std::size_t>(v);
}

json get(const json& j, const char* key, const fs::path& path) {
  if (!j.contains(key)) throw ValidationError(path.string(), std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double GridFile::number(const std::string& key) const {
  const auto v = parse_double(text(key));
  if (!v) throw ValidationError(path.string(), "header field '" + key + "' is not a number");
  return *v;
}

const std::string& GridFile::text(const std::string& key) const {
  const auto it = meta.find(key);
  if (it == meta.end()) throw ValidationError(path.string(), "missing header field '" + key + "'");
  return it->second;
}

void write_grid_csv(const fs::path& path, const Grid<double>& grid, const Meta& meta) {
  auto f = open_out(path);
  f << "rows,cols";
  for (const auto& [k, v] : meta) f << ',' << k;
  f << '\n' << grid.rows << ',' << grid.cols;
  for (const auto& [k, v] : meta) f << ',' << v;
  f << '\n';
  for (std::size_t r = 0; r < grid.rows; ++r) {
    for (std::size_t c = 0; c < grid.cols; ++c) {
      if (c) f << ',';
      f << format_double(grid(r, c));
    }
    f << '\n';
  }
  if (!f) throw ComputationError("failed writing " + path.string());
}

GridFile read_grid_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string(), "cannot open file");
  GridFile out;
  out.path = path;
  std::string keys, values;
  if (!std::getline(in, keys)) format_error(path, 1, "missing header line");
  if (!std::getline(in, values)) format_error(path, 2, "missing header values");
  if (!keys.empty() && keys.back() == '\r') keys.pop_back();
  if (!values.empty() && values.back() == '\r') values.pop_back();
  const auto k = split(keys);
  const auto v = split(values);
  if (k.size() != v.size()) format_error(path, 2, "header has " + std::to_string(k.size()) + " keys but " +
                                                      std::to_string(v.size()) + " values");
  for (std::size_t i = 0; i < k.size(); ++i) out.meta[std::string(k[i])] = std::string(v[i]);
  const std::size_t rows = to_size(out, "rows");
  const std::size_t cols = to_size(out, "cols");
  if (rows == 0 || cols == 0) format_error(path, 2, "empty grid");
  out.grid = Grid<double>(rows, cols);
  std::string line;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t line_no = r + 3;
    if (!std::getline(in, line)) format_error(path, line_no, "expected " + std::to_string(rows) + " data rows");
    const auto cells = split(line);
    if (cells.size() != cols)
      format_error(path, line_no, "expected " + std::to_string(cols) + " values, found " + std::to_string(cells.size()));
    for (std::size_t c = 0; c < cols; ++c) {
      const auto d = parse_double(cells[c]);
      if (!d) format_error(path, line_no, "column " + std::to_string(c + 1) + " is not a number");
      out.grid(r, c) = *d;
    }
  }
  while (std::getline(in, line))
    if (!line.empty() && line != "\r") format_error(path, rows + 3, "unexpected data after the last row");
  return out;
}

Mask mask_from_grid(const Grid<double>& grid) {
  Mask m(grid.rows, grid.cols, 0);
  for (std::size_t i = 0; i < grid.size(); ++i) m.data[i] = std::isnan(grid.data[i]) ? 0 : 1;
  return m;
}

void write_height_csv(const fs::path& path, const HeightField& field, const RadarGeometry& g) {
  Grid<double> out = field.heights;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!field.mask.data[i]) out.data[i] = std::numeric_limits<double>::quiet_NaN();
  write_grid_csv(path, out, {{"range_spacing", format_double(g.range_spacing)},
                             {"azimuth_spacing", format_double(g.azimuth_spacing)}});
}

HeightField read_height_csv(const fs::path& path) {
  GridFile f = read_grid_csv(path);
  HeightField h;
  h.mask = mask_from_grid(f.grid);
  h.heights = std::move(f.grid);
  for (std::size_t i = 0; i < h.heights.size(); ++i)
    if (!h.mask.data[i]) h.heights.data[i] = 0.0;
  return h;
}

json geometry_to_json(const RadarGeometry& g) {
  return {{"wavelength", g.wavelength},         {"slant_range", g.slant_range},
          {"incidence", g.incidence},           {"range_spacing", g.range_spacing},
          {"azimuth_spacing", g.azimuth_spacing}, {"azimuth_time_step", g.azimuth_time_step}};
}

RadarGeometry geometry_from_json(const json& j) {
  RadarGeometry g;
  try {
    g.wavelength = j.at("wavelength").get<double>();
    g.slant_range = j.at("slant_range").get<double>();
    g.incidence = j.at("incidence").get<double>();
    g.range_spacing = j.at("range_spacing").get<double>();
    g.azimuth_spacing = j.at("azimuth_spacing").get<double>();
    g.azimuth_time_step = j.at("azimuth_time_step").get<double>();
  } catch (const json::exception& e) {
    throw ValidationError("geometry", e.what());
  }
  g.validate();
  return g;
}

void write_json(const fs::path& path, const json& j) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string(), "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string(), std::string("invalid JSON: ") + e.what());
  }
}

void write_stack(const fs::path& dir, const InterferogramStack& stack, std::uint64_t seed, const json& extra,
                 const std::optional<fs::path>& truth_file) {
  fs::create_directories(dir);
  json members = json::array();
  for (std::size_t k = 0; k < stack.interferograms.size(); ++k) {
    const auto& ifg = stack.interferograms[k];
    const std::string name = "ifg_" + std::to_string(k) + ".csv";
    write_grid_csv(dir / name, ifg.wrapped_phase,
                   {{"b_perp", format_double(ifg.b_perp)},
                    {"coherence", format_double(ifg.coherence)},
                    {"kind", std::string(kind_name(ifg.kind))}});
    members.push_back({{"file", name},
                       {"b_perp", ifg.b_perp},
                       {"coherence", ifg.coherence},
                       {"kind", std::string(kind_name(ifg.kind))}});
  }
  json manifest = {{"schema", kStackSchema},
                   {"seed", seed},
                   {"geometry", geometry_to_json(stack.geometry)},
                   {"reference_pixel", {stack.reference_pixel.row, stack.reference_pixel.col}},
                   {"members", members}};
  if (truth_file) manifest["truth"] = truth_file->string();
  if (!extra.is_null()) manifest["extra"] = extra;
  write_json(dir / "manifest.json", manifest);
}

StackFiles read_stack(const fs::path& manifest_path) {
  const json m = read_json(manifest_path);
  if (m.value("schema", "") != kStackSchema)
    throw ValidationError(manifest_path.string(), "schema must be '" + std::string(kStackSchema) + "'");
  const fs::path base = manifest_path.parent_path();
  StackFiles out;
  try {
    out.seed = get(m, "seed", manifest_path).get<std::uint64_t>();
    out.stack.geometry = geometry_from_json(get(m, "geometry", manifest_path));
    const json ref = get(m, "reference_pixel", manifest_path);
    out.stack.reference_pixel = {ref.at(0).get<std::size_t>(), ref.at(1).get<std::size_t>()};
    if (m.contains("truth")) out.truth = base / m.at("truth").get<std::string>();
    if (m.contains("extra")) out.extra = m.at("extra");
    const json members = get(m, "members", manifest_path);
    if (!members.is_array() || members.empty()) throw ValidationError(manifest_path.string(), "no members");
    for (std::size_t k = 0; k < members.size(); ++k) {
      const json& mem = members[k];
      const fs::path file = base / mem.at("file").get<std::string>();
      GridFile g = read_grid_csv(file);
      Interferogram ifg;
      ifg.b_perp = mem.at("b_perp").get<double>();
      ifg.coherence = mem.at("coherence").get<double>();
      ifg.kind = kind_from_name(mem.at("kind").get<std::string>());
      if (g.number("b_perp") != ifg.b_perp) throw ValidationError(file.string(), "b_perp differs from the manifest");
      ifg.wrapped_phase = std::move(g.grid);
      if (k == 0) {
        out.stack.mask = mask_from_grid(ifg.wrapped_phase);
      } else if (!ifg.wrapped_phase.same_shape(out.stack.mask)) {
        throw ValidationError(file.string(), "grid dimensions " + std::to_string(ifg.wrapped_phase.rows) + "x" +
                                                 std::to_string(ifg.wrapped_phase.cols) + " differ from the first member");
      } else if (mask_from_grid(ifg.wrapped_phase).data != out.stack.mask.data) {
        throw ValidationError(file.string(), "masked cells differ from the first member");
      }
      ifg.azimuth_time.resize(ifg.wrapped_phase.rows);
      for (std::size_t r = 0; r < ifg.azimuth_time.size(); ++r)
        ifg.azimuth_time[r] = out.stack.geometry.azimuth_time(r, ifg.wrapped_phase.rows);
      out.stack.interferograms.push_back(std::move(ifg));
    }
  } catch (const json::exception& e) {
    throw ValidationError(manifest_path.string(), e.what());
  }
  out.stack.validate();
  return out;
}

json link_to_json(const LinkReport& l) {
  return {{"b_lower", l.b_lower},
          {"b_higher", l.b_higher},
          {"residual_std", l.residual_std},
          {"failure_fraction", l.failure_fraction},
          {"residue_count", l.residue_count}};
}

void write_unwrapped(const fs::path& dir, const InterferogramStack& stack, const AsymptoticResult& result,
                     const json& extra) {
  fs::create_directories(dir);
  auto meta = [&](const UnwrappedField& f, double b, const std::string& kind, double coherence) {
    return Meta{{"b_perp", format_double(b)},
                {"coherence", format_double(coherence)},
                {"kind", kind},
                {"reference_row", std::to_string(f.reference_pixel.row)},
                {"reference_col", std::to_string(f.reference_pixel.col)},
                {"residue_count", std::to_string(f.residue_count)}};
  };
  json fields = json::array();
  for (std::size_t k = 0; k < result.fields.size(); ++k) {
    const auto& ifg = stack.interferograms[k];
    const std::string name = "unwrapped_" + std::to_string(k) + ".csv";
    write_grid_csv(dir / name, result.fields[k].phase, meta(result.fields[k], ifg.b_perp,
                                                            std::string(kind_name(ifg.kind)), ifg.coherence));
    fields.push_back({{"file", name},
                      {"b_perp", ifg.b_perp},
                      {"coherence", ifg.coherence},
                      {"kind", std::string(kind_name(ifg.kind))},
                      {"residue_count", result.fields[k].residue_count}});
  }
  write_grid_csv(dir / "short_baseline.csv", result.short_baseline.phase,
                 meta(result.short_baseline, result.b1, "combined", 0.0));
  json links = json::array();
  for (const auto& l : result.links) links.push_back(link_to_json(l));
  json summary = {{"schema", kUnwrapSchema},
                  {"geometry", geometry_to_json(stack.geometry)},
                  {"reference_pixel", {stack.reference_pixel.row, stack.reference_pixel.col}},
                  {"b1", result.b1},
                  {"short_baseline", {{"file", "short_baseline.csv"},
                                      {"residue_count", result.short_baseline.residue_count}}},
                  {"links", links},
                  {"success_rate", result.success_rate()},
                  {"fields", fields}};
  if (!extra.is_null()) summary["extra"] = extra;
  write_json(dir / "unwrap_summary.json", summary);
}

UnwrapFiles read_unwrapped(const fs::path& summary_path) {
  UnwrapFiles out;
  out.summary = read_json(summary_path);
  const json& s = out.summary;
  if (s.value("schema", "") != kUnwrapSchema)
    throw ValidationError(summary_path.string(), "schema must be '" + std::string(kUnwrapSchema) + "'");
  const fs::path base = summary_path.parent_path();
  try {
    out.geometry = geometry_from_json(get(s, "geometry", summary_path));
    const json ref = get(s, "reference_pixel", summary_path);
    out.stack.reference_pixel = {ref.at(0).get<std::size_t>(), ref.at(1).get<std::size_t>()};
    for (const json& f : get(s, "fields", summary_path)) {
      const fs::path file = base / f.at("file").get<std::string>();
      GridFile g = read_grid_csv(file);
      UnwrappedField u;
      u.mask = mask_from_grid(g.grid);
      u.flagged = Mask(u.mask.rows, u.mask.cols, 0);
      u.phase = std::move(g.grid);
      u.reference_pixel = out.stack.reference_pixel;
      u.residue_count = f.value("residue_count", std::size_t{0});
      if (out.stack.fields.empty()) {
        out.stack.mask = u.mask;
      } else if (!u.phase.same_shape(out.stack.mask)) {
        throw ValidationError(file.string(), "grid dimensions differ from the first field");
      }
      out.stack.fields.push_back(std::move(u));
      out.stack.b_perp.push_back(f.at("b_perp").get<double>());
      out.stack.coherence.push_back(f.at("coherence").get<double>());
      out.stack.kinds.push_back(kind_from_name(f.at("kind").get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw ValidationError(summary_path.string(), e.what());
  }
  out.stack.validate();
  return out;
}

void write_design_csv(const fs::path& path, const std::vector<DesignReport>& reports) {
  auto f = open_out(path);
  f << "l1,l2,mode,sr_analytic,sr_empirical,sigma_h,h_amb,feasible,binding_link\n";
  for (const auto& r : reports)
    for (const auto& p : r.points) {
      f << format_double(p.l1) << ',' << format_double(p.l2) << ',' << static_cast<int>(p.mode) << ','
        << format_double(p.sr_analytic) << ',' << (p.sr_empirical ? format_double(*p.sr_empirical) : "") << ','
        << format_double(p.sigma_h) << ',' << format_double(p.h_amb) << ',' << (p.feasible ? 1 : 0) << ','
        << p.binding_link << '\n';
    }
}

json design_point_to_json(const DesignPoint& p) {
  json j = {{"l1", p.l1},           {"l2", p.l2},        {"mode", static_cast<int>(p.mode)},
            {"sr_analytic", p.sr_analytic}, {"sigma_h", p.sigma_h}, {"h_amb", p.h_amb},
            {"b1", p.b1},           {"feasible", p.feasible}, {"binding_link", p.binding_link}};
  j["sr_empirical"] = p.sr_empirical ? json(*p.sr_empirical) : json(nullptr);
  return j;
}

void write_sweep_csv(const fs::path& path, const std::vector<SweepRow>& rows) {
  auto f = open_out(path);
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  f << "system,mode,gamma,max_satellite_baseline,min_antenna_baseline,best_sigma_h\n";
  for (const auto& r : rows)
    f << (r.variant == SystemVariant::Full ? "full" : "simplified") << ',' << static_cast<int>(r.mode) << ','
      << format_double(r.gamma) << ',' << opt(r.max_satellite_baseline) << ',' << opt(r.min_antenna_baseline) << ','
      << opt(r.best_sigma_h) << '\n';
}

json orbit_to_json(const OrbitErrorParams& o) {
  return {{"delta_bc", o.delta_bc},
          {"delta_bc_rate", o.delta_bc_rate},
          {"delta_bn", o.delta_bn},
          {"delta_bn_rate", o.delta_bn_rate}};
}

json accuracy_to_json(const AccuracyReport& r) {
  return {{"mean_error", r.mean_error}, {"rmse", r.rmse},       {"std", r.std},
          {"coverage", r.coverage},     {"matched", r.matched}, {"bins", r.histogram.size()}};
}

void write_histogram_csv(const fs::path& path, const std::vector<HistogramBin>& bins) {
  auto f = open_out(path);
  f << "bin_left,bin_right,count\n";
  for (const auto& b : bins) f << format_double(b.left) << ',' << format_double(b.right) << ',' << b.count << '\n';
}

}  // namespace tda::io
