#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tda/design.hpp"
#include "tda/estimate.hpp"
#include "tda/geometry.hpp"
#include "tda/grid.hpp"
#include "tda/metrics.hpp"
#include "tda/scene.hpp"
#include "tda/simulate.hpp"
#include "tda/unwrap.hpp"

namespace tda::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

inline constexpr const char* kStackSchema = "tda-stack/1";
inline constexpr const char* kUnwrapSchema = "tda-unwrap/1";

// Shortest representation that parses back to the same double; "nan" for NaN.
std::string format_double(double v);

// Grid CSV: a header line of keys, a line of values (rows and cols first), then
// one line of comma-separated values per grid row. NaN marks masked-out cells.
struct GridFile {
  fs::path path;
  Grid<double> grid;
  std::map<std::string, std::string> meta;
  double number(const std::string& key) const;
  const std::string& text(const std::string& key) const;
};

using Meta = std::vector<std::pair<std::string, std::string>>;

void write_grid_csv(const fs::path& path, const Grid<double>& grid, const Meta& meta);
GridFile read_grid_csv(const fs::path& path);

Mask mask_from_grid(const Grid<double>& grid);

// Heights with NaN outside the mask; cell sizes from the geometry.
void write_height_csv(const fs::path& path, const HeightField& field, const RadarGeometry& g);
HeightField read_height_csv(const fs::path& path);

json geometry_to_json(const RadarGeometry& g);
RadarGeometry geometry_from_json(const json& j);

struct StackFiles {
  InterferogramStack stack;
  std::uint64_t seed = 0;
  json extra;  // configuration and other free-form manifest fields
  std::optional<fs::path> truth;
};

// Writes ifg_<k>.csv per member plus manifest.json.
void write_stack(const fs::path& dir, const InterferogramStack& stack, std::uint64_t seed, const json& extra,
                 const std::optional<fs::path>& truth_file = std::nullopt);
StackFiles read_stack(const fs::path& manifest);

struct UnwrapFiles {
  UnwrappedStack stack;
  RadarGeometry geometry;
  json summary;
};

json link_to_json(const LinkReport& l);
void write_unwrapped(const fs::path& dir, const InterferogramStack& stack, const AsymptoticResult& result,
                     const json& extra);
UnwrapFiles read_unwrapped(const fs::path& summary);

void write_design_csv(const fs::path& path, const std::vector<DesignReport>& reports);
json design_point_to_json(const DesignPoint& p);
void write_sweep_csv(const fs::path& path, const std::vector<SweepRow>& rows);

json orbit_to_json(const OrbitErrorParams& o);
json accuracy_to_json(const AccuracyReport& r);
void write_histogram_csv(const fs::path& path, const std::vector<HistogramBin>& bins);

void write_json(const fs::path& path, const json& j);
json read_json(const fs::path& path);

}  // namespace tda::io
