#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "json.hpp"
#include "tda/config.hpp"
#include "tda/design.hpp"
#include "tda/errors.hpp"
#include "tda/estimate.hpp"
#include "tda/io.hpp"
#include "tda/metrics.hpp"
#include "tda/parallel.hpp"
#include "tda/simulate.hpp"
#include "tda/unwrap.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<unsigned> threads;
};

// Without --config every section takes its default.
tda::cli::ExperimentConfig load(const Common& c) {
  tda::cli::ExperimentConfig cfg;
  if (!c.config.empty()) cfg = tda::cli::load_config(c.config);
  if (c.seed) cfg.seed = cfg.design.settings.seed = *c.seed;
  if (c.trials) {
    if (*c.trials < 1) throw tda::ValidationError("--trials", "must be at least 1");
    cfg.trials = cfg.design.settings.trials = *c.trials;
  }
  if (c.threads) cfg.threads = cfg.design.settings.threads = *c.threads;
  cfg.threads = cfg.design.settings.threads = tda::resolve_threads(cfg.threads);
  return cfg;
}

fs::path out_dir(const Common& c, const tda::cli::ExperimentConfig& cfg) {
  fs::path p = c.out;
  if (c.out == "." && !cfg.output_dir.empty()) p = cfg.output_dir;
  fs::create_directories(p);
  return p;
}

json config_echo(const tda::cli::ExperimentConfig& cfg) {
  return {{"mode", static_cast<int>(cfg.configuration.mode)},
          {"antenna_baseline", cfg.configuration.antenna_baseline},
          {"satellite_baseline", cfg.configuration.satellite_baseline},
          {"residual_window", cfg.residual_window},
          {"max_int", cfg.max_int}};
}

int cmd_simulate(const Common& c) {
  const auto cfg = load(c);
  const tda::HeightField scene = tda::cli::build_scene(cfg);
  const auto opt = tda::cli::simulation_options(cfg, scene.heights.rows, scene.heights.cols);
  const auto sim = tda::simulate_stack(scene, cfg.geometry, opt);
  const fs::path dir = out_dir(c, cfg);
  tda::io::write_height_csv(dir / "truth.csv", scene, cfg.geometry);
  tda::io::write_stack(dir, sim.stack, cfg.seed, config_echo(cfg), fs::path("truth.csv"));
  for (const auto& w : sim.warnings) std::cerr << "warning: " << w << "\n";
  json summary = {{"manifest", (dir / "manifest.json").string()},
                  {"b_perp", sim.stack.baselines()},
                  {"max_height_difference", sim.max_height_difference},
                  {"b1", sim.b1},
                  {"h_amb_b1", sim.h_amb_b1},
                  {"phase_continuity_ok", sim.max_height_difference < sim.h_amb_b1}};
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_unwrap(const Common& c, const std::string& manifest) {
  const auto cfg = load(c);
  if (manifest.empty()) throw tda::ValidationError("--manifest", "required for unwrap");
  const auto files = tda::io::read_stack(manifest);
  const auto b = files.stack.baselines();
  int max_int = cfg.max_int;
  if (files.extra.is_object() && files.extra.contains("max_int") && c.config.empty())
    max_int = files.extra.at("max_int").get<int>();
  std::size_t window = cfg.residual_window;
  if (files.extra.is_object() && files.extra.contains("residual_window") && c.config.empty())
    window = files.extra.at("residual_window").get<std::size_t>();
  const auto set = tda::effective_baselines(b, max_int);
  tda::BootstrapOptions bo;
  bo.residual_window = window;
  const auto result = tda::asymptotic_unwrap(files.stack, set, bo);
  json extra = files.extra.is_null() ? json::object() : files.extra;
  if (files.truth) extra["truth"] = fs::absolute(*files.truth).string();
  const fs::path dir = out_dir(c, cfg);
  tda::io::write_unwrapped(dir, files.stack, result, extra);
  std::cout << json{{"summary", (dir / "unwrap_summary.json").string()},
                    {"success_rate", result.success_rate()},
                    {"b1", result.b1}}
                   .dump()
            << "\n";
  return 0;
}

int cmd_design(const Common& c) {
  const auto cfg = load(c);
  const auto& d = cfg.design;
  const fs::path dir = out_dir(c, cfg);
  std::vector<tda::DesignReport> reports;
  json selected = json::array();
  for (auto mode : d.modes) {
    reports.push_back(tda::optimize(cfg.geometry, d.settings, mode));
    const auto& r = reports.back();
    json s = {{"mode", static_cast<int>(mode)}, {"reason", r.reason}};
    s["selected"] = r.selected ? tda::io::design_point_to_json(r.points[*r.selected]) : json(nullptr);
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    s["max_feasible_l2"] = opt(r.max_feasible_l2());
    s["min_feasible_l1"] = opt(r.min_feasible_l1());
    s["best_sigma_h"] = opt(r.best_sigma_h());
    selected.push_back(s);
  }
  tda::io::write_design_csv(dir / "design.csv", reports);
  json out = {{"seed", cfg.seed}, {"trials", cfg.trials}, {"modes", selected}};
  if (!d.coherence_sweep.empty()) {
    tda::io::write_sweep_csv(dir / "coherence_sweep.csv",
                             tda::coherence_sweep(cfg.geometry, d.settings, d.modes, d.coherence_sweep));
    out["coherence_sweep"] = "coherence_sweep.csv";
  }
  if (d.simplified_comparison) {
    const std::vector<double> gammas = d.coherence_sweep.empty() ? cfg.coherence : d.coherence_sweep;
    const auto cmp = tda::simplified_system_sweep(cfg.geometry, d.settings, gammas);
    auto rows = cmp.full;
    rows.insert(rows.end(), cmp.simplified.begin(), cmp.simplified.end());
    tda::io::write_sweep_csv(dir / "simplified_comparison.csv", rows);
    out["simplified_comparison"] = "simplified_comparison.csv";
  }
  tda::io::write_json(dir / "design_selected.json", out);
  std::cout << out.dump() << "\n";
  return 0;
}

json accuracy_outputs(const fs::path& dir, const tda::HeightField& est, const tda::HeightField& truth,
                      tda::Pixel ref, std::size_t bins) {
  tda::CompareOptions co;
  co.reference = ref;
  co.bins = bins;
  const auto acc = tda::compare(est, truth, co);
  tda::io::write_histogram_csv(dir / "histogram.csv", acc.histogram);
  return tda::io::accuracy_to_json(acc);
}

int cmd_estimate(const Common& c, const std::string& summary, std::string truth, const std::string& mode_flag) {
  const auto cfg = load(c);
  if (summary.empty()) throw tda::ValidationError("--summary", "required for estimate");
  const auto files = tda::io::read_unwrapped(summary);
  tda::EstimationMode mode = cfg.estimation.mode;
  if (mode_flag == "bistatic") mode = tda::EstimationMode::Bistatic;
  else if (mode_flag == "monostatic") mode = tda::EstimationMode::Monostatic;
  else if (mode_flag != "heights-only" && !mode_flag.empty())
    throw tda::ValidationError("--mode", "must be bistatic, monostatic or heights-only");

  tda::EstimateResult res;
  json meta;
  if (mode_flag == "heights-only" || !cfg.estimation.compensate_orbit) {
    res = tda::estimate_heights_only(files.stack, files.geometry);
    meta["method"] = "heights_only";
  } else {
    const auto model = tda::build_joint_model(files.stack, files.geometry, mode);
    res = tda::solve_joint(model);
    meta["method"] = mode == tda::EstimationMode::Monostatic ? "joint_monostatic" : "joint_bistatic";
  }
  const fs::path dir = out_dir(c, cfg);
  tda::io::write_height_csv(dir / "heights.csv", res.heights, files.geometry);
  tda::HeightField sd;
  sd.heights = res.posterior_height_std;
  sd.mask = res.heights.mask;
  tda::io::write_height_csv(dir / "posterior_std.csv", sd, files.geometry);
  meta["orbit"] = tda::io::orbit_to_json(res.orbit);
  meta["residual_rms"] = res.residual_rms;
  meta["condition_indicator"] = res.condition_indicator;
  if (res.delays) {
    tda::io::write_grid_csv(dir / "delays.csv", *res.delays, {});
    meta["delays"] = "delays.csv";
  }
  if (truth.empty() && files.summary.contains("extra") && files.summary["extra"].contains("truth"))
    truth = files.summary["extra"]["truth"].get<std::string>();
  if (!truth.empty()) {
    const auto t = tda::io::read_height_csv(truth);
    meta["accuracy"] = accuracy_outputs(dir, res.heights, t, files.stack.reference_pixel,
                                        cfg.estimation.histogram_bins);
  }
  tda::io::write_json(dir / "estimate.json", meta);
  std::cout << meta.dump() << "\n";
  return 0;
}

int cmd_report(const Common& c, const std::string& estimate, const std::string& truth) {
  const auto cfg = load(c);
  const fs::path dir = out_dir(c, cfg);
  json out = json::object();
  if (!estimate.empty() || !truth.empty()) {
    if (estimate.empty() || truth.empty())
      throw tda::ValidationError(estimate.empty() ? "--estimate" : "--truth", "report needs both --estimate and --truth");
    const auto e = tda::io::read_height_csv(estimate);
    const auto t = tda::io::read_height_csv(truth);
    tda::Pixel ref = cfg.reference_pixel ? *cfg.reference_pixel : tda::default_reference_pixel(t.mask);
    out["accuracy"] = accuracy_outputs(dir, e, t, ref, cfg.estimation.histogram_bins);
  }
  if (cfg.f_test) {
    const auto f = tda::f_test(cfg.f_test->var1, cfg.f_test->var2, cfg.f_test->critical);
    json fj = {{"f0", f.f0}};
    fj["critical_value"] = f.critical_value ? json(*f.critical_value) : json(nullptr);
    fj["reject"] = f.reject ? json(*f.reject) : json(nullptr);
    out["f_test"] = fj;
  }
  if (out.empty()) throw tda::ValidationError("report", "nothing to report: give --estimate/--truth or an f_test section");
  tda::io::write_json(dir / "report.json", out);
  std::cout << out.dump() << "\n";
  return 0;
}

int fail(int code, const std::string& kind, const std::string& field, const std::string& message) {
  json j = {{"error", kind}, {"message", message}};
  if (!field.empty()) j["field"] = field;
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-baseline single-pass InSAR simulation, unwrapping, design and estimation"};
  app.require_subcommand(1);
  Common c;
  std::string manifest, summary, truth, estimate, mode;

  auto add_common = [&](CLI::App* s) {
    s->add_option("--config", c.config, "experiment configuration (JSON)");
    s->add_option("--out", c.out, "output directory");
    s->add_option("--seed", c.seed, "root seed, overrides the configuration");
    s->add_option("--trials", c.trials, "Monte Carlo trials");
    s->add_option("--threads", c.threads, "worker threads, 0 = all cores");
  };
  auto* sim = app.add_subcommand("simulate", "simulate an interferogram stack");
  add_common(sim);
  auto* unw = app.add_subcommand("unwrap", "asymptotic 3D unwrapping of a stack");
  add_common(unw);
  unw->add_option("--manifest", manifest, "stack manifest.json")->required();
  auto* des = app.add_subcommand("design", "baseline design sweep");
  add_common(des);
  auto* est = app.add_subcommand("estimate", "height estimation from unwrapped phases");
  add_common(est);
  est->add_option("--summary", summary, "unwrap_summary.json")->required();
  est->add_option("--truth", truth, "truth heights CSV");
  est->add_option("--mode", mode, "bistatic | monostatic | heights-only");
  auto* rep = app.add_subcommand("report", "accuracy report and F-test");
  add_common(rep);
  rep->add_option("--estimate", estimate, "estimated heights CSV");
  rep->add_option("--truth", truth, "truth heights CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(1, "validation", "arguments", e.what());
  }

  try {
    if (*sim) return cmd_simulate(c);
    if (*unw) return cmd_unwrap(c, manifest);
    if (*des) return cmd_design(c);
    if (*est) return cmd_estimate(c, summary, truth, mode);
    if (*rep) return cmd_report(c, estimate, truth);
  } catch (const tda::ValidationError& e) {
    return fail(1, "validation", e.field(), e.message());
  } catch (const nlohmann::json::exception& e) {
    return fail(1, "validation", "json", e.what());
  } catch (const tda::ComputationError& e) {
    return fail(2, "computation", "", e.what());
  } catch (const std::exception& e) {
    return fail(2, "computation", "", e.what());
  }
  return 0;
}
