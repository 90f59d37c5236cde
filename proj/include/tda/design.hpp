#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tda/geometry.hpp"

namespace tda {

// Inclusive arithmetic grid start, start + step, ..., up to stop (within step/1000).
std::vector<double> make_grid(double start, double stop, double step);

struct DesignSettings {
  double alpha = 0.02;
  std::vector<double> coherence{0.99};     // shared value or one per physical interferogram
  double expected_height_precision = 1.0;  // sigma_h0, m
  double max_height_difference = 100.0;    // m
  std::vector<double> antenna_grid = make_grid(0.5, 20.0, 0.1);
  std::vector<double> satellite_grid = make_grid(10.0, 400.0, 2.0);
  std::size_t trials = 500;
  std::uint64_t seed = 0;
  int max_int = 5;
  unsigned threads = 1;
  std::size_t monte_carlo_top_k = 0;
  void validate() const;
};

// Full tandem system, or the three-channel system (T1-R1, T2-R2, T2-R4) that
// only records the two longer bi-static pairs.
enum class SystemVariant { Full, Simplified };

struct PhysicalChain {
  std::vector<double> baselines;  // ascending
  std::vector<InterferogramKind> kinds;
};

PhysicalChain physical_chain(SystemVariant variant, BaselineMode mode, double l1, double l2);

struct SuCheck {
  bool pass = true;
  std::size_t binding_link = 0;  // link i joins chain elements i-1 and i (1-based)
  double max_variance = 0.0;
  double threshold = 0.0;        // (pi / u_alpha)^2
};

// Chained variance (B_i/B_{i-1})^2 s_{i-1}^2 + s_i^2 must stay strictly below the threshold.
SuCheck su_check(std::span<const double> effective, std::span<const double> sigma, double alpha);
SuCheck su_check(const BaselineSet& set, std::span<const double> sigma, double alpha);

// SR = 2 Phi(z) - 1 with z = min over links of pi / sigma_chain.
double analytic_success_rate(std::span<const double> effective, std::span<const double> sigma,
                             std::size_t* binding_link = nullptr);
double analytic_success_rate(const BaselineSet& set, std::span<const double> sigma,
                             std::size_t* binding_link = nullptr);

double predicted_height_precision(const RadarGeometry& g, double b4, double sigma_l);

struct ChainMonteCarlo {
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::vector<std::size_t> link_attempts;   // trials whose earlier links all succeeded
  std::vector<std::size_t> link_successes;
  std::vector<double> element_height_std;   // m, per chain element, over successful trials
  double success_rate() const { return trials ? double(successes) / double(trials) : 0.0; }
  double link_success_rate(std::size_t link) const;  // 1-based
};

// Single-pixel chain trials: noise is drawn per physical interferogram, a
// combined B1 inherits the differenced noise, and the ambiguity is bootstrapped
// up the chain. The reference is noise-free. Truth heights are uniform in
// [0, height_span].
ChainMonteCarlo run_chain_monte_carlo(const RadarGeometry& g, const BaselineSet& set,
                                      std::span<const double> physical_sigma, std::size_t trials,
                                      std::uint64_t seed, double height_span = 100.0, unsigned threads = 1);

struct MonteCarloResult {
  double sr_empirical = 0.0;
  double sigma_h_empirical = 0.0;  // final (longest-baseline) height std
  ChainMonteCarlo chain;
  BaselineSet baselines;
};

MonteCarloResult monte_carlo_success_rate(const RadarGeometry& g, const BaselineConfiguration& cfg, double gamma,
                                          std::size_t trials, std::uint64_t seed, int max_int = 5,
                                          unsigned threads = 1);

struct DesignPoint {
  double l1 = 0.0;
  double l2 = 0.0;
  BaselineMode mode = BaselineMode::Config2;
  double sr_analytic = 0.0;
  std::optional<double> sr_empirical;
  double sigma_h = 0.0;
  double h_amb = 0.0;
  double b1 = 0.0;
  bool feasible = false;
  std::size_t binding_link = 0;
  std::string note;  // set when the cell cannot form a baseline chain
};

DesignPoint evaluate_design_point(const RadarGeometry& g, const DesignSettings& s, BaselineMode mode, double l1,
                                  double l2, SystemVariant variant = SystemVariant::Full);

// Strict preference: feasible, larger h_amb, smaller sigma_h, larger SR, then
// smaller (l1, l2). A total order, so the pick does not depend on grid order.
bool preferred(const DesignPoint& a, const DesignPoint& b);

struct DesignReport {
  BaselineMode mode = BaselineMode::Config2;
  SystemVariant variant = SystemVariant::Full;
  std::vector<DesignPoint> points;  // antenna-major over the grids
  std::optional<std::size_t> selected;
  std::string reason;
  std::optional<double> max_feasible_l2() const;
  std::optional<double> min_feasible_l1() const;
  std::optional<double> best_sigma_h() const;
};

DesignReport optimize(const RadarGeometry& g, const DesignSettings& s, BaselineMode mode,
                      SystemVariant variant = SystemVariant::Full);

struct SweepRow {
  BaselineMode mode = BaselineMode::Config2;
  SystemVariant variant = SystemVariant::Full;
  double gamma = 0.0;
  std::optional<double> max_satellite_baseline;
  std::optional<double> min_antenna_baseline;
  std::optional<double> best_sigma_h;
};

std::vector<SweepRow> coherence_sweep(const RadarGeometry& g, const DesignSettings& s,
                                      std::span<const BaselineMode> modes, std::span<const double> gammas,
                                      SystemVariant variant = SystemVariant::Full);

struct SimplifiedComparison {
  std::vector<SweepRow> full;        // configuration 2
  std::vector<SweepRow> simplified;
};

SimplifiedComparison simplified_system_sweep(const RadarGeometry& g, const DesignSettings& s,
                                             std::span<const double> gammas);

}  // namespace tda
