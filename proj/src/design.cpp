#include "tda/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "tda/errors.hpp"
#include "tda/normal.hpp"
#include "tda/parallel.hpp"
#include "tda/random.hpp"

namespace tda {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_chain(std::span<const double> effective, std::span<const double> sigma) {
  if (effective.size() != sigma.size()) throw ValidationError("sigma", "one phase std per chain element required");
  for (double s : sigma)
    if (!(s >= 0.0)) throw ValidationError("sigma", "phase std must be non-negative");
}

std::vector<double> physical_sigma(const DesignSettings& s, std::size_t count) {
  if (s.coherence.size() == 1) return std::vector<double>(count, coherence_to_phase_std(s.coherence[0]));
  if (s.coherence.size() != count)
    throw ValidationError("coherence", "give one coherence or one per physical interferogram");
  std::vector<double> out;
  for (double g : s.coherence) out.push_back(coherence_to_phase_std(g));
  return out;
}
}  // namespace

std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) throw ValidationError("grid", "need step > 0 and stop >= start");
  std::vector<double> g;
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-3));
  for (std::size_t i = 0; i <= n; ++i) g.push_back(start + double(i) * step);
  return g;
}

void DesignSettings::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha", "must lie in (0, 1)");
  if (coherence.empty()) throw ValidationError("coherence", "at least one value required");
  for (double g : coherence)
    if (!(g > 0.0 && g <= 1.0)) throw ValidationError("coherence", "must lie in (0, 1]");
  if (!(expected_height_precision > 0.0)) throw ValidationError("expected_height_precision", "must be positive");
  if (!(max_height_difference > 0.0)) throw ValidationError("max_height_difference", "must be positive");
  auto ascending = [](const std::vector<double>& v, const char* name) {
    if (v.empty()) throw ValidationError(name, "grid is empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] > 0.0)) throw ValidationError(name, "grid values must be positive");
      if (i > 0 && !(v[i] > v[i - 1])) throw ValidationError(name, "grid must be strictly ascending");
    }
  };
  ascending(antenna_grid, "antenna_grid");
  ascending(satellite_grid, "satellite_grid");
  if (trials < 1) throw ValidationError("trials", "must be at least 1");
  if (max_int < 0) throw ValidationError("max_int", "must be non-negative");
}

PhysicalChain physical_chain(SystemVariant variant, BaselineMode mode, double l1, double l2) {
  PhysicalChain chain;
  if (variant == SystemVariant::Simplified) {
    chain.baselines = {l2 / 2 + l1, l2 + l1};
    chain.kinds = {InterferogramKind::DualSatelliteBistatic, InterferogramKind::DualSatelliteBistatic};
    return chain;
  }
  const auto b = equivalent_baselines({l1, l2, mode});
  const auto k = interferogram_kinds(mode);
  std::vector<std::size_t> order(b.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return b[x] < b[y]; });
  for (auto i : order) {
    chain.baselines.push_back(b[i]);
    chain.kinds.push_back(k[i]);
  }
  return chain;
}

SuCheck su_check(std::span<const double> effective, std::span<const double> sigma, double alpha) {
  check_chain(effective, sigma);
  const double u = two_sided_quantile(alpha);
  SuCheck out;
  out.threshold = (kPi / u) * (kPi / u);
  for (std::size_t i = 1; i < effective.size(); ++i) {
    const double ratio = effective[i] / effective[i - 1];
    const double v = ratio * ratio * sigma[i - 1] * sigma[i - 1] + sigma[i] * sigma[i];
    if (out.binding_link == 0 || v > out.max_variance) {
      out.max_variance = v;
      out.binding_link = i;
    }
  }
  out.pass = out.max_variance < out.threshold;
  return out;
}

SuCheck su_check(const BaselineSet& set, std::span<const double> sigma, double alpha) {
  return su_check(set.effective, sigma, alpha);
}

double analytic_success_rate(std::span<const double> effective, std::span<const double> sigma,
                             std::size_t* binding_link) {
  check_chain(effective, sigma);
  double worst = 0.0;
  std::size_t link = 0;
  for (std::size_t i = 1; i < effective.size(); ++i) {
    const double ratio = effective[i] / effective[i - 1];
    const double v = ratio * ratio * sigma[i - 1] * sigma[i - 1] + sigma[i] * sigma[i];
    if (link == 0 || v > worst) {
      worst = v;
      link = i;
    }
  }
  if (binding_link) *binding_link = link;
  if (worst == 0.0) return 1.0;
  const double z = kPi / std::sqrt(worst);
  return std::erf(z / std::numbers::sqrt2);  // 2 Phi(z) - 1
}

double analytic_success_rate(const BaselineSet& set, std::span<const double> sigma, std::size_t* binding_link) {
  return analytic_success_rate(set.effective, sigma, binding_link);
}

double predicted_height_precision(const RadarGeometry& g, double b4, double sigma_l) {
  if (!(b4 > 0.0)) throw ValidationError("b4", "baseline must be positive");
  return g.height_scale() / (4.0 * kPi * b4) * sigma_l;
}

double ChainMonteCarlo::link_success_rate(std::size_t link) const {
  const std::size_t a = link_attempts.at(link - 1);
  return a ? double(link_successes.at(link - 1)) / double(a) : 0.0;
}

ChainMonteCarlo run_chain_monte_carlo(const RadarGeometry& g, const BaselineSet& set,
                                      std::span<const double> physical_sigma, std::size_t trials,
                                      std::uint64_t seed, double height_span, unsigned threads) {
  if (trials < 1) throw ValidationError("trials", "must be at least 1");
  if (physical_sigma.size() != set.physical.size())
    throw ValidationError("sigma", "one phase std per physical baseline required");
  const std::size_t n_el = set.effective.size();
  const std::size_t n_phys = set.physical.size();
  std::vector<double> factor(n_el);
  for (std::size_t e = 0; e < n_el; ++e) factor[e] = height_phase_factor(g, set.effective[e]);

  // per trial: index of the first failed link (n_el if none) and height errors
  std::vector<std::size_t> first_fail(trials);
  std::vector<double> errors(trials * n_el, 0.0);

  parallel_for(trials, threads, [&](std::size_t t) {
    Rng rng = make_rng(seed, "chain_trial", {t});
    std::normal_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> height(0.0, height_span);
    const double h = height(rng);
    std::vector<double> noise(n_phys);
    for (std::size_t k = 0; k < n_phys; ++k) noise[k] = physical_sigma[k] * unit(rng);

    auto element_noise = [&](std::size_t e) {
      const auto& c = set.combination_map[e];
      if (c.is_physical()) return noise[c.primary];
      return c.sign * (noise[c.primary] - c.multiplier * noise[c.secondary]);
    };

    std::vector<double> phase(n_el);
    phase[0] = factor[0] * h + element_noise(0);
    std::size_t fail = n_el;
    for (std::size_t e = 1; e < n_el; ++e) {
      const double truth = factor[e] * h + element_noise(e);
      const double predicted = set.effective[e] / set.effective[e - 1] * phase[e - 1];
      const double w = wrap(truth);
      phase[e] = w + std::nearbyint((predicted - w) / kTwoPi) * kTwoPi;
      if (std::abs(phase[e] - truth) >= kPi) {
        fail = e;
        break;
      }
    }
    first_fail[t] = fail;
    if (fail == n_el)
      for (std::size_t e = 0; e < n_el; ++e) errors[t * n_el + e] = phase[e] / factor[e] - h;
  });

  ChainMonteCarlo out;
  out.trials = trials;
  out.link_attempts.assign(n_el > 0 ? n_el - 1 : 0, 0);
  out.link_successes.assign(out.link_attempts.size(), 0);
  std::vector<double> sum(n_el, 0.0), sum2(n_el, 0.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t f = first_fail[t];
    for (std::size_t e = 1; e < n_el && e <= f; ++e) {
      ++out.link_attempts[e - 1];
      if (e < f) ++out.link_successes[e - 1];
    }
    if (f == n_el) {
      ++out.successes;
      for (std::size_t e = 0; e < n_el; ++e) {
        sum[e] += errors[t * n_el + e];
        sum2[e] += errors[t * n_el + e] * errors[t * n_el + e];
      }
    }
  }
  out.element_height_std.assign(n_el, 0.0);
  if (out.successes > 1) {
    const double n = double(out.successes);
    for (std::size_t e = 0; e < n_el; ++e)
      out.element_height_std[e] = std::sqrt(std::max(0.0, (sum2[e] - sum[e] * sum[e] / n) / (n - 1.0)));
  }
  return out;
}

MonteCarloResult monte_carlo_success_rate(const RadarGeometry& g, const BaselineConfiguration& cfg, double gamma,
                                          std::size_t trials, std::uint64_t seed, int max_int, unsigned threads) {
  const PhysicalChain chain = physical_chain(SystemVariant::Full, cfg.mode, cfg.antenna_baseline,
                                             cfg.satellite_baseline);
  MonteCarloResult out;
  out.baselines = effective_baselines(chain.baselines, max_int);
  const std::vector<double> sigma(chain.baselines.size(), coherence_to_phase_std(gamma));
  out.chain = run_chain_monte_carlo(g, out.baselines, sigma, trials, seed, 100.0, threads);
  out.sr_empirical = out.chain.success_rate();
  out.sigma_h_empirical = out.chain.element_height_std.back();
  return out;
}

DesignPoint evaluate_design_point(const RadarGeometry& g, const DesignSettings& s, BaselineMode mode, double l1,
                                  double l2, SystemVariant variant) {
  DesignPoint p;
  p.l1 = l1;
  p.l2 = l2;
  p.mode = mode;
  try {
    const PhysicalChain chain = physical_chain(variant, mode, l1, l2);
    const BaselineSet set = effective_baselines(chain.baselines, s.max_int);
    const std::vector<double> phys_sigma = physical_sigma(s, chain.baselines.size());
    const std::vector<double> sigma = chain_phase_std(set, phys_sigma);
    p.sr_analytic = analytic_success_rate(set, sigma, &p.binding_link);
    p.sigma_h = predicted_height_precision(g, set.effective.back(), sigma.back());
    p.b1 = set.effective.front();
    p.h_amb = height_ambiguity(g, p.b1);
    p.feasible = p.sr_analytic > 1.0 - s.alpha && p.sigma_h < s.expected_height_precision &&
                 p.b1 < g.height_scale() / (2.0 * s.max_height_difference);
  } catch (const ValidationError& e) {
    p.note = e.what();
    p.feasible = false;
  }
  return p;
}

bool preferred(const DesignPoint& a, const DesignPoint& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (a.h_amb != b.h_amb) return a.h_amb > b.h_amb;
  if (a.sigma_h != b.sigma_h) return a.sigma_h < b.sigma_h;
  if (a.sr_analytic != b.sr_analytic) return a.sr_analytic > b.sr_analytic;
  if (a.l1 != b.l1) return a.l1 < b.l1;
  return a.l2 < b.l2;
}

std::optional<double> DesignReport::max_feasible_l2() const {
  std::optional<double> best;
  for (const auto& p : points)
    if (p.feasible && (!best || p.l2 > *best)) best = p.l2;
  return best;
}

std::optional<double> DesignReport::min_feasible_l1() const {
  std::optional<double> best;
  for (const auto& p : points)
    if (p.feasible && (!best || p.l1 < *best)) best = p.l1;
  return best;
}

std::optional<double> DesignReport::best_sigma_h() const {
  std::optional<double> best;
  for (const auto& p : points)
    if (p.feasible && (!best || p.sigma_h < *best)) best = p.sigma_h;
  return best;
}

DesignReport optimize(const RadarGeometry& g, const DesignSettings& s, BaselineMode mode, SystemVariant variant) {
  g.validate();
  s.validate();
  DesignReport report;
  report.mode = mode;
  report.variant = variant;
  const std::size_t n1 = s.antenna_grid.size(), n2 = s.satellite_grid.size();
  report.points.resize(n1 * n2);
  parallel_for(n1 * n2, s.threads, [&](std::size_t i) {
    report.points[i] = evaluate_design_point(g, s, mode, s.antenna_grid[i / n2], s.satellite_grid[i % n2], variant);
  });

  std::vector<std::size_t> feasible;
  for (std::size_t i = 0; i < report.points.size(); ++i)
    if (report.points[i].feasible) feasible.push_back(i);
  if (feasible.empty()) {
    report.reason = "no grid cell satisfies the success-rate, precision and ambiguity constraints";
    return report;
  }
  std::sort(feasible.begin(), feasible.end(),
            [&](auto a, auto b) { return preferred(report.points[a], report.points[b]); });
  report.selected = feasible.front();

  const std::size_t k = std::min(s.monte_carlo_top_k, feasible.size());
  parallel_for(k, s.threads, [&](std::size_t j) {
    auto& p = report.points[feasible[j]];
    const PhysicalChain chain = physical_chain(variant, mode, p.l1, p.l2);
    const BaselineSet set = effective_baselines(chain.baselines, s.max_int);
    const auto sigma = physical_sigma(s, chain.baselines.size());
    p.sr_empirical = run_chain_monte_carlo(g, set, sigma, s.trials, derive_seed(s.seed, "design_cell", {feasible[j]}),
                                           s.max_height_difference)
                         .success_rate();
  });
  return report;
}

std::vector<SweepRow> coherence_sweep(const RadarGeometry& g, const DesignSettings& s,
                                      std::span<const BaselineMode> modes, std::span<const double> gammas,
                                      SystemVariant variant) {
  std::vector<SweepRow> rows;
  for (BaselineMode mode : modes) {
    for (double gamma : gammas) {
      DesignSettings local = s;
      local.coherence = {gamma};
      local.monte_carlo_top_k = 0;
      const DesignReport r = optimize(g, local, mode, variant);
      rows.push_back({mode, variant, gamma, r.max_feasible_l2(), r.min_feasible_l1(), r.best_sigma_h()});
    }
  }
  return rows;
}

SimplifiedComparison simplified_system_sweep(const RadarGeometry& g, const DesignSettings& s,
                                             std::span<const double> gammas) {
  const BaselineMode mode[] = {BaselineMode::Config2};
  return {coherence_sweep(g, s, mode, gammas, SystemVariant::Full),
          coherence_sweep(g, s, mode, gammas, SystemVariant::Simplified)};
}

}  // namespace tda
