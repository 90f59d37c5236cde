#include "tda/simulate.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

#include "tda/errors.hpp"
#include "tda/kernels.hpp"
#include "tda/random.hpp"

namespace tda {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kStep = 1e-3;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Vector from the slave antenna to the target.
Vec3 slave_to_target(const SatelliteState& s) {
  return {-s.master_position[0] - s.baseline_vector[0], -s.master_position[1] - s.baseline_vector[1],
          -s.master_position[2] - s.baseline_vector[2]};
}

void check_state(const SatelliteState& s) {
  if (!(norm(s.master_position) > 0.0)) throw ValidationError("state", "target coincides with the master");
  if (!(norm(slave_to_target(s)) > 0.0)) throw ValidationError("state", "target coincides with the slave");
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::vector<double> InterferogramStack::baselines() const {
  std::vector<double> b;
  for (const auto& i : interferograms) b.push_back(i.b_perp);
  return b;
}

std::vector<double> InterferogramStack::phase_std() const {
  std::vector<double> s;
  for (const auto& i : interferograms) s.push_back(coherence_to_phase_std(i.coherence));
  return s;
}

void InterferogramStack::validate() const {
  geometry.validate();
  if (interferograms.empty()) throw ValidationError("stack", "no interferograms");
  if (!mask.contains(reference_pixel) || !mask[reference_pixel])
    throw ValidationError("reference_pixel", "reference pixel is outside the mask");
  for (std::size_t k = 0; k < interferograms.size(); ++k) {
    const auto& ifg = interferograms[k];
    const std::string field = "interferograms[" + std::to_string(k) + "]";
    if (!ifg.wrapped_phase.same_shape(mask)) throw ValidationError(field, "grid dimensions differ from the stack");
    if (!(ifg.coherence > 0.0 && ifg.coherence <= 1.0)) throw ValidationError(field, "coherence outside (0, 1]");
    if (k > 0 && !(ifg.b_perp > interferograms[k - 1].b_perp))
      throw ValidationError(field, "stack must be sorted by ascending b_perp");
  }
}

std::vector<double> sample_phase_noise(double sigma, std::size_t n, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ValidationError("sigma", "must be non-negative");
  std::vector<double> out(n, 0.0);
  if (sigma == 0.0) return out;
  Rng rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  for (auto& v : out) v = dist(rng);
  return out;
}

double range_derivative(const SatelliteState& state, const Vec3& e) {
  check_state(state);
  // slave range r(d) = |m + B + d e|
  const Vec3 a{state.master_position[0] + state.baseline_vector[0], state.master_position[1] + state.baseline_vector[1],
               state.master_position[2] + state.baseline_vector[2]};
  auto range_at = [&](double d) {
    return norm(Vec3{a[0] + d * e[0], a[1] + d * e[1], a[2] + d * e[2]});
  };
  const double r_plus = range_at(kStep);
  const double r_minus = range_at(-kStep);
  const double diff = 4.0 * kStep * dot(a, e) / (r_plus + r_minus);
  return diff / (2.0 * kStep);
}

RangePartials range_partials(const SatelliteState& state) {
  return {range_derivative(state, Vec3{0, 1, 0}), range_derivative(state, Vec3{0, 0, 1})};
}

RangePartials range_partials_analytic(const SatelliteState& state) {
  check_state(state);
  // r_M points from the master to the target.
  const Vec3 rm{-state.master_position[0], -state.master_position[1], -state.master_position[2]};
  const double rs = norm(slave_to_target(state));
  return {(state.baseline_vector[1] - rm[1]) / rs, (state.baseline_vector[2] - rm[2]) / rs};
}

SatelliteState pixel_state(const RadarGeometry& g, double col, double b_perp) {
  const double r = g.slant_range_at(col);
  const double look = g.look_angle_at(col);
  SatelliteState s;
  s.master_position = {0.0, -r * std::sin(look), r * std::cos(look)};
  s.target_unit_los = {0.0, std::sin(look), -std::cos(look)};
  // baseline perpendicular to the nominal line of sight, zero along-track
  s.baseline_vector = {0.0, b_perp * std::cos(g.incidence), b_perp * std::sin(g.incidence)};
  return s;
}

Grid<RangePartials> pixel_partials(const RadarGeometry& g, std::size_t rows, std::size_t cols, double b_perp) {
  Grid<RangePartials> out(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    const RangePartials p = range_partials(pixel_state(g, static_cast<double>(c), b_perp));
    for (std::size_t r = 0; r < rows; ++r) out(r, c) = p;
  }
  return out;
}

Grid<double> orbit_phase_screen(const RadarGeometry& g, const Grid<RangePartials>& partials,
                                const OrbitErrorParams& p, double factor) {
  Grid<double> out(partials.rows, partials.cols, 0.0);
  const double k = factor * 4.0 * kPi / g.wavelength;
  for (std::size_t r = 0; r < partials.rows; ++r) {
    const double t = g.azimuth_time(r, partials.rows);
    const double bc = p.delta_bc + p.delta_bc_rate * t;
    const double bn = p.delta_bn + p.delta_bn_rate * t;
    for (std::size_t c = 0; c < partials.cols; ++c) {
      const auto& d = partials(r, c);
      out(r, c) = k * (d.d_bc * bc + d.d_bn * bn);
    }
  }
  return out;
}

AtmosphericScreen turbulence_screen(std::size_t rows, std::size_t cols, double rms, double exponent,
                                    double outer_scale, std::uint64_t seed) {
  if (!(rms >= 0.0)) throw ValidationError("rms", "must be non-negative");
  if (rows == 0 || cols == 0) throw ValidationError("screen", "empty grid");
  AtmosphericScreen screen;
  screen.spatial_exponent = exponent;
  screen.rms = rms;
  screen.delay_phase = Grid<double>(rows, cols, 0.0);
  if (rms == 0.0) return screen;

  const std::size_t half = cols / 2 + 1;
  std::vector<double> field(rows * cols);
  std::vector<std::complex<double>> spectrum(rows * half);
  Rng rng = make_rng(seed, "turbulence");
  std::normal_distribution<double> white(0.0, 1.0);
  for (auto& v : field) v = white(rng);

  fftw_plan forward, backward;
  {
    std::lock_guard lock(fftw_planner_mutex());
    auto* spec = reinterpret_cast<fftw_complex*>(spectrum.data());
    forward = fftw_plan_dft_r2c_2d(int(rows), int(cols), field.data(), spec, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_2d(int(rows), int(cols), spec, field.data(), FFTW_ESTIMATE);
  }
  fftw_execute(forward);

  const double k0 = outer_scale > 0.0 ? 1.0 / outer_scale : 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double fr = (r <= rows / 2 ? double(r) : double(r) - double(rows)) / double(rows);
    for (std::size_t c = 0; c < half; ++c) {
      const double fc = double(c) / double(cols);
      const double k2 = fr * fr + fc * fc;
      auto& s = spectrum[r * half + c];
      if (r == 0 && c == 0) {
        s = 0.0;
        continue;
      }
      s *= std::pow(k2 + k0 * k0, -exponent / 4.0);
    }
  }
  fftw_execute(backward);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }

  const double n = double(field.size());
  const double mean = std::accumulate(field.begin(), field.end(), 0.0) / n;
  double ss = 0.0;
  for (auto& v : field) {
    v -= mean;
    ss += v * v;
  }
  const double sd = std::sqrt(ss / n);
  const double gain = sd > 0.0 ? rms / sd : 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) screen.delay_phase.data[i] = field[i] * gain;
  return screen;
}

Grid<double> bistatic_path_screen(const AtmosphericScreen& screen, const RadarGeometry& g, double b_perp,
                                  double layer_height) {
  const auto& d = screen.delay_phase;
  Grid<double> out(d.rows, d.cols, 0.0);
  if (d.cols < 2) return out;
  const double separation = b_perp * layer_height / (g.slant_range * std::cos(g.incidence));
  const double shift = separation / (g.range_spacing / std::sin(g.incidence));
  const double last = double(d.cols - 1);
  for (std::size_t r = 0; r < d.rows; ++r) {
    for (std::size_t c = 0; c < d.cols; ++c) {
      const double x = std::clamp(double(c) + shift, 0.0, last);
      const std::size_t i0 = std::min<std::size_t>(std::size_t(x), d.cols - 2);
      const double f = x - double(i0);
      const double shifted = (1.0 - f) * d(r, i0) + f * d(r, i0 + 1);
      // shared transmit leg: only the one-way receive path differs
      out(r, c) = 0.5 * (shifted - d(r, c));
    }
  }
  return out;
}

SimulationResult simulate_stack(const HeightField& scene, const RadarGeometry& g, const SimulationOptions& opt) {
  g.validate();
  scene.validate();
  opt.config.validate();
  const std::size_t rows = scene.rows();
  const std::size_t cols = scene.cols();

  std::vector<double> b = equivalent_baselines(opt.config);
  std::vector<InterferogramKind> kinds = interferogram_kinds(opt.config.mode);
  std::vector<std::size_t> order(b.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return b[x] < b[y]; });

  if (opt.coherence.size() != 1 && opt.coherence.size() != b.size())
    throw ValidationError("coherence", "give one coherence or one per interferogram");
  if (opt.atmosphere && !opt.atmosphere->delay_phase.same_shape(scene.heights))
    throw ValidationError("atmosphere", "screen dimensions differ from the scene");

  SimulationResult result;
  auto& stack = result.stack;
  stack.geometry = g;
  stack.mask = scene.mask;
  stack.reference_pixel = opt.reference_pixel ? *opt.reference_pixel : default_reference_pixel(scene.mask);
  if (!stack.mask.contains(stack.reference_pixel) || !stack.mask[stack.reference_pixel])
    throw ValidationError("reference_pixel", "reference pixel is outside the mask");

  std::vector<double> azimuth_time(rows);
  for (std::size_t r = 0; r < rows; ++r) azimuth_time[r] = g.azimuth_time(r, rows);

  const std::size_t n = rows * cols;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t src = order[k];
    Interferogram ifg;
    ifg.b_perp = b[src];
    ifg.kind = kinds[src];
    ifg.coherence = opt.coherence.size() == 1 ? opt.coherence[0] : opt.coherence[src];
    ifg.azimuth_time = azimuth_time;
    const double sigma = coherence_to_phase_std(ifg.coherence);

    Grid<double> error(rows, cols, 0.0);
    if (is_dual_satellite(ifg.kind)) {
      if (opt.orbit) {
        const auto screen =
            orbit_phase_screen(g, pixel_partials(g, rows, cols, ifg.b_perp), *opt.orbit, orbit_factor(ifg.kind));
        for (std::size_t i = 0; i < n; ++i) error.data[i] += screen.data[i];
      }
      if (opt.atmosphere) {
        if (ifg.kind == InterferogramKind::DualSatelliteMonostatic) {
          for (std::size_t i = 0; i < n; ++i) error.data[i] += opt.atmosphere->delay_phase.data[i];
        } else if (opt.bistatic_path_delay) {
          const auto path = bistatic_path_screen(*opt.atmosphere, g, ifg.b_perp, opt.layer_height);
          for (std::size_t i = 0; i < n; ++i) error.data[i] += path.data[i];
        }
      }
    }

    const auto noise = sample_phase_noise(sigma, n, derive_seed(opt.seed, "stack_noise", {k}));
    const double factor = height_phase_factor(g, ifg.b_perp);
    std::vector<double> phase(n);
    for (std::size_t i = 0; i < n; ++i) phase[i] = factor * scene.heights.data[i] + error.data[i] + noise[i];
    ifg.wrapped_phase = Grid<double>(rows, cols);
    kernels::wrap(phase, ifg.wrapped_phase.data);
    for (std::size_t i = 0; i < n; ++i)
      if (!scene.mask.data[i]) ifg.wrapped_phase.data[i] = std::numeric_limits<double>::quiet_NaN();

    stack.interferograms.push_back(std::move(ifg));
    result.error_phase.push_back(std::move(error));
  }

  for (double gamma : opt.coherence)
    if (!coherence_approximation_valid(gamma))
      result.warnings.push_back("coherence " + std::to_string(gamma) +
                                " is below 0.9; Gaussian phase approximation is coarse");

  std::sort(b.begin(), b.end());
  const BaselineSet set = effective_baselines(b, opt.max_int);
  result.b1 = set.effective.front();
  result.h_amb_b1 = height_ambiguity(g, result.b1);
  result.max_height_difference = max_height_difference(scene);
  if (result.max_height_difference >= result.h_amb_b1)
    result.warnings.push_back("PC assumption at risk: max height difference " +
                              std::to_string(result.max_height_difference) + " m >= h_amb(B1) " +
                              std::to_string(result.h_amb_b1) + " m");
  return result;
}

}  // namespace tda
