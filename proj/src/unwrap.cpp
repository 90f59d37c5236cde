#include "tda/unwrap.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <string>

#include "tda/errors.hpp"
#include "tda/kernels.hpp"

namespace tda {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool valid(const Mask& m, std::size_t r, std::size_t c) { return m(r, c) != 0; }

// Phase-derivative variance over a 3x3 window; lower is smoother.
Grid<double> derivative_variance(const Grid<double>& w, const Mask& m) {
  const std::size_t R = w.rows, C = w.cols;
  Grid<double> dx(R, C, kNaN), dy(R, C, kNaN);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t c = 0; c < C; ++c) {
      if (!valid(m, r, c)) continue;
      if (c + 1 < C && valid(m, r, c + 1)) dx(r, c) = wrap(w(r, c + 1) - w(r, c));
      if (r + 1 < R && valid(m, r + 1, c)) dy(r, c) = wrap(w(r + 1, c) - w(r, c));
    }
  auto window_std = [&](const Grid<double>& d, std::size_t r, std::size_t c) {
    double s = 0, ss = 0;
    int n = 0;
    for (std::size_t rr = r > 0 ? r - 1 : 0; rr <= std::min(R - 1, r + 1); ++rr)
      for (std::size_t cc = c > 0 ? c - 1 : 0; cc <= std::min(C - 1, c + 1); ++cc) {
        const double v = d(rr, cc);
        if (std::isnan(v)) continue;
        s += v;
        ss += v * v;
        ++n;
      }
    if (n == 0) return kPi;
    const double mean = s / n;
    return std::sqrt(std::max(0.0, ss / n - mean * mean));
  };
  Grid<double> q(R, C, std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t c = 0; c < C; ++c)
      if (valid(m, r, c)) q(r, c) = window_std(dx, r, c) + window_std(dy, r, c);
  return q;
}

struct Frontier {
  double cost;
  std::size_t index;
  std::size_t from;
  bool operator>(const Frontier& o) const { return cost != o.cost ? cost > o.cost : index > o.index; }
};

// Flood fill from `seed` with seed phase `seed_phase`; returns the visited count.
std::size_t flood(const Grid<double>& w, const Mask& m, const Grid<double>& cost, std::size_t seed,
                  double seed_phase, Grid<double>& out, std::vector<std::uint8_t>& done) {
  const std::size_t C = w.cols, N = w.size();
  std::priority_queue<Frontier, std::vector<Frontier>, std::greater<>> heap;
  auto push_neighbors = [&](std::size_t i) {
    const std::size_t r = i / C, c = i % C;
    const std::size_t nb[4] = {c > 0 ? i - 1 : N, c + 1 < C ? i + 1 : N, r > 0 ? i - C : N, i + C < N ? i + C : N};
    for (std::size_t j : nb)
      if (j < N && m.data[j] && !done[j]) heap.push({cost.data[j], j, i});
  };
  out.data[seed] = seed_phase;
  done[seed] = 1;
  std::size_t visited = 1;
  push_neighbors(seed);
  while (!heap.empty()) {
    const Frontier f = heap.top();
    heap.pop();
    if (done[f.index]) continue;
    out.data[f.index] = out.data[f.from] + wrap(w.data[f.index] - w.data[f.from]);
    done[f.index] = 1;
    ++visited;
    push_neighbors(f.index);
  }
  return visited;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
  return m;
}

// Masked complex box average of a wrapped field.
Grid<double> smooth_wrapped(const Grid<double>& d, const Mask& m, std::size_t window) {
  const std::size_t R = d.rows, C = d.cols;
  const std::size_t h = window / 2;
  Grid<double> ic(R + 1, C + 1, 0.0), is(R + 1, C + 1, 0.0);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t c = 0; c < C; ++c) {
      const bool ok = m(r, c) && !std::isnan(d(r, c));
      const double cv = ok ? std::cos(d(r, c)) : 0.0;
      const double sv = ok ? std::sin(d(r, c)) : 0.0;
      ic(r + 1, c + 1) = cv + ic(r, c + 1) + ic(r + 1, c) - ic(r, c);
      is(r + 1, c + 1) = sv + is(r, c + 1) + is(r + 1, c) - is(r, c);
    }
  Grid<double> out(R, C, kNaN);
  for (std::size_t r = 0; r < R; ++r) {
    const std::size_t r0 = r >= h ? r - h : 0, r1 = std::min(R, r + h + 1);
    for (std::size_t c = 0; c < C; ++c) {
      if (!m(r, c)) continue;
      const std::size_t c0 = c >= h ? c - h : 0, c1 = std::min(C, c + h + 1);
      const double sc = ic(r1, c1) - ic(r0, c1) - ic(r1, c0) + ic(r0, c0);
      const double ss = is(r1, c1) - is(r0, c1) - is(r1, c0) + is(r0, c0);
      out(r, c) = (sc == 0.0 && ss == 0.0) ? d(r, c) : std::atan2(ss, sc);
    }
  }
  return out;
}

void check_aligned(const Grid<double>& a, const Mask& m, const char* what) {
  if (!a.same_shape(m)) throw ValidationError(what, "grid dimensions differ");
}

// Low-frequency part of the bootstrap residual, unwrapped from the reference.
Grid<double> residual_trend(const Grid<double>& residual, const Mask& mask, Pixel ref, std::size_t window,
                            std::size_t* residues) {
  const Grid<double> smooth = window > 1 ? smooth_wrapped(residual, mask, window) : residual;
  SpatialUnwrapOptions opt;
  opt.disconnected = DisconnectedPolicy::Flag;
  UnwrappedField trend = spatial_unwrap(smooth, mask, ref, opt);
  if (residues) *residues = trend.residue_count;
  // spatial_unwrap pins the reference to zero; the residual there carries the
  // reference-pixel noise of both interferograms and must be kept.
  const double offset = smooth[ref];
  for (std::size_t i = 0; i < trend.phase.size(); ++i)
    if (mask.data[i]) trend.phase.data[i] += offset;
  return std::move(trend.phase);
}

LinkReport make_report(const std::vector<double>& e, double b_lower, double b_higher, std::size_t residues) {
  LinkReport link;
  link.b_lower = b_lower;
  link.b_higher = b_higher;
  link.residue_count = residues;
  const double med = median_of(e);
  std::vector<double> dev(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) dev[i] = std::abs(e[i] - med);
  link.residual_std = 1.482602218505602 * median_of(std::move(dev));
  link.failure_fraction =
      link.residual_std > 0.0 ? std::erfc(kPi / (link.residual_std * std::numbers::sqrt2)) : 0.0;
  return link;
}

}  // namespace

std::size_t count_residues(const Grid<double>& w, const Mask& m) {
  std::size_t n = 0;
  for (std::size_t r = 0; r + 1 < w.rows; ++r)
    for (std::size_t c = 0; c + 1 < w.cols; ++c) {
      if (!(m(r, c) && m(r, c + 1) && m(r + 1, c + 1) && m(r + 1, c))) continue;
      const double s = wrap(w(r, c + 1) - w(r, c)) + wrap(w(r + 1, c + 1) - w(r, c + 1)) +
                       wrap(w(r + 1, c) - w(r + 1, c + 1)) + wrap(w(r, c) - w(r + 1, c));
      if (std::nearbyint(s / kTwoPi) != 0.0) ++n;
    }
  return n;
}

UnwrappedField spatial_unwrap(const Grid<double>& wrapped, const Mask& mask, Pixel ref,
                              const SpatialUnwrapOptions& options) {
  check_aligned(wrapped, mask, "wrapped");
  if (!mask.contains(ref) || !mask[ref]) throw ValidationError("reference_pixel", "reference pixel is outside the mask");
  for (std::size_t i = 0; i < wrapped.size(); ++i)
    if (mask.data[i] && !std::isfinite(wrapped.data[i]))
      throw ValidationError("wrapped", "non-finite phase inside the mask at index " + std::to_string(i));

  UnwrappedField out;
  out.reference_pixel = ref;
  out.mask = mask;
  out.flagged = Mask(mask.rows, mask.cols, 0);
  out.phase = Grid<double>(wrapped.rows, wrapped.cols, kNaN);
  out.residue_count = count_residues(wrapped, mask);

  const Grid<double> cost = derivative_variance(wrapped, mask);
  std::vector<std::uint8_t> done(wrapped.size(), 0);
  const std::size_t ref_index = wrapped.index(ref);
  flood(wrapped, mask, cost, ref_index, 0.0, out.phase, done);

  std::vector<std::size_t> unreachable;
  for (std::size_t i = 0; i < wrapped.size(); ++i)
    if (mask.data[i] && !done[i]) unreachable.push_back(i);
  if (unreachable.empty()) return out;

  if (options.disconnected == DisconnectedPolicy::Error) {
    std::ostringstream msg;
    msg << unreachable.size() << " masked-in cells are not connected to the reference pixel:";
    for (std::size_t k = 0; k < std::min<std::size_t>(unreachable.size(), 10); ++k)
      msg << " (" << unreachable[k] / wrapped.cols << "," << unreachable[k] % wrapped.cols << ")";
    if (unreachable.size() > 10) msg << " ...";
    throw ComputationError(msg.str());
  }
  // Other components start from their smoothest cell with the phase wrapped
  // relative to the reference; they are flagged as carrying an unknown offset.
  const double w_ref = wrapped[ref];
  for (std::size_t i : unreachable) {
    if (done[i]) continue;
    std::vector<std::uint8_t> before = done;
    std::size_t seed = i;
    // pick the lowest-cost cell of this component: flood once to find members
    Grid<double> scratch(wrapped.rows, wrapped.cols, kNaN);
    std::vector<std::uint8_t> probe = done;
    flood(wrapped, mask, cost, i, 0.0, scratch, probe);
    for (std::size_t j = 0; j < probe.size(); ++j)
      if (probe[j] && !before[j] && cost.data[j] < cost.data[seed]) seed = j;
    flood(wrapped, mask, cost, seed, wrap(wrapped.data[seed] - w_ref), out.phase, done);
    for (std::size_t j = 0; j < done.size(); ++j)
      if (done[j] && !before[j]) out.flagged.data[j] = 1;
  }
  return out;
}

BootstrapResult bootstrap_ambiguity(const UnwrappedField& lower, double b_lower, const Interferogram& higher,
                                    Pixel ref, const BootstrapOptions& options) {
  if (b_lower == 0.0) throw ValidationError("b_lower", "zero lower baseline");
  const Mask& mask = lower.mask;
  check_aligned(lower.phase, mask, "lower");
  check_aligned(higher.wrapped_phase, mask, "higher");
  if (!mask.contains(ref) || !mask[ref]) throw ValidationError("reference_pixel", "reference pixel is outside the mask");

  const std::size_t n = mask.size();
  const double ratio = higher.b_perp / b_lower;

  std::vector<double> predicted(n), referenced(n), w(n), residual(n);
  kernels::scale(lower.phase.data, ratio, predicted);
  const double w_ref = higher.wrapped_phase[ref];
  for (std::size_t i = 0; i < n; ++i) referenced[i] = higher.wrapped_phase.data[i] - w_ref;
  kernels::wrap(referenced, w);
  kernels::wrapped_combination(w, predicted, 1.0, residual);

  Grid<double> residual_grid(mask.rows, mask.cols);
  residual_grid.data = residual;
  std::size_t residues = 0;
  const Grid<double> trend = residual_trend(residual_grid, mask, ref, options.residual_window, &residues);

  std::vector<double> target(n), unwrapped(n), amb(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = predicted[i] + (mask.data[i] ? trend.data[i] : 0.0);
  kernels::bootstrap_round(target, w, unwrapped, amb);

  BootstrapResult out;
  out.unwrapped.reference_pixel = ref;
  out.unwrapped.mask = mask;
  out.unwrapped.flagged = lower.flagged;
  out.unwrapped.residue_count = count_residues(higher.wrapped_phase, mask);
  out.unwrapped.phase = Grid<double>(mask.rows, mask.cols, kNaN);
  out.ambiguity.ambiguities = Grid<int>(mask.rows, mask.cols, 0);
  std::vector<double> e;
  e.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask.data[i]) continue;
    out.unwrapped.phase.data[i] = unwrapped[i];
    out.ambiguity.ambiguities.data[i] = static_cast<int>(amb[i]);
    e.push_back(unwrapped[i] - target[i]);
  }
  out.link = make_report(e, b_lower, higher.b_perp, residues);
  return out;
}

LinkReport link_statistics(const UnwrappedField& lower, double b_lower, const UnwrappedField& higher,
                           double b_higher, const BootstrapOptions& options) {
  if (b_lower == 0.0) throw ValidationError("b_lower", "zero lower baseline");
  const Mask& mask = lower.mask;
  check_aligned(higher.phase, mask, "higher");
  const std::size_t n = mask.size();
  const double ratio = b_higher / b_lower;
  std::vector<double> predicted(n), residual(n);
  kernels::scale(lower.phase.data, ratio, predicted);
  kernels::wrapped_combination(higher.phase.data, predicted, 1.0, residual);
  Grid<double> residual_grid(mask.rows, mask.cols);
  residual_grid.data = residual;
  std::size_t residues = 0;
  const Grid<double> trend = residual_trend(residual_grid, mask, lower.reference_pixel, options.residual_window, &residues);
  std::vector<double> e;
  for (std::size_t i = 0; i < n; ++i)
    if (mask.data[i]) e.push_back(wrap(residual[i] - trend.data[i]));
  return make_report(e, b_lower, b_higher, residues);
}

double AsymptoticResult::success_rate() const {
  double sr = 1.0;
  for (const auto& l : links) sr *= 1.0 - l.failure_fraction;
  return sr;
}

Grid<double> short_baseline_phase(const InterferogramStack& stack, const BaselineSet& set) {
  const auto& c = set.combination_map.front();
  if (c.primary >= stack.interferograms.size() || c.secondary >= stack.interferograms.size())
    throw ValidationError("baseline_set", "combination refers to a missing interferogram");
  const auto& a = stack.interferograms[c.primary].wrapped_phase;
  if (c.is_physical()) return a;
  const auto& b = stack.interferograms[c.secondary].wrapped_phase;
  Grid<double> out(a.rows, a.cols);
  kernels::wrapped_combination(a.data, b.data, double(c.multiplier), out.data);
  if (c.sign < 0) {
    for (auto& v : out.data) v = -v;
    kernels::wrap(out.data, out.data);
  }
  return out;
}

AsymptoticResult asymptotic_unwrap(const InterferogramStack& stack, const BaselineSet& set,
                                   const BootstrapOptions& options) {
  stack.validate();
  if (set.physical.size() != stack.interferograms.size())
    throw ValidationError("baseline_set", "physical baselines do not match the stack");
  for (std::size_t k = 0; k < set.physical.size(); ++k)
    if (std::abs(set.physical[k] - stack.interferograms[k].b_perp) > 1e-9 * set.physical.back())
      throw ValidationError("baseline_set", "physical baseline " + std::to_string(k) + " differs from the stack");

  const Pixel ref = stack.reference_pixel;
  AsymptoticResult out;
  out.b1 = set.effective.front();
  out.short_baseline = spatial_unwrap(short_baseline_phase(stack, set), stack.mask, ref);
  out.fields.resize(stack.interferograms.size());

  UnwrappedField previous = out.short_baseline;
  double b_previous = out.b1;
  if (set.combination_map.front().is_physical()) out.fields[set.combination_map.front().primary] = previous;
  for (std::size_t e = 1; e < set.effective.size(); ++e) {
    const std::size_t k = set.combination_map[e].primary;
    BootstrapResult step = bootstrap_ambiguity(previous, b_previous, stack.interferograms[k], ref, options);
    out.links.push_back(step.link);
    out.fields[k] = step.unwrapped;
    previous = std::move(step.unwrapped);
    b_previous = set.effective[e];
  }
  return out;
}

HeightField initial_height(const UnwrappedField& sbi, const RadarGeometry& g, double b_perp) {
  if (b_perp == 0.0) throw ValidationError("b_perp", "degenerate baseline");
  HeightField f(sbi.phase.rows, sbi.phase.cols);
  f.mask = sbi.mask;
  const double k = phase_to_height(g, b_perp, 1.0);
  kernels::scale(sbi.phase.data, k, f.heights.data);
  for (std::size_t i = 0; i < f.heights.size(); ++i)
    if (!f.mask.data[i]) f.heights.data[i] = 0.0;
  return f;
}

double ambiguity_error_fraction(const UnwrappedField& est, const Grid<double>& truth) {
  check_aligned(truth, est.mask, "truth");
  std::size_t bad = 0, total = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!est.mask.data[i]) continue;
    ++total;
    if (std::abs(est.phase.data[i] - truth.data[i]) >= kPi) ++bad;
  }
  return total ? double(bad) / double(total) : 0.0;
}

}  // namespace tda
