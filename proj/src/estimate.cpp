#include "tda/estimate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "tda/errors.hpp"

namespace tda {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSigmaFloor = 1e-6;
constexpr double kRankTolerance = 1e-12;
constexpr const char* kOrbitNames[4] = {"delta_bc", "delta_bc_rate", "delta_bn", "delta_bn_rate"};

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

std::string describe_null_direction(const Eigen::Vector4d& v) {
  std::ostringstream s;
  s << "orbit parameters indistinguishable: null-space direction";
  bool first = true;
  for (int j = 0; j < 4; ++j) {
    if (std::abs(v[j]) < 1e-3) continue;
    s << (first ? " " : " + ") << v[j] << "*" << kOrbitNames[j];
    first = false;
  }
  return s.str();
}

}  // namespace

void UnwrappedStack::validate() const {
  const std::size_t n = fields.size();
  if (n == 0) throw ValidationError("stack", "no unwrapped fields");
  if (b_perp.size() != n || kinds.size() != n || coherence.size() != n)
    throw ValidationError("stack", "per-interferogram metadata is incomplete");
  for (std::size_t k = 0; k < n; ++k) {
    const auto& f = fields[k];
    const std::string field = "fields[" + std::to_string(k) + "]";
    if (!f.phase.same_shape(mask) || f.mask.data != mask.data) throw ValidationError(field, "inconsistent masks");
    if (!(f.reference_pixel == reference_pixel)) throw ValidationError(field, "inconsistent reference pixels");
    if (b_perp[k] == 0.0) throw ValidationError(field, "degenerate baseline");
  }
  if (!mask.contains(reference_pixel) || !mask[reference_pixel])
    throw ValidationError("reference_pixel", "reference pixel is outside the mask");
}

UnwrappedStack make_unwrapped_stack(const InterferogramStack& stack, const std::vector<UnwrappedField>& fields) {
  if (fields.size() != stack.interferograms.size())
    throw ValidationError("fields", "one unwrapped field per interferogram required");
  UnwrappedStack out;
  out.fields = fields;
  out.reference_pixel = stack.reference_pixel;
  out.mask = stack.mask;
  for (const auto& i : stack.interferograms) {
    out.b_perp.push_back(i.b_perp);
    out.kinds.push_back(i.kind);
    out.coherence.push_back(i.coherence);
  }
  return out;
}

std::size_t JointModel::delay_count() const {
  if (mode != EstimationMode::Monostatic) return 0;
  if (std::none_of(delay_row.begin(), delay_row.end(), [](auto v) { return v != 0; })) return 0;
  return pixels.empty() ? 0 : pixels.size() - 1;
}

std::size_t JointModel::unknown_count() const { return pixels.size() + (include_orbit ? 4 : 0) + delay_count(); }

JointModel::Dense JointModel::to_dense() const {
  const std::size_t m = pixels.size();
  const std::size_t n_orbit = include_orbit ? 4 : 0;
  Dense d;
  d.rows = observation_count();
  d.cols = unknown_count();
  d.a.assign(d.rows * d.cols, 0.0);
  d.y = observations;
  d.w.resize(d.rows);
  for (std::size_t k = 0; k < interferograms; ++k) {
    for (std::size_t s = 0; s < m; ++s) {
      const std::size_t row = k * m + s;
      double* a = &d.a[row * d.cols];
      d.w[row] = weight[k];
      a[s] = height_coeff[k];
      for (std::size_t j = 0; j < n_orbit; ++j) a[m + j] = orbit[row][j];
      if (delay_count() && delay_row[k] && s != reference_slot) {
        const std::size_t dslot = s < reference_slot ? s : s - 1;
        a[m + n_orbit + dslot] = 1.0;
      }
    }
  }
  return d;
}

JointModel build_joint_model(const UnwrappedStack& stack, const RadarGeometry& g, EstimationMode mode,
                             const JointModelOptions& options) {
  g.validate();
  stack.validate();
  JointModel model;
  model.mode = mode;
  model.include_orbit = options.include_orbit;
  model.rows = stack.mask.rows;
  model.cols = stack.mask.cols;
  model.reference = stack.reference_pixel;
  model.interferograms = stack.fields.size();
  for (std::size_t i = 0; i < stack.mask.size(); ++i)
    if (stack.mask.data[i]) {
      if (i == stack.mask.index(stack.reference_pixel)) model.reference_slot = model.pixels.size();
      model.pixels.push_back(i);
    }
  const std::size_t m = model.pixels.size();
  const std::size_t ref_index = stack.mask.index(stack.reference_pixel);

  bool all_zero = true;
  model.observations.resize(model.interferograms * m);
  model.orbit.assign(model.interferograms * m, {0, 0, 0, 0});
  for (std::size_t k = 0; k < model.interferograms; ++k) {
    const double sigma = std::max(kSigmaFloor, coherence_to_phase_std(stack.coherence[k]));
    model.weight.push_back(1.0 / (sigma * sigma));
    model.height_coeff.push_back(height_phase_factor(g, stack.b_perp[k]));
    model.delay_row.push_back(mode == EstimationMode::Monostatic &&
                              stack.kinds[k] == InterferogramKind::DualSatelliteMonostatic);
    const auto& phase = stack.fields[k].phase;
    for (std::size_t s = 0; s < m; ++s) {
      const double v = phase.data[model.pixels[s]];
      if (!std::isfinite(v)) throw ValidationError("fields", "non-finite unwrapped phase inside the mask");
      model.observations[k * m + s] = v;
    }

    const double factor = orbit_factor(stack.kinds[k]);
    if (!options.include_orbit || factor == 0.0) continue;
    const auto partials = pixel_partials(g, model.rows, model.cols, stack.b_perp[k]);
    const double scale = factor * 4.0 * kPi / g.wavelength;
    auto columns = [&](std::size_t index) {
      const std::size_t row = index / model.cols;
      const double t = g.azimuth_time(row, model.rows);
      const auto& p = partials.data[index];
      return std::array<double, 4>{p.d_bc, p.d_bc * t, p.d_bn, p.d_bn * t};
    };
    const auto ref_cols = columns(ref_index);
    for (std::size_t s = 0; s < m; ++s) {
      const auto c = columns(model.pixels[s]);
      auto& o = model.orbit[k * m + s];
      for (int j = 0; j < 4; ++j) {
        o[j] = scale * (c[j] - ref_cols[j]);
        if (o[j] != 0.0) all_zero = false;
      }
    }
  }
  model.orbit_rank_deficient = options.include_orbit && all_zero;
  return model;
}

EstimateResult solve_joint(const JointModel& model) {
  const std::size_t m = model.pixels.size();
  const std::size_t K = model.interferograms;
  const bool use_orbit = model.include_orbit;
  const bool use_delay = model.delay_count() > 0;
  if (m == 0) throw ValidationError("model", "no pixels");
  if (use_orbit && model.orbit_rank_deficient)
    throw ComputationError("orbit parameters indistinguishable: zero orbit partials");

  std::vector<double> sqrt_w(K);
  for (std::size_t k = 0; k < K; ++k) sqrt_w[k] = std::sqrt(model.weight[k]);

  struct Local {
    Matrix r;      // n_loc x n_loc upper triangular
    Matrix s;      // n_loc x 4
    Vector z;      // n_loc
  };
  std::vector<Local> local(m);
  std::vector<double> reduced_g;  // row-major, 4 columns
  std::vector<double> reduced_y;

  for (std::size_t s = 0; s < m; ++s) {
    const bool delay_here = use_delay && s != model.reference_slot;
    const int n_loc = delay_here ? 2 : 1;
    Matrix a(K, n_loc);
    Matrix rhs(K, 5);
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t obs = k * m + s;
      a(k, 0) = sqrt_w[k] * model.height_coeff[k];
      if (delay_here) a(k, 1) = model.delay_row[k] ? sqrt_w[k] : 0.0;
      for (int j = 0; j < 4; ++j) rhs(k, j) = use_orbit ? sqrt_w[k] * model.orbit[obs][j] : 0.0;
      rhs(k, 4) = sqrt_w[k] * model.observations[obs];
    }
    Eigen::HouseholderQR<Matrix> qr(a);
    const Matrix qt_rhs = qr.householderQ().transpose() * rhs;
    Local& l = local[s];
    l.r = qr.matrixQR().topRows(n_loc).triangularView<Eigen::Upper>();
    for (int i = 0; i < n_loc; ++i)
      if (!(std::abs(l.r(i, i)) > 1e-12 * std::max(1.0, std::abs(l.r(0, 0)))))
        throw ComputationError("height and delay indistinguishable at pixel (" +
                               std::to_string(model.pixels[s] / model.cols) + "," +
                               std::to_string(model.pixels[s] % model.cols) + ")");
    l.s = qt_rhs.topLeftCorner(n_loc, 4);
    l.z = qt_rhs.topRightCorner(n_loc, 1);
    if (use_orbit) {
      for (std::size_t i = n_loc; i < K; ++i) {
        for (int j = 0; j < 4; ++j) reduced_g.push_back(qt_rhs(i, j));
        reduced_y.push_back(qt_rhs(i, 4));
      }
    }
  }

  Eigen::Vector4d x_orb = Eigen::Vector4d::Zero();
  Eigen::Matrix4d cov_orb = Eigen::Matrix4d::Zero();
  double condition = 1.0;
  if (use_orbit) {
    const std::size_t n_red = reduced_y.size();
    if (n_red < 4) throw ComputationError("orbit parameters indistinguishable: too few redundant observations");
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 4, Eigen::RowMajor>> g_red(reduced_g.data(), n_red, 4);
    Eigen::Map<const Vector> y_red(reduced_y.data(), n_red);
    Eigen::Vector4d col_norm = g_red.colwise().norm().transpose();
    const double largest = col_norm.maxCoeff();
    if (!(largest > 0.0)) throw ComputationError("orbit parameters indistinguishable: zero orbit partials");
    if (col_norm[1] <= 1e-14 * largest && col_norm[3] <= 1e-14 * largest)
      throw ComputationError("orbit rate indistinguishable: constant azimuth time");
    for (int j = 0; j < 4; ++j)
      if (col_norm[j] <= 1e-14 * largest) {
        Eigen::Vector4d v = Eigen::Vector4d::Zero();
        v[j] = 1.0;
        throw ComputationError(describe_null_direction(v));
      }
    const Matrix scaled = g_red * col_norm.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Matrix> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Vector4d sv = svd.singularValues();
    condition = sv[0] / sv[3];
    if (!(sv[3] > kRankTolerance * sv[0])) {
      Eigen::Vector4d v = col_norm.cwiseInverse().asDiagonal() * svd.matrixV().col(3);
      v /= v.norm();
      throw ComputationError(describe_null_direction(v));
    }
    const Eigen::Vector4d inv_s = sv.cwiseInverse();
    const Eigen::Vector4d x_scaled = svd.matrixV() * inv_s.asDiagonal() * (svd.matrixU().transpose() * y_red);
    x_orb = col_norm.cwiseInverse().asDiagonal() * x_scaled;
    const Eigen::Matrix4d v_is = svd.matrixV() * inv_s.asDiagonal();
    cov_orb = col_norm.cwiseInverse().asDiagonal() * (v_is * v_is.transpose()) * col_norm.cwiseInverse().asDiagonal();
  }

  EstimateResult out;
  out.condition_indicator = condition;
  out.orbit = {x_orb[0], x_orb[1], x_orb[2], x_orb[3]};
  out.heights = HeightField(model.rows, model.cols, 0.0);
  out.heights.mask = Mask(model.rows, model.cols, 0);
  out.posterior_height_std = Grid<double>(model.rows, model.cols, std::numeric_limits<double>::quiet_NaN());
  if (use_delay) out.delays = Grid<double>(model.rows, model.cols, std::numeric_limits<double>::quiet_NaN());

  const std::size_t n_orbit = use_orbit ? 4 : 0;
  out.solution.assign(model.unknown_count(), 0.0);
  for (int j = 0; j < int(n_orbit); ++j) out.solution[m + j] = x_orb[j];

  std::vector<double> height(m), delay(m, 0.0);
  std::vector<double> cov_hh(m, 0.0);
  for (std::size_t s = 0; s < m; ++s) {
    const Local& l = local[s];
    const auto tri = l.r.triangularView<Eigen::Upper>();
    const Vector x = tri.solve(l.z - l.s * x_orb);
    height[s] = x[0];
    if (x.size() > 1) delay[s] = x[1];
    // covariance of the local unknowns: R^-1 (I + S C S^T) R^-T
    const Matrix r_inv = tri.solve(Matrix::Identity(l.r.rows(), l.r.rows()));
    Matrix cov = r_inv * r_inv.transpose();
    if (use_orbit) cov += r_inv * l.s * cov_orb * l.s.transpose() * r_inv.transpose();
    cov_hh[s] = cov(0, 0);
  }

  double ss = 0.0, ss_w = 0.0;
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t s = 0; s < m; ++s) {
      const std::size_t obs = k * m + s;
      double pred = model.height_coeff[k] * height[s];
      if (use_orbit)
        for (int j = 0; j < 4; ++j) pred += model.orbit[obs][j] * x_orb[j];
      if (use_delay && model.delay_row[k]) pred += delay[s];
      const double r = model.observations[obs] - pred;
      ss += r * r;
      ss_w += model.weight[k] * r * r;
    }
  const std::size_t n_obs = model.observation_count();
  const std::size_t n_unk = model.unknown_count();
  out.residual_rms = std::sqrt(ss / double(n_obs));
  const double sigma0_sq = n_obs > n_unk ? ss_w / double(n_obs - n_unk) : 1.0;

  for (std::size_t s = 0; s < m; ++s) {
    const std::size_t idx = model.pixels[s];
    const bool is_ref = s == model.reference_slot;
    out.heights.heights.data[idx] = is_ref ? 0.0 : height[s];
    out.heights.mask.data[idx] = 1;
    out.posterior_height_std.data[idx] = is_ref ? 0.0 : std::sqrt(sigma0_sq * cov_hh[s]);
    out.solution[s] = out.heights.heights.data[idx];
    if (use_delay) {
      out.delays->data[idx] = is_ref ? 0.0 : delay[s];
      if (!is_ref) {
        const std::size_t dslot = s < model.reference_slot ? s : s - 1;
        out.solution[m + n_orbit + dslot] = delay[s];
      }
    }
  }
  return out;
}

EstimateResult estimate_heights_only(const UnwrappedStack& stack, const RadarGeometry& g) {
  stack.validate();
  const std::size_t k = static_cast<std::size_t>(
      std::max_element(stack.b_perp.begin(), stack.b_perp.end()) - stack.b_perp.begin());
  const auto& field = stack.fields[k];
  const double per_radian = phase_to_height(g, stack.b_perp[k], 1.0);
  const double sigma_h = std::abs(per_radian) * coherence_to_phase_std(stack.coherence[k]);

  EstimateResult out;
  out.heights = HeightField(stack.mask.rows, stack.mask.cols, 0.0);
  out.heights.mask = stack.mask;
  out.posterior_height_std = Grid<double>(stack.mask.rows, stack.mask.cols, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < stack.mask.size(); ++i) {
    if (!stack.mask.data[i]) continue;
    out.heights.heights.data[i] = per_radian * field.phase.data[i];
    out.posterior_height_std.data[i] = sigma_h;
  }
  out.heights.heights[stack.reference_pixel] = 0.0;
  out.posterior_height_std[stack.reference_pixel] = 0.0;
  return out;
}

}  // namespace tda
