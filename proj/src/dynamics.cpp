#include "ubit/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ubit/transcription.hpp"

namespace ubit {

namespace {

constexpr Complex kImag{0.0, 1.0};

}  // namespace

ExactPropagator::ExactPropagator(const Mat& s_hat, Index env_dim) {
  require_square(s_hat, "ExactPropagator");
  if (env_dim < 1 || s_hat.rows() % env_dim != 0)
    throw DimMismatch("ExactPropagator: env_dim does not divide dimension");
  env_dim_ = env_dim;
  kept_dim_ = s_hat.rows() / env_dim;
  spectrum_ = skew_spectrum(s_hat);
}

Mat ExactPropagator::exp_at(double t) const { return spectrum_.exp_at(t); }

Mat ExactPropagator::full_state(const Mat& m0, double t) const {
  const Index n = dim();
  if (m0.rows() != n || m0.cols() != n)
    throw DimMismatch("ExactPropagator::full_state: state size");
  const Mat q = exp_at(t);
  return q * m0 * q.transpose();
}

std::vector<Mat> ExactPropagator::reduced_trajectory(
    const Mat& m0, std::span<const double> times, const Mat* frame) const {
  const Index n = dim();
  const Index m = kept_dim_;
  if (m0.rows() != n || m0.cols() != n)
    throw DimMismatch("ExactPropagator::reduced_trajectory: state size");
  if (frame && (frame->rows() != n || frame->cols() != n))
    throw DimMismatch("ExactPropagator::reduced_trajectory: frame size");

  const CMat& w = spectrum_.basis;
  CMat c = w.adjoint() * m0.cast<Complex>() * w;

  // Row slices of the (possibly rotated) eigenvector matrix, grouped by the
  // kept index p: rows (e, p) for e = 0..N-1.
  CMat w_eff;
  if (frame) w_eff = frame->cast<Complex>() * w;
  const CMat& rows = frame ? w_eff : w;

  std::vector<CMat> slices(static_cast<size_t>(m));
  for (Index p = 0; p < m; ++p) {
    CMat xp(env_dim_, n);
    for (Index e = 0; e < env_dim_; ++e) xp.row(e) = rows.row(e * m + p);
    slices[static_cast<size_t>(p)] = std::move(xp);
  }

  // E_{pq}[k,l] = C[k,l] * sum_e W[(e,p),k] conj(W[(e,q),l]); the reduced
  // entry at time t is e(t)^dag E_{pq} e(t) with e(t)_l = exp(i theta_l t).
  std::vector<CMat> quad(static_cast<size_t>(m * m));
  for (Index p = 0; p < m; ++p)
    for (Index q = 0; q < m; ++q) {
      CMat g = slices[static_cast<size_t>(p)].transpose() *
               slices[static_cast<size_t>(q)].conjugate();
      quad[static_cast<size_t>(p * m + q)] = c.cwiseProduct(g);
    }

  std::vector<Mat> out;
  out.reserve(times.size());
  CVec phases(n);
  for (double t : times) {
    for (Index k = 0; k < n; ++k)
      phases(k) = std::exp(kImag * (spectrum_.theta(k) * t));
    CMat red(m, m);
    for (Index p = 0; p < m; ++p)
      for (Index q = 0; q < m; ++q)
        red(p, q) =
            phases.dot(quad[static_cast<size_t>(p * m + q)] * phases);
    out.push_back(red.real());
  }
  return out;
}

std::vector<double> BlochTrajectory::times() const {
  std::vector<double> v;
  v.reserve(samples.size());
  for (const auto& s : samples) v.push_back(s.t);
  return v;
}

std::vector<double> BlochTrajectory::component(char which) const {
  std::vector<double> v;
  v.reserve(samples.size());
  for (const auto& s : samples) {
    switch (which) {
      case 'x': v.push_back(s.bx); break;
      case 'y': v.push_back(s.by); break;
      case 'z': v.push_back(s.bz); break;
      case 'l': v.push_back(s.len); break;
      default: throw DomainError("BlochTrajectory::component: unknown tag");
    }
  }
  return v;
}

double BlochTrajectory::min_len() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) m = std::min(m, s.len);
  return m;
}

double BlochTrajectory::max_len() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) m = std::max(m, s.len);
  return m;
}

BlochPoint bloch_from_rho(const Mat& rho_ua, double t) {
  if (rho_ua.rows() != 4 || rho_ua.cols() != 4)
    throw DimMismatch("bloch_from_rho: expected a 4x4 U (x) A state");
  TensorSpace space({2, 2});
  const UbitExpansion e = ubit_expand(rho_ua, space, 0);
  BlochPoint p;
  p.t = t;
  p.bx = 2.0 * (ubit_x() * e.a_i).trace();
  p.bz = 2.0 * (ubit_z() * e.a_i).trace();
  p.by = 2.0 * (ubit_j().transpose() * e.a_j).trace();
  p.len = std::sqrt(p.bx * p.bx + p.by * p.by + p.bz * p.bz);
  p.res_x = 2.0 * std::numbers::sqrt2 * e.a_x.norm();
  p.res_z = 2.0 * std::numbers::sqrt2 * e.a_z.norm();
  return p;
}

namespace {

// Crossing times of y(t) through its mean, by linear interpolation; used to
// seed the frequency fit.
double zero_crossing_rate(std::span<const double> t, std::span<const double> y,
                          double fallback) {
  if (t.size() < 4) return fallback;
  double mean = 0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  std::vector<double> crossings;
  for (size_t i = 1; i < t.size(); ++i) {
    const double a = y[i - 1] - mean, b = y[i] - mean;
    if (a == 0.0) continue;
    if ((a < 0) != (b < 0)) {
      const double frac = a / (a - b);
      crossings.push_back(t[i - 1] + frac * (t[i] - t[i - 1]));
    }
  }
  if (crossings.size() < 2) return fallback;
  // Least-squares slope of crossing time vs index: half period.
  const double n = static_cast<double>(crossings.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t k = 0; k < crossings.size(); ++k) {
    const double xk = static_cast<double>(k);
    sx += xk;
    sy += crossings[k];
    sxx += xk * xk;
    sxy += xk * crossings[k];
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0) return fallback;
  const double half_period = (n * sxy - sx * sy) / denom;
  if (half_period <= 0) return fallback;
  return std::numbers::pi / half_period;
}

struct LinearFit {
  double a = 0, b = 0, c = 0;  // y ~ a cos(wt) + b sin(wt) + c
  double sse = 0;
};

LinearFit linear_fit_at(std::span<const double> t, std::span<const double> y,
                        double w) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < t.size(); ++i) {
    const Eigen::Vector3d phi(std::cos(w * t[i]), std::sin(w * t[i]), 1.0);
    m += phi * phi.transpose();
    rhs += phi * y[i];
  }
  LinearFit fit;
  const Eigen::Vector3d sol = m.ldlt().solve(rhs);
  fit.a = sol(0);
  fit.b = sol(1);
  fit.c = sol(2);
  for (size_t i = 0; i < t.size(); ++i) {
    const double model =
        fit.a * std::cos(w * t[i]) + fit.b * std::sin(w * t[i]) + fit.c;
    fit.sse += (y[i] - model) * (y[i] - model);
  }
  return fit;
}

}  // namespace

FrequencyFit fit_cosine(std::span<const double> t, std::span<const double> y,
                        double omega_guess) {
  if (t.size() != y.size() || t.size() < 8)
    throw DimMismatch("fit_cosine: need matching series of >= 8 samples");
  double w0 = zero_crossing_rate(t, y, omega_guess);
  if (!(w0 > 0)) w0 = omega_guess;

  // Coarse scan around the seed, then successive parabolic shrinking.
  double best_w = w0, best_sse = linear_fit_at(t, y, w0).sse;
  double lo = 0.9 * w0, hi = 1.1 * w0;
  for (int round = 0; round < 6; ++round) {
    const int grid = 25;
    double round_best_w = best_w, round_best_sse = best_sse;
    for (int i = 0; i <= grid; ++i) {
      const double w = lo + (hi - lo) * i / grid;
      const double sse = linear_fit_at(t, y, w).sse;
      if (sse < round_best_sse) {
        round_best_sse = sse;
        round_best_w = w;
      }
    }
    best_w = round_best_w;
    best_sse = round_best_sse;
    const double span = (hi - lo) * 2.0 / grid;
    lo = best_w - span;
    hi = best_w + span;
  }

  const LinearFit fin = linear_fit_at(t, y, best_w);
  FrequencyFit out;
  out.omega = best_w;
  out.amplitude = std::hypot(fin.a, fin.b);
  out.phase = std::atan2(-fin.b, fin.a);
  out.offset = fin.c;
  out.rms_residual = std::sqrt(fin.sse / static_cast<double>(t.size()));
  return out;
}

UbitCoefficients relaxation_experiment(const ModelParams& params,
                                       const Mat& b_eu, char initial_op,
                                       std::span<const double> times) {
  params.validate();
  const Index n_env = params.env_dim;
  Mat op;
  switch (initial_op) {
    case 'J': op = ubit_j(); break;
    case 'X': op = ubit_x(); break;
    case 'Z': op = ubit_z(); break;
    default:
      throw DomainError("relaxation_experiment: initial op must be J, X or Z");
  }
  const Mat s_eu = environment_ubit_generator(params, b_eu);
  ExactPropagator prop(s_eu, n_env);

  Mat m0 = Mat::Zero(2 * n_env, 2 * n_env);
  for (Index e = 0; e < n_env; ++e)
    m0.block(2 * e, 2 * e, 2, 2) = op / static_cast<double>(n_env);

  const auto u_series = prop.reduced_trajectory(m0, times);
  UbitCoefficients out;
  out.t.assign(times.begin(), times.end());
  out.u = u_series;
  for (const Mat& u : u_series) {
    out.c_i.push_back(0.5 * u.trace());
    out.c_j.push_back(0.5 * (ubit_j().transpose() * u).trace());
    out.c_x.push_back(0.5 * (ubit_x() * u).trace());
    out.c_z.push_back(0.5 * (ubit_z() * u).trace());
  }
  return out;
}

Mat precession_generator(const PrecessionSetup& setup) {
  Eigen::Vector3d axis = setup.axis;
  if (axis.norm() == 0)
    throw DomainError("precession_generator: zero axis");
  axis.normalize();
  CMat h = 0.5 * setup.big_omega *
           (axis.x() * ubit_x().cast<Complex>() + axis.y() * pauli_y() +
            axis.z() * ubit_z().cast<Complex>());
  if (setup.split == SplitBasis::RealBasis)
    return hamiltonian_to_stueckelbergian(h, real_basis_split(h));
  return hamiltonian_to_stueckelbergian(h);
}

Mat precession_initial_ua(const PrecessionSetup& setup) {
  if (setup.b0.norm() > 1.0 + 1e-9)
    throw InvalidState("precession_initial_ua: |b0| > 1");
  CMat sigma = 0.5 * (CMat::Identity(2, 2) +
                      setup.b0.x() * ubit_x().cast<Complex>() +
                      setup.b0.y() * pauli_y() +
                      setup.b0.z() * ubit_z().cast<Complex>());
  if (setup.split == SplitBasis::RealBasis) {
    CMat h = 0.5 * setup.big_omega *
             (setup.axis.normalized().x() * ubit_x().cast<Complex>() +
              setup.axis.normalized().y() * pauli_y() +
              setup.axis.normalized().z() * ubit_z().cast<Complex>());
    const CMat u = real_basis_split(h);
    sigma = u * sigma * u.adjoint();
  }
  return complex_to_real_state(sigma);
}

BlochTrajectory precession_experiment(const ModelParams& params,
                                      const Mat& b_eu,
                                      const PrecessionSetup& setup,
                                      std::span<const double> times,
                                      const Mat* frame) {
  params.validate();
  if (params.local_dim != 2)
    throw DimMismatch("precession_experiment: d_A must be 2");
  const Mat s_ua = precession_generator(setup);
  const Mat s_hat = assemble_full_stueckelbergian(params, b_eu, s_ua);
  const Mat rho0 =
      initial_state_mixed_env(params.env_dim, precession_initial_ua(setup));
  ExactPropagator prop(s_hat, params.env_dim);
  const auto rho_series = prop.reduced_trajectory(rho0, times, frame);
  BlochTrajectory traj;
  traj.samples.reserve(times.size());
  for (size_t i = 0; i < times.size(); ++i)
    traj.samples.push_back(bloch_from_rho(rho_series[i], times[i]));
  return traj;
}

FrozenSpinResult frozen_spin_experiment(const ModelParams& params,
                                        const Mat& b_eu, double big_omega,
                                        double t_freeze,
                                        Index samples_per_segment) {
  params.validate();
  if (t_freeze < 0)
    throw DomainError("frozen_spin_experiment: t_freeze must be >= 0");
  if (samples_per_segment < 2)
    throw DomainError("frozen_spin_experiment: need >= 2 samples per segment");
  PrecessionSetup setup;
  setup.big_omega = big_omega;
  const double quarter = 0.5 * std::numbers::pi / big_omega;

  const Mat s_ua = precession_generator(setup);
  const Mat s_on = assemble_full_stueckelbergian(params, b_eu, s_ua);
  const Mat s_off = assemble_full_stueckelbergian(
      params, b_eu, Mat::Zero(s_ua.rows(), s_ua.cols()));
  const Mat rho0 =
      initial_state_mixed_env(params.env_dim, precession_initial_ua(setup));

  ExactPropagator prop_on(s_on, params.env_dim);

  FrozenSpinResult result;
  auto append_segment = [&](const ExactPropagator& prop, const Mat& start,
                            double t_origin, double duration, bool last) {
    const auto local = linspace(0.0, duration, samples_per_segment);
    const auto red = prop.reduced_trajectory(start, local);
    for (size_t i = 0; i < local.size(); ++i) {
      // Segment boundaries are shared; skip the duplicated first sample.
      if (t_origin > 0 && i == 0) continue;
      result.trajectory.samples.push_back(
          bloch_from_rho(red[i], t_origin + local[i]));
    }
    return last ? Mat() : prop.full_state(start, duration);
  };

  Mat rho_quarter = append_segment(prop_on, rho0, 0.0, quarter, false);
  result.t_freeze_start = quarter;
  Mat rho_after_freeze;
  if (t_freeze > 0) {
    ExactPropagator prop_off(s_off, params.env_dim);
    rho_after_freeze =
        append_segment(prop_off, rho_quarter, quarter, t_freeze, false);
  } else {
    rho_after_freeze = std::move(rho_quarter);
  }
  result.t_freeze_end = quarter + t_freeze;
  append_segment(prop_on, rho_after_freeze, quarter + t_freeze, quarter, true);
  result.final_len = result.trajectory.samples.back().len;
  return result;
}

}  // namespace ubit
