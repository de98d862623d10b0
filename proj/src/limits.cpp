#include "ubit/limits.hpp"

#include <cmath>

#include "ubit/model.hpp"
#include "ubit/tensor_space.hpp"
#include "ubit/transcription.hpp"

namespace ubit {

namespace {

double guarded_sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

double spectral_norm(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

Mat sincos_exponential(const Mat& s, double t) {
  require_square(s, "sincos_exponential");
  if (s.norm() > 0 && !is_antisymmetric(s))
    throw NonAntisymmetric("sincos_exponential: generator not antisymmetric");
  const Mat gram = s.transpose() * s;  // positive semi-definite
  Eigen::SelfAdjointEigenSolver<Mat> es(gram);
  if (es.info() != Eigen::Success)
    throw EigFailure("sincos_exponential: eigensolver failed");
  const Vec mu = es.eigenvalues().cwiseMax(0.0);
  const Mat& q = es.eigenvectors();
  Vec sin_part(mu.size()), cos_part(mu.size());
  for (Index k = 0; k < mu.size(); ++k) {
    const double root = std::sqrt(mu(k));
    sin_part(k) = t * guarded_sinc(root * t);  // sin(root t)/root
    cos_part(k) = std::cos(root * t);
  }
  return s * (q * sin_part.asDiagonal() * q.transpose()) +
         q * cos_part.asDiagonal() * q.transpose();
}

LimitReport large_omega_scan(const Mat& b_eu, const Mat& s_ua, double s,
                             std::span<const double> omegas, double t) {
  if (omegas.size() < 2)
    throw DomainError("large_omega_scan: need at least two omega values");
  const Index n_env = b_eu.rows() / 2;
  const Index d = s_ua.rows() / 2;
  const Index n = 2 * n_env * d;

  const Mat d_hat = s * kron(b_eu, Mat::Identity(d, d)) +
                    kron(Mat::Identity(n_env, n_env), s_ua);
  TensorSpace space({n_env, 2, d});
  const Mat j_hat = j_on(space, 1);
  const Mat d_c = 0.5 * (d_hat - j_hat * d_hat * j_hat);
  const Mat d_exp = antisym_exp(d_c, t);

  LimitReport report;
  for (double w : omegas) {
    ModelParams params;
    params.env_dim = n_env;
    params.coupling = s;
    params.omega = w;
    params.local_dim = d;
    const Mat s_hat = assemble_full_stueckelbergian(params, b_eu, s_ua);
    const Mat exact = antisym_exp(s_hat, t);
    const Mat factored = antisym_exp(-w * j_hat, t) * d_exp;
    report.omegas.push_back(w);
    report.deltas.push_back(spectral_norm(exact - factored));
  }

  // log-log slope over the scan
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double count = static_cast<double>(report.omegas.size());
  for (size_t i = 0; i < report.omegas.size(); ++i) {
    const double x = std::log(report.omegas[i]);
    const double y = std::log(std::max(report.deltas[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  report.fit_exponent = (count * sxy - sx * sy) / (count * sxx - sx * sx);

  // Complex image of D_c must be a sum of environment-only and local-only
  // Hamiltonians (no interaction part).  Extract the nearest
  // H_E (x) I + I (x) H_A decomposition and report the remainder.
  const CMat h = Complex(0, 1) * real_to_complex_op(d_c, space, 1);
  CMat trace_a = CMat::Zero(n_env, n_env);
  CMat trace_e = CMat::Zero(d, d);
  for (Index e = 0; e < n_env; ++e)
    for (Index f = 0; f < n_env; ++f) {
      Complex acc{};
      for (Index a = 0; a < d; ++a) acc += h(e * d + a, f * d + a);
      trace_a(e, f) = acc;
    }
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) {
      Complex acc{};
      for (Index e = 0; e < n_env; ++e) acc += h(e * d + a, e * d + b);
      trace_e(a, b) = acc;
    }
  const Complex total = h.trace();
  const CMat h_e = trace_a / static_cast<double>(d) -
                   (total / static_cast<double>(n_env * d)) *
                       CMat::Identity(n_env, n_env);
  const CMat h_a = trace_e / static_cast<double>(n_env);
  const CMat model = kron(h_e, CMat::Identity(d, d)) +
                     kron(CMat::Identity(n_env, n_env), h_a);
  report.split_residual = (h - model).norm();
  return report;
}

}  // namespace ubit
