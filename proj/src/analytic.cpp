#include "ubit/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ubit/projected.hpp"

namespace ubit {

namespace {

// J1(x)/x with the removable singularity handled by series.
double j1_over_x(double x) {
  if (std::abs(x) < 1e-6) return 0.5 - x * x / 16.0;
  return bessel_j1(x) / x;
}

}  // namespace

double predict_gamma(double s, double omega, double t) {
  if (!(omega > 0)) throw DomainError("predict_gamma: omega must be > 0");
  const double lam = s / omega;
  // [J1(2st)/(omega t)]^2 = lambda^2 [J1(2st)/(st)]^2 -> lambda^2 at t = 0.
  const double env = 2.0 * j1_over_x(2.0 * s * t);  // J1(2st)/(st)
  return 1.0 - lam * lam +
         lam * lam * env * env * std::cos(2.0 * omega * t);
}

std::pair<double, double> predict_beta(double s, double omega, double t) {
  if (!(omega > 0)) throw DomainError("predict_beta: omega must be > 0");
  double env = 1.0;
  if (s > 0) env = 2.0 * j1_over_x(2.0 * s * t);
  const double e2 = env * env;
  return {e2 * std::cos(2.0 * omega * t), e2 * std::sin(2.0 * omega * t)};
}

double PrecessionPrediction::envelope(double t) const {
  const double x = 0.5 * lambda * lambda * lambda * big_omega * t;
  return std::abs(2.0 * j1_over_x(x));
}

double PrecessionPrediction::bx(double t) const {
  return envelope(t) * std::cos(xi * big_omega * t);
}

double PrecessionPrediction::by(double t) const {
  return xi * envelope(t) * std::sin(xi * big_omega * t);
}

double PrecessionPrediction::tau() const {
  const double cube = lambda * lambda * lambda;
  if (cube * big_omega == 0) return std::numeric_limits<double>::infinity();
  return 1.0 / (cube * big_omega);
}

double PrecessionPrediction::t_star() const {
  const double cube = lambda * lambda * lambda;
  if (cube * big_omega == 0) return std::numeric_limits<double>::infinity();
  // Bisection on x: 2 J1(x)/x = 1/e; the crossing sits between 2 and 3.
  double lo = 1e-8, hi = 3.8;  // below the first zero of J1
  const double target = 1.0 / std::numbers::e;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (2.0 * j1_over_x(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x_star = 0.5 * (lo + hi);
  return 2.0 * x_star / (cube * big_omega);
}

PrecessionPrediction predict_precession(double lambda, double big_omega) {
  if (lambda < 0) throw DomainError("predict_precession: lambda must be >= 0");
  PrecessionPrediction p;
  p.lambda = lambda;
  p.big_omega = big_omega;
  p.xi = 1.0 - 0.5 * lambda * lambda;
  return p;
}

PerturbationSeries perturbation_expansion(const SpectralData& spec,
                                          double denom_tol_scale) {
  const Index n_env = spec.env_dim;
  const double lam = spec.lambda();
  const CMat& a = spec.cross;  // a(n, m) = <Phi_n^+|V|Phi_m^->
  const Vec& v = spec.v;

  PerturbationSeries out;
  // Spread-scaled guard for the small denominators v_n - v_k.
  const double spread = (n_env > 1) ? (v.maxCoeff() - v.minCoeff()) : 1.0;
  out.denom_tol = denom_tol_scale * std::max(spread, 1e-12);

  // (V P_- V) restricted to the positive block, and the diagonal of
  // V P_- V P_- V.
  const CMat vpv = a * a.adjoint();
  Vec vpvpv_diag(n_env);
  for (Index n = 0; n < n_env; ++n) {
    Complex acc{};
    for (Index k = 0; k < n_env; ++k)
      acc += a(n, k) * (-v(k)) * std::conj(a(n, k));
    vpvpv_diag(n) = acc.real();
  }

  out.g_order1.resize(n_env);
  out.g_order2.resize(n_env);
  out.g_order3.resize(n_env);
  out.psi_order1.resize(2 * n_env, n_env);
  out.psi_order2.resize(2 * n_env, n_env);

  const CMat phi_minus = spec.phi_plus.conjugate();

  for (Index n = 0; n < n_env; ++n) {
    const double first = lam * v(n);
    const double second = 0.5 * lam * lam * vpv(n, n).real();
    double sum3 = 0;
    for (Index k = 0; k < n_env; ++k) {
      if (k == n) continue;
      const double denom = v(n) - v(k);
      if (std::abs(denom) < out.denom_tol) {
        ++out.flagged_terms;  // principal-value style symmetric exclusion
        continue;
      }
      sum3 += std::norm(vpv(n, k)) / denom;
    }
    const double third =
        0.25 * lam * lam * lam *
        (vpvpv_diag(n) - v(n) * vpv(n, n).real() + sum3);
    out.g_order1(n) = 1.0 + first;
    out.g_order2(n) = 1.0 + first + second;
    out.g_order3(n) = 1.0 + first + second + third;

    // First-order eigenvector correction:
    //   (lambda/2)[ P_- V |Phi_n^+> + sum'_k (VP_-V)_{kn}/(v_n - v_k) |Phi_k^+> ]
    CVec corr1 = CVec::Zero(2 * n_env);
    for (Index k = 0; k < n_env; ++k)
      corr1 += std::conj(a(n, k)) * phi_minus.col(k);
    CVec corr1_plus = CVec::Zero(2 * n_env);
    for (Index k = 0; k < n_env; ++k) {
      if (k == n) continue;
      const double denom = v(n) - v(k);
      if (std::abs(denom) < out.denom_tol) continue;
      corr1_plus += (vpv(k, n) / denom) * spec.phi_plus.col(k);
    }
    const CVec psi1 =
        spec.phi_plus.col(n) + 0.5 * lam * (corr1 + corr1_plus);

    // Second-order correction.
    CVec corr2 = CVec::Zero(2 * n_env);
    // P_- V P_- V |Phi_n^+>: minus-branch coefficients (-v_k) conj(a(n,k)).
    for (Index k = 0; k < n_env; ++k)
      corr2 += (-v(k)) * std::conj(a(n, k)) * phi_minus.col(k);
    // -V_nn P_- V |Phi_n^+>
    for (Index k = 0; k < n_env; ++k)
      corr2 -= v(n) * std::conj(a(n, k)) * phi_minus.col(k);
    // -(1/2)(VP_-V)_nn |Phi_n^+>
    corr2 -= 0.5 * vpv(n, n).real() * spec.phi_plus.col(n);
    for (Index k = 0; k < n_env; ++k) {
      if (k == n) continue;
      const double denom = v(n) - v(k);
      if (std::abs(denom) < out.denom_tol) continue;
      // (VP_-V)_{kn}/(v_n - v_k) P_- V |Phi_k^+>
      for (Index m = 0; m < n_env; ++m)
        corr2 += (vpv(k, n) / denom) * std::conj(a(k, m)) * phi_minus.col(m);
      corr2 -= (vpv(k, n) * vpv(n, n).real() / (denom * denom)) *
               spec.phi_plus.col(k);
      corr2 -= (0.5 * std::norm(vpv(k, n)) / (denom * denom)) *
               spec.phi_plus.col(n);
      // (VP_-VP_-V)_{kn}/(v_n - v_k) |Phi_k^+>
      Complex vpvpv_kn{};
      for (Index m = 0; m < n_env; ++m)
        vpvpv_kn += a(k, m) * (-v(m)) * std::conj(a(n, m));
      corr2 += (vpvpv_kn / denom) * spec.phi_plus.col(k);
      corr2 -= (vpv(k, n) * v(n) / denom) * spec.phi_plus.col(k);
      for (Index l = 0; l < n_env; ++l) {
        if (l == n) continue;
        const double denom_l = v(n) - v(l);
        if (std::abs(denom_l) < out.denom_tol) continue;
        corr2 += (vpv(k, l) * vpv(l, n) / (denom * denom_l)) *
                 spec.phi_plus.col(k);
      }
    }
    CVec psi2 = psi1 + 0.25 * lam * lam * corr2;

    out.psi_order1.col(n) = psi1.normalized();
    out.psi_order2.col(n) = psi2.normalized();
  }
  return out;
}

double semicircle_density(double v) {
  const double arg = 1.0 - 0.25 * v * v;
  if (arg <= 0) return 0;
  return std::sqrt(arg) / std::numbers::pi;
}

SemicircleReport semicircle_checks(const SpectralData& spec) {
  const Vec& v = spec.v;
  const Index n = v.size();
  SemicircleReport rep;
  rep.v_rms = std::sqrt(v.squaredNorm() / static_cast<double>(n));
  rep.v_min = v.minCoeff();
  rep.v_max = v.maxCoeff();

  // Semicircle CDF by closed form: F(v) = 1/2 + [v sqrt(4-v^2)/4 +
  // asin(v/2)] / pi on [-2, 2].
  auto cdf = [](double x) {
    if (x <= -2) return 0.0;
    if (x >= 2) return 1.0;
    return 0.5 +
           (0.25 * x * std::sqrt(4.0 - x * x) + std::asin(0.5 * x)) /
               std::numbers::pi;
  };
  double sup = 0;
  for (Index i = 0; i < n; ++i) {
    const double below = static_cast<double>(i) / static_cast<double>(n);
    const double above = static_cast<double>(i + 1) / static_cast<double>(n);
    const double f = cdf(v(i));
    sup = std::max(sup, std::max(std::abs(f - below), std::abs(f - above)));
  }
  rep.sup_distance = sup;
  return rep;
}

}  // namespace ubit
