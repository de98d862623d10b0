#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ubit/linalg.hpp"

namespace ubit {

struct SpectralData;  // projected.hpp

// gamma(t) = 1 - lambda^2 + [J1(2st)/(omega t)]^2 cos(2 omega t),
// continuous at t = 0 (gamma(0) = 1) through the small-argument series.
double predict_gamma(double s, double omega, double t);

// beta_x = [J1(2st)/(st)]^2 cos(2 omega t), beta_z the sine partner.
// s = 0 degenerates to envelope 1.
std::pair<double, double> predict_beta(double s, double omega, double t);

// Closed-form precession model: frequency factor xi = 1 - lambda^2/2,
// decoherence envelope f(t) = |2 J1(x)/x| with x = lambda^3 Omega t / 2,
// y-component shortening by xi, and the 1/e crossing time of f.
struct PrecessionPrediction {
  double lambda = 0;
  double big_omega = 0;
  double xi = 1;

  double envelope(double t) const;     // f(t), f(0) = 1
  double bx(double t) const;           // f cos(xi Omega t)
  double by(double t) const;           // xi f sin(xi Omega t)
  double t_star() const;               // f(t_star) = 1/e
  double tau() const;                  // 1 / (lambda^3 Omega)
};

PrecessionPrediction predict_precession(double lambda, double big_omega);

// Appendix-style perturbative approximants computed from the unperturbed
// basis of a spectral decomposition: g_n through third order in lambda and
// the positive-branch eigenvectors through second order (unit-normalized).
// Near-degenerate denominators |v_n - v_k| < denom_tol are excluded
// symmetrically and counted in flagged_terms.
struct PerturbationSeries {
  Vec g_order1, g_order2, g_order3;  // cumulative approximants
  CMat psi_order1, psi_order2;       // 2N x N, columns are eigenvectors
  int flagged_terms = 0;
  double denom_tol = 0;
};

PerturbationSeries perturbation_expansion(const SpectralData& spec,
                                          double denom_tol_scale = 1e-6);

// Semicircle density eta(v)/N = sqrt(1 - (v/2)^2)/pi on [-2, 2].
double semicircle_density(double v);

struct SemicircleReport {
  double v_rms = 0;          // should be near 1
  double sup_distance = 0;   // empirical CDF vs semicircle CDF
  double v_min = 0, v_max = 0;
};

SemicircleReport semicircle_checks(const SpectralData& spec);

}  // namespace ubit
