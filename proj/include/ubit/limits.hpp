#pragma once

#include <span>
#include <vector>

#include "ubit/linalg.hpp"

namespace ubit {

// e^{St} = S sin(sqrt(S^T S) t)/sqrt(S^T S) + cos(sqrt(S^T S) t), evaluated
// through the symmetric eigendecomposition of S^T S with a guarded sinc.
// An independent algebraic route to the same orthogonal matrix as
// antisym_exp.
Mat sincos_exponential(const Mat& s, double t);

struct LimitReport {
  std::vector<double> omegas;
  std::vector<double> deltas;       // ||e^{S t} - e^{-J w t} e^{D_c t}||_2
  double fit_exponent = 0;          // slope of log delta vs log omega
  double split_residual = 0;        // interaction part of the complex image
};

// D = s B (x) I_A + I_E (x) S_UA, D_c = (D - J D J)/2.  Scans the deviation
// of the factorized large-omega evolution from the exact one and checks that
// the complex image of D_c splits as H_E (x) I + I (x) H_A.
LimitReport large_omega_scan(const Mat& b_eu, const Mat& s_ua, double s,
                             std::span<const double> omegas, double t);

}  // namespace ubit
