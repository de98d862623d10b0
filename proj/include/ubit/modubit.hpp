#pragma once

#include <optional>

#include "ubit/linalg.hpp"
#include "ubit/projected.hpp"

namespace ubit {

// Orthogonal redefinition of the ubit that absorbs part of the environment:
// O = O2 O1 with O1 = sum_n (|Phi_n^+><Psi_n^+| + conj), O2 the transcribed
// form of the unitary mapping |phi_n^+> to the chosen environment basis.
// O |Psi_n^+><Psi_n^+| O^T = (1/2)|n><n| (x) (I_U - i J_U).
struct ModifiedUbitFrame {
  Mat o;  // 2N x 2N real orthogonal
};

// env_basis: optional real orthonormal N x N basis (columns |n>); defaults to
// the coordinate basis.  Throws NotOrthogonal if the assembled frame fails
// its realness or orthogonality checks.
ModifiedUbitFrame build_frame(const SpectralData& spec,
                              const Mat* env_basis = nullptr);

// rho_{U'A} = Tr_E (O (x) I_A) rho_hat (O (x) I_A)^T for a dense state on
// E (x) U (x) A.
Mat rho_modified(const Mat& rho_hat, const ModifiedUbitFrame& frame,
                 Index local_dim);

// Structured path for projected states: equals
// (I_U (x) Re sigma + J_U (x) Im sigma)/2 with sigma = 2 sum_n sigma_n.
Mat rho_modified(const ProjectedState& state, const SpectralData& spec,
                 const ModifiedUbitFrame& frame);

// Environment-ubit marginal operators of an Alice-prepared state with
// weights c: calI = Gamma+ + Gamma-, calJ = i(Gamma+ - Gamma-).
Mat cal_i(const SpectralData& spec, const Vec& weights);
Mat cal_j(const SpectralData& spec, const Vec& weights);

// O (x) I_A, for readout-frame use with ExactPropagator.
Mat expand_frame(const ModifiedUbitFrame& frame, Index local_dim);

}  // namespace ubit
