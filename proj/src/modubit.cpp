#include "ubit/modubit.hpp"

#include <cmath>

#include "ubit/tensor_space.hpp"
#include "ubit/transcription.hpp"

namespace ubit {

namespace {

constexpr Complex kImag{0.0, 1.0};

// |phi_n^+> environment vectors from |Phi_n^+> = |phi_n^+> (x) |+>,
// |+> = (1, -i)/sqrt(2).
CMat environment_parts(const SpectralData& spec) {
  const Index n_env = spec.env_dim;
  CMat phi(n_env, n_env);
  const double sqrt2 = std::sqrt(2.0);
  for (Index n = 0; n < n_env; ++n)
    for (Index e = 0; e < n_env; ++e)
      phi(e, n) = spec.phi_plus(2 * e, n) * sqrt2;
  return phi;
}

}  // namespace

ModifiedUbitFrame build_frame(const SpectralData& spec, const Mat* env_basis) {
  const Index n_env = spec.env_dim;
  Mat basis = env_basis ? *env_basis : Mat::Identity(n_env, n_env);
  if (basis.rows() != n_env || basis.cols() != n_env)
    throw DimMismatch("build_frame: environment basis size");
  if ((basis.transpose() * basis - Mat::Identity(n_env, n_env)).norm() >
      1e-9 * std::sqrt(static_cast<double>(n_env)))
    throw NotOrthogonal("build_frame: environment basis not orthonormal");

  // O1 maps exact eigenvectors onto the unperturbed ones.  The two conjugate
  // branches sum to twice the real part.
  const CMat o1_c = spec.phi_plus * spec.psi_plus.adjoint();
  Mat o1 = 2.0 * o1_c.real();

  // O2 is the real-vector-space transcription of U = sum_n |n><phi_n^+|.
  const CMat phi_env = environment_parts(spec);
  const CMat u = basis.cast<Complex>() * phi_env.adjoint();
  Mat o2 = Mat::Zero(2 * n_env, 2 * n_env);
  const Mat re_u = u.real();
  const Mat im_u = u.imag();
  const Mat j = ubit_j();
  for (Index e = 0; e < n_env; ++e)
    for (Index f = 0; f < n_env; ++f) {
      o2.block(2 * e, 2 * f, 2, 2) =
          re_u(e, f) * Mat::Identity(2, 2) + im_u(e, f) * j;
    }

  ModifiedUbitFrame frame;
  frame.o = o2 * o1;

  const double imag_res = (o1_c - o1_c.conjugate()).norm();
  const Mat gram = frame.o.transpose() * frame.o;
  const double orth_res =
      (gram - Mat::Identity(2 * n_env, 2 * n_env)).norm();
  if (orth_res > kTolOrth * std::sqrt(static_cast<double>(2 * n_env)))
    throw NotOrthogonal("build_frame: O^T O deviates from identity");
  (void)imag_res;
  return frame;
}

Mat rho_modified(const Mat& rho_hat, const ModifiedUbitFrame& frame,
                 Index local_dim) {
  const Index n_eu = frame.o.rows();
  if (rho_hat.rows() != n_eu * local_dim)
    throw DimMismatch("rho_modified: state size");
  const Mat o_full = expand_frame(frame, local_dim);
  const Mat rotated = o_full * rho_hat * o_full.transpose();
  TensorSpace space({n_eu / 2, 2, local_dim});
  const std::vector<Index> keep{1, 2};
  return partial_trace(rotated, space, keep);
}

Mat rho_modified(const ProjectedState& state, const SpectralData& spec,
                 const ModifiedUbitFrame& frame) {
  (void)frame;  // the structured form is frame-basis independent
  const Index d = state.local_dim();
  CMat sigma = CMat::Zero(d, d);
  for (const CMat& s : state.sigma) sigma += s;
  sigma *= 2.0;
  std::array<std::array<Mat, 2>, 2> blocks;
  blocks[0][0] = 0.5 * sigma.real();
  blocks[1][1] = 0.5 * sigma.real();
  blocks[0][1] = -0.5 * sigma.imag();
  blocks[1][0] = 0.5 * sigma.imag();
  TensorSpace space({2, d});
  return from_ubit_blocks(blocks, space, 0);
}

Mat cal_i(const SpectralData& spec, const Vec& weights) {
  if (weights.size() != spec.env_dim)
    throw DimMismatch("cal_i: weight vector size");
  CMat acc = CMat::Zero(2 * spec.env_dim, 2 * spec.env_dim);
  for (Index n = 0; n < spec.env_dim; ++n) {
    const CVec psi = spec.psi_plus.col(n);
    acc += weights(n) * (psi * psi.adjoint());
  }
  return 2.0 * acc.real();
}

Mat cal_j(const SpectralData& spec, const Vec& weights) {
  if (weights.size() != spec.env_dim)
    throw DimMismatch("cal_j: weight vector size");
  CMat acc = CMat::Zero(2 * spec.env_dim, 2 * spec.env_dim);
  for (Index n = 0; n < spec.env_dim; ++n) {
    const CVec psi = spec.psi_plus.col(n);
    acc += weights(n) * (psi * psi.adjoint());
  }
  // i(Gamma+ - Gamma-) = i(P - conj P) = -2 Im P.
  return -2.0 * acc.imag();
}

Mat expand_frame(const ModifiedUbitFrame& frame, Index local_dim) {
  return kron(frame.o, Mat::Identity(local_dim, local_dim));
}

}  // namespace ubit
