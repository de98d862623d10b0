#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ubit/linalg.hpp"
#include "ubit/model.hpp"

namespace ubit {

// Eigendecomposition of the environment-ubit generator, organized around the
// Hermitian G = i S_EU / omega = G_0 + lambda V with V = i B_EU.  Only the
// positive branch is stored; the negative branch consists of the complex
// conjugates with negated eigenvalues.
struct SpectralData {
  Index env_dim = 0;
  double coupling = 0;  // s
  double omega = 0;

  Vec g;          // positive eigenvalues of G, ascending (N)
  CMat psi_plus;  // 2N x N, exact eigenvectors
  Vec v;          // eigenvalues of V^+ = P_+ V P_+, ascending (N)
  CMat phi_plus;  // 2N x N, unperturbed basis diagonalizing V^+
  CMat cross;     // cross[n][m] = <Phi_n^+ | V | Phi_m^->
  std::vector<Index> match;  // psi column n -> phi column index

  double lambda() const { return coupling / omega; }
};

// Throws DegenerateSpectrum when adjacent positive-branch eigenvalues of
// S_EU are closer than gap_tol_scale * omega (reseed the coupling in that
// case); s = 0 falls back to the unperturbed construction.
SpectralData spectral_decompose(const Mat& b_eu, double s, double omega,
                                double gap_tol_scale = 1e-8);

// nu_j = -i <Psi_j| I_E (x) J_U |Psi_j> for the positive branch, with the
// second-order approximant xi = 1 - lambda^2/2 and the third-order
// approximant xi + lambda^3 v_n / 4.  The negative branch is the negative.
struct NuSpectrum {
  Vec exact;
  Vec second_order;
  Vec third_order;
};

NuSpectrum compute_nu(const SpectralData& spec);

enum class NuMode { Exact, SecondOrder, ThirdOrder };

// rho_parallel = sum_n ( |Psi_n^+><Psi_n^+| (x) sigma[n]
//                      + |Psi_n^-><Psi_n^-| (x) conj(sigma[n]) ).
// Unit trace means 2 Re sum_n tr sigma[n] = 1.
struct ProjectedState {
  std::vector<CMat> sigma;  // positive branch, d x d
  Index local_dim() const {
    return sigma.empty() ? 0 : sigma.front().rows();
  }
};

// S_UA = I_U (x) L - J_U (x) K with L antisymmetric, K symmetric.  Any
// X_U/Z_U component of a supplied generator is split off; its norm is
// reported through dropped_norm.
struct LocalGenerator {
  Mat k;  // symmetric
  Mat l;  // antisymmetric
};

LocalGenerator split_local_generator(const Mat& s_ua,
                                     double* dropped_norm = nullptr);
Mat local_generator_matrix(const LocalGenerator& gen);  // back to S_UA

// Projection weights for rho_hat(0) = (1/N) I_E (x) rho_UA.
ProjectedState project_ua_state(const Mat& rho_ua, const SpectralData& spec);

// Generic product initial state rho_EU (x) rho_A.
ProjectedState project_product_state(const Mat& rho_eu, const Mat& rho_a,
                                     const SpectralData& spec);

// The projection superoperator P(M) = sum_j |Psi_j><Psi_j| (x)
// <Psi_j|M|Psi_j>_A on a dense matrix over (E (x) U) (x) A.  Test-scale only.
Mat apply_projection(const Mat& m, const SpectralData& spec, Index local_dim);

// Per-eigenvector effective evolution d sigma_j/dt = -i [nu_j K + i L, sigma_j].
// Returns rho_UA(t) at each time; out_states receives the evolved projected
// states when non-null.
std::vector<Mat> evolve_projected(const ProjectedState& initial,
                                  const LocalGenerator& gen,
                                  const SpectralData& spec,
                                  std::span<const double> times, NuMode mode,
                                  std::vector<ProjectedState>* out_states =
                                      nullptr);

Mat reconstruct_rho_ua(const ProjectedState& state, const SpectralData& spec);
Mat reconstruct_full(const ProjectedState& state, const SpectralData& spec);
Mat eu_marginal(const ProjectedState& state, const SpectralData& spec);

// Isolated pair A, B coupled only through the ubit:
// S_UAB = (I_U (x) L_A - J_U (x) K_A) (x) I_B + I_A (x) (...B...).
struct NoSignalingSetup {
  Mat k_alice, l_alice;                     // Alice's generator (d_A)
  std::vector<std::pair<Mat, Mat>> bobs;    // candidate (K_B, L_B) pairs
  CMat sigma_a0, sigma_b0;                  // initial complex states
};

struct NoSignalingReport {
  std::vector<double> divergence;  // sup_t ||rho_UA - rho_UA(ref)||_F per Bob
  double max_divergence = 0;
};

NoSignalingReport no_signaling_projected(const SpectralData& spec,
                                         const NoSignalingSetup& setup,
                                         std::span<const double> times);

// Same comparison under exact finite-(s, omega, N) dynamics; the divergence
// is reported, not asserted small.
NoSignalingReport no_signaling_exact(const ModelParams& params,
                                     const Mat& b_eu,
                                     const NoSignalingSetup& setup,
                                     std::span<const double> times);

}  // namespace ubit
