#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <span>
#include <vector>

#include "ubit/errors.hpp"
#include "ubit/tensor_space.hpp"

namespace ubit {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr double kTolAntisym = 1e-10;  // relative, ||S + S^T|| / ||S||
inline constexpr double kTolOrth = 1e-9;      // absolute Frobenius

// 2x2 building blocks on the ubit space.  J is the rotation generator that
// squares to -I and plays the role of the imaginary unit.
Mat ubit_j();
Mat ubit_x();
Mat ubit_z();
CMat pauli_y();

Mat kron(const Mat& a, const Mat& b);
CMat kron(const CMat& a, const CMat& b);

// Spectral form of a real antisymmetric matrix: S = W diag(-i theta) W^dag
// with W unitary and theta real (the eigenvalues of iS).  One decomposition
// serves every evaluation time.
struct SkewSpectrum {
  Vec theta;
  CMat basis;

  // e^{St}, orthogonal.
  Mat exp_at(double t) const;
};

SkewSpectrum skew_spectrum(const Mat& s);

// e^{St} for real antisymmetric S.  Throws NonAntisymmetric if
// ||S + S^T||_F > kTolAntisym * ||S||_F, EigFailure if the eigensolver fails.
Mat antisym_exp(const Mat& s, double t);

// Partial trace keeping the listed factors (indices into space.dims(),
// strictly increasing).  Trace-preserving and linear.
Mat partial_trace(const Mat& m, const TensorSpace& space,
                  std::span<const Index> keep);
CMat partial_trace(const CMat& m, const TensorSpace& space,
                   std::span<const Index> keep);

// The four blocks of M with respect to the ubit factor: blocks[u][u'] acts on
// the remaining factors.
std::array<std::array<Mat, 2>, 2> ubit_blocks(const Mat& m,
                                              const TensorSpace& space,
                                              Index ubit_factor);
Mat from_ubit_blocks(const std::array<std::array<Mat, 2>, 2>& blocks,
                     const TensorSpace& space, Index ubit_factor);

// Coefficients of M = I_U (x) a_i + J_U (x) a_j + X_U (x) a_x + Z_U (x) a_z,
// each coefficient acting on the non-ubit factors.  Reconstruction is exact
// for every M; the J pairing uses Tr(J^T .)/2 so that the antisymmetric basis
// element carries no sign surprise.
struct UbitExpansion {
  Mat a_i, a_j, a_x, a_z;
};

UbitExpansion ubit_expand(const Mat& m, const TensorSpace& space,
                          Index ubit_factor);
Mat ubit_reconstruct(const UbitExpansion& coeffs, const TensorSpace& space,
                     Index ubit_factor);

// Bessel function of the first kind, order 1.  Power series for |x| <= 12,
// Hankel asymptotic expansion beyond; odd in x.  Throws DomainError for
// non-finite input or |x| >= 1e6.
double bessel_j1(double x);

// Small helpers shared across modules.
double frob(const Mat& m);
double frob(const CMat& m);
bool is_antisymmetric(const Mat& m, double rel_tol = kTolAntisym);
void require_square(const Mat& m, const char* who);

std::vector<double> linspace(double t0, double t1, Index n);

}  // namespace ubit
