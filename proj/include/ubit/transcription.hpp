#pragma once

#include "ubit/linalg.hpp"
#include "ubit/tensor_space.hpp"

namespace ubit {

inline constexpr double kTolComm = 1e-9;      // relative commutator norm
inline constexpr double kTolState = 1e-12;    // hermiticity / trace
inline constexpr double kTolEigFloor = 1e-10; // PSD slack

// Validity checks for the two state representations.  Throw InvalidState.
void check_complex_state(const CMat& sigma);
void check_real_state(const Mat& rho);

// J_U (x) I on the residual factors, with the ubit at the given factor.
Mat j_on(const TensorSpace& space, Index ubit_factor);

// Unique orthogonal (Frobenius) decomposition M = M_c + M_a into parts that
// commute / anticommute with J (x) I.
struct UbitSplit {
  Mat commuting;
  Mat anticommuting;
};
UbitSplit commutant_split(const Mat& m, const TensorSpace& space,
                          Index ubit_factor);

// M (commuting with J (x) I) -> M_00 + i M_10 on the non-ubit factors.
// Faithful multiplication homomorphism.  Throws NotCommuting with the
// relative commutator norm in the message.
CMat real_to_complex_op(const Mat& m, const TensorSpace& space,
                        Index ubit_factor);

// Inverse direction for generic operators: I (x) Re(M) + J (x) Im(M) with the
// ubit factor first.
Mat complex_to_real_op(const CMat& m);

// sigma -> rho = (I_U (x) Re sigma + J_U (x) Im sigma)/2 on U (x) A.
Mat complex_to_real_state(const CMat& sigma);

// rho (commuting with J (x) I) -> sigma = 2(rho_00 + i rho_10).
CMat real_to_complex_state(const Mat& rho, const TensorSpace& space,
                           Index ubit_factor);
CMat real_to_complex_state(const Mat& rho);  // U (x) A, ubit first

// S = I_U (x) Re(-i U H U^dag) + J_U (x) Im(-i U H U^dag) on U (x) A.
// u_split defaults to the identity; pass a unitary change of basis to move
// the real-imaginary split.  hbar = 1 throughout.
Mat hamiltonian_to_stueckelbergian(const CMat& h, const CMat& u_split);
Mat hamiltonian_to_stueckelbergian(const CMat& h);

// Unitary that makes U H U^dag real (diagonal), for the "real basis" split.
CMat real_basis_split(const CMat& h);

}  // namespace ubit
