#include "ubit/transcription.hpp"

#include <cmath>
#include <sstream>

namespace ubit {

namespace {

constexpr Complex kImag{0.0, 1.0};

void require_hermitian(const CMat& h, const char* who) {
  if (h.rows() != h.cols())
    throw NotHermitian(std::string(who) + ": matrix not square");
  const double scale = std::max(1.0, h.norm());
  if ((h - h.adjoint()).norm() > 1e-10 * scale)
    throw NotHermitian(std::string(who) + ": matrix not Hermitian");
}

void require_unitary(const CMat& u, const char* who) {
  if (u.rows() != u.cols())
    throw NotUnitary(std::string(who) + ": matrix not square");
  CMat res = u.adjoint() * u - CMat::Identity(u.rows(), u.cols());
  if (res.norm() > 1e-9 * std::sqrt(static_cast<double>(u.rows())))
    throw NotUnitary(std::string(who) + ": matrix not unitary");
}

}  // namespace

void check_complex_state(const CMat& sigma) {
  if (sigma.rows() != sigma.cols())
    throw InvalidState("complex state: not square");
  if ((sigma - sigma.adjoint()).norm() > kTolState * std::max(1.0, sigma.norm()))
    throw InvalidState("complex state: not Hermitian");
  if (std::abs(sigma.trace().real() - 1.0) > 1e-10 ||
      std::abs(sigma.trace().imag()) > 1e-12)
    throw InvalidState("complex state: trace != 1");
  Eigen::SelfAdjointEigenSolver<CMat> es(sigma, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kTolEigFloor)
    throw InvalidState("complex state: negative eigenvalue");
}

void check_real_state(const Mat& rho) {
  if (rho.rows() != rho.cols()) throw InvalidState("real state: not square");
  if ((rho - rho.transpose()).norm() > kTolState * std::max(1.0, rho.norm()))
    throw InvalidState("real state: not symmetric");
  if (std::abs(rho.trace() - 1.0) > 1e-10)
    throw InvalidState("real state: trace != 1");
  Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw InvalidState("real state: negative eigenvalue");
}

Mat j_on(const TensorSpace& space, Index ubit_factor) {
  std::array<std::array<Mat, 2>, 2> blocks;
  Index rest = space.total() / 2;
  blocks[0][0] = Mat::Zero(rest, rest);
  blocks[1][1] = Mat::Zero(rest, rest);
  blocks[0][1] = -Mat::Identity(rest, rest);
  blocks[1][0] = Mat::Identity(rest, rest);
  return from_ubit_blocks(blocks, space, ubit_factor);
}

UbitSplit commutant_split(const Mat& m, const TensorSpace& space,
                          Index ubit_factor) {
  auto b = ubit_blocks(m, space, ubit_factor);
  // Conjugation by J (x) I maps blocks (00,01,10,11) -> (11,-10,-01,00); the
  // commuting part averages M with -J M J.
  UbitSplit out;
  std::array<std::array<Mat, 2>, 2> c, a;
  c[0][0] = 0.5 * (b[0][0] + b[1][1]);
  c[1][1] = c[0][0];
  c[0][1] = 0.5 * (b[0][1] - b[1][0]);
  c[1][0] = -c[0][1];
  a[0][0] = 0.5 * (b[0][0] - b[1][1]);
  a[1][1] = -a[0][0];
  a[0][1] = 0.5 * (b[0][1] + b[1][0]);
  a[1][0] = a[0][1];
  out.commuting = from_ubit_blocks(c, space, ubit_factor);
  out.anticommuting = from_ubit_blocks(a, space, ubit_factor);
  return out;
}

CMat real_to_complex_op(const Mat& m, const TensorSpace& space,
                        Index ubit_factor) {
  const Mat j = j_on(space, ubit_factor);
  const double scale = m.norm();
  const double comm = (m * j - j * m).norm();
  if (scale > 0 && comm > kTolComm * scale) {
    std::ostringstream msg;
    msg << "real_to_complex_op: operator does not commute with J (x) I "
        << "(relative commutator norm " << comm / scale << ")";
    throw NotCommuting(msg.str());
  }
  auto b = ubit_blocks(m, space, ubit_factor);
  return b[0][0].cast<Complex>() + kImag * b[1][0].cast<Complex>();
}

Mat complex_to_real_op(const CMat& m) {
  const Index d = m.rows();
  TensorSpace space({2, d});
  std::array<std::array<Mat, 2>, 2> b;
  b[0][0] = m.real();
  b[1][1] = m.real();
  b[0][1] = -m.imag();
  b[1][0] = m.imag();
  return from_ubit_blocks(b, space, 0);
}

Mat complex_to_real_state(const CMat& sigma) {
  check_complex_state(sigma);
  return 0.5 * complex_to_real_op(sigma);
}

CMat real_to_complex_state(const Mat& rho, const TensorSpace& space,
                           Index ubit_factor) {
  check_real_state(rho);
  CMat sigma = 2.0 * real_to_complex_op(rho, space, ubit_factor);
  return sigma;
}

CMat real_to_complex_state(const Mat& rho) {
  TensorSpace space({2, rho.rows() / 2});
  return real_to_complex_state(rho, space, 0);
}

Mat hamiltonian_to_stueckelbergian(const CMat& h, const CMat& u_split) {
  require_hermitian(h, "hamiltonian_to_stueckelbergian");
  require_unitary(u_split, "hamiltonian_to_stueckelbergian");
  if (u_split.rows() != h.rows())
    throw DimMismatch("hamiltonian_to_stueckelbergian: basis change size");
  CMat gen = -kImag * (u_split * h * u_split.adjoint());
  const Index d = h.rows();
  TensorSpace space({2, d});
  std::array<std::array<Mat, 2>, 2> b;
  b[0][0] = gen.real();
  b[1][1] = gen.real();
  b[0][1] = -gen.imag();
  b[1][0] = gen.imag();
  Mat s = from_ubit_blocks(b, space, 0);
  if (!is_antisymmetric(s, 1e-9))
    throw NotHermitian(
        "hamiltonian_to_stueckelbergian: transcription not antisymmetric");
  return s;
}

Mat hamiltonian_to_stueckelbergian(const CMat& h) {
  return hamiltonian_to_stueckelbergian(
      h, CMat::Identity(h.rows(), h.cols()));
}

CMat real_basis_split(const CMat& h) {
  require_hermitian(h, "real_basis_split");
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  if (es.info() != Eigen::Success)
    throw EigFailure("real_basis_split: eigensolver did not converge");
  return es.eigenvectors().adjoint();
}

}  // namespace ubit
