#include "ubit/linalg.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace ubit {

namespace {

constexpr Complex kImag{0.0, 1.0};

}  // namespace

Mat ubit_j() {
  Mat j(2, 2);
  j << 0, -1, 1, 0;
  return j;
}

Mat ubit_x() {
  Mat x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

Mat ubit_z() {
  Mat z(2, 2);
  z << 1, 0, 0, -1;
  return z;
}

CMat pauli_y() {
  CMat y(2, 2);
  y << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return y;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double frob(const Mat& m) { return m.norm(); }
double frob(const CMat& m) { return m.norm(); }

bool is_antisymmetric(const Mat& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = m.norm();
  if (scale == 0.0) return true;
  return (m + m.transpose()).norm() <= rel_tol * scale;
}

void require_square(const Mat& m, const char* who) {
  if (m.rows() != m.cols())
    throw DimMismatch(std::string(who) + ": matrix is not square");
}

std::vector<double> linspace(double t0, double t1, Index n) {
  std::vector<double> ts;
  if (n <= 0) return ts;
  ts.reserve(static_cast<size_t>(n));
  if (n == 1) {
    ts.push_back(t0);
    return ts;
  }
  const double dt = (t1 - t0) / static_cast<double>(n - 1);
  for (Index i = 0; i < n; ++i) ts.push_back(t0 + dt * static_cast<double>(i));
  return ts;
}

Mat SkewSpectrum::exp_at(double t) const {
  const Index n = theta.size();
  CVec phases(n);
  for (Index k = 0; k < n; ++k)
    phases(k) = std::exp(Complex(0, -theta(k) * t));
  CMat q = basis * phases.asDiagonal() * basis.adjoint();
  return q.real();
}

SkewSpectrum skew_spectrum(const Mat& s) {
  require_square(s, "skew_spectrum");
  if (!is_antisymmetric(s))
    throw NonAntisymmetric("skew_spectrum: ||S + S^T|| exceeds tolerance");
  // iS is Hermitian when S is real antisymmetric; its real spectrum carries
  // the rotation rates.
  CMat h = kImag * s.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  if (es.info() != Eigen::Success)
    throw EigFailure("skew_spectrum: eigensolver did not converge");
  SkewSpectrum out;
  out.theta = es.eigenvalues();
  out.basis = es.eigenvectors();
  return out;
}

Mat antisym_exp(const Mat& s, double t) {
  return skew_spectrum(s).exp_at(t);
}

namespace {

template <typename Matrix>
Matrix partial_trace_impl(const Matrix& m, const TensorSpace& space,
                          std::span<const Index> keep) {
  if (m.rows() != space.total() || m.cols() != space.total())
    throw DimMismatch("partial_trace: matrix does not match space");
  if (keep.empty()) throw DimMismatch("partial_trace: empty keep set");
  const TensorSpace sub = space.subspace(keep);

  std::vector<Index> traced;
  {
    size_t ki = 0;
    for (Index f = 0; f < space.factors(); ++f) {
      if (ki < keep.size() && keep[ki] == f) {
        ++ki;
      } else {
        traced.push_back(f);
      }
    }
  }
  Index traced_total = 1;
  for (Index f : traced) traced_total *= space.dim(f);

  Matrix out = Matrix::Zero(sub.total(), sub.total());
  std::vector<Index> multi_row(static_cast<size_t>(space.factors()), 0);
  std::vector<Index> multi_col(static_cast<size_t>(space.factors()), 0);

  for (Index r = 0; r < sub.total(); ++r) {
    const std::vector<Index> rk = sub.unflat(r);
    for (Index c = 0; c < sub.total(); ++c) {
      const std::vector<Index> ck = sub.unflat(c);
      typename Matrix::Scalar acc{};
      for (Index e = 0; e < traced_total; ++e) {
        Index rem = e;
        for (size_t ti = traced.size(); ti-- > 0;) {
          const Index d = space.dim(traced[ti]);
          const Index idx = rem % d;
          rem /= d;
          multi_row[static_cast<size_t>(traced[ti])] = idx;
          multi_col[static_cast<size_t>(traced[ti])] = idx;
        }
        for (size_t ki = 0; ki < keep.size(); ++ki) {
          multi_row[static_cast<size_t>(keep[ki])] = rk[ki];
          multi_col[static_cast<size_t>(keep[ki])] = ck[ki];
        }
        acc += m(space.flat(multi_row), space.flat(multi_col));
      }
      out(r, c) = acc;
    }
  }
  return out;
}

}  // namespace

Mat partial_trace(const Mat& m, const TensorSpace& space,
                  std::span<const Index> keep) {
  return partial_trace_impl(m, space, keep);
}

CMat partial_trace(const CMat& m, const TensorSpace& space,
                   std::span<const Index> keep) {
  return partial_trace_impl(m, space, keep);
}

std::array<std::array<Mat, 2>, 2> ubit_blocks(const Mat& m,
                                              const TensorSpace& space,
                                              Index ubit_factor) {
  if (m.rows() != space.total() || m.cols() != space.total())
    throw DimMismatch("ubit_blocks: matrix does not match space");
  if (ubit_factor < 0 || ubit_factor >= space.factors() ||
      space.dim(ubit_factor) != 2)
    throw DimMismatch("ubit_blocks: designated factor is not two-dimensional");

  Index pre = 1, post = 1;
  for (Index f = 0; f < ubit_factor; ++f) pre *= space.dim(f);
  for (Index f = ubit_factor + 1; f < space.factors(); ++f)
    post *= space.dim(f);
  const Index rest = pre * post;

  std::array<std::array<Mat, 2>, 2> blocks;
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2; ++v) blocks[u][v] = Mat::Zero(rest, rest);

  for (Index pr = 0; pr < pre; ++pr)
    for (Index qr = 0; qr < post; ++qr)
      for (Index pc = 0; pc < pre; ++pc)
        for (Index qc = 0; qc < post; ++qc) {
          const Index br = pr * post + qr;
          const Index bc = pc * post + qc;
          for (int u = 0; u < 2; ++u)
            for (int v = 0; v < 2; ++v) {
              const Index row = (pr * 2 + u) * post + qr;
              const Index col = (pc * 2 + v) * post + qc;
              blocks[u][v](br, bc) = m(row, col);
            }
        }
  return blocks;
}

Mat from_ubit_blocks(const std::array<std::array<Mat, 2>, 2>& blocks,
                     const TensorSpace& space, Index ubit_factor) {
  if (ubit_factor < 0 || ubit_factor >= space.factors() ||
      space.dim(ubit_factor) != 2)
    throw DimMismatch(
        "from_ubit_blocks: designated factor is not two-dimensional");
  Index pre = 1, post = 1;
  for (Index f = 0; f < ubit_factor; ++f) pre *= space.dim(f);
  for (Index f = ubit_factor + 1; f < space.factors(); ++f)
    post *= space.dim(f);
  const Index rest = pre * post;
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2; ++v)
      if (blocks[u][v].rows() != rest || blocks[u][v].cols() != rest)
        throw DimMismatch("from_ubit_blocks: block size mismatch");

  Mat m = Mat::Zero(space.total(), space.total());
  for (Index pr = 0; pr < pre; ++pr)
    for (Index qr = 0; qr < post; ++qr)
      for (Index pc = 0; pc < pre; ++pc)
        for (Index qc = 0; qc < post; ++qc) {
          const Index br = pr * post + qr;
          const Index bc = pc * post + qc;
          for (int u = 0; u < 2; ++u)
            for (int v = 0; v < 2; ++v) {
              const Index row = (pr * 2 + u) * post + qr;
              const Index col = (pc * 2 + v) * post + qc;
              m(row, col) = blocks[u][v](br, bc);
            }
        }
  return m;
}

UbitExpansion ubit_expand(const Mat& m, const TensorSpace& space,
                          Index ubit_factor) {
  const auto b = ubit_blocks(m, space, ubit_factor);
  UbitExpansion out;
  out.a_i = 0.5 * (b[0][0] + b[1][1]);
  out.a_z = 0.5 * (b[0][0] - b[1][1]);
  out.a_x = 0.5 * (b[0][1] + b[1][0]);
  out.a_j = 0.5 * (b[1][0] - b[0][1]);
  return out;
}

Mat ubit_reconstruct(const UbitExpansion& coeffs, const TensorSpace& space,
                     Index ubit_factor) {
  std::array<std::array<Mat, 2>, 2> b;
  b[0][0] = coeffs.a_i + coeffs.a_z;
  b[1][1] = coeffs.a_i - coeffs.a_z;
  b[0][1] = coeffs.a_x - coeffs.a_j;
  b[1][0] = coeffs.a_x + coeffs.a_j;
  return from_ubit_blocks(b, space, ubit_factor);
}

namespace {

// Power series sum_{n} (-1)^n / (n! (n+1)!) (x/2)^{2n+1}, adequate to
// |x| <= 12 in double precision.
double j1_series(double x) {
  const double half = 0.5 * x;
  double term = half;
  double sum = term;
  for (int n = 1; n < 64; ++n) {
    term *= -half * half / (static_cast<double>(n) * (n + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

// Hankel asymptotic expansion for large argument, order 1 (mu = 4).
double j1_asymptotic(double x) {
  const double mu = 4.0;
  const double inv8x = 1.0 / (8.0 * x);
  double u = 1.0;  // running term magnitude
  double p = 1.0, q = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int m = 1; m < 40; ++m) {
    const double odd = static_cast<double>(2 * m - 1);
    u *= (mu - odd * odd) * inv8x / static_cast<double>(m);
    if (std::abs(u) >= prev) break;  // divergent tail reached
    prev = std::abs(u);
    const int k = m / 2;
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    if (m % 2 == 1) {
      q += sgn * u;
    } else {
      p += sgn * u;
    }
    if (std::abs(u) < 1e-18) break;
  }
  const double chi = x - 0.75 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) *
         (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j1(double x) {
  if (!std::isfinite(x)) throw DomainError("bessel_j1: non-finite argument");
  if (std::abs(x) >= 1e6)
    throw DomainError("bessel_j1: argument out of supported range");
  const double ax = std::abs(x);
  const double val = (ax <= 12.0) ? j1_series(ax) : j1_asymptotic(ax);
  return x < 0 ? -val : val;
}

}  // namespace ubit
