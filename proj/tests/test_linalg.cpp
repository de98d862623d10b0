#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "ubit/linalg.hpp"

using namespace ubit;

TEST_SUITE("linalg") {

TEST_CASE("antisym_exp of the 2x2 rotation generator") {
  const double omega = 1.7;
  const Mat s = omega * ubit_j();
  for (double t : {0.0, 0.3, 2.0, -1.1}) {
    const Mat q = antisym_exp(s, t);
    Mat expected(2, 2);
    expected << std::cos(omega * t), -std::sin(omega * t),
        std::sin(omega * t), std::cos(omega * t);
    CHECK((q - expected).norm() < 1e-12);
  }
}

TEST_CASE("antisym_exp of zero is the identity") {
  const Mat s = Mat::Zero(5, 5);
  for (double t : {0.0, 1.0, 100.0})
    CHECK((antisym_exp(s, t) - Mat::Identity(5, 5)).norm() < 1e-14);
}

TEST_CASE("antisym_exp matches the truncated Taylor oracle") {
  auto gen = oracles::rng(42);
  const Mat s = oracles::random_antisymmetric(6, gen);
  const double t = 0.7;
  const Mat q = antisym_exp(s, t);
  const Mat oracle = oracles::taylor_expm(s, t, 40);
  CHECK((q - oracle).norm() < 1e-10);
}

TEST_CASE("antisym_exp output is orthogonal") {
  auto gen = oracles::rng(7);
  for (int rep = 0; rep < 5; ++rep) {
    const Index n = 4 + 2 * rep;
    const Mat s = 3.0 * oracles::random_antisymmetric(n, gen);
    for (double t : {0.1, 1.0, 10.0}) {
      const Mat q = antisym_exp(s, t);
      CHECK((q.transpose() * q - Mat::Identity(n, n)).norm() < 1e-9);
    }
  }
}

TEST_CASE("antisym_exp group property") {
  auto gen = oracles::rng(11);
  const Mat s = oracles::random_antisymmetric(8, gen);
  const SkewSpectrum spec = skew_spectrum(s);
  const double t1 = 0.9, t2 = 2.3;
  CHECK((spec.exp_at(t1 + t2) - spec.exp_at(t1) * spec.exp_at(t2)).norm() <
        1e-9);
}

TEST_CASE("antisym_exp rejects non-antisymmetric input") {
  auto gen = oracles::rng(3);
  Mat s = oracles::random_antisymmetric(4, gen);
  s(0, 1) += 1e-3;
  CHECK_THROWS_AS(antisym_exp(s, 1.0), NonAntisymmetric);
}

TEST_CASE("partial_trace of a product state returns the kept factor") {
  auto gen = oracles::rng(5);
  const Mat a = oracles::random_symmetric(3, gen);
  Mat b = oracles::random_symmetric(4, gen);
  b /= b.trace();  // unit trace on the traced factor
  const Mat m = kron(a, b);
  TensorSpace space({3, 4});
  const std::vector<Index> keep{0};
  CHECK((partial_trace(m, space, keep) - a).norm() < 1e-12);
}

TEST_CASE("partial_trace of the maximally mixed state") {
  const Index n = 6;
  TensorSpace space({n, 2});
  const Mat m = Mat::Identity(2 * n, 2 * n) / (2.0 * n);
  const std::vector<Index> keep{1};
  CHECK((partial_trace(m, space, keep) - 0.5 * Mat::Identity(2, 2)).norm() <
        1e-14);
}

TEST_CASE("partial_trace matches the index-summation oracle") {
  auto gen = oracles::rng(17);
  const Index d0 = 3, d1 = 2, d2 = 2;
  const Mat m = oracles::random_matrix(d0 * d1 * d2, d0 * d1 * d2, gen);
  TensorSpace space({d0, d1, d2});
  const std::vector<Index> keep{1, 2};
  const Mat got = partial_trace(m, space, keep);
  const Mat expected = oracles::partial_trace_loops(m, d0, d1, d2, false);
  CHECK((got - expected).norm() < 1e-12);
  const std::vector<Index> keep_first{0};
  CHECK((partial_trace(m, space, keep_first) -
         oracles::partial_trace_loops(m, d0, d1, d2, true))
            .norm() < 1e-12);
}

TEST_CASE("partial_trace is linear and trace preserving") {
  auto gen = oracles::rng(23);
  TensorSpace space({2, 3, 2});
  const Mat m1 = oracles::random_matrix(12, 12, gen);
  const Mat m2 = oracles::random_matrix(12, 12, gen);
  const std::vector<Index> keep{0, 2};
  const Mat lhs = partial_trace(Mat(2.0 * m1 - 0.5 * m2), space, keep);
  const Mat rhs = 2.0 * partial_trace(m1, space, keep) -
                  0.5 * partial_trace(m2, space, keep);
  CHECK((lhs - rhs).norm() < 1e-12);
  CHECK(partial_trace(m1, space, keep).trace() ==
        doctest::Approx(m1.trace()).epsilon(1e-12));
  // Tracing down to a single factor then tracing again gives Tr(M).
  const std::vector<Index> keep1{1};
  CHECK(partial_trace(m1, space, keep1).trace() ==
        doctest::Approx(m1.trace()).epsilon(1e-12));
}

TEST_CASE("ubit_expand picks out a pure J component") {
  auto gen = oracles::rng(31);
  const Mat k = oracles::random_matrix(3, 3, gen);
  TensorSpace space({2, 3});
  const Mat m = kron(ubit_j(), k);
  const UbitExpansion e = ubit_expand(m, space, 0);
  CHECK((e.a_j - k).norm() < 1e-13);
  CHECK(e.a_i.norm() < 1e-13);
  CHECK(e.a_x.norm() < 1e-13);
  CHECK(e.a_z.norm() < 1e-13);
}

TEST_CASE("ubit_expand of the y-direction state") {
  // (1/4)(I (x) I + J (x) J): the real form of spin along +y.
  TensorSpace space({2, 2});
  const Mat m = 0.25 * (kron(Mat::Identity(2, 2), Mat::Identity(2, 2)) +
                        kron(ubit_j(), ubit_j()));
  const UbitExpansion e = ubit_expand(m, space, 0);
  CHECK((e.a_i - 0.25 * Mat::Identity(2, 2)).norm() < 1e-14);
  CHECK((e.a_j - 0.25 * ubit_j()).norm() < 1e-14);
  CHECK(e.a_x.norm() < 1e-14);
  CHECK(e.a_z.norm() < 1e-14);
}

TEST_CASE("ubit_expand matches a least-squares oracle and reconstructs") {
  auto gen = oracles::rng(37);
  TensorSpace space({2, 2});
  const Mat m = oracles::random_matrix(4, 4, gen);
  const UbitExpansion e = ubit_expand(m, space, 0);

  // Solve for the coefficients over the 16-dimensional operator basis
  // {I,J,X,Z} (x) {unit cells} by least squares.
  Eigen::MatrixXd basis(16, 16);
  std::vector<Mat> ubit_ops{Mat::Identity(2, 2), ubit_j(), ubit_x(),
                            ubit_z()};
  int col = 0;
  for (const Mat& u : ubit_ops)
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j) {
        Mat cell = Mat::Zero(2, 2);
        cell(i, j) = 1.0;
        const Mat op = kron(u, cell);
        basis.col(col++) = Eigen::Map<const Eigen::VectorXd>(op.data(), 16);
      }
  const Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(m.data(), 16);
  const Eigen::VectorXd coeffs = basis.colPivHouseholderQr().solve(target);
  const auto cell_matrix = [&](int block) {
    Mat out(2, 2);
    int idx = 4 * block;
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j) out(i, j) = coeffs(idx++);
    return out;
  };
  CHECK((e.a_i - cell_matrix(0)).norm() < 1e-11);
  CHECK((e.a_j - cell_matrix(1)).norm() < 1e-11);
  CHECK((e.a_x - cell_matrix(2)).norm() < 1e-11);
  CHECK((e.a_z - cell_matrix(3)).norm() < 1e-11);

  CHECK((ubit_reconstruct(e, space, 0) - m).norm() < 1e-12);
}

TEST_CASE("ubit_expand round trip on a middle factor") {
  auto gen = oracles::rng(41);
  TensorSpace space({3, 2, 2});
  const Mat m = oracles::random_matrix(12, 12, gen);
  const UbitExpansion e = ubit_expand(m, space, 1);
  CHECK((ubit_reconstruct(e, space, 1) - m).norm() < 1e-12);
}

TEST_CASE("bessel_j1 basics") {
  CHECK(bessel_j1(0.0) == 0.0);
  // Leading series terms x/2 - x^3/16.
  for (double x : {1e-3, 1e-2, 0.1}) {
    const double lead = x / 2.0 - x * x * x / 16.0;
    CHECK(std::abs(bessel_j1(x) - lead) < 1e-8 * std::abs(lead) + 1e-12);
  }
  // Odd function.
  for (double x : {0.5, 3.7, 19.0, 150.0})
    CHECK(bessel_j1(-x) == doctest::Approx(-bessel_j1(x)).epsilon(1e-14));
}

TEST_CASE("bessel_j1 matches the summed series oracle") {
  const double oracle = oracles::bessel_series(1, 2.0);
  CHECK(oracle == doctest::Approx(0.5767).epsilon(1e-3));
  CHECK(bessel_j1(2.0) == doctest::Approx(oracle).epsilon(1e-12));
  for (double x : {0.25, 1.0, 4.0, 8.0, 11.9})
    CHECK(bessel_j1(x) ==
          doctest::Approx(oracles::bessel_series(1, x)).epsilon(1e-10));
}

TEST_CASE("bessel_j1 recurrence J0 + J2 = 2 J1 / x") {
  for (double x : {0.5, 1.0, 2.0, 5.0, 8.0, 12.0, 16.0, 20.0}) {
    const double j0 = oracles::bessel_series(0, x, 80);
    const double j2 = oracles::bessel_series(2, x, 80);
    CHECK(std::abs(j0 + j2 - 2.0 * bessel_j1(x) / x) < 1e-8);
  }
}

TEST_CASE("bessel_j1 asymptotic branch is continuous at the switch") {
  // Series on one side, asymptotics on the other.
  CHECK(bessel_j1(12.0 - 1e-9) ==
        doctest::Approx(bessel_j1(12.0 + 1e-9)).epsilon(1e-9));
  CHECK(bessel_j1(15.0) ==
        doctest::Approx(oracles::bessel_series(1, 15.0, 100)).epsilon(1e-10));
}

TEST_CASE("bessel_j1 rejects bad input") {
  CHECK_THROWS_AS(bessel_j1(std::nan("")), DomainError);
  CHECK_THROWS_AS(bessel_j1(2e6), DomainError);
}

TEST_CASE("TensorSpace flat/unflat are inverse bijections") {
  TensorSpace space({3, 2, 4});
  for (Index f = 0; f < space.total(); ++f) {
    const auto multi = space.unflat(f);
    CHECK(space.flat(multi) == f);
  }
  CHECK(space.total() == 24);
}

}  // TEST_SUITE
