#include <doctest.h>

#include "oracles.hpp"
#include "ubit/model.hpp"
#include "ubit/projected.hpp"

using namespace ubit;

TEST_SUITE("model") {

TEST_CASE("coupling generation is deterministic in the seed") {
  const Mat b1 = generate_coupling(40, 123);
  const Mat b2 = generate_coupling(40, 123);
  CHECK((b1 - b2).norm() == 0.0);
  const Mat b3 = generate_coupling(40, 124);
  CHECK((b1 - b3).norm() > 0.0);
}

TEST_CASE("coupling is antisymmetric with zero diagonal") {
  const Mat b = generate_coupling(30, 7);
  CHECK((b + b.transpose()).norm() < 1e-14);
  CHECK(b.diagonal().norm() == 0.0);
}

TEST_CASE("coupling entry statistics") {
  const Index n = 300;
  const Mat b = generate_coupling(n, 99);
  // Off-diagonal variance 1/N (scaled uniform difference), mean zero.
  double mean = 0, var = 0;
  Index count = 0;
  for (Index i = 0; i < 2 * n; ++i)
    for (Index j = 0; j < 2 * n; ++j) {
      if (i == j) continue;
      mean += b(i, j);
      var += b(i, j) * b(i, j);
      ++count;
    }
  mean /= count;
  var = var / count - mean * mean;
  CHECK(std::abs(mean) < 5e-4);
  CHECK(var == doctest::Approx(1.0 / n).epsilon(0.05));
}

TEST_CASE("half-space eigenvalue scale is independent of N") {
  // RMS of the eigenvalues of V^+ is near 1 for every environment size.
  for (Index n : {50, 100, 200}) {
    const Mat b = generate_coupling(n, 2024);
    const auto spec = spectral_decompose(b, 1.0, 10.0);
    const double rms =
        std::sqrt(spec.v.squaredNorm() / static_cast<double>(n));
    CHECK(rms == doctest::Approx(1.0).epsilon(0.15));
  }
}

TEST_CASE("scale law: median eigenvalue of s B grows with s, not N") {
  auto median_g = [](const Mat& b, double s) {
    Eigen::SelfAdjointEigenSolver<CMat> es(
        CMat(Complex(0, 1) * s * b.cast<Complex>()), Eigen::EigenvaluesOnly);
    Vec ev = es.eigenvalues().cwiseAbs();
    std::vector<double> v(ev.data(), ev.data() + ev.size());
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  const Mat b50 = generate_coupling(50, 5);
  const Mat b200 = generate_coupling(200, 5);
  const double m1 = median_g(b50, 2.0);
  const double m2 = median_g(b200, 2.0);
  CHECK(m1 == doctest::Approx(m2).epsilon(0.2));  // N-independent
  CHECK(median_g(b50, 4.0) == doctest::Approx(2.0 * m1).epsilon(1e-9));
}

TEST_CASE("assembled generator reduces to pure ubit rotation") {
  ModelParams params;
  params.env_dim = 4;
  params.coupling = 0.0;
  params.omega = 3.0;
  params.local_dim = 2;
  const Mat b = Mat::Zero(8, 8);
  const Mat s_ua = Mat::Zero(4, 4);
  const Mat s_hat = assemble_full_stueckelbergian(params, b, s_ua);
  const Mat expected =
      -params.omega * kron(kron(Mat::Identity(4, 4), ubit_j()),
                           Mat::Identity(2, 2));
  CHECK((s_hat - expected).norm() < 1e-14);
}

TEST_CASE("assembled generator with S_UA = 0 is S_EU (x) I") {
  ModelParams params;
  params.env_dim = 5;
  params.coupling = 1.5;
  params.omega = 2.0;
  const Mat b = generate_coupling(5, 11);
  const Mat s_hat = assemble_full_stueckelbergian(
      params, b, Mat::Zero(4, 4));
  const Mat s_eu = environment_ubit_generator(params, b);
  CHECK((s_hat - kron(s_eu, Mat::Identity(2, 2))).norm() < 1e-14);
}

TEST_CASE("assembled generator is antisymmetric") {
  auto gen = oracles::rng(77);
  ModelParams params;
  params.env_dim = 6;
  params.coupling = 2.0;
  params.omega = 5.0;
  const Mat b = generate_coupling(6, 13);
  const Mat l = oracles::random_antisymmetric(2, gen);
  const Mat k = oracles::random_symmetric(2, gen);
  const Mat s_ua = kron(Mat::Identity(2, 2), l) - kron(ubit_j(), k);
  const Mat s_hat = assemble_full_stueckelbergian(params, b, s_ua);
  CHECK((s_hat + s_hat.transpose()).norm() < 1e-12);
}

TEST_CASE("initial states are valid product states") {
  const Mat rho_ua = rho_ua_from_bloch({1, 0, 0});
  const Mat rho_mixed = initial_state_mixed_env(6, rho_ua);
  CHECK(rho_mixed.trace() == doctest::Approx(1.0).epsilon(1e-12));
  const Mat expected = kron(Mat::Identity(6, 6) / 6.0, rho_ua);
  CHECK((rho_mixed - expected).norm() < 1e-14);

  const Mat rho_pure = initial_state_pure_env(6, 42, rho_ua);
  CHECK(rho_pure.trace() == doctest::Approx(1.0).epsilon(1e-12));
  // Environment part is rank one.
  TensorSpace space({6, 2, 2});
  const std::vector<Index> keep{0};
  const Mat env = partial_trace(rho_pure, space, keep);
  Eigen::SelfAdjointEigenSolver<Mat> es(env, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("bloch initial states") {
  const Mat rho_x = rho_ua_from_bloch({1, 0, 0});
  const Mat expected =
      0.25 * kron(Mat::Identity(2, 2),
                  Mat(Mat::Identity(2, 2) + ubit_x()));
  CHECK((rho_x - expected).norm() < 1e-14);

  const Eigen::Vector3d tilted(1.0 / std::sqrt(2.0), 0, 1.0 / std::sqrt(2.0));
  const Mat rho_tilt = rho_ua_from_bloch(tilted);
  CHECK(rho_tilt.trace() == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::SelfAdjointEigenSolver<Mat> es(rho_tilt, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > -1e-12);
  CHECK_THROWS_AS(rho_ua_from_bloch({1.2, 0, 0}), InvalidState);
}

TEST_CASE("parameter validation") {
  ModelParams params;
  params.env_dim = 0;
  CHECK_THROWS_AS(params.validate(), ConfigError);
  params.env_dim = 10;
  params.omega = 0;
  CHECK_THROWS_AS(params.validate(), ConfigError);
  params.omega = 1;
  params.coupling = -1;
  CHECK_THROWS_AS(params.validate(), ConfigError);
}

}  // TEST_SUITE
