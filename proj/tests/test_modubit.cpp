#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "ubit/dynamics.hpp"
#include "ubit/modubit.hpp"
#include "ubit/transcription.hpp"

using namespace ubit;

namespace {

constexpr Complex kI{0.0, 1.0};

// ||O |Psi_n><Psi_n| O^T - (1/2)|n><n| (x) (I - iJ)|| for every n.
double defining_relation_residual(const SpectralData& spec,
                                  const ModifiedUbitFrame& frame) {
  const Index n_env = spec.env_dim;
  CMat iju = CMat::Identity(2, 2);
  iju(0, 1) = kI;
  iju(1, 0) = -kI;  // I - iJ
  double worst = 0;
  for (Index n = 0; n < n_env; ++n) {
    const CVec psi = spec.psi_plus.col(n);
    const CMat lhs = frame.o.cast<Complex>() * (psi * psi.adjoint()) *
                     frame.o.transpose().cast<Complex>();
    CMat rhs = CMat::Zero(2 * n_env, 2 * n_env);
    rhs.block(2 * n, 2 * n, 2, 2) = 0.5 * iju;
    worst = std::max(worst, (lhs - rhs).norm());
  }
  return worst;
}

}  // namespace

TEST_SUITE("modubit") {

TEST_CASE("frame is orthogonal and satisfies the defining relation") {
  const Index n = 40;
  const Mat b = generate_coupling(n, 201);
  const auto spec = spectral_decompose(b, 3.0, 30.0);
  const auto frame = build_frame(spec);
  CHECK((frame.o.transpose() * frame.o -
         Mat::Identity(2 * n, 2 * n))
            .norm() < 1e-9);
  CHECK(defining_relation_residual(spec, frame) < 1e-9);
}

TEST_CASE("frame in the unperturbed limit") {
  const Index n = 12;
  const Mat b = generate_coupling(n, 203);
  const auto spec = spectral_decompose(b, 0.0, 10.0);
  const auto frame = build_frame(spec);
  CHECK(defining_relation_residual(spec, frame) < 1e-10);
}

TEST_CASE("frame brings S_EU to tensor-product block form") {
  const Index n = 20;
  const double s = 2.0, omega = 20.0;
  const Mat b = generate_coupling(n, 207);
  const auto spec = spectral_decompose(b, s, omega);
  const auto frame = build_frame(spec);
  const Mat s_eu =
      environment_ubit_generator(ModelParams{n, s, omega, 0, 2}, b);
  const Mat rotated = frame.o * s_eu * frame.o.transpose();
  Mat expected = Mat::Zero(2 * n, 2 * n);
  for (Index k = 0; k < n; ++k)
    expected.block(2 * k, 2 * k, 2, 2) = -omega * spec.g(k) * ubit_j();
  CHECK((rotated - expected).norm() < 1e-8);
}

TEST_CASE("custom environment basis is honored") {
  const Index n = 10;
  const Mat b = generate_coupling(n, 211);
  const auto spec = spectral_decompose(b, 1.0, 10.0);
  auto gen = oracles::rng(213);
  const Mat h = oracles::random_symmetric(n, gen);
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const Mat basis = es.eigenvectors();
  const auto frame = build_frame(spec, &basis);
  // Defining relation with |n> the basis columns.
  CMat iju = CMat::Identity(2, 2);
  iju(0, 1) = kI;
  iju(1, 0) = -kI;
  const CVec psi = spec.psi_plus.col(3);
  const CMat lhs = frame.o.cast<Complex>() * (psi * psi.adjoint()) *
                   frame.o.transpose().cast<Complex>();
  const CMat proj =
      (basis.col(3) * basis.col(3).transpose()).cast<Complex>();
  const CMat rhs = kron(proj, CMat(0.5 * iju));
  CHECK((lhs - rhs).norm() < 1e-9);
}

TEST_CASE("calI and calJ transform to product form") {
  const Index n = 15;
  const Mat b = generate_coupling(n, 217);
  const auto spec = spectral_decompose(b, 1.5, 15.0);
  const auto frame = build_frame(spec);
  auto gen = oracles::rng(219);
  Vec c(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Index k = 0; k < n; ++k) c(k) = u(gen);
  c /= c.sum();

  const Mat ci = cal_i(spec, c);
  const Mat cj = cal_j(spec, c);
  Mat rho_e = Mat::Zero(n, n);
  for (Index k = 0; k < n; ++k) rho_e(k, k) = c(k);
  const Mat lhs_i = frame.o * ci * frame.o.transpose();
  const Mat lhs_j = frame.o * cj * frame.o.transpose();
  CHECK((lhs_i - kron(rho_e, Mat::Identity(2, 2))).norm() < 1e-9);
  CHECK((lhs_j - kron(rho_e, ubit_j())).norm() < 1e-9);
}

TEST_CASE("EU marginal of an Alice-prepared state is calI/2") {
  const Index n = 12;
  const Mat b = generate_coupling(n, 223);
  const auto spec = spectral_decompose(b, 1.0, 10.0);
  auto gen = oracles::rng(227);
  Vec c(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Index k = 0; k < n; ++k) c(k) = u(gen);
  c /= c.sum();
  const CMat sigma = oracles::random_density(2, gen);
  ProjectedState state;
  for (Index k = 0; k < n; ++k)
    state.sigma.push_back(0.5 * c(k) * sigma);
  const Mat marg = eu_marginal(state, spec);
  CHECK((marg - 0.5 * cal_i(spec, c)).norm() < 1e-11);
}

TEST_CASE("dense and structured modified states agree") {
  const Index n = 12;
  const Mat b = generate_coupling(n, 229);
  const auto spec = spectral_decompose(b, 1.0, 10.0);
  const auto frame = build_frame(spec);
  const Mat rho_ua = rho_ua_from_bloch({0, 1, 0});
  const ProjectedState state = project_ua_state(rho_ua, spec);
  const Mat dense = reconstruct_full(state, spec);
  const Mat via_dense = rho_modified(dense, frame, 2);
  const Mat via_struct = rho_modified(state, spec, frame);
  CHECK((via_dense - via_struct).norm() < 1e-10);
}

TEST_CASE("product state with the unperturbed frame recovers rho_UA") {
  const Index n = 10;
  const Mat b = generate_coupling(n, 233);
  const auto spec = spectral_decompose(b, 0.0, 10.0);
  const auto frame = build_frame(spec);
  const Mat rho_ua = rho_ua_from_bloch({1, 0, 0});
  const Mat rho_hat = initial_state_mixed_env(n, rho_ua);
  const Mat recovered = rho_modified(rho_hat, frame, 2);
  CHECK((recovered - rho_ua).norm() < 1e-10);
}

TEST_CASE("modified frame reabsorbs the ghost part") {
  ModelParams params;
  params.env_dim = 100;
  params.coupling = 30.0;
  params.omega = 300.0;  // lambda = 0.1
  const Mat b = generate_coupling(100, 239);
  const auto spec = spectral_decompose(b, params.coupling, params.omega);
  const auto frame = build_frame(spec);
  const Mat frame_full = expand_frame(frame, 2);
  PrecessionSetup setup;
  const auto times = linspace(0.0, 1.0, 201);
  const auto raw = precession_experiment(params, b, setup, times);
  const auto modified =
      precession_experiment(params, b, setup, times, &frame_full);
  // The raw frame dips near lambda^2/2; the modified one stays longer.
  CHECK(raw.min_len() < 1.0 - 0.002);
  CHECK(modified.min_len() > raw.min_len());
  CHECK(modified.max_len() - modified.min_len() < 3e-3);
}

}  // TEST_SUITE
