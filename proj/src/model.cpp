#include "ubit/model.hpp"

#include <cmath>
#include <random>

#include "ubit/transcription.hpp"

namespace ubit {

void ModelParams::validate() const {
  if (env_dim < 1) throw ConfigError("ModelParams: N must be >= 1");
  if (coupling < 0) throw ConfigError("ModelParams: s must be >= 0");
  if (!(omega > 0)) throw ConfigError("ModelParams: omega must be > 0");
  if (local_dim < 1) throw ConfigError("ModelParams: d_A must be >= 1");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream(std::uint64_t seed, std::uint64_t idx) {
  return splitmix64(seed ^ splitmix64(idx + 0x51ed2701ab0e9e5dULL));
}

namespace {

// Uniform on (-1, 1) from raw generator bits; bit-stable across platforms,
// unlike std::uniform_real_distribution.
double uniform_pm1(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

}  // namespace

Mat generate_coupling(Index env_dim, std::uint64_t seed) {
  if (env_dim < 1) throw DimMismatch("generate_coupling: N must be >= 1");
  const Index n = 2 * env_dim;
  std::mt19937_64 rng(substream(seed, 0));
  Mat r(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) r(i, j) = uniform_pm1(rng);
  const double scale = std::sqrt(6.0 / static_cast<double>(env_dim));
  return scale * 0.5 * (r - r.transpose());
}

Mat environment_ubit_generator(const ModelParams& params, const Mat& b_eu) {
  params.validate();
  const Index n = 2 * params.env_dim;
  if (b_eu.rows() != n || b_eu.cols() != n)
    throw DimMismatch("environment_ubit_generator: coupling size mismatch");
  Mat s_eu = params.coupling * b_eu;
  const Mat j = ubit_j();
  for (Index e = 0; e < params.env_dim; ++e)
    s_eu.block(2 * e, 2 * e, 2, 2) -= params.omega * j;
  return s_eu;
}

Mat assemble_full_stueckelbergian(const ModelParams& params, const Mat& b_eu,
                                  const Mat& s_ua) {
  params.validate();
  const Index n_eu = 2 * params.env_dim;
  const Index d = params.local_dim;
  if (b_eu.rows() != n_eu || b_eu.cols() != n_eu)
    throw DimMismatch("assemble_full_stueckelbergian: coupling size");
  if (s_ua.rows() != 2 * d || s_ua.cols() != 2 * d)
    throw DimMismatch("assemble_full_stueckelbergian: S_UA size");
  if (!is_antisymmetric(s_ua, 1e-9) && s_ua.norm() > 0)
    throw NonAntisymmetric("assemble_full_stueckelbergian: S_UA");

  const Mat s_eu = environment_ubit_generator(params, b_eu);
  Mat s_hat = kron(s_eu, Mat::Identity(d, d));
  // I_E (x) S_UA: S_UA lives on U (x) A, block-diagonal over the environment.
  for (Index e = 0; e < params.env_dim; ++e)
    s_hat.block(2 * d * e, 2 * d * e, 2 * d, 2 * d) += s_ua;
  return s_hat;
}

TensorSpace full_space(const ModelParams& params) {
  return TensorSpace({params.env_dim, 2, params.local_dim});
}

Mat initial_state_mixed_env(Index env_dim, const Mat& rho_ua) {
  check_real_state(rho_ua);
  const Mat rho_e =
      Mat::Identity(env_dim, env_dim) / static_cast<double>(env_dim);
  return kron(rho_e, rho_ua);
}

Mat initial_state_pure_env(Index env_dim, std::uint64_t seed,
                           const Mat& rho_ua) {
  check_real_state(rho_ua);
  std::mt19937_64 rng(substream(seed, 1));
  Vec psi(env_dim);
  for (Index i = 0; i < env_dim; ++i) psi(i) = uniform_pm1(rng);
  if (psi.norm() == 0) psi(0) = 1.0;
  psi.normalize();
  const Mat rho_e = psi * psi.transpose();
  return kron(rho_e, rho_ua);
}

Mat rho_ua_from_bloch(const Eigen::Vector3d& b) {
  if (b.norm() > 1.0 + 1e-9)
    throw InvalidState("rho_ua_from_bloch: |b| > 1");
  const Mat i2 = Mat::Identity(2, 2);
  Mat rho = 0.25 * (kron(i2, i2) + b.x() * kron(i2, ubit_x()) +
                    b.y() * kron(ubit_j(), ubit_j()) +
                    b.z() * kron(i2, ubit_z()));
  return rho;
}

}  // namespace ubit
