#pragma once

#include <cstdint>
#include <optional>

#include "ubit/linalg.hpp"
#include "ubit/tensor_space.hpp"

namespace ubit {

// Model scales.  lambda = s / omega is the single parameter of the effective
// theory; all frequencies are angular and hbar = 1.
struct ModelParams {
  Index env_dim = 200;       // N
  double coupling = 10.0;    // s
  double omega = 100.0;      // ubit rotation rate
  std::uint64_t seed = 1;
  Index local_dim = 2;       // d_A

  double lambda() const { return coupling / omega; }
  void validate() const;
};

// Deterministic substream derivation: all randomness in a run flows from one
// 64-bit seed.  Substream 0 feeds the environment coupling, substream 1 a
// random pure environment state.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t substream(std::uint64_t seed, std::uint64_t idx);

// B_EU = sqrt(6/N) (R - R^T)/2 with R entries i.i.d. uniform on (-1, 1) drawn
// from the seeded generator.  2N x 2N, antisymmetric, zero diagonal; the
// eigenvalue scale is independent of N.
Mat generate_coupling(Index env_dim, std::uint64_t seed);

// S_EU = -omega I_E (x) J_U + s B_EU  (2N x 2N).
Mat environment_ubit_generator(const ModelParams& params, const Mat& b_eu);

// Full generator on E (x) U (x) A:
//   S_hat = -omega I (x) J (x) I + s B_EU (x) I_A + I_E (x) S_UA.
Mat assemble_full_stueckelbergian(const ModelParams& params, const Mat& b_eu,
                                  const Mat& s_ua);

TensorSpace full_space(const ModelParams& params);  // {N, 2, d_A}

// Product initial states rho_E (x) rho_UA.
Mat initial_state_mixed_env(Index env_dim, const Mat& rho_ua);
Mat initial_state_pure_env(Index env_dim, std::uint64_t seed,
                           const Mat& rho_ua);

// rho_UA for a Bloch vector (|b| <= 1), d_A = 2:
//   (1/4)(I + b_x I (x) X + b_y J (x) J + b_z I (x) Z).
Mat rho_ua_from_bloch(const Eigen::Vector3d& b);

}  // namespace ubit
