#pragma once

#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "ubit/linalg.hpp"
#include "ubit/model.hpp"
#include "ubit/tensor_space.hpp"

namespace ubit {

// Exact orthogonal evolution under a constant real antisymmetric generator,
// with the environment (leading tensor factor) traced out of the readout.
// A single eigendecomposition of the generator is reused for every time.
class ExactPropagator {
 public:
  // env_dim divides the generator's dimension; the kept block has dimension
  // dim / env_dim (e.g. 2 d_A for an E (x) U (x) A generator).
  ExactPropagator(const Mat& s_hat, Index env_dim);

  // Tr_E[ e^{St} M0 e^{-St} ] at each time.  If frame is given (a real
  // orthogonal matrix of full dimension), the state is rotated by it before
  // the environment is traced out.
  std::vector<Mat> reduced_trajectory(const Mat& m0,
                                      std::span<const double> times,
                                      const Mat* frame = nullptr) const;

  Mat full_state(const Mat& m0, double t) const;  // e^{St} M0 e^{-St}
  Mat exp_at(double t) const;                     // e^{St}

  Index dim() const { return spectrum_.theta.size(); }
  Index env_dim() const { return env_dim_; }
  Index kept_dim() const { return kept_dim_; }
  const Vec& thetas() const { return spectrum_.theta; }
  const CMat& basis() const { return spectrum_.basis; }

 private:
  SkewSpectrum spectrum_;
  Index env_dim_ = 1;
  Index kept_dim_ = 1;
};

struct BlochPoint {
  double t = 0;
  double bx = 0, by = 0, bz = 0;
  double len = 0;
  double res_x = 0, res_z = 0;  // X_U / Z_U coefficient norms, Bloch scale
};

struct BlochTrajectory {
  std::vector<BlochPoint> samples;

  std::vector<double> times() const;
  std::vector<double> component(char which) const;  // 'x','y','z','l'
  double min_len() const;
  double max_len() const;
};

// Bloch components of a 4x4 rho_UA (d_A = 2) plus the residual coefficient
// norms that measure departure from Stueckelberg's rule.
BlochPoint bloch_from_rho(const Mat& rho_ua, double t);

struct FrequencyFit {
  double omega = 0;      // fitted angular frequency
  double amplitude = 0;
  double phase = 0;      // y ~ amplitude * cos(omega t + phase) + offset
  double offset = 0;
  double rms_residual = 0;
};

// Least-squares cosine fit, initialized by zero-crossing counting and refined
// by a scan over the frequency; amplitude/phase/offset solved linearly.
FrequencyFit fit_cosine(std::span<const double> t, std::span<const double> y,
                        double omega_guess);

// Ubit coefficient time series for the relaxation runs (S_UA = 0):
// u(t) = (1/N) Tr_E[ e^{S_EU t} (I_E (x) O_U) e^{-S_EU t} ] expanded over
// {I, J, X, Z}.
struct UbitCoefficients {
  std::vector<double> t;
  std::vector<double> c_i, c_j, c_x, c_z;
  std::vector<Mat> u;  // raw 2x2 matrices
};

UbitCoefficients relaxation_experiment(const ModelParams& params,
                                       const Mat& b_eu, char initial_op,
                                       std::span<const double> times);

enum class SplitBasis { Identity, RealBasis };

struct PrecessionSetup {
  double big_omega = 2 * std::numbers::pi;  // local precession rate
  Eigen::Vector3d axis{0, 0, 1};
  Eigen::Vector3d b0{1, 0, 0};
  SplitBasis split = SplitBasis::Identity;
};

// S_UA for precession about a unit axis: H = (Omega/2) axis . sigma,
// transcribed in the chosen split basis.
Mat precession_generator(const PrecessionSetup& setup);
Mat precession_initial_ua(const PrecessionSetup& setup);

BlochTrajectory precession_experiment(const ModelParams& params,
                                      const Mat& b_eu,
                                      const PrecessionSetup& setup,
                                      std::span<const double> times,
                                      const Mat* frame = nullptr);

// Quarter cycle of precession, S_UA switched off for t_freeze, then a final
// quarter cycle.  Piecewise-constant generators composed exactly.
struct FrozenSpinResult {
  BlochTrajectory trajectory;
  double t_freeze_start = 0;
  double t_freeze_end = 0;
  double final_len = 0;
};

FrozenSpinResult frozen_spin_experiment(const ModelParams& params,
                                        const Mat& b_eu, double big_omega,
                                        double t_freeze,
                                        Index samples_per_segment);

}  // namespace ubit
