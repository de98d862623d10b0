#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ubit/analytic.hpp"
#include "ubit/dynamics.hpp"
#include "ubit/limits.hpp"
#include "ubit/modubit.hpp"
#include "ubit/projected.hpp"
#include "ubit/transcription.hpp"

namespace py = pybind11;

namespace {

using namespace ubit;

ModelParams make_params(Index n, double s, double omega, std::uint64_t seed) {
  ModelParams p;
  p.env_dim = n;
  p.coupling = s;
  p.omega = omega;
  p.seed = seed;
  p.validate();
  return p;
}

py::dict run_relaxation_py(Index n, double s, double omega,
                           std::uint64_t seed, char initial,
                           const std::vector<double>& times) {
  const ModelParams params = make_params(n, s, omega, seed);
  const Mat b = generate_coupling(n, seed);
  const auto coeffs = relaxation_experiment(params, b, initial, times);
  py::dict out;
  out["t"] = coeffs.t;
  out["c_i"] = coeffs.c_i;
  out["c_j"] = coeffs.c_j;
  out["c_x"] = coeffs.c_x;
  out["c_z"] = coeffs.c_z;
  return out;
}

py::dict run_precession_py(Index n, double s, double omega,
                           std::uint64_t seed, double big_omega,
                           const Eigen::Vector3d& axis,
                           const Eigen::Vector3d& b0,
                           const std::vector<double>& times,
                           const std::string& frame,
                           const std::string& split) {
  const ModelParams params = make_params(n, s, omega, seed);
  const Mat b = generate_coupling(n, seed);
  PrecessionSetup setup;
  setup.big_omega = big_omega;
  setup.axis = axis;
  setup.b0 = b0;
  if (split == "real") {
    setup.split = SplitBasis::RealBasis;
  } else if (split != "identity") {
    throw DomainError("split must be 'identity' or 'real'");
  }

  BlochTrajectory traj;
  if (frame == "modified") {
    const auto spec = spectral_decompose(b, s, omega);
    const auto mod_frame = build_frame(spec);
    const Mat full = expand_frame(mod_frame, params.local_dim);
    traj = precession_experiment(params, b, setup, times, &full);
  } else if (frame == "raw") {
    traj = precession_experiment(params, b, setup, times);
  } else {
    throw DomainError("frame must be 'raw' or 'modified'");
  }

  py::dict out;
  out["t"] = traj.times();
  out["b_x"] = traj.component('x');
  out["b_y"] = traj.component('y');
  out["b_z"] = traj.component('z');
  out["b_len"] = traj.component('l');
  const auto fit = fit_cosine(traj.times(), traj.component('x'),
                              (1.0 - 0.5 * (s / omega) * (s / omega)) *
                                  big_omega);
  out["omega_fitted"] = fit.omega;
  out["xi_fitted"] = fit.omega / big_omega;
  return out;
}

py::dict compute_nu_py(Index n, double s, double omega, std::uint64_t seed) {
  const Mat b = generate_coupling(n, seed);
  const auto spec = spectral_decompose(b, s, omega);
  const auto nu = compute_nu(spec);
  py::dict out;
  out["nu"] = nu.exact;
  out["nu_second_order"] = nu.second_order;
  out["nu_third_order"] = nu.third_order;
  out["g"] = spec.g;
  out["v"] = spec.v;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "real-vector-space quantum dynamics with a universal rebit";

  py::register_exception<Error>(m, "UbitError");

  m.def("bessel_j1", &bessel_j1, py::arg("x"),
        "Bessel function of the first kind, order 1");
  m.def("predict_gamma", &predict_gamma, py::arg("s"), py::arg("omega"),
        py::arg("t"),
        "asymptotic J_U coefficient model 1 - lambda^2 + "
        "[J1(2st)/(omega t)]^2 cos(2 omega t)");
  m.def(
      "predict_beta",
      [](double s, double omega, double t) {
        const auto [bx, bz] = predict_beta(s, omega, t);
        return py::make_tuple(bx, bz);
      },
      py::arg("s"), py::arg("omega"), py::arg("t"));
  m.def(
      "precession_model",
      [](double lam, double big_omega) {
        const auto p = predict_precession(lam, big_omega);
        py::dict out;
        out["xi"] = p.xi;
        out["t_star"] = p.t_star();
        out["tau"] = p.tau();
        return out;
      },
      py::arg("lambda_"), py::arg("Omega"));
  m.def(
      "precession_envelope",
      [](double lam, double big_omega, double t) {
        return predict_precession(lam, big_omega).envelope(t);
      },
      py::arg("lambda_"), py::arg("Omega"), py::arg("t"));

  m.def("generate_coupling", &generate_coupling, py::arg("env_dim"),
        py::arg("seed"),
        "random antisymmetric environment-ubit coupling B_EU");
  m.def("antisym_exp", &antisym_exp, py::arg("s"), py::arg("t"),
        "orthogonal exponential of a real antisymmetric matrix");
  m.def("sincos_exponential", &sincos_exponential, py::arg("s"),
        py::arg("t"));
  m.def("complex_to_real_state", &complex_to_real_state, py::arg("sigma"));
  m.def(
      "real_to_complex_state",
      [](const Mat& rho) { return real_to_complex_state(rho); },
      py::arg("rho"));
  m.def(
      "hamiltonian_to_stueckelbergian",
      [](const CMat& h) { return hamiltonian_to_stueckelbergian(h); },
      py::arg("h"));

  m.def("run_relaxation", &run_relaxation_py, py::arg("env_dim"),
        py::arg("s"), py::arg("omega"), py::arg("seed"),
        py::arg("initial") = 'J', py::arg("times"));
  m.def("run_precession", &run_precession_py, py::arg("env_dim"),
        py::arg("s"), py::arg("omega"), py::arg("seed"), py::arg("Omega"),
        py::arg("axis"), py::arg("b0"), py::arg("times"),
        py::arg("frame") = "raw", py::arg("split") = "identity");
  m.def("compute_nu_spectrum", &compute_nu_py, py::arg("env_dim"),
        py::arg("s"), py::arg("omega"), py::arg("seed"));

  m.attr("__version__") = "0.1.0";
}
