#include "ubit/projected.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ubit/dynamics.hpp"
#include "ubit/transcription.hpp"

namespace ubit {

namespace {

constexpr Complex kImag{0.0, 1.0};

// Columns embedding |j> (x) |+> with |+> = (1, -i)/sqrt(2): the positive
// eigenspace of G_0 = -i I (x) J.
CMat plus_subspace_basis(Index env_dim) {
  CMat basis = CMat::Zero(2 * env_dim, env_dim);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Index j = 0; j < env_dim; ++j) {
    basis(2 * j, j) = Complex(inv_sqrt2, 0);
    basis(2 * j + 1, j) = Complex(0, -inv_sqrt2);
  }
  return basis;
}

// I_E (x) J_U applied from the left.
CMat apply_env_j(const CMat& m) {
  CMat out(m.rows(), m.cols());
  for (Index e = 0; e < m.rows() / 2; ++e) {
    out.row(2 * e) = -m.row(2 * e + 1);
    out.row(2 * e + 1) = m.row(2 * e);
  }
  return out;
}

// Tr_E |psi><psi| for a vector on E (x) U: 2x2 complex, Hermitian, trace 1.
Eigen::Matrix2cd ubit_overlap(const CVec& psi) {
  const Index n_env = psi.size() / 2;
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Zero();
  for (Index e = 0; e < n_env; ++e) {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        u(a, b) += psi(2 * e + a) * std::conj(psi(2 * e + b));
  }
  return u;
}

}  // namespace

SpectralData spectral_decompose(const Mat& b_eu, double s, double omega,
                                double gap_tol_scale) {
  require_square(b_eu, "spectral_decompose");
  if (b_eu.rows() % 2 != 0)
    throw DimMismatch("spectral_decompose: odd dimension");
  if (!(omega > 0)) throw DomainError("spectral_decompose: omega must be > 0");
  if (b_eu.norm() > 0 && !is_antisymmetric(b_eu, 1e-9))
    throw NonAntisymmetric("spectral_decompose: coupling not antisymmetric");
  const Index n_env = b_eu.rows() / 2;

  SpectralData spec;
  spec.env_dim = n_env;
  spec.coupling = s;
  spec.omega = omega;

  const CMat v_full = kImag * b_eu.cast<Complex>();
  const CMat pb = plus_subspace_basis(n_env);

  // Diagonalize V inside the positive subspace.
  CMat v_plus = pb.adjoint() * v_full * pb;
  Eigen::SelfAdjointEigenSolver<CMat> esv(v_plus);
  if (esv.info() != Eigen::Success)
    throw EigFailure("spectral_decompose: V^+ eigensolver failed");
  spec.v = esv.eigenvalues();
  spec.phi_plus = pb * esv.eigenvectors();
  spec.cross = spec.phi_plus.adjoint() * v_full * spec.phi_plus.conjugate();

  if (s == 0.0) {
    // Unperturbed limit: G = G_0, every positive eigenvalue is 1 and the
    // diagonalizing basis is the unperturbed one.
    spec.g = Vec::Ones(n_env);
    spec.psi_plus = spec.phi_plus;
    spec.match.resize(static_cast<size_t>(n_env));
    for (Index n = 0; n < n_env; ++n)
      spec.match[static_cast<size_t>(n)] = n;
    return spec;
  }

  ModelParams params;
  params.env_dim = n_env;
  params.coupling = s;
  params.omega = omega;
  const Mat s_eu = environment_ubit_generator(params, b_eu);
  const CMat g_full = (kImag / omega) * s_eu.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<CMat> esg(g_full);
  if (esg.info() != Eigen::Success)
    throw EigFailure("spectral_decompose: G eigensolver failed");
  const Vec all_g = esg.eigenvalues();

  std::vector<Index> plus_idx;
  for (Index k = 0; k < all_g.size(); ++k)
    if (all_g(k) > 0) plus_idx.push_back(k);
  if (static_cast<Index>(plus_idx.size()) != n_env)
    throw DegenerateSpectrum(
        "spectral_decompose: positive branch does not have N eigenvalues; "
        "reseed the coupling");

  spec.g.resize(n_env);
  spec.psi_plus.resize(2 * n_env, n_env);
  for (Index n = 0; n < n_env; ++n) {
    spec.g(n) = all_g(plus_idx[static_cast<size_t>(n)]);
    spec.psi_plus.col(n) =
        esg.eigenvectors().col(plus_idx[static_cast<size_t>(n)]);
  }

  const double gap_tol = gap_tol_scale * omega;
  for (Index n = 1; n < n_env; ++n) {
    if (omega * (spec.g(n) - spec.g(n - 1)) < gap_tol) {
      std::ostringstream msg;
      msg << "spectral_decompose: eigenvalue gap below tolerance at index "
          << n << "; reseed the coupling";
      throw DegenerateSpectrum(msg.str());
    }
  }

  // Match exact eigenvectors to the unperturbed basis by maximal overlap and
  // fix each column's phase so the dominant overlap is real positive.
  const CMat overlaps = spec.phi_plus.adjoint() * spec.psi_plus;
  spec.match.resize(static_cast<size_t>(n_env));
  for (Index n = 0; n < n_env; ++n) {
    Index best = 0;
    double best_val = -1;
    for (Index m = 0; m < n_env; ++m) {
      const double val = std::abs(overlaps(m, n));
      if (val > best_val) {
        best_val = val;
        best = m;
      }
    }
    spec.match[static_cast<size_t>(n)] = best;
    const Complex ov = overlaps(best, n);
    if (std::abs(ov) > 0)
      spec.psi_plus.col(n) *= std::conj(ov) / std::abs(ov);
  }
  return spec;
}

NuSpectrum compute_nu(const SpectralData& spec) {
  const Index n_env = spec.env_dim;
  NuSpectrum nu;
  nu.exact.resize(n_env);
  nu.second_order.resize(n_env);
  nu.third_order.resize(n_env);
  const double lam = spec.lambda();
  const double xi = 1.0 - 0.5 * lam * lam;
  for (Index n = 0; n < n_env; ++n) {
    const CVec psi = spec.psi_plus.col(n);
    const CVec jpsi = apply_env_j(psi);
    nu.exact(n) = (-kImag * psi.dot(jpsi)).real();
    nu.second_order(n) = xi;
    nu.third_order(n) =
        xi + 0.25 * lam * lam * lam *
                 spec.v(spec.match[static_cast<size_t>(n)]);
  }
  return nu;
}

LocalGenerator split_local_generator(const Mat& s_ua, double* dropped_norm) {
  require_square(s_ua, "split_local_generator");
  if (s_ua.rows() % 2 != 0)
    throw DimMismatch("split_local_generator: odd dimension");
  const Index d = s_ua.rows() / 2;
  TensorSpace space({2, d});
  const UbitSplit split = commutant_split(s_ua, space, 0);
  if (dropped_norm) *dropped_norm = split.anticommuting.norm();
  const UbitExpansion coeffs = ubit_expand(split.commuting, space, 0);
  LocalGenerator gen;
  gen.l = coeffs.a_i;
  gen.k = -coeffs.a_j;
  const double scale = std::max(1.0, s_ua.norm());
  if ((gen.k - gen.k.transpose()).norm() > 1e-10 * scale)
    throw BadLocalGenerator("split_local_generator: K not symmetric");
  if ((gen.l + gen.l.transpose()).norm() > 1e-10 * scale)
    throw BadLocalGenerator("split_local_generator: L not antisymmetric");
  return gen;
}

Mat local_generator_matrix(const LocalGenerator& gen) {
  return kron(Mat::Identity(2, 2), gen.l) - kron(ubit_j(), gen.k);
}

ProjectedState project_ua_state(const Mat& rho_ua, const SpectralData& spec) {
  check_real_state(rho_ua);
  if (rho_ua.rows() % 2 != 0)
    throw DimMismatch("project_ua_state: odd UA dimension");
  const Index d = rho_ua.rows() / 2;
  const Index n_env = spec.env_dim;
  const double inv_n = 1.0 / static_cast<double>(n_env);

  ProjectedState state;
  state.sigma.reserve(static_cast<size_t>(n_env));
  for (Index n = 0; n < n_env; ++n) {
    const Eigen::Matrix2cd u = ubit_overlap(spec.psi_plus.col(n));
    CMat sig = CMat::Zero(d, d);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        sig += std::conj(u(a, b)) *
               rho_ua.block(a * d, b * d, d, d).cast<Complex>();
    state.sigma.push_back(inv_n * sig);
  }
  return state;
}

ProjectedState project_product_state(const Mat& rho_eu, const Mat& rho_a,
                                     const SpectralData& spec) {
  check_real_state(rho_eu);
  check_real_state(rho_a);
  if (rho_eu.rows() != 2 * spec.env_dim)
    throw DimMismatch("project_product_state: rho_EU size");
  ProjectedState state;
  state.sigma.reserve(static_cast<size_t>(spec.env_dim));
  const CMat rho_eu_c = rho_eu.cast<Complex>();
  for (Index n = 0; n < spec.env_dim; ++n) {
    const CVec psi = spec.psi_plus.col(n);
    const Complex weight = psi.dot(rho_eu_c * psi);
    state.sigma.push_back(weight * rho_a.cast<Complex>());
  }
  return state;
}

Mat apply_projection(const Mat& m, const SpectralData& spec, Index local_dim) {
  const Index n_eu = 2 * spec.env_dim;
  const Index n = n_eu * local_dim;
  if (m.rows() != n || m.cols() != n)
    throw DimMismatch("apply_projection: matrix size");
  const CMat mc = m.cast<Complex>();
  CMat out = CMat::Zero(n, n);
  for (Index branch = 0; branch < 2; ++branch) {
    for (Index j = 0; j < spec.env_dim; ++j) {
      const CVec psi = branch == 0
                           ? CVec(spec.psi_plus.col(j))
                           : CVec(spec.psi_plus.col(j).conjugate());
      CMat expect = CMat::Zero(local_dim, local_dim);
      for (Index a = 0; a < local_dim; ++a)
        for (Index b = 0; b < local_dim; ++b) {
          Complex acc{};
          for (Index p = 0; p < n_eu; ++p)
            for (Index q = 0; q < n_eu; ++q)
              acc += std::conj(psi(p)) * mc(p * local_dim + a,
                                            q * local_dim + b) * psi(q);
          expect(a, b) = acc;
        }
      out += kron(CMat(psi * psi.adjoint()), expect);
    }
  }
  if (out.imag().norm() > 1e-9 * std::max(1.0, out.real().norm()))
    throw EigFailure("apply_projection: imaginary residue");
  return out.real();
}

std::vector<Mat> evolve_projected(const ProjectedState& initial,
                                  const LocalGenerator& gen,
                                  const SpectralData& spec,
                                  std::span<const double> times, NuMode mode,
                                  std::vector<ProjectedState>* out_states) {
  const Index n_env = spec.env_dim;
  if (static_cast<Index>(initial.sigma.size()) != n_env)
    throw DimMismatch("evolve_projected: state does not match spectrum");
  const Index d = initial.local_dim();
  if (gen.k.rows() != d || gen.l.rows() != d)
    throw DimMismatch("evolve_projected: generator dimension");

  const NuSpectrum nu = compute_nu(spec);
  const Vec* nu_used = &nu.exact;
  if (mode == NuMode::SecondOrder) nu_used = &nu.second_order;
  if (mode == NuMode::ThirdOrder) nu_used = &nu.third_order;

  const CMat il = kImag * gen.l.cast<Complex>();
  struct Mode {
    Vec eta;
    CMat u;
    Eigen::Matrix2cd ubit;
  };
  std::vector<Mode> modes(static_cast<size_t>(n_env));
  for (Index n = 0; n < n_env; ++n) {
    CMat h = (*nu_used)(n)*gen.k.cast<Complex>() + il;
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    if (es.info() != Eigen::Success)
      throw EigFailure("evolve_projected: effective Hamiltonian eigensolver");
    modes[static_cast<size_t>(n)].eta = es.eigenvalues();
    modes[static_cast<size_t>(n)].u = es.eigenvectors();
    modes[static_cast<size_t>(n)].ubit = ubit_overlap(spec.psi_plus.col(n));
  }

  if (out_states) out_states->clear();
  std::vector<Mat> out;
  out.reserve(times.size());
  for (double t : times) {
    ProjectedState current;
    current.sigma.reserve(static_cast<size_t>(n_env));
    CMat rho_ua = CMat::Zero(2 * d, 2 * d);
    for (Index n = 0; n < n_env; ++n) {
      const Mode& mode_n = modes[static_cast<size_t>(n)];
      CVec phase(d);
      for (Index k = 0; k < d; ++k)
        phase(k) = std::exp(-kImag * mode_n.eta(k) * t);
      const CMat prop = mode_n.u * phase.asDiagonal() * mode_n.u.adjoint();
      const CMat sig =
          prop * initial.sigma[static_cast<size_t>(n)] * prop.adjoint();
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          rho_ua.block(a * d, b * d, d, d) += mode_n.ubit(a, b) * sig;
      if (out_states) current.sigma.push_back(sig);
    }
    // Add the conjugate branch: the sum is twice the real part.
    Mat rho_real = 2.0 * rho_ua.real();
    out.push_back(std::move(rho_real));
    if (out_states) out_states->push_back(std::move(current));
  }
  return out;
}

Mat reconstruct_rho_ua(const ProjectedState& state, const SpectralData& spec) {
  const Index d = state.local_dim();
  CMat rho = CMat::Zero(2 * d, 2 * d);
  for (Index n = 0; n < spec.env_dim; ++n) {
    const Eigen::Matrix2cd u = ubit_overlap(spec.psi_plus.col(n));
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        rho.block(a * d, b * d, d, d) +=
            u(a, b) * state.sigma[static_cast<size_t>(n)];
  }
  return 2.0 * rho.real();
}

Mat reconstruct_full(const ProjectedState& state, const SpectralData& spec) {
  const Index d = state.local_dim();
  const Index n = 2 * spec.env_dim * d;
  CMat full = CMat::Zero(n, n);
  for (Index j = 0; j < spec.env_dim; ++j) {
    const CVec psi = spec.psi_plus.col(j);
    full += kron(CMat(psi * psi.adjoint()),
                 state.sigma[static_cast<size_t>(j)]);
  }
  return 2.0 * full.real();
}

Mat eu_marginal(const ProjectedState& state, const SpectralData& spec) {
  const Index n_eu = 2 * spec.env_dim;
  CMat marg = CMat::Zero(n_eu, n_eu);
  for (Index n = 0; n < spec.env_dim; ++n) {
    const Complex w = state.sigma[static_cast<size_t>(n)].trace();
    const CVec psi = spec.psi_plus.col(n);
    marg += w * (psi * psi.adjoint());
  }
  return 2.0 * marg.real();
}

namespace {

Mat pair_generator_k(const NoSignalingSetup& setup, size_t bob) {
  const Index da = setup.k_alice.rows();
  const Index db = setup.bobs[bob].first.rows();
  return kron(setup.k_alice, Mat::Identity(db, db)) +
         kron(Mat::Identity(da, da), setup.bobs[bob].first);
}

Mat pair_generator_l(const NoSignalingSetup& setup, size_t bob) {
  const Index da = setup.l_alice.rows();
  const Index db = setup.bobs[bob].second.rows();
  return kron(setup.l_alice, Mat::Identity(db, db)) +
         kron(Mat::Identity(da, da), setup.bobs[bob].second);
}

Mat initial_rho_uab(const NoSignalingSetup& setup) {
  const CMat sigma_ab = kron(setup.sigma_a0, setup.sigma_b0);
  return complex_to_real_state(sigma_ab);
}

}  // namespace

NoSignalingReport no_signaling_projected(const SpectralData& spec,
                                         const NoSignalingSetup& setup,
                                         std::span<const double> times) {
  if (setup.bobs.empty())
    throw DomainError("no_signaling_projected: no Bob generators");
  const Index da = setup.k_alice.rows();
  const Index db = setup.bobs.front().first.rows();
  const Mat rho_uab = initial_rho_uab(setup);
  const ProjectedState state0 = project_ua_state(rho_uab, spec);
  TensorSpace ua_space({2, da, db});
  const std::vector<Index> keep{0, 1};

  std::vector<std::vector<Mat>> rho_ua_series;
  for (size_t bob = 0; bob < setup.bobs.size(); ++bob) {
    LocalGenerator gen;
    gen.k = pair_generator_k(setup, bob);
    gen.l = pair_generator_l(setup, bob);
    const auto rho_uab_t =
        evolve_projected(state0, gen, spec, times, NuMode::Exact);
    std::vector<Mat> reduced;
    reduced.reserve(rho_uab_t.size());
    for (const Mat& r : rho_uab_t)
      reduced.push_back(partial_trace(r, ua_space, keep));
    rho_ua_series.push_back(std::move(reduced));
  }

  NoSignalingReport report;
  for (size_t bob = 0; bob < setup.bobs.size(); ++bob) {
    double sup = 0;
    for (size_t i = 0; i < times.size(); ++i)
      sup = std::max(sup,
                     (rho_ua_series[bob][i] - rho_ua_series[0][i]).norm());
    report.divergence.push_back(sup);
    report.max_divergence = std::max(report.max_divergence, sup);
  }
  return report;
}

NoSignalingReport no_signaling_exact(const ModelParams& params,
                                     const Mat& b_eu,
                                     const NoSignalingSetup& setup,
                                     std::span<const double> times) {
  if (setup.bobs.empty())
    throw DomainError("no_signaling_exact: no Bob generators");
  const Index da = setup.k_alice.rows();
  const Index db = setup.bobs.front().first.rows();
  const Mat rho_uab = initial_rho_uab(setup);
  const Mat rho0 = initial_state_mixed_env(params.env_dim, rho_uab);
  TensorSpace ua_space({2, da, db});
  const std::vector<Index> keep{0, 1};

  ModelParams pair_params = params;
  pair_params.local_dim = da * db;

  std::vector<std::vector<Mat>> rho_ua_series;
  for (size_t bob = 0; bob < setup.bobs.size(); ++bob) {
    LocalGenerator gen;
    gen.k = pair_generator_k(setup, bob);
    gen.l = pair_generator_l(setup, bob);
    const Mat s_uab = local_generator_matrix(gen);
    const Mat s_hat =
        assemble_full_stueckelbergian(pair_params, b_eu, s_uab);
    ExactPropagator prop(s_hat, params.env_dim);
    const auto rho_uab_t = prop.reduced_trajectory(rho0, times);
    std::vector<Mat> reduced;
    reduced.reserve(rho_uab_t.size());
    for (const Mat& r : rho_uab_t)
      reduced.push_back(partial_trace(r, ua_space, keep));
    rho_ua_series.push_back(std::move(reduced));
  }

  NoSignalingReport report;
  for (size_t bob = 0; bob < setup.bobs.size(); ++bob) {
    double sup = 0;
    for (size_t i = 0; i < times.size(); ++i)
      sup = std::max(sup,
                     (rho_ua_series[bob][i] - rho_ua_series[0][i]).norm());
    report.divergence.push_back(sup);
    report.max_divergence = std::max(report.max_divergence, sup);
  }
  return report;
}

}  // namespace ubit
