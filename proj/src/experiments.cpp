#include "ubit/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <json.hpp>
#include <numbers>

#include "ubit/analytic.hpp"
#include "ubit/limits.hpp"
#include "ubit/modubit.hpp"
#include "ubit/transcription.hpp"

namespace ubit {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw ConfigError("cannot open output file " + path.string());
    for (size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ",";
      out_ << header[i];
    }
    out_ << "\n";
  }

  void row(const std::vector<double>& values) {
    for (size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ",";
      out_ << fmt(values[i]);
    }
    out_ << "\n";
  }

  void row_tagged(const std::string& tag, const std::vector<double>& values) {
    out_ << tag;
    for (double v : values) out_ << "," << fmt(v);
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

Mat coupling_for(const ExperimentConfig& cfg) {
  return generate_coupling(cfg.model.env_dim, cfg.model.seed);
}

Mat initial_env_state(const ExperimentConfig& cfg, const Mat& rho_ua) {
  if (cfg.env_init == "random_pure")
    return initial_state_pure_env(cfg.model.env_dim, cfg.model.seed, rho_ua);
  return initial_state_mixed_env(cfg.model.env_dim, rho_ua);
}

// Transverse-envelope 1/e crossing by linear interpolation; NaN if the
// envelope never crosses inside the sampled window.
double measured_t_star(const BlochTrajectory& traj) {
  if (traj.samples.size() < 2) return std::nan("");
  const double bx0 = traj.samples.front().bx;
  const double by0 = traj.samples.front().by;
  const double ell0 = std::hypot(bx0, by0);
  if (ell0 <= 0) return std::nan("");
  const double target = ell0 / std::numbers::e;
  double prev_t = traj.samples.front().t;
  double prev_ell = ell0;
  for (const auto& s : traj.samples) {
    const double ell = std::hypot(s.bx, s.by);
    if (ell <= target && prev_ell > target) {
      const double frac = (prev_ell - target) / (prev_ell - ell);
      return prev_t + frac * (s.t - prev_t);
    }
    prev_t = s.t;
    prev_ell = ell;
  }
  return std::nan("");
}

struct PrecessSummary {
  FrequencyFit freq;
  FrequencyFit dip;
  double b_min = 0, b_max = 0;
  double bz_drift = 0;
  double t_star_measured = 0;
};

PrecessSummary summarize_precession(const BlochTrajectory& traj,
                                    double big_omega, double xi_expected) {
  PrecessSummary s;
  const auto t = traj.times();
  // Fit over at most the first ten nominal periods.
  const double fit_window = 10.0 * 2.0 * std::numbers::pi / big_omega;
  size_t fit_n = t.size();
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] > fit_window) {
      fit_n = i;
      break;
    }
  }
  if (fit_n < 16) fit_n = t.size();
  const auto bx = traj.component('x');
  const auto len = traj.component('l');
  s.freq = fit_cosine(std::span(t).first(fit_n), std::span(bx).first(fit_n),
                      xi_expected * big_omega);
  s.dip = fit_cosine(std::span(t).first(fit_n), std::span(len).first(fit_n),
                     2.0 * s.freq.omega);
  s.b_min = traj.min_len();
  s.b_max = traj.max_len();
  const double bz0 = traj.samples.front().bz;
  for (const auto& p : traj.samples)
    s.bz_drift = std::max(s.bz_drift, std::abs(p.bz - bz0));
  s.t_star_measured = measured_t_star(traj);
  return s;
}

void write_bloch_csv(const fs::path& path, const BlochTrajectory& traj,
                     const std::vector<double>* bx_pred,
                     const std::vector<double>* by_pred) {
  std::vector<std::string> header{"time",       "b_x",        "b_y",
                                  "b_z",        "b_len",      "residual_X",
                                  "residual_Z"};
  if (bx_pred) {
    header.push_back("b_x_model");
    header.push_back("b_y_model");
  }
  CsvWriter csv(path, header);
  for (size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& p = traj.samples[i];
    std::vector<double> row{p.t, p.bx, p.by, p.bz, p.len, p.res_x, p.res_z};
    if (bx_pred) {
      row.push_back((*bx_pred)[i]);
      row.push_back((*by_pred)[i]);
    }
    csv.row(row);
  }
}

json run_relax(const ExperimentConfig& cfg, const fs::path& dir,
               std::vector<std::string>& files) {
  const Mat b = coupling_for(cfg);
  const auto times = linspace(0.0, cfg.t_max, cfg.samples);
  const bool gamma_run = cfg.id == "relax-gamma";
  const char op = gamma_run ? 'J' : 'X';
  const auto coeffs = relaxation_experiment(cfg.model, b, op, times);

  json summary;
  const double lam = cfg.model.lambda();
  if (gamma_run) {
    std::vector<std::string> header{"time", "gamma"};
    if (cfg.overlay) header.push_back("gamma_model");
    CsvWriter csv(dir / "gamma.csv", header);
    double tail_sum = 0;
    int tail_count = 0;
    for (size_t i = 0; i < times.size(); ++i) {
      std::vector<double> row{times[i], coeffs.c_j[i]};
      if (cfg.overlay)
        row.push_back(predict_gamma(cfg.model.coupling, cfg.model.omega,
                                    times[i]));
      csv.row(row);
      if (times[i] >= 0.5 * cfg.t_max) {
        tail_sum += coeffs.c_j[i];
        ++tail_count;
      }
    }
    files.push_back("gamma.csv");
    summary["gamma_tail_mean"] = tail_sum / std::max(tail_count, 1);
    summary["gamma_asymptote_model"] = 1.0 - lam * lam;
  } else {
    std::vector<std::string> header{"time", "beta_x", "beta_z"};
    if (cfg.overlay) {
      header.push_back("beta_x_model");
      header.push_back("beta_z_model");
    }
    CsvWriter csv(dir / "beta.csv", header);
    for (size_t i = 0; i < times.size(); ++i) {
      std::vector<double> row{times[i], coeffs.c_x[i], coeffs.c_z[i]};
      if (cfg.overlay) {
        const auto [bx, bz] =
            predict_beta(cfg.model.coupling, cfg.model.omega, times[i]);
        row.push_back(bx);
        row.push_back(bz);
      }
      csv.row(row);
    }
    files.push_back("beta.csv");
    // Rotation rate of the (beta_x, beta_z) vector from unwrapped phase,
    // fitted while the envelope is still appreciable.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    double phase_prev = 0, unwrapped = 0;
    for (size_t i = 0; i < times.size(); ++i) {
      const double mag = std::hypot(coeffs.c_x[i], coeffs.c_z[i]);
      const double ph = std::atan2(coeffs.c_z[i], coeffs.c_x[i]);
      if (i > 0) {
        double d = ph - phase_prev;
        while (d > std::numbers::pi) d -= 2 * std::numbers::pi;
        while (d < -std::numbers::pi) d += 2 * std::numbers::pi;
        unwrapped += d;
      }
      phase_prev = ph;
      if (mag > 0.1) {
        sx += times[i];
        sy += unwrapped;
        sxx += times[i] * times[i];
        sxy += times[i] * unwrapped;
        ++count;
      }
    }
    const double denom = count * sxx - sx * sx;
    summary["beta_rotation_rate"] =
        denom > 0 ? (count * sxy - sx * sy) / denom : 0.0;
    summary["beta_rotation_expected"] = 2.0 * cfg.model.omega;
  }
  summary["lambda"] = lam;
  return summary;
}

json run_precess(const ExperimentConfig& cfg, const fs::path& dir,
                 std::vector<std::string>& files) {
  const Mat b = coupling_for(cfg);
  const auto times = linspace(0.0, cfg.t_max, cfg.samples);
  PrecessionSetup setup;
  setup.big_omega = cfg.big_omega;
  setup.axis = cfg.axis;
  setup.b0 = cfg.b0;
  setup.split = cfg.split;
  const auto traj = precession_experiment(cfg.model, b, setup, times);

  const double lam = cfg.model.lambda();
  const auto pred = predict_precession(lam, cfg.big_omega);
  std::vector<double> bx_pred, by_pred;
  if (cfg.overlay) {
    for (double t : times) {
      bx_pred.push_back(pred.bx(t));
      by_pred.push_back(pred.by(t));
    }
  }
  write_bloch_csv(dir / "bloch.csv", traj, cfg.overlay ? &bx_pred : nullptr,
                  cfg.overlay ? &by_pred : nullptr);
  files.push_back("bloch.csv");

  const auto s = summarize_precession(traj, cfg.big_omega, pred.xi);
  json summary;
  summary["omega_fitted"] = s.freq.omega;
  summary["xi_fitted"] = s.freq.omega / cfg.big_omega;
  summary["xi_model"] = pred.xi;
  summary["b_min"] = s.b_min;
  summary["b_max"] = s.b_max;
  summary["dip_omega_fitted"] = s.dip.omega;
  summary["dip_amplitude"] = s.dip.amplitude;
  summary["bz_drift"] = s.bz_drift;
  summary["t_star"] = pred.t_star();
  summary["t_star_measured"] = s.t_star_measured;
  summary["tau_model"] = pred.tau();
  summary["lambda"] = lam;
  return summary;
}

json run_frozen(const ExperimentConfig& cfg, const fs::path& dir,
                std::vector<std::string>& files) {
  const Mat b = coupling_for(cfg);
  const auto result = frozen_spin_experiment(cfg.model, b, cfg.big_omega,
                                             cfg.t_freeze, cfg.samples);
  write_bloch_csv(dir / "bloch.csv", result.trajectory, nullptr, nullptr);
  files.push_back("bloch.csv");
  json summary;
  summary["final_len"] = result.final_len;
  summary["initial_len"] = result.trajectory.samples.front().len;
  summary["t_freeze_start"] = result.t_freeze_start;
  summary["t_freeze_end"] = result.t_freeze_end;
  double by_min = 1e300, by_max = -1e300;
  for (const auto& p : result.trajectory.samples) {
    if (p.t >= result.t_freeze_start && p.t <= result.t_freeze_end) {
      by_min = std::min(by_min, p.by);
      by_max = std::max(by_max, p.by);
    }
  }
  summary["by_freeze_drift"] = (by_max > by_min) ? by_max - by_min : 0.0;
  return summary;
}

json run_projected(const ExperimentConfig& cfg, const fs::path& dir,
                   std::vector<std::string>& files) {
  const Mat b = coupling_for(cfg);
  const auto times = linspace(0.0, cfg.t_max, cfg.samples);
  PrecessionSetup setup;
  setup.big_omega = cfg.big_omega;
  setup.axis = cfg.axis;
  setup.b0 = cfg.b0;
  setup.split = cfg.split;
  const auto exact = precession_experiment(cfg.model, b, setup, times);

  const auto spec = spectral_decompose(b, cfg.model.coupling, cfg.model.omega);
  const LocalGenerator gen = split_local_generator(precession_generator(setup));
  const ProjectedState state0 =
      project_ua_state(precession_initial_ua(setup), spec);
  const auto rho_proj = evolve_projected(state0, gen, spec, times, cfg.nu_mode);

  BlochTrajectory proj;
  for (size_t i = 0; i < times.size(); ++i)
    proj.samples.push_back(bloch_from_rho(rho_proj[i], times[i]));

  write_bloch_csv(dir / "bloch_exact.csv", exact, nullptr, nullptr);
  write_bloch_csv(dir / "bloch_projected.csv", proj, nullptr, nullptr);
  files.push_back("bloch_exact.csv");
  files.push_back("bloch_projected.csv");

  double sup = 0;
  for (size_t i = 0; i < times.size(); ++i) {
    const auto& a = exact.samples[i];
    const auto& p = proj.samples[i];
    const double d = std::sqrt((a.bx - p.bx) * (a.bx - p.bx) +
                               (a.by - p.by) * (a.by - p.by) +
                               (a.bz - p.bz) * (a.bz - p.bz));
    sup = std::max(sup, d);
  }

  const NuSpectrum nu = compute_nu(spec);
  {
    CsvWriter csv(dir / "nu_hist.csv", {"bin_lo", "bin_hi", "count"});
    const double lo = nu.exact.minCoeff();
    const double hi = nu.exact.maxCoeff();
    const int bins = 24;
    const double width = (hi > lo) ? (hi - lo) / bins : 1.0;
    for (int k = 0; k < bins; ++k) {
      const double a = lo + k * width;
      const double b2 = a + width;
      int count = 0;
      for (Index n = 0; n < nu.exact.size(); ++n)
        if (nu.exact(n) >= a && (nu.exact(n) < b2 || k == bins - 1)) ++count;
      csv.row({a, b2, static_cast<double>(count)});
    }
    files.push_back("nu_hist.csv");
  }

  json summary;
  summary["bloch_sup_distance"] = sup;
  summary["nu_mean"] = nu.exact.mean();
  summary["nu_second_order"] = 1.0 - 0.5 * cfg.model.lambda() *
                                         cfg.model.lambda();
  double var = 0;
  for (Index n = 0; n < nu.exact.size(); ++n)
    var += (nu.exact(n) - nu.exact.mean()) * (nu.exact(n) - nu.exact.mean());
  summary["nu_std"] = std::sqrt(var / std::max<Index>(1, nu.exact.size()));
  summary["lambda"] = cfg.model.lambda();
  return summary;
}

json run_nosignal(const ExperimentConfig& cfg, const fs::path& dir,
                  std::vector<std::string>& files) {
  const Mat b = coupling_for(cfg);
  const auto spec = spectral_decompose(b, cfg.model.coupling, cfg.model.omega);
  const auto times = linspace(0.0, cfg.t_max, cfg.samples);

  NoSignalingSetup setup;
  setup.k_alice = 0.5 * cfg.big_omega * ubit_z();
  setup.l_alice = Mat::Zero(2, 2);
  setup.bobs.push_back({Mat::Zero(2, 2), Mat::Zero(2, 2)});
  // A strong deterministic alternative for Bob.
  Mat kb(2, 2);
  kb << 1.3, 0.4, 0.4, -0.7;
  Mat lb(2, 2);
  lb << 0, 0.9, -0.9, 0;
  setup.bobs.push_back({3.0 * cfg.big_omega * kb, 3.0 * cfg.big_omega * lb});
  setup.sigma_a0 =
      0.5 * (CMat::Identity(2, 2) + ubit_x().cast<Complex>());
  setup.sigma_b0 =
      0.5 * (CMat::Identity(2, 2) + ubit_z().cast<Complex>());

  const auto projected = no_signaling_projected(spec, setup, times);

  json summary;
  summary["projected_divergence"] = projected.max_divergence;
  summary["lambda"] = cfg.model.lambda();

  // Exact finite-size comparison at a desk-sized environment: reported, not
  // asserted small.
  ModelParams small = cfg.model;
  small.env_dim = std::min<Index>(small.env_dim, 50);
  const Mat b_small = generate_coupling(small.env_dim, small.seed);
  const auto exact = no_signaling_exact(small, b_small, setup, times);
  summary["exact_divergence"] = exact.max_divergence;
  summary["exact_env_dim"] = small.env_dim;

  CsvWriter csv(dir / "nosignal.csv", {"bob_index", "divergence_projected"});
  for (size_t i = 0; i < projected.divergence.size(); ++i)
    csv.row({static_cast<double>(i), projected.divergence[i]});
  files.push_back("nosignal.csv");
  return summary;
}

json run_modubit(const ExperimentConfig& cfg, const fs::path& dir,
                 std::vector<std::string>& files) {
  const Mat b = coupling_for(cfg);
  const auto times = linspace(0.0, cfg.t_max, cfg.samples);
  PrecessionSetup setup;
  setup.big_omega = cfg.big_omega;
  setup.axis = cfg.axis;
  setup.b0 = cfg.b0;
  setup.split = cfg.split;

  const auto spec = spectral_decompose(b, cfg.model.coupling, cfg.model.omega);
  const auto frame = build_frame(spec);
  const Mat frame_full = expand_frame(frame, cfg.model.local_dim);

  const auto raw = precession_experiment(cfg.model, b, setup, times);
  const auto modified =
      precession_experiment(cfg.model, b, setup, times, &frame_full);

  CsvWriter csv(dir / "bloch_frames.csv",
                {"frame", "time", "b_x", "b_y", "b_z", "b_len", "residual_X",
                 "residual_Z"});
  // Header says "frame" first; rows are tagged.
  for (const auto& p : raw.samples)
    csv.row_tagged("raw", {p.t, p.bx, p.by, p.bz, p.len, p.res_x, p.res_z});
  for (const auto& p : modified.samples)
    csv.row_tagged("modified",
                   {p.t, p.bx, p.by, p.bz, p.len, p.res_x, p.res_z});
  files.push_back("bloch_frames.csv");

  const double lam = cfg.model.lambda();
  json summary;
  summary["b_min_raw"] = raw.min_len();
  summary["b_min_modified"] = modified.min_len();
  summary["b_max_modified"] = modified.max_len();
  const auto fit = summarize_precession(modified, cfg.big_omega,
                                        1.0 - 0.5 * lam * lam);
  summary["xi_fitted_modified"] = fit.freq.omega / cfg.big_omega;
  const Mat gram = frame.o.transpose() * frame.o;
  summary["frame_orthogonality_residual"] =
      (gram - Mat::Identity(gram.rows(), gram.cols())).norm();
  summary["lambda"] = lam;
  return summary;
}

json run_limits(const ExperimentConfig& cfg, const fs::path& dir,
                std::vector<std::string>& files) {
  const Mat b = coupling_for(cfg);
  PrecessionSetup setup;
  setup.big_omega = cfg.big_omega;
  setup.axis = cfg.axis;
  setup.b0 = cfg.b0;
  const Mat s_ua = precession_generator(setup);
  const auto report = large_omega_scan(b, s_ua, cfg.model.coupling,
                                       cfg.limit_omegas, cfg.limit_t);
  CsvWriter csv(dir / "limits.csv", {"omega", "delta"});
  for (size_t i = 0; i < report.omegas.size(); ++i)
    csv.row({report.omegas[i], report.deltas[i]});
  files.push_back("limits.csv");
  json summary;
  summary["fit_exponent"] = report.fit_exponent;
  summary["split_residual"] = report.split_residual;
  return summary;
}

}  // namespace

std::vector<std::string> run_experiment(const ExperimentConfig& cfg,
                                        const std::string& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  fs::path dir(out_dir);
  fs::create_directories(dir);
  std::vector<std::string> files;

  json summary;
  if (cfg.id == "relax-gamma" || cfg.id == "relax-beta") {
    summary = run_relax(cfg, dir, files);
  } else if (cfg.id == "precess") {
    summary = run_precess(cfg, dir, files);
  } else if (cfg.id == "frozen") {
    summary = run_frozen(cfg, dir, files);
  } else if (cfg.id == "projected") {
    summary = run_projected(cfg, dir, files);
  } else if (cfg.id == "nosignal") {
    summary = run_nosignal(cfg, dir, files);
  } else if (cfg.id == "modubit") {
    summary = run_modubit(cfg, dir, files);
  } else if (cfg.id == "limits") {
    summary = run_limits(cfg, dir, files);
  } else {
    throw ConfigError("run_experiment: unknown id " + cfg.id);
  }

  {
    std::ofstream out(dir / "summary.json");
    out << summary.dump(2) << "\n";
    files.push_back("summary.json");
  }

  const auto stop = std::chrono::steady_clock::now();
  json manifest;
  manifest["experiment"] = cfg.id;
  manifest["config_hash"] = config_hash(cfg);
  manifest["seed"] = cfg.model.seed;
  manifest["version"] = kVersion;
  manifest["wall_time_s"] =
      std::chrono::duration<double>(stop - start).count();
  manifest["outputs"] = files;
  {
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << "\n";
  }
  files.push_back("manifest.json");
  return files;
}

namespace {

void apply_sweep_value(ExperimentConfig& cfg, const std::string& param,
                       double value) {
  if (param == "lambda") {
    cfg.model.coupling = value * cfg.model.omega;
  } else if (param == "s") {
    cfg.model.coupling = value;
  } else if (param == "omega") {
    cfg.model.omega = value;
  } else if (param == "N") {
    cfg.model.env_dim = static_cast<Index>(value);
  } else if (param == "Omega") {
    cfg.big_omega = value;
  } else if (param == "seed") {
    cfg.model.seed = static_cast<std::uint64_t>(value);
  } else {
    throw ConfigError("sweep: unknown parameter '" + param + "'");
  }
  cfg.model.validate();
}

std::string value_tag(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  std::string s(buf);
  for (char& c : s)
    if (c == '.') c = 'p';
  return s;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& base, const std::string& param,
                      const std::vector<double>& values,
                      const std::string& out_dir, int threads) {
  SweepResult result;
  if (values.empty()) return result;
  fs::create_directories(out_dir);

  auto run_point = [&](size_t idx) {
    SweepPoint point;
    point.value = values[idx];
    ExperimentConfig cfg = base;
    apply_sweep_value(cfg, param, values[idx]);
    cfg.model.seed = substream(base.model.seed, idx + 1);
    const fs::path dir =
        fs::path(out_dir) / (param + "_" + value_tag(values[idx]));
    point.dir = dir.string();
    try {
      run_experiment(cfg, dir.string());
      std::ifstream in(dir / "summary.json");
      json summary = json::parse(in);
      point.xi_fitted = summary.value("xi_fitted", 0.0);
      point.b_min = summary.value("b_min", 0.0);
      point.t_star = summary.value("t_star", 0.0);
      point.ok = true;
    } catch (const std::exception& err) {
      point.ok = false;
      point.error = err.what();
    }
    return point;
  };

  if (threads <= 1) {
    for (size_t i = 0; i < values.size(); ++i)
      result.points.push_back(run_point(i));
  } else {
    std::vector<std::future<SweepPoint>> futures;
    for (size_t i = 0; i < values.size(); ++i)
      futures.push_back(std::async(std::launch::async, run_point, i));
    for (auto& f : futures) result.points.push_back(f.get());
  }
  for (const auto& p : result.points) result.all_ok &= p.ok;

  CsvWriter csv(fs::path(out_dir) / "sweep_summary.csv",
                {"value", "ok", "xi_fitted", "b_min", "t_star"});
  json sweep_json;
  sweep_json["param"] = param;
  sweep_json["points"] = json::array();
  for (const auto& p : result.points) {
    csv.row({p.value, p.ok ? 1.0 : 0.0, p.xi_fitted, p.b_min, p.t_star});
    json jp;
    jp["value"] = p.value;
    jp["ok"] = p.ok;
    jp["dir"] = p.dir;
    if (!p.ok) jp["error"] = p.error;
    jp["xi_fitted"] = p.xi_fitted;
    jp["b_min"] = p.b_min;
    jp["t_star"] = p.t_star;
    sweep_json["points"].push_back(jp);
  }
  std::ofstream out(fs::path(out_dir) / "sweep.json");
  out << sweep_json.dump(2) << "\n";
  return result;
}

}  // namespace ubit
