#pragma once

#include <string>
#include <vector>

#include "ubit/config.hpp"

namespace ubit {

// Runs one configured experiment, writing CSV artifacts, a summary.json and
// a manifest.json into out_dir.  Returns the list of files written.
// Deterministic given the config (manifest timestamp aside).
std::vector<std::string> run_experiment(const ExperimentConfig& cfg,
                                        const std::string& out_dir);

struct SweepPoint {
  double value = 0;
  std::string dir;
  bool ok = false;
  std::string error;
  double xi_fitted = 0;
  double b_min = 0;
  double t_star = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  bool all_ok = true;
};

// One run per value with deterministically split seeds; threads > 1 runs
// points concurrently.  Writes sweep_summary.csv and sweep.json in out_dir.
SweepResult run_sweep(const ExperimentConfig& base, const std::string& param,
                      const std::vector<double>& values,
                      const std::string& out_dir, int threads = 1);

}  // namespace ubit
