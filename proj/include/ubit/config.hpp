#pragma once

#include <string>
#include <vector>

#include "ubit/dynamics.hpp"
#include "ubit/model.hpp"
#include "ubit/projected.hpp"

namespace ubit {

// Parsed experiment description.  Sectioned key/value text; unknown sections
// or keys are rejected, and every referenced module precondition is checked
// at parse time.
struct ExperimentConfig {
  std::string id;  // relax-gamma | relax-beta | precess | frozen | projected
                   // | nosignal | modubit | limits
  ModelParams model;
  std::string env_init = "maximally_mixed";
  SplitBasis split = SplitBasis::Identity;

  double big_omega = 2 * std::numbers::pi;
  Eigen::Vector3d axis{0, 0, 1};
  Eigen::Vector3d b0{1, 0, 0};
  double t_freeze = 0;

  double t_max = 10.0;
  Index samples = 400;

  bool overlay = true;
  std::string out_dir = "out";

  NuMode nu_mode = NuMode::Exact;

  std::vector<double> limit_omegas{100.0, 316.22776601683796, 1000.0,
                                   3162.2776601683795};
  double limit_t = 1.0;

  std::string raw_text;  // original file content, for the manifest hash
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace ubit
