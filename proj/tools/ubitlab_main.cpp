#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

#include "ubit/experiments.hpp"

namespace {

std::string default_out_dir() {
  if (const char* env = std::getenv("UBITLAB_OUT")) return env;
  return "out";
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> values;
  std::stringstream in(csv);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    values.push_back(std::stod(tok));
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ubitlab: real-vector-space quantum dynamics with a universal "
               "rebit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = default_out_dir();
  long long seed_override = -1;
  int threads = 0;

  auto* run = app.add_subcommand("run", "run one configured experiment");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed_override, "override the config seed");

  std::string sweep_param;
  std::string sweep_values;
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("config", config_path, "base config file")->required();
  sweep->add_option("--param", sweep_param, "parameter to sweep "
                    "(lambda, s, omega, N, Omega, seed)")
      ->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")
      ->required();
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--seed", seed_override, "override the config seed");
  sweep->add_option("--threads", threads, "parallel sweep points "
                    "(default: hardware concurrency)");

  CLI11_PARSE(app, argc, argv);

  try {
    ubit::ExperimentConfig cfg = ubit::parse_config_file(config_path);
    if (seed_override >= 0)
      cfg.model.seed = static_cast<std::uint64_t>(seed_override);
    if (!cfg.out_dir.empty() && out_dir == "out" &&
        !std::getenv("UBITLAB_OUT"))
      out_dir = cfg.out_dir;

    if (*run) {
      const auto files = ubit::run_experiment(cfg, out_dir);
      for (const auto& f : files) std::cout << out_dir << "/" << f << "\n";
      return 0;
    }

    const auto values = parse_values(sweep_values);
    if (threads <= 0) {
      const unsigned hc = std::thread::hardware_concurrency();
      threads = hc > 0 ? static_cast<int>(hc) : 1;
    }
    const auto result =
        ubit::run_sweep(cfg, sweep_param, values, out_dir, threads);
    for (const auto& p : result.points) {
      std::cout << sweep_param << " = " << p.value << ": "
                << (p.ok ? "ok" : ("FAILED: " + p.error)) << "\n";
    }
    return result.all_ok ? 0 : 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
