#include "ubit/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace ubit {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double d = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' has non-numeric value '" +
                      value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' has non-integer value '" +
                      value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config: key '" + key + "' has non-boolean value '" +
                    value + "'");
}

Eigen::Vector3d parse_vec3(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  Eigen::Vector3d v;
  if (!(in >> v.x() >> v.y() >> v.z()))
    throw ConfigError("config: key '" + key +
                      "' needs three numbers, got '" + value + "'");
  std::string rest;
  if (in >> rest)
    throw ConfigError("config: key '" + key + "' has trailing tokens");
  return v;
}

std::vector<double> parse_list(const std::string& key,
                               const std::string& value) {
  std::istringstream in(value);
  std::vector<double> out;
  double d;
  while (in >> d) out.push_back(d);
  if (!in.eof())
    throw ConfigError("config: key '" + key + "' has non-numeric entries");
  return out;
}

const std::vector<std::string> kKnownIds = {
    "relax-gamma", "relax-beta", "precess", "frozen",
    "projected",   "nosignal",   "modubit", "limits"};

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  cfg.raw_text = text;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  bool saw_id = false;

  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "experiment" && section != "model" &&
          section != "local" && section != "time" && section != "output" &&
          section != "projected" && section != "limits")
        throw ConfigError("config: unknown section [" + section + "]");
      continue;
    }

    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string qualified = section + "." + key;

    if (qualified == "experiment.id") {
      cfg.id = value;
      saw_id = true;
    } else if (qualified == "model.N") {
      cfg.model.env_dim = parse_int(qualified, value);
    } else if (qualified == "model.s") {
      cfg.model.coupling = parse_double(qualified, value);
    } else if (qualified == "model.omega") {
      cfg.model.omega = parse_double(qualified, value);
    } else if (qualified == "model.seed") {
      cfg.model.seed =
          static_cast<std::uint64_t>(parse_int(qualified, value));
    } else if (qualified == "model.d_A") {
      cfg.model.local_dim = parse_int(qualified, value);
    } else if (qualified == "model.env") {
      cfg.env_init = value;
    } else if (qualified == "model.split_basis") {
      if (value == "identity") {
        cfg.split = SplitBasis::Identity;
      } else if (value == "real") {
        cfg.split = SplitBasis::RealBasis;
      } else {
        throw ConfigError("config: split_basis must be identity or real");
      }
    } else if (qualified == "local.Omega") {
      cfg.big_omega = parse_double(qualified, value);
    } else if (qualified == "local.axis") {
      cfg.axis = parse_vec3(qualified, value);
    } else if (qualified == "local.b0") {
      cfg.b0 = parse_vec3(qualified, value);
    } else if (qualified == "local.t_freeze") {
      cfg.t_freeze = parse_double(qualified, value);
    } else if (qualified == "time.t_max") {
      cfg.t_max = parse_double(qualified, value);
    } else if (qualified == "time.samples") {
      cfg.samples = parse_int(qualified, value);
    } else if (qualified == "output.overlay") {
      cfg.overlay = parse_bool(qualified, value);
    } else if (qualified == "output.dir") {
      cfg.out_dir = value;
    } else if (qualified == "projected.nu_mode") {
      if (value == "exact") {
        cfg.nu_mode = NuMode::Exact;
      } else if (value == "second") {
        cfg.nu_mode = NuMode::SecondOrder;
      } else if (value == "third") {
        cfg.nu_mode = NuMode::ThirdOrder;
      } else {
        throw ConfigError("config: nu_mode must be exact, second or third");
      }
    } else if (qualified == "limits.omegas") {
      cfg.limit_omegas = parse_list(qualified, value);
    } else if (qualified == "limits.t") {
      cfg.limit_t = parse_double(qualified, value);
    } else {
      throw ConfigError("config: unknown key '" + qualified + "'");
    }
  }

  if (!saw_id) throw ConfigError("config: missing experiment.id");
  if (std::find(kKnownIds.begin(), kKnownIds.end(), cfg.id) ==
      kKnownIds.end())
    throw ConfigError("config: unknown experiment id '" + cfg.id + "'");

  cfg.model.validate();
  if (cfg.env_init != "maximally_mixed" && cfg.env_init != "random_pure")
    throw ConfigError("config: env must be maximally_mixed or random_pure");
  if (!(cfg.t_max > 0)) throw ConfigError("config: t_max must be > 0");
  if (cfg.samples < 2) throw ConfigError("config: samples must be >= 2");
  if (cfg.axis.norm() == 0) throw ConfigError("config: axis must be nonzero");
  if (cfg.b0.norm() > 1 + 1e-9)
    throw ConfigError("config: |b0| must be <= 1");
  if (cfg.t_freeze < 0) throw ConfigError("config: t_freeze must be >= 0");
  if (cfg.id == "limits" && cfg.limit_omegas.size() < 2)
    throw ConfigError("config: limits.omegas needs at least two values");
  if (!(cfg.big_omega > 0)) throw ConfigError("config: Omega must be > 0");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  // FNV-1a over the raw text.
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : cfg.raw_text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace ubit
