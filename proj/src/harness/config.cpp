/* Copyright (c) 2026 The strme Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <string>

#include "strme/harness.hpp"

namespace strme {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("invalid value '" + std::string(value) + "' for key '" +
                    std::string(key) + "'");
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v);
  return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v);
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(std::optional<double> v) { return v ? fmt(*v) : "none"; }

struct Field {
  std::string_view key;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define STRME_REAL(name, member)                                             \
  Field {                                                                    \
    name, [](ExperimentConfig& c, std::string_view v) {                      \
      c.member = to_double(name, v);                                         \
    },                                                                       \
        [](const ExperimentConfig& c) { return fmt(c.member); }              \
  }
#define STRME_COUNT(name, member)                                            \
  Field {                                                                    \
    name, [](ExperimentConfig& c, std::string_view v) {                      \
      c.member = static_cast<decltype(c.member)>(to_u64(name, v));           \
    },                                                                       \
        [](const ExperimentConfig& c) { return std::to_string(c.member); }   \
  }
#define STRME_FLAG(name, member)                                             \
  Field {                                                                    \
    name, [](ExperimentConfig& c, std::string_view v) {                      \
      c.member = to_bool(name, v);                                           \
    },                                                                       \
        [](const ExperimentConfig& c) {                                      \
          return std::string(c.member ? "true" : "false");                   \
        }                                                                    \
  }
#define STRME_TEXT(name, member)                                             \
  Field {                                                                    \
    name, [](ExperimentConfig& c, std::string_view v) {                      \
      c.member = std::string(v);                                             \
    },                                                                       \
        [](const ExperimentConfig& c) { return c.member; }                   \
  }
#define STRME_OPTIONAL_REAL(name, member)                                    \
  Field {                                                                    \
    name, [](ExperimentConfig& c, std::string_view v) {                      \
      if (v == "none") {                                                     \
        c.member.reset();                                                    \
      } else {                                                               \
        c.member = to_double(name, v);                                       \
      }                                                                      \
    },                                                                       \
        [](const ExperimentConfig& c) { return fmt(c.member); }              \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"problem",
       [](ExperimentConfig& c, std::string_view v) {
         if (v == "logistic") c.problem = ProblemKind::logistic;
         else if (v == "mlp") c.problem = ProblemKind::mlp;
         else if (v == "quadratic") c.problem = ProblemKind::quadratic;
         else if (v == "rosenbrock") c.problem = ProblemKind::rosenbrock;
         else bad_value("problem", v);
       },
       [](const ExperimentConfig& c) { return std::string(to_string(c.problem)); }},
      STRME_TEXT("dataset", dataset),
      STRME_TEXT("test_dataset", test_dataset),
      STRME_REAL("train_fraction", train_fraction),
      STRME_FLAG("shuffle_split", shuffle_split),
      STRME_COUNT("train_limit", train_limit),
      STRME_COUNT("test_limit", test_limit),
      STRME_REAL("lambda", lambda),
      STRME_COUNT("hidden", hidden),
      STRME_COUNT("synthetic_dim", synthetic_dim),
      STRME_REAL("synthetic_condition", synthetic_condition),
      STRME_COUNT("problem_seed", problem_seed),
      STRME_REAL("v_f", v_f),
      STRME_REAL("v_g", v_g),
      STRME_REAL("nominal_n", nominal_n),
      {"algorithm",
       [](ExperimentConfig& c, std::string_view v) {
         c.algorithm = parse_algorithm(v);
       },
       [](const ExperimentConfig& c) { return std::string(to_string(c.algorithm)); }},
      STRME_REAL("gamma", opt.gamma),
      STRME_REAL("eta1", opt.eta1),
      STRME_OPTIONAL_REAL("eta2", opt.eta2),
      STRME_REAL("mu0", opt.mu0),
      STRME_REAL("mu_max", opt.mu_max),
      {"max_iterations",
       [](ExperimentConfig& c, std::string_view v) {
         if (v == "none") {
           c.opt.max_iterations.reset();
         } else {
           c.opt.max_iterations = to_u64("max_iterations", v);
         }
       },
       [](const ExperimentConfig& c) {
         return c.opt.max_iterations ? std::to_string(*c.opt.max_iterations)
                                     : std::string("none");
       }},
      STRME_REAL("storm_delta0", storm_delta0),
      STRME_REAL("storm_delta_max", storm_delta_max),
      STRME_COUNT("t0", schedule.t0),
      STRME_COUNT("b0", schedule.b0),
      STRME_COUNT("b_max", schedule.b_max),
      {"batch_mode",
       [](ExperimentConfig& c, std::string_view v) {
         if (v == "linear_delta") c.schedule.mode = BatchMode::linear_delta;
         else if (v == "chebyshev") c.schedule.mode = BatchMode::chebyshev;
         else bad_value("batch_mode", v);
       },
       [](const ExperimentConfig& c) {
         return std::string(c.schedule.mode == BatchMode::chebyshev
                                ? "chebyshev"
                                : "linear_delta");
       }},
      STRME_REAL("batch_scale", schedule.scale),
      STRME_REAL("kappa_ef", accuracy.kappa_ef),
      STRME_REAL("kappa_eg", accuracy.kappa_eg),
      STRME_REAL("eps_f", accuracy.eps_f),
      STRME_REAL("alpha", accuracy.alpha),
      STRME_REAL("beta", accuracy.beta),
      {"estimates",
       [](ExperimentConfig& c, std::string_view v) {
         if (v == "shared") c.estimates = EstimatePolicy::shared;
         else if (v == "resample") c.estimates = EstimatePolicy::resample;
         else bad_value("estimates", v);
       },
       [](const ExperimentConfig& c) {
         return std::string(c.estimates == EstimatePolicy::shared ? "shared"
                                                                  : "resample");
       }},
      STRME_COUNT("lsr1_memory", lsr1.memory),
      STRME_REAL("lsr1_tau0", lsr1.tau0),
      STRME_REAL("lsr1_r", lsr1.skip_r),
      STRME_REAL("adagrad_eta", adagrad_eta),
      STRME_REAL("adagrad_eps", adagrad_eps),
      STRME_COUNT("adagrad_batch", adagrad_batch),
      STRME_REAL("sfo_max_passes", sfo_max_passes),
      STRME_COUNT("eval_every", eval_every),
      STRME_TEXT("init", init),
      STRME_FLAG("warm_start", warm_start),
      STRME_REAL("warm_start_lr", warm_start_lr),
      STRME_COUNT("warm_start_batch", warm_start_batch),
      STRME_COUNT("seed", seed),
      STRME_TEXT("out_dir", out_dir),
      STRME_REAL("nu", nu),
      STRME_OPTIONAL_REAL("l_smooth", l_smooth),
      STRME_OPTIONAL_REAL("f_star", f_star),
      STRME_FLAG("use_fstar_cache", use_fstar_cache),
  };
  return table;
}

#undef STRME_REAL
#undef STRME_COUNT
#undef STRME_FLAG
#undef STRME_TEXT
#undef STRME_OPTIONAL_REAL

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::strme_1st: return "strme_1st";
    case Algorithm::strme_2nd_dogleg: return "strme_2nd_dogleg";
    case Algorithm::strme_lsr1: return "strme_lsr1";
    case Algorithm::storm_1st: return "storm_1st";
    case Algorithm::storm_2nd: return "storm_2nd";
    case Algorithm::storm_lsr1: return "storm_lsr1";
    case Algorithm::adagrad: return "adagrad";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::strme_1st, Algorithm::strme_2nd_dogleg,
                      Algorithm::strme_lsr1, Algorithm::storm_1st,
                      Algorithm::storm_2nd, Algorithm::storm_lsr1,
                      Algorithm::adagrad}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

bool is_storm(Algorithm a) {
  return a == Algorithm::storm_1st || a == Algorithm::storm_2nd ||
         a == Algorithm::storm_lsr1;
}

std::string_view to_string(ProblemKind p) {
  switch (p) {
    case ProblemKind::logistic: return "logistic";
    case ProblemKind::mlp: return "mlp";
    case ProblemKind::quadratic: return "quadratic";
    case ProblemKind::rosenbrock: return "rosenbrock";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  const bool needs_data =
      problem == ProblemKind::logistic || problem == ProblemKind::mlp;
  if (needs_data && dataset.empty()) throw ConfigError("dataset path is required");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1)");
  }
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (!(sfo_max_passes >= 0.0)) throw ConfigError("sfo_max_passes must be >= 0");
  if (!(nominal_n > 0.0)) throw ConfigError("nominal_n must be positive");
  if (!(nu > 0.0 && nu < 1.0)) throw ConfigError("nu must lie in (0, 1)");
  if (l_smooth && !(*l_smooth > 0.0)) throw ConfigError("l_smooth must be positive");
  if (init != "zero" && init != "uniform") {
    throw ConfigError("init must be 'zero' or 'uniform'");
  }
  if (!(v_f >= 0.0 && v_g >= 0.0)) throw ConfigError("variances must be >= 0");
  if (problem == ProblemKind::quadratic &&
      (synthetic_dim == 0 || !(synthetic_condition >= 1.0))) {
    throw ConfigError("quadratic needs synthetic_dim > 0 and condition >= 1");
  }
  if (schedule.b_max < std::max<std::size_t>(schedule.b0, 1)) {
    throw ConfigError("b_max must be >= b0");
  }
  if (!(schedule.scale > 0.0)) throw ConfigError("batch_scale must be positive");
  if (schedule.mode == BatchMode::chebyshev) accuracy.validate();
  if ((algorithm == Algorithm::strme_2nd_dogleg || algorithm == Algorithm::storm_2nd) &&
      problem == ProblemKind::mlp) {
    throw ConfigError("second-order dogleg models need a problem with Hessians");
  }
  if (algorithm == Algorithm::adagrad) {
    if (!(adagrad_eta > 0.0)) throw ConfigError("adagrad_eta must be positive");
    if (!(adagrad_eps >= 0.0)) throw ConfigError("adagrad_eps must be >= 0");
    return;
  }
  if (lsr1.memory < 1 || !(lsr1.tau0 > 0.0) ||
      !(lsr1.skip_r > 0.0 && lsr1.skip_r < 1.0)) {
    throw ConfigError("lsr1 needs memory >= 1, tau0 > 0 and r in (0, 1)");
  }
  if (is_storm(algorithm)) {
    OptConfig o = opt;
    o.mu0 = storm_delta0;
    o.mu_max = storm_delta_max;
    o.validate(ConstantRule{});
  } else {
    opt.validate(PowerRule{});
  }
}

void apply_setting(ExperimentConfig& cfg, std::string_view key,
                   std::string_view value) {
  key = trim(key);
  value = trim(value);
  for (const Field& f : fields()) {
    if (f.key == key) {
      f.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

std::vector<std::pair<std::string, std::string>> config_entries(
    const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Field& f : fields()) out.emplace_back(f.key, f.get(cfg));
  return out;
}

void parse_config(std::istream& in, ExperimentConfig& cfg) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view rest(line);
    if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
      rest = rest.substr(0, hash);
    }
    rest = trim(rest);
    if (rest.empty()) continue;
    const auto eq = rest.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "expected key=value");
    try {
      apply_setting(cfg, rest.substr(0, eq), rest.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ParseError(lineno, e.what());
    }
  }
}

void load_config(const std::filesystem::path& path, ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  parse_config(in, cfg);
}

std::vector<std::string_view> preset_names() {
  return {"logistic-a9a", "logistic-ijcnn1", "dnn-1st", "dnn-lsr1"};
}

ExperimentConfig preset(std::string_view name, Algorithm algorithm) {
  ExperimentConfig c;
  c.algorithm = algorithm;
  c.opt.gamma = 2.0;
  c.opt.eta1 = 0.1;
  c.opt.eta2 = 1e-3;
  c.schedule.b0 = 0;  // feature dimension + 1
  c.schedule.b_max = std::numeric_limits<std::uint32_t>::max();
  const bool second_order = algorithm == Algorithm::strme_2nd_dogleg ||
                            algorithm == Algorithm::storm_2nd;
  if (name == "logistic-a9a" || name == "logistic-ijcnn1") {
    c.problem = ProblemKind::logistic;
    c.lambda = 1e-4;
    c.schedule.t0 = 100;
    c.estimates = EstimatePolicy::resample;
    c.opt.mu_max = 1e3;
    c.storm_delta0 = 1.0;
    c.storm_delta_max = 10.0;
    c.adagrad_eta = 1.0;
    c.init = "zero";
    if (name == "logistic-a9a") {
      c.train_fraction = 0.95;
      c.opt.mu0 = 1.0;
    } else {
      c.train_fraction = 0.75;
      c.opt.mu0 = second_order ? 1.0 : 10.0;
    }
    return c;
  }
  if (name == "dnn-1st" || name == "dnn-lsr1") {
    c.problem = ProblemKind::mlp;
    c.lambda = 1e-3;
    c.schedule.t0 = 10;
    c.estimates = EstimatePolicy::shared;
    c.init = "uniform";
    c.warm_start = true;
    c.opt.mu0 = 0.1;
    c.storm_delta0 = 0.1;
    c.storm_delta_max = 1.0;
    if (name == "dnn-1st") {
      c.opt.mu_max = 2.0;
    } else {
      c.opt.mu_max = 10.0;
      c.lsr1.memory = 30;
      c.lsr1.tau0 = 1.0;
    }
    return c;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace strme
