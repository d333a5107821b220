// Copyright 2026 The fbfvi Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <yaml-cpp/yaml.h>

#include "fbfvi/error.hpp"
#include "fbfvi/harness.hpp"
#include "fbfvi/operators.hpp"

namespace fbfvi::harness {

namespace {

std::size_t line_of(const YAML::Node& node) { return static_cast<std::size_t>(node.Mark().line) + 1; }

[[noreturn]] void fail_at(const YAML::Node& node, const std::string& what) {
  throw ConfigError("line " + std::to_string(line_of(node)) + ": " + what);
}

std::string scalar(const YAML::Node& v, const std::string& key) {
  if (!v.IsScalar()) fail_at(v, key + " must be a single value");
  return v.Scalar();
}

double to_double(const YAML::Node& node, const std::string& key) {
  const std::string v = scalar(node, key);
  double out = 0.0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size() || !std::isfinite(out)) {
    fail_at(node, key + ": '" + v + "' is not a finite number");
  }
  return out;
}

std::uint64_t to_uint(const YAML::Node& node, const std::string& key) {
  const std::string v = scalar(node, key);
  std::uint64_t out = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) {
    fail_at(node, key + ": '" + v + "' is not a nonnegative integer");
  }
  return out;
}

bool to_bool(const YAML::Node& node, const std::string& key) {
  const std::string v = scalar(node, key);
  if (v == "true" || v == "yes") return true;
  if (v == "false" || v == "no") return false;
  fail_at(node, key + ": '" + v + "' is not a boolean");
}

std::vector<double> to_list(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) fail_at(node, key + " must be a list of numbers");
  std::vector<double> out;
  for (const YAML::Node& item : node) out.push_back(to_double(item, key));
  return out;
}

using Setter = std::function<void(const YAML::Node&)>;

// Applies every entry of `map` through `keys`, rejecting unknown and
// repeated keys.
void apply(const YAML::Node& map, const std::map<std::string, Setter>& keys,
           const std::string& where) {
  if (!map.IsMap()) fail_at(map, where + " must be a mapping");
  std::set<std::string> seen;
  for (const auto& entry : map) {
    const std::string key = entry.first.as<std::string>();
    const auto it = keys.find(key);
    if (it == keys.end()) fail_at(entry.first, "unknown key '" + key + "' in " + where);
    if (!seen.insert(key).second) fail_at(entry.first, "duplicate key '" + key + "' in " + where);
    it->second(entry.second);
  }
}

std::map<std::string, Setter> problem_keys(ProblemSpec& p) {
  const auto file = [&p](std::string NetworkFiles::*field) {
    return [&p, field](const YAML::Node& v) {
      if (!p.files) p.files.emplace();
      (*p.files).*field = scalar(v, "file");
    };
  };
  return {
      {"kind", [&p](const YAML::Node& v) { p.kind = scalar(v, "kind"); }},
      {"name", [&p](const YAML::Node& v) { p.name = scalar(v, "name"); }},
      {"dim", [&p](const YAML::Node& v) { p.dim = to_uint(v, "dim"); }},
      {"seed", [&p](const YAML::Node& v) { p.seed = to_uint(v, "seed"); }},
      {"random", [&p](const YAML::Node& v) { p.random = to_bool(v, "random"); }},
      {"lower", [&p](const YAML::Node& v) { p.lower = to_double(v, "lower"); }},
      {"upper", [&p](const YAML::Node& v) { p.upper = to_double(v, "upper"); }},
      {"radius", [&p](const YAML::Node& v) { p.radius = to_double(v, "radius"); }},
      {"fixture", [&p](const YAML::Node& v) { p.fixture = scalar(v, "fixture"); }},
      {"nodes", file(&NetworkFiles::nodes)},
      {"links", file(&NetworkFiles::links)},
      {"od", file(&NetworkFiles::od)},
      {"paths", file(&NetworkFiles::paths)},
      {"delay", [&p](const YAML::Node& v) { p.delay = scalar(v, "delay"); }},
      {"bandwidth", [&p](const YAML::Node& v) { p.bandwidth = to_double(v, "bandwidth"); }},
      {"time_profile", [&p](const YAML::Node& v) { p.time_profile = scalar(v, "time_profile"); }},
      {"substeps", [&p](const YAML::Node& v) { p.substeps = to_uint(v, "substeps"); }},
      {"penalty_coefficient",
       [&p](const YAML::Node& v) { p.penalty_coefficient = to_double(v, "penalty_coefficient"); }},
      {"penalty_exponent",
       [&p](const YAML::Node& v) {
         p.penalty_exponent = static_cast<int>(to_uint(v, "penalty_exponent"));
       }},
      {"nonneg", [&p](const YAML::Node& v) { p.nonneg = to_bool(v, "nonneg"); }},
  };
}

std::map<std::string, Setter> grid_keys(GridSpec& g) {
  return {
      {"t0", [&g](const YAML::Node& v) { g.t0 = to_double(v, "t0"); }},
      {"t1", [&g](const YAML::Node& v) { g.t1 = to_double(v, "t1"); }},
      {"bins", [&g](const YAML::Node& v) { g.bins = to_uint(v, "bins"); }},
  };
}

std::map<std::string, Setter> solver_keys(SolverSpec& s) {
  auto num = [](double& field, const char* key) {
    return [&field, key](const YAML::Node& v) { field = to_double(v, key); };
  };
  return {
      {"name", [&s](const YAML::Node& v) { s.name = scalar(v, "name"); }},
      {"method", [&s](const YAML::Node& v) { s.method = scalar(v, "method"); }},
      {"step", [&s](const YAML::Node& v) { s.step = scalar(v, "step"); }},
      {"gamma", [&s](const YAML::Node& v) { s.gamma = to_double(v, "gamma"); }},
      {"gamma0", num(s.gamma0, "gamma0")},
      {"rho", num(s.rho, "rho")},
      {"alpha_scale", num(s.schedule.alpha_scale, "alpha_scale")},
      {"alpha_offset", num(s.schedule.alpha_offset, "alpha_offset")},
      {"alpha_power", num(s.schedule.alpha_power, "alpha_power")},
      {"beta_bar", num(s.schedule.beta_bar, "beta_bar")},
      {"tol", num(s.tol, "tol")},
      {"kmax", [&s](const YAML::Node& v) { s.kmax = to_uint(v, "kmax"); }},
      {"seed", [&s](const YAML::Node& v) { s.seed = to_uint(v, "seed"); }},
      {"start", [&s](const YAML::Node& v) { s.start = scalar(v, "start"); }},
  };
}

std::map<std::string, Setter> output_keys(OutputSpec& o) {
  return {
      {"dir", [&o](const YAML::Node& v) { o.dir = scalar(v, "dir"); }},
      {"timing", [&o](const YAML::Node& v) { o.timing = to_bool(v, "timing"); }},
      {"gap_edges", [&o](const YAML::Node& v) { o.gap_edges = to_list(v, "gap_edges"); }},
      {"support_threshold",
       [&o](const YAML::Node& v) { o.support_threshold = to_double(v, "support_threshold"); }},
  };
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  return std::any_of(options.begin(), options.end(), [&](const char* o) { return v == o; });
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

void validate(const ExperimentConfig& c) {
  const ProblemSpec& p = c.problem;
  if (p.kind == "builtin") {
    const auto& names = builtin_problem_names();
    if (std::find(names.begin(), names.end(), p.name) == names.end()) {
      throw ConfigError("problem.name: unknown builtin problem '" + p.name + "'");
    }
    if (p.dim == 0) throw ConfigError("problem.dim must be >= 1");
    if (p.lower && p.upper && !(*p.lower <= *p.upper)) {
      throw ConfigError("problem.lower must not exceed problem.upper");
    }
    if (!(p.radius > 0.0)) throw ConfigError("problem.radius must be positive");
  } else if (p.kind == "network") {
    if (p.fixture.empty() == !p.files.has_value()) {
      throw ConfigError("problem: network problems need exactly one of fixture or files");
    }
    if (p.files && (p.files->nodes.empty() || p.files->links.empty() || p.files->od.empty() ||
                    p.files->paths.empty())) {
      throw ConfigError("problem: nodes, links, od and paths files are all required");
    }
  } else {
    throw ConfigError("problem.kind must be builtin or network, got '" + p.kind + "'");
  }
  if (!one_of(p.delay, {"affine", "point_queue"})) {
    throw ConfigError("problem.delay must be affine or point_queue");
  }
  if (!(p.bandwidth > 0.0)) throw ConfigError("problem.bandwidth must be positive");
  if (!one_of(p.time_profile, {"exponential", "gaussian"})) {
    throw ConfigError("problem.time_profile must be exponential or gaussian");
  }
  if (p.substeps == 0) throw ConfigError("problem.substeps must be >= 1");
  if (!(p.penalty_coefficient >= 0.0)) {
    throw ConfigError("problem.penalty_coefficient must be >= 0");
  }
  if (p.penalty_exponent != 1 && p.penalty_exponent != 2) {
    throw ConfigError("problem.penalty_exponent must be 1 or 2");
  }
  if (!(c.grid.t0 < c.grid.t1)) throw ConfigError("grid: t0 must be < t1");
  if (c.grid.bins == 0) throw ConfigError("grid.bins must be >= 1");

  if (c.solvers.empty()) throw ConfigError("at least one entry under solvers is required");
  std::set<std::string> names;
  for (const SolverSpec& s : c.solvers) {
    const std::string at = "solver " + s.name + ": ";
    if (s.name.empty() || s.name.find_first_of("/\\ \t") != std::string::npos) {
      throw ConfigError(at + "name must be non-empty without spaces or slashes");
    }
    if (!names.insert(s.name).second) throw ConfigError(at + "duplicate solver name");
    if (!one_of(s.method, {"fbf", "tseng", "extragradient", "projected_gradient"})) {
      throw ConfigError(at + "method must be fbf, tseng, extragradient or projected_gradient");
    }
    if (!one_of(s.step, {"constant", "adaptive"})) {
      throw ConfigError(at + "step must be constant or adaptive");
    }
    if (s.gamma && !(*s.gamma > 0.0)) throw ConfigError(at + "gamma must be positive");
    if (!(s.gamma0 > 0.0)) throw ConfigError(at + "gamma0 must be positive");
    if (!(s.rho > 0.0 && s.rho < 1.0)) {
      throw ConfigError(at + "rho = " + fmt(s.rho) + " must lie in (0, 1)");
    }
    if (!(s.tol > 0.0)) throw ConfigError(at + "tol must be > 0");
    if (s.kmax == 0) throw ConfigError(at + "kmax must be >= 1");
    if (!s.start.empty() && !one_of(s.start, {"zero", "uniform", "random", "feasible"})) {
      throw ConfigError(at + "start must be zero, uniform, random or feasible");
    }
    try {
      Schedule(s.schedule);
    } catch (const std::exception& e) {
      throw ConfigError(at + e.what());
    }
  }

  const auto& e = c.output.gap_edges;
  if (e.size() < 2 || !std::is_sorted(e.begin(), e.end()) ||
      std::adjacent_find(e.begin(), e.end()) != e.end()) {
    throw ConfigError("output.gap_edges must be at least two strictly increasing values");
  }
  if (!(c.output.support_threshold >= 0.0)) {
    throw ConfigError("output.support_threshold must be >= 0");
  }
  if (c.output.dir.empty()) throw ConfigError("output.dir must not be empty");
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping with problem and solvers");
  ExperimentConfig config;
  const std::map<std::string, Setter> sections = {
      {"problem", [&](const YAML::Node& v) { apply(v, problem_keys(config.problem), "problem"); }},
      {"grid", [&](const YAML::Node& v) { apply(v, grid_keys(config.grid), "grid"); }},
      {"output", [&](const YAML::Node& v) { apply(v, output_keys(config.output), "output"); }},
      {"solvers",
       [&](const YAML::Node& v) {
         if (!v.IsSequence()) fail_at(v, "solvers must be a list");
         for (const YAML::Node& item : v) {
           config.solvers.emplace_back();
           apply(item, solver_keys(config.solvers.back()), "solver");
         }
       }},
  };
  apply(root, sections, "config");
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize(const ExperimentConfig& c) {
  YAML::Emitter out;
  const ProblemSpec& p = c.problem;
  out << YAML::BeginMap;
  out << YAML::Key << "problem" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << p.kind;
  if (!p.name.empty()) out << YAML::Key << "name" << YAML::Value << p.name;
  out << YAML::Key << "dim" << YAML::Value << p.dim;
  out << YAML::Key << "seed" << YAML::Value << p.seed;
  out << YAML::Key << "random" << YAML::Value << p.random;
  if (p.lower) out << YAML::Key << "lower" << YAML::Value << fmt(*p.lower);
  if (p.upper) out << YAML::Key << "upper" << YAML::Value << fmt(*p.upper);
  out << YAML::Key << "radius" << YAML::Value << fmt(p.radius);
  if (!p.fixture.empty()) out << YAML::Key << "fixture" << YAML::Value << p.fixture;
  if (p.files) {
    out << YAML::Key << "nodes" << YAML::Value << p.files->nodes;
    out << YAML::Key << "links" << YAML::Value << p.files->links;
    out << YAML::Key << "od" << YAML::Value << p.files->od;
    out << YAML::Key << "paths" << YAML::Value << p.files->paths;
  }
  out << YAML::Key << "delay" << YAML::Value << p.delay;
  out << YAML::Key << "bandwidth" << YAML::Value << fmt(p.bandwidth);
  out << YAML::Key << "time_profile" << YAML::Value << p.time_profile;
  out << YAML::Key << "substeps" << YAML::Value << p.substeps;
  out << YAML::Key << "penalty_coefficient" << YAML::Value << fmt(p.penalty_coefficient);
  out << YAML::Key << "penalty_exponent" << YAML::Value << p.penalty_exponent;
  out << YAML::Key << "nonneg" << YAML::Value << p.nonneg;
  out << YAML::EndMap;

  out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "t0" << YAML::Value << fmt(c.grid.t0);
  out << YAML::Key << "t1" << YAML::Value << fmt(c.grid.t1);
  out << YAML::Key << "bins" << YAML::Value << c.grid.bins;
  out << YAML::EndMap;

  out << YAML::Key << "solvers" << YAML::Value << YAML::BeginSeq;
  for (const SolverSpec& s : c.solvers) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << s.name;
    out << YAML::Key << "method" << YAML::Value << s.method;
    out << YAML::Key << "step" << YAML::Value << s.step;
    if (s.gamma) out << YAML::Key << "gamma" << YAML::Value << fmt(*s.gamma);
    out << YAML::Key << "gamma0" << YAML::Value << fmt(s.gamma0);
    out << YAML::Key << "rho" << YAML::Value << fmt(s.rho);
    out << YAML::Key << "alpha_scale" << YAML::Value << fmt(s.schedule.alpha_scale);
    out << YAML::Key << "alpha_offset" << YAML::Value << fmt(s.schedule.alpha_offset);
    out << YAML::Key << "alpha_power" << YAML::Value << fmt(s.schedule.alpha_power);
    out << YAML::Key << "beta_bar" << YAML::Value << fmt(s.schedule.beta_bar);
    out << YAML::Key << "tol" << YAML::Value << fmt(s.tol);
    out << YAML::Key << "kmax" << YAML::Value << s.kmax;
    out << YAML::Key << "seed" << YAML::Value << s.seed;
    if (!s.start.empty()) out << YAML::Key << "start" << YAML::Value << s.start;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dir" << YAML::Value << c.output.dir;
  out << YAML::Key << "timing" << YAML::Value << c.output.timing;
  out << YAML::Key << "gap_edges" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double e : c.output.gap_edges) out << fmt(e);
  out << YAML::EndSeq;
  out << YAML::Key << "support_threshold" << YAML::Value << fmt(c.output.support_threshold);
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace fbfvi::harness
