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

// Command-line front end: run / validate experiment configs, list fixtures,
// summarize o/d gaps of a finished run.

#include <algorithm>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fbfvi/due.hpp"
#include "fbfvi/error.hpp"
#include "fbfvi/harness.hpp"

namespace fs = std::filesystem;
using namespace fbfvi;

namespace {

int gaps_command(const fs::path& dir, const std::vector<double>& edges) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 9 && name.ends_with("_gaps.csv")) files.push_back(entry.path());
  }
  if (files.empty()) {
    std::cerr << "no *_gaps.csv files in " << dir << '\n';
    return harness::kIoFailure;
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) {
    std::vector<double> defined;
    std::size_t undefined = 0;
    for (const auto& g : harness::read_gaps(f)) {
      if (g) {
        defined.push_back(*g);
      } else {
        ++undefined;
      }
    }
    const auto counts = harness::gap_histogram(defined, edges);
    const std::string name = f.filename().string();
    std::cout << name.substr(0, name.size() - 9) << ":";
    for (std::size_t i = 0; i < counts.size(); ++i) {
      std::cout << " [" << edges[i] << "," << edges[i + 1] << ")=" << counts[i];
    }
    if (undefined) std::cout << " undefined=" << undefined;
    std::cout << '\n';
  }
  return harness::kSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forward-backward-forward VI solvers and dynamic user equilibrium experiments"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the solvers of an experiment config");
  run->add_option("config", config_path, "Config file")->required();

  auto* validate = app.add_subcommand("validate", "Parse and check an experiment config");
  validate->add_option("config", config_path, "Config file")->required();

  auto* fixtures = app.add_subcommand("fixtures", "Built-in network fixtures");
  auto* fixtures_list = fixtures->add_subcommand("list", "List fixture names");
  fixtures->require_subcommand(1);

  std::string trace_dir;
  std::vector<double> edges = harness::OutputSpec{}.gap_edges;
  auto* gaps = app.add_subcommand("gaps", "Histogram of o/d gaps in a run directory");
  gaps->add_option("trace-dir", trace_dir, "Output directory of a run")->required();
  gaps->add_option("--edges", edges, "Histogram bin edges")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? harness::kSuccess : harness::kConfigError;
  }

  try {
    if (*run) {
      const auto config = harness::load_config(config_path);
      const auto report = harness::run(config, std::cout);
      std::cout << "output: " << report.output_dir.string() << '\n';
      return report.exit_code();
    }
    if (*validate) {
      harness::load_config(config_path);
      std::cout << config_path << ": ok\n";
      return harness::kSuccess;
    }
    if (*fixtures_list) {
      for (const auto& name : due::fixture_names()) {
        const auto f = due::fixture(name);
        std::cout << name << ": " << f.network.nodes.size() << " nodes, "
                  << f.network.links.size() << " links, " << f.network.od_pairs.size()
                  << " o/d pairs, " << f.paths.size() << " paths\n";
      }
      return harness::kSuccess;
    }
    if (*gaps) return gaps_command(trace_dir, edges);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return harness::kConfigError;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return harness::kIoFailure;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return harness::kIoFailure;
  } catch (const ConstructionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return harness::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return harness::kRuntimeFailure;
  }
  return harness::kSuccess;
}
