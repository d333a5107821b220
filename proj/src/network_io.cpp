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

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fbfvi/due.hpp"
#include "fbfvi/error.hpp"

namespace fbfvi::due {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(trim(field));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

struct Record {
  std::size_t line;
  std::vector<std::string> fields;
};

// Data records after the header; blank lines and '#' comments skipped.
std::vector<Record> read_records(const std::filesystem::path& path, std::size_t arity) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<Record> records;
  std::string line;
  std::size_t number = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != arity) {
      throw ConstructionError(path.string() + ":" + std::to_string(number) + ": expected " +
                              std::to_string(arity) + " fields, got " +
                              std::to_string(fields.size()));
    }
    if (header) {
      header = false;
      continue;
    }
    records.push_back({number, std::move(fields)});
  }
  if (header) throw ConstructionError(path.string() + ": missing header line");
  return records;
}

double number(const std::filesystem::path& path, const Record& r, std::size_t i) {
  try {
    std::size_t used = 0;
    const double v = std::stod(r.fields[i], &used);
    if (used != r.fields[i].size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConstructionError(path.string() + ":" + std::to_string(r.line) + ": '" + r.fields[i] +
                            "' is not a number");
  }
}

}  // namespace

Fixture read_network(const std::filesystem::path& nodes, const std::filesystem::path& links,
                     const std::filesystem::path& od, const std::filesystem::path& paths) {
  Fixture f;
  for (const Record& r : read_records(nodes, 1)) f.network.nodes.push_back(r.fields[0]);
  for (const Record& r : read_records(links, 5)) {
    f.network.links.push_back(Link{r.fields[0], r.fields[1], r.fields[2], number(links, r, 3),
                                   number(links, r, 4)});
  }
  for (const Record& r : read_records(od, 4)) {
    f.network.od_pairs.push_back(
        OdPair{r.fields[0], r.fields[1], number(od, r, 2), number(od, r, 3)});
  }
  f.network.validate();
  for (const Record& r : read_records(paths, 3)) {
    const double owner = number(paths, r, 1);
    if (owner < 0 || owner != static_cast<double>(static_cast<std::size_t>(owner))) {
      throw ConstructionError(paths.string() + ":" + std::to_string(r.line) +
                              ": od_index must be a nonnegative integer");
    }
    std::vector<std::size_t> idx;
    for (const std::string& id : split(r.fields[2], ':')) idx.push_back(f.network.link_index(id));
    f.paths.ids.push_back(r.fields[0]);
    f.paths.links.push_back(std::move(idx));
    f.paths.owner.push_back(static_cast<std::size_t>(owner));
  }
  f.paths.validate(f.network);
  return f;
}

void write_network(const Fixture& f, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  auto open = [&](const char* name) {
    std::ofstream out(directory / name);
    if (!out) throw IoError("cannot write " + (directory / name).string());
    out.precision(17);
    return out;
  };
  {
    auto out = open("nodes.csv");
    out << "id\n";
    for (const auto& n : f.network.nodes) out << n << '\n';
  }
  {
    auto out = open("links.csv");
    out << "id,from,to,free_flow_time,capacity\n";
    for (const Link& l : f.network.links) {
      out << l.id << ',' << l.from << ',' << l.to << ',' << l.free_flow_time << ','
          << l.capacity << '\n';
    }
  }
  {
    auto out = open("od.csv");
    out << "origin,destination,demand,target_arrival\n";
    for (const OdPair& od : f.network.od_pairs) {
      out << od.origin << ',' << od.destination << ',' << od.demand << ',' << od.target_arrival
          << '\n';
    }
  }
  {
    auto out = open("paths.csv");
    out << "path_id,od_index,links\n";
    for (std::size_t p = 0; p < f.paths.size(); ++p) {
      out << (f.paths.ids.empty() ? std::to_string(p + 1) : f.paths.ids[p]) << ','
          << f.paths.owner[p] << ',';
      for (std::size_t j = 0; j < f.paths.links[p].size(); ++j) {
        out << (j ? ":" : "") << f.network.links[f.paths.links[p][j]].id;
      }
      out << '\n';
    }
  }
}

}  // namespace fbfvi::due
