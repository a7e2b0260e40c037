// Copyright 2026 The tamgraph Authors.
//
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

#include <charconv>
#include <fstream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "tam/graph.hpp"

namespace tam {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(path.string() + ": cannot open file for writing");
  return out;
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw ParseError(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool is_blank_or_comment(std::string_view s) {
  s = trim(s);
  return s.empty() || s.front() == '#';
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  token = trim(token);
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

// Splits a line into exactly two whitespace-separated integer fields.
bool parse_pair(std::string_view line, std::int64_t& a, std::int64_t& b) {
  line = trim(line);
  const auto sep = line.find_first_of(" \t");
  if (sep == std::string_view::npos) return false;
  return parse_number(line.substr(0, sep), a) && parse_number(line.substr(sep + 1), b);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Graph load_graph(const std::filesystem::path& edge_path, const std::filesystem::path& feature_path,
                 const std::filesystem::path& label_path, std::size_t* dropped_self_loops) {
  // features
  std::vector<double> values;
  std::size_t feature_dim = 0;
  std::size_t feature_rows = 0;
  {
    auto in = open_input(feature_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (is_blank_or_comment(line)) continue;
      std::size_t cols = 0;
      std::string_view rest = line;
      while (true) {
        const auto comma = rest.find(',');
        double x = 0.0;
        if (!parse_number(rest.substr(0, comma), x)) {
          fail(feature_path, lineno, "malformed feature value");
        }
        values.push_back(x);
        ++cols;
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      if (feature_rows == 0) {
        feature_dim = cols;
      } else if (cols != feature_dim) {
        fail(feature_path, lineno,
             "expected " + std::to_string(feature_dim) + " columns, found " + std::to_string(cols));
      }
      ++feature_rows;
    }
  }

  // labels
  std::vector<std::pair<std::int64_t, std::int64_t>> label_rows;
  {
    auto in = open_input(label_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (is_blank_or_comment(line)) continue;
      std::int64_t node = 0;
      std::int64_t cls = 0;
      if (!parse_pair(line, node, cls) || node < 0 || cls < kUnlabeled) {
        fail(label_path, lineno, "expected `node_id<TAB>class_id`");
      }
      label_rows.emplace_back(node, cls);
    }
  }
  if (label_rows.size() != feature_rows) {
    throw ShapeError("feature file has " + std::to_string(feature_rows) + " rows but label file has " +
                     std::to_string(label_rows.size()) + " entries");
  }
  const std::size_t n = feature_rows;
  std::vector<ClassId> labels(n, kUnlabeled);
  std::vector<std::uint8_t> seen(n, 0);
  ClassId max_label = kUnlabeled;
  for (auto [node, cls] : label_rows) {
    if (static_cast<std::size_t>(node) >= n || seen[node]) {
      throw ParseError(label_path.string() + ": node ids must be dense 0.." + std::to_string(n - 1) +
                       " without repeats (offending id " + std::to_string(node) + ")");
    }
    seen[node] = 1;
    labels[node] = static_cast<ClassId>(cls);
    max_label = std::max(max_label, labels[node]);
  }

  // edges
  std::vector<std::pair<NodeId, NodeId>> edges;
  {
    auto in = open_input(edge_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (is_blank_or_comment(line)) continue;
      std::int64_t u = 0;
      std::int64_t v = 0;
      if (!parse_pair(line, u, v) || u < 0 || v < 0) fail(edge_path, lineno, "expected `u<TAB>v`");
      if (static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n) {
        fail(edge_path, lineno, "node id outside 0.." + std::to_string(n - 1));
      }
      edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
  }

  return Graph::from_edges(n, edges, Tensor(n, feature_dim, std::move(values)), std::move(labels),
                           max_label + 1, dropped_self_loops);
}

void save_graph(const Graph& graph, const std::filesystem::path& edge_path,
                const std::filesystem::path& feature_path,
                const std::filesystem::path& label_path) {
  {
    auto out = open_output(edge_path);
    for (std::size_t u = 0; u < graph.num_nodes(); ++u) {
      for (NodeId v : graph.neighbors(static_cast<NodeId>(u))) {
        if (static_cast<std::size_t>(v) > u) out << u << '\t' << v << '\n';
      }
    }
  }
  {
    auto out = open_output(feature_path);
    const Tensor& x = graph.features();
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < x.cols(); ++c) {
        if (c > 0) out << ',';
        out << format_double(x(r, c));
      }
      out << '\n';
    }
  }
  {
    auto out = open_output(label_path);
    for (std::size_t v = 0; v < graph.num_nodes(); ++v) {
      out << v << '\t' << graph.label(static_cast<NodeId>(v)) << '\n';
    }
  }
}

SplitMasks load_split(const std::filesystem::path& path) {
  auto in = open_input(path);
  nlohmann::json j;
  try {
    in >> j;
    SplitMasks split;
    split.train = j.at("train").get<std::vector<NodeId>>();
    split.val = j.at("val").get<std::vector<NodeId>>();
    split.test = j.at("test").get<std::vector<NodeId>>();
    return split;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_split(const SplitMasks& split, const std::filesystem::path& path) {
  nlohmann::json j;
  j["train"] = split.train;
  j["val"] = split.val;
  j["test"] = split.test;
  auto out = open_output(path);
  out << j.dump() << '\n';
}

}  // namespace tam
