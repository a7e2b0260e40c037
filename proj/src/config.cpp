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
#include <functional>
#include <sstream>

#include "tam/experiment.hpp"

namespace tam {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw ConfigError("invalid value '" + value + "' for " + key);
}

template <typename T>
T parse_scalar(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, value);
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& value) {
  std::vector<T> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_scalar<T>(key, item));
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(xs[i]);
    } else {
      out += std::to_string(xs[i]);
    }
  }
  return out;
}

SbmSpec& sbm(ExperimentConfig& c) {
  if (!c.data.sbm) {
    c.data.sbm = SbmSpec{};
    c.data.sbm->class_sizes = {300, 300, 300, 300, 300};
    c.data.sbm->edge_prob = SbmSpec::block_probs(5, 0.05, 0.005);
  }
  return *c.data.sbm;
}

// Rebuilds a two-level probability matrix after class sizes or levels change.
struct BlockLevels {
  double within = 0.05;
  double between = 0.005;
};

using Setter = std::function<void(ExperimentConfig&, const std::string&, BlockLevels&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["edges"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) { c.data.edges = trim(v); };
    t["features"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) { c.data.features = trim(v); };
    t["labels"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) { c.data.labels = trim(v); };
    t["split"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) { c.data.split = trim(v); };
    t["sbm_class_sizes"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      sbm(c).class_sizes = parse_list<std::int64_t>("sbm_class_sizes", v);
    };
    t["sbm_edge_prob"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      auto values = parse_list<double>("sbm_edge_prob", v);
      std::size_t k = 0;
      while (k * k < values.size()) ++k;
      if (k * k != values.size()) bad_value("sbm_edge_prob", v);
      sbm(c).edge_prob = Tensor(k, k, std::move(values));
    };
    t["sbm_p_within"] = [](ExperimentConfig& c, const std::string& v, BlockLevels& b) {
      sbm(c);
      b.within = parse_scalar<double>("sbm_p_within", v);
    };
    t["sbm_p_between"] = [](ExperimentConfig& c, const std::string& v, BlockLevels& b) {
      sbm(c);
      b.between = parse_scalar<double>("sbm_p_between", v);
    };
    t["sbm_feature_dim"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      sbm(c).feature_dim = parse_scalar<std::size_t>("sbm_feature_dim", v);
    };
    t["sbm_separation"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      sbm(c).class_mean_separation = parse_scalar<double>("sbm_separation", v);
    };
    t["sbm_noise"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      sbm(c).feature_noise = parse_scalar<double>("sbm_noise", v);
    };
    t["sbm_seed"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      sbm(c).seed = parse_scalar<std::uint64_t>("sbm_seed", v);
    };
    t["arch"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) { c.model.arch = parse_arch(trim(v)); };
    t["layers"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      c.model.num_layers = parse_scalar<int>("layers", v);
    };
    t["hidden"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      c.model.hidden_dim = parse_scalar<std::size_t>("hidden", v);
    };
    t["dropout"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      c.model.dropout = parse_scalar<double>("dropout", v);
    };
    t["alpha"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) { c.tam.alpha = parse_scalar<double>("alpha", v); };
    t["beta"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) { c.tam.beta = parse_scalar<double>("beta", v); };
    t["phi"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) { c.tam.phi = parse_scalar<double>("phi", v); };
    t["delta"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) { c.tam.delta = parse_scalar<double>("delta", v); };
    t["warmup"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      c.tam.warmup_epochs = parse_scalar<int>("warmup", v);
    };
    t["loss"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) { c.tam.base_loss = parse_base_loss(trim(v)); };
    t["rho"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) { c.rho = parse_scalar<double>("rho", v); };
    t["minor_classes"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      c.minor_classes = parse_list<ClassId>("minor_classes", v);
    };
    t["split_seed"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      c.split_seed = parse_scalar<std::uint64_t>("split_seed", v);
    };
    t["epochs"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) { c.epochs = parse_scalar<int>("epochs", v); };
    t["lr"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) { c.lr = parse_scalar<double>("lr", v); };
    t["lr_patience"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      c.lr_patience = parse_scalar<int>("lr_patience", v);
    };
    t["weight_decay"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      c.weight_decay = parse_scalar<double>("weight_decay", v);
    };
    t["adam_beta1"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      c.adam_beta1 = parse_scalar<double>("adam_beta1", v);
    };
    t["adam_beta2"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      c.adam_beta2 = parse_scalar<double>("adam_beta2", v);
    };
    t["adam_eps"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      c.adam_eps = parse_scalar<double>("adam_eps", v);
    };
    t["repeats"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) { c.repeats = parse_scalar<int>("repeats", v); };
    t["seed_base"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      c.seed_base = parse_scalar<std::uint64_t>("seed_base", v);
    };
    t["fp_source"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      c.fp.source = parse_nld_source(trim(v));
    };
    t["fp_counting"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) {
      c.fp.counting = parse_neighbor_counting(trim(v));
    };
    t["threads"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) { c.threads = parse_scalar<int>("threads", v); };
    t["out"] = [](ExperimentConfig& c, const std::string& v, BlockLevels&) { c.output_dir = trim(v); };
    return t;
  }();
  return table;
}

}  // namespace

const std::vector<std::string>& flat_config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

FlatConfig read_flat_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  FlatConfig flat;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected `key = value`");
    }
    flat[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return flat;
}

ExperimentConfig apply_flat_config(ExperimentConfig base, const FlatConfig& flat) {
  const auto& table = setters();
  BlockLevels levels;
  bool levels_set = false;
  for (const auto& [key, value] : flat) {
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(base, value, levels);
    levels_set = levels_set || key == "sbm_p_within" || key == "sbm_p_between";
  }
  if (base.data.sbm) {
    auto& spec = *base.data.sbm;
    const std::size_t k = spec.class_sizes.size();
    if (levels_set) {
      if (flat.count("sbm_edge_prob")) {
        throw ConfigError("give either sbm_edge_prob or sbm_p_within/sbm_p_between, not both");
      }
      spec.edge_prob = SbmSpec::block_probs(k, levels.within, levels.between);
    } else if (spec.edge_prob.rows() != k && !flat.count("sbm_edge_prob")) {
      // class count changed: keep the default two-level structure
      spec.edge_prob = SbmSpec::block_probs(k, levels.within, levels.between);
    }
  }
  return base;
}

FlatConfig to_flat(const ExperimentConfig& c) {
  FlatConfig f;
  if (c.data.sbm) {
    const auto& s = *c.data.sbm;
    f["sbm_class_sizes"] = join(s.class_sizes);
    f["sbm_edge_prob"] = join(std::vector<double>(s.edge_prob.data().begin(), s.edge_prob.data().end()));
    f["sbm_feature_dim"] = std::to_string(s.feature_dim);
    f["sbm_separation"] = format_double(s.class_mean_separation);
    f["sbm_noise"] = format_double(s.feature_noise);
    f["sbm_seed"] = std::to_string(s.seed);
  } else {
    f["edges"] = c.data.edges;
    f["features"] = c.data.features;
    f["labels"] = c.data.labels;
    if (!c.data.split.empty()) f["split"] = c.data.split;
  }
  f["arch"] = to_string(c.model.arch);
  f["layers"] = std::to_string(c.model.num_layers);
  f["hidden"] = std::to_string(c.model.hidden_dim);
  f["dropout"] = format_double(c.model.dropout);
  f["alpha"] = format_double(c.tam.alpha);
  f["beta"] = format_double(c.tam.beta);
  f["phi"] = format_double(c.tam.phi);
  f["delta"] = format_double(c.tam.delta);
  f["warmup"] = std::to_string(c.tam.warmup_epochs);
  f["loss"] = to_string(c.tam.base_loss);
  f["rho"] = format_double(c.rho);
  if (!c.minor_classes.empty()) f["minor_classes"] = join(c.minor_classes);
  f["split_seed"] = std::to_string(c.split_seed);
  f["epochs"] = std::to_string(c.epochs);
  f["lr"] = format_double(c.lr);
  f["lr_patience"] = std::to_string(c.lr_patience);
  f["weight_decay"] = format_double(c.weight_decay);
  f["adam_beta1"] = format_double(c.adam_beta1);
  f["adam_beta2"] = format_double(c.adam_beta2);
  f["adam_eps"] = format_double(c.adam_eps);
  f["repeats"] = std::to_string(c.repeats);
  f["seed_base"] = std::to_string(c.seed_base);
  f["fp_source"] = to_string(c.fp.source);
  f["fp_counting"] = to_string(c.fp.counting);
  return f;
}

void ExperimentConfig::validate() const {
  if (data.sbm) {
    data.sbm->validate();
  } else {
    if (data.edges.empty() || data.features.empty() || data.labels.empty()) {
      throw ConfigError("data source missing: give edges/features/labels files or sbm_* settings");
    }
    for (const auto& p : {data.edges, data.features, data.labels, data.split}) {
      if (!p.empty() && !std::filesystem::exists(p)) throw ConfigError("file not found: " + p);
    }
  }
  if (model.num_layers < 1 || model.num_layers > 3) throw ConfigError("layers must be 1, 2 or 3");
  if (model.hidden_dim == 0) throw ConfigError("hidden must be positive");
  if (!(model.dropout >= 0.0 && model.dropout < 1.0)) throw ConfigError("dropout must lie in [0,1)");
  tam.validate();
  if (!(rho >= 1.0)) throw ConfigError("rho must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("lr must be > 0");
  if (lr_patience < 1) throw ConfigError("lr_patience must be >= 1");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

}  // namespace tam
