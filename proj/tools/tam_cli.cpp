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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "tam/experiment.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::string dashed(std::string key) {
  for (auto& ch : key) {
    if (ch == '_') ch = '-';
  }
  return key;
}

struct CommonArgs {
  std::string config_file;
  tam::FlatConfig overrides;
};

void add_config_options(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_file, "flat `key = value` file; flags override it")
      ->check(CLI::ExistingFile);
  for (const auto& key : tam::flat_config_keys()) {
    sub->add_option_function<std::string>(
        "--" + dashed(key), [&args, key](const std::string& v) { args.overrides[key] = v; },
        "config key " + key);
  }
}

tam::ExperimentConfig resolve_config(const CommonArgs& args) {
  tam::FlatConfig flat;
  if (!args.config_file.empty()) flat = tam::read_flat_config(args.config_file);
  for (const auto& [k, v] : args.overrides) flat[k] = v;
  auto config = tam::apply_flat_config(tam::ExperimentConfig{}, flat);
  if (config.output_dir.empty()) config.output_dir = ".";
  config.validate();
  return config;
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw tam::ConfigError("invalid grid value '" + item + "'");
    }
  }
  return out;
}

void write_json(const nlohmann::json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw tam::Error(path.string() + ": cannot open file for writing");
  out << j.dump(2) << '\n';
}

void print_summary(const std::vector<tam::MetricSummary>& metrics) {
  for (const auto& m : metrics) {
    std::cout << "  " << m.name << ": " << tam::format_double(m.mean) << " +- "
              << tam::format_double(m.std_error) << " (n=" << m.n << ")\n";
  }
}

int report_aborts(const tam::AggregateReport& agg) {
  for (const auto& r : agg.runs) {
    if (r.aborted) std::cerr << "run " << r.seed << " aborted: " << r.abort_reason << '\n';
  }
  return agg.aborted > 0 ? kExitRuntime : 0;
}

int run_train(const CommonArgs& args, bool dump_topology, bool timing) {
  const auto config = resolve_config(args);
  const auto data = tam::prepare_dataset(config);
  const auto agg = tam::run_repeats(config, data);
  const fs::path out = config.output_dir;
  fs::create_directories(out);
  for (const auto& r : agg.runs) {
    write_json(tam::to_json(r, timing), out / ("run_" + std::to_string(r.seed) + ".json"));
  }
  tam::write_summary_csv(agg.metrics, out / "summary.csv");
  if (dump_topology && !agg.runs.empty() && agg.runs.front().best_epoch > 0) {
    tam::write_topology_csv(agg.runs.front(), out / "nld.csv", out / "conn.csv");
  }
  std::cout << "completed " << agg.runs.size() - agg.aborted << "/" << agg.runs.size()
            << " runs, reports in " << out.string() << '\n';
  print_summary(agg.metrics);
  return report_aborts(agg);
}

int run_grid(const CommonArgs& args, const std::string& alphas, const std::string& betas,
             const std::string& phis) {
  const auto config = resolve_config(args);
  tam::GridSpec grid;
  if (!alphas.empty()) grid.alphas = parse_grid(alphas);
  if (!betas.empty()) grid.betas = parse_grid(betas);
  if (!phis.empty()) grid.phis = parse_grid(phis);
  const auto data = tam::prepare_dataset(config);
  const auto result = tam::grid_search(config, data, grid);
  const fs::path out = config.output_dir;
  fs::create_directories(out);
  tam::write_grid_csv(result, out / "grid.csv");
  const auto& best = result.cells[result.best];
  std::cout << "best alpha=" << tam::format_double(best.alpha)
            << " beta=" << tam::format_double(best.beta) << " phi=" << tam::format_double(best.phi)
            << " val_score=" << tam::format_double(best.val_score)
            << " test_bacc=" << tam::format_double(best.test_bacc.mean)
            << " test_f1=" << tam::format_double(best.test_f1.mean) << '\n';
  return 0;
}

int run_analyze_fp(const CommonArgs& args) {
  const auto config = resolve_config(args);
  const auto data = tam::prepare_dataset(config);
  const auto agg = tam::run_repeats(config, data);
  const fs::path out = config.output_dir;
  fs::create_directories(out);
  std::ofstream csv(out / "fp.csv");
  csv << "seed,abnormal_minor_fp,abnormal_num,abnormal_den,minor_fp,minor_num,minor_den,fnr,fnr_num,"
         "fnr_den,anomalous_minor\n";
  auto cell = [](const tam::Ratio& r) {
    auto v = r.value();
    return (v ? tam::format_double(*v) : std::string("nan")) + "," + std::to_string(r.numerator) +
           "," + std::to_string(r.denominator);
  };
  for (const auto& r : agg.runs) {
    if (r.aborted) continue;
    csv << r.seed << ',' << cell(r.fp.abnormal_minor_fp) << ',' << cell(r.fp.minor_fp) << ','
        << cell(r.fp.fnr) << ',' << r.fp.anomalous_minor << '\n';
  }
  std::cout << "fp analysis (" << tam::to_string(config.fp.source) << " NLD, "
            << tam::to_string(config.fp.counting) << " counting) over " << agg.runs.size()
            << " runs\n";
  for (const auto& m : agg.metrics) {
    if (m.name == "abnormal_minor_fp" || m.name == "minor_fp" || m.name == "fnr") {
      std::cout << "  " << m.name << ": " << tam::format_double(m.mean) << " +- "
                << tam::format_double(m.std_error) << " (n=" << m.n << ")\n";
    }
  }
  return report_aborts(agg);
}

int run_gen_sbm(const CommonArgs& args) {
  auto flat = args.overrides;
  if (!args.config_file.empty()) {
    auto file = tam::read_flat_config(args.config_file);
    for (const auto& [k, v] : flat) file[k] = v;
    flat = std::move(file);
  }
  auto config = tam::apply_flat_config(tam::ExperimentConfig{}, flat);
  if (!config.data.sbm) config = tam::apply_flat_config(config, {{"sbm_seed", "0"}});
  const auto [graph, split] = tam::generate_sbm(*config.data.sbm);
  const fs::path out = config.output_dir.empty() ? fs::path(".") : fs::path(config.output_dir);
  fs::create_directories(out);
  tam::save_graph(graph, out / "edges.tsv", out / "features.csv", out / "labels.tsv");
  tam::save_split(split, out / "split.json");
  std::cout << "wrote " << graph.num_nodes() << " nodes, " << graph.num_edges() << " edges to "
            << out.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  tam::retain_heap_memory();
  CLI::App app{"Topology-aware margin training for class-imbalanced node classification"};
  app.require_subcommand(1);

  CommonArgs train_args;
  bool dump_topology = false;
  bool timing = false;
  auto* train = app.add_subcommand("train", "train with seeded repeats, write run JSONs and summary.csv");
  add_config_options(train, train_args);
  train->add_flag("--dump-topology", dump_topology, "write nld.csv / conn.csv of the first run");
  train->add_flag("--timing", timing, "include wall time in run JSONs");

  CommonArgs grid_args;
  std::string alpha_grid;
  std::string beta_grid;
  std::string phi_grid;
  auto* grid = app.add_subcommand("grid", "search alpha/beta/phi, write grid.csv");
  add_config_options(grid, grid_args);
  grid->add_option("--alpha-grid", alpha_grid, "comma list (default 0.25,0.5,1.5,2.5)");
  grid->add_option("--beta-grid", beta_grid, "comma list (default 0.125,0.25,0.5)");
  grid->add_option("--phi-grid", phi_grid, "comma list (default 0.8,1.2)");

  CommonArgs fp_args;
  auto* fp = app.add_subcommand("analyze-fp", "false-positive topology analysis, write fp.csv");
  add_config_options(fp, fp_args);

  CommonArgs gen_args;
  auto* gen = app.add_subcommand("gen-sbm", "write a synthetic SBM graph in the file formats");
  add_config_options(gen, gen_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*train) return run_train(train_args, dump_topology, timing);
    if (*grid) return run_grid(grid_args, alpha_grid, beta_grid, phi_grid);
    if (*fp) return run_analyze_fp(fp_args);
    if (*gen) return run_gen_sbm(gen_args);
  } catch (const tam::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const tam::ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
