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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tam/graph.hpp"
#include "tam/margins.hpp"
#include "tam/metrics.hpp"
#include "tam/models.hpp"
#include "tam/topology.hpp"

namespace tam {

/// Flat `key -> value` view of an experiment configuration (sorted keys).
using FlatConfig = std::map<std::string, std::string>;

struct DataConfig {
  std::string edges;
  std::string features;
  std::string labels;
  std::string split;  // optional; stratified 60/20/20 when empty
  std::optional<SbmSpec> sbm;
};

struct ExperimentConfig {
  DataConfig data;
  ModelConfig model;  // in/out dims are filled from the data
  TamConfig tam;
  double rho = 1.0;
  std::vector<ClassId> minor_classes;  // empty: last floor(C/2) classes
  std::uint64_t split_seed = 0;

  int epochs = 2000;
  double lr = 0.01;
  int lr_patience = 100;
  double weight_decay = 5e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  int repeats = 1;
  std::uint64_t seed_base = 0;
  FpOptions fp;

  // run-time settings, not part of the echo
  int threads = 1;
  std::string output_dir;

  void validate() const;
};

/// Parses `key = value` lines (`#` comments, blank lines ignored).
FlatConfig read_flat_config(const std::filesystem::path& path);
/// Applies flat keys on top of `base`. Unknown keys or bad values throw
/// ConfigError.
ExperimentConfig apply_flat_config(ExperimentConfig base, const FlatConfig& flat);
/// Every result-affecting setting; apply_flat_config(ExperimentConfig{}, to_flat(c))
/// reproduces c up to run-time settings.
FlatConfig to_flat(const ExperimentConfig& config);
/// Keys accepted by apply_flat_config.
const std::vector<std::string>& flat_config_keys();

struct Dataset {
  Graph graph;
  SplitMasks base_split;
  SplitMasks split;  // after step imbalance
  std::vector<ClassId> minor_classes;
  std::size_t dropped_self_loops = 0;
};

Dataset prepare_dataset(const ExperimentConfig& config);

struct EpochTrace {
  int epoch = 0;
  double loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
};

struct SplitMetrics {
  double bacc = 0.0;
  double f1 = 0.0;
};

struct RunReport {
  FlatConfig config;
  std::uint64_t seed = 0;
  bool aborted = false;
  std::string abort_reason;
  int best_epoch = 0;
  SplitMetrics val;
  SplitMetrics test;
  FpReport fp;
  std::vector<EpochTrace> trace;
  std::vector<std::string> warnings;
  double wall_time_ms = 0.0;

  // final-model topology statistics (estimated from the selected checkpoint)
  NldMatrix nld;
  Tensor conn;
};

/// Deterministic JSON (sorted keys). Wall time is only included on request
/// since it breaks byte-for-byte reproducibility.
nlohmann::json to_json(const RunReport& report, bool include_timing = false);

/// Full-batch training with optional topology-aware margins. Each epoch:
/// forward (train mode), margins from the detached logits, weighted
/// margin cross-entropy on the training nodes, Adam step, validation pass,
/// plateau LR schedule, checkpoint on best (val bAcc + val F1) / 2.
RunReport train_once(const ExperimentConfig& config, const Dataset& data, std::uint64_t seed);

struct MetricSummary {
  std::string name;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

struct AggregateReport {
  std::vector<RunReport> runs;
  std::vector<MetricSummary> metrics;
  std::size_t aborted = 0;

  const MetricSummary& metric(const std::string& name) const;
};

/// Named scalar metrics of a run; undefined FP ratios are omitted.
std::vector<std::pair<std::string, double>> scalar_metrics(const RunReport& report);
/// Mean and standard error (sample sd / sqrt(n)) per metric across the
/// completed runs.
std::vector<MetricSummary> summarize(const std::vector<RunReport>& runs);

/// Seeds seed_base .. seed_base + repeats - 1, up to `config.threads` at once.
AggregateReport run_repeats(const ExperimentConfig& config, const Dataset& data);

struct GridSpec {
  std::vector<double> alphas{0.25, 0.5, 1.5, 2.5};
  std::vector<double> betas{0.125, 0.25, 0.5};
  std::vector<double> phis{0.8, 1.2};
};

struct GridCell {
  double alpha = 0.0;
  double beta = 0.0;
  double phi = 0.0;
  double val_score = 0.0;  // mean over seeds of (val bAcc + val F1) / 2
  MetricSummary test_bacc;
  MetricSummary test_f1;
  std::size_t completed = 0;
};

struct GridResult {
  std::vector<GridCell> cells;
  std::size_t best = 0;
  ExperimentConfig best_config;
};

GridResult grid_search(const ExperimentConfig& config, const Dataset& data, const GridSpec& grid);

void write_summary_csv(const std::vector<MetricSummary>& metrics, const std::filesystem::path& path);
void write_grid_csv(const GridResult& grid, const std::filesystem::path& path);
/// One CSV per matrix: NLD rows prefixed by node id, and the connectivity matrix.
void write_topology_csv(const RunReport& report, const std::filesystem::path& nld_path,
                        const std::filesystem::path& conn_path);

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// Keeps freed tensor buffers on the heap instead of handing them back to
/// the OS every epoch. No-op outside glibc.
void retain_heap_memory();

}  // namespace tam
