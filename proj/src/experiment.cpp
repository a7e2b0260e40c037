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

#include "tam/experiment.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include "tam/optim.hpp"
#include "tam/tape.hpp"

namespace tam {

Dataset prepare_dataset(const ExperimentConfig& config) {
  config.validate();
  Dataset d;
  if (config.data.sbm) {
    auto [graph, split] = generate_sbm(*config.data.sbm);
    d.graph = std::move(graph);
    d.base_split = std::move(split);
  } else {
    d.graph = load_graph(config.data.edges, config.data.features, config.data.labels,
                         &d.dropped_self_loops);
    if (config.data.split.empty()) {
      Rng rng(config.split_seed);
      d.base_split = stratified_split(d.graph, 0.6, 0.2, rng);
    } else {
      d.base_split = load_split(config.data.split);
    }
  }
  validate_split(d.graph, d.base_split);
  d.minor_classes = config.minor_classes.empty() ? default_minor_classes(d.graph.num_classes())
                                                 : config.minor_classes;
  d.split = make_step_imbalance_split(d.graph, d.base_split.train, d.base_split.val,
                                      d.base_split.test, config.rho, d.minor_classes,
                                      config.split_seed);
  return d;
}

namespace {

std::vector<ClassId> labels_of(const Graph& g, std::span<const NodeId> nodes) {
  std::vector<ClassId> out;
  out.reserve(nodes.size());
  for (NodeId v : nodes) out.push_back(g.label(v));
  return out;
}

Tensor gather(const Tensor& x, std::span<const NodeId> rows) {
  Tensor out(rows.size(), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(x.row(rows[i]).begin(), x.cols(), out.row(i).begin());
  }
  return out;
}

nlohmann::json ratio_json(const Ratio& r) {
  nlohmann::json j;
  j["numerator"] = r.numerator;
  j["denominator"] = r.denominator;
  if (auto v = r.value()) {
    j["value"] = *v;
  } else {
    j["value"] = nullptr;
  }
  return j;
}

// Stream for dropout masks, decorrelated from the init stream of the same seed.
constexpr std::uint64_t kDropoutStream = 0x9E3779B97F4A7C15ULL;

}  // namespace

RunReport train_once(const ExperimentConfig& config, const Dataset& data, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const Graph& g = data.graph;
  const SplitMasks& split = data.split;
  const int num_classes = g.num_classes();

  RunReport report;
  report.config = to_flat(config);
  report.seed = seed;

  const auto counts = class_counts(g, split.train);
  for (int k = 0; k < num_classes; ++k) {
    if (counts[k] == 0) throw ConfigError("class " + std::to_string(k) + " has no labeled nodes");
  }
  std::vector<double> base;
  std::vector<double> weights;
  if (config.tam.base_loss == BaseLoss::kBalancedSoftmax) base = balanced_softmax_margins(counts);
  if (config.tam.base_loss == BaseLoss::kReweight) weights = reweight_weights(counts);
  const auto temps = class_temperatures(counts, config.tam.phi, config.tam.delta);

  const auto train_targets = labels_of(g, split.train);
  const auto val_targets = labels_of(g, split.val);
  const auto known = make_mask(g.num_nodes(), split.train);
  // labels visible to training: everything outside V^L is masked out
  std::vector<ClassId> visible(g.num_nodes(), kUnlabeled);
  for (NodeId v : split.train) visible[v] = g.label(v);

  ModelConfig mc = config.model;
  mc.in_dim = g.features().cols();
  mc.out_dim = static_cast<std::size_t>(num_classes);
  mc.seed = seed;
  ParamSet params = init_params(mc);
  ParamSet best_params = params;
  const ModelInputs inputs = make_inputs(g, mc.arch);
  Rng dropout_rng(seed ^ kDropoutStream);

  AdamState adam;
  adam.lr = config.lr;
  adam.beta1 = config.adam_beta1;
  adam.beta2 = config.adam_beta2;
  adam.eps = config.adam_eps;
  adam.weight_decay = config.weight_decay;
  PlateauScheduler scheduler(config.lr, config.lr_patience);

  double best_score = -1.0;
  report.trace.reserve(config.epochs);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Tape tape;
    const auto bound = bind_params(tape, params);
    const Var logits = model_forward(tape, inputs, params, bound, mc.dropout, dropout_rng, true);

    MarginTensor margins;
    if (config.tam.enabled() && epoch > config.tam.warmup_epochs) {
      const Tensor probs = pseudo_label_probs(tape.value(logits), temps);
      const NldMatrix nld = neighbor_label_distribution(g, split.train, known, visible, probs);
      const Tensor conn = connectivity_matrix(nld, visible, num_classes);
      margins = assemble_tam(nld, conn, visible, config.tam, base, epoch);
    } else {
      margins = base_margins(split.train.size(), num_classes, base);
    }

    const Var train_logits = tape.gather_rows(logits, split.train);
    double loss = 0.0;
    try {
      const Var loss_var =
          tape.margin_softmax_xent(train_logits, margins.combined(), train_targets, weights);
      loss = tape.value(loss_var)(0, 0);
      if (!std::isfinite(loss)) throw NumericError("non-finite training loss");
      tape.backward(loss_var);
    } catch (const NumericError& e) {
      report.aborted = true;
      report.abort_reason = "epoch " + std::to_string(epoch) + ": " + e.what();
      break;
    }
    collect_grads(tape, bound, params);
    adam.lr = scheduler.lr();
    const double lr_used = adam.lr;
    adam_step(adam, params.params);

    const Tensor eval_logits = predict_logits(inputs, params);
    const double val_loss =
        margin_softmax_xent_value(gather(eval_logits, split.val), Tensor{}, val_targets, {});
    const auto preds = argmax_rows(eval_logits);
    const auto cm = ConfusionMatrix::from_predictions(preds, g.labels(), split.val, num_classes);
    const double score = 0.5 * (balanced_accuracy(cm) + macro_f1(cm));
    if (score > best_score) {
      best_score = score;
      best_params = params;
      report.best_epoch = epoch;
    }
    scheduler.step(val_loss);
    report.trace.push_back(EpochTrace{epoch, loss, val_loss, lr_used});
  }

  if (report.best_epoch > 0) {
    const Tensor logits = predict_logits(inputs, best_params);
    const auto preds = argmax_rows(logits);
    const auto val_cm = ConfusionMatrix::from_predictions(preds, g.labels(), split.val, num_classes);
    const auto test_cm = ConfusionMatrix::from_predictions(preds, g.labels(), split.test, num_classes);
    report.val = {balanced_accuracy(val_cm), macro_f1(val_cm)};
    report.test = {balanced_accuracy(test_cm), macro_f1(test_cm)};
    for (ClassId k : val_cm.absent_classes()) {
      report.warnings.push_back("class " + std::to_string(k) + " absent from validation set");
    }
    for (ClassId k : test_cm.absent_classes()) {
      report.warnings.push_back("class " + std::to_string(k) + " absent from test set");
    }

    const Tensor probs = pseudo_label_probs(logits, temps);
    report.fp = fp_topology_analysis(g, preds, split.train, split.val, data.minor_classes, probs,
                                     config.fp);
    report.nld = neighbor_label_distribution(g, split.train, known, visible, probs);
    report.conn = connectivity_matrix(report.nld, visible, num_classes);
  }
  if (data.dropped_self_loops > 0) {
    report.warnings.push_back(std::to_string(data.dropped_self_loops) +
                              " self-loops dropped from the edge file");
  }
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

nlohmann::json to_json(const RunReport& r, bool include_timing) {
  nlohmann::json j;
  j["config"] = r.config;
  j["seed"] = r.seed;
  j["status"] = r.aborted ? "aborted" : "ok";
  if (r.aborted) j["abort_reason"] = r.abort_reason;
  j["best_epoch"] = r.best_epoch;
  j["val"] = {{"bacc", r.val.bacc}, {"f1", r.val.f1}};
  j["test"] = {{"bacc", r.test.bacc}, {"f1", r.test.f1}};
  j["fp"] = {{"abnormal_minor_fp", ratio_json(r.fp.abnormal_minor_fp)},
             {"minor_fp", ratio_json(r.fp.minor_fp)},
             {"fnr", ratio_json(r.fp.fnr)},
             {"anomalous_minor_nodes", r.fp.anomalous_minor}};
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& e : r.trace) {
    trace.push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"val_loss", e.val_loss}, {"lr", e.lr}});
  }
  j["trace"] = std::move(trace);
  j["warnings"] = r.warnings;
  if (include_timing) j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

std::vector<std::pair<std::string, double>> scalar_metrics(const RunReport& r) {
  std::vector<std::pair<std::string, double>> m{
      {"val_bacc", r.val.bacc}, {"val_f1", r.val.f1}, {"test_bacc", r.test.bacc}, {"test_f1", r.test.f1}};
  if (auto v = r.fp.abnormal_minor_fp.value()) m.emplace_back("abnormal_minor_fp", *v);
  if (auto v = r.fp.minor_fp.value()) m.emplace_back("minor_fp", *v);
  if (auto v = r.fp.fnr.value()) m.emplace_back("fnr", *v);
  return m;
}

std::vector<MetricSummary> summarize(const std::vector<RunReport>& runs) {
  static const std::vector<std::string> order{"val_bacc", "val_f1", "test_bacc", "test_f1",
                                              "abnormal_minor_fp", "minor_fp", "fnr"};
  std::map<std::string, std::vector<double>> values;
  for (const auto& r : runs) {
    if (r.aborted) continue;
    for (const auto& [name, v] : scalar_metrics(r)) values[name].push_back(v);
  }
  std::vector<MetricSummary> out;
  for (const auto& name : order) {
    MetricSummary s;
    s.name = name;
    const auto it = values.find(name);
    if (it != values.end()) {
      const auto& xs = it->second;
      s.n = xs.size();
      double sum = 0.0;
      for (double x : xs) sum += x;
      s.mean = sum / static_cast<double>(s.n);
      if (s.n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.std_error = std::sqrt(ss / static_cast<double>(s.n - 1)) / std::sqrt(static_cast<double>(s.n));
      }
    }
    out.push_back(s);
  }
  return out;
}

const MetricSummary& AggregateReport::metric(const std::string& name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return m;
  }
  throw std::out_of_range("no metric named " + name);
}

AggregateReport run_repeats(const ExperimentConfig& config, const Dataset& data) {
  AggregateReport agg;
  agg.runs.resize(config.repeats);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < config.repeats; i = next++) {
      try {
        agg.runs[i] = train_once(config, data, config.seed_base + static_cast<std::uint64_t>(i));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n_threads = std::min(config.threads, config.repeats);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  for (const auto& r : agg.runs) agg.aborted += r.aborted ? 1 : 0;
  agg.metrics = summarize(agg.runs);
  return agg;
}

GridResult grid_search(const ExperimentConfig& config, const Dataset& data, const GridSpec& grid) {
  if (grid.alphas.empty() || grid.betas.empty() || grid.phis.empty()) {
    throw ConfigError("grid search needs at least one value per axis");
  }
  GridResult result;
  double best = -1.0;
  for (double a : grid.alphas) {
    for (double b : grid.betas) {
      for (double p : grid.phis) {
        ExperimentConfig cell_cfg = config;
        cell_cfg.tam.alpha = a;
        cell_cfg.tam.beta = b;
        cell_cfg.tam.phi = p;
        const AggregateReport agg = run_repeats(cell_cfg, data);
        GridCell cell;
        cell.alpha = a;
        cell.beta = b;
        cell.phi = p;
        cell.completed = agg.runs.size() - agg.aborted;
        cell.test_bacc = agg.metric("test_bacc");
        cell.test_f1 = agg.metric("test_f1");
        cell.val_score = 0.5 * (agg.metric("val_bacc").mean + agg.metric("val_f1").mean);
        if (cell.completed > 0 && cell.val_score > best) {
          best = cell.val_score;
          result.best = result.cells.size();
          result.best_config = cell_cfg;
        }
        result.cells.push_back(cell);
      }
    }
  }
  if (best < 0.0) result.best_config = config;
  return result;
}

void write_summary_csv(const std::vector<MetricSummary>& metrics, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(path.string() + ": cannot open file for writing");
  out << "metric,mean,stderr,n\n";
  for (const auto& m : metrics) {
    out << m.name << ',' << format_double(m.mean) << ',' << format_double(m.std_error) << ',' << m.n
        << '\n';
  }
}

void write_grid_csv(const GridResult& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(path.string() + ": cannot open file for writing");
  out << "alpha,beta,phi,val_score,test_bacc_mean,test_bacc_stderr,test_f1_mean,test_f1_stderr,"
         "completed,best\n";
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const auto& c = grid.cells[i];
    out << format_double(c.alpha) << ',' << format_double(c.beta) << ',' << format_double(c.phi)
        << ',' << format_double(c.val_score) << ',' << format_double(c.test_bacc.mean) << ','
        << format_double(c.test_bacc.std_error) << ',' << format_double(c.test_f1.mean) << ','
        << format_double(c.test_f1.std_error) << ',' << c.completed << ','
        << (i == grid.best ? 1 : 0) << '\n';
  }
}

void write_topology_csv(const RunReport& report, const std::filesystem::path& nld_path,
                        const std::filesystem::path& conn_path) {
  std::ofstream nld(nld_path);
  std::ofstream conn(conn_path);
  if (!nld || !conn) throw Error("cannot open topology dump files for writing");
  const std::size_t c = report.conn.cols();
  nld << "node";
  conn << "class";
  for (std::size_t k = 0; k < c; ++k) {
    nld << ",c" << k;
    conn << ",c" << k;
  }
  nld << '\n';
  conn << '\n';
  for (std::size_t i = 0; i < report.nld.nodes.size(); ++i) {
    nld << report.nld.nodes[i];
    for (double x : report.nld.rows.row(i)) nld << ',' << format_double(x);
    nld << '\n';
  }
  for (std::size_t k = 0; k < c; ++k) {
    conn << k;
    for (double x : report.conn.row(k)) conn << ',' << format_double(x);
    conn << '\n';
  }
}

void retain_heap_memory() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif
}

}  // namespace tam
