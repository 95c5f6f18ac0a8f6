/*
 * Copyright 2026 The treeagg Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "treeagg.hpp"

namespace {

using namespace treeagg;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::set<std::string> split_list(const std::string& s) {
  std::set<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto t = std::string(trim(item));
    if (!t.empty()) out.insert(t);
  }
  return out;
}

std::vector<double> parse_number_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto v = parse_double(item);
    if (!v || std::isnan(*v)) {
      throw UsageError("cannot parse '" + item + "' as a number");
    }
    out.push_back(*v);
  }
  if (out.empty()) throw UsageError("empty number list");
  return out;
}

std::string class_name(const Forest& forest, std::size_t k) {
  return k < forest.class_names.size() ? forest.class_names[k]
                                       : std::to_string(k);
}

struct Targets {
  std::vector<double> y;
  std::vector<std::string> names;
};

Targets encode_targets(const std::vector<std::string>& raw, Task task,
                       const std::string& column) {
  Targets t;
  if (task == Task::kRegression) {
    t.y = parse_targets(raw, column);
  } else {
    t.names = class_names_of(raw);
    t.y = encode_classes(raw, t.names);
  }
  return t;
}

Task task_from_string(const std::string& s) {
  if (s == "classification") return Task::kClassification;
  if (s == "regression") return Task::kRegression;
  throw UsageError("unknown task '" + s + "'");
}

// Rows with a defined out-of-bag output only.
void print_oob_summary(const Forest& forest, const RawMatrix& X,
                       std::span<const double> y) {
  const auto out = oob_raw_output(forest, bin(forest, X));
  const std::size_t w = forest.output_width();
  std::vector<double> kept, labels;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (std::isnan(out[i * w])) continue;
    kept.insert(kept.end(), out.begin() + static_cast<std::ptrdiff_t>(i * w),
                out.begin() + static_cast<std::ptrdiff_t>((i + 1) * w));
    labels.push_back(y[i]);
  }
  std::printf("oob rows: %zu of %zu\n", labels.size(), y.size());
  if (labels.empty()) return;
  if (forest.labels.task == Task::kRegression) {
    std::printf("oob mse: %.6g\n", mse(kept, labels));
    return;
  }
  const std::size_t k = forest.labels.n_classes;
  std::printf("oob log loss: %.6g\n", log_loss(kept, labels, k));
  std::set<double> present(labels.begin(), labels.end());
  if (present.size() == k) {
    std::printf("oob auc: %.6g\n", test_auc(kept, labels, k));
  }
}

struct TrainArgs {
  std::string data, target, out, categorical, ignore;
  std::string task = "classification";
  std::string multiclass = "heuristic";
  std::string criterion;
  std::size_t n_trees = 10;
  std::optional<double> eta;
  double dirichlet = 0.5;
  bool no_aggregation = false;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::size_t max_bins = kMaxBins;
  std::size_t max_features = 0;
  double min_samples_leaf = 1.0;
  double min_samples_split = 2.0;
  std::optional<std::uint32_t> max_depth;
};

TrainConfig make_config(const TrainArgs& a) {
  TrainConfig c;
  c.task = task_from_string(a.task);
  c.n_trees = a.n_trees;
  c.eta = a.eta;
  c.alpha = a.dirichlet;
  c.aggregation = !a.no_aggregation;
  c.multiclass = multiclass_from_string(a.multiclass);
  if (!a.criterion.empty()) c.criterion = criterion_from_string(a.criterion);
  c.seed = a.seed;
  c.n_workers = a.workers;
  c.max_bins = a.max_bins;
  c.max_features = a.max_features;
  c.min_samples_leaf = a.min_samples_leaf;
  c.min_samples_split = a.min_samples_split;
  c.max_depth = a.max_depth;
  return c;
}

void add_train_options(CLI::App* cmd, TrainArgs& a) {
  cmd->add_option("--task", a.task, "classification or regression")
      ->check(CLI::IsMember({"classification", "regression"}));
  cmd->add_option("--n-trees", a.n_trees, "trees per forest")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--eta", a.eta,
                  "aggregation temperature (default 1, or 1/(8B^2) for "
                  "regression)");
  cmd->add_option("--dirichlet", a.dirichlet,
                  "Dirichlet parameter of the leaf forecasts");
  cmd->add_flag("--no-aggregation", a.no_aggregation,
                "grow a plain random forest and predict with leaves");
  cmd->add_option("--multiclass", a.multiclass, "heuristic or ovr")
      ->check(CLI::IsMember({"heuristic", "ovr"}));
  cmd->add_option("--criterion", a.criterion, "gini, entropy or variance")
      ->check(CLI::IsMember({"gini", "entropy", "variance"}));
  cmd->add_option("--categorical", a.categorical,
                  "comma-separated categorical columns");
  cmd->add_option("--ignore", a.ignore, "comma-separated columns to skip");
  cmd->add_option("--seed", a.seed, "random seed");
  cmd->add_option("--workers", a.workers, "training threads")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-bins", a.max_bins, "histogram bins per feature");
  cmd->add_option("--max-features", a.max_features,
                  "features tried per split (0 = sqrt(d))");
  cmd->add_option("--min-samples-leaf", a.min_samples_leaf);
  cmd->add_option("--min-samples-split", a.min_samples_split);
  cmd->add_option("--max-depth", a.max_depth);
}

int run_train(const TrainArgs& a) {
  const auto config = make_config(a);
  DatasetSchema schema{a.target, split_list(a.categorical),
                       split_list(a.ignore)};
  const auto data = load_csv(a.data, schema);
  auto targets = encode_targets(data.target, config.task, a.target);
  FitReport report;
  const auto forest =
      fit(data.X, targets.y, config, std::move(targets.names), &report);
  save_model(forest, a.out);

  std::size_t leaves = 0;
  for (const auto& t : forest.trees) leaves += t.n_leaves();
  std::printf("trained %zu trees on %zu rows, %zu features\n",
              forest.trees.size(), data.X.n_rows(), data.X.n_cols());
  std::printf("mean leaves per tree: %.2f\n",
              static_cast<double>(leaves) /
                  static_cast<double>(forest.trees.size()));
  std::printf("eta: %.6g\n", forest.eta);
  if (report.root_oob_starved > 0) {
    std::fprintf(stderr,
                 "warning: %zu trees had too few out-of-bag rows at the root "
                 "and are single leaves\n",
                 report.root_oob_starved);
  }
  print_oob_summary(forest, data.X, targets.y);
  std::printf("model written to %s\n", a.out.c_str());
  return kExitOk;
}

struct PredictArgs {
  std::string model, data, out;
  bool proba = false;
  bool leaf_only = false;
};

int run_predict(const PredictArgs& a) {
  const auto forest = load_model(a.model);
  const auto table = read_csv(a.data);
  const auto X = select_features(table, forest.mapper);
  const auto mode =
      a.leaf_only ? PredictMode::kLeafOnly : PredictMode::kDefault;
  const auto raw = predict_raw_output(forest, bin(forest, X), mode);
  const std::size_t w = forest.output_width();
  CsvTable out;
  out.header.push_back("prediction");
  const bool classes = forest.labels.task == Task::kClassification;
  if (classes && a.proba) {
    for (std::size_t k = 0; k < w; ++k) {
      out.header.push_back("p_" + class_name(forest, k));
    }
  }
  for (std::size_t i = 0; i < X.n_rows(); ++i) {
    const auto first = raw.begin() + static_cast<std::ptrdiff_t>(i * w);
    std::vector<std::string> row;
    if (classes) {
      const auto k = static_cast<std::size_t>(
          std::max_element(first, first + static_cast<std::ptrdiff_t>(w)) -
          first);
      row.push_back(class_name(forest, k));
      if (a.proba) {
        for (std::size_t c = 0; c < w; ++c) {
          row.push_back(format_double(first[static_cast<std::ptrdiff_t>(c)]));
        }
      }
    } else {
      row.push_back(format_double(*first));
    }
    out.rows.push_back(std::move(row));
  }
  write_csv(a.out, out);
  std::printf("wrote %zu predictions to %s\n", out.rows.size(), a.out.c_str());
  return kExitOk;
}

struct EvaluateArgs {
  std::string model, data, target, metric;
  bool leaf_only = false;
};

int run_evaluate(const EvaluateArgs& a) {
  const auto forest = load_model(a.model);
  const auto table = read_csv(a.data);
  const auto X = select_features(table, forest.mapper);
  const auto data = to_dataset(table, DatasetSchema{a.target, {}, {}});
  const bool classes = forest.labels.task == Task::kClassification;
  if (classes == (a.metric == "mse")) {
    throw UsageError("metric '" + a.metric + "' does not fit a " +
                     (classes ? "classification" : "regression") + " model");
  }
  std::vector<double> y;
  if (classes) {
    std::vector<std::string> names;
    for (std::size_t k = 0; k < forest.labels.n_classes; ++k) {
      names.push_back(class_name(forest, k));
    }
    y = encode_classes(data.target, names);
  } else {
    y = parse_targets(data.target, a.target);
  }
  const auto mode =
      a.leaf_only ? PredictMode::kLeafOnly : PredictMode::kDefault;
  const auto raw = predict_raw_output(forest, bin(forest, X), mode);
  const std::size_t k = forest.labels.n_classes;

  EvalReport report;
  if (a.metric == "mse") {
    report.metric = "mse";
    report.value = mse(raw, y);
    report.n_samples = y.size();
  } else if (a.metric == "logloss") {
    report.metric = "logloss";
    report.value = log_loss(raw, y, k);
    report.n_samples = y.size();
  } else if (k == 2) {
    std::vector<double> score(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) score[i] = raw[2 * i + 1];
    report.metric = "auc";
    report.value = roc_auc(score, y);
    report.n_samples = y.size();
  } else {
    report = multiclass_auc(raw, y, k);
  }
  std::printf("metric: %s\n", report.metric.c_str());
  std::printf("value: %.10g\n", report.value);
  std::printf("samples: %zu\n", report.n_samples);
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    std::printf("class %s: %.10g\n", class_name(forest, c).c_str(),
                report.per_class[c]);
  }
  return kExitOk;
}

// Random structure on features of 8 bins, random stats and losses.
Tree random_tree(CounterEngine& gen, const LabelSpec& spec,
                 std::size_t leaves, std::size_t d) {
  constexpr std::uint32_t bins = 8;
  Tree tree(spec);
  tree.add_node(kNoNode);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (tree.n_leaves() < leaves) {
    std::vector<std::uint32_t> open;
    for (std::uint32_t v = 0; v < tree.size(); ++v) {
      if (tree.node(v).is_leaf()) open.push_back(v);
    }
    const auto v = open[gen.bounded(open.size())];
    Split s;
    s.feature = static_cast<std::uint32_t>(gen.bounded(d));
    if (gen.bounded(2) == 0) {
      s.kind = FeatureKind::kContinuous;
      s.threshold = static_cast<std::uint32_t>(gen.bounded(bins - 1));
      for (std::uint32_t b = 0; b <= s.threshold; ++b) s.left_bins.set(b);
    } else {
      s.kind = FeatureKind::kCategorical;
      do {
        s.left_bins.reset();
        for (std::uint32_t b = 0; b < bins; ++b) {
          if (gen.bounded(2)) s.left_bins.set(b);
        }
      } while (s.left_bins.none() || s.left_bins.count() == bins);
    }
    tree.split_node(v, s);
  }
  for (std::size_t v = 0; v < tree.size(); ++v) {
    auto st = tree.stats(v);
    const auto n = 1 + gen.bounded(6);
    for (std::uint64_t i = 0; i < n; ++i) {
      const double y = spec.task == Task::kClassification
                           ? static_cast<double>(gen.bounded(spec.n_classes))
                           : 1.0 + 4.0 * unit(gen);
      spec.accumulate(st, y, 1.0);
    }
    auto& node = tree.node(v);
    node.loss = 20.0 * unit(gen) * unit(gen);
    node.itb_weight = spec.weight(st);
    node.n_oob = 1;
  }
  return tree;
}

struct VerifyArgs {
  std::size_t trials = 1000;
  std::size_t max_leaves = 6;
  std::uint64_t seed = 0;
};

int run_verify(const VerifyArgs& a) {
  if (a.max_leaves < 1 || 2 * a.max_leaves - 1 > kDefaultEnumerationLimit) {
    throw UsageError("max-leaves must be in [1, " +
                     std::to_string((kDefaultEnumerationLimit + 1) / 2) + "]");
  }
  const auto start = std::chrono::steady_clock::now();
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  double worst_rel = 0.0;
  std::size_t bad_equivalence = 0;
  for (std::size_t trial = 0; trial < a.trials; ++trial) {
    CounterEngine gen(a.seed, trial, Purpose::kData, 1);
    const LabelSpec spec =
        trial % 2 ? LabelSpec{Task::kRegression, 0}
                  : LabelSpec{Task::kClassification,
                              static_cast<std::uint32_t>(2 + gen.bounded(3))};
    auto tree = random_tree(gen, spec, 1 + gen.bounded(a.max_leaves), 3);
    compute_log_weights(tree, 0.05 + 3.0 * unit(gen));
    const auto subtrees = enumerate_subtrees(tree);
    for (int r = 0; r < 4; ++r) {
      std::vector<std::uint8_t> row(3);
      for (auto& b : row) b = static_cast<std::uint8_t>(gen.bounded(8));
      const auto fast = predict_aggregated(tree, row);
      const auto slow = brute_force_aggregate(tree, subtrees, row);
      for (std::size_t k = 0; k < fast.size(); ++k) {
        const double rel = std::abs(fast[k] - slow[k]) / std::abs(slow[k]);
        if (!(rel <= 1e-10)) ++bad_equivalence;
        if (std::isfinite(rel)) worst_rel = std::max(worst_rel, rel);
      }
    }
  }
  std::printf("equivalence: %zu trees, max relative error %.3g, %zu violations\n",
              a.trials, worst_rel, bad_equivalence);

  double worst_gap = -std::numeric_limits<double>::infinity();
  std::size_t bad_inequality = 0, checked = 0;
  for (std::size_t trial = 0; trial < a.trials; ++trial) {
    CounterEngine gen(a.seed, trial, Purpose::kData, 2);
    const bool regression = trial % 2;
    const std::size_t n = 40 + gen.bounded(60);
    RawMatrix X;
    std::vector<double> y(n);
    for (std::size_t j = 0; j < 3; ++j) {
      std::vector<double> col(n);
      for (auto& v : col) v = unit(gen);
      X.columns.push_back(RawColumn::continuous("x" + std::to_string(j), col));
    }
    const std::uint32_t k = regression ? 0 : 2 + gen.bounded(2);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = X.columns[0].numeric[i];
      y[i] = regression ? std::sin(6.0 * x) + 0.5 * (unit(gen) - 0.5)
                        : static_cast<double>(unit(gen) < 0.3
                                                  ? gen.bounded(k)
                                                  : std::min<std::uint64_t>(
                                                        k - 1, x * k));
    }
    const LabelSpec spec = regression ? LabelSpec{Task::kRegression, 0}
                                      : LabelSpec{Task::kClassification, k};
    const auto mapper = fit_bins(X, 8);
    const auto binned = transform(X, mapper);
    const RandomSource rng{a.seed, trial};
    const auto sample = bootstrap(n, rng);
    GrowConfig grow;
    grow.criterion = regression ? Criterion::kVariance : Criterion::kGini;
    grow.max_features = 3;
    grow.max_depth = 4;
    auto tree = grow_tree(binned, mapper.features, y, spec, sample, grow, rng);
    if (tree.n_leaves() > a.max_leaves) {
      // Prune to the requested size by growing a shallower tree.
      for (std::uint32_t depth = 3; tree.n_leaves() > a.max_leaves; --depth) {
        grow.max_depth = depth;
        tree = grow_tree(binned, mapper.features, y, spec, sample, grow, rng);
      }
    }
    double eta = 1.0;
    if (regression) {
      double b = 0.0;
      for (double v : y) b = std::max(b, std::abs(v));
      eta = 1.0 / (8.0 * b * b);
    }
    compute_log_weights(tree, eta);
    const auto report =
        check_oracle_inequality(tree, binned, y, sample.oob_indices);
    ++checked;
    worst_gap = std::max(worst_gap, report.max_violation);
    if (!(report.max_violation <= 1e-9)) ++bad_inequality;
  }
  std::printf("oracle inequality: %zu trees, max gap %.3g, %zu violations\n",
              checked, worst_gap, bad_inequality);
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  std::printf("time: %.2fs\n", secs);
  const bool ok = bad_equivalence == 0 && bad_inequality == 0;
  std::printf("%s\n", ok ? "all checks passed" : "violations found");
  return ok ? kExitOk : kExitValidation;
}

struct SignalArgs {
  std::string snr = "0.5,1", signals = "doppler,heavisine", out;
  std::size_t repeats = 10, n = 2048, n_test = 1000, n_trees = 100;
  std::size_t workers = 1;
  double eta = 1.0;
  std::uint64_t seed = 0;
};

int run_bench_signals(const SignalArgs& a) {
  SignalBenchConfig c;
  c.snrs = parse_number_list(a.snr);
  c.signals.clear();
  for (const auto& s : split_list(a.signals)) {
    c.signals.push_back(signal_from_string(s));
  }
  std::sort(c.signals.begin(), c.signals.end());
  c.repeats = a.repeats;
  c.n = a.n;
  c.n_test = a.n_test;
  c.n_trees = a.n_trees;
  c.eta = a.eta;
  c.seed = a.seed;
  c.n_workers = a.workers;
  const auto rows = signal_benchmark(c);
  CsvTable out;
  out.header = {"signal", "snr",     "repeats",
                "mse_aggregation", "mse_leaf_only", "wins"};
  std::printf("%-10s %6s %16s %16s %6s\n", "signal", "snr", "aggregation",
              "leaf only", "wins");
  for (const auto& r : rows) {
    const std::string name(to_string(r.signal));
    out.rows.push_back({name, format_double(r.snr), std::to_string(r.repeats),
                        format_double(r.mse_on), format_double(r.mse_off),
                        std::to_string(r.wins)});
    std::printf("%-10s %6g %16.6g %16.6g %3zu/%zu\n", name.c_str(), r.snr,
                r.mse_on, r.mse_off, r.wins, r.repeats);
  }
  write_csv(a.out, out);
  return kExitOk;
}

struct TreesArgs {
  std::string data, target, out, categorical, ignore;
  std::size_t max_trees = 10, splits = 10, workers = 1;
  double test_fraction = 0.3;
  std::uint64_t seed = 0;
};

int run_bench_trees(const TreesArgs& a) {
  DatasetSchema schema{a.target, split_list(a.categorical),
                       split_list(a.ignore)};
  const auto data = load_csv(a.data, schema);
  auto targets = encode_targets(data.target, Task::kClassification, a.target);
  TreeBenchConfig c;
  c.tree_counts.clear();
  for (std::size_t m = 1; m < a.max_trees;) {
    c.tree_counts.push_back(m);
    const auto s = std::to_string(m);
    m = s.front() == '2' ? m / 2 * 5 : m * 2;
  }
  c.tree_counts.push_back(a.max_trees);
  c.splits = a.splits;
  c.test_fraction = a.test_fraction;
  c.base.seed = a.seed;
  c.base.n_workers = a.workers;
  const auto rows = tree_count_benchmark(data.X, targets.y, targets.names, c);
  CsvTable out;
  out.header = {"n_trees", "splits", "auc_aggregation", "auc_leaf_only",
                "wins"};
  std::printf("%8s %16s %16s %6s\n", "trees", "aggregation", "leaf only",
              "wins");
  for (const auto& r : rows) {
    out.rows.push_back({std::to_string(r.n_trees), std::to_string(r.splits),
                        format_double(r.auc_on), format_double(r.auc_off),
                        std::to_string(r.wins)});
    std::printf("%8zu %16.6f %16.6f %3zu/%zu\n", r.n_trees, r.auc_on,
                r.auc_off, r.wins, r.splits);
  }
  write_csv(a.out, out);
  return kExitOk;
}

struct MakeDataArgs {
  std::string kind = "toy", out;
  std::size_t n = 0;
  double snr = 1.0;
  double spread = 0.7;
  std::uint64_t seed = 0;
};

int run_make_data(const MakeDataArgs& a) {
  CsvTable out;
  if (a.kind == "toy") {
    const auto d = make_toy_classification(a.n ? a.n : 5000, a.seed, a.spread);
    out.header = {"x1", "x2", "y"};
    for (std::size_t i = 0; i < d.y.size(); ++i) {
      out.rows.push_back({format_double(d.X.columns[0].numeric[i]),
                          format_double(d.X.columns[1].numeric[i]),
                          format_double(d.y[i])});
    }
  } else {
    const auto s = signal_from_string(a.kind);
    const auto t = signal_grid(a.n ? a.n : 2048);
    const auto f = sample_signal(s, t);
    const auto y = add_noise(f, a.snr, a.seed);
    out.header = {"t", "y", "signal"};
    for (std::size_t i = 0; i < t.size(); ++i) {
      out.rows.push_back(
          {format_double(t[i]), format_double(y[i]), format_double(f[i])});
    }
  }
  write_csv(a.out, out);
  std::printf("wrote %zu rows to %s\n", out.rows.size(), a.out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random forests with exact subtree aggregation"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "fit a forest on a CSV file");
  train_cmd->add_option("--data", train.data, "training CSV")->required();
  train_cmd->add_option("--target", train.target, "label column")->required();
  train_cmd->add_option("--out", train.out, "model file to write")->required();
  add_train_options(train_cmd, train);

  PredictArgs pred;
  auto* pred_cmd = app.add_subcommand("predict", "predict rows of a CSV file");
  pred_cmd->add_option("--model", pred.model)->required();
  pred_cmd->add_option("--data", pred.data)->required();
  pred_cmd->add_option("--out", pred.out, "predictions CSV")->required();
  pred_cmd->add_flag("--proba", pred.proba, "add class probability columns");
  pred_cmd->add_flag("--leaf-only", pred.leaf_only,
                     "use leaf forecasts instead of the aggregate");

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "score a model on a CSV file");
  eval_cmd->add_option("--model", eval.model)->required();
  eval_cmd->add_option("--data", eval.data)->required();
  eval_cmd->add_option("--target", eval.target)->required();
  eval_cmd->add_option("--metric", eval.metric)
      ->required()
      ->check(CLI::IsMember({"auc", "logloss", "mse"}));
  eval_cmd->add_flag("--leaf-only", eval.leaf_only);

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand(
      "verify", "check the aggregation against brute-force enumeration");
  verify_cmd->add_option("--trials", verify.trials, "trees per check");
  verify_cmd->add_option("--max-leaves", verify.max_leaves);
  verify_cmd->add_option("--seed", verify.seed);

  SignalArgs sig;
  auto* sig_cmd = app.add_subcommand(
      "bench-signals", "regression error on noisy test signals");
  sig_cmd->add_option("--snr", sig.snr, "comma-separated SNR values");
  sig_cmd->add_option("--repeats", sig.repeats)->check(CLI::PositiveNumber);
  sig_cmd->add_option("--out", sig.out, "results CSV")->required();
  sig_cmd->add_option("--signals", sig.signals,
                      "comma-separated: doppler, heavisine, blocks, bumps");
  sig_cmd->add_option("--n", sig.n, "training points");
  sig_cmd->add_option("--n-test", sig.n_test, "test points");
  sig_cmd->add_option("--n-trees", sig.n_trees)->check(CLI::PositiveNumber);
  sig_cmd->add_option("--eta", sig.eta, "aggregation temperature");
  sig_cmd->add_option("--seed", sig.seed);
  sig_cmd->add_option("--workers", sig.workers)->check(CLI::PositiveNumber);

  TreesArgs trees;
  auto* trees_cmd = app.add_subcommand(
      "bench-trees", "test AUC against the number of trees");
  trees_cmd->add_option("--data", trees.data)->required();
  trees_cmd->add_option("--target", trees.target)->required();
  trees_cmd->add_option("--max-trees", trees.max_trees)
      ->required()
      ->check(CLI::PositiveNumber);
  trees_cmd->add_option("--out", trees.out)->required();
  trees_cmd->add_option("--splits", trees.splits)->check(CLI::PositiveNumber);
  trees_cmd->add_option("--test-fraction", trees.test_fraction);
  trees_cmd->add_option("--categorical", trees.categorical);
  trees_cmd->add_option("--ignore", trees.ignore);
  trees_cmd->add_option("--seed", trees.seed);
  trees_cmd->add_option("--workers", trees.workers)->check(CLI::PositiveNumber);

  MakeDataArgs make;
  auto* make_cmd = app.add_subcommand("make-data", "write a synthetic dataset");
  make_cmd->add_option("--kind", make.kind,
                       "toy, doppler, heavisine, blocks or bumps");
  make_cmd->add_option("--n", make.n, "rows (default 5000 toy, 2048 signals)");
  make_cmd->add_option("--snr", make.snr);
  make_cmd->add_option("--spread", make.spread, "toy blob spread");
  make_cmd->add_option("--seed", make.seed);
  make_cmd->add_option("--out", make.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) return run_train(train);
    if (*pred_cmd) return run_predict(pred);
    if (*eval_cmd) return run_evaluate(eval);
    if (*verify_cmd) return run_verify(verify);
    if (*sig_cmd) return run_bench_signals(sig);
    if (*trees_cmd) return run_bench_trees(trees);
    if (*make_cmd) return run_make_data(make);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}
