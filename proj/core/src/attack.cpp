#include "sclba/attack.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "sclba/error.hpp"

namespace sclba {

namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kPoisonSelect = 0x5e1ec7;
constexpr std::uint64_t kPoisonGraph = 0x9a4b;
constexpr std::uint64_t kAttackGraph = 0xa77ac;

// First k entries of a partial Fisher-Yates shuffle of 0..n-1.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

std::vector<std::size_t> train_indices_with_label(const Dataset& dataset, const DataSplit& split,
                                                  GraphLabel label) {
  std::vector<std::size_t> out;
  for (std::size_t i : split.train_indices) {
    if (dataset.graphs.at(i).label == label) out.push_back(i);
  }
  return out;
}

}  // namespace

std::vector<double> degree_centrality(const Graph& graph) {
  std::vector<double> dc(graph.node_count, 0.0);
  if (graph.node_count < 2) return dc;
  const auto deg = graph.degrees();
  const double denom = static_cast<double>(graph.node_count - 1);
  for (std::size_t i = 0; i < graph.node_count; ++i) dc[i] = static_cast<double>(deg[i]) / denom;
  return dc;
}

TriggerReport select_semantic_trigger(const Dataset& dataset, const DataSplit& split,
                                      GraphLabel target_label) {
  const std::size_t vocab = dataset.node_class_vocab_size();
  TriggerReport report;
  report.target_label = target_label;
  report.totals.assign(vocab, 0.0);
  report.present.assign(vocab, false);

  for (std::size_t idx : split.train_indices) {
    const Graph& g = dataset.graphs.at(idx);
    if (g.label == target_label) continue;
    ++report.nontarget_graphs;
    const auto dc = degree_centrality(g);
    for (std::size_t n = 0; n < g.node_count; ++n) {
      report.totals[g.node_classes[n]] += dc[n];
      report.present[g.node_classes[n]] = true;
    }
  }
  if (report.nontarget_graphs == 0) {
    throw DataError("trigger selection: no training graphs with a label other than " +
                    std::to_string(target_label));
  }

  for (NodeClass c = 0; c < vocab; ++c) {
    if (report.present[c]) report.ranking.push_back(c);
  }
  std::stable_sort(report.ranking.begin(), report.ranking.end(),
                   [&](NodeClass a, NodeClass b) { return report.totals[a] < report.totals[b]; });
  report.trigger_class = report.ranking.front();
  return report;
}

InjectedGraph inject_trigger(const Graph& graph, NodeClass trigger_class, std::size_t t, Rng& rng) {
  if (t == 0) throw ConfigError("trigger size must be at least 1");
  InjectedGraph out;
  out.graph = graph;
  const std::size_t k = std::min(t, graph.node_count);
  for (std::size_t pos : sample_without_replacement(graph.node_count, k, rng)) {
    out.positions.push_back(static_cast<NodeIndex>(pos));
    out.original_classes.push_back(graph.node_classes[pos]);
    out.graph.node_classes[pos] = trigger_class;
  }
  return out;
}

void AttackConfig::validate(std::size_t num_graph_labels) const {
  if (!(poisoning_rate > 0.0 && poisoning_rate < 1.0)) {
    throw ConfigError("poisoning rate must lie in (0, 1)");
  }
  if (trigger_size == 0) throw ConfigError("trigger size must be at least 1");
  if (target_label >= num_graph_labels) {
    throw ConfigError("target label " + std::to_string(target_label) + " is not one of the " +
                      std::to_string(num_graph_labels) + " graph labels");
  }
}

std::size_t poison_count(double poisoning_rate, std::size_t train_size) {
  return static_cast<std::size_t>(std::llround(poisoning_rate * static_cast<double>(train_size)));
}

PoisonedTrainset generate_poisoned_trainset(const Dataset& dataset, const DataSplit& split,
                                            const AttackConfig& config) {
  config.validate(dataset.num_graph_labels());
  if (!config.trigger_class) throw ConfigError("poisoning requires a selected trigger class");

  const auto candidates = train_indices_with_label(dataset, split, config.target_label);
  const std::size_t train_size = split.train_indices.size();
  const std::size_t count = poison_count(config.poisoning_rate, train_size);
  if (count > candidates.size()) {
    const double max_p = static_cast<double>(candidates.size()) / static_cast<double>(train_size);
    throw ConfigError("poisoning rate " + std::to_string(config.poisoning_rate) + " needs " +
                      std::to_string(count) + " target-label training graphs but only " +
                      std::to_string(candidates.size()) +
                      " exist; maximum feasible rate is " + std::to_string(max_p));
  }

  Rng select_rng(derive_seed(config.seed, {kPoisonSelect}));
  std::vector<std::size_t> chosen;
  for (std::size_t k : sample_without_replacement(candidates.size(), count, select_rng)) {
    chosen.push_back(candidates[k]);
  }
  std::sort(chosen.begin(), chosen.end());

  PoisonedTrainset out;
  out.record.trigger_class = *config.trigger_class;
  out.record.trigger_size = config.trigger_size;
  out.graphs.reserve(train_size);
  for (std::size_t idx : split.train_indices) {
    const Graph& g = dataset.graphs[idx];
    if (!std::binary_search(chosen.begin(), chosen.end(), idx)) {
      out.graphs.push_back(g);
      continue;
    }
    Rng rng(derive_seed(config.seed, {kPoisonGraph, idx}));
    InjectedGraph inj = inject_trigger(g, *config.trigger_class, config.trigger_size, rng);
    out.graphs.push_back(std::move(inj.graph));
    out.record.entries.push_back({idx, std::move(inj.positions), std::move(inj.original_classes)});
  }
  std::sort(out.record.entries.begin(), out.record.entries.end(),
            [](const PoisonEntry& a, const PoisonEntry& b) { return a.dataset_index < b.dataset_index; });
  return out;
}

AttackSet build_attack_testset(const Dataset& dataset, const DataSplit& split,
                               NodeClass trigger_class, std::size_t t, GraphLabel target_label,
                               std::uint64_t seed) {
  if (split.test_indices.empty()) throw DataError("attack set: test set is empty");
  AttackSet out;
  for (std::size_t idx : split.test_indices) {
    const Graph& g = dataset.graphs.at(idx);
    if (g.label == target_label) continue;
    Rng rng(derive_seed(seed, {kAttackGraph, idx}));
    out.graphs.push_back(inject_trigger(g, trigger_class, t, rng).graph);
    out.source_indices.push_back(idx);
  }
  if (out.graphs.empty()) {
    throw DataError("attack set: every test graph already has the target label " +
                    std::to_string(target_label));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Erdős–Rényi baseline

ErPattern er_baseline_trigger(std::size_t num_nodes, double edge_prob, std::uint64_t seed) {
  if (num_nodes < 2) throw ConfigError("ER trigger needs at least 2 nodes");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) throw ConfigError("ER edge probability must lie in [0, 1]");
  ErPattern p;
  p.num_nodes = num_nodes;
  Rng rng(seed);
  for (NodeIndex i = 0; i < num_nodes; ++i) {
    for (NodeIndex j = i + 1; j < num_nodes; ++j) {
      if (uniform_unit(rng) < edge_prob) p.edges.push_back({i, j});
    }
  }
  return p;
}

std::optional<InjectedGraph> inject_er_subgraph(const Graph& graph, const ErPattern& pattern,
                                                Rng& rng) {
  if (graph.node_count < pattern.num_nodes) return std::nullopt;
  const auto picked = sample_without_replacement(graph.node_count, pattern.num_nodes, rng);
  std::vector<bool> in_pattern(graph.node_count, false);
  for (std::size_t v : picked) in_pattern[v] = true;

  InjectedGraph out;
  out.graph = graph;
  out.graph.edges.clear();
  for (const Edge& e : graph.edges) {
    if (!(in_pattern[e.first] && in_pattern[e.second])) out.graph.edges.push_back(e);
  }
  for (const Edge& e : pattern.edges) {
    out.graph.edges.push_back(
        {static_cast<NodeIndex>(picked[e.first]), static_cast<NodeIndex>(picked[e.second])});
  }
  out.graph.canonicalize_edges();
  for (std::size_t v : picked) {
    out.positions.push_back(static_cast<NodeIndex>(v));
    out.original_classes.push_back(graph.node_classes[v]);
  }
  return out;
}

ErPoisonedTrainset generate_er_poisoned_trainset(const Dataset& dataset, const DataSplit& split,
                                                 const ErPattern& pattern,
                                                 GraphLabel target_label, double poisoning_rate,
                                                 std::uint64_t seed) {
  AttackConfig check;
  check.target_label = target_label;
  check.poisoning_rate = poisoning_rate;
  check.validate(dataset.num_graph_labels());

  const auto candidates = train_indices_with_label(dataset, split, target_label);
  const std::size_t count = poison_count(poisoning_rate, split.train_indices.size());
  if (count > candidates.size()) {
    throw ConfigError("poisoning rate too large for the available target-label graphs");
  }
  Rng select_rng(derive_seed(seed, {kPoisonSelect}));
  std::vector<std::size_t> chosen;
  for (std::size_t k : sample_without_replacement(candidates.size(), count, select_rng)) {
    chosen.push_back(candidates[k]);
  }
  std::sort(chosen.begin(), chosen.end());

  ErPoisonedTrainset out;
  for (std::size_t idx : split.train_indices) {
    const Graph& g = dataset.graphs[idx];
    if (!std::binary_search(chosen.begin(), chosen.end(), idx)) {
      out.graphs.push_back(g);
      continue;
    }
    Rng rng(derive_seed(seed, {kPoisonGraph, idx}));
    if (auto inj = inject_er_subgraph(g, pattern, rng)) {
      out.graphs.push_back(std::move(inj->graph));
      out.poisoned_indices.push_back(idx);
    } else {
      out.graphs.push_back(g);
      ++out.skipped;
    }
  }
  return out;
}

AttackSet build_er_attack_testset(const Dataset& dataset, const DataSplit& split,
                                  const ErPattern& pattern, GraphLabel target_label,
                                  std::uint64_t seed) {
  if (split.test_indices.empty()) throw DataError("attack set: test set is empty");
  AttackSet out;
  for (std::size_t idx : split.test_indices) {
    const Graph& g = dataset.graphs.at(idx);
    if (g.label == target_label) continue;
    Rng rng(derive_seed(seed, {kAttackGraph, idx}));
    if (auto inj = inject_er_subgraph(g, pattern, rng)) {
      out.graphs.push_back(std::move(inj->graph));
      out.source_indices.push_back(idx);
    } else {
      ++out.skipped;
    }
  }
  if (out.graphs.empty()) throw DataError("ER attack set: no eligible nontarget test graphs");
  return out;
}

// ---------------------------------------------------------------------------

void write_trigger_report(std::ostream& out, const TriggerReport& report) {
  const auto old_precision = out.precision(17);
  out << "target_label " << report.target_label << '\n';
  out << "nontarget_graphs " << report.nontarget_graphs << '\n';
  out << "trigger_class " << report.trigger_class << '\n';
  out << "# rank class total_degree_centrality\n";
  for (std::size_t r = 0; r < report.ranking.size(); ++r) {
    const NodeClass c = report.ranking[r];
    out << r + 1 << ' ' << c << ' ' << report.totals[c] << '\n';
  }
  out.precision(old_precision);
}

void write_poison_record(std::ostream& out, const PoisonRecord& record) {
  out << "trigger_class " << record.trigger_class << '\n';
  out << "trigger_size " << record.trigger_size << '\n';
  out << "poisoned_graphs " << record.entries.size() << '\n';
  out << "# dataset_index position:original_class ...\n";
  for (const PoisonEntry& e : record.entries) {
    out << e.dataset_index;
    for (std::size_t k = 0; k < e.positions.size(); ++k) {
      out << ' ' << e.positions[k] << ':' << e.original_classes[k];
    }
    out << '\n';
  }
}

}  // namespace sclba
