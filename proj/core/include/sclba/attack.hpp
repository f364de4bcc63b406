#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sclba/graph.hpp"
#include "sclba/rng.hpp"

namespace sclba {

/// Degree centrality d_i / (n - 1). A single-node graph scores 0.
std::vector<double> degree_centrality(const Graph& graph);

/// Per-class importance over the nontarget-label training graphs.
struct TriggerReport {
  GraphLabel target_label = 0;
  std::size_t nontarget_graphs = 0;
  /// totals[c] = sum of degree centrality over all nodes of class c.
  std::vector<double> totals;
  /// present[c] is true when class c occurs in at least one nontarget graph.
  std::vector<bool> present;
  /// Present classes sorted by ascending total, ties by class id.
  std::vector<NodeClass> ranking;
  NodeClass trigger_class = 0;
};

/// Picks the node class with the smallest aggregated degree centrality among
/// the training graphs whose label differs from `target_label`. Only classes
/// that occur in those graphs are candidates.
TriggerReport select_semantic_trigger(const Dataset& dataset, const DataSplit& split,
                                      GraphLabel target_label);

struct InjectedGraph {
  Graph graph;
  std::vector<NodeIndex> positions;
  std::vector<NodeClass> original_classes;
};

/// Replaces the class of min(t, n) distinct uniformly chosen nodes with
/// `trigger_class`. Edges, node count and label are untouched.
InjectedGraph inject_trigger(const Graph& graph, NodeClass trigger_class, std::size_t t, Rng& rng);

struct AttackConfig {
  GraphLabel target_label = 0;
  double poisoning_rate = 0.03;
  std::size_t trigger_size = 1;
  std::optional<NodeClass> trigger_class;  // filled by trigger selection
  std::uint64_t seed = 0;

  void validate(std::size_t num_graph_labels) const;
};

struct PoisonEntry {
  std::size_t dataset_index = 0;
  std::vector<NodeIndex> positions;
  std::vector<NodeClass> original_classes;

  friend bool operator==(const PoisonEntry&, const PoisonEntry&) = default;
};

struct PoisonRecord {
  NodeClass trigger_class = 0;
  std::size_t trigger_size = 0;
  std::vector<PoisonEntry> entries;

  friend bool operator==(const PoisonRecord&, const PoisonRecord&) = default;
};

/// Training graphs in split.train_indices order, poisoned where recorded.
struct PoisonedTrainset {
  std::vector<Graph> graphs;
  PoisonRecord record;
};

/// round(p * |train|)
std::size_t poison_count(double poisoning_rate, std::size_t train_size);

/// Clean-label poisoning: round(p * |train|) target-label training graphs are
/// chosen uniformly and receive the trigger. Requires config.trigger_class.
PoisonedTrainset generate_poisoned_trainset(const Dataset& dataset, const DataSplit& split,
                                            const AttackConfig& config);

struct AttackSet {
  std::vector<Graph> graphs;
  std::vector<std::size_t> source_indices;  // dataset indices of the originals
  std::size_t skipped = 0;                  // ER baseline: graphs smaller than the pattern
};

/// Every test graph whose label differs from `target_label`, with the trigger
/// injected. Per-graph random streams come from (seed, dataset index).
AttackSet build_attack_testset(const Dataset& dataset, const DataSplit& split,
                               NodeClass trigger_class, std::size_t t, GraphLabel target_label,
                               std::uint64_t seed);

// --- Erdős–Rényi subgraph baseline ---------------------------------------

struct ErPattern {
  std::size_t num_nodes = 0;
  std::vector<Edge> edges;  // canonical, over 0..num_nodes-1
};

/// G(n, p) pattern; each of the n(n-1)/2 pairs is kept with probability p.
ErPattern er_baseline_trigger(std::size_t num_nodes, double edge_prob, std::uint64_t seed);

/// Picks pattern.num_nodes distinct nodes uniformly, drops the edges among
/// them and adds the pattern edges. Returns nullopt when the graph is smaller
/// than the pattern.
std::optional<InjectedGraph> inject_er_subgraph(const Graph& graph, const ErPattern& pattern,
                                                Rng& rng);

struct ErPoisonedTrainset {
  std::vector<Graph> graphs;
  std::vector<std::size_t> poisoned_indices;
  std::size_t skipped = 0;
};

ErPoisonedTrainset generate_er_poisoned_trainset(const Dataset& dataset, const DataSplit& split,
                                                 const ErPattern& pattern,
                                                 GraphLabel target_label, double poisoning_rate,
                                                 std::uint64_t seed);

AttackSet build_er_attack_testset(const Dataset& dataset, const DataSplit& split,
                                  const ErPattern& pattern, GraphLabel target_label,
                                  std::uint64_t seed);

// --- Audit output --------------------------------------------------------

void write_trigger_report(std::ostream& out, const TriggerReport& report);
void write_poison_record(std::ostream& out, const PoisonRecord& record);

}  // namespace sclba
