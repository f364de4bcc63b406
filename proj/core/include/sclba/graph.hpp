#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sclba/matrix.hpp"

namespace sclba {

using NodeIndex = std::uint32_t;
using NodeClass = std::uint32_t;
using GraphLabel = std::uint32_t;

/// Undirected edge stored canonically with first < second.
struct Edge {
  NodeIndex first = 0;
  NodeIndex second = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// One attributed graph sample. Edges are canonical (first < second), sorted,
/// unique and free of self-loops; node classes index the dataset vocabulary.
struct Graph {
  std::size_t node_count = 0;
  std::vector<Edge> edges;
  std::vector<NodeClass> node_classes;
  GraphLabel label = 0;
  std::size_t source_id = 0;  // 1-indexed id in the original files

  /// Sorts, de-duplicates and orients the edge list; drops self-loops.
  /// Returns the number of self-loops removed.
  std::size_t canonicalize_edges();

  /// Throws DataError if any structural invariant is violated.
  void validate(std::size_t vocab_size) const;

  std::vector<std::size_t> degrees() const;
  /// Raw 0/1 adjacency matrix.
  Matrix adjacency() const;

  friend bool operator==(const Graph&, const Graph&) = default;
};

struct Dataset {
  std::string name;
  std::vector<Graph> graphs;
  /// raw_graph_labels[i] is the value in the source files that maps to label i.
  std::vector<long long> raw_graph_labels;
  /// raw_node_labels[c] is the value in the source files that maps to class c.
  std::vector<long long> raw_node_labels;
  std::size_t dropped_self_loops = 0;

  std::size_t num_graph_labels() const { return raw_graph_labels.size(); }
  std::size_t node_class_vocab_size() const { return raw_node_labels.size(); }
  std::vector<std::size_t> label_histogram() const;

  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct DataSplit {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;

  friend bool operator==(const DataSplit&, const DataSplit&) = default;
};

/// Reads a TUDataset directory. The dataset name is taken from the prefix of
/// the `*_A.txt` file unless given explicitly.
Dataset parse_tudataset(const std::filesystem::path& directory,
                        const std::string& name = {});

/// Seeded uniform permutation then prefix split; |train| = round(fraction * n).
DataSplit split_dataset(const Dataset& dataset, double train_fraction, std::uint64_t seed);

/// node_count x vocab_size one-hot encoding of the node classes.
Matrix one_hot_features(const Graph& graph, std::size_t vocab_size);

/// D^-1/2 (A + I) D^-1/2 with D the row sums of A + I.
Matrix normalized_adjacency(const Graph& graph);

/// Mean-over-neighbours operator: row i holds 1/deg(i) at each neighbour
/// column, or zeros for an isolated node.
Matrix neighbor_mean_operator(const Graph& graph);

/// Line-oriented canonical dump; the format is described in README.md.
void write_canonical(std::ostream& out, const Dataset& dataset);
Dataset read_canonical(std::istream& in);

/// Writes a dataset back out as TUDataset text files under `directory`,
/// using the stored raw label values.
void write_tudataset(const std::filesystem::path& directory, const Dataset& dataset);

}  // namespace sclba
