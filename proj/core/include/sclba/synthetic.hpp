#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "sclba/graph.hpp"

namespace sclba {

/// Random molecule-like corpus: each graph is a random spanning tree plus a
/// few extra edges, node classes follow a skewed (geometric) distribution,
/// and the label is 1 when class 1 outnumbers class 2 in the graph.
struct SyntheticSpec {
  std::string name = "SYNTH";
  std::size_t num_graphs = 100;
  std::size_t min_nodes = 4;
  std::size_t max_nodes = 20;
  std::size_t num_classes = 8;
  /// Extra edges per graph as a fraction of its node count.
  double extra_edge_ratio = 0.1;
  std::uint64_t seed = 1;
};

Dataset make_synthetic_dataset(const SyntheticSpec& spec);

}  // namespace sclba
