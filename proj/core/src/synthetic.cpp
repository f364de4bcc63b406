#include "sclba/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "sclba/error.hpp"
#include "sclba/rng.hpp"

namespace sclba {

Dataset make_synthetic_dataset(const SyntheticSpec& spec) {
  if (spec.num_graphs == 0 || spec.min_nodes == 0 || spec.max_nodes < spec.min_nodes ||
      spec.num_classes < 3) {
    throw ConfigError("synthetic spec: need graphs, 1 <= min_nodes <= max_nodes, >= 3 classes");
  }
  Rng rng(spec.seed);

  // Class c has weight 2^-c, so high class ids are rare.
  std::vector<double> cumulative(spec.num_classes);
  double total = 0.0;
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    total += std::ldexp(1.0, -static_cast<int>(c));
    cumulative[c] = total;
  }

  Dataset ds;
  ds.name = spec.name;
  ds.raw_graph_labels = {0, 1};
  for (std::size_t c = 0; c < spec.num_classes; ++c) ds.raw_node_labels.push_back(static_cast<long long>(c));

  ds.graphs.reserve(spec.num_graphs);
  for (std::size_t gi = 0; gi < spec.num_graphs; ++gi) {
    Graph g;
    g.source_id = gi + 1;
    g.node_count = spec.min_nodes + uniform_index(rng, spec.max_nodes - spec.min_nodes + 1);
    for (std::size_t n = 0; n < g.node_count; ++n) {
      const double u = uniform_unit(rng) * total;
      const auto c = static_cast<NodeClass>(
          std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      g.node_classes.push_back(std::min<NodeClass>(c, static_cast<NodeClass>(spec.num_classes - 1)));
    }
    for (NodeIndex v = 1; v < g.node_count; ++v) {
      g.edges.push_back({static_cast<NodeIndex>(uniform_index(rng, v)), v});
    }
    const auto extra = static_cast<std::size_t>(spec.extra_edge_ratio * static_cast<double>(g.node_count));
    for (std::size_t k = 0; k < extra && g.node_count > 1; ++k) {
      g.edges.push_back({static_cast<NodeIndex>(uniform_index(rng, g.node_count)),
                         static_cast<NodeIndex>(uniform_index(rng, g.node_count))});
    }
    g.canonicalize_edges();
    const auto ones = std::count(g.node_classes.begin(), g.node_classes.end(), 1u);
    const auto twos = std::count(g.node_classes.begin(), g.node_classes.end(), 2u);
    g.label = 2 * ones > 3 * twos ? 1 : 0;
    ds.graphs.push_back(std::move(g));
  }
  // Vocabulary is every class that actually occurs, as a parser would see it.
  std::vector<bool> used(spec.num_classes, false);
  for (const Graph& g : ds.graphs)
    for (NodeClass c : g.node_classes) used[c] = true;
  std::vector<NodeClass> remap(spec.num_classes, 0);
  std::vector<long long> raw;
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    if (!used[c]) continue;
    remap[c] = static_cast<NodeClass>(raw.size());
    raw.push_back(static_cast<long long>(c));
  }
  ds.raw_node_labels = std::move(raw);
  for (Graph& g : ds.graphs)
    for (NodeClass& c : g.node_classes) c = remap[c];
  ds.validate();
  return ds;
}

}  // namespace sclba
