#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace sclba::testing {

namespace fs = std::filesystem;

fs::path data_dir() { return SCLBA_TEST_DATA_DIR; }

TempDir::TempDir(const std::string& tag) {
  static int counter = 0;
  path_ = fs::temp_directory_path() /
          ("sclba_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_text(const fs::path& file, const std::string& text) {
  fs::create_directories(file.parent_path());
  std::ofstream out(file);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + file.string());
}

void write_toy_tudataset(const fs::path& dir) {
  write_text(dir / "TOY_A.txt", "1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n4, 5\n5, 4\n");
  write_text(dir / "TOY_graph_indicator.txt", "1\n1\n1\n2\n2\n");
  write_text(dir / "TOY_graph_labels.txt", "0\n1\n");
  write_text(dir / "TOY_node_labels.txt", "0\n1\n1\n2\n2\n");
}

Graph random_graph(Rng& rng, std::size_t min_nodes, std::size_t max_nodes, std::size_t vocab,
                   double edge_prob) {
  Graph g;
  g.node_count = min_nodes + uniform_index(rng, max_nodes - min_nodes + 1);
  for (std::size_t i = 0; i < g.node_count; ++i) {
    g.node_classes.push_back(static_cast<NodeClass>(uniform_index(rng, vocab)));
  }
  for (NodeIndex i = 0; i < g.node_count; ++i) {
    for (NodeIndex j = i + 1; j < g.node_count; ++j) {
      if (uniform_unit(rng) < edge_prob) g.edges.push_back({i, j});
    }
  }
  return g;
}

std::vector<double> oracle_degree_centrality(const Graph& graph) {
  std::vector<double> dc(graph.node_count, 0.0);
  if (graph.node_count < 2) return dc;
  for (std::size_t i = 0; i < graph.node_count; ++i) {
    int deg = 0;
    for (const Edge& e : graph.edges) {
      if (e.first == i || e.second == i) ++deg;
    }
    dc[i] = deg / static_cast<double>(graph.node_count - 1);
  }
  return dc;
}

std::vector<std::vector<double>> oracle_normalized_adjacency(const Graph& graph) {
  const std::size_t n = graph.node_count;
  using Dense = std::vector<std::vector<double>>;
  Dense a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) a[i][i] = 1.0;
  for (const Edge& e : graph.edges) {
    a[e.first][e.second] = 1.0;
    a[e.second][e.first] = 1.0;
  }
  Dense d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += a[i][j];
    d[i][i] = 1.0 / std::sqrt(s);
  }
  auto mul = [n](const Dense& x, const Dense& y) {
    Dense z(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) z[i][j] += x[i][k] * y[k][j];
    return z;
  };
  return mul(mul(d, a), d);
}

std::vector<double> oracle_class_totals(const std::vector<Graph>& graphs,
                                        const std::vector<std::size_t>& ids, GraphLabel target,
                                        std::size_t vocab) {
  std::vector<double> totals(vocab, 0.0);
  for (std::size_t c = 0; c < vocab; ++c) {
    for (std::size_t id : ids) {
      const Graph& g = graphs[id];
      if (g.label == target) continue;
      const auto dc = oracle_degree_centrality(g);
      for (std::size_t i = 0; i < g.node_count; ++i) {
        if (g.node_classes[i] == c) totals[c] += dc[i];
      }
    }
  }
  return totals;
}

namespace {

std::vector<long long> read_column(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::vector<long long> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    values.push_back(std::stoll(line));
  }
  return values;
}

}  // namespace

RawTotals oracle_raw_class_totals(const fs::path& dir, const std::string& name,
                                  const std::vector<std::size_t>& graph_ids, long long raw_target) {
  const auto indicator = read_column(dir / (name + "_graph_indicator.txt"));
  const auto node_labels = read_column(dir / (name + "_node_labels.txt"));
  const auto graph_labels = read_column(dir / (name + "_graph_labels.txt"));

  std::vector<std::set<long long>> nbrs(indicator.size() + 1);
  {
    std::ifstream in(dir / (name + "_A.txt"));
    std::string line;
    while (std::getline(in, line)) {
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ss(line);
      long long u = 0;
      long long v = 0;
      if (!(ss >> u >> v) || u == v) continue;
      nbrs[u].insert(v);
      nbrs[v].insert(u);
    }
  }
  std::map<long long, std::vector<long long>> nodes_of;  // graph id -> 1-based node ids
  for (std::size_t i = 0; i < indicator.size(); ++i) nodes_of[indicator[i]].push_back(static_cast<long long>(i + 1));

  RawTotals out;
  std::set<long long> classes(node_labels.begin(), node_labels.end());
  out.raw_classes.assign(classes.begin(), classes.end());
  out.totals.assign(out.raw_classes.size(), 0.0);
  out.present.assign(out.raw_classes.size(), false);
  for (std::size_t c = 0; c < out.raw_classes.size(); ++c) {
    for (std::size_t gid : graph_ids) {
      if (graph_labels[gid - 1] == raw_target) continue;
      const auto& nodes = nodes_of[static_cast<long long>(gid)];
      const double denom = static_cast<double>(nodes.size()) - 1.0;
      for (long long v : nodes) {
        if (node_labels[v - 1] != out.raw_classes[c]) continue;
        out.present[c] = true;
        if (nodes.size() > 1) out.totals[c] += static_cast<double>(nbrs[v].size()) / denom;
      }
    }
  }
  return out;
}

double gradient_relative_error(const Model& model, const EncodedGraph& graph, double h) {
  const auto loss_of = [&](const Model& m) {
    return softmax_cross_entropy(forward(m, graph).logits, graph.label).loss;
  };
  const ForwardResult fr = forward(model, graph);
  const LossAndGrad lg = softmax_cross_entropy(fr.logits, graph.label);
  const Gradients grads = backward(model, fr.cache, lg.grad_logits);

  double worst = 0.0;
  for (int which = 0; which < 2; ++which) {
    const Matrix& analytic = which == 0 ? grads.w_input_hidden : grads.w_hidden_out;
    Model probe = model;
    Matrix& w = which == 0 ? probe.w_input_hidden : probe.w_hidden_out;
    double diff2 = 0.0;
    double a2 = 0.0;
    double n2 = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double saved = w.data()[k];
      w.data()[k] = saved + h;
      const double up = loss_of(probe);
      w.data()[k] = saved - h;
      const double down = loss_of(probe);
      w.data()[k] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic.data()[k];
      diff2 += (a - numeric) * (a - numeric);
      a2 += a * a;
      n2 += numeric * numeric;
    }
    const double scale = std::max({std::sqrt(a2), std::sqrt(n2), 1e-12});
    worst = std::max(worst, std::sqrt(diff2) / scale);
  }
  return worst;
}

GradCase random_grad_case(Architecture arch, std::uint64_t seed, std::size_t min_nodes,
                          std::size_t max_nodes) {
  Rng rng(seed);
  constexpr std::size_t kVocab = 5;
  constexpr std::size_t kLabels = 3;
  Graph g = random_graph(rng, min_nodes, max_nodes, kVocab, 0.4);
  g.label = static_cast<GraphLabel>(uniform_index(rng, kLabels));
  GradCase c{Model::create(arch, kVocab, kLabels, seed * 31 + 7), encode_graph(g, kVocab, arch)};
  return c;
}

}  // namespace sclba::testing
