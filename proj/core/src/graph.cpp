#include "sclba/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "sclba/error.hpp"
#include "sclba/rng.hpp"

namespace sclba {

namespace fs = std::filesystem;

std::size_t Graph::canonicalize_edges() {
  std::size_t self_loops = 0;
  std::vector<Edge> kept;
  kept.reserve(edges.size());
  for (Edge e : edges) {
    if (e.first == e.second) {
      ++self_loops;
      continue;
    }
    if (e.first > e.second) std::swap(e.first, e.second);
    kept.push_back(e);
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  edges = std::move(kept);
  return self_loops;
}

void Graph::validate(std::size_t vocab_size) const {
  const std::string where = "graph " + std::to_string(source_id);
  if (node_count == 0) throw DataError(where + ": graph has no nodes");
  if (node_classes.size() != node_count) {
    throw DataError(where + ": " + std::to_string(node_classes.size()) +
                    " node classes for " + std::to_string(node_count) + " nodes");
  }
  for (NodeClass c : node_classes) {
    if (c >= vocab_size) {
      throw DataError(where + ": node class " + std::to_string(c) +
                      " outside vocabulary of size " + std::to_string(vocab_size));
    }
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (e.second >= node_count) {
      throw DataError(where + ": edge endpoint " + std::to_string(e.second) +
                      " >= node count " + std::to_string(node_count));
    }
    if (e.first >= e.second) throw DataError(where + ": edge is not canonical");
    if (i > 0 && !(edges[i - 1] < e)) throw DataError(where + ": edges unsorted or duplicated");
  }
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> deg(node_count, 0);
  for (const Edge& e : edges) {
    ++deg[e.first];
    ++deg[e.second];
  }
  return deg;
}

Matrix Graph::adjacency() const {
  Matrix a(node_count, node_count);
  for (const Edge& e : edges) {
    a(e.first, e.second) = 1.0;
    a(e.second, e.first) = 1.0;
  }
  return a;
}

std::vector<std::size_t> Dataset::label_histogram() const {
  std::vector<std::size_t> hist(num_graph_labels(), 0);
  for (const Graph& g : graphs) {
    if (g.label >= hist.size()) {
      throw DataError("graph " + std::to_string(g.source_id) + ": label " +
                      std::to_string(g.label) + " outside label range");
    }
    ++hist[g.label];
  }
  return hist;
}

void Dataset::validate() const {
  for (const Graph& g : graphs) {
    g.validate(node_class_vocab_size());
    if (g.label >= num_graph_labels()) {
      throw DataError("graph " + std::to_string(g.source_id) + ": label out of range");
    }
  }
}

// ---------------------------------------------------------------------------
// TUDataset parsing

namespace {

class LineReader {
 public:
  explicit LineReader(const fs::path& path) : path_(path), in_(path) {
    if (!in_) throw DataError("cannot open " + path.string());
  }

  // Returns false at end of file; blank lines are skipped.
  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_number_;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  }

  std::size_t line_number() const { return line_number_; }
  const fs::path& path() const { return path_; }

  [[noreturn]] void fail(const std::string& message) const {
    throw DataError(path_.filename().string() + ":" + std::to_string(line_number_) +
                    ": " + message);
  }

 private:
  fs::path path_;
  std::ifstream in_;
  std::size_t line_number_ = 0;
};

// Parses integers separated by commas and/or whitespace.
std::vector<long long> parse_ints(const std::string& line, const LineReader& reader) {
  std::vector<long long> values;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == ',' || *p == '\r')) ++p;
    if (p == end) break;
    long long v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc{}) {
      // Some corpora store labels as "1.0".
      double d = 0.0;
      auto [dnext, dec] = std::from_chars(p, end, d);
      if (dec != std::errc{} || d != std::floor(d)) reader.fail("expected integer in '" + line + "'");
      v = static_cast<long long>(d);
      next = dnext;
    }
    values.push_back(v);
    p = next;
  }
  return values;
}

long long parse_single(const std::string& line, const LineReader& reader) {
  auto values = parse_ints(line, reader);
  if (values.size() != 1) reader.fail("expected one integer, got '" + line + "'");
  return values[0];
}

fs::path find_file(const fs::path& directory, const std::string& name, const char* suffix) {
  fs::path p = directory / (name + suffix);
  if (!fs::exists(p)) throw DataError("missing file " + p.string());
  return p;
}

std::string infer_name(const fs::path& directory) {
  if (!fs::is_directory(directory)) {
    throw DataError("dataset directory " + directory.string() + " does not exist");
  }
  for (const auto& entry : fs::directory_iterator(directory)) {
    const std::string fname = entry.path().filename().string();
    const std::string suffix = "_A.txt";
    if (fname.size() > suffix.size() &&
        fname.compare(fname.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return fname.substr(0, fname.size() - suffix.size());
    }
  }
  throw DataError("missing file <DS>_A.txt in " + directory.string());
}

// Maps sorted distinct raw values to 0..k-1.
std::vector<long long> sorted_distinct(std::vector<long long> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

std::uint32_t index_of(const std::vector<long long>& sorted, long long raw) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), raw);
  return static_cast<std::uint32_t>(it - sorted.begin());
}

}  // namespace

Dataset parse_tudataset(const fs::path& directory, const std::string& name_hint) {
  const std::string name = name_hint.empty() ? infer_name(directory) : name_hint;
  const fs::path a_path = find_file(directory, name, "_A.txt");
  const fs::path indicator_path = find_file(directory, name, "_graph_indicator.txt");
  const fs::path labels_path = find_file(directory, name, "_graph_labels.txt");
  const fs::path node_labels_path = find_file(directory, name, "_node_labels.txt");

  Dataset ds;
  ds.name = name;
  std::string line;

  // Graph labels first: they fix the number of graphs.
  std::vector<long long> raw_labels;
  {
    LineReader reader(labels_path);
    while (reader.next(line)) raw_labels.push_back(parse_single(line, reader));
  }
  if (raw_labels.empty()) throw DataError(labels_path.filename().string() + ": no graphs");
  ds.raw_graph_labels = sorted_distinct(raw_labels);
  ds.graphs.resize(raw_labels.size());
  for (std::size_t g = 0; g < raw_labels.size(); ++g) {
    ds.graphs[g].label = index_of(ds.raw_graph_labels, raw_labels[g]);
    ds.graphs[g].source_id = g + 1;
  }

  // Global node id (1-indexed) -> (graph, local index).
  std::vector<std::uint32_t> node_graph;
  std::vector<NodeIndex> node_local;
  {
    LineReader reader(indicator_path);
    while (reader.next(line)) {
      const long long gid = parse_single(line, reader);
      if (gid < 1 || static_cast<std::size_t>(gid) > ds.graphs.size()) {
        reader.fail("graph id " + std::to_string(gid) + " not in 1.." +
                    std::to_string(ds.graphs.size()));
      }
      Graph& g = ds.graphs[static_cast<std::size_t>(gid - 1)];
      node_graph.push_back(static_cast<std::uint32_t>(gid - 1));
      node_local.push_back(static_cast<NodeIndex>(g.node_count));
      ++g.node_count;
    }
  }

  {
    std::vector<long long> raw_node_labels;
    raw_node_labels.reserve(node_graph.size());
    LineReader reader(node_labels_path);
    while (reader.next(line)) {
      auto values = parse_ints(line, reader);
      if (values.empty()) reader.fail("empty node label");
      raw_node_labels.push_back(values[0]);  // extra columns are ignored
    }
    if (raw_node_labels.size() != node_graph.size()) {
      throw DataError(node_labels_path.filename().string() + ": " +
                      std::to_string(raw_node_labels.size()) + " node labels but " +
                      indicator_path.filename().string() + " lists " +
                      std::to_string(node_graph.size()) + " nodes");
    }
    ds.raw_node_labels = sorted_distinct(raw_node_labels);
    for (Graph& g : ds.graphs) g.node_classes.reserve(g.node_count);
    for (std::size_t n = 0; n < raw_node_labels.size(); ++n) {
      ds.graphs[node_graph[n]].node_classes.push_back(
          index_of(ds.raw_node_labels, raw_node_labels[n]));
    }
  }

  {
    LineReader reader(a_path);
    const auto node_total = static_cast<long long>(node_graph.size());
    while (reader.next(line)) {
      auto values = parse_ints(line, reader);
      if (values.size() != 2) reader.fail("expected 'i, j' edge, got '" + line + "'");
      for (long long v : values) {
        if (v < 1 || v > node_total) {
          reader.fail("edge references unknown node id " + std::to_string(v));
        }
      }
      const auto u = static_cast<std::size_t>(values[0] - 1);
      const auto v = static_cast<std::size_t>(values[1] - 1);
      if (node_graph[u] != node_graph[v]) {
        reader.fail("edge connects nodes of different graphs");
      }
      ds.graphs[node_graph[u]].edges.push_back({node_local[u], node_local[v]});
    }
  }

  for (Graph& g : ds.graphs) ds.dropped_self_loops += g.canonicalize_edges();
  ds.validate();
  return ds;
}

DataSplit split_dataset(const Dataset& dataset, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1)");
  }
  const std::size_t n = dataset.graphs.size();
  if (n == 0) throw DataError("cannot split an empty dataset");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(std::span<std::size_t>(perm), rng);

  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  DataSplit split;
  split.seed = seed;
  split.train_fraction = train_fraction;
  split.train_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  return split;
}

Matrix one_hot_features(const Graph& graph, std::size_t vocab_size) {
  Matrix x(graph.node_count, vocab_size);
  for (std::size_t i = 0; i < graph.node_count; ++i) {
    const NodeClass c = graph.node_classes[i];
    if (c >= vocab_size) {
      throw DataError("one_hot_features: class " + std::to_string(c) +
                      " outside vocabulary of size " + std::to_string(vocab_size));
    }
    x(i, c) = 1.0;
  }
  return x;
}

Matrix normalized_adjacency(const Graph& graph) {
  const std::size_t n = graph.node_count;
  const auto deg = graph.degrees();
  // 1 / sqrt(d_i d_j) rounds once, so regular graphs get exact entries.
  const auto entry = [&](std::size_t i, std::size_t j) {
    return 1.0 / std::sqrt(static_cast<double>(deg[i] + 1) * static_cast<double>(deg[j] + 1));
  };
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0 / static_cast<double>(deg[i] + 1);
  for (const Edge& e : graph.edges) {
    const double w = entry(e.first, e.second);
    out(e.first, e.second) = w;
    out(e.second, e.first) = w;
  }
  return out;
}

Matrix neighbor_mean_operator(const Graph& graph) {
  const std::size_t n = graph.node_count;
  const auto deg = graph.degrees();
  Matrix out(n, n);
  for (const Edge& e : graph.edges) {
    out(e.first, e.second) = 1.0 / static_cast<double>(deg[e.first]);
    out(e.second, e.first) = 1.0 / static_cast<double>(deg[e.second]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonical dump
//
//   sclba-dataset 1
//   name <name>
//   graph_labels <k> <raw_0> ... <raw_k-1>
//   node_classes <d> <raw_0> ... <raw_d-1>
//   dropped_self_loops <count>
//   graphs <count>
//   g <source_id> <label> <node_count> <edge_count>
//   c <class_0> ... <class_n-1>
//   e <u_0> <v_0> <u_1> <v_1> ...
//   end

namespace {

template <typename T>
void write_list(std::ostream& out, const char* tag, const std::vector<T>& values, bool with_count) {
  out << tag;
  if (with_count) out << ' ' << values.size();
  for (const auto& v : values) out << ' ' << v;
  out << '\n';
}

class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  std::istringstream line(const std::string& expected_tag) {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_number_;
      if (text.empty()) continue;
      std::istringstream ss(text);
      std::string tag;
      ss >> tag;
      if (tag != expected_tag) fail("expected '" + expected_tag + "', got '" + tag + "'");
      return ss;
    }
    fail("unexpected end of input, expected '" + expected_tag + "'");
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw DataError("canonical dataset line " + std::to_string(line_number_) + ": " + message);
  }

 private:
  std::istream& in_;
  std::size_t line_number_ = 0;
};

template <typename T>
T read_value(std::istringstream& ss, const TokenReader& reader) {
  T v{};
  if (!(ss >> v)) reader.fail("malformed value");
  return v;
}

}  // namespace

void write_canonical(std::ostream& out, const Dataset& dataset) {
  out << "sclba-dataset 1\n";
  out << "name " << dataset.name << '\n';
  write_list(out, "graph_labels", dataset.raw_graph_labels, true);
  write_list(out, "node_classes", dataset.raw_node_labels, true);
  out << "dropped_self_loops " << dataset.dropped_self_loops << '\n';
  out << "graphs " << dataset.graphs.size() << '\n';
  for (const Graph& g : dataset.graphs) {
    out << "g " << g.source_id << ' ' << g.label << ' ' << g.node_count << ' '
        << g.edges.size() << '\n';
    write_list(out, "c", g.node_classes, false);
    out << 'e';
    for (const Edge& e : g.edges) out << ' ' << e.first << ' ' << e.second;
    out << '\n';
  }
  out << "end\n";
}

Dataset read_canonical(std::istream& in) {
  TokenReader reader(in);
  Dataset ds;
  {
    auto ss = reader.line("sclba-dataset");
    if (read_value<int>(ss, reader) != 1) reader.fail("unsupported version");
  }
  {
    auto ss = reader.line("name");
    std::getline(ss >> std::ws, ds.name);
  }
  for (auto [tag, target] : {std::pair{"graph_labels", &ds.raw_graph_labels},
                             std::pair{"node_classes", &ds.raw_node_labels}}) {
    auto ss = reader.line(tag);
    const auto count = read_value<std::size_t>(ss, reader);
    target->resize(count);
    for (auto& v : *target) v = read_value<long long>(ss, reader);
  }
  {
    auto ss = reader.line("dropped_self_loops");
    ds.dropped_self_loops = read_value<std::size_t>(ss, reader);
  }
  std::size_t count = 0;
  {
    auto ss = reader.line("graphs");
    count = read_value<std::size_t>(ss, reader);
  }
  ds.graphs.resize(count);
  for (Graph& g : ds.graphs) {
    std::size_t edge_count = 0;
    {
      auto ss = reader.line("g");
      g.source_id = read_value<std::size_t>(ss, reader);
      g.label = read_value<GraphLabel>(ss, reader);
      g.node_count = read_value<std::size_t>(ss, reader);
      edge_count = read_value<std::size_t>(ss, reader);
    }
    {
      auto ss = reader.line("c");
      g.node_classes.resize(g.node_count);
      for (auto& c : g.node_classes) c = read_value<NodeClass>(ss, reader);
    }
    {
      auto ss = reader.line("e");
      g.edges.resize(edge_count);
      for (Edge& e : g.edges) {
        e.first = read_value<NodeIndex>(ss, reader);
        e.second = read_value<NodeIndex>(ss, reader);
      }
    }
  }
  reader.line("end");
  ds.validate();
  return ds;
}

void write_tudataset(const fs::path& directory, const Dataset& dataset) {
  fs::create_directories(directory);
  const std::string prefix = (directory / dataset.name).string();
  std::ofstream a(prefix + "_A.txt");
  std::ofstream indicator(prefix + "_graph_indicator.txt");
  std::ofstream labels(prefix + "_graph_labels.txt");
  std::ofstream node_labels(prefix + "_node_labels.txt");
  if (!a || !indicator || !labels || !node_labels) {
    throw DataError("cannot write TUDataset files under " + directory.string());
  }
  std::size_t offset = 1;
  for (std::size_t gi = 0; gi < dataset.graphs.size(); ++gi) {
    const Graph& g = dataset.graphs[gi];
    labels << dataset.raw_graph_labels.at(g.label) << '\n';
    for (std::size_t n = 0; n < g.node_count; ++n) {
      indicator << gi + 1 << '\n';
      node_labels << dataset.raw_node_labels.at(g.node_classes[n]) << '\n';
    }
    for (const Edge& e : g.edges) {
      a << offset + e.first << ", " << offset + e.second << '\n';
      a << offset + e.second << ", " << offset + e.first << '\n';
    }
    offset += g.node_count;
  }
}

}  // namespace sclba
