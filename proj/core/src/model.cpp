#include "sclba/model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sclba/error.hpp"
#include "sclba/rng.hpp"

namespace sclba {

std::string_view to_string(Architecture arch) {
  return arch == Architecture::kGcn ? "gcn" : "sage";
}

Architecture parse_architecture(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "gcn") return Architecture::kGcn;
  if (lower == "sage" || lower == "graphsage") return Architecture::kSage;
  throw ConfigError("unknown model '" + std::string(text) + "' (expected gcn or sage)");
}

namespace {

std::size_t input_rows(Architecture arch, std::size_t dim) {
  return arch == Architecture::kGcn ? dim : 2 * dim;
}

}  // namespace

Model Model::create(Architecture arch, std::size_t feature_dim, std::size_t num_labels,
                    std::uint64_t seed, std::size_t hidden_channels) {
  if (feature_dim == 0 || num_labels == 0 || hidden_channels == 0) {
    throw ConfigError("model dimensions must be positive");
  }
  Model m;
  m.arch = arch;
  m.feature_dim = feature_dim;
  m.hidden_channels = hidden_channels;
  m.num_labels = num_labels;
  Rng rng(seed);
  m.w_input_hidden = Matrix::glorot_uniform(input_rows(arch, feature_dim), hidden_channels, rng);
  m.w_hidden_out = Matrix::glorot_uniform(input_rows(arch, hidden_channels), num_labels, rng);
  return m;
}

void Model::validate() const {
  if (w_input_hidden.rows() != input_rows(arch, feature_dim) ||
      w_input_hidden.cols() != hidden_channels ||
      w_hidden_out.rows() != input_rows(arch, hidden_channels) ||
      w_hidden_out.cols() != num_labels) {
    throw ShapeError("model weights " + w_input_hidden.shape_string() + ", " +
                     w_hidden_out.shape_string() + " inconsistent with d=" +
                     std::to_string(feature_dim) + " hidden=" + std::to_string(hidden_channels) +
                     " labels=" + std::to_string(num_labels));
  }
  if (!w_input_hidden.all_finite() || !w_hidden_out.all_finite()) {
    throw NumericalError("model weights contain non-finite values");
  }
}

// ---------------------------------------------------------------------------
// Forward / backward

namespace {

void check_inputs(const Model& model, Architecture expected, const Matrix& features,
                  const Matrix& structure) {
  if (model.arch != expected) {
    throw ShapeError(std::string("model architecture is ") + std::string(to_string(model.arch)));
  }
  if (features.rows() == 0) throw ShapeError("graph has no nodes");
  if (features.cols() != model.feature_dim) {
    throw ShapeError("features " + features.shape_string() + " do not match feature dim " +
                     std::to_string(model.feature_dim));
  }
  if (structure.rows() != features.rows() || structure.cols() != features.rows()) {
    throw ShapeError("structure matrix " + structure.shape_string() + " does not match " +
                     std::to_string(features.rows()) + " nodes");
  }
}

void check_cache(const Model& model, Architecture expected, const ForwardCache& cache,
                 std::span<const double> grad_logits) {
  const std::size_t n = cache.node_count;
  const bool consistent =
      cache.arch == expected && model.arch == expected &&
      cache.feature_dim == model.feature_dim && cache.hidden_channels == model.hidden_channels &&
      cache.num_labels == model.num_labels && n > 0 && cache.propagation.rows() == n &&
      cache.layer0_input.rows() == n &&
      cache.layer0_input.cols() == model.w_input_hidden.rows() &&
      cache.pre_activation.rows() == n && cache.pre_activation.cols() == model.hidden_channels &&
      cache.layer1_input.rows() == n && cache.layer1_input.cols() == model.w_hidden_out.rows();
  if (!consistent) throw ShapeError("stale or mismatched forward cache");
  if (grad_logits.size() != model.num_labels) {
    throw ShapeError("grad_logits has " + std::to_string(grad_logits.size()) +
                     " entries, expected " + std::to_string(model.num_labels));
  }
}

// Upstream gradient of the layer-1 output: every row is grad_logits / N.
Matrix pooled_upstream(std::size_t node_count, std::span<const double> grad_logits) {
  Matrix d(node_count, grad_logits.size());
  const double inv = 1.0 / static_cast<double>(node_count);
  for (std::size_t i = 0; i < node_count; ++i)
    for (std::size_t j = 0; j < grad_logits.size(); ++j) d(i, j) = grad_logits[j] * inv;
  return d;
}

std::vector<double> row_vector(const Matrix& m) {
  return {m.data().begin(), m.data().end()};
}

}  // namespace

ForwardResult gcn_forward(const Model& model, const Matrix& features, const Matrix& norm_adj) {
  check_inputs(model, Architecture::kGcn, features, norm_adj);
  ForwardResult out;
  ForwardCache& c = out.cache;
  c.arch = Architecture::kGcn;
  c.node_count = features.rows();
  c.feature_dim = model.feature_dim;
  c.hidden_channels = model.hidden_channels;
  c.num_labels = model.num_labels;
  c.propagation = norm_adj;
  c.layer0_input = matmul(norm_adj, features);
  c.pre_activation = matmul(c.layer0_input, model.w_input_hidden);
  c.layer1_input = matmul(norm_adj, relu(c.pre_activation));
  out.logits = row_vector(column_mean(matmul(c.layer1_input, model.w_hidden_out)));
  return out;
}

Gradients gcn_backward(const Model& model, const ForwardCache& cache,
                       std::span<const double> grad_logits) {
  check_cache(model, Architecture::kGcn, cache, grad_logits);
  const Matrix d_out = pooled_upstream(cache.node_count, grad_logits);
  Gradients g;
  g.w_hidden_out = matmul_at_b(cache.layer1_input, d_out);
  // Â is symmetric, so Âᵀ · dAH1 = Â · dAH1.
  const Matrix d_hidden = matmul(cache.propagation, matmul_a_bt(d_out, model.w_hidden_out));
  g.w_input_hidden = matmul_at_b(cache.layer0_input, relu_backward(cache.pre_activation, d_hidden));
  return g;
}

ForwardResult sage_forward(const Model& model, const Matrix& features, const Matrix& adjacency) {
  check_inputs(model, Architecture::kSage, features, adjacency);
  const std::size_t n = features.rows();
  Matrix mean_op(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (double v : adjacency.row(i)) deg += v;
    if (deg == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) mean_op(i, j) = adjacency(i, j) / deg;
  }

  ForwardResult out;
  ForwardCache& c = out.cache;
  c.arch = Architecture::kSage;
  c.node_count = n;
  c.feature_dim = model.feature_dim;
  c.hidden_channels = model.hidden_channels;
  c.num_labels = model.num_labels;
  c.layer0_input = hconcat(features, matmul(mean_op, features));
  c.pre_activation = matmul(c.layer0_input, model.w_input_hidden);
  const Matrix hidden = relu(c.pre_activation);
  c.layer1_input = hconcat(hidden, matmul(mean_op, hidden));
  c.propagation = std::move(mean_op);
  out.logits = row_vector(column_mean(matmul(c.layer1_input, model.w_hidden_out)));
  return out;
}

Gradients sage_backward(const Model& model, const ForwardCache& cache,
                        std::span<const double> grad_logits) {
  check_cache(model, Architecture::kSage, cache, grad_logits);
  const std::size_t h = model.hidden_channels;
  const Matrix d_out = pooled_upstream(cache.node_count, grad_logits);
  Gradients g;
  g.w_hidden_out = matmul_at_b(cache.layer1_input, d_out);
  const Matrix d_concat = matmul_a_bt(d_out, model.w_hidden_out);
  const Matrix d_hidden = add(column_slice(d_concat, 0, h),
                              matmul_at_b(cache.propagation, column_slice(d_concat, h, 2 * h)));
  g.w_input_hidden = matmul_at_b(cache.layer0_input, relu_backward(cache.pre_activation, d_hidden));
  return g;
}

EncodedGraph encode_graph(const Graph& graph, std::size_t vocab_size, Architecture arch) {
  EncodedGraph e;
  e.features = one_hot_features(graph, vocab_size);
  e.structure = arch == Architecture::kGcn ? normalized_adjacency(graph) : graph.adjacency();
  e.label = graph.label;
  return e;
}

std::vector<EncodedGraph> encode_graphs(std::span<const Graph> graphs, std::size_t vocab_size,
                                        Architecture arch) {
  std::vector<EncodedGraph> out;
  out.reserve(graphs.size());
  for (const Graph& g : graphs) out.push_back(encode_graph(g, vocab_size, arch));
  return out;
}

ForwardResult forward(const Model& model, const EncodedGraph& graph) {
  return model.arch == Architecture::kGcn ? gcn_forward(model, graph.features, graph.structure)
                                          : sage_forward(model, graph.features, graph.structure);
}

Gradients backward(const Model& model, const ForwardCache& cache,
                   std::span<const double> grad_logits) {
  return model.arch == Architecture::kGcn ? gcn_backward(model, cache, grad_logits)
                                          : sage_backward(model, cache, grad_logits);
}

// ---------------------------------------------------------------------------
// Training

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !(weight_decay >= 0.0) || batch_size == 0 || max_epochs == 0) {
    throw ConfigError("training config: learning rate, batch size and epochs must be positive, "
                      "weight decay non-negative");
  }
}

TrainResult train(Model model, std::span<const EncodedGraph> graphs,
                  std::span<const std::size_t> indices, const TrainConfig& config) {
  config.validate();
  model.validate();
  if (indices.empty()) throw ConfigError("train: no training graphs");
  for (std::size_t i : indices) {
    if (i >= graphs.size()) throw ConfigError("train: index out of range");
    if (graphs[i].label >= model.num_labels) throw DataError("train: label outside model range");
  }

  AdamState state_in = AdamState::for_shape(model.w_input_hidden);
  AdamState state_out = AdamState::for_shape(model.w_hidden_out);
  std::vector<std::size_t> order(indices.begin(), indices.end());
  Rng rng(config.seed);

  TrainResult result;
  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    double epoch_loss = 0.0;
    std::size_t correct = 0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(start + config.batch_size, order.size());
      const double inv_batch = 1.0 / static_cast<double>(end - start);
      Matrix grad_in(model.w_input_hidden.rows(), model.w_input_hidden.cols());
      Matrix grad_out(model.w_hidden_out.rows(), model.w_hidden_out.cols());
      double batch_loss = 0.0;
      try {
        for (std::size_t k = start; k < end; ++k) {
          const EncodedGraph& g = graphs[order[k]];
          ForwardResult fwd = forward(model, g);
          if (argmax(fwd.logits) == g.label) ++correct;
          LossAndGrad lg = softmax_cross_entropy(fwd.logits, g.label);
          batch_loss += lg.loss;
          Gradients grads = backward(model, fwd.cache, lg.grad_logits);
          grad_in = add(grad_in, grads.w_input_hidden);
          grad_out = add(grad_out, grads.w_hidden_out);
        }
        if (!std::isfinite(batch_loss)) throw NumericalError("non-finite loss");
        adam_update(model.w_input_hidden, scale(grad_in, inv_batch), state_in,
                    config.learning_rate, config.weight_decay);
        adam_update(model.w_hidden_out, scale(grad_out, inv_batch), state_out,
                    config.learning_rate, config.weight_decay);
      } catch (const NumericalError& e) {
        throw NumericalError("training diverged at epoch " + std::to_string(epoch + 1) +
                             ", batch " + std::to_string(batch_index + 1) + ": " + e.what());
      }
      epoch_loss += batch_loss;
    }
    const double n = static_cast<double>(order.size());
    result.history.epoch_loss.push_back(epoch_loss / n);
    result.history.epoch_accuracy.push_back(static_cast<double>(correct) / n);
  }
  result.model = std::move(model);
  return result;
}

std::size_t argmax(std::span<const double> logits) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

std::size_t predict(const Model& model, const EncodedGraph& graph) {
  return argmax(forward(model, graph).logits);
}

double accuracy(const Model& model, std::span<const EncodedGraph> graphs,
                std::span<const std::size_t> indices) {
  if (indices.empty()) throw ConfigError("accuracy: empty evaluation set");
  std::size_t correct = 0;
  for (std::size_t i : indices) {
    if (predict(model, graphs[i]) == graphs[i].label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

double accuracy(const Model& model, std::span<const EncodedGraph> graphs) {
  std::vector<std::size_t> all(graphs.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return accuracy(model, graphs, all);
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

void write_matrix(std::ostream& out, const char* name, const Matrix& m) {
  out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  std::array<char, 32> buf{};
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), m(r, c));
      if (c > 0) out << ' ';
      out.write(buf.data(), end - buf.data());
    }
    out << '\n';
  }
}

Matrix read_matrix(std::istream& in, const std::string& expected_name) {
  std::string tag;
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  if (!(in >> tag >> name >> rows >> cols) || tag != "matrix" || name != expected_name) {
    throw DataError("checkpoint: expected matrix " + expected_name);
  }
  std::vector<double> values(rows * cols);
  std::string token;
  for (double& v : values) {
    if (!(in >> token)) throw DataError("checkpoint: truncated matrix " + expected_name);
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      throw DataError("checkpoint: bad number '" + token + "'");
    }
  }
  return Matrix(rows, cols, std::move(values));
}

}  // namespace

void save_checkpoint(std::ostream& out, const Model& model) {
  out << "sclba-model 1\n";
  out << "arch " << to_string(model.arch) << '\n';
  out << "dims " << model.feature_dim << ' ' << model.hidden_channels << ' ' << model.num_labels
      << '\n';
  write_matrix(out, "w_input_hidden", model.w_input_hidden);
  write_matrix(out, "w_hidden_out", model.w_hidden_out);
}

Model load_checkpoint(std::istream& in) {
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "sclba-model" || version != 1) {
    throw DataError("checkpoint: bad header");
  }
  Model m;
  std::string arch;
  if (!(in >> tag >> arch) || tag != "arch") throw DataError("checkpoint: missing arch");
  m.arch = parse_architecture(arch);
  if (!(in >> tag >> m.feature_dim >> m.hidden_channels >> m.num_labels) || tag != "dims") {
    throw DataError("checkpoint: missing dims");
  }
  m.w_input_hidden = read_matrix(in, "w_input_hidden");
  m.w_hidden_out = read_matrix(in, "w_hidden_out");
  m.validate();
  return m;
}

}  // namespace sclba
