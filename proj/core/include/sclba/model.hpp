#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sclba/graph.hpp"
#include "sclba/matrix.hpp"

namespace sclba {

enum class Architecture { kGcn, kSage };

std::string_view to_string(Architecture arch);
/// Accepts "gcn" or "sage" (case-insensitive, "graphsage" also accepted).
Architecture parse_architecture(std::string_view text);

/// Two-layer graph classifier followed by global mean pooling.
///
/// GCN:       H1 = ReLU(Â X W0), H2 = Â H1 W1
/// GraphSAGE: H1 = ReLU([X | M X] W0), H2 = [H1 | M H1] W1
///
/// where Â is the symmetric-normalized adjacency with self loops and M the
/// neighbour-mean operator. Logits are the column mean of H2. There are no
/// bias terms.
struct Model {
  Architecture arch = Architecture::kGcn;
  std::size_t feature_dim = 0;
  std::size_t hidden_channels = 32;
  std::size_t num_labels = 0;
  Matrix w_input_hidden;  // (d or 2d) x hidden
  Matrix w_hidden_out;    // (hidden or 2*hidden) x labels

  /// Glorot-uniform weights drawn from `seed`.
  static Model create(Architecture arch, std::size_t feature_dim, std::size_t num_labels,
                      std::uint64_t seed, std::size_t hidden_channels = 32);

  void validate() const;

  friend bool operator==(const Model&, const Model&) = default;
};

struct ForwardCache {
  Architecture arch = Architecture::kGcn;
  std::size_t node_count = 0;
  std::size_t feature_dim = 0;
  std::size_t hidden_channels = 0;
  std::size_t num_labels = 0;
  Matrix propagation;     // Â (GCN) or M (GraphSAGE)
  Matrix layer0_input;    // Â X (GCN) or [X | M X] (GraphSAGE)
  Matrix pre_activation;  // layer-0 output before ReLU
  Matrix layer1_input;    // Â H1 (GCN) or [H1 | M H1] (GraphSAGE)
};

struct ForwardResult {
  std::vector<double> logits;
  ForwardCache cache;
};

struct Gradients {
  Matrix w_input_hidden;
  Matrix w_hidden_out;
};

ForwardResult gcn_forward(const Model& model, const Matrix& features, const Matrix& norm_adj);
Gradients gcn_backward(const Model& model, const ForwardCache& cache,
                       std::span<const double> grad_logits);

/// `adjacency` is the raw 0/1 adjacency matrix.
ForwardResult sage_forward(const Model& model, const Matrix& features, const Matrix& adjacency);
Gradients sage_backward(const Model& model, const ForwardCache& cache,
                        std::span<const double> grad_logits);

/// A graph with its features and the architecture-specific structure matrix
/// (normalized adjacency for GCN, raw adjacency for GraphSAGE).
struct EncodedGraph {
  Matrix features;
  Matrix structure;
  GraphLabel label = 0;
};

EncodedGraph encode_graph(const Graph& graph, std::size_t vocab_size, Architecture arch);
std::vector<EncodedGraph> encode_graphs(std::span<const Graph> graphs, std::size_t vocab_size,
                                        Architecture arch);

/// Dispatches on model.arch.
ForwardResult forward(const Model& model, const EncodedGraph& graph);
Gradients backward(const Model& model, const ForwardCache& cache,
                   std::span<const double> grad_logits);

struct TrainConfig {
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainHistory {
  std::vector<double> epoch_loss;
  std::vector<double> epoch_accuracy;
};

struct TrainResult {
  Model model;
  TrainHistory history;
};

/// Minibatch Adam over graphs[indices] for exactly config.max_epochs epochs.
/// The visiting order is reshuffled every epoch from config.seed.
TrainResult train(Model model, std::span<const EncodedGraph> graphs,
                  std::span<const std::size_t> indices, const TrainConfig& config);

/// argmax of the logits; ties go to the lowest class id.
std::size_t argmax(std::span<const double> logits);
std::size_t predict(const Model& model, const EncodedGraph& graph);
double accuracy(const Model& model, std::span<const EncodedGraph> graphs,
                std::span<const std::size_t> indices);
double accuracy(const Model& model, std::span<const EncodedGraph> graphs);

/// Text checkpoint: header, architecture, dimensions, then each weight matrix
/// row by row in shortest round-trip decimal form.
void save_checkpoint(std::ostream& out, const Model& model);
Model load_checkpoint(std::istream& in);

}  // namespace sclba
