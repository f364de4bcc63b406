#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "sclba/rng.hpp"

namespace sclba {

/// Dense row-major matrix of doubles.
///
/// All free functions below return fresh matrices and reject non-finite
/// results with NumericalError, so a Matrix reachable from library code is
/// always finite.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  /// Glorot/Xavier uniform initialization: U(-a, a), a = sqrt(6 / (rows + cols)).
  static Matrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const noexcept;
  std::string shape_string() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
/// transpose(a) * b
Matrix matmul_at_b(const Matrix& a, const Matrix& b);
/// a * transpose(b)
Matrix matmul_a_bt(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);
Matrix add(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& m, double factor);

/// [a | b], row counts must agree.
Matrix hconcat(const Matrix& a, const Matrix& b);
/// Columns [begin, end).
Matrix column_slice(const Matrix& m, std::size_t begin, std::size_t end);
/// 1 x cols matrix holding the mean of every column.
Matrix column_mean(const Matrix& m);

Matrix relu(const Matrix& m);
/// upstream masked where input <= 0.
Matrix relu_backward(const Matrix& input, const Matrix& upstream);

/// Row-vector softmax with max subtraction.
std::vector<double> softmax(std::span<const double> logits);

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad_logits;
};

/// loss = -log softmax(logits)[label]; grad = softmax(logits) - onehot(label).
LossAndGrad softmax_cross_entropy(std::span<const double> logits, std::size_t label);

/// Adam moments for a single parameter matrix.
struct AdamState {
  Matrix first_moment;
  Matrix second_moment;
  long step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_shape(const Matrix& param);
};

/// One Adam step with bias correction. Weight decay is added to the gradient
/// as an L2 term (grad + weight_decay * param) before the moment updates.
void adam_update(Matrix& param, const Matrix& grad, AdamState& state,
                 double learning_rate, double weight_decay);

}  // namespace sclba
