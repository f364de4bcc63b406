#include <gtest/gtest.h>

#include <cmath>

#include "sclba/error.hpp"
#include "sclba/matrix.hpp"

namespace sclba {
namespace {

TEST(Matrix, IdentityTimesMatrixIsMatrix) {
  const Matrix m{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(matmul(Matrix::identity(2), m), m);
}

TEST(Matrix, MatmulHandArithmetic) {
  const Matrix a{{1, 2}, {3, 4}};
  const Matrix b{{0}, {1}};
  EXPECT_EQ(matmul(a, b), (Matrix{{2}, {4}}));
}

TEST(Matrix, MatmulShapeMismatchThrows) {
  EXPECT_THROW(matmul(Matrix(2, 3), Matrix(2, 3)), ShapeError);
  EXPECT_THROW(add(Matrix(2, 3), Matrix(3, 2)), ShapeError);
}

TEST(Matrix, TransposedProductsAgreeWithExplicitTranspose) {
  Rng rng(3);
  const Matrix a = Matrix::glorot_uniform(4, 3, rng);
  const Matrix b = Matrix::glorot_uniform(4, 5, rng);
  const Matrix c = Matrix::glorot_uniform(6, 3, rng);
  const Matrix atb = matmul_at_b(a, b);
  const Matrix ref1 = matmul(transpose(a), b);
  const Matrix abt = matmul_a_bt(a, c);
  const Matrix ref2 = matmul(a, transpose(c));
  for (std::size_t i = 0; i < atb.size(); ++i) EXPECT_NEAR(atb.data()[i], ref1.data()[i], 1e-15);
  for (std::size_t i = 0; i < abt.size(); ++i) EXPECT_NEAR(abt.data()[i], ref2.data()[i], 1e-15);
}

TEST(Matrix, Relu) {
  EXPECT_EQ(relu(Matrix{{-1, 2}}), (Matrix{{0, 2}}));
  EXPECT_EQ(relu_backward(Matrix{{-1, 2}}, Matrix{{5, 7}}), (Matrix{{0, 7}}));
}

TEST(Matrix, ConcatSliceMean) {
  const Matrix a{{1, 2}, {3, 4}};
  const Matrix b{{5}, {6}};
  const Matrix c = hconcat(a, b);
  EXPECT_EQ(c, (Matrix{{1, 2, 5}, {3, 4, 6}}));
  EXPECT_EQ(column_slice(c, 1, 3), (Matrix{{2, 5}, {4, 6}}));
  EXPECT_EQ(column_mean(c), (Matrix{{2, 3, 5.5}}));
}

TEST(Matrix, GlorotBoundsAndDeterminism) {
  Rng r1(11);
  Rng r2(11);
  const Matrix a = Matrix::glorot_uniform(10, 6, r1);
  EXPECT_EQ(a, Matrix::glorot_uniform(10, 6, r2));
  const double limit = std::sqrt(6.0 / 16.0);
  for (double v : a.data()) EXPECT_LE(std::abs(v), limit);
}

TEST(Matrix, ConstructorRejectsWrongLength) {
  EXPECT_THROW(Matrix(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
}

TEST(Loss, UniformLogits) {
  const double z[] = {0.0, 0.0};
  const auto lg = softmax_cross_entropy(z, 0);
  EXPECT_NEAR(lg.loss, std::log(2.0), 1e-15);
  EXPECT_NEAR(lg.grad_logits[0], -0.5, 1e-15);
  EXPECT_NEAR(lg.grad_logits[1], 0.5, 1e-15);
}

TEST(Loss, LargeLogitsDoNotOverflow) {
  const double z[] = {1000.0, 0.0};
  const auto lg = softmax_cross_entropy(z, 0);
  EXPECT_TRUE(std::isfinite(lg.loss));
  EXPECT_NEAR(lg.loss, 0.0, 1e-12);
  const double w[] = {0.0, 1000.0};
  EXPECT_NEAR(softmax_cross_entropy(w, 0).loss, 1000.0, 1e-9);
}

TEST(Loss, LabelOutOfRangeThrows) {
  const double z[] = {0.0, 0.0};
  EXPECT_THROW(softmax_cross_entropy(z, 2), Error);
}

TEST(Loss, GradientMatchesFiniteDifference) {
  const std::vector<double> z = {0.3, -1.2, 2.0};
  const auto lg = softmax_cross_entropy(z, 1);
  for (std::size_t k = 0; k < z.size(); ++k) {
    auto up = z;
    auto down = z;
    up[k] += 1e-6;
    down[k] -= 1e-6;
    const double fd = (softmax_cross_entropy(up, 1).loss - softmax_cross_entropy(down, 1).loss) / 2e-6;
    EXPECT_NEAR(lg.grad_logits[k], fd, 1e-8);
  }
}

TEST(Adam, ZeroGradientLeavesParameter) {
  Matrix w{{1.5, -2.0}};
  const Matrix before = w;
  AdamState st = AdamState::for_shape(w);
  adam_update(w, Matrix(1, 2), st, 0.01, 0.0);
  EXPECT_EQ(w, before);
}

TEST(Adam, FirstStepMovesAgainstSignByLearningRate) {
  Matrix w{{0.0, 0.0, 0.0}};
  AdamState st = AdamState::for_shape(w);
  adam_update(w, Matrix{{3.0, -0.2, 1e-3}}, st, 0.01, 0.0);
  EXPECT_NEAR(w(0, 0), -0.01, 1e-7);
  EXPECT_NEAR(w(0, 1), 0.01, 1e-7);
  EXPECT_NEAR(w(0, 2), -0.01, 1e-4);
  EXPECT_EQ(st.step_count, 1);
}

TEST(Adam, WeightDecayEntersTheGradient) {
  Matrix w{{2.0}};
  AdamState st = AdamState::for_shape(w);
  // grad 0 plus wd * w gives a positive effective gradient.
  adam_update(w, Matrix{{0.0}}, st, 0.01, 0.5);
  EXPECT_NEAR(w(0, 0), 2.0 - 0.01, 1e-7);
}

TEST(Adam, MinimizesSquare) {
  Matrix w{{1.0}};
  AdamState st = AdamState::for_shape(w);
  for (int i = 0; i < 100; ++i) adam_update(w, Matrix{{2.0 * w(0, 0)}}, st, 0.01, 0.0);
  EXPECT_LT(std::abs(w(0, 0)), 1.0);
}

TEST(Adam, ShapeMismatchThrows) {
  Matrix w(2, 2);
  AdamState st = AdamState::for_shape(w);
  EXPECT_THROW(adam_update(w, Matrix(2, 3), st, 0.01, 0.0), ShapeError);
}

TEST(Rng, UniformIndexStaysInRange) {
  Rng rng(5);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) ++hits[uniform_index(rng, 7)];
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, DeriveSeedSeparatesTags) {
  EXPECT_NE(derive_seed(1, {1}), derive_seed(1, {2}));
  EXPECT_NE(derive_seed(1, {1}), derive_seed(2, {1}));
  EXPECT_EQ(derive_seed(9, {4, 5}), derive_seed(9, {4, 5}));
}

}  // namespace
}  // namespace sclba
