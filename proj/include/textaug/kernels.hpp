#pragma once

// Data-parallel inner loops. Every kernel exists twice: `serial` is the
// reference used by the tests, `parallel` is the OpenMP version used in
// production. Both produce bit-identical output because parallel work is
// split along independent axes (labels, rows, pairs) and every reduction
// runs in a fixed order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace textaug::kernels {

/// Compressed sparse row matrix of doubles.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col_idx;
  std::vector<double> values;

  void append_row(std::span<const std::uint32_t> cols_in_row, std::span<const double> vals);
  std::size_t nnz() const noexcept { return values.size(); }
};

/// Dense row-major binary matrix (rows = samples, cols = labels).
struct LabelMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> data;

  LabelMatrix() = default;
  LabelMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}
  std::uint8_t at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::uint8_t& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  bool operator==(const LabelMatrix&) const = default;
};

/// Per-label logistic loss and gradient for one-vs-rest training.
///
/// For label l: loss_l = mean_i BCE(y_il, sigmoid(w_l . x_i + b_l)) + (lambda/2)|w_l|^2,
/// grad_w_l = mean_i (p_il - y_il) x_i + lambda w_l, grad_b_l = mean_i (p_il - y_il).
struct LossGradient {
  std::vector<double> loss;    // L
  std::vector<double> grad_w;  // L x V, row-major
  std::vector<double> grad_b;  // L
};

/// Numerically stable log(1 + exp(x)).
double softplus(double x);
double sigmoid(double x);

struct SentencePairView {
  const std::string* reference;
  const std::string* generated;
};

/// Lexical metrics of one (reference, generated) pair.
struct LexicalScore {
  std::size_t words_ref = 0;
  std::size_t words_gen = 0;
  double jaccard = 0.0;
  double entropy_ratio = 0.0;
  bool entropy_guarded = false;
};

namespace serial {
void logistic_loss_gradient(const CsrMatrix& x, const LabelMatrix& y, std::span<const double> weights,
                            std::span<const double> bias, double l2_lambda, LossGradient& out);
/// Probabilities, N x L row-major.
std::vector<double> logistic_scores(const CsrMatrix& x, std::size_t labels, std::span<const double> weights,
                                    std::span<const double> bias);
std::vector<LexicalScore> score_pairs(std::span<const SentencePairView> pairs);
}  // namespace serial

namespace parallel {
void logistic_loss_gradient(const CsrMatrix& x, const LabelMatrix& y, std::span<const double> weights,
                            std::span<const double> bias, double l2_lambda, LossGradient& out);
std::vector<double> logistic_scores(const CsrMatrix& x, std::size_t labels, std::span<const double> weights,
                                    std::span<const double> bias);
std::vector<LexicalScore> score_pairs(std::span<const SentencePairView> pairs);
}  // namespace parallel

}  // namespace textaug::kernels
