#include "textaug/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <stdexcept>

#include "textaug/quality.hpp"
#include "textaug/text.hpp"

namespace textaug::kernels {

void CsrMatrix::append_row(std::span<const std::uint32_t> cols_in_row, std::span<const double> vals) {
  if (cols_in_row.size() != vals.size()) throw std::invalid_argument("CsrMatrix::append_row: size mismatch");
  col_idx.insert(col_idx.end(), cols_in_row.begin(), cols_in_row.end());
  values.insert(values.end(), vals.begin(), vals.end());
  row_ptr.push_back(values.size());
  ++rows;
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

void check_shapes(const CsrMatrix& x, const LabelMatrix& y, std::span<const double> weights,
                  std::span<const double> bias) {
  if (y.rows != x.rows) throw std::invalid_argument("logistic kernel: feature and target rows differ");
  if (weights.size() != y.cols * x.cols || bias.size() != y.cols)
    throw std::invalid_argument("logistic kernel: parameter shape mismatch");
}

void prepare(LossGradient& out, std::size_t labels, std::size_t features) {
  out.loss.assign(labels, 0.0);
  out.grad_w.assign(labels * features, 0.0);
  out.grad_b.assign(labels, 0.0);
}

// One label's loss and gradient; the row loop order is fixed.
void label_loss_gradient(const CsrMatrix& x, const LabelMatrix& y, std::span<const double> weights,
                         std::span<const double> bias, double l2_lambda, std::size_t l, LossGradient& out) {
  const std::size_t V = x.cols;
  const double* w = weights.data() + l * V;
  double* gw = out.grad_w.data() + l * V;
  double loss = 0.0, gb = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    double z = bias[l];
    for (std::size_t k = x.row_ptr[i]; k < x.row_ptr[i + 1]; ++k) z += w[x.col_idx[k]] * x.values[k];
    const bool positive = y.at(i, l) != 0;
    loss += positive ? softplus(-z) : softplus(z);
    const double r = sigmoid(z) - (positive ? 1.0 : 0.0);
    for (std::size_t k = x.row_ptr[i]; k < x.row_ptr[i + 1]; ++k) gw[x.col_idx[k]] += r * x.values[k];
    gb += r;
  }
  const double inv_n = x.rows ? 1.0 / static_cast<double>(x.rows) : 0.0;
  double norm2 = 0.0;
  for (std::size_t j = 0; j < V; ++j) {
    gw[j] = gw[j] * inv_n + l2_lambda * w[j];
    norm2 += w[j] * w[j];
  }
  out.loss[l] = loss * inv_n + 0.5 * l2_lambda * norm2;
  out.grad_b[l] = gb * inv_n;
}

void row_scores(const CsrMatrix& x, std::size_t labels, std::span<const double> weights, std::span<const double> bias,
                std::size_t i, double* out) {
  for (std::size_t l = 0; l < labels; ++l) {
    const double* w = weights.data() + l * x.cols;
    double z = bias[l];
    for (std::size_t k = x.row_ptr[i]; k < x.row_ptr[i + 1]; ++k) z += w[x.col_idx[k]] * x.values[k];
    out[l] = sigmoid(z);
  }
}

LexicalScore score_one(const SentencePairView& p) {
  LexicalScore s;
  s.words_ref = text::tokenize(*p.reference).size();
  s.words_gen = text::tokenize(*p.generated).size();
  s.jaccard = quality::jaccard_dissimilarity(*p.reference, *p.generated);
  const auto er = quality::entropy_ratio(*p.reference, *p.generated);
  s.entropy_ratio = er.value;
  s.entropy_guarded = er.guarded;
  return s;
}

}  // namespace

namespace serial {

void logistic_loss_gradient(const CsrMatrix& x, const LabelMatrix& y, std::span<const double> weights,
                            std::span<const double> bias, double l2_lambda, LossGradient& out) {
  check_shapes(x, y, weights, bias);
  prepare(out, y.cols, x.cols);
  for (std::size_t l = 0; l < y.cols; ++l) label_loss_gradient(x, y, weights, bias, l2_lambda, l, out);
}

std::vector<double> logistic_scores(const CsrMatrix& x, std::size_t labels, std::span<const double> weights,
                                    std::span<const double> bias) {
  std::vector<double> out(x.rows * labels);
  for (std::size_t i = 0; i < x.rows; ++i) row_scores(x, labels, weights, bias, i, out.data() + i * labels);
  return out;
}

std::vector<LexicalScore> score_pairs(std::span<const SentencePairView> pairs) {
  std::vector<LexicalScore> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) out[i] = score_one(pairs[i]);
  return out;
}

}  // namespace serial

namespace parallel {

void logistic_loss_gradient(const CsrMatrix& x, const LabelMatrix& y, std::span<const double> weights,
                            std::span<const double> bias, double l2_lambda, LossGradient& out) {
  check_shapes(x, y, weights, bias);
  prepare(out, y.cols, x.cols);
  const auto labels = static_cast<std::ptrdiff_t>(y.cols);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t l = 0; l < labels; ++l)
    label_loss_gradient(x, y, weights, bias, l2_lambda, static_cast<std::size_t>(l), out);
}

std::vector<double> logistic_scores(const CsrMatrix& x, std::size_t labels, std::span<const double> weights,
                                    std::span<const double> bias) {
  std::vector<double> out(x.rows * labels);
  const auto rows = static_cast<std::ptrdiff_t>(x.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i)
    row_scores(x, labels, weights, bias, static_cast<std::size_t>(i), out.data() + static_cast<std::size_t>(i) * labels);
  return out;
}

std::vector<LexicalScore> score_pairs(std::span<const SentencePairView> pairs) {
  std::vector<LexicalScore> out(pairs.size());
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = score_one(pairs[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace parallel

}  // namespace textaug::kernels
