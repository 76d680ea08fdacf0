#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "textaug/kernels.hpp"
#include "textaug/rng.hpp"

using namespace textaug;
using namespace textaug::kernels;

namespace {

struct Problem {
  CsrMatrix x;
  LabelMatrix y;
  std::vector<double> w, b;
};

Problem random_problem(std::uint64_t seed, std::size_t n, std::size_t v, std::size_t l, std::size_t nnz) {
  Rng rng(seed);
  Problem p;
  p.x.cols = v;
  for (std::size_t i = 0; i < n; ++i) {
    auto cols = rng.sample_indices(v, nnz);
    std::sort(cols.begin(), cols.end());
    std::vector<std::uint32_t> c(cols.begin(), cols.end());
    std::vector<double> vals(nnz);
    for (auto& x : vals) x = rng.unit();
    p.x.append_row(c, vals);
  }
  p.y = LabelMatrix(n, l);
  for (auto& y : p.y.data) y = rng.unit() < 0.3;
  p.w.resize(l * v);
  for (auto& x : p.w) x = rng.unit() - 0.5;
  p.b.resize(l);
  for (auto& x : p.b) x = rng.unit() - 0.5;
  return p;
}

}  // namespace

TEST(Kernels, SigmoidAndSoftplusAreStable) {
  EXPECT_DOUBLE_EQ(sigmoid(0), 0.5);
  EXPECT_DOUBLE_EQ(sigmoid(1000), 1.0);
  EXPECT_DOUBLE_EQ(sigmoid(-1000), 0.0);
  EXPECT_NEAR(softplus(0), std::log(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(softplus(1000), 1000.0);
  EXPECT_TRUE(std::isfinite(softplus(-1000)));
  for (double x : {-30.0, -3.0, -0.1, 0.2, 4.0, 25.0}) EXPECT_NEAR(softplus(x), std::log1p(std::exp(x)), 1e-12);
}

TEST(Kernels, CsrAppendRow) {
  CsrMatrix m;
  m.cols = 5;
  const std::vector<std::uint32_t> c = {1, 3};
  const std::vector<double> v = {0.5, 2.0};
  m.append_row(c, v);
  m.append_row({}, {});
  EXPECT_EQ(m.rows, 2u);
  EXPECT_EQ(m.row_ptr, (std::vector<std::size_t>{0, 2, 2}));
  EXPECT_EQ(m.nnz(), 2u);
}

TEST(Kernels, LossGradientParallelMatchesSerialBitForBit) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto p = random_problem(seed, 300, 200, 7, 12);
    LossGradient s, q;
    serial::logistic_loss_gradient(p.x, p.y, p.w, p.b, 1e-3, s);
    parallel::logistic_loss_gradient(p.x, p.y, p.w, p.b, 1e-3, q);
    EXPECT_EQ(s.loss, q.loss);
    EXPECT_EQ(s.grad_w, q.grad_w);
    EXPECT_EQ(s.grad_b, q.grad_b);
  }
}

TEST(Kernels, ScoresParallelMatchesSerialBitForBit) {
  auto p = random_problem(4, 500, 150, 9, 10);
  const auto s = serial::logistic_scores(p.x, 9, p.w, p.b);
  const auto q = parallel::logistic_scores(p.x, 9, p.w, p.b);
  EXPECT_EQ(s, q);
  ASSERT_EQ(s.size(), 500u * 9u);
  for (double v : s) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Kernels, LossMatchesDirectFormula) {
  auto p = random_problem(5, 20, 10, 2, 4);
  const double lambda = 0.1;
  LossGradient out;
  serial::logistic_loss_gradient(p.x, p.y, p.w, p.b, lambda, out);
  for (std::size_t l = 0; l < 2; ++l) {
    double loss = 0;
    for (std::size_t i = 0; i < 20; ++i) {
      double z = p.b[l];
      for (std::size_t k = p.x.row_ptr[i]; k < p.x.row_ptr[i + 1]; ++k) z += p.w[l * 10 + p.x.col_idx[k]] * p.x.values[k];
      const double prob = 1 / (1 + std::exp(-z));
      loss -= p.y.at(i, l) ? std::log(prob) : std::log(1 - prob);
    }
    loss /= 20;
    double reg = 0;
    for (std::size_t j = 0; j < 10; ++j) reg += p.w[l * 10 + j] * p.w[l * 10 + j];
    EXPECT_NEAR(out.loss[l], loss + lambda / 2 * reg, 1e-12);
  }
}

TEST(Kernels, ScorePairsParallelMatchesSerial) {
  Rng rng(6);
  static const char* vocab[] = {"alpha", "beta", "gamma", "delta", "eps", "zeta"};
  std::vector<std::string> refs, gens;
  for (int i = 0; i < 300; ++i) {
    std::string a, b;
    for (std::size_t k = 0, n = 1 + rng.below(8); k < n; ++k) a += std::string(vocab[rng.below(6)]) + " ";
    for (std::size_t k = 0, n = rng.below(8); k < n; ++k) b += std::string(vocab[rng.below(6)]) + " ";
    refs.push_back(a);
    gens.push_back(b);
  }
  std::vector<SentencePairView> views;
  for (std::size_t i = 0; i < refs.size(); ++i) views.push_back({&refs[i], &gens[i]});
  const auto s = serial::score_pairs(views);
  const auto q = parallel::score_pairs(views);
  ASSERT_EQ(s.size(), q.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(s[i].words_ref, q[i].words_ref);
    EXPECT_EQ(s[i].words_gen, q[i].words_gen);
    EXPECT_EQ(s[i].jaccard, q[i].jaccard);
    EXPECT_EQ(s[i].entropy_ratio, q[i].entropy_ratio);
    EXPECT_EQ(s[i].entropy_guarded, q[i].entropy_guarded);
  }
}
