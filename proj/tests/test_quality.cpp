#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "textaug/error.hpp"
#include "textaug/providers/mock.hpp"
#include "textaug/quality.hpp"
#include "textaug/rng.hpp"

using namespace textaug;
using namespace textaug::quality;
using providers::TokenVector;

namespace {

// Oracles work on whitespace-split lowercase words so the inputs below
// avoid punctuation.
std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double jaccard_oracle(const std::string& a, const std::string& b) {
  const auto wa = words(a), wb = words(b);
  std::set<std::string> sa(wa.begin(), wa.end()), sb(wb.begin(), wb.end());
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& w : sa) inter += sb.count(w);
  const double uni = static_cast<double>(sa.size() + sb.size() - inter);
  return 1.0 - inter / uni;
}

double entropy_oracle(const std::string& s) {
  const auto w = words(s);
  std::map<std::string, int> counts;
  for (const auto& x : w) ++counts[x];
  double h = 0;
  for (const auto& [_, c] : counts) {
    const double p = static_cast<double>(c) / w.size();
    h -= p * std::log2(p);
  }
  return h;
}

double ttr_oracle(const std::vector<std::string>& texts) {
  std::set<std::string> types;
  std::size_t total = 0;
  for (const auto& t : texts) {
    for (const auto& w : words(t)) {
      types.insert(w);
      ++total;
    }
  }
  return static_cast<double>(types.size()) / total;
}

double cosine_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    na += static_cast<long double>(a[i]) * a[i];
    nb += static_cast<long double>(b[i]) * b[i];
  }
  const long double da = std::max<long double>(std::sqrt(na), kCosineEpsilon);
  const long double db = std::max<long double>(std::sqrt(nb), kCosineEpsilon);
  return static_cast<double>(std::clamp<long double>(dot / (da * db), -1, 1));
}

double bertscore_oracle(const std::vector<TokenVector>& ref, const std::vector<TokenVector>& gen) {
  auto best = [](const TokenVector& t, const std::vector<TokenVector>& others) {
    double m = -2;
    for (const auto& o : others) m = std::max(m, cosine_oracle(t.vector, o.vector));
    return m;
  };
  double r = 0, p = 0;
  for (const auto& t : ref) r += best(t, gen);
  for (const auto& t : gen) p += best(t, ref);
  r /= ref.size();
  p /= gen.size();
  if (r + p <= 0) return 0.0;
  return std::max(0.0, 2 * p * r / (p + r));
}

std::string random_sentence(Rng& rng, std::size_t min_words = 0) {
  static const char* vocab[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
  const std::size_t n = min_words + rng.below(7);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += vocab[rng.below(8)];
  }
  return s;
}

std::vector<double> random_vector(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (auto& x : v) x = rng.unit() * 2 - 1;
  return v;
}

std::vector<TokenVector> random_tokens(Rng& rng, std::size_t n, std::size_t dim) {
  std::vector<TokenVector> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {"t" + std::to_string(i), random_vector(rng, dim)};
  return out;
}

class ThrowingEmbedder final : public providers::Embedder {
 public:
  std::vector<providers::EmbeddingResult> embed(std::span<const std::string>, bool) override {
    throw ProviderUnavailableError("sidecar down");
  }
  std::string endpoint() const override { return "down"; }
};

std::vector<SentencePair> make_pairs(std::size_t n, Rng& rng) {
  std::vector<SentencePair> pairs;
  for (std::size_t i = 0; i < n; ++i) pairs.push_back({random_sentence(rng, 2), random_sentence(rng, 2), i});
  return pairs;
}

}  // namespace

TEST(Jaccard, HandExamples) {
  EXPECT_DOUBLE_EQ(jaccard_dissimilarity("a b c", "a b d"), 0.5);
  EXPECT_DOUBLE_EQ(jaccard_dissimilarity("the cat", "The cat!"), 0.0);
  EXPECT_DOUBLE_EQ(jaccard_dissimilarity("x y", "z w"), 1.0);
  EXPECT_DOUBLE_EQ(jaccard_dissimilarity("", ""), 0.0);
  EXPECT_DOUBLE_EQ(jaccard_dissimilarity("a", ""), 1.0);
}

TEST(Jaccard, MatchesOracleAndIsSymmetric) {
  Rng rng(101);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_sentence(rng), b = random_sentence(rng);
    const double j = jaccard_dissimilarity(a, b);
    EXPECT_NEAR(j, jaccard_oracle(a, b), 1e-12) << a << " | " << b;
    EXPECT_DOUBLE_EQ(j, jaccard_dissimilarity(b, a));
    EXPECT_GE(j, 0.0);
    EXPECT_LE(j, 1.0);
    EXPECT_DOUBLE_EQ(jaccard_dissimilarity(a, a), 0.0);
  }
}

TEST(Entropy, HandExamples) {
  EXPECT_DOUBLE_EQ(entropy("a b c d"), 2.0);
  EXPECT_DOUBLE_EQ(entropy("a a a"), 0.0);
  EXPECT_FALSE(std::signbit(entropy("a a a")));
  EXPECT_DOUBLE_EQ(entropy("a b"), 1.0);
  EXPECT_DOUBLE_EQ(entropy(""), 0.0);
}

TEST(Entropy, MatchesOracleAndIsBounded) {
  Rng rng(102);
  for (int i = 0; i < 200; ++i) {
    const auto s = random_sentence(rng, 1);
    const double h = entropy(s);
    EXPECT_NEAR(h, entropy_oracle(s), 1e-12) << s;
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log2(static_cast<double>(words(s).size())) + 1e-12);
  }
}

TEST(EntropyRatio, Definition) {
  EXPECT_DOUBLE_EQ(entropy_ratio("a b", "a b c d").value, 2.0);
  EXPECT_DOUBLE_EQ(entropy_ratio("a b c d", "a b").value, 0.5);
  const auto zero = entropy_ratio("a a", "b b");
  EXPECT_DOUBLE_EQ(zero.value, 1.0);
  EXPECT_FALSE(zero.guarded);
  const auto guarded = entropy_ratio("a", "a b");
  EXPECT_TRUE(guarded.guarded);
  EXPECT_DOUBLE_EQ(guarded.value, 1.0 / kEntropyEpsilon);
  Rng rng(103);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_sentence(rng, 2), b = random_sentence(rng, 2);
    const double ha = entropy_oracle(a), hb = entropy_oracle(b);
    if (ha == 0) continue;
    EXPECT_NEAR(entropy_ratio(a, b).value, hb / ha, 1e-12);
  }
}

TEST(Ttr, HandExamplesAndOracle) {
  const std::vector<std::string> texts = {"a a b"};
  EXPECT_NEAR(ttr(texts), 0.6667, 1e-4);
  const std::vector<std::string> empty = {"", "  "};
  EXPECT_THROW(ttr(empty), UndefinedMetricError);
  Rng rng(104);
  for (int i = 0; i < 100; ++i) {
    std::vector<std::string> set = {random_sentence(rng, 1), random_sentence(rng, 1), random_sentence(rng, 1)};
    const double t = ttr(set);
    EXPECT_NEAR(t, ttr_oracle(set), 1e-12);
    EXPECT_GT(t, 0.0);
    EXPECT_LE(t, 1.0);
  }
  const std::vector<std::string> gen = {"a b c d"}, ref = {"a a b b"};
  EXPECT_DOUBLE_EQ(ttr_ratio(gen, ref), 2.0);
}

TEST(Cosine, HandExamplesAndOracle) {
  const std::vector<double> x = {1, 0}, y = {1, 1}, z = {0, 0};
  EXPECT_NEAR(cosine_similarity(x, y), 0.7071, 1e-4);
  EXPECT_DOUBLE_EQ(cosine_similarity(x, z), 0.0);
  const std::vector<double> three = {1, 2, 3};
  EXPECT_THROW(cosine_similarity(x, three), ArgumentError);
  Rng rng(105);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_vector(rng, 16), b = random_vector(rng, 16);
    const double c = cosine_similarity(a, b);
    EXPECT_NEAR(c, cosine_oracle(a, b), 1e-12);
    EXPECT_DOUBLE_EQ(c, cosine_similarity(b, a));
    EXPECT_DOUBLE_EQ(cosine_similarity(a, a), 1.0);
    std::vector<double> neg(a);
    for (auto& v : neg) v = -v;
    EXPECT_DOUBLE_EQ(cosine_similarity(a, neg), -1.0);
  }
}

TEST(BertScore, HandExample) {
  const std::vector<TokenVector> ref = {{"a", {1, 0}}, {"b", {0, 1}}};
  const std::vector<TokenVector> gen = {{"a", {1, 0}}};
  // recall = (1 + 0) / 2, precision = 1, F1 = 2/3.
  EXPECT_NEAR(bertscore_f1(ref, gen), 2.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(bertscore_f1(ref, ref), 1.0);
  EXPECT_THROW(bertscore_f1(ref, {}), UndefinedMetricError);
  const std::vector<TokenVector> wrong_dim = {{"a", {1, 0, 0}}};
  EXPECT_THROW(bertscore_f1(ref, wrong_dim), ArgumentError);
}

TEST(BertScore, MatchesOracleOnRandomInputs) {
  Rng rng(106);
  for (int i = 0; i < 150; ++i) {
    const auto ref = random_tokens(rng, 1 + rng.below(6), 8);
    const auto gen = random_tokens(rng, 1 + rng.below(6), 8);
    const double f = bertscore_f1(ref, gen);
    EXPECT_NEAR(f, bertscore_oracle(ref, gen), 1e-12);
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
    EXPECT_DOUBLE_EQ(f, bertscore_f1(gen, ref));
  }
}

TEST(Sampling, EveryFourthPair) {
  std::vector<SentencePair> pairs;
  for (std::size_t i = 0; i < 10; ++i) pairs.push_back({"r", "g", i});
  const auto s = sample_pairs(pairs);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].pair_index, 0u);
  EXPECT_EQ(s[1].pair_index, 4u);
  EXPECT_EQ(s[2].pair_index, 8u);
  for (std::size_t n : {1u, 3u, 4u, 5u, 8u, 9u, 101u}) {
    std::vector<SentencePair> p(n, SentencePair{"a b", "a c", 0});
    EXPECT_EQ(sample_pairs(p).size(), (n + 3) / 4) << n;
  }
}

TEST(EvaluateSet, IdentitySuite) {
  Rng rng(107);
  std::vector<SentencePair> pairs;
  for (std::size_t i = 0; i < 40; ++i) {
    const auto s = random_sentence(rng, 3);
    pairs.push_back({s, s, i});
  }
  providers::MockProvider mock(1);
  const auto r = evaluate_set("identity", pairs, &mock);
  EXPECT_EQ(r.n_pairs_scored, 10u);
  EXPECT_DOUBLE_EQ(r.avg_jaccard, 0.0);
  EXPECT_DOUBLE_EQ(r.avg_entropy_ratio, 1.0);
  EXPECT_DOUBLE_EQ(r.ttr_ratio, 1.0);
  EXPECT_DOUBLE_EQ(r.word_ratio, 1.0);
  ASSERT_TRUE(r.avg_cosine && r.avg_bertscore_f1);
  EXPECT_NEAR(*r.avg_cosine, 1.0, 1e-12);
  EXPECT_NEAR(*r.avg_bertscore_f1, 1.0, 1e-12);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(EvaluateSet, AveragesMatchPerPairOracles) {
  Rng rng(108);
  const auto pairs = make_pairs(37, rng);
  const auto r = evaluate_set("x", pairs, nullptr, Execution::serial);
  ASSERT_EQ(r.n_pairs_scored, 10u);
  double jac = 0, ent = 0, wr = 0, wg = 0;
  std::vector<std::string> refs, gens;
  for (std::size_t i = 0; i < pairs.size(); i += 4) {
    jac += jaccard_oracle(pairs[i].reference, pairs[i].generated);
    ent += entropy_ratio(pairs[i]).value;
    wr += words(pairs[i].reference).size();
    wg += words(pairs[i].generated).size();
    refs.push_back(pairs[i].reference);
    gens.push_back(pairs[i].generated);
  }
  EXPECT_NEAR(r.avg_jaccard, jac / 10, 1e-12);
  EXPECT_NEAR(r.avg_entropy_ratio, ent / 10, 1e-12);
  EXPECT_NEAR(r.avg_word_ref, wr / 10, 1e-12);
  EXPECT_NEAR(r.word_ratio, wg / wr, 1e-12);
  EXPECT_NEAR(r.ttr_ratio, ttr_oracle(gens) / ttr_oracle(refs), 1e-12);
  EXPECT_FALSE(r.avg_cosine);
  EXPECT_EQ(r.warnings.size(), 1u);

  const auto p = evaluate_set("x", pairs, nullptr, Execution::parallel);
  EXPECT_EQ(p.avg_jaccard, r.avg_jaccard);
  EXPECT_EQ(p.avg_entropy_ratio, r.avg_entropy_ratio);
}

TEST(EvaluateSet, EmbedderFailureLeavesFieldsEmpty) {
  Rng rng(109);
  const auto pairs = make_pairs(8, rng);
  ThrowingEmbedder down;
  const auto r = evaluate_set("x", pairs, &down);
  EXPECT_FALSE(r.avg_cosine);
  EXPECT_FALSE(r.avg_bertscore_f1);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings[0].find("sidecar down"), std::string::npos);
  const auto row = csv_row(r);
  EXPECT_EQ(row.substr(row.size() - 2), ",,");
  EXPECT_TRUE(to_json(r)["avg_cosine"].is_null());
}

TEST(EvaluateSet, EmptyInputIsAnError) {
  EXPECT_THROW(evaluate_set("x", {}, nullptr), ArgumentError);
}

TEST(EvaluateSet, CsvLayout) {
  EXPECT_EQ(csv_header(),
            "Data aug.,Word Original,Word Generated,Word Ratio,Jaccard Dissimilarity,Entropy,TTR Ratio,"
            "Cosine Similarity,Bertscore-F1");
  SetQualityReport r;
  r.method_name = "bt, deepl";
  r.avg_word_ref = 12.4;
  r.avg_word_gen = 12.6;
  r.word_ratio = 1.01612;
  r.avg_jaccard = 0.5;
  r.avg_entropy_ratio = 1;
  r.ttr_ratio = 0.98765;
  r.avg_cosine = 0.91;
  EXPECT_EQ(csv_row(r), "\"bt, deepl\",12,13,1.0161,0.5000,1.0000,0.9877,0.9100,");
}
