#include "textaug/quality.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "textaug/error.hpp"
#include "textaug/kernels.hpp"
#include "textaug/text.hpp"

namespace textaug::quality {

using nlohmann::json;

std::vector<std::string> tokenize(std::string_view text) { return text::tokenize(text); }

TokenDistribution token_distribution(std::string_view text) {
  TokenDistribution d;
  d.tokens = tokenize(text);
  std::map<std::string, std::size_t> counts;
  for (const auto& t : d.tokens) ++counts[t];
  const double n = static_cast<double>(d.tokens.size());
  for (const auto& [w, c] : counts) d.probabilities[w] = static_cast<double>(c) / n;
  return d;
}

std::vector<SentencePair> sample_pairs(std::span<const SentencePair> pairs) {
  std::vector<SentencePair> out;
  for (std::size_t i = 0; i < pairs.size(); i += 4) out.push_back(pairs[i]);
  return out;
}

double jaccard_dissimilarity(std::string_view a, std::string_view b) {
  const auto ta = tokenize(a), tb = tokenize(b);
  const std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& w : sa) common += sb.count(w);
  const std::size_t uni = sa.size() + sb.size() - common;
  return 1.0 - static_cast<double>(common) / static_cast<double>(uni);
}

double entropy(std::string_view text) {
  const auto d = token_distribution(text);
  double h = 0.0;
  for (const auto& [w, p] : d.probabilities) h -= p * std::log2(p);
  return h == 0.0 ? 0.0 : h;  // normalizes -0.0
}

EntropyRatio entropy_ratio(std::string_view reference, std::string_view generated) {
  const double hr = entropy(reference);
  const double hg = entropy(generated);
  if (hr == 0.0) {
    if (hg == 0.0) return {1.0, false};
    return {hg / kEntropyEpsilon, true};
  }
  return {hg / hr, false};
}

EntropyRatio entropy_ratio(const SentencePair& pair) { return entropy_ratio(pair.reference, pair.generated); }

double ttr(std::span<const std::string> texts) {
  std::unordered_set<std::string> types;
  std::size_t tokens = 0;
  for (const auto& t : texts) {
    for (auto& w : tokenize(t)) {
      types.insert(std::move(w));
      ++tokens;
    }
  }
  if (tokens == 0) throw UndefinedMetricError("TTR is undefined for zero tokens");
  return static_cast<double>(types.size()) / static_cast<double>(tokens);
}

double ttr_ratio(std::span<const std::string> generated_set, std::span<const std::string> reference_set) {
  return ttr(generated_set) / ttr(reference_set);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw ArgumentError(fmt::format("cosine similarity of vectors with {} and {} dimensions", a.size(), b.size()));
  double dot = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  const double na = std::sqrt(aa), nb = std::sqrt(bb);
  // A single square root of the product keeps cos(v, v) exactly 1.
  const double denom = (na >= kCosineEpsilon && nb >= kCosineEpsilon)
                           ? std::sqrt(aa * bb)
                           : std::max(na, kCosineEpsilon) * std::max(nb, kCosineEpsilon);
  return std::clamp(dot / denom, -1.0, 1.0);
}

double bertscore_f1(std::span<const providers::TokenVector> reference,
                    std::span<const providers::TokenVector> generated) {
  if (reference.empty() || generated.empty()) throw UndefinedMetricError("BERTScore needs non-empty token lists");
  const auto dim = reference.front().vector.size();
  for (const auto* side : {&reference, &generated}) {
    for (const auto& t : *side) {
      if (t.vector.size() != dim) throw ArgumentError("BERTScore token vectors differ in dimension");
    }
  }
  std::vector<double> sim(reference.size() * generated.size());
  for (std::size_t i = 0; i < reference.size(); ++i) {
    for (std::size_t j = 0; j < generated.size(); ++j)
      sim[i * generated.size() + j] = cosine_similarity(reference[i].vector, generated[j].vector);
  }
  double recall = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    double best = -1.0;
    for (std::size_t j = 0; j < generated.size(); ++j) best = std::max(best, sim[i * generated.size() + j]);
    recall += best;
  }
  recall /= static_cast<double>(reference.size());
  double precision = 0.0;
  for (std::size_t j = 0; j < generated.size(); ++j) {
    double best = -1.0;
    for (std::size_t i = 0; i < reference.size(); ++i) best = std::max(best, sim[i * generated.size() + j]);
    precision += best;
  }
  precision /= static_cast<double>(generated.size());
  if (precision + recall <= 0.0) return 0.0;
  return std::clamp(2.0 * precision * recall / (precision + recall), 0.0, 1.0);
}

SetQualityReport evaluate_set(const std::string& method_name, std::span<const SentencePair> pairs,
                              providers::Embedder* embedder, Execution execution) {
  if (pairs.empty()) throw ArgumentError("evaluate_set: no sentence pairs");
  SetQualityReport report;
  report.method_name = method_name;
  const auto sampled = sample_pairs(pairs);
  const std::size_t n = sampled.size();
  report.n_pairs_scored = n;

  std::vector<kernels::SentencePairView> views;
  views.reserve(n);
  for (const auto& p : sampled) views.push_back({&p.reference, &p.generated});
  const auto lexical =
      execution == Execution::parallel ? kernels::parallel::score_pairs(views) : kernels::serial::score_pairs(views);

  std::vector<std::string> refs, gens;
  refs.reserve(n);
  gens.reserve(n);
  for (const auto& p : sampled) {
    refs.push_back(p.reference);
    gens.push_back(p.generated);
  }

  std::vector<providers::EmbeddingResult> ref_emb, gen_emb;
  bool have_embeddings = false;
  if (embedder) {
    try {
      ref_emb = embedder->embed(refs, true);
      gen_emb = embedder->embed(gens, true);
      have_embeddings = ref_emb.size() == n && gen_emb.size() == n;
    } catch (const Error& e) {
      report.warnings.push_back(fmt::format("embedding metrics unavailable: {}", e.what()));
      spdlog::warn("{}", report.warnings.back());
    }
  } else {
    report.warnings.push_back("no embedder configured; embedding metrics left empty");
  }

  double sum_ref = 0, sum_gen = 0, sum_jac = 0, sum_ent = 0, sum_cos = 0, sum_bert = 0;
  std::size_t bert_count = 0, bert_skipped = 0;
  report.pairs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& ps = report.pairs[i];
    ps.word_count_ref = lexical[i].words_ref;
    ps.word_count_gen = lexical[i].words_gen;
    ps.jaccard_dissimilarity = lexical[i].jaccard;
    ps.entropy_ratio = lexical[i].entropy_ratio;
    ps.entropy_guarded = lexical[i].entropy_guarded;
    report.n_entropy_guarded += ps.entropy_guarded ? 1 : 0;
    sum_ref += static_cast<double>(ps.word_count_ref);
    sum_gen += static_cast<double>(ps.word_count_gen);
    sum_jac += ps.jaccard_dissimilarity;
    sum_ent += ps.entropy_ratio;
    if (have_embeddings) {
      ps.cosine_similarity = cosine_similarity(ref_emb[i].sentence_vector, gen_emb[i].sentence_vector);
      sum_cos += *ps.cosine_similarity;
      if (!ref_emb[i].token_vectors.empty() && !gen_emb[i].token_vectors.empty()) {
        ps.bertscore_f1 = bertscore_f1(ref_emb[i].token_vectors, gen_emb[i].token_vectors);
        sum_bert += *ps.bertscore_f1;
        ++bert_count;
      } else {
        ++bert_skipped;
      }
    }
  }
  const double dn = static_cast<double>(n);
  report.avg_word_ref = sum_ref / dn;
  report.avg_word_gen = sum_gen / dn;
  report.word_ratio = report.avg_word_ref > 0.0 ? report.avg_word_gen / report.avg_word_ref : 0.0;
  report.avg_jaccard = sum_jac / dn;
  report.avg_entropy_ratio = sum_ent / dn;
  report.ttr_ratio = ttr_ratio(gens, refs);
  if (have_embeddings) {
    report.avg_cosine = sum_cos / dn;
    if (bert_count > 0) report.avg_bertscore_f1 = sum_bert / static_cast<double>(bert_count);
    if (bert_skipped > 0)
      report.warnings.push_back(fmt::format("{} pair(s) without tokens skipped for BERTScore", bert_skipped));
  }
  if (report.n_entropy_guarded > 0)
    report.warnings.push_back(
        fmt::format("{} pair(s) had a zero-entropy reference; ratio taken against 1e-9", report.n_entropy_guarded));
  return report;
}

std::string csv_header() {
  return "Data aug.,Word Original,Word Generated,Word Ratio,Jaccard Dissimilarity,Entropy,TTR Ratio,"
         "Cosine Similarity,Bertscore-F1";
}

std::string csv_row(const SetQualityReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : std::string(); };
  return fmt::format("{},{},{},{:.4f},{:.4f},{:.4f},{:.4f},{},{}", text::csv_field(r.method_name),
                     std::lround(r.avg_word_ref), std::lround(r.avg_word_gen), r.word_ratio, r.avg_jaccard,
                     r.avg_entropy_ratio, r.ttr_ratio, opt(r.avg_cosine), opt(r.avg_bertscore_f1));
}

json to_json(const SetQualityReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(); };
  return {{"method_name", r.method_name},
          {"avg_word_ref", r.avg_word_ref},
          {"avg_word_gen", r.avg_word_gen},
          {"word_ratio", r.word_ratio},
          {"avg_jaccard", r.avg_jaccard},
          {"avg_entropy_ratio", r.avg_entropy_ratio},
          {"ttr_ratio", r.ttr_ratio},
          {"avg_cosine", opt(r.avg_cosine)},
          {"avg_bertscore_f1", opt(r.avg_bertscore_f1)},
          {"n_pairs_scored", r.n_pairs_scored},
          {"n_entropy_guarded", r.n_entropy_guarded},
          {"n_synthetic_excluded", r.n_synthetic_excluded},
          {"warnings", r.warnings}};
}

}  // namespace textaug::quality
