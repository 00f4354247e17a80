#include "quasc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace quasc {

void MatchConfig::validate() const {
  if (!(distance_threshold >= 0.0 && distance_threshold <= 1.0))
    throw UsageError("distance threshold must lie in [0, 1]");
}

std::optional<double> normalized_distance(std::span<const float> u, std::span<const float> v) {
  double nu = 0.0, nv = 0.0;
  for (float x : u) nu += static_cast<double>(x) * x;
  for (float x : v) nv += static_cast<double>(x) * x;
  if (nu <= 0.0 || nv <= 0.0) return std::nullopt;
  nu = std::sqrt(nu);
  nv = std::sqrt(nv);
  double sq = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double diff = u[k] / nu - v[k] / nv;
    sq += diff * diff;
  }
  return std::sqrt(sq) / 2.0;
}

namespace {

const FeatureVector& feature_of(const QueryCorpus& corpus, const std::string& frame_id) {
  auto ref = corpus.find_frame(frame_id);
  if (!ref) throw DataError("frame '" + frame_id + "' is not in the corpus");
  return corpus.videos()[ref->video].frames[ref->frame].feature;
}

std::size_t greedy_match(const std::vector<std::string>& probes, const std::vector<std::string>& pool,
                         const QueryCorpus& corpus, double threshold) {
  std::vector<bool> used(pool.size(), false);
  std::size_t matched = 0;
  for (const std::string& probe : probes) {
    const FeatureVector& u = feature_of(corpus, probe);
    std::size_t best = pool.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (used[i]) continue;
      const auto d = normalized_distance(u, feature_of(corpus, pool[i]));
      if (d && *d < best_d) {
        best_d = *d;
        best = i;
      }
    }
    if (best < pool.size() && best_d < threshold) {
      used[best] = true;
      ++matched;
    }
  }
  return matched;
}

bool is_zero(const FeatureVector& v) {
  return std::all_of(v.begin(), v.end(), [](float x) { return x == 0.0f; });
}

}  // namespace

std::size_t match_keyframes(const Summary& generated, const std::set<std::string>& truth, const QueryCorpus& corpus,
                            const MatchConfig& config, Diagnostics* diagnostics) {
  config.validate();

  std::vector<SummaryEntry> ranked = generated.keyframes;
  std::sort(ranked.begin(), ranked.end(), [](const SummaryEntry& x, const SummaryEntry& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.frame_id < y.frame_id;
  });
  std::vector<std::string> gen_ids;
  for (const auto& e : ranked) gen_ids.push_back(e.frame_id);
  const std::vector<std::string> truth_ids(truth.begin(), truth.end());

  if (diagnostics) {
    auto check = [&](const std::vector<std::string>& ids) {
      for (const auto& id : ids)
        if (is_zero(feature_of(corpus, id)))
          diagnostics->warn("frame '" + id + "' has a zero feature vector and cannot be matched");
    };
    check(gen_ids);
    check(truth_ids);
  }

  return config.order == MatchOrder::GeneratedFirst
             ? greedy_match(gen_ids, truth_ids, corpus, config.distance_threshold)
             : greedy_match(truth_ids, gen_ids, corpus, config.distance_threshold);
}

AnnotatorMetrics metrics_from_counts(std::size_t n_matched, std::size_t n_generated, std::size_t n_truth) {
  AnnotatorMetrics m;
  m.n_matched = n_matched;
  m.n_generated = n_generated;
  m.n_truth = n_truth;
  m.degenerate = n_generated == 0;
  m.precision = n_generated > 0 ? static_cast<double>(n_matched) / static_cast<double>(n_generated) : 0.0;
  m.recall = n_truth > 0 ? static_cast<double>(n_matched) / static_cast<double>(n_truth) : 0.0;
  const double sum = m.precision + m.recall;
  m.f_score = sum > 0.0 ? 2.0 * m.precision * m.recall / sum : 0.0;
  return m;
}

MetricsReport prf(const Summary& generated, const GroundTruth& truth, const QueryCorpus& corpus,
                  const MatchConfig& config, Diagnostics* diagnostics) {
  if (truth.annotators.empty()) throw DataError("evaluation needs at least one annotator");
  if (diagnostics && generated.keyframes.empty()) diagnostics->warn("generated summary is empty; precision set to 0");

  MetricsReport report;
  for (const auto& [annotator, selection] : truth.annotators) {
    const std::size_t matched = match_keyframes(generated, selection, corpus, config, diagnostics);
    report.per_annotator[annotator] = metrics_from_counts(matched, generated.keyframes.size(), selection.size());
  }
  const double count = static_cast<double>(report.per_annotator.size());
  for (const auto& [annotator, m] : report.per_annotator) {
    report.average.precision += m.precision;
    report.average.recall += m.recall;
    report.average.f_score += m.f_score;
  }
  report.average.precision /= count;
  report.average.recall /= count;
  report.average.f_score /= count;
  return report;
}

ConsistencyReport consistency(const GroundTruth& truth) {
  const auto& sets = truth.annotators;
  if (sets.size() < 2) throw DataError("label consistency needs at least 2 annotators");
  for (const auto& [annotator, selection] : sets)
    if (selection.empty()) throw DataError("annotator '" + annotator + "' has an empty selection");

  ConsistencyReport report;
  const double others = static_cast<double>(sets.size() - 1);
  for (const auto& [a, sa] : sets) {
    double total = 0.0;
    for (const auto& [b, sb] : sets) {
      if (a == b) continue;
      const auto overlap = static_cast<double>(std::count_if(sa.begin(), sa.end(), [&](const std::string& id) {
        return sb.contains(id);
      }));
      const double p = overlap / static_cast<double>(sa.size());
      const double r = overlap / static_cast<double>(sb.size());
      total += p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    }
    report.per_annotator[a] = total / others;
  }

  report.min = std::numeric_limits<double>::infinity();
  report.max = -std::numeric_limits<double>::infinity();
  for (const auto& [a, f] : report.per_annotator) {
    report.min = std::min(report.min, f);
    report.max = std::max(report.max, f);
    report.mean += f;
  }
  report.mean /= static_cast<double>(report.per_annotator.size());
  return report;
}

}  // namespace quasc
