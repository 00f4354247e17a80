#pragma once

#include <map>
#include <set>
#include <span>
#include <string>

#include "quasc/corpus.hpp"
#include "quasc/solver.hpp"

namespace quasc {

enum class MatchOrder {
  GeneratedFirst,  // generated keyframes by descending score look up the nearest truth frame
  TruthFirst,      // truth frames by ascending id look up the nearest generated frame
};

struct MatchConfig {
  double distance_threshold = 0.6;
  MatchOrder order = MatchOrder::GeneratedFirst;

  /// Accepts [0, 1]; a threshold of 0 matches nothing since the test is strict.
  void validate() const;
};

/// ||u/|u| - v/|v||| / 2, in [0, 1]. Returns nullopt when either vector is zero.
std::optional<double> normalized_distance(std::span<const float> u, std::span<const float> v);

/// Greedy match-and-exclude: each candidate pairs with its nearest unmatched
/// counterpart when the normalized distance is strictly below the threshold.
std::size_t match_keyframes(const Summary& generated, const std::set<std::string>& truth, const QueryCorpus& corpus,
                            const MatchConfig& config, Diagnostics* diagnostics = nullptr);

struct AnnotatorMetrics {
  std::size_t n_matched = 0;
  std::size_t n_generated = 0;
  std::size_t n_truth = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  bool degenerate = false;  // empty generated summary
};

struct PrfAverage {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
};

struct MetricsReport {
  std::map<std::string, AnnotatorMetrics> per_annotator;
  PrfAverage average;
};

/// P = n_M / n_AG (0 when n_AG = 0), R = n_M / n_GT, F = 2PR / (P + R) (0 when P + R = 0).
AnnotatorMetrics metrics_from_counts(std::size_t n_matched, std::size_t n_generated, std::size_t n_truth);

MetricsReport prf(const Summary& generated, const GroundTruth& truth, const QueryCorpus& corpus,
                  const MatchConfig& config, Diagnostics* diagnostics = nullptr);

struct ConsistencyReport {
  std::map<std::string, double> per_annotator;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

/// Mean pairwise F-score of each annotator against every other one, using exact
/// frame-id overlap.
ConsistencyReport consistency(const GroundTruth& truth);

}  // namespace quasc
