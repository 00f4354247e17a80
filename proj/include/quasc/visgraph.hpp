#pragma once

#include <cstddef>

#include "quasc/corpus.hpp"
#include "quasc/graph.hpp"

namespace quasc {

/// Two frames are near-duplicates when their cosine similarity reaches tau_nd.
struct NearDuplicateConfig {
  double tau_nd = 0.9;

  void validate() const;
};

/// Number of frame pairs (f in a, g in b) with cos(f, g) >= tau_nd.
/// Zero-norm frames never match and are reported.
std::size_t near_duplicate_count(const VideoRecord& a, const VideoRecord& b, const NearDuplicateConfig& config,
                                 Diagnostics* diagnostics = nullptr);

/// W_ij = N_dk(i, j) / ((|frames_i| + |frames_j|) / 2), clamped to [0, 1].
SimilarityGraph visual_graph(const QueryCorpus& corpus, const NearDuplicateConfig& config,
                             Diagnostics* diagnostics = nullptr);

}  // namespace quasc
