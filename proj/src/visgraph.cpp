#include "quasc/visgraph.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "quasc/solver.hpp"

namespace quasc {
namespace {

bool has_zero_norm(const FeatureVector& v) {
  return std::all_of(v.begin(), v.end(), [](float x) { return x == 0.0f; });
}

std::size_t count_pairs(const VideoRecord& a, const VideoRecord& b, double tau) {
  std::size_t count = 0;
  for (const auto& f : a.frames)
    for (const auto& g : b.frames)
      if (cosine_similarity(f.feature, g.feature) >= tau) ++count;
  return count;
}

}  // namespace

void NearDuplicateConfig::validate() const {
  if (!(tau_nd > 0.0 && tau_nd <= 1.0)) throw UsageError("tau_nd must lie in (0, 1]");
}

std::size_t near_duplicate_count(const VideoRecord& a, const VideoRecord& b, const NearDuplicateConfig& config,
                                 Diagnostics* diagnostics) {
  config.validate();
  if (a.frames.empty() || b.frames.empty()) throw DataError("near-duplicate count needs videos with frames");
  if (diagnostics) {
    for (const VideoRecord* video : {&a, &b})
      for (const auto& frame : video->frames)
        if (has_zero_norm(frame.feature))
          diagnostics->warn("frame '" + frame.frame_id + "' has a zero feature vector and cannot be a near-duplicate");
  }
  return count_pairs(a, b, config.tau_nd);
}

SimilarityGraph visual_graph(const QueryCorpus& corpus, const NearDuplicateConfig& config, Diagnostics* diagnostics) {
  config.validate();
  const auto& videos = corpus.videos();
  const std::size_t m = videos.size();
  if (m < 2) throw DataError("visual graph needs at least 2 videos");

  if (diagnostics) {
    for (const auto& video : videos)
      for (const auto& frame : video.frames)
        if (has_zero_norm(frame.feature))
          diagnostics->warn("frame '" + frame.frame_id + "' has a zero feature vector and cannot be a near-duplicate");
  }

  SimilarityGraph graph;
  for (const auto& video : videos) graph.node_ids.push_back(video.video_id);
  graph.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const double count = static_cast<double>(count_pairs(videos[i], videos[j], config.tau_nd));
      const double average_frames = 0.5 * static_cast<double>(videos[i].frames.size() + videos[j].frames.size());
      const double w = std::clamp(count / average_frames, 0.0, 1.0);
      graph.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
      graph.weights(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = w;
    }
  return graph;
}

}  // namespace quasc
