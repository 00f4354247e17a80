#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "quasc/corpus.hpp"
#include "quasc/graph.hpp"
#include "quasc/solver.hpp"
#include "quasc/textgraph.hpp"
#include "quasc/visgraph.hpp"

namespace quasc {

struct FusionConfig {
  double alpha = 0.7;               // weight of the visual graph
  std::optional<int> k_events;      // nullopt = choose by eigengap

  void validate() const;
};

/// W_f = alpha * W_v + (1 - alpha) * W_t. Node ids must match in order.
SimilarityGraph fuse_graphs(const SimilarityGraph& visual, const SimilarityGraph& textual, double alpha);

/// Video -> event assignment. Event ids are dense and numbered by first
/// appearance in node order.
struct EventPartition {
  std::vector<std::string> node_ids;
  std::vector<int> event_of;
  int event_count = 0;

  int event_of_video(const std::string& video_id) const;
  std::vector<std::string> members(int event_id) const;
};

/// Eigengap choice over the first min(10, n) ascending eigenvalues, clamped to [2, 10] and to n.
int eigengap_k(const Eigen::VectorXd& ascending_eigenvalues);

/// Normalized-cut spectral clustering: the k smallest eigenvectors of
/// I - D^-1/2 W D^-1/2, row-normalized, clustered by seeded k-means (10 restarts).
/// Zero-degree nodes become singleton events; k applies to the remaining nodes.
EventPartition graph_cut(const SimilarityGraph& graph, std::optional<int> k_events, std::uint64_t seed);

/// Per event: sum member TF-IDF vectors, keep the top 10 clusters (weight desc,
/// cluster id asc) and name each by its member word found in the most event docs
/// (ties: lexicographically smallest).
std::map<int, std::vector<std::string>> label_events(const EventPartition& partition,
                                                     const std::vector<TokenizedDoc>& docs,
                                                     const std::vector<TfidfVector>& vectors,
                                                     const WordClustering& clustering);

struct EventKeyframe {
  std::string frame_id;
  std::string video_id;
  double score = 0.0;
};

struct EventGroup {
  int event_id = 0;
  std::vector<std::string> label_words;
  std::vector<std::string> video_ids;  // by (upload_time, video_id)
  std::vector<EventKeyframe> keyframes;
};

/// Two-layer event/keyframe presentation. `hidden_events` keeps the events that
/// received no selected keyframe, for diagnostics only.
struct EventSummary {
  std::string query;
  std::vector<EventGroup> events;
  std::vector<EventGroup> hidden_events;
};

/// Each selected keyframe joins its video's event. Events are ordered by their
/// earliest member upload time (ties: video id); keyframes by (upload time,
/// video id, play order).
EventSummary assemble_ekp(const Summary& summary, const EventPartition& partition,
                          const std::map<int, std::vector<std::string>>& labels, const QueryCorpus& corpus);

struct EventPipelineConfig {
  FusionConfig fusion;
  NearDuplicateConfig near_duplicate;
  TextFields text_fields = TextFields::TitleAndDescription;
  std::set<std::string> stopwords = default_stopwords();
  std::optional<int> k_words;  // nullopt = default_k_words(vocabulary)
  SigmaMode sigma = SigmaMode::median();
  std::uint64_t seed = 0;
};

struct EventPipelineResult {
  SimilarityGraph visual;
  SimilarityGraph textual;
  SimilarityGraph fused;
  EventPartition partition;
  std::map<int, std::vector<std::string>> labels;
  EventSummary summary;
};

/// Textual graph + visual graph -> fusion -> cut -> labels -> EKP assembly.
EventPipelineResult build_events(const QueryCorpus& corpus, const Summary& summary, const EventPipelineConfig& config,
                                 Diagnostics* diagnostics = nullptr);

}  // namespace quasc
