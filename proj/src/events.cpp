#include "quasc/events.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "quasc/kmeans.hpp"

namespace quasc {

void FusionConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw UsageError("alpha must lie in [0, 1]");
  if (k_events && *k_events < 1) throw UsageError("k_events must be positive");
}

SimilarityGraph fuse_graphs(const SimilarityGraph& visual, const SimilarityGraph& textual, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw UsageError("alpha must lie in [0, 1]");
  if (visual.node_ids != textual.node_ids) throw DataError("cannot fuse graphs over different node sets");
  visual.validate();
  textual.validate();
  SimilarityGraph fused{visual.node_ids, alpha * visual.weights + (1.0 - alpha) * textual.weights};
  fused.weights.diagonal().setZero();
  return fused;
}

int EventPartition::event_of_video(const std::string& video_id) const {
  for (std::size_t i = 0; i < node_ids.size(); ++i)
    if (node_ids[i] == video_id) return event_of[i];
  throw DataError("video '" + video_id + "' is not part of the event partition");
}

std::vector<std::string> EventPartition::members(int event_id) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < node_ids.size(); ++i)
    if (event_of[i] == event_id) out.push_back(node_ids[i]);
  return out;
}

int eigengap_k(const Eigen::VectorXd& ascending_eigenvalues) {
  const auto n = static_cast<int>(ascending_eigenvalues.size());
  if (n < 2) return n;
  const int m = std::min(10, n);
  int best = 1;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < m; ++i) {
    const double gap = ascending_eigenvalues(i) - ascending_eigenvalues(i - 1);
    if (gap > best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  return std::min(std::clamp(best, 2, 10), n);
}

EventPartition graph_cut(const SimilarityGraph& graph, std::optional<int> k_events, std::uint64_t seed) {
  graph.validate();
  const std::size_t n = graph.size();
  if (n == 0) throw DataError("cannot cut an empty graph");
  if (k_events && (*k_events < 1 || static_cast<std::size_t>(*k_events) > n))
    throw UsageError("k_events = " + std::to_string(*k_events) + " must lie in [1, " + std::to_string(n) + "]");

  const Eigen::VectorXd degree = graph.weights.rowwise().sum();
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i)
    if (degree(i) > 0.0) active.push_back(i);

  // raw cluster label per node; -1 = isolated
  std::vector<int> raw(n, -1);
  const auto na = static_cast<Eigen::Index>(active.size());
  if (na == 1) {
    raw[static_cast<std::size_t>(active[0])] = 0;
  } else if (na >= 2) {
    Eigen::MatrixXd laplacian(na, na);
    Eigen::VectorXd inv_sqrt(na);
    for (Eigen::Index i = 0; i < na; ++i) inv_sqrt(i) = 1.0 / std::sqrt(degree(active[static_cast<std::size_t>(i)]));
    for (Eigen::Index i = 0; i < na; ++i)
      for (Eigen::Index j = 0; j < na; ++j)
        laplacian(i, j) = (i == j ? 1.0 : 0.0) - inv_sqrt(i) *
                                                    graph.weights(active[static_cast<std::size_t>(i)],
                                                                  active[static_cast<std::size_t>(j)]) *
                                                    inv_sqrt(j);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(laplacian);
    if (eig.info() != Eigen::Success) throw NumericalError("eigen-decomposition of the graph Laplacian failed");

    const int k = k_events ? std::min(*k_events, static_cast<int>(na)) : eigengap_k(eig.eigenvalues());
    Eigen::MatrixXd embedding = eig.eigenvectors().leftCols(k);
    for (Eigen::Index i = 0; i < na; ++i) {
      const double norm = embedding.row(i).norm();
      if (norm > 0.0) embedding.row(i) /= norm;
    }
    const KMeansResult km = kmeans(embedding, k, seed, {300, 1e-10, 10});
    for (Eigen::Index i = 0; i < na; ++i) raw[static_cast<std::size_t>(active[static_cast<std::size_t>(i)])] = km.labels[static_cast<std::size_t>(i)];
  }

  EventPartition partition;
  partition.node_ids = graph.node_ids;
  partition.event_of.assign(n, -1);
  std::map<int, int> relabel;
  for (std::size_t i = 0; i < n; ++i) {
    if (raw[i] < 0) {
      partition.event_of[i] = partition.event_count++;
    } else {
      auto [it, inserted] = relabel.emplace(raw[i], partition.event_count);
      if (inserted) ++partition.event_count;
      partition.event_of[i] = it->second;
    }
  }
  return partition;
}

std::map<int, std::vector<std::string>> label_events(const EventPartition& partition,
                                                     const std::vector<TokenizedDoc>& docs,
                                                     const std::vector<TfidfVector>& vectors,
                                                     const WordClustering& clustering) {
  std::map<int, std::vector<std::string>> words_of_cluster;
  for (const auto& [word, cluster] : clustering.assignment) words_of_cluster[cluster].push_back(word);

  std::map<std::string, const TfidfVector*> vector_of;
  for (const auto& v : vectors) vector_of[v.video_id] = &v;
  std::map<std::string, const TokenizedDoc*> doc_of;
  for (const auto& d : docs) doc_of[d.video_id] = &d;

  std::map<int, std::vector<std::string>> labels;
  for (int event = 0; event < partition.event_count; ++event) {
    const std::vector<std::string> members = partition.members(event);
    std::map<int, double> summed;
    std::map<std::string, int> word_df;
    for (const std::string& video : members) {
      auto vit = vector_of.find(video);
      if (vit == vector_of.end()) throw DataError("video '" + video + "' has no TF-IDF vector");
      for (const auto& [cluster, w] : vit->second->weights) summed[cluster] += w;
      if (auto dit = doc_of.find(video); dit != doc_of.end()) {
        std::set<std::string> unique(dit->second->tokens.begin(), dit->second->tokens.end());
        for (const auto& word : unique) ++word_df[word];
      }
    }

    std::vector<std::pair<int, double>> ranked(summed.begin(), summed.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
      if (x.second != y.second) return x.second > y.second;
      return x.first < y.first;
    });
    if (ranked.size() > 10) ranked.resize(10);

    std::vector<std::string>& label = labels[event];
    for (const auto& [cluster, weight] : ranked) {
      std::string best;
      int best_df = -1;
      for (const std::string& word : words_of_cluster[cluster]) {  // lexicographic order
        auto it = word_df.find(word);
        const int df = it == word_df.end() ? 0 : it->second;
        if (df > best_df) {
          best_df = df;
          best = word;
        }
      }
      if (!best.empty()) label.push_back(best);
    }
  }
  return labels;
}

EventSummary assemble_ekp(const Summary& summary, const EventPartition& partition,
                          const std::map<int, std::vector<std::string>>& labels, const QueryCorpus& corpus) {
  const auto& videos = corpus.videos();
  auto video_at = [&](const std::string& id) -> const VideoRecord& {
    auto idx = corpus.find_video(id);
    if (!idx) throw DataError("partition names unknown video '" + id + "'");
    return videos[*idx];
  };
  auto video_before = [&](const std::string& x, const std::string& y) {
    const auto tx = video_at(x).upload_time;
    const auto ty = video_at(y).upload_time;
    return tx != ty ? tx < ty : x < y;
  };

  std::vector<EventGroup> groups(static_cast<std::size_t>(partition.event_count));
  for (int e = 0; e < partition.event_count; ++e) {
    EventGroup& g = groups[static_cast<std::size_t>(e)];
    g.event_id = e;
    if (auto it = labels.find(e); it != labels.end()) g.label_words = it->second;
    g.video_ids = partition.members(e);
    std::sort(g.video_ids.begin(), g.video_ids.end(), video_before);
  }

  for (const SummaryEntry& entry : summary.keyframes) {
    auto ref = corpus.find_frame(entry.frame_id);
    if (!ref) throw DataError("summary keyframe '" + entry.frame_id + "' is not in the corpus");
    const std::string& video_id = videos[ref->video].video_id;
    const int event = partition.event_of_video(video_id);
    groups[static_cast<std::size_t>(event)].keyframes.push_back({entry.frame_id, video_id, entry.score});
  }

  for (EventGroup& g : groups) {
    std::sort(g.keyframes.begin(), g.keyframes.end(), [&](const EventKeyframe& x, const EventKeyframe& y) {
      if (x.video_id != y.video_id) return video_before(x.video_id, y.video_id);
      return corpus.find_frame(x.frame_id)->frame < corpus.find_frame(y.frame_id)->frame;
    });
  }
  std::sort(groups.begin(), groups.end(), [&](const EventGroup& x, const EventGroup& y) {
    if (x.video_ids.empty() || y.video_ids.empty()) return !x.video_ids.empty() && y.video_ids.empty();
    return video_before(x.video_ids.front(), y.video_ids.front());
  });

  EventSummary out;
  out.query = corpus.query();
  for (EventGroup& g : groups) (g.keyframes.empty() ? out.hidden_events : out.events).push_back(std::move(g));
  return out;
}

EventPipelineResult build_events(const QueryCorpus& corpus, const Summary& summary, const EventPipelineConfig& config,
                                 Diagnostics* diagnostics) {
  config.fusion.validate();
  config.near_duplicate.validate();

  EventPipelineResult result;
  const std::vector<TokenizedDoc> docs = tokenize(corpus, config.stopwords, config.text_fields);

  std::set<std::string> vocab;
  for (const auto& doc : docs) vocab.insert(doc.tokens.begin(), doc.tokens.end());

  WordClustering clustering;
  if (!vocab.empty()) {
    const WordVectors empty;
    const WordVectors& vectors = corpus.word_vectors() ? *corpus.word_vectors() : empty;
    const auto with_vectors = static_cast<int>(
        std::count_if(vocab.begin(), vocab.end(), [&](const std::string& w) { return vectors.contains(w); }));
    int k = config.k_words.value_or(default_k_words(vocab.size()));
    k = std::min(k, with_vectors);
    if (with_vectors > 0 && k < 1) k = 1;
    if (diagnostics && with_vectors == 0)
      diagnostics->warn("no tag word has a word vector; TF-IDF runs on raw words");
    clustering = cluster_words(vocab, vectors, k, derive_seed(config.seed, 0));
  } else if (diagnostics) {
    diagnostics->warn("no tag text survives tokenization; textual graph is uninformative");
  }

  const std::vector<TfidfVector> vectors = tfidf(docs, clustering);
  result.textual = textual_graph(vectors, config.sigma);
  result.visual = visual_graph(corpus, config.near_duplicate, diagnostics);
  result.fused = fuse_graphs(result.visual, result.textual, config.fusion.alpha);
  result.partition = graph_cut(result.fused, config.fusion.k_events, derive_seed(config.seed, 1));
  result.labels = label_events(result.partition, docs, vectors, clustering);
  result.summary = assemble_ekp(summary, result.partition, result.labels, corpus);
  return result;
}

}  // namespace quasc
