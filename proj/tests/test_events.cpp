#include <doctest.h>

#include <random>

#include "quasc/events.hpp"
#include "quasc/synthetic.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace quasc;
using quasc::testing::make_corpus;
using quasc::testing::permutation_accuracy;

namespace {

SimilarityGraph graph_of(const Eigen::MatrixXd& w) {
  SimilarityGraph g;
  for (Eigen::Index i = 0; i < w.rows(); ++i) g.node_ids.push_back("v" + std::to_string(i));
  g.weights = w;
  return g;
}

Eigen::MatrixXd planted_blocks(int blocks, int per_block, double inside, double across) {
  const int n = blocks * per_block;
  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w(i, j) = i == j ? 0.0 : (i / per_block == j / per_block ? inside : across);
  return w;
}

std::vector<TokenizedDoc> docs_of(const std::vector<std::vector<std::string>>& tokens) {
  std::vector<TokenizedDoc> docs;
  for (std::size_t i = 0; i < tokens.size(); ++i) docs.push_back({"v" + std::to_string(i), tokens[i]});
  return docs;
}

EventPartition single_event(std::size_t n) {
  EventPartition p;
  for (std::size_t i = 0; i < n; ++i) p.node_ids.push_back("v" + std::to_string(i));
  p.event_of.assign(n, 0);
  p.event_count = 1;
  return p;
}

}  // namespace

TEST_CASE("graph fusion") {
  Eigen::MatrixXd v(2, 2), t(2, 2);
  v << 0, 0.8, 0.8, 0;
  t << 0, 0.3, 0.3, 0;
  CHECK(fuse_graphs(graph_of(v), graph_of(t), 1.0).weights == v);
  CHECK(fuse_graphs(graph_of(v), graph_of(t), 0.0).weights == t);
  CHECK(fuse_graphs(graph_of(v), graph_of(t), 0.41).weights(0, 1) == doctest::Approx(0.41 * 0.8 + 0.59 * 0.3));

  SimilarityGraph other = graph_of(t);
  other.node_ids = {"x", "y"};
  CHECK_THROWS_AS(fuse_graphs(graph_of(v), other, 0.5), DataError);
  CHECK_THROWS_AS(fuse_graphs(graph_of(v), graph_of(t), 1.5), UsageError);
  Eigen::MatrixXd bad = t;
  bad(0, 1) = -1;
  CHECK_THROWS_AS(fuse_graphs(graph_of(v), graph_of(bad), 0.5), DataError);
}

TEST_CASE("eigengap choice") {
  Eigen::VectorXd ev(6);
  ev << 0, 0.01, 0.02, 0.9, 1.0, 1.1;
  CHECK(eigengap_k(ev) == 3);
  ev << 0, 1, 1, 1, 1, 1;
  CHECK(eigengap_k(ev) == 2);  // a gap after the first eigenvalue still yields two events
  Eigen::VectorXd many = Eigen::VectorXd::LinSpaced(15, 0.0, 0.14);
  many(11) += 5;  // gap beyond the first ten is not considered
  CHECK(eigengap_k(many) <= 10);
}

TEST_CASE("two cliques joined by a weak edge: spectral cut equals the exhaustive minimum") {
  Eigen::MatrixXd w = planted_blocks(2, 3, 1.0, 0.0);
  w(2, 3) = w(3, 2) = 0.05;
  const auto p = graph_cut(graph_of(w), 2, 1);
  CHECK(p.event_count == 2);
  CHECK(permutation_accuracy(p.event_of, quasc::testing::brute_force_min_ncut(w)) == 1.0);
  CHECK(p.event_of[0] == 0);  // numbered by first appearance
}

TEST_CASE("random two-block graphs agree with the exhaustive minimum normalized cut") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 25; ++t) {
    const int n = 4 + static_cast<int>(rng() % 5);
    const int split = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(n - 3));
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const bool same = (i < split) == (j < split);
        w(i, j) = w(j, i) = same ? 0.7 + 0.3 * quasc::testing::uniform01(rng) : 0.05 * quasc::testing::uniform01(rng);
      }
    const auto p = graph_cut(graph_of(w), 2, rng());
    CHECK(permutation_accuracy(p.event_of, quasc::testing::brute_force_min_ncut(w)) == 1.0);
  }
}

TEST_CASE("planted three-block graph") {
  const Eigen::MatrixXd w = planted_blocks(3, 5, 0.9, 0.1);
  std::vector<int> truth;
  for (int i = 0; i < 15; ++i) truth.push_back(i / 5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CHECK(permutation_accuracy(graph_cut(graph_of(w), 3, seed).event_of, truth) >= 0.95);
    const auto automatic = graph_cut(graph_of(w), std::nullopt, seed);
    CHECK(automatic.event_count == 3);
    CHECK(permutation_accuracy(automatic.event_of, truth) >= 0.95);
  }
}

TEST_CASE("uniform graph still yields a valid partition") {
  const Eigen::MatrixXd w = planted_blocks(1, 6, 0.5, 0.0);
  const auto p = graph_cut(graph_of(w), 2, 0);
  CHECK(p.event_count == 2);
  for (int e : p.event_of) CHECK((e == 0 || e == 1));
  CHECK(p.members(0).size() + p.members(1).size() == 6);
}

TEST_CASE("isolated videos become singleton events") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(5, 5);
  w(0, 1) = w(1, 0) = 1;
  w(3, 4) = w(4, 3) = 1;
  const auto p = graph_cut(graph_of(w), 2, 0);
  CHECK(p.event_count == 3);
  CHECK(p.event_of[0] == p.event_of[1]);
  CHECK(p.event_of[3] == p.event_of[4]);
  CHECK(p.members(p.event_of[2]) == std::vector<std::string>{"v2"});

  const auto lonely = graph_cut(graph_of(Eigen::MatrixXd::Zero(3, 3)), std::nullopt, 0);
  CHECK(lonely.event_count == 3);
  CHECK(lonely.event_of == std::vector<int>{0, 1, 2});
  CHECK(graph_cut(graph_of(Eigen::MatrixXd::Zero(1, 1)), std::nullopt, 0).event_count == 1);

  CHECK_THROWS_AS(graph_cut(graph_of(w), 6, 0), UsageError);
  CHECK_THROWS_AS(graph_cut(graph_of(Eigen::MatrixXd::Zero(0, 0)), std::nullopt, 0), DataError);
  CHECK_THROWS_AS(p.event_of_video("nope"), DataError);
}

TEST_CASE("event labels") {
  SUBCASE("the shared word leads") {
    const auto docs = docs_of({{"kobe", "bryant", "farewell"}, {"kobe", "retirement"}, {"kobe", "lakers"}});
    std::set<std::string> vocab;
    for (const auto& d : docs) vocab.insert(d.tokens.begin(), d.tokens.end());
    const auto clusters = cluster_words(vocab, {}, 1, 0);
    const auto labels = label_events(single_event(3), docs, tfidf(docs, clusters), clusters);
    REQUIRE(!labels.at(0).empty());
    CHECK(labels.at(0).front() == "kobe");
    CHECK(labels.at(0).size() == 5);  // five distinct words
  }
  SUBCASE("a merged cluster is named by the word most of the event uses") {
    const auto docs = docs_of({{"royal", "wedding"}, {"wedding", "kiss"}, {"marriage"}, {"abbey"}});
    const WordVectors vecs{{"wedding", {1, 0, 0}},  {"marriage", {0.99f, 0.01f, 0}}, {"royal", {0, 1, 0}},
                           {"kiss", {0, 0, 1}},     {"abbey", {0.5f, 0.5f, 0.7f}}};
    std::set<std::string> vocab{"royal", "wedding", "kiss", "marriage", "abbey"};
    const auto clusters = cluster_words(vocab, vecs, 4, 2);
    REQUIRE(clusters.cluster_of("wedding") == clusters.cluster_of("marriage"));
    EventPartition p;
    p.node_ids = {"v0", "v1", "v2", "v3"};
    p.event_of = {0, 0, 0, 1};
    p.event_count = 2;
    const auto labels = label_events(p, docs, tfidf(docs, clusters), clusters);
    CHECK(labels.at(0).front() == "wedding");
    CHECK(labels.at(1) == std::vector<std::string>{"abbey"});
  }
  SUBCASE("no text, no label") {
    const auto docs = docs_of({{}, {}});
    const auto labels = label_events(single_event(2), docs, tfidf(docs, {}), {});
    CHECK(labels.at(0).empty());
  }
  SUBCASE("at most ten words") {
    std::vector<std::string> many;
    for (int i = 0; i < 14; ++i) many.push_back("word" + std::to_string(10 + i));
    const auto docs = docs_of({many});
    const auto clusters = cluster_words({many.begin(), many.end()}, {}, 1, 0);
    CHECK(label_events(single_event(1), docs, tfidf(docs, clusters), clusters).at(0).size() == 10);
  }
}

TEST_CASE("event-keyframe assembly") {
  // v0 uploaded last, v1 first; v0 and v1 share event 0, v2 alone, v3 alone without keyframes
  const auto corpus = make_corpus({{{{1, 0}, {0, 1}, {1, 1}}, "", 30},
                                   {{{1, 0}, {0, 1}}, "", 10},
                                   {{{1, 0}}, "", 20},
                                   {{{0, 1}}, "", 5}});
  EventPartition p;
  p.node_ids = {"v0", "v1", "v2", "v3"};
  p.event_of = {0, 0, 1, 2};
  p.event_count = 3;
  Summary summary;
  summary.keyframes = {{"f2", 0.9}, {"f5", 0.8}, {"f0", 0.5}, {"f4", 0.4}, {"f3", 0.3}};
  const auto ekp = assemble_ekp(summary, p, {{0, {"wedding"}}}, corpus);

  CHECK(ekp.query == "test query");
  REQUIRE(ekp.events.size() == 2);
  CHECK(ekp.events[0].event_id == 0);
  CHECK(ekp.events[0].video_ids == std::vector<std::string>{"v1", "v0"});
  CHECK(ekp.events[0].label_words == std::vector<std::string>{"wedding"});
  std::vector<std::string> order;
  for (const auto& k : ekp.events[0].keyframes) order.push_back(k.frame_id);
  CHECK(order == std::vector<std::string>{"f3", "f4", "f0", "f2"});
  CHECK(ekp.events[1].event_id == 1);
  CHECK(ekp.events[1].keyframes.front().score == 0.8);
  REQUIRE(ekp.hidden_events.size() == 1);
  CHECK(ekp.hidden_events[0].video_ids == std::vector<std::string>{"v3"});

  std::size_t total = 0;
  for (const auto& e : ekp.events) total += e.keyframes.size();
  CHECK(total == summary.keyframes.size());

  Summary unknown;
  unknown.keyframes = {{"nope", 1.0}};
  CHECK_THROWS_AS(assemble_ekp(unknown, p, {}, corpus), DataError);
}

TEST_CASE("full pipeline recovers planted topics") {
  SyntheticSpec spec;
  spec.seed = 4;
  const auto synth = generate_planted_corpus(spec);
  Summary summary;
  for (const auto& video : synth.corpus.videos()) summary.keyframes.push_back({video.frames.front().frame_id, 0.5});

  Diagnostics diag;
  const auto result = build_events(synth.corpus, summary, {}, &diag);
  std::vector<int> truth;
  for (const auto& id : result.partition.node_ids) truth.push_back(synth.video_topic.at(id));
  CHECK(result.partition.event_count == 3);
  CHECK(permutation_accuracy(result.partition.event_of, truth) >= 0.95);
  CHECK(result.summary.events.size() == 3);
  for (const auto& e : result.summary.events) CHECK(!e.label_words.empty());

  const auto again = build_events(synth.corpus, summary, {}, nullptr);
  CHECK(again.partition.event_of == result.partition.event_of);
  CHECK(again.labels == result.labels);

  EventPipelineConfig visual_only;
  visual_only.fusion.alpha = 1.0;
  CHECK(build_events(synth.corpus, summary, visual_only).fused.weights == result.visual.weights);
}
