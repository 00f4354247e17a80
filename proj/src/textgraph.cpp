#include "quasc/textgraph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "quasc/kmeans.hpp"

namespace quasc {

std::set<std::string> default_stopwords() {
  return {"a",     "about", "after", "all",   "also",  "an",    "and",   "any",   "are",   "as",    "at",
          "be",    "been",  "but",   "by",    "can",   "could", "did",   "do",    "does",  "for",   "from",
          "had",   "has",   "have",  "he",    "her",   "his",   "how",   "i",     "if",    "in",    "into",
          "is",    "it",    "its",   "just",  "me",    "more",  "my",    "no",    "not",   "now",   "of",
          "on",    "one",   "or",    "our",   "out",   "over",  "she",   "so",    "some",  "than",  "that",
          "the",   "their", "them",  "then",  "there", "these", "they",  "this",  "those", "to",    "up",
          "us",    "very",  "vs",    "was",   "we",    "were",  "what",  "when",  "where", "which", "who",
          "will",  "with",  "would", "you",   "your"};
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword list '" + path.string() + "'");
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string word;
    for (char ch : line)
      if (!std::isspace(static_cast<unsigned char>(ch)))
        word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (!word.empty()) words.insert(std::move(word));
  }
  return words;
}

std::vector<std::string> tokenize_text(const std::string& text, const std::set<std::string>& stopwords) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t code_points = 0;

  auto flush = [&] {
    if (code_points >= 2 && !stopwords.contains(current)) tokens.push_back(current);
    current.clear();
    code_points = 0;
  };

  for (char raw : text) {
    const auto ch = static_cast<unsigned char>(raw);
    if (ch >= 0x80) {
      current.push_back(raw);
      if ((ch & 0xC0) != 0x80) ++code_points;  // continuation bytes do not start a code point
    } else if (std::isalnum(ch)) {
      current.push_back(static_cast<char>(std::tolower(ch)));
      ++code_points;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<TokenizedDoc> tokenize(const QueryCorpus& corpus, const std::set<std::string>& stopwords,
                                   TextFields fields) {
  std::vector<TokenizedDoc> docs;
  docs.reserve(corpus.videos().size());
  for (const VideoRecord& video : corpus.videos()) {
    std::string text = video.title;
    if (fields == TextFields::TitleAndDescription) text += " " + video.description;
    docs.push_back({video.video_id, tokenize_text(text, stopwords)});
  }
  return docs;
}

int WordClustering::cluster_count() const {
  int count = 0;
  for (const auto& [word, id] : assignment) count = std::max(count, id + 1);
  return std::max(count, k_words);
}

int WordClustering::cluster_of(const std::string& word) const {
  auto it = assignment.find(word);
  if (it == assignment.end()) throw DataError("word '" + word + "' has no cluster");
  return it->second;
}

int default_k_words(std::size_t vocab_size) {
  return static_cast<int>(std::min<std::size_t>(50, std::max<std::size_t>(2, vocab_size / 10)));
}

WordClustering cluster_words(const std::set<std::string>& vocab, const WordVectors& vectors, int k_words,
                             std::uint64_t seed) {
  if (vocab.empty()) throw DataError("cannot cluster an empty vocabulary");

  std::vector<std::string> with_vectors;
  std::vector<std::string> without_vectors;
  for (const std::string& word : vocab) (vectors.contains(word) ? with_vectors : without_vectors).push_back(word);

  WordClustering clustering;
  if (!with_vectors.empty()) {
    if (k_words < 1 || static_cast<std::size_t>(k_words) > with_vectors.size())
      throw UsageError("k_words = " + std::to_string(k_words) + " must lie in [1, " +
                       std::to_string(with_vectors.size()) + "] (words with vectors)");
    const std::size_t dw = vectors.at(with_vectors.front()).size();
    Eigen::MatrixXd points(static_cast<Eigen::Index>(with_vectors.size()), static_cast<Eigen::Index>(dw));
    for (std::size_t i = 0; i < with_vectors.size(); ++i) {
      const auto& vec = vectors.at(with_vectors[i]);
      if (vec.size() != dw) throw DataError("word vector '" + with_vectors[i] + "' has inconsistent dimension");
      for (std::size_t k = 0; k < dw; ++k) points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = vec[k];
    }

    const KMeansResult km = kmeans(points, k_words, seed, {300, 1e-6, 1});
    clustering.k_words = k_words;
    for (std::size_t i = 0; i < with_vectors.size(); ++i) clustering.assignment[with_vectors[i]] = km.labels[i];
    for (Eigen::Index c = 0; c < km.centroids.rows(); ++c)
      clustering.centroids.emplace_back(km.centroids.row(c).begin(), km.centroids.row(c).end());
  }

  int next = clustering.k_words;
  for (const std::string& word : without_vectors) clustering.assignment[word] = next++;
  return clustering;
}

std::vector<TfidfVector> tfidf(const std::vector<TokenizedDoc>& docs, const WordClustering& clustering) {
  if (docs.empty()) throw DataError("TF-IDF needs at least one document");

  std::vector<std::map<int, int>> counts(docs.size());
  std::map<int, int> document_frequency;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const std::string& token : docs[d].tokens) ++counts[d][clustering.cluster_of(token)];
    for (const auto& [cluster, n] : counts[d]) ++document_frequency[cluster];
  }

  const double m = static_cast<double>(docs.size());
  std::vector<TfidfVector> out;
  out.reserve(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    TfidfVector vec{docs[d].video_id, {}};
    const double length = static_cast<double>(docs[d].tokens.size());
    for (const auto& [cluster, n] : counts[d]) {
      const double idf = std::log((1.0 + m) / (1.0 + document_frequency[cluster])) + 1.0;
      const double weight = (n / length) * idf;
      if (weight > 0.0) vec.weights[cluster] = weight;
    }
    out.push_back(std::move(vec));
  }
  return out;
}

double sparse_cosine(const std::map<int, double>& a, const std::map<int, double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [k, v] : a) {
    na += v * v;
    if (auto it = b.find(k); it != b.end()) dot += v * it->second;
  }
  for (const auto& [k, v] : b) nb += v * v;
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

SimilarityGraph textual_graph(const std::vector<TfidfVector>& vectors, SigmaMode sigma_mode) {
  const std::size_t n = vectors.size();
  if (n < 2) throw DataError("textual graph needs at least 2 videos");
  if (sigma_mode.fixed && !(*sigma_mode.fixed > 0.0)) throw UsageError("kernel bandwidth must be positive");

  Eigen::MatrixXd distance = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<double> off_diagonal;
  off_diagonal.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool empty = vectors[i].weights.empty() || vectors[j].weights.empty();
      double d = empty ? 1.0 : std::clamp(1.0 - sparse_cosine(vectors[i].weights, vectors[j].weights), 0.0, 2.0);
      if (d < 1e-12) d = 0.0;  // rounding residue from identical vectors; keeps a tiny median out of sigma
      distance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
      distance(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d;
      off_diagonal.push_back(d);
    }

  double sigma = 1.0;
  if (sigma_mode.fixed) {
    sigma = *sigma_mode.fixed;
  } else {
    std::sort(off_diagonal.begin(), off_diagonal.end());
    const std::size_t m = off_diagonal.size();
    const double median = m % 2 == 1 ? off_diagonal[m / 2] : 0.5 * (off_diagonal[m / 2 - 1] + off_diagonal[m / 2]);
    if (median > 0.0) sigma = median;
  }

  SimilarityGraph graph;
  for (const auto& v : vectors) graph.node_ids.push_back(v.video_id);
  graph.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i)
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j)
      if (i != j) graph.weights(i, j) = std::exp(-distance(i, j) * distance(i, j) / (2.0 * sigma * sigma));
  return graph;
}

}  // namespace quasc
