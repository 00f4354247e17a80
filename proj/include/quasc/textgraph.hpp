#pragma once

// Textual similarity between videos from their tag text: tokenize, merge
// semantically close words via k-means over word vectors, weight word clusters
// by TF-IDF, and turn cosine distances into Gaussian-kernel edge weights.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "quasc/corpus.hpp"
#include "quasc/graph.hpp"

namespace quasc {

struct TokenizedDoc {
  std::string video_id;
  std::vector<std::string> tokens;
};

enum class TextFields { Title, TitleAndDescription };

std::set<std::string> default_stopwords();
/// One token per line, UTF-8; blank lines ignored, entries lowercased.
std::set<std::string> load_stopwords(const std::filesystem::path& path);

/// Lowercase, split on runs of non-alphanumeric ASCII (non-ASCII bytes count as
/// word characters), drop stopwords and tokens shorter than two code points.
std::vector<std::string> tokenize_text(const std::string& text, const std::set<std::string>& stopwords);

std::vector<TokenizedDoc> tokenize(const QueryCorpus& corpus, const std::set<std::string>& stopwords,
                                   TextFields fields = TextFields::TitleAndDescription);

struct WordClustering {
  std::map<std::string, int> assignment;
  int k_words = 0;  // learned clusters; singleton clusters for vector-less words follow
  std::vector<std::vector<double>> centroids;

  int cluster_count() const;
  int cluster_of(const std::string& word) const;
};

/// min(50, max(2, vocab / 10)).
int default_k_words(std::size_t vocab_size);

/// Seeded k-means (k-means++ init, <= 300 iterations, centroid shift < 1e-6) over
/// the words that have vectors. Words without a vector become singleton clusters
/// appended in lexicographic order. When no word has a vector, k_words is ignored.
WordClustering cluster_words(const std::set<std::string>& vocab, const WordVectors& vectors, int k_words,
                             std::uint64_t seed);

struct TfidfVector {
  std::string video_id;
  std::map<int, double> weights;  // cluster id -> tf * idf, zeros not stored
};

/// tf = cluster count / doc length; idf = ln((1 + M) / (1 + df)) + 1.
std::vector<TfidfVector> tfidf(const std::vector<TokenizedDoc>& docs, const WordClustering& clustering);

double sparse_cosine(const std::map<int, double>& a, const std::map<int, double>& b);

/// Kernel bandwidth: the median of the off-diagonal distances (1 when that is 0),
/// or a fixed value.
struct SigmaMode {
  std::optional<double> fixed;

  static SigmaMode median() { return {}; }
  static SigmaMode constant(double sigma) { return {sigma}; }
};

/// W_ij = exp(-d_ij^2 / (2 sigma^2)) with d_ij = 1 - cosine; empty vectors sit at distance 1.
SimilarityGraph textual_graph(const std::vector<TfidfVector>& vectors, SigmaMode sigma = SigmaMode::median());

}  // namespace quasc
