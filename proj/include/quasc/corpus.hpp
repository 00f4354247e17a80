#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "quasc/error.hpp"

namespace quasc {

using FeatureVector = std::vector<float>;
using WordVectors = std::map<std::string, std::vector<float>>;

struct CandidateKeyframe {
  std::string frame_id;
  std::string video_id;
  std::uint32_t shot_index = 0;
  std::uint32_t play_order = 0;
  FeatureVector feature;
};

struct WebImage {
  std::string image_id;
  FeatureVector feature;
};

struct VideoRecord {
  std::string video_id;
  std::string title;
  std::string description;
  std::int64_t upload_time = 0;  // seconds since epoch
  std::vector<CandidateKeyframe> frames;
};

/// Location of a candidate keyframe inside a corpus.
struct FrameRef {
  std::size_t video = 0;
  std::size_t frame = 0;
  std::size_t column = 0;  // position in the flattened frame order
};

/// Immutable, validated query corpus. The constructor checks every invariant
/// and throws DataError naming the offending entity.
///
/// Frames are flattened in video order, then play order; that flat position is
/// the frame's column in the solver's dictionary.
class QueryCorpus {
 public:
  QueryCorpus(std::string query, std::size_t dimension, std::vector<VideoRecord> videos,
              std::vector<WebImage> web_images, std::optional<WordVectors> word_vectors = std::nullopt);

  const std::string& query() const noexcept { return query_; }
  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<VideoRecord>& videos() const noexcept { return videos_; }
  const std::vector<WebImage>& web_images() const noexcept { return web_images_; }
  const std::optional<WordVectors>& word_vectors() const noexcept { return word_vectors_; }

  std::size_t frame_count() const noexcept { return columns_.size(); }
  std::size_t web_image_count() const noexcept { return web_images_.size(); }

  const CandidateKeyframe& frame_at(std::size_t column) const;
  std::optional<FrameRef> find_frame(const std::string& frame_id) const;
  std::optional<std::size_t> find_video(const std::string& video_id) const;

 private:
  std::string query_;
  std::size_t dimension_;
  std::vector<VideoRecord> videos_;
  std::vector<WebImage> web_images_;
  std::optional<WordVectors> word_vectors_;
  std::vector<FrameRef> columns_;
  std::unordered_map<std::string, std::size_t> frame_index_;
  std::unordered_map<std::string, std::size_t> video_index_;
};

/// Returns a copy with every frame and web-image feature scaled to unit L2 norm.
/// Zero vectors are left as they are.
QueryCorpus l2_normalized(const QueryCorpus& corpus);

QueryCorpus load_corpus(const std::filesystem::path& manifest_path);

/// Writes manifest.json, frames.qfv, web_images.qfv (when L > 0) and
/// word_vectors.txt (when present) into `dir`. Returns the manifest path.
std::filesystem::path write_corpus(const QueryCorpus& corpus, const std::filesystem::path& dir);

WordVectors read_word_vectors(const std::filesystem::path& path);
void write_word_vectors(const std::filesystem::path& path, const WordVectors& vectors);

struct GroundTruth {
  std::map<std::string, std::set<std::string>> annotators;
};

/// Parses a ground-truth JSON map (annotator id -> array of frame ids) and
/// resolves every id against the corpus.
GroundTruth load_ground_truth(const std::filesystem::path& path, const QueryCorpus& corpus);

/// Same, without corpus resolution (used where only frame-id equality matters).
GroundTruth load_ground_truth(const std::filesystem::path& path);

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth);

}  // namespace quasc
