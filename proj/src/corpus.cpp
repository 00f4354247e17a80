#include "quasc/corpus.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "quasc/qfv.hpp"

namespace quasc {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kManifestFormat = "QUASC-MANIFEST-1";

void check_feature(const FeatureVector& v, std::size_t dimension, const std::string& what) {
  if (v.size() != dimension)
    throw DataError(what + " has dimension " + std::to_string(v.size()) + " but corpus declares " +
                    std::to_string(dimension));
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]))
      throw DataError(what + " has a non-finite feature value at index " + std::to_string(i));
}

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

template <typename T>
T required(const json& node, const char* key, const std::string& context) {
  if (!node.contains(key)) throw DataError(context + " is missing field '" + key + "'");
  try {
    return node.at(key).get<T>();
  } catch (const json::exception&) {
    throw DataError(context + " has a field '" + key + "' of the wrong type");
  }
}

}  // namespace

QueryCorpus::QueryCorpus(std::string query, std::size_t dimension, std::vector<VideoRecord> videos,
                         std::vector<WebImage> web_images, std::optional<WordVectors> word_vectors)
    : query_(std::move(query)),
      dimension_(dimension),
      videos_(std::move(videos)),
      web_images_(std::move(web_images)),
      word_vectors_(std::move(word_vectors)) {
  if (dimension_ == 0) throw DataError("corpus dimension must be positive");

  for (std::size_t v = 0; v < videos_.size(); ++v) {
    const VideoRecord& video = videos_[v];
    if (!video_index_.emplace(video.video_id, v).second)
      throw DataError("duplicate video id '" + video.video_id + "'");
    if (video.frames.empty()) throw DataError("video '" + video.video_id + "' has no frames");

    for (std::size_t f = 0; f < video.frames.size(); ++f) {
      const CandidateKeyframe& frame = video.frames[f];
      if (frame.video_id != video.video_id)
        throw DataError("frame '" + frame.frame_id + "' names video '" + frame.video_id +
                        "' but is listed under '" + video.video_id + "'");
      if (f > 0 && frame.play_order <= video.frames[f - 1].play_order)
        throw DataError("frame '" + frame.frame_id + "' breaks strictly increasing play order in video '" +
                        video.video_id + "'");
      check_feature(frame.feature, dimension_, "frame '" + frame.frame_id + "'");
      if (!frame_index_.emplace(frame.frame_id, columns_.size()).second)
        throw DataError("duplicate frame id '" + frame.frame_id + "'");
      columns_.push_back({v, f, columns_.size()});
    }
  }
  if (columns_.empty()) throw DataError("corpus has no candidate keyframes");

  std::unordered_map<std::string, std::size_t> image_ids;
  for (std::size_t i = 0; i < web_images_.size(); ++i) {
    const WebImage& image = web_images_[i];
    if (!image_ids.emplace(image.image_id, i).second)
      throw DataError("duplicate web image id '" + image.image_id + "'");
    check_feature(image.feature, dimension_, "web image '" + image.image_id + "'");
  }

  if (word_vectors_ && !word_vectors_->empty()) {
    const std::size_t dw = word_vectors_->begin()->second.size();
    if (dw == 0) throw DataError("word vectors must have positive dimension");
    for (const auto& [word, vec] : *word_vectors_) check_feature(vec, dw, "word vector '" + word + "'");
  }
}

const CandidateKeyframe& QueryCorpus::frame_at(std::size_t column) const {
  const FrameRef& ref = columns_.at(column);
  return videos_[ref.video].frames[ref.frame];
}

std::optional<FrameRef> QueryCorpus::find_frame(const std::string& frame_id) const {
  auto it = frame_index_.find(frame_id);
  if (it == frame_index_.end()) return std::nullopt;
  return columns_[it->second];
}

std::optional<std::size_t> QueryCorpus::find_video(const std::string& video_id) const {
  auto it = video_index_.find(video_id);
  if (it == video_index_.end()) return std::nullopt;
  return it->second;
}

QueryCorpus l2_normalized(const QueryCorpus& corpus) {
  auto normalize = [](FeatureVector& v) {
    double sq = 0.0;
    for (float x : v) sq += static_cast<double>(x) * x;
    if (sq <= 0.0) return;
    const double inv = 1.0 / std::sqrt(sq);
    for (float& x : v) x = static_cast<float>(x * inv);
  };
  std::vector<VideoRecord> videos = corpus.videos();
  for (auto& video : videos)
    for (auto& frame : video.frames) normalize(frame.feature);
  std::vector<WebImage> images = corpus.web_images();
  for (auto& image : images) normalize(image.feature);
  return QueryCorpus(corpus.query(), corpus.dimension(), std::move(videos), std::move(images),
                     corpus.word_vectors());
}

QueryCorpus load_corpus(const std::filesystem::path& manifest_path) {
  const json manifest = parse_json_file(manifest_path);
  const std::filesystem::path base = manifest_path.parent_path();
  const std::string ctx = "manifest '" + manifest_path.string() + "'";

  if (manifest.contains("format") && manifest.at("format") != kManifestFormat)
    throw DataError(ctx + " has unsupported format tag");

  const auto query = required<std::string>(manifest, "query", ctx);
  const auto dimension = required<std::int64_t>(manifest, "dimension", ctx);
  if (dimension <= 0) throw DataError(ctx + " declares non-positive dimension");
  const auto d = static_cast<std::size_t>(dimension);

  const FeatureBlob frames_blob = read_qfv(base / required<std::string>(manifest, "frame_features", ctx));
  if (frames_blob.dimension != d)
    throw DataError("frame feature blob declares dimension " + std::to_string(frames_blob.dimension) +
                    " but manifest declares " + std::to_string(d));

  std::vector<VideoRecord> videos;
  std::size_t row = 0;
  for (const json& jv : required<json>(manifest, "videos", ctx)) {
    VideoRecord video;
    video.video_id = required<std::string>(jv, "video_id", ctx + " video entry");
    const std::string vctx = "video '" + video.video_id + "'";
    video.title = jv.value("title", "");
    video.description = jv.value("description", "");
    video.upload_time = jv.value<std::int64_t>("upload_time", 0);

    const json frames = required<json>(jv, "frames", vctx);
    for (std::size_t pos = 0; pos < frames.size(); ++pos) {
      const json& jf = frames[pos];
      CandidateKeyframe frame;
      frame.video_id = video.video_id;
      frame.shot_index = static_cast<std::uint32_t>(pos);
      frame.play_order = static_cast<std::uint32_t>(pos);
      if (jf.is_string()) {
        frame.frame_id = jf.get<std::string>();
      } else {
        frame.frame_id = required<std::string>(jf, "frame_id", vctx + " frame entry");
        frame.shot_index = jf.value<std::uint32_t>("shot_index", frame.shot_index);
        frame.play_order = jf.value<std::uint32_t>("play_order", frame.play_order);
      }
      if (row >= frames_blob.rows)
        throw DataError("frame '" + frame.frame_id + "' has no row in the frame feature blob (blob has " +
                        std::to_string(frames_blob.rows) + " rows)");
      auto values = frames_blob.row(row++);
      frame.feature.assign(values.begin(), values.end());
      video.frames.push_back(std::move(frame));
    }
    videos.push_back(std::move(video));
  }
  if (row != frames_blob.rows)
    throw DataError("frame feature blob has " + std::to_string(frames_blob.rows) + " rows but manifest lists " +
                    std::to_string(row) + " frames");

  std::vector<WebImage> images;
  const json image_ids = manifest.value("web_images", json::array());
  if (!image_ids.empty()) {
    const FeatureBlob web_blob =
        read_qfv(base / required<std::string>(manifest, "web_image_features", ctx));
    if (web_blob.dimension != d)
      throw DataError("web image feature blob declares dimension " + std::to_string(web_blob.dimension) +
                      " but manifest declares " + std::to_string(d));
    if (web_blob.rows != image_ids.size())
      throw DataError("web image feature blob has " + std::to_string(web_blob.rows) + " rows but manifest lists " +
                      std::to_string(image_ids.size()) + " web images");
    for (std::size_t i = 0; i < image_ids.size(); ++i) {
      WebImage image;
      image.image_id = image_ids[i].get<std::string>();
      auto values = web_blob.row(i);
      image.feature.assign(values.begin(), values.end());
      images.push_back(std::move(image));
    }
  }

  std::optional<WordVectors> words;
  if (manifest.contains("word_vectors") && !manifest.at("word_vectors").is_null())
    words = read_word_vectors(base / manifest.at("word_vectors").get<std::string>());

  return QueryCorpus(query, d, std::move(videos), std::move(images), std::move(words));
}

std::filesystem::path write_corpus(const QueryCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto d = static_cast<std::uint32_t>(corpus.dimension());

  ordered_json manifest;
  manifest["format"] = kManifestFormat;
  manifest["query"] = corpus.query();
  manifest["dimension"] = corpus.dimension();
  manifest["frame_features"] = "frames.qfv";

  FeatureBlob frames{static_cast<std::uint32_t>(corpus.frame_count()), d, {}};
  frames.values.reserve(corpus.frame_count() * d);
  ordered_json videos = ordered_json::array();
  for (const VideoRecord& video : corpus.videos()) {
    ordered_json jv;
    jv["video_id"] = video.video_id;
    jv["title"] = video.title;
    jv["description"] = video.description;
    jv["upload_time"] = video.upload_time;
    ordered_json jframes = ordered_json::array();
    for (const CandidateKeyframe& frame : video.frames) {
      jframes.push_back({{"frame_id", frame.frame_id},
                         {"shot_index", frame.shot_index},
                         {"play_order", frame.play_order}});
      frames.values.insert(frames.values.end(), frame.feature.begin(), frame.feature.end());
    }
    jv["frames"] = std::move(jframes);
    videos.push_back(std::move(jv));
  }
  manifest["videos"] = std::move(videos);
  write_qfv(dir / "frames.qfv", frames);

  ordered_json image_ids = ordered_json::array();
  if (corpus.web_image_count() > 0) {
    FeatureBlob web{static_cast<std::uint32_t>(corpus.web_image_count()), d, {}};
    for (const WebImage& image : corpus.web_images()) {
      image_ids.push_back(image.image_id);
      web.values.insert(web.values.end(), image.feature.begin(), image.feature.end());
    }
    write_qfv(dir / "web_images.qfv", web);
    manifest["web_image_features"] = "web_images.qfv";
  }
  manifest["web_images"] = std::move(image_ids);

  if (corpus.word_vectors()) {
    write_word_vectors(dir / "word_vectors.txt", *corpus.word_vectors());
    manifest["word_vectors"] = "word_vectors.txt";
  }

  const auto path = dir / "manifest.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write manifest '" + path.string() + "'");
  out << manifest.dump(2) << '\n';
  return path;
}

WordVectors read_word_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open word vectors '" + path.string() + "'");

  WordVectors vectors;
  std::size_t dw = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;

    std::vector<float> vec;
    std::string number;
    while (fields >> number) {
      float value = 0.0f;
      auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
      if (ec != std::errc() || ptr != number.data() + number.size())
        throw DataError("word vectors line " + std::to_string(line_no) + ": bad number '" + number + "'");
      vec.push_back(value);
    }
    // word2vec text exports start with a "<count> <dimension>" header line.
    if (line_no == 1 && vec.size() == 1 && token.find_first_not_of("0123456789") == std::string::npos) continue;
    if (vec.empty()) throw DataError("word vectors line " + std::to_string(line_no) + ": no values for '" + token + "'");
    if (dw == 0) dw = vec.size();
    if (vec.size() != dw)
      throw DataError("word vector '" + token + "' has dimension " + std::to_string(vec.size()) + ", expected " +
                      std::to_string(dw));
    vectors[token] = std::move(vec);
  }
  return vectors;
}

void write_word_vectors(const std::filesystem::path& path, const WordVectors& vectors) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write word vectors '" + path.string() + "'");
  char buf[32];
  for (const auto& [word, vec] : vectors) {
    out << word;
    for (float v : vec) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  const json doc = parse_json_file(path);
  if (!doc.is_object()) throw DataError("ground truth '" + path.string() + "' must be a JSON object");
  GroundTruth truth;
  for (const auto& [annotator, ids] : doc.items()) {
    if (!ids.is_array()) throw DataError("annotator '" + annotator + "' selection must be an array");
    if (ids.empty()) throw DataError("annotator '" + annotator + "' has an empty selection");
    auto& selection = truth.annotators[annotator];
    for (const json& id : ids) {
      if (!id.is_string()) throw DataError("annotator '" + annotator + "' lists a non-string frame id");
      selection.insert(id.get<std::string>());
    }
  }
  if (truth.annotators.empty()) throw DataError("ground truth '" + path.string() + "' has no annotators");
  return truth;
}

GroundTruth load_ground_truth(const std::filesystem::path& path, const QueryCorpus& corpus) {
  GroundTruth truth = load_ground_truth(path);
  for (const auto& [annotator, ids] : truth.annotators)
    for (const std::string& id : ids)
      if (!corpus.find_frame(id))
        throw DataError("annotator '" + annotator + "' selects unknown frame id '" + id + "'");
  return truth;
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth) {
  ordered_json doc = ordered_json::object();
  for (const auto& [annotator, ids] : truth.annotators) doc[annotator] = std::vector<std::string>(ids.begin(), ids.end());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write ground truth '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

}  // namespace quasc
