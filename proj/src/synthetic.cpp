#include "quasc/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <random>
#include <vector>

namespace quasc {
namespace {

// Enough words per topic that the default word-cluster count (vocabulary / 10)
// leaves every topic its own cluster.
constexpr std::size_t kWordsPerTopic = 24;
constexpr std::array<std::array<const char*, kWordsPerTopic>, 4> kTopicWords = {{
    {"engagement", "ring", "interview", "announcement", "proposal", "couple", "palace", "photocall",
     "sapphire", "fiance", "statement", "garden", "portrait", "safari", "kenya", "diamond",
     "official", "studio", "press", "reporters", "gallery", "betrothal", "heirloom", "clarence"},
    {"ceremony", "abbey", "vows", "cathedral", "archbishop", "organ", "aisle", "dress",
     "choir", "hymn", "bride", "groom", "veil", "bouquet", "sermon", "altar",
     "bridesmaid", "pageboy", "register", "lace", "tiara", "nave", "prayer", "anthem"},
    {"balcony", "kiss", "flypast", "crowd", "waving", "jets", "cheering", "flags",
     "spitfire", "lancaster", "typhoon", "mall", "carriage", "landau", "procession", "guards",
     "horses", "cavalry", "salute", "trumpets", "onlookers", "railings", "wave", "spectators"},
    {"square", "celebration", "party", "street", "fans", "picnic", "bunting", "music",
     "pub", "barbecue", "neighbours", "tables", "souvenir", "mugs", "costume", "dancing",
     "concert", "screen", "fireworks", "village", "toast", "banner", "festival", "revellers"},
}};
constexpr std::array<const char*, 3> kQueryWords = {"royal", "wedding", "prince"};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(engine_() >> 11) * 0x1.0p-53); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

std::string topic_word(int topic, int i) {
  const auto slot = static_cast<std::size_t>(i) % kWordsPerTopic;
  if (topic < static_cast<int>(kTopicWords.size())) return kTopicWords[static_cast<std::size_t>(topic)][slot];
  return "topic" + std::to_string(topic) + "word" + std::to_string(slot);
}

}  // namespace

SyntheticCorpus generate_planted_corpus(const SyntheticSpec& spec) {
  if (spec.topics < 1 || spec.videos_per_topic < 1 || spec.frames_per_video < 1 || spec.scenes_per_topic < 1)
    throw UsageError("synthetic corpus sizes must be positive");
  if (spec.dimension < spec.topics * 2) throw UsageError("synthetic dimension too small for the topic count");

  Rng rng(spec.seed);
  const auto d = static_cast<std::size_t>(spec.dimension);
  const std::size_t block = d / static_cast<std::size_t>(spec.topics);

  // scenes[t][s]: a few strong entries inside topic t's block, faint background elsewhere
  std::vector<std::vector<std::vector<double>>> scenes(static_cast<std::size_t>(spec.topics));
  for (int t = 0; t < spec.topics; ++t) {
    for (int s = 0; s < spec.scenes_per_topic; ++s) {
      std::vector<double> v(d);
      for (auto& x : v) x = rng.uniform(0.0, 0.03);
      const std::size_t begin = static_cast<std::size_t>(t) * block;
      const std::size_t active = std::max<std::size_t>(1, block / 2);
      for (std::size_t a = 0; a < active; ++a) v[begin + (static_cast<std::size_t>(s) + 2 * a) % block] = rng.uniform(0.6, 1.0);
      scenes[static_cast<std::size_t>(t)].push_back(std::move(v));
    }
  }
  auto noisy_copy = [&](const std::vector<double>& base) {
    FeatureVector out(d);
    for (std::size_t k = 0; k < d; ++k) out[k] = static_cast<float>(base[k] + rng.uniform(0.0, spec.noise));
    return out;
  };

  std::map<std::string, int> video_topic;
  GroundTruth truth;
  std::vector<VideoRecord> videos;
  // scene_frames[t][s] -> frame ids showing that scene
  std::vector<std::vector<std::vector<std::string>>> scene_frames(
      static_cast<std::size_t>(spec.topics), std::vector<std::vector<std::string>>(static_cast<std::size_t>(spec.scenes_per_topic)));

  const int total_videos = spec.topics * spec.videos_per_topic;
  for (int n = 0; n < total_videos; ++n) {
    const int topic = n % spec.topics;  // interleave topics in manifest order
    char id[32];
    std::snprintf(id, sizeof(id), "v%03d", n);
    VideoRecord video;
    video.video_id = id;
    video.upload_time = 1303948800 + static_cast<std::int64_t>(rng.uniform(0.0, 86400.0 * 3)) +
                        static_cast<std::int64_t>(topic) * 3600;

    std::vector<std::string> title = {kQueryWords[0], kQueryWords[1]};
    for (int w = 0; w < 3; ++w) title.push_back(topic_word(topic, static_cast<int>(rng.index(kWordsPerTopic))));
    std::vector<std::string> description = {"the", kQueryWords[2]};
    for (int w = 0; w < 4; ++w) description.push_back(topic_word(topic, static_cast<int>(rng.index(kWordsPerTopic))));
    for (const auto& w : title) video.title += (video.title.empty() ? "" : " ") + w;
    for (const auto& w : description) video.description += (video.description.empty() ? "" : " ") + w;

    const std::size_t scene_offset = rng.index(static_cast<std::size_t>(spec.scenes_per_topic));
    for (int f = 0; f < spec.frames_per_video; ++f) {
      const std::size_t scene = (scene_offset + static_cast<std::size_t>(f)) % static_cast<std::size_t>(spec.scenes_per_topic);
      CandidateKeyframe frame;
      frame.frame_id = video.video_id + "_f" + std::to_string(f);
      frame.video_id = video.video_id;
      frame.shot_index = static_cast<std::uint32_t>(f);
      frame.play_order = static_cast<std::uint32_t>(f);
      frame.feature = noisy_copy(scenes[static_cast<std::size_t>(topic)][scene]);
      scene_frames[static_cast<std::size_t>(topic)][scene].push_back(frame.frame_id);
      video.frames.push_back(std::move(frame));
    }
    video_topic[video.video_id] = topic;
    videos.push_back(std::move(video));
  }

  std::vector<WebImage> images;
  for (int i = 0; i < spec.relevant_web_images; ++i) {
    const auto& scene = scenes[0][static_cast<std::size_t>(i % spec.scenes_per_topic)];
    images.push_back({"web" + std::to_string(i), noisy_copy(scene)});
  }
  for (int i = 0; i < spec.noisy_web_images; ++i) {
    FeatureVector v(d);
    for (auto& x : v) x = static_cast<float>(rng.uniform(0.0, 1.0));
    images.push_back({"noise" + std::to_string(i), std::move(v)});
  }

  WordVectors words;
  const auto dw = static_cast<std::size_t>(spec.word_dimension);
  auto add_word = [&](const std::string& word, std::size_t center) {
    std::vector<float> v(dw);
    for (std::size_t k = 0; k < dw; ++k) v[k] = static_cast<float>((k == center % dw ? 1.0 : 0.0) + rng.uniform(-0.05, 0.05));
    words.emplace(word, std::move(v));
  };
  for (const char* w : kQueryWords) add_word(w, 0);
  for (int t = 0; t < spec.topics; ++t)
    for (int i = 0; i < static_cast<int>(kWordsPerTopic); ++i) add_word(topic_word(t, i), static_cast<std::size_t>(t) + 1);

  for (int a = 0; a < spec.annotators; ++a) {
    auto& selection = truth.annotators["annotator" + std::to_string(a + 1)];
    for (auto& topic_scenes : scene_frames)
      for (auto& frames : topic_scenes)
        if (!frames.empty() && rng.uniform(0.0, 1.0) < 0.8) selection.insert(frames[rng.index(frames.size())]);
    if (selection.empty()) selection.insert(scene_frames[0][0].front());
  }

  return SyntheticCorpus{QueryCorpus("royal wedding", d, std::move(videos), std::move(images), std::move(words)),
                         std::move(video_topic), std::move(truth)};
}

}  // namespace quasc
