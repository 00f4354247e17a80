#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "quasc/corpus.hpp"

namespace quasc {

/// Planted-topic corpus: each topic owns a block of feature dimensions and a
/// small vocabulary; videos of a topic reuse that topic's scenes, so the visual
/// and textual similarities are block structured.
struct SyntheticSpec {
  int topics = 3;
  int videos_per_topic = 5;
  int frames_per_video = 4;
  int scenes_per_topic = 3;
  int dimension = 24;
  int word_dimension = 8;
  int relevant_web_images = 5;  // drawn from topic 0 scenes
  int noisy_web_images = 1;     // unrelated to every topic
  int annotators = 4;
  double noise = 0.05;
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  QueryCorpus corpus;
  std::map<std::string, int> video_topic;
  GroundTruth truth;
};

SyntheticCorpus generate_planted_corpus(const SyntheticSpec& spec);

}  // namespace quasc
