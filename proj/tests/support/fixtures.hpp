#pragma once

#include <string>
#include <vector>

#include "quasc/corpus.hpp"

namespace quasc::testing {

struct VideoSpec {
  std::vector<FeatureVector> frames;
  std::string title;
  std::int64_t upload_time = 0;
};

/// Videos v0, v1, ... with frames f0, f1, ... numbered across the corpus;
/// web images w0, w1, ...
inline QueryCorpus make_corpus(const std::vector<VideoSpec>& videos, const std::vector<FeatureVector>& web = {},
                               std::string query = "test query") {
  const std::size_t d = videos.at(0).frames.at(0).size();
  std::vector<VideoRecord> records;
  int frame_no = 0;
  for (std::size_t v = 0; v < videos.size(); ++v) {
    VideoRecord rec;
    rec.video_id = "v" + std::to_string(v);
    rec.title = videos[v].title;
    rec.upload_time = videos[v].upload_time;
    for (std::size_t f = 0; f < videos[v].frames.size(); ++f) {
      rec.frames.push_back({"f" + std::to_string(frame_no++), rec.video_id, static_cast<std::uint32_t>(f),
                            static_cast<std::uint32_t>(f), videos[v].frames[f]});
    }
    records.push_back(std::move(rec));
  }
  std::vector<WebImage> images;
  for (std::size_t i = 0; i < web.size(); ++i) images.push_back({"w" + std::to_string(i), web[i]});
  return QueryCorpus(std::move(query), d, std::move(records), std::move(images));
}

/// One frame per video.
inline QueryCorpus single_frame_videos(const std::vector<FeatureVector>& frames,
                                       const std::vector<FeatureVector>& web = {}) {
  std::vector<VideoSpec> specs;
  for (const auto& f : frames) specs.push_back({{f}, "", 0});
  return make_corpus(specs, web);
}

}  // namespace quasc::testing
