#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "quasc/events.hpp"

namespace quasc {

struct RenderConfig {
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> thumbnail_dir;  // holds <frame_id>.jpg / .jpeg / .png
  bool include_scores = false;
};

nlohmann::ordered_json to_json(const EventSummary& summary);
EventSummary event_summary_from_json(const nlohmann::json& doc);

/// Writes the summary as JSON. Keys of `header` (version, config echo, ...) come
/// first, followed by query, events and hidden_events. Output is deterministic.
void emit_json(const EventSummary& summary, const std::filesystem::path& path,
               const nlohmann::ordered_json& header = nlohmann::ordered_json::object());

/// Writes <output_dir>/ekp.html: one heading per event, then its keyframe grid.
/// Thumbnails are inlined as data URIs; missing ones become placeholder tiles.
std::filesystem::path emit_html(const EventSummary& summary, const RenderConfig& config);

}  // namespace quasc
