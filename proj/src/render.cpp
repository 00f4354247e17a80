#include "quasc/render.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

namespace quasc {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json group_json(const EventGroup& g) {
  ordered_json out;
  out["event_id"] = g.event_id;
  out["label_words"] = g.label_words;
  out["video_ids"] = g.video_ids;
  ordered_json frames = ordered_json::array();
  for (const auto& k : g.keyframes)
    frames.push_back({{"frame_id", k.frame_id}, {"video_id", k.video_id}, {"score", k.score}});
  out["keyframes"] = std::move(frames);
  return out;
}

EventGroup group_from_json(const nlohmann::json& j) {
  EventGroup g;
  g.event_id = j.at("event_id").get<int>();
  g.label_words = j.at("label_words").get<std::vector<std::string>>();
  g.video_ids = j.value("video_ids", std::vector<std::string>{});
  for (const auto& k : j.at("keyframes"))
    g.keyframes.push_back({k.at("frame_id").get<std::string>(), k.at("video_id").get<std::string>(),
                           k.at("score").get<double>()});
  return g;
}

std::string html_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

std::string base64(const std::string& bytes) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) | (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                       static_cast<unsigned char>(bytes[i + 2]);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i < bytes.size()) {
    unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
    if (i + 1 < bytes.size()) v |= static_cast<unsigned char>(bytes[i + 1]) << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += i + 1 < bytes.size() ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::optional<std::string> thumbnail_uri(const RenderConfig& config, const std::string& frame_id) {
  if (!config.thumbnail_dir) return std::nullopt;
  static constexpr std::array<std::pair<const char*, const char*>, 3> kTypes = {
      {{".jpg", "image/jpeg"}, {".jpeg", "image/jpeg"}, {".png", "image/png"}}};
  for (const auto& [ext, mime] : kTypes) {
    const auto path = *config.thumbnail_dir / (frame_id + ext);
    std::ifstream in(path, std::ios::binary);
    if (!in) continue;
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return std::string("data:") + mime + ";base64," + base64(bytes);
  }
  return std::nullopt;
}

constexpr const char* kStyle = R"(body{font-family:sans-serif;margin:2em;background:#fafafa;color:#222}
h1{font-size:1.5em}
section.event{margin-bottom:2em}
section.event h2{font-size:1.1em;border-bottom:1px solid #ccc;padding-bottom:.3em}
.keyframes{display:flex;flex-wrap:wrap;gap:.8em}
figure.tile{margin:0;width:160px}
figure.tile img,.placeholder{width:160px;height:90px;object-fit:cover;display:block}
.placeholder{background:#ddd;display:flex;align-items:center;justify-content:center;font-size:.8em;overflow:hidden}
figcaption{font-size:.75em;margin-top:.2em;word-break:break-all})";

}  // namespace

ordered_json to_json(const EventSummary& summary) {
  ordered_json out;
  out["query"] = summary.query;
  ordered_json events = ordered_json::array();
  for (const auto& g : summary.events) events.push_back(group_json(g));
  out["events"] = std::move(events);
  ordered_json hidden = ordered_json::array();
  for (const auto& g : summary.hidden_events) hidden.push_back(group_json(g));
  out["hidden_events"] = std::move(hidden);
  return out;
}

EventSummary event_summary_from_json(const nlohmann::json& doc) {
  try {
    EventSummary summary;
    summary.query = doc.at("query").get<std::string>();
    for (const auto& g : doc.at("events")) summary.events.push_back(group_from_json(g));
    if (doc.contains("hidden_events"))
      for (const auto& g : doc.at("hidden_events")) summary.hidden_events.push_back(group_from_json(g));
    return summary;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed event summary JSON: ") + e.what());
  }
}

void emit_json(const EventSummary& summary, const std::filesystem::path& path, const ordered_json& header) {
  ordered_json doc = header.is_object() ? header : ordered_json::object();
  const ordered_json body = to_json(summary);
  for (const auto& [key, value] : body.items()) doc[key] = value;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

std::filesystem::path emit_html(const EventSummary& summary, const RenderConfig& config) {
  std::filesystem::create_directories(config.output_dir);
  std::ostringstream html;
  html << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>"
       << html_escape(summary.query) << "</title>\n<style>\n" << kStyle << "\n</style>\n</head>\n<body>\n";
  html << "<h1>" << html_escape(summary.query) << "</h1>\n";

  for (const EventGroup& g : summary.events) {
    std::string heading;
    for (const auto& word : g.label_words) heading += (heading.empty() ? "" : " ") + word;
    if (heading.empty()) heading = "(unlabeled event)";

    html << "<section class=\"event\" data-event-id=\"" << g.event_id << "\">\n";
    html << "<h2>" << html_escape(heading) << "</h2>\n<div class=\"keyframes\">\n";
    for (const EventKeyframe& k : g.keyframes) {
      html << "<figure class=\"tile\" data-frame-id=\"" << html_escape(k.frame_id) << "\">";
      if (auto uri = thumbnail_uri(config, k.frame_id))
        html << "<img src=\"" << *uri << "\" alt=\"" << html_escape(k.frame_id) << "\">";
      else
        html << "<div class=\"placeholder\">" << html_escape(k.frame_id) << "</div>";
      html << "<figcaption>" << html_escape(k.video_id);
      if (config.include_scores) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", k.score);
        html << " <span class=\"score\">" << buf << "</span>";
      }
      html << "</figcaption></figure>\n";
    }
    html << "</div>\n</section>\n";
  }
  html << "</body>\n</html>\n";

  const auto path = config.output_dir / "ekp.html";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << html.str();
  if (!out) throw DataError("write failed for '" + path.string() + "'");
  return path;
}

}  // namespace quasc
