#include "quasc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "quasc/corpus.hpp"
#include "quasc/eval.hpp"
#include "quasc/events.hpp"
#include "quasc/render.hpp"
#include "quasc/solver.hpp"
#include "quasc/synthetic.hpp"
#include "quasc/version.hpp"

namespace quasc::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct SummarizeOptions {
  std::string manifest;
  std::string out_dir = ".";
  SolverConfig solver;
  bool normalize = false;
  std::uint64_t seed = 0;
};

struct EventsOptions {
  std::string manifest;
  std::string summary;
  std::string out_dir = ".";
  double alpha = 0.7;
  double tau_nd = 0.9;
  std::string k_events = "auto";
  std::optional<int> k_words;
  std::string stopwords;
  std::string text_fields = "title+description";
  std::string sigma = "median";
  std::string thumbnails;
  bool include_scores = false;
  bool normalize = false;
  std::uint64_t seed = 0;
};

struct EvalOptions {
  std::string summary;
  std::string ground_truth;
  std::string manifest;
  std::string out = "metrics.json";
  double threshold = 0.6;
  std::string match_order = "generated";
  bool normalize = false;
};

struct ConsistencyOptions {
  std::string ground_truth;
  std::string manifest;
  std::string out = "consistency.json";
};

struct SynthOptions {
  std::string out_dir = ".";
  SyntheticSpec spec;
};

void write_json(const fs::path& path, const ordered_json& doc) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

ordered_json header(const char* command, ordered_json config) {
  ordered_json doc;
  doc["version"] = std::string("quasc ") + kVersion;
  doc["command"] = command;
  doc["config"] = std::move(config);
  return doc;
}

void report(const Diagnostics& diagnostics, std::ostream& err) {
  for (const auto& w : diagnostics.warnings) err << "warning: " << w << '\n';
}

QueryCorpus load(const std::string& manifest, bool normalize) {
  QueryCorpus corpus = load_corpus(manifest);
  return normalize ? l2_normalized(corpus) : corpus;
}

// Reads summary.json written by `summarize` and checks it against the corpus.
Summary read_summary(const fs::path& path, const QueryCorpus& corpus) {
  const json doc = read_json(path);
  Summary summary;
  try {
    if (doc.contains("query") && doc.at("query").get<std::string>() != corpus.query())
      throw DataError("summary '" + path.string() + "' was produced for query '" + doc.at("query").get<std::string>() +
                      "', not '" + corpus.query() + "'");
    summary.threshold_used = doc.at("threshold").get<double>();
    for (const json& k : doc.at("keyframes"))
      summary.keyframes.push_back({k.at("frame_id").get<std::string>(), k.at("score").get<double>()});
  } catch (const json::exception& e) {
    throw DataError("malformed summary '" + path.string() + "': " + e.what());
  }
  for (const auto& k : summary.keyframes)
    if (!corpus.find_frame(k.frame_id))
      throw DataError("summary keyframe '" + k.frame_id + "' does not belong to this corpus (summary/corpus mismatch)");
  return summary;
}

int cmd_summarize(const SummarizeOptions& opt, std::ostream& out, std::ostream& err) {
  opt.solver.validate();
  const QueryCorpus corpus = load(opt.manifest, opt.normalize);

  Diagnostics diagnostics;
  const WebImageWeights weights = adaptive_weights(corpus, &diagnostics);
  const ImportanceScores scores = solve(corpus, weights, opt.solver);
  const Summary summary = select_keyframes(scores, opt.solver.tc);
  if (!scores.converged)
    diagnostics.warn("coordinate descent did not converge within " + std::to_string(opt.solver.max_iters) + " sweeps");

  ordered_json config;
  config["manifest"] = opt.manifest;
  config["gamma"] = opt.solver.gamma;
  config["tc"] = opt.solver.tc;
  config["max_iters"] = opt.solver.max_iters;
  config["tolerance"] = opt.solver.tolerance;
  config["normalize_features"] = opt.normalize;
  config["seed"] = opt.seed;

  ordered_json summary_doc = header("summarize", config);
  summary_doc["query"] = corpus.query();
  summary_doc["threshold"] = summary.threshold_used;
  ordered_json keyframes = ordered_json::array();
  for (const auto& k : summary.keyframes) keyframes.push_back({{"frame_id", k.frame_id}, {"score", k.score}});
  summary_doc["keyframes"] = std::move(keyframes);
  summary_doc["warnings"] = diagnostics.warnings;

  ordered_json scores_doc = header("summarize", config);
  scores_doc["query"] = corpus.query();
  scores_doc["objective_value"] = scores.objective_value;
  scores_doc["iterations_used"] = scores.iterations_used;
  scores_doc["converged"] = scores.converged;
  ordered_json rows = ordered_json::array();
  for (std::size_t j = 0; j < scores.frame_ids.size(); ++j)
    rows.push_back({{"frame_id", scores.frame_ids[j]}, {"score", scores.scores[j]}});
  scores_doc["scores"] = std::move(rows);
  ordered_json rho = ordered_json::array();
  for (std::size_t i = 0; i < weights.image_ids.size(); ++i)
    rho.push_back({{"image_id", weights.image_ids[i]}, {"rho", weights.rho[i]}});
  scores_doc["web_image_weights"] = std::move(rho);
  scores_doc["warnings"] = diagnostics.warnings;

  const fs::path dir(opt.out_dir);
  write_json(dir / "summary.json", summary_doc);
  write_json(dir / "scores.json", scores_doc);
  report(diagnostics, err);
  out << "selected " << summary.keyframes.size() << " of " << corpus.frame_count() << " candidate keyframes -> "
      << (dir / "summary.json").string() << '\n';
  return scores.converged ? 0 : static_cast<int>(ErrorKind::Numerical);
}

int cmd_events(const EventsOptions& opt, std::ostream& out, std::ostream& err) {
  const QueryCorpus corpus = load(opt.manifest, opt.normalize);
  const Summary summary = read_summary(opt.summary, corpus);

  EventPipelineConfig config;
  config.fusion.alpha = opt.alpha;
  if (opt.k_events != "auto") {
    try {
      std::size_t used = 0;
      config.fusion.k_events = std::stoi(opt.k_events, &used);
      if (used != opt.k_events.size()) throw std::invalid_argument(opt.k_events);
    } catch (const std::logic_error&) {
      throw UsageError("--k-events must be 'auto' or a positive integer");
    }
  }
  config.near_duplicate.tau_nd = opt.tau_nd;
  if (opt.text_fields == "title")
    config.text_fields = TextFields::Title;
  else if (opt.text_fields == "title+description")
    config.text_fields = TextFields::TitleAndDescription;
  else
    throw UsageError("--text-fields must be 'title' or 'title+description'");
  if (!opt.stopwords.empty()) config.stopwords = load_stopwords(opt.stopwords);
  config.k_words = opt.k_words;
  if (opt.sigma != "median") {
    try {
      config.sigma = SigmaMode::constant(std::stod(opt.sigma));
    } catch (const std::logic_error&) {
      throw UsageError("--sigma must be 'median' or a positive number");
    }
  }
  config.seed = opt.seed;

  Diagnostics diagnostics;
  const EventPipelineResult result = build_events(corpus, summary, config, &diagnostics);

  ordered_json echo;
  echo["manifest"] = opt.manifest;
  echo["summary"] = opt.summary;
  echo["alpha"] = opt.alpha;
  echo["tau_nd"] = opt.tau_nd;
  echo["k_events"] = opt.k_events;
  echo["k_words"] = opt.k_words ? ordered_json(*opt.k_words) : ordered_json("default");
  echo["stopwords"] = opt.stopwords.empty() ? "default" : opt.stopwords;
  echo["text_fields"] = opt.text_fields;
  echo["sigma"] = opt.sigma;
  echo["normalize_features"] = opt.normalize;
  echo["seed"] = opt.seed;

  ordered_json head = header("events", echo);
  head["event_count"] = result.partition.event_count;
  head["warnings"] = diagnostics.warnings;

  RenderConfig render;
  render.output_dir = opt.out_dir;
  if (!opt.thumbnails.empty()) render.thumbnail_dir = opt.thumbnails;
  render.include_scores = opt.include_scores;

  fs::create_directories(render.output_dir);
  emit_json(result.summary, render.output_dir / "ekp.json", head);
  emit_html(result.summary, render);
  report(diagnostics, err);
  out << result.partition.event_count << " events (" << result.summary.events.size() << " with keyframes) -> "
      << (render.output_dir / "ekp.json").string() << '\n';
  return 0;
}

int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
  MatchConfig config;
  config.distance_threshold = opt.threshold;
  if (opt.match_order == "generated")
    config.order = MatchOrder::GeneratedFirst;
  else if (opt.match_order == "truth")
    config.order = MatchOrder::TruthFirst;
  else
    throw UsageError("--match-order must be 'generated' or 'truth'");
  config.validate();

  const QueryCorpus corpus = load(opt.manifest, opt.normalize);
  const Summary summary = read_summary(opt.summary, corpus);
  const GroundTruth truth = load_ground_truth(opt.ground_truth, corpus);

  Diagnostics diagnostics;
  const MetricsReport metrics = prf(summary, truth, corpus, config, &diagnostics);

  ordered_json echo;
  echo["summary"] = opt.summary;
  echo["ground_truth"] = opt.ground_truth;
  echo["manifest"] = opt.manifest;
  echo["threshold"] = opt.threshold;
  echo["match_order"] = opt.match_order;
  echo["normalize_features"] = opt.normalize;

  ordered_json doc = header("eval", echo);
  ordered_json rows = ordered_json::object();
  for (const auto& [annotator, m] : metrics.per_annotator) {
    rows[annotator] = {{"n_M", m.n_matched}, {"n_AG", m.n_generated}, {"n_GT", m.n_truth},    {"P", m.precision},
                       {"R", m.recall},      {"F", m.f_score},       {"degenerate", m.degenerate}};
  }
  doc["per_annotator"] = std::move(rows);
  doc["average"] = {{"P", metrics.average.precision}, {"R", metrics.average.recall}, {"F", metrics.average.f_score}};
  doc["warnings"] = diagnostics.warnings;
  write_json(opt.out, doc);
  report(diagnostics, err);
  out << "P=" << metrics.average.precision << " R=" << metrics.average.recall << " F=" << metrics.average.f_score
      << " over " << metrics.per_annotator.size() << " annotators -> " << opt.out << '\n';
  return 0;
}

int cmd_consistency(const ConsistencyOptions& opt, std::ostream& out, std::ostream&) {
  const GroundTruth truth =
      opt.manifest.empty() ? load_ground_truth(opt.ground_truth) : load_ground_truth(opt.ground_truth, load_corpus(opt.manifest));
  const ConsistencyReport result = consistency(truth);

  ordered_json echo;
  echo["ground_truth"] = opt.ground_truth;
  echo["manifest"] = opt.manifest.empty() ? ordered_json(nullptr) : ordered_json(opt.manifest);
  ordered_json doc = header("consistency", echo);
  ordered_json rows = ordered_json::object();
  for (const auto& [annotator, f] : result.per_annotator) rows[annotator] = f;
  doc["per_annotator"] = std::move(rows);
  doc["min"] = result.min;
  doc["max"] = result.max;
  doc["mean"] = result.mean;
  write_json(opt.out, doc);
  out << "mean consistency " << result.mean << " (min " << result.min << ", max " << result.max << ") -> " << opt.out
      << '\n';
  return 0;
}

int cmd_synth(const SynthOptions& opt, std::ostream& out, std::ostream&) {
  const SyntheticCorpus synthetic = generate_planted_corpus(opt.spec);
  const fs::path manifest = write_corpus(synthetic.corpus, opt.out_dir);
  write_ground_truth(fs::path(opt.out_dir) / "groundtruth.json", synthetic.truth);
  ordered_json topics = ordered_json::object();
  for (const auto& [video, topic] : synthetic.video_topic) topics[video] = topic;
  write_json(fs::path(opt.out_dir) / "planted_topics.json", topics);
  out << "wrote " << manifest.string() << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Query-aware multi-video summarization", "quasc"};
  app.set_version_flag("--version", std::string("quasc ") + kVersion);
  app.require_subcommand(1);

  SummarizeOptions sum;
  auto* summarize = app.add_subcommand("summarize", "Score candidate keyframes and select the summary");
  summarize->add_option("manifest", sum.manifest, "Corpus manifest JSON")->required();
  summarize->add_option("--out", sum.out_dir, "Output directory for summary.json and scores.json");
  summarize->add_option("--gamma", sum.solver.gamma, "L1 regularization weight")->capture_default_str();
  summarize->add_option("--tc", sum.solver.tc, "Selection threshold on coefficients")->capture_default_str();
  summarize->add_option("--max-iters", sum.solver.max_iters, "Maximum coordinate-descent sweeps")->capture_default_str();
  summarize->add_option("--tolerance", sum.solver.tolerance, "Convergence tolerance")->capture_default_str();
  summarize->add_option("--seed", sum.seed, "Random seed (echoed; the solver is deterministic)");
  summarize->add_flag("--normalize-features", sum.normalize, "L2-normalize features at load time");

  EventsOptions ev;
  auto* events = app.add_subcommand("events", "Group summary keyframes into events and render the EKP view");
  events->add_option("manifest", ev.manifest, "Corpus manifest JSON")->required();
  events->add_option("summary", ev.summary, "summary.json from `summarize`")->required();
  events->add_option("--out", ev.out_dir, "Output directory for ekp.json and ekp.html");
  events->add_option("--alpha", ev.alpha, "Visual graph weight in the fusion")->capture_default_str();
  events->add_option("--tau-nd", ev.tau_nd, "Cosine threshold for near-duplicate frames")->capture_default_str();
  events->add_option("--k-events", ev.k_events, "Number of events, or 'auto'")->capture_default_str();
  events->add_option("--k-words", ev.k_words, "Number of word clusters (default min(50, max(2, vocab/10)))");
  events->add_option("--stopwords", ev.stopwords, "Stopword list, one token per line");
  events->add_option("--text-fields", ev.text_fields, "title | title+description")->capture_default_str();
  events->add_option("--sigma", ev.sigma, "Text kernel bandwidth: 'median' or a number")->capture_default_str();
  events->add_option("--thumbnails", ev.thumbnails, "Directory with <frame_id>.jpg thumbnails");
  events->add_flag("--include-scores", ev.include_scores, "Show scores on keyframe tiles");
  events->add_option("--seed", ev.seed, "Seed for word and spectral k-means");
  events->add_flag("--normalize-features", ev.normalize, "L2-normalize features at load time");

  EvalOptions evl;
  auto* eval = app.add_subcommand("eval", "Precision/recall/F-score against annotator ground truth");
  eval->add_option("summary", evl.summary, "summary.json from `summarize`")->required();
  eval->add_option("groundtruth", evl.ground_truth, "Ground-truth JSON")->required();
  eval->add_option("manifest", evl.manifest, "Corpus manifest JSON")->required();
  eval->add_option("--out", evl.out, "Metrics JSON path")->capture_default_str();
  eval->add_option("--threshold", evl.threshold, "Normalized distance threshold")->capture_default_str();
  eval->add_option("--match-order", evl.match_order, "generated | truth")->capture_default_str();
  eval->add_flag("--normalize-features", evl.normalize, "L2-normalize features at load time");

  ConsistencyOptions con;
  auto* cons = app.add_subcommand("consistency", "Human label consistency across annotators");
  cons->add_option("groundtruth", con.ground_truth, "Ground-truth JSON")->required();
  cons->add_option("--manifest", con.manifest, "Resolve frame ids against this corpus");
  cons->add_option("--out", con.out, "Report JSON path")->capture_default_str();

  SynthOptions syn;
  auto* synth = app.add_subcommand("synth", "Write a synthetic planted-topic corpus with ground truth");
  synth->add_option("--out", syn.out_dir, "Output directory");
  synth->add_option("--seed", syn.spec.seed, "Generator seed")->capture_default_str();
  synth->add_option("--topics", syn.spec.topics, "Planted topics")->capture_default_str();
  synth->add_option("--videos-per-topic", syn.spec.videos_per_topic)->capture_default_str();
  synth->add_option("--frames-per-video", syn.spec.frames_per_video)->capture_default_str();
  synth->add_option("--dimension", syn.spec.dimension)->capture_default_str();

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("quasc");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::Usage);
  }

  try {
    if (*summarize) return cmd_summarize(sum, out, err);
    if (*events) return cmd_events(ev, out, err);
    if (*eval) return cmd_eval(evl, out, err);
    if (*cons) return cmd_consistency(con, out, err);
    if (*synth) return cmd_synth(syn, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::Data);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::Data);
  }
  return static_cast<int>(ErrorKind::Usage);
}

}  // namespace quasc::cli
