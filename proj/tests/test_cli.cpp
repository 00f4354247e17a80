#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "quasc/cli.hpp"
#include "support/oracles.hpp"

using quasc::testing::TempDir;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run quasc_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = quasc::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json read(const std::filesystem::path& path) {
  std::ifstream in(path);
  return json::parse(in);
}

// Writes a planted corpus and runs summarize on it.
struct Workspace {
  TempDir dir{"cli"};
  std::string manifest;
  std::string truth;
  std::string summary;

  explicit Workspace(const std::string& seed = "3") {
    REQUIRE(quasc_run({"synth", "--out", (dir / "corpus").string(), "--seed", seed}).code == 0);
    manifest = (dir / "corpus" / "manifest.json").string();
    truth = (dir / "corpus" / "groundtruth.json").string();
    summary = (dir / "run" / "summary.json").string();
    const Run r = quasc_run({"summarize", manifest, "--out", (dir / "run").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
  }
};

}  // namespace

TEST_CASE("summarize writes the summary and the score table") {
  Workspace ws;
  const json summary = read(ws.summary);
  CHECK(summary["command"] == "summarize");
  CHECK(summary["query"] == "royal wedding");
  CHECK(summary["config"]["gamma"] == 0.005);
  CHECK(summary["threshold"] == 0.01);
  REQUIRE(!summary["keyframes"].empty());
  double previous = 1e300;
  for (const auto& k : summary["keyframes"]) {
    CHECK(k["score"].get<double>() > 0.01);
    CHECK(k["score"].get<double>() <= previous);
    previous = k["score"].get<double>();
  }

  const json scores = read(ws.dir / "run" / "scores.json");
  CHECK(scores["converged"] == true);
  CHECK(scores["scores"].size() == 60);
  CHECK(scores["web_image_weights"].size() == 6);
}

TEST_CASE("summarize with a huge gamma selects nothing") {
  Workspace ws;
  const Run r = quasc_run({"summarize", ws.manifest, "--out", (ws.dir / "big").string(), "--gamma", "1e6"});
  CHECK(r.code == 0);
  CHECK(read(ws.dir / "big" / "summary.json")["keyframes"].empty());
}

TEST_CASE("events recovers the planted topics and renders both views") {
  Workspace ws;
  const auto out = ws.dir / "ekp";
  const Run r = quasc_run({"events", ws.manifest, ws.summary, "--out", out.string(), "--include-scores"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const json ekp = read(out / "ekp.json");
  CHECK(ekp["command"] == "events");
  CHECK(ekp["event_count"] == 3);

  const json topics = read(ws.dir / "corpus" / "planted_topics.json");
  for (const auto& group : ekp["events"]) {
    std::set<int> planted;
    for (const auto& v : group["video_ids"]) planted.insert(topics[v.get<std::string>()].get<int>());
    CHECK(planted.size() == 1);
  }
  std::ifstream html(out / "ekp.html");
  CHECK(html.good());

  SUBCASE("alpha 0 relies on text alone and still runs") {
    CHECK(quasc_run({"events", ws.manifest, ws.summary, "--out", (ws.dir / "a0").string(), "--alpha", "0"}).code == 0);
    CHECK(read(ws.dir / "a0" / "ekp.json")["config"]["alpha"] == 0.0);
  }
  SUBCASE("fixed event count") {
    CHECK(quasc_run({"events", ws.manifest, ws.summary, "--out", (ws.dir / "k2").string(), "--k-events", "2"}).code == 0);
    CHECK(read(ws.dir / "k2" / "ekp.json")["event_count"] == 2);
  }
  SUBCASE("bad option values are usage errors") {
    CHECK(quasc_run({"events", ws.manifest, ws.summary, "--k-events", "many"}).code == 1);
    CHECK(quasc_run({"events", ws.manifest, ws.summary, "--alpha", "2", "--out", (ws.dir / "x").string()}).code == 1);
    CHECK(quasc_run({"events", ws.manifest, ws.summary, "--text-fields", "tags"}).code == 1);
  }
}

TEST_CASE("a summary from another corpus is rejected") {
  Workspace a("3");
  TempDir other("cli_other");
  REQUIRE(quasc_run({"synth", "--out", other.path().string(), "--videos-per-topic", "2"}).code == 0);
  const Run r = quasc_run({"events", (other / "manifest.json").string(), a.summary, "--out", (other / "ekp").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("mismatch") != std::string::npos);
}

TEST_CASE("eval reports one row per annotator") {
  Workspace ws;
  const auto metrics = ws.dir / "metrics.json";
  REQUIRE(quasc_run({"eval", ws.summary, ws.truth, ws.manifest, "--out", metrics.string()}).code == 0);
  const json m = read(metrics);
  CHECK(m["per_annotator"].size() == 4);
  for (const auto& [name, row] : m["per_annotator"].items()) {
    CHECK(row["n_M"].get<int>() <= std::min(row["n_AG"].get<int>(), row["n_GT"].get<int>()));
    CHECK(row["F"].get<double>() >= 0.0);
    CHECK(row["F"].get<double>() <= 1.0);
  }
  CHECK(m["average"]["F"].get<double>() > 0.0);

  REQUIRE(quasc_run({"eval", ws.summary, ws.truth, ws.manifest, "--out", metrics.string(), "--threshold", "0"}).code == 0);
  for (const auto& [name, row] : read(metrics)["per_annotator"].items()) {
    CHECK(row["n_M"] == 0);
    CHECK(row["F"] == 0.0);
  }
  CHECK(quasc_run({"eval", ws.summary, ws.truth, ws.manifest, "--match-order", "random"}).code == 1);
}

TEST_CASE("consistency") {
  TempDir dir("cli_consistency");
  std::ofstream(dir / "same.json") << R"({"a": ["f1", "f2"], "b": ["f2", "f1"]})";
  std::ofstream(dir / "apart.json") << R"({"a": ["f1"], "b": ["f2"], "c": ["f3"]})";
  REQUIRE(quasc_run({"consistency", (dir / "same.json").string(), "--out", (dir / "s.json").string()}).code == 0);
  CHECK(read(dir / "s.json")["mean"] == 1.0);
  REQUIRE(quasc_run({"consistency", (dir / "apart.json").string(), "--out", (dir / "d.json").string()}).code == 0);
  CHECK(read(dir / "d.json")["mean"] == 0.0);
  CHECK(read(dir / "d.json")["per_annotator"].size() == 3);

  Workspace ws;
  const Run r = quasc_run({"consistency", ws.truth, "--manifest", ws.manifest, "--out", (dir / "w.json").string()});
  CHECK(r.code == 0);
  CHECK(quasc_run({"consistency", (dir / "same.json").string(), "--manifest", ws.manifest}).code == 2);  // unknown ids
}

TEST_CASE("exit codes") {
  TempDir dir("cli_codes");
  CHECK(quasc_run({"summarize", (dir / "missing.json").string()}).code == 2);
  CHECK(quasc_run({}).code == 1);
  CHECK(quasc_run({"summarize"}).code == 1);
  CHECK(quasc_run({"summarize", "--bogus"}).code == 1);
  CHECK(quasc_run({"--help"}).code == 0);
  CHECK(quasc_run({"--version"}).code == 0);

  Workspace ws;
  CHECK(quasc_run({"summarize", ws.manifest, "--out", (dir / "neg").string(), "--gamma", "-1"}).code == 1);
  // one sweep cannot meet the tolerance: outputs are written, exit code is numerical
  const Run r = quasc_run({"summarize", ws.manifest, "--out", (dir / "short").string(), "--max-iters", "1"});
  CHECK(r.code == 3);
  CHECK(read(dir / "short" / "scores.json")["converged"] == false);
  CHECK(r.err.find("did not converge") != std::string::npos);
}
