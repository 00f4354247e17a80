#pragma once

// Query-aware sparse coding: every candidate keyframe is a dictionary atom, and
// one shared non-negative coefficient vector a reconstructs both the frames and
// the relevance-weighted web images:
//
//   f(a) = 1/(2N) sum_i ||x_i - X a||^2 + 1/(2L) sum_i rho_i ||z_i - X a||^2 + gamma ||a||_1,  a >= 0
//
// rho_i is the mean cosine similarity of web image i to all frames. The web
// term is dropped when L = 0. Coefficients above a threshold become keyframes.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quasc/corpus.hpp"

namespace quasc {

struct SolverConfig {
  double gamma = 0.005;
  double tc = 0.01;
  int max_iters = 10000;  // full coordinate sweeps
  double tolerance = 1e-8;

  void validate() const;
};

/// Adaptive web-image weights, aligned with corpus.web_images().
struct WebImageWeights {
  std::vector<std::string> image_ids;
  std::vector<double> rho;

  double at(const std::string& image_id) const;
};

double cosine_similarity(std::span<const float> a, std::span<const float> b);

/// rho_i = (1/N) sum_j cos(z_i, x_j). A zero-norm vector contributes cosine 0
/// and is reported; any negative rho_i is reported too.
WebImageWeights adaptive_weights(const QueryCorpus& corpus, Diagnostics* diagnostics = nullptr);

struct ImportanceScores {
  std::vector<std::string> frame_ids;  // corpus column order
  std::vector<double> scores;          // aligned with frame_ids
  double objective_value = 0.0;
  int iterations_used = 0;
  bool converged = false;
  std::vector<double> objective_history;  // objective after each sweep; front() is f(0)

  double score(const std::string& frame_id) const;
};

/// Dense form of the problem: frames and web images as d x N and d x L columns.
struct SparseCodingProblem {
  Eigen::MatrixXd frames;
  Eigen::MatrixXd web;
  Eigen::VectorXd rho;

  static SparseCodingProblem from_corpus(const QueryCorpus& corpus, const WebImageWeights& weights);
};

struct CoefficientSolution {
  Eigen::VectorXd a;
  double objective_value = 0.0;
  int iterations_used = 0;
  bool converged = false;
  std::vector<double> objective_history;
};

/// Cyclic coordinate descent on the Gram form of the objective. `order` lists the
/// coordinates in sweep order (empty = 0..N-1). A column identical to one earlier
/// in the sweep is held at 0. While the support is unchanged, an occasional exact
/// step on that support speeds up ill-conditioned problems; it is only taken when
/// it does not raise the objective. Converged means a full sweep moved no
/// coefficient by `tolerance` or more and the KKT violation is at most `tolerance`.
/// Throws NumericalError when the quadratic weight c = 1 + mean(rho) is not positive.
CoefficientSolution solve_coefficients(const SparseCodingProblem& problem, const SolverConfig& config,
                                       std::span<const std::size_t> order = {});

/// Sweeps coordinates in ascending frame-id order, starting from a = 0.
/// Non-convergence is reported through `converged`, not thrown.
ImportanceScores solve(const QueryCorpus& corpus, const WebImageWeights& weights, const SolverConfig& config);

double objective_value(const SparseCodingProblem& problem, std::span<const double> a, double gamma);
double objective_value(const QueryCorpus& corpus, const WebImageWeights& weights, std::span<const double> a,
                       double gamma);

struct SummaryEntry {
  std::string frame_id;
  double score = 0.0;
};

struct Summary {
  std::vector<SummaryEntry> keyframes;  // descending score, frame_id ascending on ties
  double threshold_used = 0.0;
};

Summary select_keyframes(const ImportanceScores& scores, double tc);

}  // namespace quasc
