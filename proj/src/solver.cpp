#include "quasc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace quasc {

void SolverConfig::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw UsageError("gamma must be a positive finite number");
  if (!(tc > 0.0) || !std::isfinite(tc)) throw UsageError("tc must be a positive finite number");
  if (max_iters <= 0) throw UsageError("max_iters must be positive");
  if (!(tolerance > 0.0)) throw UsageError("tolerance must be positive");
}

double WebImageWeights::at(const std::string& image_id) const {
  for (std::size_t i = 0; i < image_ids.size(); ++i)
    if (image_ids[i] == image_id) return rho[i];
  throw DataError("no adaptive weight for web image '" + image_id + "'");
}

double ImportanceScores::score(const std::string& frame_id) const {
  for (std::size_t i = 0; i < frame_ids.size(); ++i)
    if (frame_ids[i] == frame_id) return scores[i];
  throw DataError("no importance score for frame '" + frame_id + "'");
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += static_cast<double>(a[k]) * b[k];
    na += static_cast<double>(a[k]) * a[k];
    nb += static_cast<double>(b[k]) * b[k];
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

bool is_zero(const FeatureVector& v) {
  return std::all_of(v.begin(), v.end(), [](float x) { return x == 0.0f; });
}

}  // namespace

WebImageWeights adaptive_weights(const QueryCorpus& corpus, Diagnostics* diagnostics) {
  const std::size_t n = corpus.frame_count();
  if (n == 0) throw DataError("adaptive weights need at least one candidate keyframe");

  if (diagnostics) {
    for (std::size_t j = 0; j < n; ++j)
      if (is_zero(corpus.frame_at(j).feature))
        diagnostics->warn("frame '" + corpus.frame_at(j).frame_id + "' has a zero feature vector");
  }

  WebImageWeights weights;
  for (const WebImage& image : corpus.web_images()) {
    if (diagnostics && is_zero(image.feature))
      diagnostics->warn("web image '" + image.image_id + "' has a zero feature vector");
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += cosine_similarity(image.feature, corpus.frame_at(j).feature);
    const double rho = sum / static_cast<double>(n);
    if (diagnostics && rho < 0.0) {
      std::ostringstream msg;
      msg << "web image '" << image.image_id << "' has negative adaptive weight " << rho;
      diagnostics->warn(msg.str());
    }
    weights.image_ids.push_back(image.image_id);
    weights.rho.push_back(rho);
  }
  return weights;
}

SparseCodingProblem SparseCodingProblem::from_corpus(const QueryCorpus& corpus, const WebImageWeights& weights) {
  const auto d = static_cast<Eigen::Index>(corpus.dimension());
  const auto n = static_cast<Eigen::Index>(corpus.frame_count());
  const auto l = static_cast<Eigen::Index>(corpus.web_image_count());

  SparseCodingProblem problem;
  problem.frames.resize(d, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& feature = corpus.frame_at(static_cast<std::size_t>(j)).feature;
    for (Eigen::Index k = 0; k < d; ++k) problem.frames(k, j) = feature[static_cast<std::size_t>(k)];
  }
  problem.web.resize(d, l);
  problem.rho.resize(l);
  for (Eigen::Index i = 0; i < l; ++i) {
    const WebImage& image = corpus.web_images()[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < d; ++k) problem.web(k, i) = image.feature[static_cast<std::size_t>(k)];
    problem.rho(i) = weights.at(image.image_id);
  }
  return problem;
}

namespace {

// Gram form: f(a) = k0 - q'a + (c/2) a'Ga + gamma * sum(a), gradient of the
// smooth part is c*G*a - q.
struct GramForm {
  Eigen::MatrixXd gram;
  Eigen::VectorXd q;
  double c = 1.0;
  double k0 = 0.0;

  explicit GramForm(const SparseCodingProblem& p) {
    const Eigen::Index n = p.frames.cols();
    const Eigen::Index l = p.web.cols();
    gram = p.frames.transpose() * p.frames;
    Eigen::VectorXd target = p.frames.rowwise().mean();
    k0 = p.frames.colwise().squaredNorm().sum() / (2.0 * static_cast<double>(n));
    if (l > 0) {
      target += p.web * p.rho / static_cast<double>(l);
      c += p.rho.sum() / static_cast<double>(l);
      k0 += p.web.colwise().squaredNorm().dot(p.rho) / (2.0 * static_cast<double>(l));
    }
    q = p.frames.transpose() * target;
  }

  double objective(const Eigen::VectorXd& a, const Eigen::VectorXd& ga, double gamma) const {
    return k0 - q.dot(a) + 0.5 * c * a.dot(ga) + gamma * a.sum();
  }
};

}  // namespace

CoefficientSolution solve_coefficients(const SparseCodingProblem& problem, const SolverConfig& config,
                                       std::span<const std::size_t> order) {
  config.validate();
  const Eigen::Index n = problem.frames.cols();
  if (n == 0) throw DataError("solver needs at least one candidate keyframe");
  if (problem.web.cols() != problem.rho.size()) throw DataError("web image count does not match weight count");

  const GramForm form(problem);
  if (!(form.c > 0.0))
    throw NumericalError("quadratic weight 1 + mean(rho) = " + std::to_string(form.c) +
                         " is not positive; objective is unbounded");

  std::vector<std::size_t> sweep(order.begin(), order.end());
  if (sweep.empty()) {
    sweep.resize(static_cast<std::size_t>(n));
    std::iota(sweep.begin(), sweep.end(), std::size_t{0});
  }
  if (sweep.size() != static_cast<std::size_t>(n)) throw UsageError("sweep order must list every coordinate once");

  // Columns identical to one earlier in the sweep are pinned at 0: the objective
  // only sees their sum, and the earlier column carries all of it.
  std::vector<bool> pinned(static_cast<std::size_t>(n), false);
  {
    std::unordered_map<std::size_t, std::vector<Eigen::Index>> by_hash;
    for (std::size_t idx : sweep) {
      const auto j = static_cast<Eigen::Index>(idx);
      const auto col = problem.frames.col(j);
      std::size_t h = 0;
      for (Eigen::Index k = 0; k < col.size(); ++k) h = h * 1099511628211ull ^ std::hash<double>{}(col(k));
      auto& bucket = by_hash[h];
      for (Eigen::Index earlier : bucket)
        if (problem.frames.col(earlier) == col) {
          pinned[idx] = true;
          break;
        }
      if (!pinned[idx]) bucket.push_back(j);
    }
  }

  CoefficientSolution out;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd ga = Eigen::VectorXd::Zero(n);
  out.objective_history.push_back(form.objective(a, ga, config.gamma));

  const double gamma = config.gamma;
  const double c = form.c;

  // While the support stays fixed, periodically step toward the solution of the
  // stationarity system c * G_SS a_S = q_S - gamma (the one closest to the current
  // iterate when G_SS is singular). The step stops at the first coordinate that
  // would turn negative, which leaves the support. It is kept only if it does not
  // raise the objective, so descent remains monotone.
  std::vector<Eigen::Index> support, previous_support;
  int stable_sweeps = 0;
  auto active_set_step = [&] {
    const auto m = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd g_ss(m, m);
    Eigen::VectorXd rhs(m), a_s(m);
    for (Eigen::Index r = 0; r < m; ++r) {
      const Eigen::Index j = support[static_cast<std::size_t>(r)];
      rhs(r) = (form.q(j) - gamma) / c;
      a_s(r) = a(j);
      for (Eigen::Index k = 0; k < m; ++k) g_ss(r, k) = form.gram(j, support[static_cast<std::size_t>(k)]);
    }
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(g_ss);
    // When rhs has a component in the null space of G_SS, the objective on this
    // face falls linearly along it until a coordinate reaches 0; take that ray.
    const Eigen::VectorXd null_part = rhs - cod.solve(g_ss * rhs);
    const bool descend_ray = null_part.norm() > 1e-9 * std::max(1.0, rhs.norm());
    const Eigen::VectorXd step = descend_ray ? null_part : cod.solve(rhs - g_ss * a_s);
    if (!step.allFinite()) return;
    double t = descend_ray ? std::numeric_limits<double>::infinity() : 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index r = 0; r < m; ++r)
      if (step(r) < 0.0 && -a_s(r) / step(r) < t) {
        t = -a_s(r) / step(r);
        blocking = r;
      }
    if (!std::isfinite(t)) return;
    Eigen::VectorXd candidate = a;
    for (Eigen::Index r = 0; r < m; ++r)
      candidate(support[static_cast<std::size_t>(r)]) = std::max(0.0, a_s(r) + t * step(r));
    if (blocking >= 0) candidate(support[static_cast<std::size_t>(blocking)]) = 0.0;
    const Eigen::VectorXd g_candidate = form.gram * candidate;
    if (form.objective(candidate, g_candidate, gamma) <= form.objective(a, ga, gamma)) {
      a = std::move(candidate);
      ga = g_candidate;
    }
  };

  for (int sweep_no = 0; sweep_no < config.max_iters; ++sweep_no) {
    ga.noalias() = form.gram * a;
    double max_delta = 0.0;
    for (std::size_t idx : sweep) {
      const auto j = static_cast<Eigen::Index>(idx);
      const double gjj = form.gram(j, j);
      if (gjj <= 0.0 || pinned[idx]) continue;  // all-zero and duplicate columns stay at 0
      const double off_diag = ga(j) - gjj * a(j);
      const double updated = std::max(0.0, (form.q(j) - c * off_diag - gamma) / (c * gjj));
      const double delta = updated - a(j);
      if (delta != 0.0) {
        ga.noalias() += delta * form.gram.col(j);
        a(j) = updated;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    out.iterations_used = sweep_no + 1;

    ga.noalias() = form.gram * a;
    support.clear();
    for (Eigen::Index j = 0; j < n; ++j)
      if (a(j) > 0.0) support.push_back(j);
    if (support != previous_support) {
      previous_support = support;
      stable_sweeps = 0;
    } else if (++stable_sweeps % 5 == 0 && !support.empty()) {
      active_set_step();
    }
    out.objective_history.push_back(form.objective(a, ga, gamma));

    if (max_delta < config.tolerance) {
      double violation = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double g = c * ga(j) - form.q(j) + gamma;
        violation = std::max(violation, a(j) > 0.0 ? std::abs(g) : std::max(0.0, -g));
      }
      if (violation <= config.tolerance) {
        out.converged = true;
        break;
      }
    }
  }

  out.a = std::move(a);
  std::vector<double> coeffs(out.a.data(), out.a.data() + out.a.size());
  out.objective_value = objective_value(problem, coeffs, gamma);
  return out;
}

ImportanceScores solve(const QueryCorpus& corpus, const WebImageWeights& weights, const SolverConfig& config) {
  const SparseCodingProblem problem = SparseCodingProblem::from_corpus(corpus, weights);

  std::vector<std::size_t> order(corpus.frame_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return corpus.frame_at(x).frame_id < corpus.frame_at(y).frame_id; });

  CoefficientSolution solution = solve_coefficients(problem, config, order);

  ImportanceScores scores;
  for (std::size_t j = 0; j < corpus.frame_count(); ++j) {
    scores.frame_ids.push_back(corpus.frame_at(j).frame_id);
    scores.scores.push_back(solution.a(static_cast<Eigen::Index>(j)));
  }
  scores.objective_value = solution.objective_value;
  scores.iterations_used = solution.iterations_used;
  scores.converged = solution.converged;
  scores.objective_history = std::move(solution.objective_history);
  return scores;
}

double objective_value(const SparseCodingProblem& problem, std::span<const double> a, double gamma) {
  const Eigen::Index n = problem.frames.cols();
  const Eigen::Index l = problem.web.cols();
  if (static_cast<Eigen::Index>(a.size()) != n)
    throw UsageError("coefficient vector has length " + std::to_string(a.size()) + ", expected " + std::to_string(n));
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a[j] < 0.0) throw UsageError("coefficient " + std::to_string(j) + " is negative");

  const Eigen::Map<const Eigen::VectorXd> coeffs(a.data(), n);
  const Eigen::VectorXd recon = problem.frames * coeffs;

  double frame_term = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) frame_term += (problem.frames.col(i) - recon).squaredNorm();
  double value = frame_term / (2.0 * static_cast<double>(n));

  if (l > 0) {
    double web_term = 0.0;
    for (Eigen::Index i = 0; i < l; ++i) web_term += problem.rho(i) * (problem.web.col(i) - recon).squaredNorm();
    value += web_term / (2.0 * static_cast<double>(l));
  }
  return value + gamma * coeffs.cwiseAbs().sum();
}

double objective_value(const QueryCorpus& corpus, const WebImageWeights& weights, std::span<const double> a,
                       double gamma) {
  return objective_value(SparseCodingProblem::from_corpus(corpus, weights), a, gamma);
}

Summary select_keyframes(const ImportanceScores& scores, double tc) {
  Summary summary;
  summary.threshold_used = tc;
  for (std::size_t j = 0; j < scores.frame_ids.size(); ++j)
    if (scores.scores[j] > tc) summary.keyframes.push_back({scores.frame_ids[j], scores.scores[j]});
  std::sort(summary.keyframes.begin(), summary.keyframes.end(), [](const SummaryEntry& x, const SummaryEntry& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.frame_id < y.frame_id;
  });
  return summary;
}

}  // namespace quasc
