#include "quasc/kmeans.hpp"

#include <limits>
#include <random>

#include "quasc/error.hpp"

namespace quasc {
namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Eigen::MatrixXd seed_centroids(const Eigen::MatrixXd& points, int k, std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centroids(k, points.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);

  auto first = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n));
  centroids.row(0) = points.row(first);
  chosen[static_cast<std::size_t>(first)] = true;

  Eigen::VectorXd mindist = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = mindist.sum();
    Eigen::Index pick = -1;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += mindist(i);
        if (mindist(i) > 0.0 && acc > target) {
          pick = i;
          break;
        }
      }
      if (pick < 0)
        for (Eigen::Index i = n - 1; i >= 0; --i)
          if (mindist(i) > 0.0) {
            pick = i;
            break;
          }
    } else {
      // every point coincides with a centroid; take the first unused row
      for (Eigen::Index i = 0; i < n; ++i)
        if (!chosen[static_cast<std::size_t>(i)]) {
          pick = i;
          break;
        }
    }
    chosen[static_cast<std::size_t>(pick)] = true;
    centroids.row(c) = points.row(pick);
    mindist = mindist.cwiseMin((points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

KMeansResult lloyd(const Eigen::MatrixXd& points, int k, std::uint64_t seed, const KMeansOptions& options) {
  std::mt19937_64 rng(seed);
  const Eigen::Index n = points.rows();

  KMeansResult result;
  result.centroids = seed_centroids(points, k, rng);
  result.labels.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> dist(static_cast<std::size_t>(n), 0.0);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double dd = (points.row(i) - result.centroids.row(c)).squaredNorm();
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      result.labels[static_cast<std::size_t>(i)] = best;
      dist[static_cast<std::size_t>(i)] = best_d;
    }

    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int label : result.labels) ++sizes[static_cast<std::size_t>(label)];
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index victim = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto from = static_cast<std::size_t>(result.labels[static_cast<std::size_t>(i)]);
        if (sizes[from] > 1 && (victim < 0 || dist[static_cast<std::size_t>(i)] > dist[static_cast<std::size_t>(victim)]))
          victim = i;
      }
      if (victim < 0) break;
      --sizes[static_cast<std::size_t>(result.labels[static_cast<std::size_t>(victim)])];
      result.labels[static_cast<std::size_t>(victim)] = c;
      dist[static_cast<std::size_t>(victim)] = 0.0;
      sizes[static_cast<std::size_t>(c)] = 1;
    }

    Eigen::MatrixXd updated = Eigen::MatrixXd::Zero(k, points.cols());
    for (Eigen::Index i = 0; i < n; ++i) updated.row(result.labels[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0)
        updated.row(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);
      else
        updated.row(c) = result.centroids.row(c);
    }
    const double shift = (updated - result.centroids).rowwise().norm().maxCoeff();
    result.centroids = std::move(updated);
    if (shift < options.centroid_tolerance) break;
  }

  result.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    result.inertia += (points.row(i) - result.centroids.row(result.labels[static_cast<std::size_t>(i)])).squaredNorm();
  return result;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, const KMeansOptions& options) {
  if (points.rows() == 0) throw DataError("k-means needs at least one point");
  if (k <= 0 || k > points.rows())
    throw UsageError("k-means cluster count " + std::to_string(k) + " outside [1, " + std::to_string(points.rows()) + "]");

  KMeansResult best;
  const int runs = std::max(1, options.restarts);
  for (int r = 0; r < runs; ++r) {
    KMeansResult candidate = lloyd(points, k, runs == 1 ? seed : derive_seed(seed, static_cast<std::uint64_t>(r)), options);
    if (r == 0 || candidate.inertia < best.inertia) best = std::move(candidate);
  }
  return best;
}

}  // namespace quasc
