#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace quasc {

struct KMeansOptions {
  int max_iterations = 300;
  double centroid_tolerance = 1e-6;  // stop when no centroid moves farther than this
  int restarts = 1;                  // best of `restarts` seeded runs by inertia
};

struct KMeansResult {
  std::vector<int> labels;   // one per row, in [0, k)
  Eigen::MatrixXd centroids; // k x dim
  double inertia = 0.0;      // sum of squared distances to assigned centroids
  int iterations = 0;
};

/// Lloyd's k-means with k-means++ seeding over the rows of `points`.
/// Deterministic for a given seed: sampling draws from std::mt19937_64 without
/// relying on library distributions. Empty clusters steal the worst-fit point
/// from a cluster that has more than one member.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, const KMeansOptions& options = {});

/// Derives the seed for sub-run `index` from a base seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace quasc
