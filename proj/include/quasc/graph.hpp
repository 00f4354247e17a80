#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace quasc {

/// Weighted undirected graph over videos. Weights are symmetric, finite,
/// non-negative, with a zero diagonal.
struct SimilarityGraph {
  std::vector<std::string> node_ids;
  Eigen::MatrixXd weights;

  std::size_t size() const noexcept { return node_ids.size(); }

  /// Throws DataError if any structural invariant is broken.
  void validate() const;
};

}  // namespace quasc
