#include "quasc/graph.hpp"

#include <cmath>

#include "quasc/error.hpp"

namespace quasc {

void SimilarityGraph::validate() const {
  const auto n = static_cast<Eigen::Index>(node_ids.size());
  if (weights.rows() != n || weights.cols() != n)
    throw DataError("graph weight matrix is " + std::to_string(weights.rows()) + "x" + std::to_string(weights.cols()) +
                    " for " + std::to_string(n) + " nodes");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (weights(i, i) != 0.0) throw DataError("graph has non-zero self weight at '" + node_ids[static_cast<std::size_t>(i)] + "'");
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = weights(i, j);
      if (!std::isfinite(w) || w < 0.0 || w != weights(j, i))
        throw DataError("graph edge ('" + node_ids[static_cast<std::size_t>(i)] + "', '" +
                        node_ids[static_cast<std::size_t>(j)] + "') is negative, non-finite or asymmetric");
    }
  }
}

}  // namespace quasc
