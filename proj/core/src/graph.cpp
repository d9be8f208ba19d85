#include "modclust/graph.hpp"

#include <cmath>
#include <string>

#include "modclust/error.hpp"
#include "modclust/membership.hpp"

namespace modclust {

AdjacencyMatrix::AdjacencyMatrix(Matrix entries) : entries_(std::move(entries)) {
  const auto n = entries_.rows();
  if (n == 0 || entries_.cols() != n) {
    throw InvalidAdjacency("adjacency must be a non-empty square matrix, got " +
                           std::to_string(entries_.rows()) + "x" +
                           std::to_string(entries_.cols()));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (entries_(i, i) != 0.0) {
      throw InvalidAdjacency("non-zero diagonal entry at unit " + std::to_string(i));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = entries_(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw InvalidAdjacency("entry (" + std::to_string(i) + ", " + std::to_string(j) +
                               ") must be finite and non-negative");
      }
      if (j > i && v != entries_(j, i)) {
        throw AsymmetryError("a(" + std::to_string(i) + ", " + std::to_string(j) +
                             ") != a(" + std::to_string(j) + ", " + std::to_string(i) + ")");
      }
    }
  }
}

ModularityMatrix build_modularity_matrix(const AdjacencyMatrix& a) {
  Vector w = a.strengths();
  const double total = w.sum();
  if (!(total > 0.0)) {
    throw ZeroStrengthNetwork("network has no edges (L = 0); fuzzy modularity is undefined");
  }
  Matrix b = a.entries() - (w * w.transpose()) / total;
  return ModularityMatrix(std::move(b), std::move(w), total);
}

Matrix modularity_field(const ModularityMatrix& b, const Matrix& u) {
  if (static_cast<std::size_t>(u.rows()) != b.n_units()) {
    throw DimensionMismatch("membership has " + std::to_string(u.rows()) + " rows, network has " +
                            std::to_string(b.n_units()) + " units");
  }
  Matrix g = b.entries() * u;
  g -= b.entries().diagonal().asDiagonal() * u;
  return g;
}

double modularity_sum(const ModularityMatrix& b, const Matrix& u, bool include_self_pairs) {
  const Matrix g = modularity_field(b, u);
  double q = u.cwiseProduct(g).sum();
  if (include_self_pairs) {
    q += b.entries().diagonal().dot(u.rowwise().squaredNorm());
  }
  return q;
}

double fuzzy_modularity(const ModularityMatrix& b, const MembershipMatrix& u) {
  return modularity_sum(b, u.matrix(), false);
}

}  // namespace modclust
