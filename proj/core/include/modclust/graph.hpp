#pragma once

#include <cstddef>

#include "modclust/linalg.hpp"

namespace modclust {

class MembershipMatrix;

/// Symmetric, non-negative network with zero diagonal.
///
/// Construction validates the invariants and throws InvalidAdjacency
/// (non-square, negative, non-finite, non-zero diagonal) or AsymmetryError.
/// An all-zero matrix is a valid AdjacencyMatrix; it is rejected later by
/// build_modularity_matrix because modularity is undefined on it.
class AdjacencyMatrix {
 public:
  explicit AdjacencyMatrix(Matrix entries);

  std::size_t n_units() const { return static_cast<std::size_t>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  double operator()(std::size_t n, std::size_t m) const { return entries_(n, m); }

  /// w_n = sum of row n.
  Vector strengths() const { return entries_.rowwise().sum(); }

  bool operator==(const AdjacencyMatrix& other) const { return entries_ == other.entries_; }

 private:
  Matrix entries_;
};

/// b_{n,m} = a_{n,m} - w_n w_m / L, kept dense together with w and L.
class ModularityMatrix {
 public:
  const Matrix& entries() const { return entries_; }
  const Vector& strengths() const { return strengths_; }
  double total_strength() const { return total_strength_; }
  std::size_t n_units() const { return static_cast<std::size_t>(entries_.rows()); }
  double operator()(std::size_t n, std::size_t m) const { return entries_(n, m); }

 private:
  friend ModularityMatrix build_modularity_matrix(const AdjacencyMatrix& a);
  ModularityMatrix(Matrix entries, Vector strengths, double total)
      : entries_(std::move(entries)), strengths_(std::move(strengths)), total_strength_(total) {}

  Matrix entries_;
  Vector strengths_;
  double total_strength_;
};

/// Throws ZeroStrengthNetwork when the network has no edges.
ModularityMatrix build_modularity_matrix(const AdjacencyMatrix& a);

/// Returns G with g_{n,c} = sum_{m != n} b_{n,m} u_{m,c}.
///
/// This is the network field that drives the membership update; self-pairs
/// are excluded.
Matrix modularity_field(const ModularityMatrix& b, const Matrix& u);

/// Q = sum_n sum_m b_{n,m} sum_c u_{n,c} u_{m,c} (1 - delta_{n,m}).
///
/// Unnormalised (no division by L). Throws DimensionMismatch if U does not
/// have N rows.
double fuzzy_modularity(const ModularityMatrix& b, const MembershipMatrix& u);

/// Same sum over a raw matrix; with include_self_pairs the diagonal terms
/// b_{n,n} sum_c u_{n,c}^2 are added back.
double modularity_sum(const ModularityMatrix& b, const Matrix& u, bool include_self_pairs = false);

}  // namespace modclust
