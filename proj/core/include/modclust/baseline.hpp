#pragma once

#include <cstdint>

#include "modclust/attributes.hpp"
#include "modclust/graph.hpp"
#include "modclust/membership.hpp"

namespace modclust {

// Adjacency-penalty fuzzy clustering. The penalty charges adjacent units
// placed in different clusters but never charges non-adjacent units placed
// together, so large beta drives every unit into one cluster.

struct PenaltyConfig {
  int n_clusters = 2;
  double beta = 0.0;
  double entropy_weight = 1.0;
  int max_iter = 1000;
  double conv_tol = 1e-9;
  int n_restarts = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// sum_n sum_c u_{n,c} sum_m sum_{c' != c} a_{n,m} u_{m,c'}, the penalty before its
/// beta / 2 weight.
double adjacency_penalty(const AdjacencyMatrix& a, const Matrix& u);

/// (1 - beta) sum u d^2 + p sum u log u + penalty.
double objective_md_penalty(const NumericAttributeMatrix& x, const AdjacencyMatrix& a,
                            const MembershipMatrix& u, const MedoidSet& medoids,
                            const PenaltyConfig& cfg);

/// sum u d_SM^2 + p sum u log u + penalty; the distance term carries no
/// (1 - beta) weight.
double objective_mo_penalty(const CategoricalAttributeMatrix& x, const AdjacencyMatrix& a,
                            const MembershipMatrix& u, const ModeSet& modes,
                            const PenaltyConfig& cfg);

/// u_{n,c} proportional to
///   exp{-(1/p)[(1 - beta) d^2(x_n, x_c) + beta sum_m a_{n,m} (1 - u_prev_{m,c})]}
MembershipMatrix update_membership_medoids_penalty(const NumericAttributeMatrix& x,
                                                   const AdjacencyMatrix& a,
                                                   const MembershipMatrix& u_prev,
                                                   const MedoidSet& medoids,
                                                   const PenaltyConfig& cfg);

/// Categorical analogue, distance term unweighted.
MembershipMatrix update_membership_modes_penalty(const CategoricalAttributeMatrix& x,
                                                 const AdjacencyMatrix& a,
                                                 const MembershipMatrix& u_prev,
                                                 const ModeSet& modes,
                                                 const PenaltyConfig& cfg);

FitResult fit_fcmd_penalty(const NumericAttributeMatrix& x, const AdjacencyMatrix& a,
                           const PenaltyConfig& cfg, unsigned threads = 0);

FitResult fit_fcmo_penalty(const CategoricalAttributeMatrix& x, const AdjacencyMatrix& a,
                           const PenaltyConfig& cfg, unsigned threads = 0);

}  // namespace modclust
