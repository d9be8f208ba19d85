#pragma once

#include "modclust/attributes.hpp"
#include "modclust/graph.hpp"
#include "modclust/membership.hpp"

namespace modclust {

/// Fuzzy C-medoids with a fuzzy-modularity term (numeric attributes).
///
/// The objective is
///
///   J = (1 - gamma) sum_{n,c} u_{n,c} d^2(x_n, x_c)
///     + p sum_{n,c} u_{n,c} log u_{n,c}
///     - (gamma / 2) sum_{n,c} sum_{m != n} u_{n,c} b_{n,m} u_{m,c}
///
/// where x_c is the medoid of cluster c and d^2 is the squared Euclidean
/// distance.

/// d^2(x_n, x_{medoid c}) for every unit and cluster.
Matrix medoid_distances(const NumericAttributeMatrix& x, const MedoidSet& medoids);

double objective_md(const NumericAttributeMatrix& x, const ModularityMatrix& b,
                    const MembershipMatrix& u, const MedoidSet& medoids, const FitConfig& cfg);

/// One Jacobi sweep of the closed-form membership update, using u_prev in the
/// network term.
MembershipMatrix update_membership_medoids(const NumericAttributeMatrix& x,
                                           const ModularityMatrix& b,
                                           const MembershipMatrix& u_prev,
                                           const MedoidSet& medoids, const FitConfig& cfg);

/// Brute-force medoid search restricted to each cluster's argmax members.
///
/// Clusters without members keep their previous medoid. Medoids stay
/// pairwise distinct: kept medoids are reserved first, then each non-empty
/// cluster in index order takes its best member not already taken.
MedoidSet update_medoids(const NumericAttributeMatrix& x, const MembershipMatrix& u,
                         const MedoidSet& medoids_prev);

/// Multi-restart alternating optimisation. Returns the restart with the
/// lowest objective (ties to the lowest restart index). `threads` = 0 uses
/// worker_count(). The result does not depend on the thread count.
///
/// Throws TooFewUnits if N < C and ZeroStrengthNetwork for an empty network.
FitResult fit_fcmd_msc(const NumericAttributeMatrix& x, const AdjacencyMatrix& a,
                       const FitConfig& cfg, unsigned threads = 0);

/// Same as fit_fcmd_msc with a prebuilt modularity matrix.
FitResult fit_fcmd_msc(const NumericAttributeMatrix& x, const ModularityMatrix& b,
                       const FitConfig& cfg, unsigned threads = 0);

}  // namespace modclust
