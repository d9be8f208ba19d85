#pragma once

#include "modclust/attributes.hpp"
#include "modclust/graph.hpp"
#include "modclust/membership.hpp"

namespace modclust {

/// Fuzzy C-modes with a fuzzy-modularity term (categorical attributes).
/// Same structure as the medoid variant with d^2 replaced by the squared
/// simple-matching distance to the cluster mode vector.

/// d_SM(x_n, mode_c)^2 for every unit and cluster.
Matrix mode_distances(const CategoricalAttributeMatrix& x, const ModeSet& modes);

/// Membership-weighted mode of every attribute in every cluster. Ties go to
/// the category declared first in the attribute's domain.
ModeSet update_modes(const CategoricalAttributeMatrix& x, const MembershipMatrix& u);

double objective_mo(const CategoricalAttributeMatrix& x, const ModularityMatrix& b,
                    const MembershipMatrix& u, const ModeSet& modes, const FitConfig& cfg);

MembershipMatrix update_membership_modes(const CategoricalAttributeMatrix& x,
                                         const ModularityMatrix& b,
                                         const MembershipMatrix& u_prev, const ModeSet& modes,
                                         const FitConfig& cfg);

/// Multi-restart alternating optimisation: modes first, then memberships,
/// in every iteration.
FitResult fit_fcmo_msc(const CategoricalAttributeMatrix& x, const AdjacencyMatrix& a,
                       const FitConfig& cfg, unsigned threads = 0);

FitResult fit_fcmo_msc(const CategoricalAttributeMatrix& x, const ModularityMatrix& b,
                       const FitConfig& cfg, unsigned threads = 0);

}  // namespace modclust
