#pragma once

// Shared driver for the alternating prototype / membership loops.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "modclust/error.hpp"
#include "modclust/membership.hpp"
#include "modclust/parallel.hpp"

namespace modclust::detail {

template <class P>
struct LoopOutcome {
  Matrix membership;
  P prototypes;
  int iterations = 0;
  bool converged = false;
};

// repeat { U_old = U; update prototypes; update U } until
// ||U_old - U||_1 < tol or max_iter iterations.
template <class P, class UpdatePrototypes, class UpdateMembership>
LoopOutcome<P> alternate(Matrix u, P prototypes, int max_iter, double tol,
                         UpdatePrototypes&& update_prototypes,
                         UpdateMembership&& update_membership) {
  LoopOutcome<P> out;
  while (out.iterations < max_iter) {
    prototypes = update_prototypes(u, prototypes);
    Matrix next = update_membership(u, prototypes);
    const double change = (next - u).cwiseAbs().sum();
    u = std::move(next);
    ++out.iterations;
    if (change < tol) {
      out.converged = true;
      break;
    }
  }
  out.membership = std::move(u);
  out.prototypes = std::move(prototypes);
  return out;
}

// Runs every restart (possibly concurrently) and keeps the lowest objective,
// ties to the lowest restart index.
template <class P, class RunOne, class Objective, class Wrap>
FitResult best_of_restarts(int n_restarts, unsigned threads, RunOne&& run_one,
                           Objective&& objective, Wrap&& wrap_prototypes) {
  std::vector<std::optional<LoopOutcome<P>>> outcomes(static_cast<std::size_t>(n_restarts));
  std::vector<double> objectives(static_cast<std::size_t>(n_restarts),
                                 std::numeric_limits<double>::quiet_NaN());
  parallel_for(outcomes.size(), threads, [&](std::size_t r) {
    outcomes[r] = run_one(static_cast<int>(r));
    objectives[r] = objective(*outcomes[r]);
  });

  std::size_t best = 0;
  bool found = false;
  for (std::size_t r = 0; r < objectives.size(); ++r) {
    if (!std::isfinite(objectives[r])) continue;
    if (!found || objectives[r] < objectives[best]) {
      best = r;
      found = true;
    }
  }
  if (!found) {
    throw InvalidMembership("no restart produced a finite objective");
  }

  auto& chosen = *outcomes[best];
  return FitResult{
      MembershipMatrix(std::move(chosen.membership)),
      wrap_prototypes(std::move(chosen.prototypes)),
      objectives[best],
      chosen.iterations,
      chosen.converged,
      static_cast<int>(best),
      std::move(objectives),
  };
}

inline void require_enough_units(std::size_t n_units, int n_clusters) {
  if (n_clusters < 2) {
    throw InvalidSpec("a fit needs at least 2 clusters, got " + std::to_string(n_clusters));
  }
  if (n_units < static_cast<std::size_t>(n_clusters)) {
    throw TooFewUnits(std::to_string(n_units) + " units cannot form " +
                      std::to_string(n_clusters) + " clusters");
  }
}

// Prototype-selection core shared by the medoid variants. cost(q, c) is
// sum_n u_{n,c} d^2(x_n, x_q).
std::vector<std::size_t> select_medoids(const Matrix& cost, const Matrix& u,
                                        const std::vector<std::size_t>& previous);

// Mode codes (C x I) from raw memberships.
CodeMatrix weighted_modes(const CodeMatrix& codes, const std::vector<std::size_t>& domain_sizes,
                          const Matrix& u);

}  // namespace modclust::detail
