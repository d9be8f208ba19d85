#include "modclust/baseline.hpp"

#include <cmath>
#include <string>

#include "alternating.hpp"
#include "modclust/error.hpp"
#include "modclust/fcmd.hpp"
#include "modclust/fcmo.hpp"

namespace modclust {

void PenaltyConfig::validate() const {
  if (n_clusters < 1) throw InvalidSpec("n_clusters must be positive");
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidSpec("beta must lie in [0, 1]");
  if (!(entropy_weight > 0.0) || !std::isfinite(entropy_weight)) {
    throw InvalidSpec("entropy weight p must be positive");
  }
  if (max_iter < 1) throw InvalidSpec("max_iter must be positive");
  if (!(conv_tol > 0.0)) throw InvalidSpec("conv_tol must be positive");
  if (n_restarts < 1) throw InvalidSpec("n_restarts must be positive");
}

namespace {

void check_units(std::size_t n_attr_units, const AdjacencyMatrix& a, const Matrix& u) {
  if (n_attr_units != a.n_units() || static_cast<std::size_t>(u.rows()) != a.n_units()) {
    throw DimensionMismatch("attributes, adjacency and memberships disagree on N");
  }
}

// sum_m a_{n,m} (1 - u_{m,c})
Matrix disagreement_field(const Matrix& adjacency, const Matrix& u) {
  return adjacency * (Matrix::Ones(u.rows(), u.cols()) - u);
}

Matrix penalty_logits(const Matrix& distances, double distance_weight, const Matrix& field,
                      double beta, double p) {
  return -(distance_weight * distances + beta * field) / p;
}


std::vector<std::size_t> domain_sizes(const CategoricalAttributeMatrix& x) {
  std::vector<std::size_t> sizes;
  for (const auto& d : x.domains()) sizes.push_back(d.size());
  return sizes;
}

}  // namespace

double adjacency_penalty(const AdjacencyMatrix& a, const Matrix& u) {
  if (static_cast<std::size_t>(u.rows()) != a.n_units()) {
    throw DimensionMismatch("membership rows do not match the network");
  }
  // other(m, c) = sum_{c' != c} u_{m,c'}
  const Matrix other = u.rowwise().sum().replicate(1, u.cols()) - u;
  return u.cwiseProduct(a.entries() * other).sum();
}

double objective_md_penalty(const NumericAttributeMatrix& x, const AdjacencyMatrix& a,
                            const MembershipMatrix& u, const MedoidSet& medoids,
                            const PenaltyConfig& cfg) {
  check_units(x.n_units(), a, u.matrix());
  const Matrix d = medoid_distances(x, medoids);
  return (1.0 - cfg.beta) * u.matrix().cwiseProduct(d).sum() +
         cfg.entropy_weight * entropy_term(u.matrix()) +
         0.5 * cfg.beta * adjacency_penalty(a, u.matrix());
}

double objective_mo_penalty(const CategoricalAttributeMatrix& x, const AdjacencyMatrix& a,
                            const MembershipMatrix& u, const ModeSet& modes,
                            const PenaltyConfig& cfg) {
  check_units(x.n_units(), a, u.matrix());
  const Matrix d = mode_distances(x, modes);
  return u.matrix().cwiseProduct(d).sum() + cfg.entropy_weight * entropy_term(u.matrix()) +
         0.5 * cfg.beta * adjacency_penalty(a, u.matrix());
}

MembershipMatrix update_membership_medoids_penalty(const NumericAttributeMatrix& x,
                                                   const AdjacencyMatrix& a,
                                                   const MembershipMatrix& u_prev,
                                                   const MedoidSet& medoids,
                                                   const PenaltyConfig& cfg) {
  check_units(x.n_units(), a, u_prev.matrix());
  return MembershipMatrix(softmax_rows(
      penalty_logits(medoid_distances(x, medoids), 1.0 - cfg.beta,
                     disagreement_field(a.entries(), u_prev.matrix()), cfg.beta,
                     cfg.entropy_weight)));
}

MembershipMatrix update_membership_modes_penalty(const CategoricalAttributeMatrix& x,
                                                 const AdjacencyMatrix& a,
                                                 const MembershipMatrix& u_prev,
                                                 const ModeSet& modes,
                                                 const PenaltyConfig& cfg) {
  check_units(x.n_units(), a, u_prev.matrix());
  return MembershipMatrix(softmax_rows(
      penalty_logits(mode_distances(x, modes), 1.0,
                     disagreement_field(a.entries(), u_prev.matrix()), cfg.beta,
                     cfg.entropy_weight)));
}

FitResult fit_fcmd_penalty(const NumericAttributeMatrix& x, const AdjacencyMatrix& a,
                           const PenaltyConfig& cfg, unsigned threads) {
  cfg.validate();
  if (x.n_units() != a.n_units()) {
    throw DimensionMismatch("attributes and adjacency disagree on N");
  }
  detail::require_enough_units(x.n_units(), cfg.n_clusters);

  const std::size_t n_units = x.n_units();
  const auto n_clusters = static_cast<std::size_t>(cfg.n_clusters);
  const Matrix pairwise = pairwise_squared_euclidean(x);
  const Matrix& adjacency = a.entries();

  auto distances_to = [&](const std::vector<std::size_t>& medoids) {
    Matrix d(n_units, n_clusters);
    for (std::size_t c = 0; c < n_clusters; ++c) d.col(c) = pairwise.col(medoids[c]);
    return d;
  };

  auto run_one = [&](int restart) {
    auto start = restart_start(n_units, n_clusters, cfg.seed, restart);
    return detail::alternate(
        std::move(start.membership), std::move(start.medoids), cfg.max_iter, cfg.conv_tol,
        [&](const Matrix& u, const std::vector<std::size_t>& prev) {
          return detail::select_medoids(pairwise * u, u, prev);
        },
        [&](const Matrix& u, const std::vector<std::size_t>& medoids) {
          return softmax_rows(penalty_logits(distances_to(medoids), 1.0 - cfg.beta,
                                             disagreement_field(adjacency, u), cfg.beta,
                                             cfg.entropy_weight));
        });
  };

  auto objective = [&](const detail::LoopOutcome<std::vector<std::size_t>>& out) {
    const Matrix& u = out.membership;
    return (1.0 - cfg.beta) * u.cwiseProduct(distances_to(out.prototypes)).sum() +
           cfg.entropy_weight * entropy_term(u) + 0.5 * cfg.beta * adjacency_penalty(a, u);
  };

  return detail::best_of_restarts<std::vector<std::size_t>>(
      cfg.n_restarts, threads, run_one, objective, [&](std::vector<std::size_t> medoids) {
        return Prototypes(MedoidSet(std::move(medoids), n_units));
      });
}

FitResult fit_fcmo_penalty(const CategoricalAttributeMatrix& x, const AdjacencyMatrix& a,
                           const PenaltyConfig& cfg, unsigned threads) {
  cfg.validate();
  if (x.n_units() != a.n_units()) {
    throw DimensionMismatch("attributes and adjacency disagree on N");
  }
  detail::require_enough_units(x.n_units(), cfg.n_clusters);

  const std::size_t n_units = x.n_units();
  const auto n_clusters = static_cast<std::size_t>(cfg.n_clusters);
  const auto sizes = domain_sizes(x);
  const Matrix& adjacency = a.entries();

  auto run_one = [&](int restart) {
    auto start = restart_start(n_units, n_clusters, cfg.seed, restart);
    CodeMatrix modes = CodeMatrix::Zero(static_cast<Eigen::Index>(n_clusters),
                                        static_cast<Eigen::Index>(x.n_attrs()));
    return detail::alternate(
        std::move(start.membership), std::move(modes), cfg.max_iter, cfg.conv_tol,
        [&](const Matrix& u, const CodeMatrix&) {
          return detail::weighted_modes(x.codes(), sizes, u);
        },
        [&](const Matrix& u, const CodeMatrix& current) {
          return softmax_rows(penalty_logits(mode_distances(x, ModeSet(current)), 1.0,
                                             disagreement_field(adjacency, u), cfg.beta,
                                             cfg.entropy_weight));
        });
  };

  auto objective = [&](const detail::LoopOutcome<CodeMatrix>& out) {
    const Matrix& u = out.membership;
    return u.cwiseProduct(mode_distances(x, ModeSet(out.prototypes))).sum() +
           cfg.entropy_weight * entropy_term(u) + 0.5 * cfg.beta * adjacency_penalty(a, u);
  };

  return detail::best_of_restarts<CodeMatrix>(
      cfg.n_restarts, threads, run_one, objective,
      [](CodeMatrix modes) { return Prototypes(ModeSet(std::move(modes))); });
}

}  // namespace modclust
