#include "modclust/fcmd.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "alternating.hpp"
#include "modclust/error.hpp"

namespace modclust {

namespace detail {

std::vector<std::size_t> select_medoids(const Matrix& cost, const Matrix& u,
                                        const std::vector<std::size_t>& previous) {
  const auto n_units = static_cast<std::size_t>(u.rows());
  const auto n_clusters = static_cast<std::size_t>(u.cols());

  std::vector<std::vector<std::size_t>> members(n_clusters);
  for (std::size_t n = 0; n < n_units; ++n) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < u.cols(); ++c) {
      if (u(n, c) > u(n, best)) best = c;
    }
    members[static_cast<std::size_t>(best)].push_back(n);
  }

  std::vector<std::size_t> next(previous);
  std::set<std::size_t> taken;
  for (std::size_t c = 0; c < n_clusters; ++c) {
    if (members[c].empty()) taken.insert(previous[c]);
  }

  auto by_cost = [&](std::size_t c) {
    return [&cost, c](std::size_t a, std::size_t b) {
      const double ca = cost(a, c);
      const double cb = cost(b, c);
      return ca < cb || (ca == cb && a < b);
    };
  };

  for (std::size_t c = 0; c < n_clusters; ++c) {
    if (members[c].empty()) continue;
    auto candidates = members[c];
    std::sort(candidates.begin(), candidates.end(), by_cost(c));
    auto it = std::find_if(candidates.begin(), candidates.end(),
                           [&](std::size_t q) { return !taken.contains(q); });
    std::size_t chosen;
    if (it != candidates.end()) {
      chosen = *it;
    } else if (!taken.contains(previous[c])) {
      chosen = previous[c];
    } else {
      std::vector<std::size_t> everyone(n_units);
      std::iota(everyone.begin(), everyone.end(), std::size_t{0});
      std::sort(everyone.begin(), everyone.end(), by_cost(c));
      chosen = *std::find_if(everyone.begin(), everyone.end(),
                             [&](std::size_t q) { return !taken.contains(q); });
    }
    next[c] = chosen;
    taken.insert(chosen);
  }
  return next;
}

}  // namespace detail

namespace {

void check_shapes(const NumericAttributeMatrix& x, const ModularityMatrix& b, const Matrix& u,
                  std::size_t n_prototypes) {
  if (x.n_units() != b.n_units()) {
    throw DimensionMismatch(std::to_string(x.n_units()) + " attribute rows but " +
                            std::to_string(b.n_units()) + " network units");
  }
  if (static_cast<std::size_t>(u.rows()) != x.n_units()) {
    throw DimensionMismatch("membership has " + std::to_string(u.rows()) + " rows, expected " +
                            std::to_string(x.n_units()));
  }
  if (static_cast<std::size_t>(u.cols()) != n_prototypes) {
    throw DimensionMismatch("membership has " + std::to_string(u.cols()) +
                            " clusters but there are " + std::to_string(n_prototypes) +
                            " medoids");
  }
}

Matrix medoid_logits(const Matrix& distances, const Matrix& field, double gamma, double p) {
  return -((1.0 - gamma) * distances - gamma * field) / p;
}

}  // namespace

Matrix medoid_distances(const NumericAttributeMatrix& x, const MedoidSet& medoids) {
  Matrix d(x.n_units(), medoids.size());
  for (std::size_t c = 0; c < medoids.size(); ++c) {
    if (medoids[c] >= x.n_units()) {
      throw DimensionMismatch("medoid index " + std::to_string(medoids[c]) + " out of range");
    }
    const auto proto = x.row(medoids[c]);
    for (std::size_t n = 0; n < x.n_units(); ++n) {
      d(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c)) =
          squared_euclidean(x.row(n), proto);
    }
  }
  return d;
}

double objective_md(const NumericAttributeMatrix& x, const ModularityMatrix& b,
                    const MembershipMatrix& u, const MedoidSet& medoids, const FitConfig& cfg) {
  check_shapes(x, b, u.matrix(), medoids.size());
  const Matrix d = medoid_distances(x, medoids);
  return (1.0 - cfg.gamma) * u.matrix().cwiseProduct(d).sum() +
         cfg.entropy_weight * entropy_term(u.matrix()) -
         0.5 * cfg.gamma * modularity_sum(b, u.matrix());
}

MembershipMatrix update_membership_medoids(const NumericAttributeMatrix& x,
                                           const ModularityMatrix& b,
                                           const MembershipMatrix& u_prev,
                                           const MedoidSet& medoids, const FitConfig& cfg) {
  check_shapes(x, b, u_prev.matrix(), medoids.size());
  return MembershipMatrix(softmax_rows(medoid_logits(
      medoid_distances(x, medoids), modularity_field(b, u_prev.matrix()), cfg.gamma,
      cfg.entropy_weight)));
}

MedoidSet update_medoids(const NumericAttributeMatrix& x, const MembershipMatrix& u,
                         const MedoidSet& medoids_prev) {
  if (u.n_units() != x.n_units() || u.n_clusters() != medoids_prev.size()) {
    throw DimensionMismatch("membership shape does not match attributes and medoids");
  }
  const Matrix cost = pairwise_squared_euclidean(x) * u.matrix();
  return MedoidSet(detail::select_medoids(cost, u.matrix(), medoids_prev.indices()),
                   x.n_units());
}

FitResult fit_fcmd_msc(const NumericAttributeMatrix& x, const AdjacencyMatrix& a,
                       const FitConfig& cfg, unsigned threads) {
  if (x.n_units() != a.n_units()) {
    throw DimensionMismatch(std::to_string(x.n_units()) + " attribute rows but " +
                            std::to_string(a.n_units()) + " network units");
  }
  cfg.validate();
  detail::require_enough_units(x.n_units(), cfg.n_clusters);
  return fit_fcmd_msc(x, build_modularity_matrix(a), cfg, threads);
}

FitResult fit_fcmd_msc(const NumericAttributeMatrix& x, const ModularityMatrix& b,
                       const FitConfig& cfg, unsigned threads) {
  if (x.n_units() != b.n_units()) {
    throw DimensionMismatch(std::to_string(x.n_units()) + " attribute rows but " +
                            std::to_string(b.n_units()) + " network units");
  }
  cfg.validate();
  detail::require_enough_units(x.n_units(), cfg.n_clusters);

  const std::size_t n_units = x.n_units();
  const auto n_clusters = static_cast<std::size_t>(cfg.n_clusters);
  const Matrix pairwise = pairwise_squared_euclidean(x);
  Matrix b_off = b.entries();
  b_off.diagonal().setZero();

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
          const Matrix cost = pairwise * u;
          return detail::select_medoids(cost, u, prev);
        },
        [&](const Matrix& u, const std::vector<std::size_t>& medoids) {
          const Matrix field = b_off * u;
          return softmax_rows(
              medoid_logits(distances_to(medoids), field, cfg.gamma, cfg.entropy_weight));
        });
  };

  auto objective = [&](const detail::LoopOutcome<std::vector<std::size_t>>& out) {
    const Matrix& u = out.membership;
    const Matrix field = b_off * u;
    return (1.0 - cfg.gamma) * u.cwiseProduct(distances_to(out.prototypes)).sum() +
           cfg.entropy_weight * entropy_term(u) - 0.5 * cfg.gamma * u.cwiseProduct(field).sum();
  };

  return detail::best_of_restarts<std::vector<std::size_t>>(
      cfg.n_restarts, threads, run_one, objective, [&](std::vector<std::size_t> medoids) {
        return Prototypes(MedoidSet(std::move(medoids), n_units));
      });
}

}  // namespace modclust
