#include "modclust/fcmo.hpp"

#include <string>

#include "alternating.hpp"
#include "modclust/error.hpp"

namespace modclust {

namespace detail {

CodeMatrix weighted_modes(const CodeMatrix& codes, const std::vector<std::size_t>& domain_sizes,
                          const Matrix& u) {
  const auto n_units = codes.rows();
  const auto n_attrs = codes.cols();
  const auto n_clusters = u.cols();

  std::vector<std::size_t> offset(domain_sizes.size() + 1, 0);
  for (std::size_t i = 0; i < domain_sizes.size(); ++i) offset[i + 1] = offset[i] + domain_sizes[i];

  // weight(v, c) = sum_n u_{n,c} [x_{n,i} = v], all attributes stacked.
  Matrix weight = Matrix::Zero(static_cast<Eigen::Index>(offset.back()), n_clusters);
  for (Eigen::Index n = 0; n < n_units; ++n) {
    for (Eigen::Index i = 0; i < n_attrs; ++i) {
      const auto slot = static_cast<Eigen::Index>(offset[i] + codes(n, i));
      weight.row(slot) += u.row(n);
    }
  }

  CodeMatrix modes(n_clusters, n_attrs);
  for (Eigen::Index c = 0; c < n_clusters; ++c) {
    for (Eigen::Index i = 0; i < n_attrs; ++i) {
      const auto first = static_cast<Eigen::Index>(offset[i]);
      int best = 0;
      for (std::size_t v = 1; v < domain_sizes[i]; ++v) {
        if (weight(first + static_cast<Eigen::Index>(v), c) > weight(first + best, c)) {
          best = static_cast<int>(v);
        }
      }
      modes(c, i) = best;
    }
  }
  return modes;
}

}  // namespace detail

namespace {

std::vector<std::size_t> domain_sizes(const CategoricalAttributeMatrix& x) {
  std::vector<std::size_t> sizes;
  sizes.reserve(x.n_attrs());
  for (const auto& d : x.domains()) sizes.push_back(d.size());
  return sizes;
}

Matrix distances_to_modes(const CodeMatrix& codes, const CodeMatrix& modes) {
  Matrix d(codes.rows(), modes.rows());
  for (Eigen::Index c = 0; c < modes.rows(); ++c) {
    for (Eigen::Index n = 0; n < codes.rows(); ++n) {
      const int h = (codes.row(n).array() != modes.row(c).array()).count();
      d(n, c) = static_cast<double>(h) * static_cast<double>(h);
    }
  }
  return d;
}

double distance_weight(const FitConfig& cfg) {
  return cfg.modes_update == ModesUpdateForm::AsPrinted ? 1.0 : 1.0 - cfg.gamma;
}

Matrix mode_logits(const Matrix& distances, const Matrix& field, const FitConfig& cfg) {
  return -(distance_weight(cfg) * distances - cfg.gamma * field) / cfg.entropy_weight;
}

void check_shapes(const CategoricalAttributeMatrix& x, const ModularityMatrix& b,
                  const Matrix& u, const ModeSet& modes) {
  if (x.n_units() != b.n_units()) {
    throw DimensionMismatch(std::to_string(x.n_units()) + " attribute rows but " +
                            std::to_string(b.n_units()) + " network units");
  }
  if (static_cast<std::size_t>(u.rows()) != x.n_units()) {
    throw DimensionMismatch("membership has " + std::to_string(u.rows()) + " rows, expected " +
                            std::to_string(x.n_units()));
  }
  if (static_cast<std::size_t>(u.cols()) != modes.size() ||
      static_cast<std::size_t>(modes.codes().cols()) != x.n_attrs()) {
    throw DimensionMismatch("mode set shape does not match memberships and attributes");
  }
}

}  // namespace

Matrix mode_distances(const CategoricalAttributeMatrix& x, const ModeSet& modes) {
  if (static_cast<std::size_t>(modes.codes().cols()) != x.n_attrs()) {
    throw DimensionMismatch("modes have " + std::to_string(modes.codes().cols()) +
                            " attributes, data has " + std::to_string(x.n_attrs()));
  }
  for (Eigen::Index c = 0; c < modes.codes().rows(); ++c) {
    for (std::size_t i = 0; i < x.n_attrs(); ++i) {
      const int code = modes.codes()(c, static_cast<Eigen::Index>(i));
      if (code < 0 || static_cast<std::size_t>(code) >= x.domains()[i].size()) {
        throw DomainMismatch("mode code " + std::to_string(code) + " outside domain of attribute " +
                             std::to_string(i));
      }
    }
  }
  return distances_to_modes(x.codes(), modes.codes());
}

ModeSet update_modes(const CategoricalAttributeMatrix& x, const MembershipMatrix& u) {
  if (u.n_units() != x.n_units()) {
    throw DimensionMismatch("membership has " + std::to_string(u.n_units()) + " rows, expected " +
                            std::to_string(x.n_units()));
  }
  return ModeSet(detail::weighted_modes(x.codes(), domain_sizes(x), u.matrix()));
}

double objective_mo(const CategoricalAttributeMatrix& x, const ModularityMatrix& b,
                    const MembershipMatrix& u, const ModeSet& modes, const FitConfig& cfg) {
  check_shapes(x, b, u.matrix(), modes);
  const Matrix d = mode_distances(x, modes);
  return (1.0 - cfg.gamma) * u.matrix().cwiseProduct(d).sum() +
         cfg.entropy_weight * entropy_term(u.matrix()) -
         0.5 * cfg.gamma * modularity_sum(b, u.matrix());
}

MembershipMatrix update_membership_modes(const CategoricalAttributeMatrix& x,
                                         const ModularityMatrix& b,
                                         const MembershipMatrix& u_prev, const ModeSet& modes,
                                         const FitConfig& cfg) {
  check_shapes(x, b, u_prev.matrix(), modes);
  return MembershipMatrix(softmax_rows(
      mode_logits(mode_distances(x, modes), modularity_field(b, u_prev.matrix()), cfg)));
}

FitResult fit_fcmo_msc(const CategoricalAttributeMatrix& x, const AdjacencyMatrix& a,
                       const FitConfig& cfg, unsigned threads) {
  if (x.n_units() != a.n_units()) {
    throw DimensionMismatch(std::to_string(x.n_units()) + " attribute rows but " +
                            std::to_string(a.n_units()) + " network units");
  }
  cfg.validate();
  detail::require_enough_units(x.n_units(), cfg.n_clusters);
  return fit_fcmo_msc(x, build_modularity_matrix(a), cfg, threads);
}

FitResult fit_fcmo_msc(const CategoricalAttributeMatrix& x, const ModularityMatrix& b,
                       const FitConfig& cfg, unsigned threads) {
  if (x.n_units() != b.n_units()) {
    throw DimensionMismatch(std::to_string(x.n_units()) + " attribute rows but " +
                            std::to_string(b.n_units()) + " network units");
  }
  cfg.validate();
  detail::require_enough_units(x.n_units(), cfg.n_clusters);

  const std::size_t n_units = x.n_units();
  const auto n_clusters = static_cast<std::size_t>(cfg.n_clusters);
  const auto sizes = domain_sizes(x);
  Matrix b_off = b.entries();
  b_off.diagonal().setZero();

  auto run_one = [&](int restart) {
    auto start = restart_start(n_units, n_clusters, cfg.seed, restart);
    // Modes are recomputed from U before first use.
    CodeMatrix modes = CodeMatrix::Zero(static_cast<Eigen::Index>(n_clusters),
                                        static_cast<Eigen::Index>(x.n_attrs()));
    return detail::alternate(
        std::move(start.membership), std::move(modes), cfg.max_iter, cfg.conv_tol,
        [&](const Matrix& u, const CodeMatrix&) {
          return detail::weighted_modes(x.codes(), sizes, u);
        },
        [&](const Matrix& u, const CodeMatrix& current) {
          const Matrix field = b_off * u;
          return softmax_rows(mode_logits(distances_to_modes(x.codes(), current), field, cfg));
        });
  };

  auto objective = [&](const detail::LoopOutcome<CodeMatrix>& out) {
    const Matrix& u = out.membership;
    const Matrix field = b_off * u;
    return (1.0 - cfg.gamma) * u.cwiseProduct(distances_to_modes(x.codes(), out.prototypes)).sum() +
           cfg.entropy_weight * entropy_term(u) - 0.5 * cfg.gamma * u.cwiseProduct(field).sum();
  };

  return detail::best_of_restarts<CodeMatrix>(
      cfg.n_restarts, threads, run_one, objective,
      [](CodeMatrix modes) { return Prototypes(ModeSet(std::move(modes))); });
}

}  // namespace modclust
