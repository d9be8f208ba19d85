#include "modclust/validity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "modclust/error.hpp"
#include "modclust/fcmd.hpp"
#include "modclust/fcmo.hpp"
#include "modclust/parallel.hpp"

namespace modclust {

namespace {

ValidityScore ratio(std::size_t n_units, std::size_t n_clusters, double separation,
                    double modularity, double compactness) {
  if (compactness == 0.0) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  const double scale = (static_cast<double>(n_units) - static_cast<double>(n_clusters)) /
                       static_cast<double>(n_clusters);
  return {scale * (separation + modularity) / compactness, false};
}

void require_two_clusters(std::size_t n_clusters) {
  if (n_clusters < 2) {
    throw InvalidSpec("validity indices need at least 2 clusters");
  }
}

}  // namespace

ValidityScore validity_md(const MembershipMatrix& u, const MedoidSet& medoids,
                          const NumericAttributeMatrix& x, const ModularityMatrix& b,
                          const ValidityOptions& options) {
  const std::size_t n_clusters = medoids.size();
  require_two_clusters(n_clusters);
  if (u.n_clusters() != n_clusters || u.n_units() != x.n_units() || x.n_units() != b.n_units()) {
    throw DimensionMismatch("memberships, medoids, attributes and network disagree in shape");
  }
  double separation = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < n_clusters; ++c) {
    for (std::size_t k = c + 1; k < n_clusters; ++k) {
      separation = std::min(separation, squared_euclidean(x.row(medoids[c]), x.row(medoids[k])));
    }
  }
  const double compactness = u.matrix().cwiseProduct(medoid_distances(x, medoids)).sum();
  return ratio(x.n_units(), n_clusters, separation,
               modularity_sum(b, u.matrix(), options.include_self_pairs), compactness);
}

ValidityScore validity_mo(const MembershipMatrix& u, const ModeSet& modes,
                          const CategoricalAttributeMatrix& x, const ModularityMatrix& b,
                          const ValidityOptions& options) {
  const std::size_t n_clusters = modes.size();
  require_two_clusters(n_clusters);
  if (u.n_clusters() != n_clusters || u.n_units() != x.n_units() || x.n_units() != b.n_units()) {
    throw DimensionMismatch("memberships, modes, attributes and network disagree in shape");
  }
  const CodeMatrix& m = modes.codes();
  double separation = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < m.rows(); ++c) {
    for (Eigen::Index k = c + 1; k < m.rows(); ++k) {
      const double h = static_cast<double>((m.row(c).array() != m.row(k).array()).count());
      separation = std::min(separation, h * h);
    }
  }
  const double compactness = u.matrix().cwiseProduct(mode_distances(x, modes)).sum();
  return ratio(x.n_units(), n_clusters, separation,
               modularity_sum(b, u.matrix(), options.include_self_pairs), compactness);
}

ValidityScore validity_md(const FitResult& result, const NumericAttributeMatrix& x,
                          const ModularityMatrix& b, const ValidityOptions& options) {
  if (!std::holds_alternative<MedoidSet>(result.prototypes)) {
    throw InvalidSpec("validity_md needs a medoid fit");
  }
  return validity_md(result.membership, result.medoids(), x, b, options);
}

ValidityScore validity_mo(const FitResult& result, const CategoricalAttributeMatrix& x,
                          const ModularityMatrix& b, const ValidityOptions& options) {
  if (!std::holds_alternative<ModeSet>(result.prototypes)) {
    throw InvalidSpec("validity_mo needs a modes fit");
  }
  return validity_mo(result.membership, result.modes(), x, b, options);
}

// ---------------------------------------------------------------------------

void GridSpec::validate() const {
  if (c_values.empty() || gamma_values.empty()) {
    throw InvalidSpec("grid needs at least one C and one gamma value");
  }
  for (int c : c_values) {
    if (c < 2) throw InvalidSpec("grid C values must be >= 2, got " + std::to_string(c));
  }
  for (double g : gamma_values) {
    if (!(g >= 0.0 && g <= 1.0)) throw InvalidSpec("grid gamma values must lie in [0, 1]");
  }
  cell_config(c_values.front(), gamma_values.front()).validate();
}

std::uint64_t cell_seed(std::uint64_t base_seed, int n_clusters, double gamma) {
  return mix_seed(mix_seed(base_seed, static_cast<std::uint64_t>(n_clusters)),
                  std::bit_cast<std::uint64_t>(gamma));
}

FitConfig GridSpec::cell_config(int n_clusters, double gamma) const {
  FitConfig cfg;
  cfg.n_clusters = n_clusters;
  cfg.gamma = gamma;
  cfg.entropy_weight = entropy_weight;
  cfg.max_iter = max_iter;
  cfg.conv_tol = conv_tol;
  cfg.n_restarts = n_restarts;
  cfg.seed = cell_seed(seed, n_clusters, gamma);
  cfg.modes_update = modes_update;
  return cfg;
}

std::optional<BestCell> GridTable::best_cell() const {
  std::optional<BestCell> best;
  for (std::size_t r = 0; r < c_values.size(); ++r) {
    for (std::size_t k = 0; k < gamma_values.size(); ++k) {
      const auto& v = values[r][k];
      if (!v || !std::isfinite(*v)) continue;
      const BestCell here{c_values[r], gamma_values[k], *v, r, k};
      const bool better =
          !best || here.value > best->value ||
          (here.value == best->value &&
           (here.n_clusters < best->n_clusters ||
            (here.n_clusters == best->n_clusters && here.gamma < best->gamma)));
      if (better) best = here;
    }
  }
  return best;
}

namespace {

template <class Attributes, class Fit, class Score>
GridResult run_grid(const Attributes& x, const AdjacencyMatrix& a, const GridSpec& spec,
                    unsigned threads, Fit&& fit, Score&& score) {
  spec.validate();
  if (x.n_units() != a.n_units()) {
    throw DimensionMismatch("attributes and adjacency disagree on N");
  }
  const ModularityMatrix b = build_modularity_matrix(a);

  GridResult result;
  result.table.c_values = spec.c_values;
  result.table.gamma_values = spec.gamma_values;
  const std::size_t n_rows = spec.c_values.size();
  const std::size_t n_cols = spec.gamma_values.size();
  result.table.values.assign(n_rows, std::vector<std::optional<double>>(n_cols));
  result.cells.resize(n_rows * n_cols);

  parallel_for(result.cells.size(), threads, [&](std::size_t i) {
    GridCell& cell = result.cells[i];
    cell.n_clusters = spec.c_values[i / n_cols];
    cell.gamma = spec.gamma_values[i % n_cols];
    try {
      cell.fit = fit(x, b, spec.cell_config(cell.n_clusters, cell.gamma));
      cell.validity = score(*cell.fit, x, b, spec.validity);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  });

  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    const auto& cell = result.cells[i];
    if (cell.validity && !cell.validity->degenerate) {
      result.table.values[i / n_cols][i % n_cols] = cell.validity->value;
    }
  }
  result.best = result.table.best_cell();
  return result;
}

}  // namespace

GridResult grid_search(const NumericAttributeMatrix& x, const AdjacencyMatrix& a,
                       const GridSpec& spec, unsigned threads) {
  return run_grid(
      x, a, spec, threads,
      [](const NumericAttributeMatrix& xx, const ModularityMatrix& b, const FitConfig& cfg) {
        return fit_fcmd_msc(xx, b, cfg, 1);
      },
      [](const FitResult& r, const NumericAttributeMatrix& xx, const ModularityMatrix& b,
         const ValidityOptions& o) { return validity_md(r, xx, b, o); });
}

GridResult grid_search(const CategoricalAttributeMatrix& x, const AdjacencyMatrix& a,
                       const GridSpec& spec, unsigned threads) {
  return run_grid(
      x, a, spec, threads,
      [](const CategoricalAttributeMatrix& xx, const ModularityMatrix& b, const FitConfig& cfg) {
        return fit_fcmo_msc(xx, b, cfg, 1);
      },
      [](const FitResult& r, const CategoricalAttributeMatrix& xx, const ModularityMatrix& b,
         const ValidityOptions& o) { return validity_mo(r, xx, b, o); });
}

// ---------------------------------------------------------------------------

std::size_t CrispPartition::n_fuzzy() const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](const auto& l) { return !l.has_value(); }));
}

CrispPartition crisp_assign(const MembershipMatrix& u, double cutoff, CutoffRule rule) {
  const double lower =
      rule == CutoffRule::AtLeast ? 0.5 : 1.0 / static_cast<double>(u.n_clusters());
  if (!(cutoff > lower && cutoff <= 1.0)) {
    throw InvalidSpec("cutoff " + std::to_string(cutoff) + " outside (" + std::to_string(lower) +
                      ", 1]");
  }
  CrispPartition out;
  out.cutoff = cutoff;
  out.rule = rule;
  out.labels.reserve(u.n_units());
  for (std::size_t n = 0; n < u.n_units(); ++n) {
    const std::size_t c = u.argmax(n);
    const double top = u(n, c);
    const bool assigned = rule == CutoffRule::AtLeast ? top >= cutoff : top > cutoff;
    out.labels.push_back(assigned ? std::optional<std::size_t>(c) : std::nullopt);
  }
  return out;
}

}  // namespace modclust
