#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modclust/attributes.hpp"
#include "modclust/graph.hpp"
#include "modclust/membership.hpp"

namespace modclust {

/// Value of a validity index. A zero compactness denominator is not an
/// exception here: the score is flagged degenerate and its value is +inf.
struct ValidityScore {
  double value = 0.0;
  bool degenerate = false;
};

struct ValidityOptions {
  /// Add the b_{n,n} sum_c u_{n,c}^2 self-pair terms to the modularity sum.
  bool include_self_pairs = false;
};

/// F(U) = ((N - C) / C) [min_{c != c'} d^2(x_c, x_c') + sum u b u] / [sum u d^2]
///
/// Negative when the fuzzy modularity is negative enough to outweigh the
/// medoid separation. Throws InvalidSpec if C < 2 or the result does not
/// hold medoids.
ValidityScore validity_md(const FitResult& result, const NumericAttributeMatrix& x,
                          const ModularityMatrix& b, const ValidityOptions& options = {});

/// Categorical analogue using squared simple-matching distances and modes.
ValidityScore validity_mo(const FitResult& result, const CategoricalAttributeMatrix& x,
                          const ModularityMatrix& b, const ValidityOptions& options = {});

/// The raw forms, on explicit memberships and prototypes.
ValidityScore validity_md(const MembershipMatrix& u, const MedoidSet& medoids,
                          const NumericAttributeMatrix& x, const ModularityMatrix& b,
                          const ValidityOptions& options = {});
ValidityScore validity_mo(const MembershipMatrix& u, const ModeSet& modes,
                          const CategoricalAttributeMatrix& x, const ModularityMatrix& b,
                          const ValidityOptions& options = {});

// ---------------------------------------------------------------------------
// Grid search over (C, gamma)
// ---------------------------------------------------------------------------

struct GridSpec {
  std::vector<int> c_values;
  std::vector<double> gamma_values;
  double entropy_weight = 1.0;
  int max_iter = 1000;
  double conv_tol = 1e-9;
  int n_restarts = 50;
  std::uint64_t seed = 0;
  ModesUpdateForm modes_update = ModesUpdateForm::ObjectiveConsistent;
  ValidityOptions validity;

  void validate() const;
  /// Fit configuration of one cell, with its derived seed.
  FitConfig cell_config(int n_clusters, double gamma) const;
};

/// Seed of the (C, gamma) cell, independent of evaluation order.
std::uint64_t cell_seed(std::uint64_t base_seed, int n_clusters, double gamma);

struct BestCell {
  int n_clusters = 0;
  double gamma = 0.0;
  double value = 0.0;
  std::size_t row = 0;
  std::size_t col = 0;
};

/// Validity values laid out with one row per C and one column per gamma.
/// Missing or degenerate cells hold std::nullopt.
struct GridTable {
  std::vector<int> c_values;
  std::vector<double> gamma_values;
  std::vector<std::vector<std::optional<double>>> values;

  /// Largest finite value; ties go to the smallest C, then the smallest
  /// gamma. Empty when no cell has a value.
  std::optional<BestCell> best_cell() const;
};

struct GridCell {
  int n_clusters = 0;
  double gamma = 0.0;
  std::optional<FitResult> fit;
  std::optional<ValidityScore> validity;
  /// Non-empty when the cell's fit failed.
  std::string error;
};

struct GridResult {
  GridTable table;
  std::optional<BestCell> best;
  /// Row-major over (c_values, gamma_values).
  std::vector<GridCell> cells;

  const GridCell& cell(std::size_t row, std::size_t col) const {
    return cells[row * table.gamma_values.size() + col];
  }
};

/// Fits every cell with the medoid algorithm and scores it with validity_md.
/// A failing cell is recorded with its error message; it never aborts the
/// grid.
GridResult grid_search(const NumericAttributeMatrix& x, const AdjacencyMatrix& a,
                       const GridSpec& spec, unsigned threads = 0);

/// Modes algorithm, scored with validity_mo.
GridResult grid_search(const CategoricalAttributeMatrix& x, const AdjacencyMatrix& a,
                       const GridSpec& spec, unsigned threads = 0);

// ---------------------------------------------------------------------------
// Crisp assignment
// ---------------------------------------------------------------------------

enum class CutoffRule {
  /// Label with the argmax cluster when its membership is >= cutoff.
  AtLeast,
  /// Label only when some membership is strictly larger than cutoff.
  StrictlyAbove,
};

struct CrispPartition {
  /// 0-based cluster, or nullopt for a fuzzy unit.
  std::vector<std::optional<std::size_t>> labels;
  double cutoff = 0.7;
  CutoffRule rule = CutoffRule::AtLeast;

  std::size_t n_fuzzy() const;
};

/// Throws InvalidSpec when cutoff is outside (0.5, 1] for AtLeast or
/// (1/C, 1] for StrictlyAbove.
CrispPartition crisp_assign(const MembershipMatrix& u, double cutoff,
                            CutoffRule rule = CutoffRule::AtLeast);

}  // namespace modclust
