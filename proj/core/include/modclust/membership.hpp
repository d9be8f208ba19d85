#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "modclust/linalg.hpp"

namespace modclust {

inline constexpr double kRowSumTolerance = 1e-9;

/// N x C fuzzy partition; every row lies on the probability simplex.
class MembershipMatrix {
 public:
  /// Throws InvalidMembership when an entry is negative or non-finite or a
  /// row sum is off by more than kRowSumTolerance.
  explicit MembershipMatrix(Matrix entries);

  std::size_t n_units() const { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t n_clusters() const { return static_cast<std::size_t>(entries_.cols()); }
  const Matrix& matrix() const { return entries_; }
  double operator()(std::size_t n, std::size_t c) const { return entries_(n, c); }

  /// Cluster with the largest membership for unit n; ties go to the lowest
  /// index.
  std::size_t argmax(std::size_t n) const;

 private:
  Matrix entries_;
};

/// C distinct unit indices (0-based) used as cluster prototypes.
class MedoidSet {
 public:
  MedoidSet() = default;
  /// Throws InvalidSpec on duplicate or out-of-range indices.
  MedoidSet(std::vector<std::size_t> indices, std::size_t n_units);

  const std::vector<std::size_t>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  std::size_t operator[](std::size_t c) const { return indices_[c]; }
  bool operator==(const MedoidSet&) const = default;

 private:
  std::vector<std::size_t> indices_;
};

/// C x I category codes; row c is the mode vector of cluster c.
class ModeSet {
 public:
  ModeSet() = default;
  explicit ModeSet(CodeMatrix codes) : codes_(std::move(codes)) {}

  const CodeMatrix& codes() const { return codes_; }
  std::size_t size() const { return static_cast<std::size_t>(codes_.rows()); }
  bool operator==(const ModeSet& other) const { return codes_ == other.codes_; }

 private:
  CodeMatrix codes_;
};

using Prototypes = std::variant<MedoidSet, ModeSet>;

/// How the categorical membership update weighs the distance term.
enum class ModesUpdateForm {
  /// (1 - gamma) d_SM^2, the stationary point of the categorical objective.
  ObjectiveConsistent,
  /// d_SM^2 without the (1 - gamma) factor.
  AsPrinted,
};

struct FitConfig {
  int n_clusters = 2;
  double gamma = 0.0;
  double entropy_weight = 1.0;
  int max_iter = 1000;
  double conv_tol = 1e-9;
  int n_restarts = 1;
  std::uint64_t seed = 0;
  ModesUpdateForm modes_update = ModesUpdateForm::ObjectiveConsistent;

  /// Throws InvalidSpec when a field is out of range.
  void validate() const;
};

struct FitResult {
  MembershipMatrix membership;
  Prototypes prototypes;
  double objective = 0.0;
  int n_iterations = 0;
  bool converged = false;
  int restart_index = 0;
  /// Final objective of every restart, in restart order.
  std::vector<double> restart_objectives;

  const MedoidSet& medoids() const { return std::get<MedoidSet>(prototypes); }
  const ModeSet& modes() const { return std::get<ModeSet>(prototypes); }
};

/// Engine used for every random draw in the library.
using Rng = std::mt19937_64;

/// Seed of restart r derived from a base seed. Stable across platforms.
std::uint64_t restart_seed(std::uint64_t base_seed, int restart);

/// Rows drawn from the flat Dirichlet distribution on the C-simplex.
Matrix random_membership(std::size_t n_units, std::size_t n_clusters, Rng& rng);

/// Initial state of one restart: the membership drawn from the restart's
/// engine, then C distinct arbitrary medoids from the same engine.
struct RestartStart {
  Matrix membership;
  std::vector<std::size_t> medoids;
};
RestartStart restart_start(std::size_t n_units, std::size_t n_clusters,
                           std::uint64_t base_seed, int restart);

/// sum_n sum_c u log u with 0 log 0 = 0.
double entropy_term(const Matrix& u);

/// Row-wise softmax with the row maximum subtracted before exponentiation.
Matrix softmax_rows(const Matrix& logits);

}  // namespace modclust
