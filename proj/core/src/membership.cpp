#include "modclust/membership.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "modclust/error.hpp"
#include "modclust/parallel.hpp"

namespace modclust {

MembershipMatrix::MembershipMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.cols() == 0) {
    throw InvalidMembership("membership matrix is empty");
  }
  for (Eigen::Index n = 0; n < entries_.rows(); ++n) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < entries_.cols(); ++c) {
      const double v = entries_(n, c);
      if (!std::isfinite(v) || v < 0.0) {
        throw InvalidMembership("entry (" + std::to_string(n) + ", " + std::to_string(c) +
                                ") is negative or not finite");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw InvalidMembership("row " + std::to_string(n) + " sums to " + std::to_string(sum));
    }
  }
}

std::size_t MembershipMatrix::argmax(std::size_t n) const {
  Eigen::Index best = 0;
  const auto row = entries_.row(static_cast<Eigen::Index>(n));
  for (Eigen::Index c = 1; c < row.size(); ++c) {
    if (row(c) > row(best)) best = c;
  }
  return static_cast<std::size_t>(best);
}

MedoidSet::MedoidSet(std::vector<std::size_t> indices, std::size_t n_units)
    : indices_(std::move(indices)) {
  std::set<std::size_t> seen;
  for (std::size_t idx : indices_) {
    if (idx >= n_units) {
      throw InvalidSpec("medoid index " + std::to_string(idx) + " out of range for " +
                        std::to_string(n_units) + " units");
    }
    if (!seen.insert(idx).second) {
      throw InvalidSpec("duplicate medoid index " + std::to_string(idx));
    }
  }
}

void FitConfig::validate() const {
  if (n_clusters < 1) throw InvalidSpec("n_clusters must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidSpec("gamma must lie in [0, 1]");
  if (!(entropy_weight > 0.0) || !std::isfinite(entropy_weight)) {
    throw InvalidSpec("entropy weight p must be positive");
  }
  if (max_iter < 1) throw InvalidSpec("max_iter must be positive");
  if (!(conv_tol > 0.0)) throw InvalidSpec("conv_tol must be positive");
  if (n_restarts < 1) throw InvalidSpec("n_restarts must be positive");
}

std::uint64_t restart_seed(std::uint64_t base_seed, int restart) {
  return mix_seed(base_seed, static_cast<std::uint64_t>(restart));
}

Matrix random_membership(std::size_t n_units, std::size_t n_clusters, Rng& rng) {
  // Normalised i.i.d. Exp(1) draws are uniform on the simplex.
  std::exponential_distribution<double> draw(1.0);
  Matrix u(n_units, n_clusters);
  for (std::size_t n = 0; n < n_units; ++n) {
    double sum = 0.0;
    for (std::size_t c = 0; c < n_clusters; ++c) {
      double v = draw(rng);
      // Exp(1) is zero with probability zero, but the engine can round to it.
      if (v <= 0.0) v = std::numeric_limits<double>::min();
      u(n, c) = v;
      sum += v;
    }
    u.row(n) /= sum;
  }
  return u;
}

RestartStart restart_start(std::size_t n_units, std::size_t n_clusters,
                           std::uint64_t base_seed, int restart) {
  Rng rng(restart_seed(base_seed, restart));
  RestartStart start;
  start.membership = random_membership(n_units, n_clusters, rng);
  std::vector<std::size_t> units(n_units);
  std::iota(units.begin(), units.end(), std::size_t{0});
  // Partial Fisher-Yates with an explicit index draw keeps the sequence
  // independent of the standard library's shuffle implementation.
  for (std::size_t c = 0; c < n_clusters && c < n_units; ++c) {
    const std::uint64_t span = n_units - c;
    const std::size_t pick = c + static_cast<std::size_t>(rng() % span);
    std::swap(units[c], units[pick]);
  }
  start.medoids.assign(units.begin(),
                       units.begin() + static_cast<std::ptrdiff_t>(std::min(n_clusters, n_units)));
  return start;
}

double entropy_term(const Matrix& u) {
  double sum = 0.0;
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    for (Eigen::Index n = 0; n < u.rows(); ++n) {
      const double v = u(n, c);
      if (v > 0.0) sum += v * std::log(v);
    }
  }
  return sum;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index n = 0; n < logits.rows(); ++n) {
    const double shift = logits.row(n).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      const double e = std::exp(logits(n, c) - shift);
      out(n, c) = e;
      sum += e;
    }
    // sum >= 1 because the maximal entry contributes exp(0).
    out.row(n) /= sum;
  }
  return out;
}

}  // namespace modclust
