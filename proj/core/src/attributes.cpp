#include "modclust/attributes.hpp"

#include <cmath>
#include <string>

#include "modclust/error.hpp"

namespace modclust {

NumericAttributeMatrix::NumericAttributeMatrix(RowMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 2) {
    throw TooFewUnits("numeric attributes need at least 2 units");
  }
  if (entries_.cols() < 1) {
    throw DimensionMismatch("numeric attributes need at least one column");
  }
  for (Eigen::Index n = 0; n < entries_.rows(); ++n) {
    for (Eigen::Index i = 0; i < entries_.cols(); ++i) {
      if (!std::isfinite(entries_(n, i))) {
        throw MissingValue("attribute (" + std::to_string(n) + ", " + std::to_string(i) +
                           ") is not a finite number");
      }
    }
  }
}

CategoricalAttributeMatrix::CategoricalAttributeMatrix(CodeMatrix codes,
                                                       std::vector<CategoryDomain> domains)
    : codes_(std::move(codes)), domains_(std::move(domains)) {
  if (static_cast<std::size_t>(codes_.cols()) != domains_.size()) {
    throw DimensionMismatch(std::to_string(codes_.cols()) + " attribute columns but " +
                            std::to_string(domains_.size()) + " domains");
  }
  if (codes_.rows() < 2) {
    throw TooFewUnits("categorical attributes need at least 2 units");
  }
  for (std::size_t i = 0; i < domains_.size(); ++i) {
    if (domains_[i].categories.empty()) {
      throw DomainMismatch("domain of attribute " + std::to_string(i) + " is empty");
    }
  }
  for (Eigen::Index n = 0; n < codes_.rows(); ++n) {
    for (Eigen::Index i = 0; i < codes_.cols(); ++i) {
      const int code = codes_(n, i);
      if (code < 0 || static_cast<std::size_t>(code) >= domains_[i].size()) {
        throw DomainMismatch("code " + std::to_string(code) + " at (" + std::to_string(n) +
                             ", " + std::to_string(i) + ") is outside the attribute domain");
      }
    }
  }
}

double squared_euclidean(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DimensionMismatch("rows of length " + std::to_string(x.size()) + " and " +
                            std::to_string(y.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sum += d * d;
  }
  return sum;
}

int hamming_distance(std::span<const int> x, std::span<const int> y) {
  if (x.size() != y.size()) {
    throw DimensionMismatch("rows of length " + std::to_string(x.size()) + " and " +
                            std::to_string(y.size()));
  }
  int mismatches = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mismatches += x[i] != y[i] ? 1 : 0;
  }
  return mismatches;
}

int hamming_distance(const CategoricalRow& x, const CategoricalRow& y) {
  if (x.codes.size() != y.codes.size()) {
    throw DimensionMismatch("rows of length " + std::to_string(x.codes.size()) + " and " +
                            std::to_string(y.codes.size()));
  }
  if (x.domains.data() != y.domains.data()) {
    if (x.domains.size() != y.domains.size()) {
      throw DomainMismatch("rows carry a different number of domains");
    }
    for (std::size_t i = 0; i < x.domains.size(); ++i) {
      if (!(x.domains[i] == y.domains[i])) {
        throw DomainMismatch("attribute " + std::to_string(i) + " has different domains");
      }
    }
  }
  return hamming_distance(x.codes, y.codes);
}

Matrix pairwise_squared_euclidean(const NumericAttributeMatrix& x) {
  const std::size_t n = x.n_units();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = squared_euclidean(x.row(i), x.row(j));
    }
  }
  return d;
}

}  // namespace modclust
