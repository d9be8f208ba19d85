#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "modclust/linalg.hpp"

namespace modclust {

/// N x I real-valued attribute table, stored row-major so each unit is a
/// contiguous span.
class NumericAttributeMatrix {
 public:
  explicit NumericAttributeMatrix(RowMatrix entries);

  std::size_t n_units() const { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t n_attrs() const { return static_cast<std::size_t>(entries_.cols()); }
  const RowMatrix& entries() const { return entries_; }
  std::span<const double> row(std::size_t n) const {
    return {entries_.data() + n * n_attrs(), n_attrs()};
  }

  bool operator==(const NumericAttributeMatrix& other) const { return entries_ == other.entries_; }

 private:
  RowMatrix entries_;
};

/// Finite, ordered category set of one attribute. The order is the
/// tie-break precedence for modes.
struct CategoryDomain {
  std::string name;
  std::vector<std::string> categories;

  std::size_t size() const { return categories.size(); }
  bool operator==(const CategoryDomain&) const = default;
};

/// N x I table of category codes; entry (n, i) indexes domains[i].categories.
class CategoricalAttributeMatrix {
 public:
  CategoricalAttributeMatrix(CodeMatrix codes, std::vector<CategoryDomain> domains);

  std::size_t n_units() const { return static_cast<std::size_t>(codes_.rows()); }
  std::size_t n_attrs() const { return static_cast<std::size_t>(codes_.cols()); }
  const CodeMatrix& codes() const { return codes_; }
  const std::vector<CategoryDomain>& domains() const { return domains_; }
  std::span<const int> row(std::size_t n) const {
    return {codes_.data() + n * n_attrs(), n_attrs()};
  }

  bool operator==(const CategoricalAttributeMatrix& other) const {
    return codes_ == other.codes_ && domains_ == other.domains_;
  }

 private:
  CodeMatrix codes_;
  std::vector<CategoryDomain> domains_;
};

/// A categorical row together with the domains its codes refer to.
struct CategoricalRow {
  std::span<const int> codes;
  std::span<const CategoryDomain> domains;
};

/// sum_i (x_i - y_i)^2. Throws DimensionMismatch on unequal lengths.
double squared_euclidean(std::span<const double> x, std::span<const double> y);

/// Number of mismatched positions. Throws DimensionMismatch on unequal
/// lengths.
int hamming_distance(std::span<const int> x, std::span<const int> y);

/// As above, additionally throwing DomainMismatch when the two rows do not
/// share the same per-attribute domains.
int hamming_distance(const CategoricalRow& x, const CategoricalRow& y);

/// Pairwise squared Euclidean distances between all units.
Matrix pairwise_squared_euclidean(const NumericAttributeMatrix& x);

}  // namespace modclust
