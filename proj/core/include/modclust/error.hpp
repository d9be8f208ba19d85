#pragma once

#include <stdexcept>
#include <string>

namespace modclust {

// Base of every error raised by the library. The category drives the CLI
// exit code: data problems map to 2, numerical degeneracy to 3.
class Error : public std::runtime_error {
 public:
  enum class Category { Data, Numerical, Io };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

#define MODCLUST_DATA_ERROR(Name)                                     \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what)                            \
        : Error(Category::Data, std::string(#Name ": ") + what) {}    \
  }

MODCLUST_DATA_ERROR(DimensionMismatch);
MODCLUST_DATA_ERROR(DomainMismatch);
MODCLUST_DATA_ERROR(ZeroStrengthNetwork);
MODCLUST_DATA_ERROR(TooFewUnits);
MODCLUST_DATA_ERROR(InvalidSpec);
MODCLUST_DATA_ERROR(InvalidAdjacency);
MODCLUST_DATA_ERROR(AsymmetryError);
MODCLUST_DATA_ERROR(ParseError);
MODCLUST_DATA_ERROR(IdentifierMismatch);
MODCLUST_DATA_ERROR(MissingValue);
MODCLUST_DATA_ERROR(InvalidMembership);

#undef MODCLUST_DATA_ERROR

// Validity index with a zero compactness denominator.
class ZeroCompactness : public Error {
 public:
  explicit ZeroCompactness(const std::string& what)
      : Error(Category::Numerical, "ZeroCompactness: " + what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what)
      : Error(Category::Io, "IoError: " + what) {}
};

}  // namespace modclust
