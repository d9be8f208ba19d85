#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "modclust/attributes.hpp"
#include "modclust/graph.hpp"
#include "modclust/membership.hpp"
#include "modclust/validity.hpp"

namespace modclust {

namespace fs = std::filesystem;

enum class AttributeKind { Numeric, Categorical };
enum class AdjacencyFormat { Dense, EdgeList };

struct DatasetSchema {
  AttributeKind kind = AttributeKind::Numeric;
  AdjacencyFormat adjacency_format = AdjacencyFormat::EdgeList;
  /// `name: cat1,cat2,...` per line. Without it, categorical domains are
  /// inferred from the observed values, sorted lexicographically.
  std::optional<fs::path> categorical_schema;
};

using Attributes = std::variant<NumericAttributeMatrix, CategoricalAttributeMatrix>;

struct DatasetBundle {
  std::vector<std::string> ids;
  std::vector<std::string> attribute_names;
  Attributes attributes;
  AdjacencyMatrix adjacency;
  std::vector<std::string> warnings;

  std::size_t n_units() const { return ids.size(); }
  bool is_numeric() const { return std::holds_alternative<NumericAttributeMatrix>(attributes); }
  const NumericAttributeMatrix& numeric() const { return std::get<NumericAttributeMatrix>(attributes); }
  const CategoricalAttributeMatrix& categorical() const {
    return std::get<CategoricalAttributeMatrix>(attributes);
  }
};

/// Reads an attribute CSV (header row, leading identifier column) and an
/// adjacency file, and checks that they agree.
///
/// Errors: ParseError, IdentifierMismatch, AsymmetryError, MissingValue,
/// InvalidAdjacency, IoError.
DatasetBundle load_dataset(const fs::path& attributes_path, const fs::path& adjacency_path,
                           const DatasetSchema& schema);

// CSV building blocks -------------------------------------------------------

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
/// Fixed notation with `decimals` digits.
std::string format_fixed(double value, int decimals);

void write_numeric_attributes(const fs::path& path, const std::vector<std::string>& ids,
                              const std::vector<std::string>& names,
                              const NumericAttributeMatrix& x);
void write_categorical_attributes(const fs::path& path, const std::vector<std::string>& ids,
                                  const CategoricalAttributeMatrix& x);
void write_categorical_schema(const fs::path& path, const std::vector<CategoryDomain>& domains);
std::vector<CategoryDomain> read_categorical_schema(const fs::path& path);

/// `src,dst,weight` with one row per unordered pair n < m of positive weight.
void write_edge_list(const fs::path& path, const std::vector<std::string>& ids,
                     const AdjacencyMatrix& a);
void write_dense_adjacency(const fs::path& path, const AdjacencyMatrix& a);
AdjacencyMatrix read_edge_list(const fs::path& path, const std::vector<std::string>& ids);
AdjacencyMatrix read_dense_adjacency(const fs::path& path, std::size_t n_units);

// Run manifests -------------------------------------------------------------

struct InputDigest {
  std::string role;
  std::string path;
  std::string sha256;
  bool operator==(const InputDigest&) const = default;
};

/// Everything needed to repeat a CLI run: the subcommand, its normalised
/// arguments (without the output directory) and digests of every input.
struct RunManifest {
  std::string tool = "modclust";
  std::string version;
  std::string command;
  std::vector<std::string> arguments;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<InputDigest> inputs;
  std::vector<std::pair<std::string, std::string>> config;
  std::string tie_break = "lowest index";

  bool operator==(const RunManifest&) const = default;
};

std::string library_version();
std::string sha256_file(const fs::path& path);
void write_manifest(const fs::path& path, const RunManifest& manifest);
RunManifest read_manifest(const fs::path& path);

// Result files --------------------------------------------------------------

/// Writes memberships.csv (full precision), memberships_display.csv
/// (2 decimals), prototypes.csv, summary.json, manifest.json and plotdata/.
/// Returns the paths written.
std::vector<fs::path> save_result(const FitResult& result, const CrispPartition& crisp,
                                  const DatasetBundle& data, const RunManifest& manifest,
                                  const fs::path& out_dir);

/// Writes validity.csv (rows = C, columns = gamma), validity_display.csv,
/// grid.json with per-cell metadata and manifest.json. When the grid has a
/// best cell and `best_crisp` is given, the best fit is saved alongside
/// as with the FitResult overload.
std::vector<fs::path> save_result(const GridResult& grid, const DatasetBundle& data,
                                  const RunManifest& manifest, const fs::path& out_dir,
                                  const std::optional<CrispPartition>& best_crisp = std::nullopt);

/// crisp.csv: id and label (1-based cluster or "fuzzy").
std::vector<fs::path> save_result(const CrispPartition& crisp, const std::vector<std::string>& ids,
                                  const RunManifest& manifest, const fs::path& out_dir);

struct MembershipTable {
  std::vector<std::string> ids;
  Matrix memberships;
  std::vector<std::string> labels;
};

MembershipTable read_memberships(const fs::path& path);
Prototypes read_prototypes(const fs::path& path, const DatasetBundle& data);
void write_validity_table(const fs::path& path, const GridTable& table, int decimals = -1);
GridTable read_validity_table(const fs::path& path);

}  // namespace modclust
