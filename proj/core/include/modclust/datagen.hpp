#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "modclust/attributes.hpp"
#include "modclust/graph.hpp"

namespace modclust {

/// Stochastic block model: units are laid out block by block and every pair
/// n < m is linked independently with probability P[block(n)][block(m)].
struct SbmSpec {
  std::vector<std::size_t> block_sizes;
  Matrix prob_matrix;
  std::uint64_t seed = 0;

  std::size_t n_units() const;
  void validate() const;
  bool operator==(const SbmSpec& other) const {
    return block_sizes == other.block_sizes && prob_matrix == other.prob_matrix &&
           seed == other.seed;
  }
};

/// Block index of every unit, in unit order.
std::vector<std::size_t> block_labels(const std::vector<std::size_t>& block_sizes);

/// Throws InvalidSpec.
AdjacencyMatrix generate_sbm(const SbmSpec& spec);

struct Circle {
  double center_x = 0.0;
  double center_y = 0.0;
  double radius = 1.0;
  std::size_t count = 0;
  bool operator==(const Circle&) const = default;
};

/// Two-dimensional attributes drawn uniformly over one disk per block.
struct CircleAttrSpec {
  std::vector<Circle> blocks;

  void validate() const;
  bool operator==(const CircleAttrSpec&) const = default;
};

NumericAttributeMatrix generate_circle_attributes(const CircleAttrSpec& spec, std::uint64_t seed);

struct CategoricalBlock {
  std::size_t count = 0;
  /// One probability vector over the categories per attribute column.
  std::vector<std::vector<double>> column_probabilities;
  bool operator==(const CategoricalBlock&) const = default;
};

/// Categorical attributes drawn cell by cell from per-block, per-column
/// probability vectors over a shared category set.
struct CategoricalAttrSpec {
  std::vector<std::string> categories;
  std::vector<CategoricalBlock> blocks;

  std::size_t n_attrs() const;
  void validate() const;
  bool operator==(const CategoricalAttrSpec&) const = default;
};

CategoricalAttributeMatrix generate_categorical_attributes(const CategoricalAttrSpec& spec,
                                                           std::uint64_t seed);

/// A complete simulation scenario: network model plus attribute recipe.
struct SimulationPreset {
  std::string name;
  SbmSpec network;
  std::variant<CircleAttrSpec, CategoricalAttrSpec> attributes;

  bool operator==(const SimulationPreset&) const = default;
};

/// "circles" (circles) and "tables" (categorical tables). Throws
/// InvalidSpec for unknown names.
SimulationPreset builtin_preset(std::string_view name);
std::vector<std::string> builtin_preset_names();

/// JSON preset files; the shipped files under data/presets match the
/// built-in presets exactly.
SimulationPreset load_preset(const std::filesystem::path& path);
void save_preset(const SimulationPreset& preset, const std::filesystem::path& path);

struct SimulatedDataset {
  std::vector<std::string> ids;
  std::variant<NumericAttributeMatrix, CategoricalAttributeMatrix> attributes;
  AdjacencyMatrix adjacency;
  std::vector<std::size_t> labels;
};

/// Draws network and attributes with seeds derived from `seed`. The
/// preset's own network seed is ignored.
SimulatedDataset simulate(const SimulationPreset& preset, std::uint64_t seed);

}  // namespace modclust
