#include "modclust/datagen.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "json.hpp"
#include "modclust/error.hpp"
#include "modclust/membership.hpp"
#include "modclust/parallel.hpp"

namespace modclust {

using nlohmann::json;

namespace {

constexpr std::uint64_t kNetworkStream = 1;
constexpr std::uint64_t kAttributeStream = 2;

double unit_uniform(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace

std::size_t SbmSpec::n_units() const {
  return std::accumulate(block_sizes.begin(), block_sizes.end(), std::size_t{0});
}

void SbmSpec::validate() const {
  const auto k = static_cast<Eigen::Index>(block_sizes.size());
  if (k == 0) throw InvalidSpec("SBM needs at least one block");
  for (auto s : block_sizes) {
    if (s == 0) throw InvalidSpec("SBM block sizes must be positive");
  }
  if (prob_matrix.rows() != k || prob_matrix.cols() != k) {
    throw InvalidSpec("SBM probability matrix must be " + std::to_string(k) + "x" +
                      std::to_string(k));
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const double p = prob_matrix(i, j);
      if (!(p >= 0.0 && p <= 1.0)) throw InvalidSpec("SBM probabilities must lie in [0, 1]");
      if (p != prob_matrix(j, i)) throw InvalidSpec("SBM probability matrix must be symmetric");
    }
  }
}

std::vector<std::size_t> block_labels(const std::vector<std::size_t>& block_sizes) {
  std::vector<std::size_t> labels;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) labels.insert(labels.end(), block_sizes[b], b);
  return labels;
}

AdjacencyMatrix generate_sbm(const SbmSpec& spec) {
  spec.validate();
  const auto labels = block_labels(spec.block_sizes);
  const std::size_t n = labels.size();
  Rng rng(spec.seed);
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = spec.prob_matrix(static_cast<Eigen::Index>(labels[i]),
                                        static_cast<Eigen::Index>(labels[j]));
      // One draw per pair regardless of p keeps the stream aligned.
      const double draw = unit_uniform(rng);
      const bool edge = p >= 1.0 || (p > 0.0 && draw < p);
      if (edge) a(i, j) = a(j, i) = 1.0;
    }
  }
  return AdjacencyMatrix(std::move(a));
}

void CircleAttrSpec::validate() const {
  if (blocks.empty()) throw InvalidSpec("circle spec needs at least one block");
  for (const auto& c : blocks) {
    if (!(c.radius > 0.0) || !std::isfinite(c.radius)) {
      throw InvalidSpec("circle radius must be positive");
    }
    if (!std::isfinite(c.center_x) || !std::isfinite(c.center_y)) {
      throw InvalidSpec("circle centre must be finite");
    }
  }
}

NumericAttributeMatrix generate_circle_attributes(const CircleAttrSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::size_t n = 0;
  for (const auto& c : spec.blocks) n += c.count;
  RowMatrix x(static_cast<Eigen::Index>(n), 2);
  Rng rng(seed);
  Eigen::Index row = 0;
  for (const auto& c : spec.blocks) {
    for (std::size_t k = 0; k < c.count; ++k, ++row) {
      // Uniform over the disk area: radius ~ R sqrt(U).
      const double r = c.radius * std::sqrt(unit_uniform(rng));
      const double theta = 2.0 * std::numbers::pi * unit_uniform(rng);
      x(row, 0) = c.center_x + r * std::cos(theta);
      x(row, 1) = c.center_y + r * std::sin(theta);
    }
  }
  return NumericAttributeMatrix(std::move(x));
}

std::size_t CategoricalAttrSpec::n_attrs() const {
  return blocks.empty() ? 0 : blocks.front().column_probabilities.size();
}

void CategoricalAttrSpec::validate() const {
  if (categories.empty()) throw InvalidSpec("categorical spec needs categories");
  if (blocks.empty()) throw InvalidSpec("categorical spec needs at least one block");
  const std::size_t n_attrs = this->n_attrs();
  if (n_attrs == 0) throw InvalidSpec("categorical spec needs at least one attribute");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].column_probabilities.size() != n_attrs) {
      throw InvalidSpec("block " + std::to_string(b) + " has a different attribute count");
    }
    for (const auto& probs : blocks[b].column_probabilities) {
      if (probs.size() != categories.size()) {
        throw InvalidSpec("probability vector length must equal the number of categories");
      }
      double sum = 0.0;
      for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidSpec("probabilities must be >= 0");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw InvalidSpec("probability vector sums to " + std::to_string(sum));
      }
    }
  }
}

CategoricalAttributeMatrix generate_categorical_attributes(const CategoricalAttrSpec& spec,
                                                           std::uint64_t seed) {
  spec.validate();
  const std::size_t n_attrs = spec.n_attrs();
  std::size_t n = 0;
  for (const auto& b : spec.blocks) n += b.count;

  CodeMatrix codes(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_attrs));
  Rng rng(seed);
  Eigen::Index row = 0;
  for (const auto& block : spec.blocks) {
    std::vector<std::discrete_distribution<int>> columns;
    for (const auto& probs : block.column_probabilities) {
      columns.emplace_back(probs.begin(), probs.end());
    }
    for (std::size_t k = 0; k < block.count; ++k, ++row) {
      for (std::size_t i = 0; i < n_attrs; ++i) {
        codes(row, static_cast<Eigen::Index>(i)) = columns[i](rng);
      }
    }
  }

  std::vector<CategoryDomain> domains;
  for (std::size_t i = 0; i < n_attrs; ++i) {
    domains.push_back({"x" + std::to_string(i + 1), spec.categories});
  }
  return CategoricalAttributeMatrix(std::move(codes), std::move(domains));
}

// ---------------------------------------------------------------------------
// Presets

namespace {

SbmSpec four_block_network() {
  SbmSpec s;
  s.block_sizes = {30, 30, 30, 5};
  s.prob_matrix.resize(4, 4);
  s.prob_matrix << 0.7, 0.35, 0.15, 0.35,
                   0.35, 0.7, 0.15, 0.35,
                   0.15, 0.15, 0.7, 0.35,
                   0.35, 0.35, 0.35, 0.7;
  return s;
}

// Rows are categories A..E, columns are attributes x1..x10.
using CategoryTable = std::vector<std::vector<double>>;

CategoricalBlock block_from_table(std::size_t count, const CategoryTable& table) {
  CategoricalBlock block;
  block.count = count;
  const std::size_t n_attrs = table.front().size();
  block.column_probabilities.assign(n_attrs, std::vector<double>(table.size()));
  for (std::size_t v = 0; v < table.size(); ++v) {
    for (std::size_t i = 0; i < n_attrs; ++i) block.column_probabilities[i][v] = table[v][i];
  }
  return block;
}

SimulationPreset circles_preset() {
  SimulationPreset p;
  p.name = "circles";
  p.network = four_block_network();
  p.attributes = CircleAttrSpec{{
      {-3.0, 3.0, 1.0, 30},
      {2.0, 2.5, 1.0, 30},
      {1.0, 1.0, 1.0, 30},
      {-1.0, 1.5, 1.0, 5},
  }};
  return p;
}

SimulationPreset tables_preset() {
  SimulationPreset p;
  p.name = "tables";
  p.network = four_block_network();
  CategoricalAttrSpec spec;
  spec.categories = {"A", "B", "C", "D", "E"};
  spec.blocks.push_back(block_from_table(30, {
      {0.6, 0.6, 0.1, 0.1, 0.0, 0.0, 0.1, 0.1, 0.0, 0.0},
      {0.3, 0.3, 0.6, 0.6, 0.0, 0.0, 0.0, 0.0, 0.3, 0.3},
      {0.1, 0.1, 0.2, 0.2, 0.1, 0.1, 0.6, 0.6, 0.6, 0.6},
      {0.0, 0.0, 0.1, 0.1, 0.6, 0.6, 0.1, 0.1, 0.1, 0.1},
      {0.0, 0.0, 0.0, 0.0, 0.3, 0.3, 0.2, 0.2, 0.0, 0.0},
  }));
  spec.blocks.push_back(block_from_table(30, {
      {0.0, 0.0, 0.0, 0.0, 0.7, 0.7, 0.3, 0.3, 0.7, 0.7},
      {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.7, 0.7, 0.0, 0.0},
      {0.3, 0.3, 0.0, 0.0, 0.3, 0.3, 0.0, 0.0, 0.0, 0.0},
      {0.0, 0.0, 0.7, 0.7, 0.0, 0.0, 0.0, 0.0, 0.3, 0.3},
      {0.7, 0.7, 0.3, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
  }));
  spec.blocks.push_back(block_from_table(30, {
      {0.3, 0.3, 0.6, 0.6, 0.0, 0.0, 0.1, 0.1, 0.0, 0.0},
      {0.1, 0.1, 0.2, 0.2, 0.6, 0.6, 0.0, 0.0, 0.0, 0.0},
      {0.0, 0.0, 0.1, 0.1, 0.1, 0.1, 0.2, 0.2, 0.3, 0.3},
      {0.6, 0.6, 0.1, 0.1, 0.3, 0.3, 0.6, 0.6, 0.1, 0.1},
      {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.1, 0.1, 0.6, 0.6},
  }));
  spec.blocks.push_back(block_from_table(5, {
      {0.3, 0.3, 0.3, 0.3, 0.3, 0.3, 0.1, 0.1, 0.3, 0.3},
      {0.1, 0.1, 0.3, 0.3, 0.3, 0.3, 0.3, 0.3, 0.1, 0.1},
      {0.0, 0.0, 0.1, 0.1, 0.0, 0.0, 0.3, 0.3, 0.3, 0.3},
      {0.3, 0.3, 0.3, 0.3, 0.3, 0.3, 0.3, 0.3, 0.0, 0.0},
      {0.3, 0.3, 0.0, 0.0, 0.1, 0.1, 0.0, 0.0, 0.3, 0.3},
  }));
  p.attributes = std::move(spec);
  return p;
}

}  // namespace

std::vector<std::string> builtin_preset_names() { return {"circles", "tables"}; }

SimulationPreset builtin_preset(std::string_view name) {
  if (name == "circles") return circles_preset();
  if (name == "tables") return tables_preset();
  throw InvalidSpec("unknown preset '" + std::string(name) + "'");
}

namespace {

json preset_to_json(const SimulationPreset& preset) {
  json j;
  j["name"] = preset.name;
  json matrix = json::array();
  for (Eigen::Index i = 0; i < preset.network.prob_matrix.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < preset.network.prob_matrix.cols(); ++k) {
      row.push_back(preset.network.prob_matrix(i, k));
    }
    matrix.push_back(row);
  }
  j["network"] = {{"block_sizes", preset.network.block_sizes}, {"prob_matrix", matrix}};

  if (const auto* circles = std::get_if<CircleAttrSpec>(&preset.attributes)) {
    json blocks = json::array();
    for (const auto& c : circles->blocks) {
      blocks.push_back({{"center", {c.center_x, c.center_y}}, {"radius", c.radius}, {"count", c.count}});
    }
    j["attributes"] = {{"kind", "circles"}, {"blocks", blocks}};
  } else {
    const auto& cat = std::get<CategoricalAttrSpec>(preset.attributes);
    json blocks = json::array();
    for (const auto& b : cat.blocks) {
      // Stored like the printed tables: one row per category.
      json table = json::array();
      for (std::size_t v = 0; v < cat.categories.size(); ++v) {
        json row = json::array();
        for (const auto& column : b.column_probabilities) row.push_back(column[v]);
        table.push_back(row);
      }
      blocks.push_back({{"count", b.count}, {"table", table}});
    }
    j["attributes"] = {{"kind", "categorical"}, {"categories", cat.categories}, {"blocks", blocks}};
  }
  return j;
}

SimulationPreset preset_from_json(const json& j) {
  SimulationPreset p;
  p.name = j.at("name").get<std::string>();
  const auto& net = j.at("network");
  p.network.block_sizes = net.at("block_sizes").get<std::vector<std::size_t>>();
  const auto rows = net.at("prob_matrix").get<std::vector<std::vector<double>>>();
  p.network.prob_matrix.resize(static_cast<Eigen::Index>(rows.size()),
                               static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw InvalidSpec("prob_matrix must be square");
    for (std::size_t k = 0; k < rows.size(); ++k) {
      p.network.prob_matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }

  const auto& attrs = j.at("attributes");
  const auto kind = attrs.at("kind").get<std::string>();
  if (kind == "circles") {
    CircleAttrSpec spec;
    for (const auto& b : attrs.at("blocks")) {
      const auto center = b.at("center").get<std::vector<double>>();
      if (center.size() != 2) throw InvalidSpec("circle centre must have two coordinates");
      spec.blocks.push_back({center[0], center[1], b.at("radius").get<double>(),
                             b.at("count").get<std::size_t>()});
    }
    p.attributes = std::move(spec);
  } else if (kind == "categorical") {
    CategoricalAttrSpec spec;
    spec.categories = attrs.at("categories").get<std::vector<std::string>>();
    for (const auto& b : attrs.at("blocks")) {
      const auto table = b.at("table").get<CategoryTable>();
      if (table.size() != spec.categories.size() || table.empty()) {
        throw InvalidSpec("table needs one row per category");
      }
      spec.blocks.push_back(block_from_table(b.at("count").get<std::size_t>(), table));
    }
    p.attributes = std::move(spec);
  } else {
    throw InvalidSpec("unknown attribute kind '" + kind + "'");
  }
  return p;
}

}  // namespace

SimulationPreset load_preset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open preset " + path.string());
  try {
    return preset_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw InvalidSpec("malformed preset " + path.string() + ": " + e.what());
  }
}

void save_preset(const SimulationPreset& preset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write preset " + path.string());
  out << preset_to_json(preset).dump(2) << '\n';
}

SimulatedDataset simulate(const SimulationPreset& preset, std::uint64_t seed) {
  SbmSpec network = preset.network;
  network.seed = mix_seed(seed, kNetworkStream);
  const std::size_t n = network.n_units();
  const std::uint64_t attr_seed = mix_seed(seed, kAttributeStream);

  auto attributes = std::visit(
      [&](const auto& spec) -> std::variant<NumericAttributeMatrix, CategoricalAttributeMatrix> {
        using T = std::decay_t<decltype(spec)>;
        std::size_t count = 0;
        for (const auto& b : spec.blocks) count += b.count;
        if (count != n) {
          throw InvalidSpec("attribute blocks cover " + std::to_string(count) +
                            " units but the network has " + std::to_string(n));
        }
        if constexpr (std::is_same_v<T, CircleAttrSpec>) {
          return generate_circle_attributes(spec, attr_seed);
        } else {
          return generate_categorical_attributes(spec, attr_seed);
        }
      },
      preset.attributes);

  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back("u" + std::to_string(i + 1));

  return SimulatedDataset{std::move(ids), std::move(attributes), generate_sbm(network),
                          block_labels(network.block_sizes)};
}

}  // namespace modclust
