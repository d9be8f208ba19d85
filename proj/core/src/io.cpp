#include "modclust/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "modclust/error.hpp"

#ifndef MODCLUST_VERSION
#define MODCLUST_VERSION "0.0.0"
#endif

namespace modclust {

using ojson = nlohmann::ordered_json;

namespace {

constexpr int kDisplayDecimals = 2;

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string where(const fs::path& path, std::size_t line, std::size_t column = 0) {
  std::string out = path.string() + ":" + std::to_string(line);
  if (column > 0) out += ":" + std::to_string(column);
  return out;
}

// Splits one CSV line. Double quotes delimit fields containing commas; a
// doubled quote inside them is a literal quote. Unquoted fields are trimmed.
std::vector<std::string> split_csv_line(const std::string& line, const fs::path& path,
                                        std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"' && trim(field).empty()) {
      quoted = true;
      was_quoted = true;
      field.clear();
    } else if (ch == ',') {
      fields.push_back(was_quoted ? field : trim(field));
      field.clear();
      was_quoted = false;
    } else if (was_quoted) {
      if (ch != ' ' && ch != '\t' && ch != '\r') {
        throw ParseError(where(path, line_no, i + 1) + ": text after closing quote");
      }
    } else {
      field += ch;
    }
  }
  if (quoted) throw ParseError(where(path, line_no) + ": unterminated quoted field");
  fields.push_back(was_quoted ? field : trim(field));
  return fields;
}

std::vector<CsvRow> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<CsvRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    rows.push_back({line_no, split_csv_line(line, path, line_no)});
  }
  return rows;
}

bool is_missing(const std::string& field) {
  return field.empty() || field == "NA" || field == "NaN" || field == "nan" || field == "?";
}

double parse_number(const std::string& field, const fs::path& path, std::size_t line,
                    std::size_t column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) {
    throw ParseError(where(path, line, column) + ": '" + field + "' is not a number");
  }
  return value;
}

std::string quote_csv(const std::string& field) {
  const bool needs = field.find_first_of(",\"\n") != std::string::npos ||
                     (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void require_header(const std::vector<CsvRow>& rows, const fs::path& path) {
  if (rows.empty()) throw ParseError(path.string() + ": empty file");
}

void check_row_length(const CsvRow& row, std::size_t expected, const fs::path& path) {
  if (row.fields.size() != expected) {
    throw ParseError(where(path, row.line) + ": expected " + std::to_string(expected) +
                     " fields, found " + std::to_string(row.fields.size()));
  }
}

std::unordered_map<std::string, std::size_t> index_ids(const std::vector<std::string>& ids) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], i);
  return index;
}

std::string label_text(const std::optional<std::size_t>& label) {
  return label ? std::to_string(*label + 1) : std::string("fuzzy");
}

std::string rule_name(CutoffRule rule) {
  return rule == CutoffRule::AtLeast ? "geq" : "strict";
}

// ---------------------------------------------------------------------------
// Attribute tables

struct RawAttributes {
  std::vector<std::string> ids;
  std::vector<std::string> names;
  std::vector<CsvRow> rows;
};

RawAttributes read_attribute_table(const fs::path& path) {
  auto rows = read_csv(path);
  require_header(rows, path);
  RawAttributes raw;
  const auto& header = rows.front().fields;
  if (header.size() < 2) {
    throw ParseError(where(path, rows.front().line) +
                     ": header needs an identifier column and at least one attribute");
  }
  raw.names.assign(header.begin() + 1, header.end());
  std::set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    check_row_length(rows[r], header.size(), path);
    const auto& id = rows[r].fields.front();
    if (id.empty()) throw ParseError(where(path, rows[r].line, 1) + ": empty identifier");
    if (!seen.insert(id).second) {
      throw ParseError(where(path, rows[r].line, 1) + ": duplicate identifier '" + id + "'");
    }
    raw.ids.push_back(id);
  }
  raw.rows.assign(std::make_move_iterator(rows.begin() + 1), std::make_move_iterator(rows.end()));
  return raw;
}

NumericAttributeMatrix parse_numeric(const RawAttributes& raw, const fs::path& path) {
  const auto n = static_cast<Eigen::Index>(raw.rows.size());
  const auto cols = static_cast<Eigen::Index>(raw.names.size());
  RowMatrix x(n, cols);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = raw.rows[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& field = row.fields[static_cast<std::size_t>(c) + 1];
      const auto column = static_cast<std::size_t>(c) + 2;
      if (is_missing(field)) {
        throw MissingValue(where(path, row.line, column) + ": no value for '" +
                           raw.names[static_cast<std::size_t>(c)] + "'");
      }
      x(r, c) = parse_number(field, path, row.line, column);
    }
  }
  return NumericAttributeMatrix(std::move(x));
}

CategoricalAttributeMatrix parse_categorical(const RawAttributes& raw, const fs::path& path,
                                             const std::optional<fs::path>& schema_path,
                                             std::vector<std::string>& warnings) {
  const std::size_t n = raw.rows.size();
  const std::size_t n_attrs = raw.names.size();
  for (const auto& row : raw.rows) {
    for (std::size_t c = 0; c < n_attrs; ++c) {
      if (is_missing(row.fields[c + 1])) {
        throw MissingValue(where(path, row.line, c + 2) + ": no value for '" + raw.names[c] + "'");
      }
    }
  }

  std::vector<CategoryDomain> domains;
  if (schema_path) {
    const auto schema = read_categorical_schema(*schema_path);
    for (const auto& name : raw.names) {
      const auto it = std::find_if(schema.begin(), schema.end(),
                                   [&](const CategoryDomain& d) { return d.name == name; });
      if (it == schema.end()) {
        throw DomainMismatch("attribute '" + name + "' is not declared in " +
                             schema_path->string());
      }
      domains.push_back(*it);
    }
  } else {
    for (std::size_t c = 0; c < n_attrs; ++c) {
      std::set<std::string> observed;
      for (const auto& row : raw.rows) observed.insert(row.fields[c + 1]);
      domains.push_back({raw.names[c], {observed.begin(), observed.end()}});
    }
    warnings.push_back("no categorical schema given; domains inferred from the data in "
                       "lexicographic order");
  }

  CodeMatrix codes(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_attrs));
  for (std::size_t c = 0; c < n_attrs; ++c) {
    std::unordered_map<std::string, int> lookup;
    for (std::size_t v = 0; v < domains[c].size(); ++v) {
      lookup.emplace(domains[c].categories[v], static_cast<int>(v));
    }
    for (std::size_t r = 0; r < n; ++r) {
      const auto& field = raw.rows[r].fields[c + 1];
      const auto it = lookup.find(field);
      if (it == lookup.end()) {
        throw DomainMismatch(where(path, raw.rows[r].line, c + 2) + ": '" + field +
                             "' is not in the domain of '" + raw.names[c] + "'");
      }
      codes(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = it->second;
    }
  }
  return CategoricalAttributeMatrix(std::move(codes), std::move(domains));
}

// ---------------------------------------------------------------------------
// JSON helpers

ojson manifest_to_json(const RunManifest& m) {
  ojson j;
  j["tool"] = m.tool;
  j["version"] = m.version;
  j["command"] = m.command;
  j["arguments"] = m.arguments;
  j["algorithm"] = m.algorithm;
  j["seed"] = m.seed;
  ojson inputs = ojson::array();
  for (const auto& in : m.inputs) {
    inputs.push_back({{"role", in.role}, {"path", in.path}, {"sha256", in.sha256}});
  }
  j["inputs"] = inputs;
  ojson config = ojson::object();
  for (const auto& [k, v] : m.config) config[k] = v;
  j["config"] = config;
  j["tie_break"] = m.tie_break;
  return j;
}

void write_json(const fs::path& path, const ojson& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

ojson number_or_null(double v) {
  return std::isfinite(v) ? ojson(v) : ojson(nullptr);
}

void write_membership_files(const fs::path& dir, const MembershipMatrix& u,
                            const CrispPartition& crisp, const std::vector<std::string>& ids,
                            std::vector<fs::path>& written) {
  const std::size_t c_count = u.n_clusters();
  std::string header = "id";
  for (std::size_t c = 0; c < c_count; ++c) header += ",u" + std::to_string(c + 1);
  header += ",label\n";

  const auto full = dir / "memberships.csv";
  const auto display = dir / "memberships_display.csv";
  auto out_full = open_output(full);
  auto out_display = open_output(display);
  out_full << header;
  out_display << header;
  for (std::size_t n = 0; n < u.n_units(); ++n) {
    out_full << quote_csv(ids[n]);
    out_display << quote_csv(ids[n]);
    for (std::size_t c = 0; c < c_count; ++c) {
      out_full << ',' << format_double(u(n, c));
      out_display << ',' << format_fixed(u(n, c), kDisplayDecimals);
    }
    out_full << ',' << label_text(crisp.labels[n]) << '\n';
    out_display << ',' << label_text(crisp.labels[n]) << '\n';
  }
  finish(out_full, full);
  finish(out_display, display);
  written.push_back(full);
  written.push_back(display);
}

void write_prototypes(const fs::path& path, const Prototypes& prototypes,
                      const DatasetBundle& data) {
  auto out = open_output(path);
  if (const auto* medoids = std::get_if<MedoidSet>(&prototypes)) {
    out << "cluster,id";
    for (const auto& name : data.attribute_names) out << ',' << quote_csv(name);
    out << '\n';
    for (std::size_t c = 0; c < medoids->size(); ++c) {
      const std::size_t unit = (*medoids)[c];
      out << c + 1 << ',' << quote_csv(data.ids[unit]);
      if (data.is_numeric()) {
        for (double v : data.numeric().row(unit)) out << ',' << format_double(v);
      } else {
        const auto& x = data.categorical();
        const auto row = x.row(unit);
        for (std::size_t i = 0; i < row.size(); ++i) {
          out << ',' << quote_csv(x.domains()[i].categories[static_cast<std::size_t>(row[i])]);
        }
      }
      out << '\n';
    }
  } else {
    const auto& modes = std::get<ModeSet>(prototypes);
    const auto& x = data.categorical();
    out << "cluster";
    for (const auto& d : x.domains()) out << ',' << quote_csv(d.name);
    out << '\n';
    for (Eigen::Index c = 0; c < modes.codes().rows(); ++c) {
      out << c + 1;
      for (Eigen::Index i = 0; i < modes.codes().cols(); ++i) {
        const auto& domain = x.domains()[static_cast<std::size_t>(i)];
        out << ',' << quote_csv(domain.categories[static_cast<std::size_t>(modes.codes()(c, i))]);
      }
      out << '\n';
    }
  }
  finish(out, path);
}

void write_plotdata(const fs::path& dir, const FitResult& result, const CrispPartition& crisp,
                    const DatasetBundle& data, std::vector<fs::path>& written) {
  const auto plot_dir = dir / "plotdata";
  std::error_code ec;
  fs::create_directories(plot_dir, ec);
  if (ec) throw IoError("cannot create " + plot_dir.string() + ": " + ec.message());

  const auto& u = result.membership;
  const auto long_path = plot_dir / "memberships_long.csv";
  auto out = open_output(long_path);
  out << "unit_index,id,cluster,membership\n";
  for (std::size_t n = 0; n < u.n_units(); ++n) {
    for (std::size_t c = 0; c < u.n_clusters(); ++c) {
      out << n + 1 << ',' << quote_csv(data.ids[n]) << ',' << c + 1 << ','
          << format_double(u(n, c)) << '\n';
    }
  }
  finish(out, long_path);
  written.push_back(long_path);

  if (!data.is_numeric()) return;
  const auto& x = data.numeric();
  const auto scatter_path = plot_dir / "scatter.csv";
  auto scatter = open_output(scatter_path);
  scatter << "id,x,y,argmax,max_membership,label\n";
  for (std::size_t n = 0; n < u.n_units(); ++n) {
    const auto row = x.row(n);
    const std::size_t best = u.argmax(n);
    scatter << quote_csv(data.ids[n]) << ',' << format_double(row[0]) << ','
            << (row.size() > 1 ? format_double(row[1]) : std::string("0")) << ',' << best + 1
            << ',' << format_double(u(n, best)) << ',' << label_text(crisp.labels[n]) << '\n';
  }
  finish(scatter, scatter_path);
  written.push_back(scatter_path);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

// ---------------------------------------------------------------------------
// Public API

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string format_fixed(double value, int decimals) {
  if (!std::isfinite(value)) return format_double(value);
  std::array<char, 400> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, decimals);
  if (ec != std::errc()) return format_double(value);
  return std::string(buf.data(), ptr);
}

DatasetBundle load_dataset(const fs::path& attributes_path, const fs::path& adjacency_path,
                           const DatasetSchema& schema) {
  auto raw = read_attribute_table(attributes_path);
  if (raw.ids.size() < 2) {
    throw TooFewUnits(attributes_path.string() + " holds " + std::to_string(raw.ids.size()) +
                      " units");
  }
  std::vector<std::string> warnings;
  Attributes attributes =
      schema.kind == AttributeKind::Numeric
          ? Attributes(parse_numeric(raw, attributes_path))
          : Attributes(parse_categorical(raw, attributes_path, schema.categorical_schema, warnings));
  AdjacencyMatrix adjacency = schema.adjacency_format == AdjacencyFormat::EdgeList
                                  ? read_edge_list(adjacency_path, raw.ids)
                                  : read_dense_adjacency(adjacency_path, raw.ids.size());
  return DatasetBundle{std::move(raw.ids), std::move(raw.names), std::move(attributes),
                       std::move(adjacency), std::move(warnings)};
}

void write_numeric_attributes(const fs::path& path, const std::vector<std::string>& ids,
                              const std::vector<std::string>& names,
                              const NumericAttributeMatrix& x) {
  if (ids.size() != x.n_units() || names.size() != x.n_attrs()) {
    throw DimensionMismatch("identifier or attribute name count does not match the matrix");
  }
  auto out = open_output(path);
  out << "id";
  for (const auto& name : names) out << ',' << quote_csv(name);
  out << '\n';
  for (std::size_t n = 0; n < x.n_units(); ++n) {
    out << quote_csv(ids[n]);
    for (double v : x.row(n)) out << ',' << format_double(v);
    out << '\n';
  }
  finish(out, path);
}

void write_categorical_attributes(const fs::path& path, const std::vector<std::string>& ids,
                                  const CategoricalAttributeMatrix& x) {
  if (ids.size() != x.n_units()) {
    throw DimensionMismatch("identifier count does not match the matrix");
  }
  auto out = open_output(path);
  out << "id";
  for (const auto& d : x.domains()) out << ',' << quote_csv(d.name);
  out << '\n';
  for (std::size_t n = 0; n < x.n_units(); ++n) {
    out << quote_csv(ids[n]);
    const auto row = x.row(n);
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << ',' << quote_csv(x.domains()[i].categories[static_cast<std::size_t>(row[i])]);
    }
    out << '\n';
  }
  finish(out, path);
}

void write_categorical_schema(const fs::path& path, const std::vector<CategoryDomain>& domains) {
  auto out = open_output(path);
  for (const auto& d : domains) {
    out << d.name << ':';
    for (std::size_t v = 0; v < d.categories.size(); ++v) {
      out << (v == 0 ? " " : ",") << d.categories[v];
    }
    out << '\n';
  }
  finish(out, path);
}

std::vector<CategoryDomain> read_categorical_schema(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<CategoryDomain> domains;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
      throw ParseError(where(path, line_no) + ": expected 'name: cat1,cat2,...'");
    }
    CategoryDomain d{trim(std::string_view(text).substr(0, colon)), {}};
    if (d.name.empty()) throw ParseError(where(path, line_no) + ": empty attribute name");
    std::stringstream rest(text.substr(colon + 1));
    std::string cat;
    std::set<std::string> seen;
    while (std::getline(rest, cat, ',')) {
      cat = trim(cat);
      if (cat.empty()) throw ParseError(where(path, line_no) + ": empty category");
      if (!seen.insert(cat).second) {
        throw ParseError(where(path, line_no) + ": duplicate category '" + cat + "'");
      }
      d.categories.push_back(cat);
    }
    if (d.categories.empty()) throw ParseError(where(path, line_no) + ": no categories");
    for (const auto& other : domains) {
      if (other.name == d.name) {
        throw ParseError(where(path, line_no) + ": attribute '" + d.name + "' declared twice");
      }
    }
    domains.push_back(std::move(d));
  }
  return domains;
}

void write_edge_list(const fs::path& path, const std::vector<std::string>& ids,
                     const AdjacencyMatrix& a) {
  if (ids.size() != a.n_units()) throw DimensionMismatch("identifier count does not match");
  auto out = open_output(path);
  out << "src,dst,weight\n";
  for (std::size_t n = 0; n < a.n_units(); ++n) {
    for (std::size_t m = n + 1; m < a.n_units(); ++m) {
      if (a(n, m) > 0.0) {
        out << quote_csv(ids[n]) << ',' << quote_csv(ids[m]) << ',' << format_double(a(n, m))
            << '\n';
      }
    }
  }
  finish(out, path);
}

void write_dense_adjacency(const fs::path& path, const AdjacencyMatrix& a) {
  auto out = open_output(path);
  for (std::size_t n = 0; n < a.n_units(); ++n) {
    for (std::size_t m = 0; m < a.n_units(); ++m) {
      if (m > 0) out << ',';
      out << format_double(a(n, m));
    }
    out << '\n';
  }
  finish(out, path);
}

AdjacencyMatrix read_edge_list(const fs::path& path, const std::vector<std::string>& ids) {
  const auto rows = read_csv(path);
  const auto index = index_ids(ids);
  const auto n = static_cast<Eigen::Index>(ids.size());
  Matrix a = Matrix::Zero(n, n);
  Matrix seen = Matrix::Zero(n, n);

  std::size_t start = 0;
  if (!rows.empty() && rows.front().fields.size() >= 2 && rows.front().fields[0] == "src" &&
      rows.front().fields[1] == "dst") {
    start = 1;
  }
  for (std::size_t r = start; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != 2 && row.fields.size() != 3) {
      throw ParseError(where(path, row.line) + ": expected src,dst[,weight], found " +
                       std::to_string(row.fields.size()) + " fields");
    }
    std::array<Eigen::Index, 2> ends{};
    for (std::size_t k = 0; k < 2; ++k) {
      const auto it = index.find(row.fields[k]);
      if (it == index.end()) {
        throw IdentifierMismatch(where(path, row.line, k + 1) + ": unknown identifier '" +
                                 row.fields[k] + "'");
      }
      ends[k] = static_cast<Eigen::Index>(it->second);
    }
    double w = 1.0;
    if (row.fields.size() == 3) {
      if (is_missing(row.fields[2])) {
        throw MissingValue(where(path, row.line, 3) + ": no edge weight");
      }
      w = parse_number(row.fields[2], path, row.line, 3);
    }
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidAdjacency(where(path, row.line, 3) + ": weight must be finite and >= 0");
    }
    const auto [i, j] = ends;
    if (i == j) {
      throw InvalidAdjacency(where(path, row.line) + ": self-loop on '" + row.fields[0] + "'");
    }
    if (seen(i, j) != 0.0) {
      if (a(i, j) != w) {
        throw AsymmetryError(where(path, row.line) + ": edge " + row.fields[0] + "-" +
                             row.fields[1] + " listed with different weights");
      }
      continue;
    }
    seen(i, j) = seen(j, i) = 1.0;
    a(i, j) = a(j, i) = w;
  }
  return AdjacencyMatrix(std::move(a));
}

AdjacencyMatrix read_dense_adjacency(const fs::path& path, std::size_t n_units) {
  const auto rows = read_csv(path);
  if (rows.size() != n_units) {
    throw DimensionMismatch(path.string() + " has " + std::to_string(rows.size()) +
                            " rows but the attribute file has " + std::to_string(n_units) +
                            " units");
  }
  const auto n = static_cast<Eigen::Index>(n_units);
  Matrix a(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    check_row_length(row, n_units, path);
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& field = row.fields[static_cast<std::size_t>(c)];
      const auto column = static_cast<std::size_t>(c) + 1;
      if (is_missing(field)) throw MissingValue(where(path, row.line, column) + ": empty cell");
      a(r, c) = parse_number(field, path, row.line, column);
    }
  }
  return AdjacencyMatrix(std::move(a));
}

std::string library_version() { return MODCLUST_VERSION; }

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

void write_manifest(const fs::path& path, const RunManifest& manifest) {
  write_json(path, manifest_to_json(manifest));
}

RunManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    const auto j = ojson::parse(in);
    RunManifest m;
    m.tool = j.at("tool").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.arguments = j.at("arguments").get<std::vector<std::string>>();
    m.algorithm = j.value("algorithm", std::string());
    m.seed = j.value("seed", std::uint64_t{0});
    const auto inputs = j.value("inputs", ojson::array());
    for (const auto& in_j : inputs) {
      m.inputs.push_back({in_j.at("role").get<std::string>(), in_j.at("path").get<std::string>(),
                          in_j.at("sha256").get<std::string>()});
    }
    const auto config = j.value("config", ojson::object());
    for (const auto& [k, v] : config.items()) {
      m.config.emplace_back(k, v.get<std::string>());
    }
    m.tie_break = j.value("tie_break", m.tie_break);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": malformed manifest: " + e.what());
  }
}

std::vector<fs::path> save_result(const FitResult& result, const CrispPartition& crisp,
                                  const DatasetBundle& data, const RunManifest& manifest,
                                  const fs::path& out_dir) {
  if (result.membership.n_units() != data.n_units() || crisp.labels.size() != data.n_units()) {
    throw DimensionMismatch("result and dataset disagree on the number of units");
  }
  ensure_dir(out_dir);
  std::vector<fs::path> written;
  write_membership_files(out_dir, result.membership, crisp, data.ids, written);

  const auto proto_path = out_dir / "prototypes.csv";
  write_prototypes(proto_path, result.prototypes, data);
  written.push_back(proto_path);

  ojson summary;
  summary["algorithm"] = manifest.algorithm;
  summary["n_units"] = data.n_units();
  summary["n_clusters"] = result.membership.n_clusters();
  summary["objective"] = number_or_null(result.objective);
  summary["n_iterations"] = result.n_iterations;
  summary["converged"] = result.converged;
  summary["restart_index"] = result.restart_index;
  ojson restarts = ojson::array();
  for (double v : result.restart_objectives) restarts.push_back(number_or_null(v));
  summary["restart_objectives"] = restarts;
  summary["cutoff"] = crisp.cutoff;
  summary["cutoff_rule"] = rule_name(crisp.rule);
  summary["n_fuzzy"] = crisp.n_fuzzy();
  summary["tie_break"] = manifest.tie_break;
  summary["warnings"] = data.warnings;
  const auto summary_path = out_dir / "summary.json";
  write_json(summary_path, summary);
  written.push_back(summary_path);

  const auto manifest_path = out_dir / "manifest.json";
  write_manifest(manifest_path, manifest);
  written.push_back(manifest_path);

  write_plotdata(out_dir, result, crisp, data, written);
  return written;
}

std::vector<fs::path> save_result(const GridResult& grid, const DatasetBundle& data,
                                  const RunManifest& manifest, const fs::path& out_dir,
                                  const std::optional<CrispPartition>& best_crisp) {
  ensure_dir(out_dir);
  std::vector<fs::path> written;
  const auto validity_path = out_dir / "validity.csv";
  write_validity_table(validity_path, grid.table);
  written.push_back(validity_path);
  const auto display_path = out_dir / "validity_display.csv";
  write_validity_table(display_path, grid.table, kDisplayDecimals);
  written.push_back(display_path);

  ojson cells = ojson::array();
  for (const auto& cell : grid.cells) {
    ojson j;
    j["n_clusters"] = cell.n_clusters;
    j["gamma"] = cell.gamma;
    if (cell.validity) {
      j["validity"] = number_or_null(cell.validity->value);
      j["degenerate"] = cell.validity->degenerate;
    } else {
      j["validity"] = nullptr;
    }
    if (cell.fit) {
      j["objective"] = number_or_null(cell.fit->objective);
      j["n_iterations"] = cell.fit->n_iterations;
      j["converged"] = cell.fit->converged;
      j["restart_index"] = cell.fit->restart_index;
    }
    if (!cell.error.empty()) j["error"] = cell.error;
    cells.push_back(j);
  }
  ojson doc;
  doc["c_values"] = grid.table.c_values;
  doc["gamma_values"] = grid.table.gamma_values;
  if (grid.best) {
    doc["best"] = {{"n_clusters", grid.best->n_clusters},
                   {"gamma", grid.best->gamma},
                   {"value", grid.best->value}};
  } else {
    doc["best"] = nullptr;
  }
  doc["tie_break"] = "largest value, then smallest C, then smallest gamma";
  doc["cells"] = cells;
  const auto grid_path = out_dir / "grid.json";
  write_json(grid_path, doc);
  written.push_back(grid_path);

  const auto manifest_path = out_dir / "manifest.json";
  write_manifest(manifest_path, manifest);
  written.push_back(manifest_path);

  if (grid.best && best_crisp) {
    const auto& cell = grid.cell(grid.best->row, grid.best->col);
    if (cell.fit) {
      auto best = save_result(*cell.fit, *best_crisp, data, manifest, out_dir / "best");
      written.insert(written.end(), best.begin(), best.end());
    }
  }
  return written;
}

std::vector<fs::path> save_result(const CrispPartition& crisp, const std::vector<std::string>& ids,
                                  const RunManifest& manifest, const fs::path& out_dir) {
  if (crisp.labels.size() != ids.size()) {
    throw DimensionMismatch("partition and identifier list differ in length");
  }
  ensure_dir(out_dir);
  const auto path = out_dir / "crisp.csv";
  auto out = open_output(path);
  out << "id,label\n";
  for (std::size_t n = 0; n < ids.size(); ++n) {
    out << quote_csv(ids[n]) << ',' << label_text(crisp.labels[n]) << '\n';
  }
  finish(out, path);
  const auto manifest_path = out_dir / "manifest.json";
  write_manifest(manifest_path, manifest);
  return {path, manifest_path};
}

MembershipTable read_memberships(const fs::path& path) {
  const auto rows = read_csv(path);
  require_header(rows, path);
  const auto& header = rows.front().fields;
  const bool has_label = header.size() >= 2 && header.back() == "label";
  const std::size_t n_clusters = header.size() - 1 - (has_label ? 1 : 0);
  if (n_clusters == 0) throw ParseError(where(path, rows.front().line) + ": no membership columns");

  MembershipTable table;
  table.memberships.resize(static_cast<Eigen::Index>(rows.size() - 1),
                           static_cast<Eigen::Index>(n_clusters));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    check_row_length(row, header.size(), path);
    table.ids.push_back(row.fields.front());
    for (std::size_t c = 0; c < n_clusters; ++c) {
      table.memberships(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) =
          parse_number(row.fields[c + 1], path, row.line, c + 2);
    }
    if (has_label) table.labels.push_back(row.fields.back());
  }
  return table;
}

Prototypes read_prototypes(const fs::path& path, const DatasetBundle& data) {
  const auto rows = read_csv(path);
  require_header(rows, path);
  const auto& header = rows.front().fields;
  if (header.size() >= 2 && header[1] == "id") {
    const auto index = index_ids(data.ids);
    std::vector<std::size_t> medoids;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      check_row_length(rows[r], header.size(), path);
      const auto it = index.find(rows[r].fields[1]);
      if (it == index.end()) {
        throw IdentifierMismatch(where(path, rows[r].line, 2) + ": unknown identifier '" +
                                 rows[r].fields[1] + "'");
      }
      medoids.push_back(it->second);
    }
    return MedoidSet(std::move(medoids), data.n_units());
  }

  if (data.is_numeric()) {
    throw ParseError(path.string() + ": mode prototypes need categorical data");
  }
  const auto& x = data.categorical();
  if (header.size() != x.n_attrs() + 1) {
    throw DimensionMismatch(path.string() + ": expected " + std::to_string(x.n_attrs()) +
                            " attribute columns");
  }
  CodeMatrix codes(static_cast<Eigen::Index>(rows.size() - 1),
                   static_cast<Eigen::Index>(x.n_attrs()));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    check_row_length(rows[r], header.size(), path);
    for (std::size_t i = 0; i < x.n_attrs(); ++i) {
      const auto& cats = x.domains()[i].categories;
      const auto it = std::find(cats.begin(), cats.end(), rows[r].fields[i + 1]);
      if (it == cats.end()) {
        throw DomainMismatch(where(path, rows[r].line, i + 2) + ": '" + rows[r].fields[i + 1] +
                             "' is not a category of '" + x.domains()[i].name + "'");
      }
      codes(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(i)) =
          static_cast<int>(it - cats.begin());
    }
  }
  return ModeSet(std::move(codes));
}

void write_validity_table(const fs::path& path, const GridTable& table, int decimals) {
  auto out = open_output(path);
  out << "C";
  for (double g : table.gamma_values) out << ',' << format_double(g);
  out << '\n';
  for (std::size_t r = 0; r < table.c_values.size(); ++r) {
    out << table.c_values[r];
    for (std::size_t c = 0; c < table.gamma_values.size(); ++c) {
      const auto& v = table.values[r][c];
      out << ',';
      if (!v) {
        out << "NA";
      } else {
        out << (decimals < 0 ? format_double(*v) : format_fixed(*v, decimals));
      }
    }
    out << '\n';
  }
  finish(out, path);
}

GridTable read_validity_table(const fs::path& path) {
  const auto rows = read_csv(path);
  require_header(rows, path);
  const auto& header = rows.front().fields;
  GridTable table;
  for (std::size_t c = 1; c < header.size(); ++c) {
    table.gamma_values.push_back(parse_number(header[c], path, rows.front().line, c + 1));
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    check_row_length(row, header.size(), path);
    const double c_value = parse_number(row.fields[0], path, row.line, 1);
    if (c_value != std::floor(c_value) || c_value < 1) {
      throw ParseError(where(path, row.line, 1) + ": cluster count must be a positive integer");
    }
    table.c_values.push_back(static_cast<int>(c_value));
    std::vector<std::optional<double>> values;
    for (std::size_t c = 1; c < row.fields.size(); ++c) {
      if (is_missing(row.fields[c])) {
        values.emplace_back(std::nullopt);
      } else {
        values.emplace_back(parse_number(row.fields[c], path, row.line, c + 1));
      }
    }
    table.values.push_back(std::move(values));
  }
  return table;
}

}  // namespace modclust
