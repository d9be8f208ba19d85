#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "modclust/modclust.hpp"

namespace modclust::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Args = std::vector<std::string>;

std::string absolute_path(const std::string& path) {
  return fs::absolute(path).lexically_normal().string();
}

double parse_double_arg(const std::string& text, const std::string& what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError(what + ": '" + text + "' is not a number");
  }
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<int> parse_c_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw UsageError("--c-range expects a:b, got '" + text + "'");
  const double lo = parse_double_arg(parts[0], "--c-range");
  const double hi = parse_double_arg(parts[1], "--c-range");
  if (lo != std::floor(lo) || hi != std::floor(hi) || lo < 2 || hi < lo) {
    throw UsageError("--c-range needs integers 2 <= a <= b, got '" + text + "'");
  }
  std::vector<int> values;
  for (int c = static_cast<int>(lo); c <= static_cast<int>(hi); ++c) values.push_back(c);
  return values;
}

std::vector<double> parse_gamma_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) {
    throw UsageError("--gamma-range expects start:stop:step, got '" + text + "'");
  }
  const double start = parse_double_arg(parts[0], "--gamma-range");
  const double stop = parse_double_arg(parts[1], "--gamma-range");
  const double step = parse_double_arg(parts[2], "--gamma-range");
  if (!(step > 0.0) || stop < start || start < 0.0 || stop > 1.0) {
    throw UsageError("--gamma-range needs 0 <= start <= stop <= 1 and step > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> values;
  for (std::size_t k = 0; k < count; ++k) {
    // Snap to 12 decimals so 0.15 prints as 0.15 rather than 0.15000000000000002.
    const auto snapped = format_fixed(start + static_cast<double>(k) * step, 12);
    values.push_back(std::min(parse_double_arg(snapped, "--gamma-range"), 1.0));
  }
  return values;
}

CutoffRule parse_rule(const std::string& rule) {
  return rule == "strict" ? CutoffRule::StrictlyAbove : CutoffRule::AtLeast;
}

ModesUpdateForm parse_modes_update(const std::string& form) {
  return form == "as-printed" ? ModesUpdateForm::AsPrinted : ModesUpdateForm::ObjectiveConsistent;
}

std::optional<std::string> find_arg(const Args& args, const std::string& flag) {
  const auto it = std::find(args.begin(), args.end(), flag);
  if (it == args.end()) return std::nullopt;
  if (std::next(it) == args.end() || std::next(it)->starts_with("--")) return std::string();
  return *std::next(it);
}

// ---------------------------------------------------------------------------
// Shared option groups

struct DataArgs {
  std::string attributes;
  std::string adjacency;
  std::string adjacency_format = "edges";
  std::string schema;

  void add_to(CLI::App* app, bool required = true) {
    auto* a = app->add_option("--attributes", attributes,
                              "Attribute CSV: header row, identifier column first");
    auto* b = app->add_option("--adjacency", adjacency, "Adjacency file");
    if (required) {
      a->required();
      b->required();
    }
    app->add_option("--adjacency-format", adjacency_format, "dense or edges (src,dst[,weight])")
        ->check(CLI::IsMember({"dense", "edges"}));
    app->add_option("--schema", schema, "Categorical schema file, one 'name: cat1,cat2' per line");
  }

  void append(Args& args) const {
    args.insert(args.end(), {"--attributes", absolute_path(attributes), "--adjacency",
                             absolute_path(adjacency), "--adjacency-format", adjacency_format});
    if (!schema.empty()) args.insert(args.end(), {"--schema", absolute_path(schema)});
  }

  std::vector<InputDigest> digests() const {
    std::vector<InputDigest> out{
        {"attributes", absolute_path(attributes), sha256_file(attributes)},
        {"adjacency", absolute_path(adjacency), sha256_file(adjacency)},
    };
    if (!schema.empty()) out.push_back({"schema", absolute_path(schema), sha256_file(schema)});
    return out;
  }

  DatasetBundle load(AttributeKind kind) const {
    DatasetSchema s;
    s.kind = kind;
    s.adjacency_format = adjacency_format == "dense" ? AdjacencyFormat::Dense : AdjacencyFormat::EdgeList;
    if (!schema.empty()) s.categorical_schema = fs::path(schema);
    auto bundle = load_dataset(attributes, adjacency, s);
    for (const auto& w : bundle.warnings) std::cerr << "warning: " << w << '\n';
    return bundle;
  }
};

struct SolverArgs {
  double p = 1.0;
  int max_iter = 1000;
  double conv_tol = 1e-9;
  int restarts = 50;
  std::uint64_t seed = 0;
  double cutoff = 0.7;
  std::string cutoff_rule = "geq";
  std::string modes_update = "consistent";
  bool include_self_pairs = false;

  void add_to(CLI::App* app) {
    app->add_option("--p", p, "Entropy weight")->capture_default_str();
    app->add_option("--max-iter", max_iter, "Iteration cap per restart")->capture_default_str();
    app->add_option("--conv-tol", conv_tol, "L1 membership change for convergence")
        ->capture_default_str();
    app->add_option("--restarts", restarts, "Random restarts")->capture_default_str();
    app->add_option("--seed", seed, "Base seed")->capture_default_str();
    app->add_option("--cutoff", cutoff, "Crisp assignment cutoff")->capture_default_str();
    app->add_option("--cutoff-rule", cutoff_rule, "geq (u >= cutoff) or strict (u > cutoff)")
        ->check(CLI::IsMember({"geq", "strict"}))
        ->capture_default_str();
    app->add_option("--modes-update", modes_update,
                    "Categorical membership update: consistent or as-printed")
        ->check(CLI::IsMember({"consistent", "as-printed"}))
        ->capture_default_str();
    app->add_flag("--include-self-pairs", include_self_pairs,
                  "Count self-pairs in the validity index modularity term");
  }

  void append(Args& args) const {
    args.insert(args.end(), {"--p", format_double(p), "--max-iter", std::to_string(max_iter),
                             "--conv-tol", format_double(conv_tol), "--restarts",
                             std::to_string(restarts), "--seed", std::to_string(seed), "--cutoff",
                             format_double(cutoff), "--cutoff-rule", cutoff_rule,
                             "--modes-update", modes_update});
    if (include_self_pairs) args.push_back("--include-self-pairs");
  }
};

RunManifest make_manifest(const std::string& command, const Args& args,
                          const std::string& algorithm, std::uint64_t seed,
                          std::vector<InputDigest> inputs) {
  RunManifest m;
  m.version = library_version();
  m.command = command;
  m.arguments = args;
  m.algorithm = algorithm;
  m.seed = seed;
  m.inputs = std::move(inputs);
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (!args[i].starts_with("--")) continue;
    const std::string key = args[i].substr(2);
    if (key == "attributes" || key == "adjacency" || key == "schema") {
      ++i;
      continue;
    }
    if (args[i + 1].starts_with("--")) {
      m.config.emplace_back(key, "true");
    } else {
      m.config.emplace_back(key, args[i + 1]);
      ++i;
    }
  }
  if (!args.empty() && args.back().starts_with("--")) m.config.emplace_back(args.back().substr(2), "true");
  return m;
}

void print_validity(const ValidityScore& score) {
  std::cout << "validity: " << format_double(score.value) << (score.degenerate ? " (degenerate)" : "")
            << '\n';
}

// ---------------------------------------------------------------------------
// fit

struct FitCommand {
  DataArgs data;
  SolverArgs solver;
  std::string algorithm = "medoids";
  int c = 2;
  double gamma = 0.0;
  double beta = 0.0;
  std::string out;
  CLI::Option* gamma_opt = nullptr;
  CLI::Option* beta_opt = nullptr;

  void add_to(CLI::App* app) {
    app->add_option("--algorithm", algorithm, "medoids, modes, medoids-penalty or modes-penalty")
        ->check(CLI::IsMember({"medoids", "modes", "medoids-penalty", "modes-penalty"}))
        ->capture_default_str();
    app->add_option("--c", c, "Number of clusters")->required();
    gamma_opt = app->add_option("--gamma", gamma, "Modularity weight in [0, 1]");
    beta_opt = app->add_option("--beta", beta, "Adjacency penalty weight in [0, 1]");
    gamma_opt->excludes(beta_opt);
    app->add_option("--out", out, "Output directory")->required();
    data.add_to(app);
    solver.add_to(app);
  }

  bool penalty() const { return algorithm.ends_with("-penalty"); }
  bool categorical() const { return algorithm.starts_with("modes"); }

  Args canonical() const {
    Args args{"--algorithm", algorithm, "--c", std::to_string(c)};
    if (penalty()) {
      args.insert(args.end(), {"--beta", format_double(beta)});
    } else {
      args.insert(args.end(), {"--gamma", format_double(gamma)});
    }
    solver.append(args);
    data.append(args);
    return args;
  }

  int run() const {
    if (penalty() && gamma_opt->count() > 0) {
      throw UsageError("--gamma applies to the modularity algorithms; use --beta with " + algorithm);
    }
    if (!penalty() && beta_opt->count() > 0) {
      throw UsageError("--beta applies to the penalty algorithms; use --gamma with " + algorithm);
    }
    const auto bundle = data.load(categorical() ? AttributeKind::Categorical : AttributeKind::Numeric);
    const auto manifest = make_manifest("fit", canonical(), algorithm, solver.seed, data.digests());

    std::optional<FitResult> result;
    std::optional<ValidityScore> validity;
    if (penalty()) {
      PenaltyConfig cfg;
      cfg.n_clusters = c;
      cfg.beta = beta;
      cfg.entropy_weight = solver.p;
      cfg.max_iter = solver.max_iter;
      cfg.conv_tol = solver.conv_tol;
      cfg.n_restarts = solver.restarts;
      cfg.seed = solver.seed;
      result = categorical() ? fit_fcmo_penalty(bundle.categorical(), bundle.adjacency, cfg)
                             : fit_fcmd_penalty(bundle.numeric(), bundle.adjacency, cfg);
    } else {
      FitConfig cfg;
      cfg.n_clusters = c;
      cfg.gamma = gamma;
      cfg.entropy_weight = solver.p;
      cfg.max_iter = solver.max_iter;
      cfg.conv_tol = solver.conv_tol;
      cfg.n_restarts = solver.restarts;
      cfg.seed = solver.seed;
      cfg.modes_update = parse_modes_update(solver.modes_update);
      const auto b = build_modularity_matrix(bundle.adjacency);
      const ValidityOptions vopt{solver.include_self_pairs};
      if (categorical()) {
        result = fit_fcmo_msc(bundle.categorical(), b, cfg);
        validity = validity_mo(*result, bundle.categorical(), b, vopt);
      } else {
        result = fit_fcmd_msc(bundle.numeric(), b, cfg);
        validity = validity_md(*result, bundle.numeric(), b, vopt);
      }
    }

    const auto crisp = crisp_assign(result->membership, solver.cutoff, parse_rule(solver.cutoff_rule));
    save_result(*result, crisp, bundle, manifest, out);

    std::cout << "objective: " << format_double(result->objective) << '\n'
              << "iterations: " << result->n_iterations
              << (result->converged ? "" : " (not converged)") << '\n'
              << "fuzzy units: " << crisp.n_fuzzy() << " of " << bundle.n_units() << '\n';
    if (validity) print_validity(*validity);
    if (!result->converged) {
      std::cerr << "warning: best restart hit --max-iter before converging\n";
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// grid

struct GridCommand {
  DataArgs data;
  SolverArgs solver;
  std::string algorithm = "medoids";
  std::string c_range = "2:5";
  std::string gamma_range = "0:1:0.1";
  std::string out;

  void add_to(CLI::App* app) {
    app->add_option("--algorithm", algorithm, "medoids or modes")
        ->check(CLI::IsMember({"medoids", "modes"}))
        ->capture_default_str();
    app->add_option("--c-range", c_range, "Cluster counts as a:b (inclusive)")->capture_default_str();
    app->add_option("--gamma-range", gamma_range, "Gamma values as start:stop:step")
        ->capture_default_str();
    app->add_option("--out", out, "Output directory")->required();
    data.add_to(app);
    solver.add_to(app);
  }

  Args canonical() const {
    Args args{"--algorithm", algorithm, "--c-range", c_range, "--gamma-range", gamma_range};
    solver.append(args);
    data.append(args);
    return args;
  }

  int run() const {
    GridSpec spec;
    spec.c_values = parse_c_range(c_range);
    spec.gamma_values = parse_gamma_range(gamma_range);
    spec.entropy_weight = solver.p;
    spec.max_iter = solver.max_iter;
    spec.conv_tol = solver.conv_tol;
    spec.n_restarts = solver.restarts;
    spec.seed = solver.seed;
    spec.modes_update = parse_modes_update(solver.modes_update);
    spec.validity.include_self_pairs = solver.include_self_pairs;

    const bool categorical = algorithm == "modes";
    const auto bundle = data.load(categorical ? AttributeKind::Categorical : AttributeKind::Numeric);
    const auto manifest = make_manifest("grid", canonical(), algorithm, solver.seed, data.digests());

    const auto grid = categorical ? grid_search(bundle.categorical(), bundle.adjacency, spec)
                                  : grid_search(bundle.numeric(), bundle.adjacency, spec);
    std::optional<CrispPartition> crisp;
    if (grid.best) {
      const auto& cell = grid.cell(grid.best->row, grid.best->col);
      crisp = crisp_assign(cell.fit->membership, solver.cutoff, parse_rule(solver.cutoff_rule));
    }
    save_result(grid, bundle, manifest, out, crisp);

    std::size_t failed = 0;
    for (const auto& cell : grid.cells) {
      if (!cell.error.empty()) {
        ++failed;
        std::cerr << "warning: cell C=" << cell.n_clusters << " gamma=" << format_double(cell.gamma)
                  << " failed: " << cell.error << '\n';
      }
    }
    if (!grid.best) {
      std::cerr << "error: no grid cell produced a finite validity value\n";
      return kExitNumerical;
    }
    std::cout << "best: C=" << grid.best->n_clusters << " gamma=" << format_double(grid.best->gamma)
              << " validity=" << format_double(grid.best->value) << '\n';
    if (failed > 0) std::cout << "failed cells: " << failed << '\n';
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// simulate

struct SimulateCommand {
  std::string preset = "circles";
  std::uint64_t seed = 0;
  std::string out;

  void add_to(CLI::App* app) {
    std::string names;
    for (const auto& n : builtin_preset_names()) names += (names.empty() ? "" : ", ") + n;
    app->add_option("--preset", preset, "Built-in preset (" + names + ") or a preset JSON file")
        ->capture_default_str();
    app->add_option("--seed", seed, "Dataset seed")->capture_default_str();
    app->add_option("--out", out, "Output directory")->required();
  }

  bool is_file() const { return fs::exists(preset) && fs::is_regular_file(preset); }

  int run() const {
    const auto spec = is_file() ? load_preset(preset) : builtin_preset(preset);
    std::vector<InputDigest> inputs;
    Args args{"--preset", is_file() ? absolute_path(preset) : preset, "--seed", std::to_string(seed)};
    if (is_file()) inputs.push_back({"preset", absolute_path(preset), sha256_file(preset)});
    const auto manifest = make_manifest("simulate", args, spec.name, seed, std::move(inputs));

    const auto data = simulate(spec, seed);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create " + out + ": " + ec.message());
    const fs::path dir(out);

    if (const auto* x = std::get_if<NumericAttributeMatrix>(&data.attributes)) {
      std::vector<std::string> names;
      for (std::size_t i = 0; i < x->n_attrs(); ++i) names.push_back("x" + std::to_string(i + 1));
      write_numeric_attributes(dir / "attributes.csv", data.ids, names, *x);
    } else {
      const auto& cat = std::get<CategoricalAttributeMatrix>(data.attributes);
      write_categorical_attributes(dir / "attributes.csv", data.ids, cat);
      write_categorical_schema(dir / "schema.txt", cat.domains());
    }
    write_edge_list(dir / "adjacency.csv", data.ids, data.adjacency);
    {
      std::ofstream labels(dir / "labels.csv", std::ios::binary);
      if (!labels) throw IoError("cannot write labels.csv");
      labels << "id,block\n";
      for (std::size_t n = 0; n < data.ids.size(); ++n) {
        labels << data.ids[n] << ',' << data.labels[n] + 1 << '\n';
      }
    }
    save_preset(spec, dir / "preset.json");
    write_manifest(dir / "manifest.json", manifest);
    std::cout << "wrote " << data.ids.size() << " units to " << out << '\n';
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// validity

struct ValidityCommand {
  std::string run_dir;
  DataArgs data;
  std::string algorithm;
  bool include_self_pairs = false;

  void add_to(CLI::App* app) {
    app->add_option("--run", run_dir, "Directory holding memberships.csv and prototypes.csv")
        ->required();
    app->add_option("--algorithm", algorithm, "medoids or modes (default: from the manifest)");
    app->add_flag("--include-self-pairs", include_self_pairs,
                  "Count self-pairs in the modularity term");
    data.add_to(app, false);
  }

  int run() {
    const fs::path dir(run_dir);
    std::optional<RunManifest> manifest;
    if (fs::exists(dir / "manifest.json")) manifest = read_manifest(dir / "manifest.json");
    const auto from_manifest = [&](std::string& field, const std::string& flag) {
      if (!field.empty() || !manifest) return;
      if (auto v = find_arg(manifest->arguments, flag)) field = *v;
    };
    from_manifest(data.attributes, "--attributes");
    from_manifest(data.adjacency, "--adjacency");
    from_manifest(data.schema, "--schema");
    from_manifest(algorithm, "--algorithm");
    if (manifest) {
      if (auto v = find_arg(manifest->arguments, "--adjacency-format")) data.adjacency_format = *v;
      if (find_arg(manifest->arguments, "--include-self-pairs")) include_self_pairs = true;
    }
    if (data.attributes.empty() || data.adjacency.empty()) {
      throw UsageError("no manifest in " + run_dir + "; pass --attributes and --adjacency");
    }
    if (algorithm.empty()) algorithm = "medoids";
    const bool categorical = algorithm.starts_with("modes");

    const auto bundle = data.load(categorical ? AttributeKind::Categorical : AttributeKind::Numeric);
    const auto table = read_memberships(dir / "memberships.csv");
    if (table.ids != bundle.ids) {
      throw IdentifierMismatch("memberships.csv units differ from " + data.attributes);
    }
    const MembershipMatrix u(table.memberships);
    const auto prototypes = read_prototypes(dir / "prototypes.csv", bundle);
    const auto b = build_modularity_matrix(bundle.adjacency);
    const ValidityOptions options{include_self_pairs};

    ValidityScore score;
    if (categorical) {
      const auto* modes = std::get_if<ModeSet>(&prototypes);
      if (modes == nullptr) throw ParseError("prototypes.csv holds medoids, expected modes");
      score = validity_mo(u, *modes, bundle.categorical(), b, options);
    } else {
      const auto* medoids = std::get_if<MedoidSet>(&prototypes);
      if (medoids == nullptr) throw ParseError("prototypes.csv holds modes, expected medoids");
      score = validity_md(u, *medoids, bundle.numeric(), b, options);
    }
    print_validity(score);
    if (score.degenerate) {
      std::cerr << "error: zero compactness, the validity index is undefined\n";
      return kExitNumerical;
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// rerun

struct RerunCommand {
  std::string manifest_path;
  std::string out;

  void add_to(CLI::App* app) {
    app->add_option("--manifest", manifest_path, "manifest.json of an earlier run")->required();
    app->add_option("--out", out, "Output directory")->required();
  }

  int run() const {
    const auto m = read_manifest(manifest_path);
    if (m.tool != "modclust") throw ParseError(manifest_path + " was not written by modclust");
    if (m.version != library_version()) {
      std::cerr << "warning: manifest written by version " << m.version << ", running "
                << library_version() << '\n';
    }
    for (const auto& input : m.inputs) {
      if (sha256_file(input.path) != input.sha256) {
        throw InvalidSpec("input '" + input.path + "' (" + input.role +
                          ") changed since the manifest was written");
      }
    }
    std::vector<std::string> argv{"modclust", m.command};
    argv.insert(argv.end(), m.arguments.begin(), m.arguments.end());
    argv.insert(argv.end(), {"--out", out});
    std::vector<const char*> raw;
    for (const auto& a : argv) raw.push_back(a.c_str());
    return cli_main(static_cast<int>(raw.size()), raw.data());
  }
};

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Fuzzy clustering of networked units with a modularity spatial correction"};
  app.name("modclust");
  app.require_subcommand(1, 1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", library_version());

  FitCommand fit;
  GridCommand grid;
  SimulateCommand sim;
  ValidityCommand validity;
  RerunCommand rerun;
  auto* fit_app = app.add_subcommand("fit", "Fit one clustering model and save memberships");
  auto* grid_app = app.add_subcommand("grid", "Validity grid over cluster counts and gamma");
  auto* sim_app = app.add_subcommand("simulate", "Generate a simulated dataset from a preset");
  auto* validity_app = app.add_subcommand("validity", "Recompute the validity index of a saved fit");
  auto* rerun_app = app.add_subcommand("rerun", "Repeat a run from its manifest");
  fit.add_to(fit_app);
  grid.add_to(grid_app);
  sim.add_to(sim_app);
  validity.add_to(validity_app);
  rerun.add_to(rerun_app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (fit_app->parsed()) return fit.run();
    if (grid_app->parsed()) return grid.run();
    if (sim_app->parsed()) return sim.run();
    if (validity_app->parsed()) return validity.run();
    return rerun.run();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.category() == Error::Category::Numerical ? kExitNumerical : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace modclust::cli
