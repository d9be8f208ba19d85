#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "modclust/modclust.hpp"
#include "oracles.hpp"

using namespace modclust;
namespace fs = std::filesystem;

namespace {

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("modclust_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

DatasetSchema numeric_dense() {
  DatasetSchema s;
  s.kind = AttributeKind::Numeric;
  s.adjacency_format = AdjacencyFormat::Dense;
  return s;
}

DatasetSchema categorical_edges(std::optional<fs::path> schema = std::nullopt) {
  DatasetSchema s;
  s.kind = AttributeKind::Categorical;
  s.adjacency_format = AdjacencyFormat::EdgeList;
  s.categorical_schema = std::move(schema);
  return s;
}

}  // namespace

TEST_F(IoTest, ThreeUnitNumericWithDenseAdjacency) {
  const auto attr = write("x.csv", "id,a,b\nu1,1.5,2\nu2,-3,4e-1\nu3,0,0\n");
  const auto adj = write("a.csv", "0,1,0\n1,0,2.5\n0,2.5,0\n");
  const auto d = load_dataset(attr, adj, numeric_dense());
  EXPECT_EQ(d.n_units(), 3u);
  EXPECT_EQ(d.numeric().n_attrs(), 2u);
  EXPECT_EQ(d.ids, (std::vector<std::string>{"u1", "u2", "u3"}));
  EXPECT_EQ(d.attribute_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(d.numeric().row(1)[1], 0.4);
  EXPECT_EQ(d.adjacency(1, 2), 2.5);
}

TEST_F(IoTest, UnknownEdgeEndpointIsNamed) {
  const auto attr = write("x.csv", "id,a\nu1,1\nu2,2\n");
  const auto adj = write("e.csv", "src,dst,weight\nu1,u2,1\nu1,ghost,1\n");
  DatasetSchema s;
  try {
    load_dataset(attr, adj, s);
    FAIL();
  } catch (const IdentifierMismatch& e) {
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST_F(IoTest, EdgeListRules) {
  const std::vector<std::string> ids{"a", "b", "c"};
  const auto a = read_edge_list(write("e1.csv", "a,b\nb,c,2\nc,b,2\n"), ids);
  EXPECT_EQ(a(0, 1), 1.0);
  EXPECT_EQ(a(2, 1), 2.0);
  EXPECT_EQ(a(0, 2), 0.0);
  EXPECT_THROW(read_edge_list(write("e2.csv", "a,b,1\nb,a,2\n"), ids), AsymmetryError);
  EXPECT_THROW(read_edge_list(write("e3.csv", "a,a,1\n"), ids), InvalidAdjacency);
  EXPECT_THROW(read_edge_list(write("e4.csv", "a,b,x\n"), ids), ParseError);
  EXPECT_THROW(read_edge_list(write("e5.csv", "a,b,1,9\n"), ids), ParseError);
  EXPECT_THROW(read_edge_list(write("e6.csv", "a,b,-1\n"), ids), InvalidAdjacency);
}

TEST_F(IoTest, DenseAdjacencyErrors) {
  EXPECT_THROW(read_dense_adjacency(write("d1.csv", "0,1\n0,0\n"), 2), AsymmetryError);
  EXPECT_THROW(read_dense_adjacency(write("d2.csv", "0,1\n1\n"), 2), ParseError);
  EXPECT_THROW(read_dense_adjacency(write("d3.csv", "0,1\n1,0\n"), 3), DimensionMismatch);
  EXPECT_THROW(read_dense_adjacency(write("d4.csv", "0,\n1,0\n"), 2), MissingValue);
}

TEST_F(IoTest, AttributeErrorsCarryLocation) {
  const auto adj = write("a.csv", "0,1\n1,0\n");
  try {
    load_dataset(write("x1.csv", "id,a\nu1,1\nu2,abc\n"), adj, numeric_dense());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_dataset(write("x2.csv", "id,a\nu1,1\nu2,1,2\n"), adj, numeric_dense()), ParseError);
  EXPECT_THROW(load_dataset(write("x3.csv", "id,a\nu1,1\nu2,NA\n"), adj, numeric_dense()), MissingValue);
  EXPECT_THROW(load_dataset(write("x4.csv", "id,a\nu1,1\nu1,2\n"), adj, numeric_dense()), ParseError);
}

TEST_F(IoTest, QuotedFields) {
  const auto attr = write("x.csv", "id,\"a, b\"\n\"x,1\",1\n\"say \"\"hi\"\"\",2\n");
  const auto adj = write("e.csv", "\"x,1\",\"say \"\"hi\"\"\"\n");
  const auto d = load_dataset(attr, adj, DatasetSchema{});
  EXPECT_EQ(d.ids[0], "x,1");
  EXPECT_EQ(d.ids[1], "say \"hi\"");
  EXPECT_EQ(d.attribute_names[0], "a, b");
  EXPECT_EQ(d.adjacency(0, 1), 1.0);
}

TEST_F(IoTest, CategoricalSchemaAndInference) {
  const auto attr = write("x.csv", "id,color,size\nu1,red,S\nu2,blue,L\nu3,red,M\n");
  const auto adj = write("e.csv", "u1,u2\nu2,u3\n");
  const auto inferred = load_dataset(attr, adj, categorical_edges());
  EXPECT_EQ(inferred.warnings.size(), 1u);
  EXPECT_EQ(inferred.categorical().domains()[0].categories, (std::vector<std::string>{"blue", "red"}));
  EXPECT_EQ(inferred.categorical().domains()[1].categories, (std::vector<std::string>{"L", "M", "S"}));

  const auto schema = write("schema.txt", "# comment\nsize: S, M, L, XL\ncolor: red,blue,green\n");
  const auto declared = load_dataset(attr, adj, categorical_edges(schema));
  EXPECT_TRUE(declared.warnings.empty());
  EXPECT_EQ(declared.categorical().codes()(0, 0), 0);
  EXPECT_EQ(declared.categorical().codes()(1, 1), 2);
  EXPECT_EQ(declared.categorical().domains()[1].size(), 4u);

  const auto short_schema = write("s2.txt", "color: red\nsize: S,M,L\n");
  EXPECT_THROW(load_dataset(attr, adj, categorical_edges(short_schema)), DomainMismatch);
  const auto missing = write("s3.txt", "color: red,blue\n");
  EXPECT_THROW(load_dataset(attr, adj, categorical_edges(missing)), DomainMismatch);
  EXPECT_THROW(read_categorical_schema(write("s4.txt", "color red\n")), ParseError);
}

TEST_F(IoTest, NumericRoundTripIsExact) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0, 1e3);
  RowMatrix x(25, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  const NumericAttributeMatrix attrs(x);
  std::vector<std::string> ids;
  for (int n = 0; n < 25; ++n) ids.push_back("n" + std::to_string(n));
  const AdjacencyMatrix a(oracle::to_matrix(oracle::random_adjacency(25, 0.3, true, rng)));
  write_numeric_attributes(dir_ / "x.csv", ids, {"p", "q", "r"}, attrs);
  write_edge_list(dir_ / "e.csv", ids, a);
  write_dense_adjacency(dir_ / "d.csv", a);
  DatasetSchema s;
  const auto d = load_dataset(dir_ / "x.csv", dir_ / "e.csv", s);
  EXPECT_EQ(d.numeric(), attrs);
  EXPECT_EQ(d.adjacency, a);
  EXPECT_EQ(read_dense_adjacency(dir_ / "d.csv", 25), a);
}

TEST_F(IoTest, CategoricalRoundTripIsExact) {
  const auto data = simulate(builtin_preset("tables"), 3);
  const auto& x = std::get<CategoricalAttributeMatrix>(data.attributes);
  write_categorical_attributes(dir_ / "x.csv", data.ids, x);
  write_categorical_schema(dir_ / "schema.txt", x.domains());
  write_edge_list(dir_ / "e.csv", data.ids, data.adjacency);
  const auto d = load_dataset(dir_ / "x.csv", dir_ / "e.csv", categorical_edges(dir_ / "schema.txt"));
  EXPECT_EQ(d.categorical(), x);
  EXPECT_EQ(d.adjacency, data.adjacency);
}

TEST_F(IoTest, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    const auto text = format_double(v);
    EXPECT_EQ(std::stod(text), v) << text;
  }
  EXPECT_EQ(format_fixed(0.697, 2), "0.70");
  EXPECT_EQ(format_double(0.25), "0.25");
}

TEST_F(IoTest, FitResultFiles) {
  const auto attr = write("x.csv", "id,a\nu1,0\nu2,0.2\nu3,5\n");
  const auto adj = write("e.csv", "u1,u2\nu2,u3\n");
  const auto d = load_dataset(attr, adj, DatasetSchema{});
  FitConfig cfg;
  cfg.n_clusters = 2;
  cfg.gamma = 0.2;
  cfg.n_restarts = 3;
  const auto fit = fit_fcmd_msc(d.numeric(), d.adjacency, cfg);
  const auto crisp = crisp_assign(fit.membership, 0.7);
  RunManifest m;
  m.command = "fit";
  m.algorithm = "medoids";
  const auto files = save_result(fit, crisp, d, m, dir_ / "out");
  for (const auto* name : {"memberships.csv", "memberships_display.csv", "prototypes.csv", "summary.json",
                           "manifest.json", "plotdata/memberships_long.csv", "plotdata/scatter.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / name)) << name;
  }
  const auto table = read_memberships(dir_ / "out" / "memberships.csv");
  EXPECT_EQ(table.ids, d.ids);
  ASSERT_EQ(table.memberships.rows(), 3);
  ASSERT_EQ(table.memberships.cols(), 2);
  EXPECT_EQ(table.memberships, fit.membership.matrix());
  for (Eigen::Index n = 0; n < 3; ++n) EXPECT_NEAR(table.memberships.row(n).sum(), 1.0, 1e-12);
  EXPECT_EQ(table.labels.size(), 3u);
  EXPECT_EQ(std::get<MedoidSet>(read_prototypes(dir_ / "out" / "prototypes.csv", d)), fit.medoids());
  EXPECT_EQ(read_manifest(dir_ / "out" / "manifest.json"), m);

  const auto display = read_memberships(dir_ / "out" / "memberships_display.csv");
  EXPECT_LT((display.memberships - fit.membership.matrix()).cwiseAbs().maxCoeff(), 0.005 + 1e-12);
}

TEST_F(IoTest, ModePrototypesRoundTrip) {
  const auto attr = write("x.csv", "id,c\nu1,A\nu2,B\nu3,B\n");
  const auto d = load_dataset(attr, write("e.csv", "u1,u2\n"), categorical_edges());
  CodeMatrix codes(2, 1);
  codes << 1, 0;
  FitResult r{MembershipMatrix(Matrix::Constant(3, 2, 0.5)), ModeSet(codes), 0.0, 1, true, 0, {0.0}};
  const auto crisp = crisp_assign(r.membership, 0.7);
  save_result(r, crisp, d, RunManifest{}, dir_ / "out");
  EXPECT_EQ(std::get<ModeSet>(read_prototypes(dir_ / "out" / "prototypes.csv", d)), ModeSet(codes));
  EXPECT_FALSE(fs::exists(dir_ / "out" / "plotdata" / "scatter.csv"));
}

TEST_F(IoTest, ValidityTableShapeAndRoundTrip) {
  GridTable t{{2, 3, 4}, {0.0, 0.05, 0.1, 0.15}, {}};
  for (int r = 0; r < 3; ++r) {
    t.values.emplace_back();
    for (int c = 0; c < 4; ++c) t.values.back().emplace_back(r * 10.0 + c / 3.0);
  }
  t.values[1][2] = std::nullopt;
  write_validity_table(dir_ / "v.csv", t);
  const auto back = read_validity_table(dir_ / "v.csv");
  EXPECT_EQ(back.c_values, t.c_values);
  EXPECT_EQ(back.gamma_values, t.gamma_values);
  EXPECT_EQ(back.values, t.values);
}

TEST_F(IoTest, ReferenceFixturesParse) {
  const auto t = read_validity_table(fs::path(MODCLUST_FIXTURE_DIR) / "validity_medoids_simulated.csv");
  EXPECT_EQ(t.c_values, (std::vector<int>{2, 3, 4, 5}));
  EXPECT_EQ(t.gamma_values.size(), 13u);
  EXPECT_EQ(t.values[1][5], 344.3);
}

TEST_F(IoTest, GridResultFiles) {
  const auto data = simulate(builtin_preset("circles"), 2);
  DatasetBundle bundle{data.ids, {"x1", "x2"}, data.attributes, data.adjacency, {}};
  GridSpec spec;
  spec.c_values = {2, 3};
  spec.gamma_values = {0.0, 0.1, 0.2};
  spec.n_restarts = 2;
  const auto grid = grid_search(bundle.numeric(), bundle.adjacency, spec);
  const auto& best = grid.cell(grid.best->row, grid.best->col);
  save_result(grid, bundle, RunManifest{}, dir_ / "g", crisp_assign(best.fit->membership, 0.7));
  const auto t = read_validity_table(dir_ / "g" / "validity.csv");
  EXPECT_EQ(t.values.size(), 2u);
  EXPECT_EQ(t.values[0].size(), 3u);
  EXPECT_EQ(t.values, grid.table.values);
  EXPECT_TRUE(fs::exists(dir_ / "g" / "grid.json"));
  EXPECT_TRUE(fs::exists(dir_ / "g" / "validity_display.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "g" / "best" / "memberships.csv"));
}

TEST_F(IoTest, CrispFile) {
  Matrix u(2, 2);
  u << 0.66, 0.34, 0.2, 0.8;
  save_result(crisp_assign(MembershipMatrix(u), 0.7), {"Algeria", "Chile"}, RunManifest{}, dir_ / "c");
  EXPECT_EQ(slurp(dir_ / "c" / "crisp.csv"), "id,label\nAlgeria,fuzzy\nChile,2\n");
}

TEST_F(IoTest, ManifestRoundTripAndDigest) {
  const auto f = write("abc.txt", "abc");
  EXPECT_EQ(sha256_file(f), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  RunManifest m;
  m.version = library_version();
  m.command = "grid";
  m.arguments = {"--c-range", "2:5", "--seed", "18446744073709551615"};
  m.algorithm = "modes";
  m.seed = 18446744073709551615ull;
  m.inputs = {{"attributes", f.string(), sha256_file(f)}};
  m.config = {{"z", "1"}, {"a", "2"}};
  write_manifest(dir_ / "m.json", m);
  EXPECT_EQ(read_manifest(dir_ / "m.json"), m);
  EXPECT_THROW(read_manifest(write("bad.json", "{\"tool\": 1}")), ParseError);
  EXPECT_THROW(sha256_file(dir_ / "missing"), IoError);
}

TEST_F(IoTest, MissingFileIsIoError) {
  EXPECT_THROW(load_dataset(dir_ / "nope.csv", dir_ / "nope2.csv", DatasetSchema{}), IoError);
}
