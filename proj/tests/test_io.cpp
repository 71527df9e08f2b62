#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "gzsl/gzsl.hpp"
#include "oracles.hpp"

using namespace gzsl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gzsl_io_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("binary matrix files round-trip bit exactly", "[io]") {
  TempDir tmp;
  std::mt19937_64 rng(61);
  Matrix m = oracles::random_matrix(rng, 7, 5);
  std::string path = tmp.file("m.bin");
  write_matrix_binary(m, path);
  Matrix back = load_matrix_binary(path);
  REQUIRE(back.rows() == 7);
  REQUIRE(back.cols() == 5);
  CHECK((back - m).norm() == 0.0);

  // Layout check: 8-byte magic + two u32 dims + 8 bytes per value.
  CHECK(fs::file_size(path) == 8 + 4 + 4 + 8 * 7 * 5);

  Matrix one(1, 1);
  one << 0.0;
  write_matrix_binary(one, tmp.file("one.bin"));
  Matrix one_back = load_matrix(tmp.file("one.bin"));
  CHECK(one_back.rows() == 1);
  CHECK(one_back(0, 0) == 0.0);
}

TEST_CASE("binary matrix loader rejects malformed files", "[io]") {
  TempDir tmp;
  {
    std::ofstream out(tmp.file("bad_magic.bin"), std::ios::binary);
    out << "NOTMAGIC" << std::string(8, '\0');
  }
  try {
    load_matrix_binary(tmp.file("bad_magic.bin"));
    FAIL("expected BadMagic");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadMagic);
  }

  {
    // Valid header for a 1x1 matrix but only 7 payload bytes.
    std::ofstream out(tmp.file("short.bin"), std::ios::binary);
    out.write("GZSLMAT1", 8);
    const unsigned char dims[8] = {1, 0, 0, 0, 1, 0, 0, 0};
    out.write(reinterpret_cast<const char*>(dims), 8);
    out << std::string(7, '\0');
  }
  try {
    load_matrix_binary(tmp.file("short.bin"));
    FAIL("expected TruncatedPayload");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TruncatedPayload);
  }

  // Trailing bytes are also rejected: payload must be exact.
  {
    std::ofstream out(tmp.file("long.bin"), std::ios::binary);
    out.write("GZSLMAT1", 8);
    const unsigned char dims[8] = {1, 0, 0, 0, 1, 0, 0, 0};
    out.write(reinterpret_cast<const char*>(dims), 8);
    out << std::string(9, '\0');
  }
  REQUIRE_THROWS_AS(load_matrix_binary(tmp.file("long.bin")), Error);

  try {
    load_matrix_binary(tmp.file("missing.bin"));
    FAIL("expected MissingFile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingFile);
  }
}

TEST_CASE("csv matrices round-trip and report bad cells", "[io]") {
  TempDir tmp;
  std::mt19937_64 rng(67);
  Matrix m = oracles::random_matrix(rng, 4, 3);
  write_matrix(m, tmp.file("m.csv"));  // extension selects CSV
  Matrix back = load_matrix(tmp.file("m.csv"));
  CHECK((back - m).norm() == 0.0);  // 17 significant digits round-trip doubles

  {
    std::ofstream out(tmp.file("bad.csv"));
    out << "1.0,2.0\n3.0,oops\n";
  }
  try {
    load_matrix_csv(tmp.file("bad.csv"));
    FAIL("expected NonNumericCell");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonNumericCell);
    std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("col 2") != std::string::npos);
  }

  {
    std::ofstream out(tmp.file("ragged.csv"));
    out << "1.0,2.0\n3.0\n";
  }
  REQUIRE_THROWS_AS(load_matrix_csv(tmp.file("ragged.csv")), Error);
}

TEST_CASE("labels round-trip and validate", "[io]") {
  TempDir tmp;
  Labels labels = {0, 3, 1, 1, 2};
  write_labels(labels, tmp.file("labels.txt"));
  CHECK(load_labels(tmp.file("labels.txt")) == labels);

  {
    std::ofstream out(tmp.file("bad_labels.txt"));
    out << "0\nx\n";
  }
  REQUIRE_THROWS_AS(load_labels(tmp.file("bad_labels.txt")), Error);
}

TEST_CASE("dataset directories load, validate and normalize", "[io]") {
  TempDir tmp;
  SyntheticConfig cfg;
  cfg.n_classes = 5;
  cfg.samples_per_class = 4;
  cfg.feature_dim = 3;
  cfg.attribute_dim = 2;
  cfg.seed = 8;
  Dataset d = generate(cfg);
  // Denormalize the stored prototypes to observe the flag's effect.
  Dataset stored = d;
  stored.prototypes *= 2.5;
  write_dataset(stored, tmp.path.string());

  Dataset normalized = load_dataset(tmp.path.string());
  for (Eigen::Index r = 0; r < normalized.prototypes.rows(); ++r)
    CHECK(normalized.prototypes.row(r).norm() == Catch::Approx(1.0).margin(1e-12));

  Dataset raw = load_dataset(tmp.path.string(), /*normalize=*/false);
  CHECK((raw.prototypes - stored.prototypes).norm() == 0.0);
  CHECK(raw.labels == d.labels);
  CHECK((raw.features - d.features).norm() == 0.0);

  fs::remove(tmp.path / "prototypes.bin");
  try {
    load_dataset(tmp.path.string());
    FAIL("expected MissingFile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingFile);
  }
}

TEST_CASE("dataset loading rejects inconsistent label counts", "[io]") {
  TempDir tmp;
  SyntheticConfig cfg;
  cfg.n_classes = 4;
  cfg.samples_per_class = 3;
  cfg.feature_dim = 2;
  cfg.attribute_dim = 2;
  cfg.seed = 12;
  Dataset d = generate(cfg);
  write_dataset(d, tmp.path.string());
  Labels short_labels(d.labels.begin(), d.labels.end() - 1);
  write_labels(short_labels, (tmp.path / "labels.txt").string());
  try {
    load_dataset(tmp.path.string());
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LabelOutOfRange);
  }
}

TEST_CASE("trade-off curves write sorted and parse back exactly", "[io]") {
  TempDir tmp;
  std::vector<TradeoffPoint> pts = {
      {0.5, 10.0, 90.0}, {-1.25, 0.0, 100.0}, {2.0, 55.5, 12.25}};
  write_curve(pts, tmp.file("curve.csv"));

  {
    std::ifstream in(tmp.file("curve.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "gamma,acc_unseen,acc_seen");
  }
  auto back = load_curve(tmp.file("curve.csv"));
  REQUIRE(back.size() == 3);
  CHECK(back[0].gamma == -1.25);  // sorted on write
  CHECK(back[1].gamma == 0.5);
  CHECK(back[2].gamma == 2.0);
  CHECK(back[2].acc_unseen_in_all == 55.5);
  CHECK(back[2].acc_seen_in_all == 12.25);

  REQUIRE_THROWS_AS(write_curve({}, tmp.file("empty.csv")), Error);
}

TEST_CASE("split files round-trip through JSON", "[io]") {
  TempDir tmp;
  SyntheticConfig cfg;
  cfg.n_classes = 10;
  cfg.samples_per_class = 6;
  cfg.feature_dim = 4;
  cfg.attribute_dim = 3;
  cfg.seed = 13;
  Dataset d = generate(cfg);
  SplitConfig sc;
  sc.n_val_classes = 2;
  sc.n_test_classes = 2;
  sc.seed = 13;
  GzslSplit split = make_gzsl_split(d, make_partition(d, sc), sc);
  auto folds = make_validation_folds(d, sc);

  write_split_file(split, folds, sc.seed, tmp.file("split.json"));
  auto [split2, folds2] = load_split_file(tmp.file("split.json"));
  CHECK(split2.partition.train_classes == split.partition.train_classes);
  CHECK(split2.partition.val_classes == split.partition.val_classes);
  CHECK(split2.partition.test_classes == split.partition.test_classes);
  CHECK(split2.train_idx == split.train_idx);
  CHECK(split2.seen_val_idx == split.seen_val_idx);
  CHECK(split2.seen_test_idx == split.seen_test_idx);
  CHECK(split2.unseen_val_idx == split.unseen_val_idx);
  CHECK(split2.unseen_test_idx == split.unseen_test_idx);
  REQUIRE(folds2.size() == folds.size());
  for (std::size_t i = 0; i < folds.size(); ++i)
    CHECK(folds2[i].train_idx == folds[i].train_idx);

  {
    std::ofstream out(tmp.file("not_split.json"));
    out << "{\"format\": \"something-else\"}\n";
  }
  try {
    load_split_file(tmp.file("not_split.json"));
    FAIL("expected BadMagic");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadMagic);
  }
}

TEST_CASE("reports round-trip losslessly through JSON", "[io]") {
  GzslReport r;
  r.acc_unseen_in_all = 33.123456789012345;
  r.acc_seen_in_all = 66.98765432109876;
  r.harmonic_mean = harmonic_mean(r.acc_unseen_in_all, r.acc_seen_in_all);
  r.ausuc = 0.4321;
  r.gamma_star = -1.5e-3;
  r.lambda_star = 0.1;
  r.seed = 1234567890123ull;
  r.grid = {1e-4, 1e-2, 1.0};
  r.n_runs = 5;
  r.acc_unseen_std = 0.25;
  r.acc_seen_std = 0.125;
  r.harmonic_mean_std = 0.0625;
  r.ausuc_std = 0.03125;

  auto j = report_to_json(r);
  CHECK(j.at("tool_version").get<std::string>() == kToolVersion);
  GzslReport back = report_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.acc_unseen_in_all == r.acc_unseen_in_all);
  CHECK(back.acc_seen_in_all == r.acc_seen_in_all);
  CHECK(back.harmonic_mean == r.harmonic_mean);
  CHECK(back.ausuc == r.ausuc);
  CHECK(back.gamma_star == r.gamma_star);
  CHECK(back.lambda_star == r.lambda_star);
  CHECK(back.seed == r.seed);
  CHECK(back.grid == r.grid);
  CHECK(back.n_runs == r.n_runs);
  CHECK(back.acc_unseen_std == r.acc_unseen_std);
  CHECK(back.harmonic_mean_std == r.harmonic_mean_std);
  CHECK(back.ausuc_std == r.ausuc_std);
}
