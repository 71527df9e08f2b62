#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>

#include "gzsl/gzsl.hpp"

using namespace gzsl;

namespace {

// A dataset with the given per-class sample counts; feature content is
// irrelevant to splitting.
Dataset counted_dataset(const std::vector<int>& per_class) {
  Dataset d;
  d.class_count = static_cast<int>(per_class.size());
  int n = 0;
  for (int c : per_class) n += c;
  d.features = Matrix::Zero(n, 1);
  d.prototypes = Matrix::Ones(d.class_count, 1);
  int row = 0;
  for (int c = 0; c < d.class_count; ++c)
    for (int i = 0; i < per_class[static_cast<std::size_t>(c)]; ++i) {
      d.features(row, 0) = row;
      d.labels.push_back(c);
      ++row;
    }
  return d;
}

Dataset uniform_dataset(int classes, int per_class) {
  return counted_dataset(std::vector<int>(static_cast<std::size_t>(classes), per_class));
}

std::size_t round_half_up(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
}

std::map<int, std::size_t> pool_class_counts(const Dataset& d, const IndexSet& pool) {
  std::map<int, std::size_t> counts;
  for (std::size_t i : pool) ++counts[d.labels[i]];
  return counts;
}

void check_split_invariants(const Dataset& d, const GzslSplit& s) {
  // Pairwise disjoint pools.
  std::set<std::size_t> all;
  std::size_t total = 0;
  for (const IndexSet* pool : {&s.train_idx, &s.seen_val_idx, &s.seen_test_idx,
                               &s.unseen_val_idx, &s.unseen_test_idx}) {
    all.insert(pool->begin(), pool->end());
    total += pool->size();
  }
  REQUIRE(all.size() == total);

  // Label membership per pool.
  ClassSet seen = set_union(s.partition.train_classes, s.partition.val_classes);
  for (std::size_t i : s.train_idx) REQUIRE(contains(s.partition.train_classes, d.labels[i]));
  for (std::size_t i : s.seen_val_idx) REQUIRE(contains(s.partition.train_classes, d.labels[i]));
  for (std::size_t i : s.unseen_val_idx) REQUIRE(contains(s.partition.val_classes, d.labels[i]));
  for (std::size_t i : s.unseen_test_idx) REQUIRE(contains(s.partition.test_classes, d.labels[i]));
  for (std::size_t i : s.seen_test_idx) REQUIRE(contains(seen, d.labels[i]));

  // Conservation: the pools exactly cover the samples of the involved classes.
  ClassSet involved = set_union(seen, s.partition.test_classes);
  std::size_t expected = 0;
  for (std::size_t i = 0; i < d.labels.size(); ++i)
    if (contains(involved, d.labels[i])) ++expected;
  REQUIRE(total == expected);
}

}  // namespace

TEST_CASE("make_partition draws the requested class counts", "[splits]") {
  Dataset d = uniform_dataset(20, 10);
  SplitConfig cfg;
  cfg.n_val_classes = 5;
  cfg.n_test_classes = 5;
  cfg.seed = 3;
  ClassPartition p = make_partition(d, cfg);
  CHECK(p.train_classes.size() == 10);
  CHECK(p.val_classes.size() == 5);
  CHECK(p.test_classes.size() == 5);
  ClassSet all = set_union(set_union(p.train_classes, p.val_classes), p.test_classes);
  CHECK(all.size() == 20);  // pairwise disjoint, union is every class

  ClassPartition again = make_partition(d, cfg);
  CHECK(again.train_classes == p.train_classes);
  CHECK(again.val_classes == p.val_classes);
  CHECK(again.test_classes == p.test_classes);
}

TEST_CASE("make_partition refuses an empty train set", "[splits]") {
  Dataset d = uniform_dataset(3, 4);
  SplitConfig cfg;
  cfg.n_val_classes = 1;
  cfg.n_test_classes = 2;
  try {
    make_partition(d, cfg);
    FAIL("expected NotEnoughClasses");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotEnoughClasses);
  }
}

TEST_CASE("make_gzsl_split reproduces the 20x10 worked example", "[splits]") {
  Dataset d = uniform_dataset(20, 10);
  SplitConfig cfg;
  cfg.n_val_classes = 5;
  cfg.n_test_classes = 5;
  cfg.seen_test_fraction = 0.2;
  cfg.seen_val_fraction = 0.2;
  cfg.seed = 1;
  ClassPartition p = make_partition(d, cfg);
  GzslSplit s = make_gzsl_split(d, p, cfg);

  CHECK(s.seen_test_idx.size() == 30);   // 2 per class over 15 seen classes
  CHECK(s.seen_val_idx.size() == 20);    // 2 per class over 10 train classes
  CHECK(s.train_idx.size() == 60);       // 6 per class over 10 train classes
  CHECK(s.unseen_val_idx.size() == 40);  // 8 per class over 5 val classes
  CHECK(s.unseen_test_idx.size() == 50);

  for (auto [cls, n] : pool_class_counts(d, s.seen_test_idx)) CHECK(n == 2);
  for (auto [cls, n] : pool_class_counts(d, s.seen_val_idx)) CHECK(n == 2);
  check_split_invariants(d, s);
}

TEST_CASE("make_gzsl_split with zero fractions keeps everything in train", "[splits]") {
  Dataset d = uniform_dataset(12, 7);
  SplitConfig cfg;
  cfg.n_val_classes = 3;
  cfg.n_test_classes = 3;
  cfg.seen_test_fraction = 0.0;
  cfg.seen_val_fraction = 0.0;
  GzslSplit s = make_gzsl_split(d, make_partition(d, cfg), cfg);
  CHECK(s.seen_test_idx.empty());
  CHECK(s.seen_val_idx.empty());
  CHECK(s.train_idx.size() == 6 * 7);  // all samples of the 6 train classes
  check_split_invariants(d, s);
}

TEST_CASE("make_gzsl_split matches the per-class-100 benchmark ratio pattern", "[splits]") {
  // 100 train classes at 59 samples each (plus val/test classes): the seen
  // test share of each seen class must be 20% up to one sample.
  std::vector<int> per_class(120, 59);
  Dataset d = counted_dataset(per_class);
  SplitConfig cfg;
  cfg.n_val_classes = 10;
  cfg.n_test_classes = 10;
  cfg.seed = 5;
  ClassPartition p = make_partition(d, cfg);
  GzslSplit s = make_gzsl_split(d, p, cfg);
  CHECK(p.train_classes.size() == 100);

  auto test_counts = pool_class_counts(d, s.seen_test_idx);
  for (int cls : set_union(p.train_classes, p.val_classes)) {
    double share = static_cast<double>(test_counts[cls]) / 59.0;
    CHECK(std::abs(share - 0.2) <= 1.0 / 59.0);  // 20% within one sample
    CHECK(test_counts[cls] == round_half_up(0.2, 59));
  }
  auto val_counts = pool_class_counts(d, s.seen_val_idx);
  for (int cls : p.train_classes)
    CHECK(val_counts[cls] == round_half_up(0.2, 59 - round_half_up(0.2, 59)));
  check_split_invariants(d, s);
}

TEST_CASE("make_gzsl_split errors when a class loses every sample", "[splits]") {
  Dataset d = uniform_dataset(6, 2);
  SplitConfig cfg;
  cfg.n_val_classes = 2;
  cfg.n_test_classes = 2;
  cfg.seen_test_fraction = 0.5;
  cfg.seen_val_fraction = 0.9;  // rounds to the whole remainder of each train class
  try {
    make_gzsl_split(d, make_partition(d, cfg), cfg);
    FAIL("expected EmptyPool");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyPool);
  }
}

TEST_CASE("split invariants hold across randomized configurations", "[splits]") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<int> n_classes(8, 25), per_class(4, 15);
    std::vector<int> counts(static_cast<std::size_t>(n_classes(rng)));
    for (auto& c : counts) c = per_class(rng);
    Dataset d = counted_dataset(counts);

    SplitConfig cfg;
    std::uniform_int_distribution<int> held(2, static_cast<int>(counts.size()) / 3);
    cfg.n_val_classes = held(rng);
    cfg.n_test_classes = held(rng);
    std::uniform_real_distribution<double> frac(0.0, 0.45);
    cfg.seen_test_fraction = frac(rng);
    cfg.seen_val_fraction = frac(rng);
    cfg.seed = static_cast<std::uint64_t>(trial);

    ClassPartition p = make_partition(d, cfg);
    GzslSplit s = make_gzsl_split(d, p, cfg);
    check_split_invariants(d, s);

    // Per-class seen_test count is exactly round(fraction * n_c).
    auto test_counts = pool_class_counts(d, s.seen_test_idx);
    for (int cls : set_union(p.train_classes, p.val_classes)) {
      std::size_t n_c = static_cast<std::size_t>(counts[static_cast<std::size_t>(cls)]);
      CHECK(test_counts[cls] == round_half_up(cfg.seen_test_fraction, n_c));
    }
  }
}

TEST_CASE("make_validation_folds shares test classes and re-draws the rest", "[splits]") {
  Dataset d = uniform_dataset(20, 10);
  SplitConfig cfg;
  cfg.n_val_classes = 5;
  cfg.n_test_classes = 5;
  cfg.n_val_folds = 3;
  cfg.seed = 9;
  auto folds = make_validation_folds(d, cfg);
  REQUIRE(folds.size() == 3);
  for (const auto& f : folds) {
    CHECK(f.partition.test_classes == folds[0].partition.test_classes);
    check_split_invariants(d, f);
  }
  // With 15 remaining classes and three independent draws of 5, at least one
  // fold pair should differ in val classes for this seed.
  bool any_differ = folds[0].partition.val_classes != folds[1].partition.val_classes ||
                    folds[1].partition.val_classes != folds[2].partition.val_classes;
  CHECK(any_differ);

  auto again = make_validation_folds(d, cfg);
  REQUIRE(again.size() == folds.size());
  for (std::size_t i = 0; i < folds.size(); ++i) {
    CHECK(again[i].train_idx == folds[i].train_idx);
    CHECK(again[i].seen_val_idx == folds[i].seen_val_idx);
    CHECK(again[i].seen_test_idx == folds[i].seen_test_idx);
    CHECK(again[i].unseen_val_idx == folds[i].unseen_val_idx);
    CHECK(again[i].unseen_test_idx == folds[i].unseen_test_idx);
  }

  cfg.n_val_folds = 1;
  CHECK(make_validation_folds(d, cfg).size() == 1);
}
