#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "gzsl/data_model.hpp"

namespace gzsl {

struct SplitConfig {
  int n_val_classes = 0;
  int n_test_classes = 0;
  double seen_test_fraction = 0.2;
  double seen_val_fraction = 0.2;
  int n_val_folds = 3;
  std::uint64_t seed = 0;
};

namespace detail {

// round-half-up of fraction * n
inline std::size_t round_fraction(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
}

inline std::map<int, IndexSet> indices_by_class(const Dataset& d) {
  std::map<int, IndexSet> by_class;
  for (std::size_t i = 0; i < d.labels.size(); ++i) by_class[d.labels[i]].push_back(i);
  return by_class;
}

}  // namespace detail

/// Draws disjoint train/val/test class sets uniformly at random from cfg.seed.
inline ClassPartition make_partition(const Dataset& d, const SplitConfig& cfg) {
  const int c = d.class_count;
  if (cfg.n_val_classes < 1 || cfg.n_test_classes < 1 ||
      cfg.n_val_classes + cfg.n_test_classes >= c)
    throw Error(ErrorCode::NotEnoughClasses,
                "need n_val + n_test < C with both positive, got " +
                    std::to_string(cfg.n_val_classes) + " + " +
                    std::to_string(cfg.n_test_classes) + " vs C=" + std::to_string(c));
  std::vector<int> classes(c);
  for (int i = 0; i < c; ++i) classes[i] = i;
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(classes.begin(), classes.end(), rng);

  ClassPartition p;
  int pos = 0;
  for (int i = 0; i < cfg.n_test_classes; ++i) p.test_classes.insert(classes[pos++]);
  for (int i = 0; i < cfg.n_val_classes; ++i) p.val_classes.insert(classes[pos++]);
  for (; pos < c; ++pos) p.train_classes.insert(classes[pos]);
  return p;
}

/// Assigns every sample of the partitioned classes to one of the five pools.
/// Per class in train+val, a seen_test fraction is held out first; per train
/// class, a seen_val fraction of the remainder is then held out.
inline GzslSplit make_gzsl_split(const Dataset& d, const ClassPartition& partition,
                                 const SplitConfig& cfg) {
  GzslSplit split;
  split.partition = partition;
  std::mt19937_64 rng(cfg.seed);
  auto by_class = detail::indices_by_class(d);

  auto shuffled = [&](int cls) {
    IndexSet idx = by_class.count(cls) ? by_class[cls] : IndexSet{};
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
  };

  // Classes are processed in ascending id order so the draw depends only on
  // cfg.seed, not on set iteration quirks.
  ClassSet seen = set_union(partition.train_classes, partition.val_classes);
  for (int cls : seen) {
    IndexSet idx = shuffled(cls);
    if (idx.empty()) throw Error(ErrorCode::EmptyPool, "class " + std::to_string(cls) + " has no samples");
    std::size_t n_test = detail::round_fraction(cfg.seen_test_fraction, idx.size());
    for (std::size_t i = 0; i < n_test; ++i) split.seen_test_idx.push_back(idx[i]);
    IndexSet rest(idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    if (rest.empty())
      throw Error(ErrorCode::EmptyPool, "class " + std::to_string(cls) + " lost all samples to seen test");

    if (contains(partition.train_classes, cls)) {
      std::size_t n_val = detail::round_fraction(cfg.seen_val_fraction, rest.size());
      for (std::size_t i = 0; i < n_val; ++i) split.seen_val_idx.push_back(rest[i]);
      if (n_val == rest.size())
        throw Error(ErrorCode::EmptyPool, "class " + std::to_string(cls) + " lost all samples to seen pools");
      for (std::size_t i = n_val; i < rest.size(); ++i) split.train_idx.push_back(rest[i]);
    } else {
      for (std::size_t i : rest) split.unseen_val_idx.push_back(i);
    }
  }
  for (int cls : partition.test_classes) {
    IndexSet idx = by_class.count(cls) ? by_class[cls] : IndexSet{};
    for (std::size_t i : idx) split.unseen_test_idx.push_back(i);
  }

  for (IndexSet* pool : {&split.train_idx, &split.seen_val_idx, &split.seen_test_idx,
                         &split.unseen_val_idx, &split.unseen_test_idx})
    std::sort(pool->begin(), pool->end());
  return split;
}

/// Validation folds share the test classes; the train/val class division and
/// the sample pools are re-drawn per fold with seed + fold_index.
inline std::vector<GzslSplit> make_validation_folds(const Dataset& d, const SplitConfig& cfg) {
  ClassPartition base = make_partition(d, cfg);
  std::vector<GzslSplit> folds;
  folds.reserve(static_cast<std::size_t>(cfg.n_val_folds));
  std::vector<int> non_test;
  for (int c = 0; c < d.class_count; ++c)
    if (!contains(base.test_classes, c)) non_test.push_back(c);

  for (int f = 0; f < cfg.n_val_folds; ++f) {
    SplitConfig fold_cfg = cfg;
    fold_cfg.seed = cfg.seed + static_cast<std::uint64_t>(f);
    ClassPartition p;
    p.test_classes = base.test_classes;
    std::vector<int> pool = non_test;
    std::mt19937_64 rng(fold_cfg.seed);
    std::shuffle(pool.begin(), pool.end(), rng);
    for (int i = 0; i < cfg.n_val_classes; ++i) p.val_classes.insert(pool[static_cast<std::size_t>(i)]);
    for (std::size_t i = static_cast<std::size_t>(cfg.n_val_classes); i < pool.size(); ++i)
      p.train_classes.insert(pool[i]);
    folds.push_back(make_gzsl_split(d, p, fold_cfg));
  }
  return folds;
}

}  // namespace gzsl
