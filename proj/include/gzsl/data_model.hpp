#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "gzsl/error.hpp"

namespace gzsl {

// Dense, row-major, double precision throughout.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;
using IndexSet = std::vector<std::size_t>;
using ClassSet = std::set<int>;

/// A feature matrix with per-sample labels and per-class attribute prototypes.
/// Class ids are dense integers in [0, class_count).
struct Dataset {
  Matrix features;    // N x D
  Labels labels;      // length N
  Matrix prototypes;  // C x K
  int class_count = 0;

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
  Eigen::Index attr_dim() const { return prototypes.cols(); }
};

struct ClassPartition {
  ClassSet train_classes;
  ClassSet val_classes;
  ClassSet test_classes;
};

/// Per-sample pools of the GZSL splitting scheme. All five index sets are
/// disjoint subsets of [0, N).
struct GzslSplit {
  ClassPartition partition;
  IndexSet train_idx;
  IndexSet seen_val_idx;
  IndexSet seen_test_idx;
  IndexSet unseen_val_idx;
  IndexSet unseen_test_idx;
};

/// Similarity scores for M samples against an ordered candidate class list.
/// seen_mask[j] marks candidate_classes[j] as a seen class.
struct ScoreMatrix {
  Matrix scores;  // M x |candidates|
  std::vector<int> candidate_classes;
  std::vector<bool> seen_mask;
};

struct GzslReport {
  double acc_unseen_in_all = 0.0;
  double acc_seen_in_all = 0.0;
  double harmonic_mean = 0.0;
  double ausuc = 0.0;
  double gamma_star = 0.0;
  double lambda_star = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> grid;
  int n_runs = 1;
  double acc_unseen_std = 0.0;
  double acc_seen_std = 0.0;
  double harmonic_mean_std = 0.0;
  double ausuc_std = 0.0;
};

inline std::string first_non_finite(const Matrix& m, const char* name) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (!std::isfinite(m(r, c)))
        return std::string(name) + "(" + std::to_string(r) + "," + std::to_string(c) + ")";
  return std::string(name);
}

inline void validate_dataset(const Dataset& d) {
  if (d.features.rows() < 1 || d.features.cols() < 1)
    throw Error(ErrorCode::EmptyDataset, "features must be at least 1x1");
  if (d.prototypes.rows() < 2 || d.prototypes.cols() < 1)
    throw Error(ErrorCode::EmptyDataset, "need at least 2 classes and 1 attribute");
  if (d.class_count != static_cast<int>(d.prototypes.rows()))
    throw Error(ErrorCode::EmptyDataset, "class_count does not match prototype rows");
  if (static_cast<Eigen::Index>(d.labels.size()) != d.features.rows())
    throw Error(ErrorCode::LabelOutOfRange,
                "label count " + std::to_string(d.labels.size()) +
                    " does not match feature rows " + std::to_string(d.features.rows()));
  for (std::size_t i = 0; i < d.labels.size(); ++i) {
    if (d.labels[i] < 0 || d.labels[i] >= d.class_count)
      throw Error(ErrorCode::LabelOutOfRange,
                  "label " + std::to_string(d.labels[i]) + " at sample " + std::to_string(i));
  }
  if (!d.features.allFinite())
    throw Error(ErrorCode::NonFiniteValue, first_non_finite(d.features, "features"));
  if (!d.prototypes.allFinite())
    throw Error(ErrorCode::NonFiniteValue, first_non_finite(d.prototypes, "prototypes"));
}

/// Scales every row to unit Euclidean norm.
inline Matrix normalize_prototypes(const Matrix& prototypes) {
  Matrix out = prototypes;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    double norm = out.row(r).norm();
    if (norm == 0.0)
      throw Error(ErrorCode::ZeroPrototype, "row " + std::to_string(r));
    out.row(r) /= norm;
  }
  return out;
}

inline bool contains(const ClassSet& s, int c) { return s.count(c) > 0; }

inline ClassSet set_union(const ClassSet& a, const ClassSet& b) {
  ClassSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

}  // namespace gzsl
