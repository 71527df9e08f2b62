#pragma once

#include <map>
#include <vector>

#include "gzsl/data_model.hpp"

namespace gzsl {

enum class AccuracyKind { PerSample, PerClass };

/// 100 * fraction of positions where pred equals truth.
inline double per_sample_accuracy(const Labels& pred, const Labels& truth) {
  if (pred.empty() || pred.size() != truth.size())
    throw Error(ErrorCode::EmptyInput, "need equal nonempty label vectors");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == truth[i]) ++correct;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(pred.size());
}

/// Mean over classes of the within-class accuracy, times 100.
inline double per_class_accuracy(const Labels& pred, const Labels& truth,
                                 const ClassSet& classes) {
  if (pred.empty() || pred.size() != truth.size() || classes.empty())
    throw Error(ErrorCode::EmptyInput, "need equal nonempty label vectors and classes");
  std::map<int, std::size_t> count, correct;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++count[truth[i]];
    if (pred[i] == truth[i]) ++correct[truth[i]];
  }
  double acc = 0.0;
  for (int c : classes) {
    auto it = count.find(c);
    if (it == count.end())
      throw Error(ErrorCode::EmptyClass, "class " + std::to_string(c) + " has no truth sample");
    acc += static_cast<double>(correct[c]) / static_cast<double>(it->second);
  }
  return 100.0 * acc / static_cast<double>(classes.size());
}

inline double accuracy(AccuracyKind kind, const Labels& pred, const Labels& truth,
                       const ClassSet& classes) {
  return kind == AccuracyKind::PerSample ? per_sample_accuracy(pred, truth)
                                         : per_class_accuracy(pred, truth, classes);
}

/// 2ab/(a+b), with harmonic_mean(0,0) = 0.
inline double harmonic_mean(double a_u, double a_s) {
  if (a_u + a_s == 0.0) return 0.0;
  return 2.0 * a_u * a_s / (a_u + a_s);
}

/// Squared error averaged over both samples and attribute dimensions.
inline double attribute_mse(const Matrix& predicted, const Matrix& target) {
  if (predicted.rows() != target.rows() || predicted.cols() != target.cols() ||
      predicted.rows() < 1)
    throw Error(ErrorCode::ShapeMismatch,
                std::to_string(predicted.rows()) + "x" + std::to_string(predicted.cols()) +
                    " vs " + std::to_string(target.rows()) + "x" + std::to_string(target.cols()));
  return (predicted - target).squaredNorm() /
         static_cast<double>(predicted.rows() * predicted.cols());
}

/// intra: mean squared distance of samples to their class centroid.
/// inter: mean squared distance of class centroids to the centroid mean.
inline std::pair<double, double> class_variances(const Matrix& x, const Labels& y) {
  if (x.rows() < 1 || static_cast<std::size_t>(x.rows()) != y.size())
    throw Error(ErrorCode::EmptyInput, "need one label per row");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);

  std::map<int, Vector> centroids;
  for (const auto& [cls, idx] : by_class) {
    Vector mu = Vector::Zero(x.cols());
    for (std::size_t i : idx) mu += x.row(static_cast<Eigen::Index>(i)).transpose();
    centroids[cls] = mu / static_cast<double>(idx.size());
  }

  double intra = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    intra += (x.row(static_cast<Eigen::Index>(i)).transpose() - centroids[y[i]]).squaredNorm();
  intra /= static_cast<double>(x.rows());

  Vector grand = Vector::Zero(x.cols());
  for (const auto& [cls, mu] : centroids) grand += mu;
  grand /= static_cast<double>(centroids.size());
  double inter = 0.0;
  for (const auto& [cls, mu] : centroids) inter += (mu - grand).squaredNorm();
  inter /= static_cast<double>(centroids.size());
  return {intra, inter};
}

struct MseCurves {
  std::vector<double> lambdas;
  std::vector<double> seen_mse;
  std::vector<double> unseen_mse;
};

}  // namespace gzsl
