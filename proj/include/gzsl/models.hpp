#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "gzsl/data_model.hpp"

namespace gzsl {

enum class ModelFamily { LinearVS, LinearSV, BilinearRanking };
enum class RankingVariant { ALE, DEVISE, SJE };

struct SgdConfig {
  double learning_rate = 1e-3;
  int epochs = 20;
  double margin_fraction = 0.1;
  double init_scale = 1e-3;
  std::uint64_t seed = 0;
};

struct ModelSpec {
  ModelFamily family = ModelFamily::LinearVS;
  RankingVariant variant = RankingVariant::ALE;
  double lambda = 0.0;
  SgdConfig sgd;
};

struct FitResult {
  Matrix weights;  // K x D
  ModelSpec spec;
  Eigen::Index target_matrix_rows = 0;
};

/// Stacks the prototype of each sample's label: row i = prototypes[labels[idx[i]]].
inline Matrix build_target_matrix(const Dataset& d, const IndexSet& idx) {
  Matrix t(static_cast<Eigen::Index>(idx.size()), d.prototypes.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    int label = d.labels[idx[i]];
    if (label < 0 || label >= static_cast<int>(d.prototypes.rows()))
      throw Error(ErrorCode::LabelOutOfRange, "label " + std::to_string(label));
    t.row(static_cast<Eigen::Index>(i)) = d.prototypes.row(label);
  }
  return t;
}

inline Matrix gather_rows(const Matrix& m, const IndexSet& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

namespace detail {

// Solves A Z = B for SPD A (ridge normal equations). Falls back to a full-pivot
// LU with an invertibility check when lambda is zero.
inline Matrix solve_spd(const Matrix& a, const Matrix& b, bool regularized) {
  if (regularized) {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) return llt.solve(b);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible())
    throw Error(ErrorCode::SingularSystem, "normal equations are rank deficient");
  return lu.solve(b);
}

}  // namespace detail

/// Ridge fit of the visual-to-semantic map: W = T'X (X'X + lambda N I)^-1.
inline Matrix fit_linear_vs(const Matrix& x, const Matrix& t, double lambda) {
  const double n = static_cast<double>(x.rows());
  Matrix a = x.transpose() * x;
  a.diagonal().array() += lambda * n;
  // A W' = X'T  =>  W = T'X A^-1 (A symmetric)
  Matrix wt = detail::solve_spd(a, x.transpose() * t, lambda > 0.0);
  return wt.transpose();
}

/// Ridge fit of the semantic-to-visual map: W = (T'T + lambda N I)^-1 T'X.
inline Matrix fit_linear_sv(const Matrix& x, const Matrix& t, double lambda) {
  const double n = static_cast<double>(x.rows());
  Matrix a = t.transpose() * t;
  a.diagonal().array() += lambda * n;
  return detail::solve_spd(a, t.transpose() * x, lambda > 0.0);
}

inline ScoreMatrix make_score_matrix(Matrix scores, std::vector<int> candidates,
                                     std::vector<bool> seen_mask) {
  if (candidates.empty()) {
    candidates.resize(static_cast<std::size_t>(scores.cols()));
    std::iota(candidates.begin(), candidates.end(), 0);
  }
  if (seen_mask.empty()) seen_mask.assign(candidates.size(), false);
  if (seen_mask.size() != candidates.size() ||
      static_cast<Eigen::Index>(candidates.size()) != scores.cols())
    throw Error(ErrorCode::ShapeMismatch, "candidate list / mask / score columns disagree");
  return ScoreMatrix{std::move(scores), std::move(candidates), std::move(seen_mask)};
}

/// Similarity in the semantic space: -|W x_m - s_c|^2.
inline ScoreMatrix score_linear_vs(const Matrix& w, const Matrix& x, const Matrix& s,
                                   std::vector<int> candidates = {},
                                   std::vector<bool> seen_mask = {}) {
  Matrix projected = x * w.transpose();  // M x K
  Matrix scores(x.rows(), s.rows());
  for (Eigen::Index m = 0; m < x.rows(); ++m)
    for (Eigen::Index c = 0; c < s.rows(); ++c)
      scores(m, c) = -(projected.row(m) - s.row(c)).squaredNorm();
  return make_score_matrix(std::move(scores), std::move(candidates), std::move(seen_mask));
}

/// Similarity in the visual space: -|x_m - s_c W|^2.
inline ScoreMatrix score_linear_sv(const Matrix& w, const Matrix& x, const Matrix& s,
                                   std::vector<int> candidates = {},
                                   std::vector<bool> seen_mask = {}) {
  Matrix projected = s * w;  // C x D
  Matrix scores(x.rows(), s.rows());
  for (Eigen::Index m = 0; m < x.rows(); ++m)
    for (Eigen::Index c = 0; c < s.rows(); ++c)
      scores(m, c) = -(x.row(m) - projected.row(c)).squaredNorm();
  return make_score_matrix(std::move(scores), std::move(candidates), std::move(seen_mask));
}

/// Bilinear similarity s_c' W x_m for every sample/candidate pair.
inline ScoreMatrix score_bilinear(const Matrix& w, const Matrix& x, const Matrix& s,
                                  std::vector<int> candidates = {},
                                  std::vector<bool> seen_mask = {}) {
  Matrix scores = (x * w.transpose()) * s.transpose();  // M x C
  return make_score_matrix(std::move(scores), std::move(candidates), std::move(seen_mask));
}

namespace detail {

inline double ale_weight(int r) {
  if (r == 0) return 0.0;
  double h = 0.0;
  for (int i = 1; i <= r; ++i) h += 1.0 / static_cast<double>(i);
  return h / static_cast<double>(r);
}

}  // namespace detail

/// Hinge rank loss over seen classes; y is the row of the true class in s.
/// DEVISE sums the per-class hinges, SJE keeps the largest, ALE reweights the
/// sum by the harmonic rank factor of the violation count.
inline double hinge_rank_loss(const Matrix& w, const Vector& x, int y, const Matrix& s,
                              double margin, RankingVariant variant) {
  Vector f = s * (w * x);  // scores per class
  double sum = 0.0, best = 0.0;
  int violations = 0;
  for (Eigen::Index c = 0; c < s.rows(); ++c) {
    if (c == y) continue;
    double l = margin + f(c) - f(y);
    if (l > 0.0) {
      sum += l;
      best = std::max(best, l);
      ++violations;
    }
  }
  switch (variant) {
    case RankingVariant::DEVISE: return sum;
    case RankingVariant::SJE: return best;
    case RankingVariant::ALE: return detail::ale_weight(violations) * sum;
  }
  return 0.0;
}

/// Gradient of hinge_rank_loss with respect to W.
inline Matrix hinge_rank_grad(const Matrix& w, const Vector& x, int y, const Matrix& s,
                              double margin, RankingVariant variant) {
  Vector f = s * (w * x);
  Vector coeff = Vector::Zero(s.rows());  // per-class weight on (s_c - s_y) x'
  double best = 0.0;
  Eigen::Index best_c = -1;
  int violations = 0;
  for (Eigen::Index c = 0; c < s.rows(); ++c) {
    if (c == y) continue;
    double l = margin + f(c) - f(y);
    if (l > 0.0) {
      ++violations;
      if (variant != RankingVariant::SJE) coeff(c) = 1.0;
      if (l > best) {
        best = l;
        best_c = c;
      }
    }
  }
  if (variant == RankingVariant::SJE && best_c >= 0) coeff(best_c) = 1.0;
  if (variant == RankingVariant::ALE) coeff *= detail::ale_weight(violations);

  Matrix grad = Matrix::Zero(w.rows(), w.cols());
  double total = coeff.sum();
  if (total == 0.0) return grad;
  Vector dir = s.transpose() * coeff - total * s.row(y).transpose();
  grad = dir * x.transpose();
  return grad;
}

/// SGD fit of the bilinear ranking family (ALE / DeViSE / SJE) with Frobenius
/// regularization. Deterministic given spec.sgd.seed.
inline FitResult fit_bilinear_ranking(const Dataset& d, const IndexSet& idx,
                                      const ModelSpec& spec) {
  const SgdConfig& sgd = spec.sgd;
  Matrix x = gather_rows(d.features, idx);
  // Candidate classes are the seen classes present in the pool.
  std::vector<int> classes;
  for (std::size_t i : idx) classes.push_back(d.labels[i]);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  std::vector<int> local(static_cast<std::size_t>(d.class_count), -1);
  for (std::size_t j = 0; j < classes.size(); ++j) local[static_cast<std::size_t>(classes[j])] = static_cast<int>(j);
  Matrix s(static_cast<Eigen::Index>(classes.size()), d.prototypes.cols());
  for (std::size_t j = 0; j < classes.size(); ++j)
    s.row(static_cast<Eigen::Index>(j)) = d.prototypes.row(classes[j]);

  std::mt19937_64 rng(sgd.seed);
  std::uniform_real_distribution<double> init(-sgd.init_scale, sgd.init_scale);
  Matrix w(d.prototypes.cols(), d.features.cols());
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = init(rng);

  // Margin from a seeded sample of |s' W0 x| magnitudes.
  std::uniform_int_distribution<std::size_t> pick_n(0, idx.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_c(0, classes.size() - 1);
  double mean_abs = 0.0;
  const int margin_samples = 256;
  for (int i = 0; i < margin_samples; ++i) {
    Eigen::Index n = static_cast<Eigen::Index>(pick_n(rng));
    Eigen::Index c = static_cast<Eigen::Index>(pick_c(rng));
    mean_abs += std::abs((s.row(c) * w * x.row(n).transpose()).value());
  }
  mean_abs /= margin_samples;
  const double margin = sgd.margin_fraction * mean_abs;

  const double n_samples = static_cast<double>(idx.size());
  std::vector<std::size_t> order(idx.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < sgd.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      Vector xi = x.row(static_cast<Eigen::Index>(i)).transpose();
      int y = local[static_cast<std::size_t>(d.labels[idx[i]])];
      double loss = hinge_rank_loss(w, xi, y, s, margin, spec.variant) +
                    spec.lambda / n_samples * w.squaredNorm();
      if (!std::isfinite(loss))
        throw Error(ErrorCode::DivergedLoss, "non-finite loss at epoch " + std::to_string(epoch));
      Matrix grad = hinge_rank_grad(w, xi, y, s, margin, spec.variant);
      grad += (2.0 * spec.lambda / n_samples) * w;
      w -= sgd.learning_rate * grad;
    }
  }
  return FitResult{std::move(w), spec, x.rows()};
}

/// Fits any family on the given sample pool.
inline FitResult fit_model(const Dataset& d, const IndexSet& idx, const ModelSpec& spec) {
  if (spec.family == ModelFamily::BilinearRanking) return fit_bilinear_ranking(d, idx, spec);
  Matrix x = gather_rows(d.features, idx);
  Matrix t = build_target_matrix(d, idx);
  Matrix w = spec.family == ModelFamily::LinearVS ? fit_linear_vs(x, t, spec.lambda)
                                                  : fit_linear_sv(x, t, spec.lambda);
  return FitResult{std::move(w), spec, t.rows()};
}

/// Scores samples against candidate prototypes with the family's similarity.
inline ScoreMatrix score_model(const FitResult& fit, const Matrix& x, const Matrix& s,
                               std::vector<int> candidates = {},
                               std::vector<bool> seen_mask = {}) {
  switch (fit.spec.family) {
    case ModelFamily::LinearVS:
      return score_linear_vs(fit.weights, x, s, std::move(candidates), std::move(seen_mask));
    case ModelFamily::LinearSV:
      return score_linear_sv(fit.weights, x, s, std::move(candidates), std::move(seen_mask));
    case ModelFamily::BilinearRanking:
      return score_bilinear(fit.weights, x, s, std::move(candidates), std::move(seen_mask));
  }
  throw Error(ErrorCode::ShapeMismatch, "unknown model family");
}

}  // namespace gzsl
