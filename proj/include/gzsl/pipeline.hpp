#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "gzsl/calibration.hpp"
#include "gzsl/data_model.hpp"
#include "gzsl/metrics.hpp"
#include "gzsl/models.hpp"
#include "gzsl/splits.hpp"

namespace gzsl {

struct ExperimentConfig {
  ModelSpec model;
  std::vector<double> lambda_grid;
  AccuracyKind acc_kind = AccuracyKind::PerClass;
  int n_runs = 5;
  std::uint64_t seed = 0;

  void validate() const {
    if (lambda_grid.empty())
      throw Error(ErrorCode::EmptyInput, "lambda grid is empty");
    for (std::size_t i = 1; i < lambda_grid.size(); ++i)
      if (lambda_grid[i] <= lambda_grid[i - 1])
        throw Error(ErrorCode::EmptyInput, "lambda grid must be strictly increasing");
  }
};

struct ZslReport {
  double acc_unseen = 0.0;
  double acc_unseen_std = 0.0;
  double lambda_star = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> grid;
  int n_runs = 1;
};

namespace detail {

inline Labels labels_at(const Dataset& d, const IndexSet& idx) {
  Labels out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(d.labels[i]);
  return out;
}

inline Matrix prototypes_for(const Dataset& d, const std::vector<int>& classes) {
  Matrix s(static_cast<Eigen::Index>(classes.size()), d.prototypes.cols());
  for (std::size_t j = 0; j < classes.size(); ++j)
    s.row(static_cast<Eigen::Index>(j)) = d.prototypes.row(classes[j]);
  return s;
}

inline IndexSet concat(const IndexSet& a, const IndexSet& b) {
  IndexSet out = a;
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  return out;
}

inline ClassSet truth_classes(const Labels& truth) {
  return ClassSet(truth.begin(), truth.end());
}

// Scores an index pool against the given candidate class sets.
inline ScoreMatrix score_pool(const Dataset& d, const FitResult& fit, const IndexSet& pool,
                              const ClassSet& candidates, const ClassSet& seen) {
  std::vector<int> ids(candidates.begin(), candidates.end());
  std::vector<bool> mask;
  mask.reserve(ids.size());
  for (int c : ids) mask.push_back(contains(seen, c));
  Matrix x = gather_rows(d.features, pool);
  return score_model(fit, x, prototypes_for(d, ids), ids, mask);
}

inline std::pair<double, double> mean_std(const std::vector<double>& values) {
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

}  // namespace detail

/// Picks the lambda maximizing the fold-averaged ZSL accuracy on the unseen
/// validation pool, candidates restricted to the validation classes.
inline double select_lambda_zsl(const Dataset& d, const std::vector<GzslSplit>& folds,
                                const ExperimentConfig& cfg) {
  cfg.validate();
  double best_lambda = cfg.lambda_grid.front();
  double best_acc = -1.0;
  for (double lambda : cfg.lambda_grid) {
    double acc_sum = 0.0;
    for (const GzslSplit& fold : folds) {
      ModelSpec spec = cfg.model;
      spec.lambda = lambda;
      FitResult fit = fit_model(d, fold.train_idx, spec);
      ScoreMatrix sm = detail::score_pool(d, fit, fold.unseen_val_idx,
                                          fold.partition.val_classes, {});
      Labels truth = detail::labels_at(d, fold.unseen_val_idx);
      acc_sum += accuracy(cfg.acc_kind, predict(sm), truth, detail::truth_classes(truth));
    }
    double acc = acc_sum / static_cast<double>(folds.size());
    if (acc > best_acc) {
      best_acc = acc;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

/// Fold-averaged calibrated harmonic mean at a single lambda; also returns the
/// mean of the per-fold optimal gammas.
inline std::pair<double, double> gzsl_validation_score(const Dataset& d,
                                                       const std::vector<GzslSplit>& folds,
                                                       const ExperimentConfig& cfg,
                                                       double lambda) {
  double h_sum = 0.0, gamma_sum = 0.0;
  for (const GzslSplit& fold : folds) {
    ModelSpec spec = cfg.model;
    spec.lambda = lambda;
    FitResult fit = fit_model(d, fold.train_idx, spec);
    IndexSet pool = detail::concat(fold.seen_val_idx, fold.unseen_val_idx);
    ClassSet candidates =
        set_union(fold.partition.train_classes, fold.partition.val_classes);
    ScoreMatrix sm = detail::score_pool(d, fit, pool, candidates, fold.partition.train_classes);
    auto [gamma, h] = select_gamma(sm, detail::labels_at(d, pool), cfg.acc_kind);
    h_sum += h;
    gamma_sum += gamma;
  }
  double n = static_cast<double>(folds.size());
  return {h_sum / n, gamma_sum / n};
}

/// Joint (lambda, gamma) selection: the lambda maximizing the fold-averaged
/// calibrated harmonic mean, with the fold-averaged gamma at that lambda.
inline std::pair<double, double> select_lambda_gamma_gzsl(const Dataset& d,
                                                          const std::vector<GzslSplit>& folds,
                                                          const ExperimentConfig& cfg) {
  cfg.validate();
  double best_lambda = cfg.lambda_grid.front();
  double best_h = -1.0;
  double best_gamma = 0.0;
  for (double lambda : cfg.lambda_grid) {
    auto [h, gamma] = gzsl_validation_score(d, folds, cfg, lambda);
    if (h > best_h) {
      best_h = h;
      best_lambda = lambda;
      best_gamma = gamma;
    }
  }
  return {best_lambda, best_gamma};
}

enum class LambdaMode { Gzsl, Zsl };

struct GzslOptions {
  bool calibrate = true;
  LambdaMode lambda_mode = LambdaMode::Gzsl;
};

/// The full protocol: select (lambda, gamma) on the validation folds, retrain
/// on train + seen-val + unseen-val, evaluate the test pools over all classes.
inline GzslReport run_gzsl_evaluation(const Dataset& d, const GzslSplit& split,
                                      const std::vector<GzslSplit>& folds,
                                      const ExperimentConfig& cfg,
                                      const GzslOptions& options = {}) {
  cfg.validate();
  double lambda_star = 0.0, gamma_star = 0.0;
  if (options.lambda_mode == LambdaMode::Gzsl) {
    std::tie(lambda_star, gamma_star) = select_lambda_gamma_gzsl(d, folds, cfg);
  } else {
    lambda_star = select_lambda_zsl(d, folds, cfg);
    if (options.calibrate)
      gamma_star = gzsl_validation_score(d, folds, cfg, lambda_star).second;
  }
  if (!options.calibrate) gamma_star = 0.0;

  const bool seeded = cfg.model.family == ModelFamily::BilinearRanking;
  const int runs = seeded ? cfg.n_runs : 1;
  IndexSet refit_pool =
      detail::concat(detail::concat(split.train_idx, split.seen_val_idx), split.unseen_val_idx);
  IndexSet test_pool = detail::concat(split.seen_test_idx, split.unseen_test_idx);
  ClassSet seen = set_union(split.partition.train_classes, split.partition.val_classes);
  ClassSet all_classes = set_union(seen, split.partition.test_classes);
  Labels truth = detail::labels_at(d, test_pool);

  std::vector<double> a_u, a_s, h, auc;
  for (int run = 0; run < runs; ++run) {
    ModelSpec spec = cfg.model;
    spec.lambda = lambda_star;
    spec.sgd.seed = cfg.seed + static_cast<std::uint64_t>(run);
    FitResult fit = fit_model(d, refit_pool, spec);
    ScoreMatrix sm = detail::score_pool(d, fit, test_pool, all_classes, seen);
    Labels pred = predict(calibrate_scores(sm, gamma_star));

    auto pops = detail::split_populations(sm, truth);
    Labels pred_u, pred_s;
    for (std::size_t i : pops.unseen_rows) pred_u.push_back(pred[i]);
    for (std::size_t i : pops.seen_rows) pred_s.push_back(pred[i]);
    double au = accuracy(cfg.acc_kind, pred_u, pops.unseen_truth, pops.unseen_truth_classes);
    double as = accuracy(cfg.acc_kind, pred_s, pops.seen_truth, pops.seen_truth_classes);
    a_u.push_back(au);
    a_s.push_back(as);
    h.push_back(harmonic_mean(au, as));
    auc.push_back(ausuc(sm, truth, cfg.acc_kind));
  }

  GzslReport report;
  std::tie(report.acc_unseen_in_all, report.acc_unseen_std) = detail::mean_std(a_u);
  std::tie(report.acc_seen_in_all, report.acc_seen_std) = detail::mean_std(a_s);
  std::tie(report.harmonic_mean, report.harmonic_mean_std) = detail::mean_std(h);
  std::tie(report.ausuc, report.ausuc_std) = detail::mean_std(auc);
  report.gamma_star = gamma_star;
  report.lambda_star = lambda_star;
  report.seed = cfg.seed;
  report.grid = cfg.lambda_grid;
  report.n_runs = runs;
  return report;
}

/// Classical ZSL evaluation: unseen test samples scored among the test classes.
inline ZslReport run_zsl_evaluation(const Dataset& d, const GzslSplit& split,
                                    const std::vector<GzslSplit>& folds,
                                    const ExperimentConfig& cfg) {
  cfg.validate();
  double lambda_star = select_lambda_zsl(d, folds, cfg);
  const bool seeded = cfg.model.family == ModelFamily::BilinearRanking;
  const int runs = seeded ? cfg.n_runs : 1;
  IndexSet refit_pool =
      detail::concat(detail::concat(split.train_idx, split.seen_val_idx), split.unseen_val_idx);
  Labels truth = detail::labels_at(d, split.unseen_test_idx);

  std::vector<double> accs;
  for (int run = 0; run < runs; ++run) {
    ModelSpec spec = cfg.model;
    spec.lambda = lambda_star;
    spec.sgd.seed = cfg.seed + static_cast<std::uint64_t>(run);
    FitResult fit = fit_model(d, refit_pool, spec);
    ScoreMatrix sm = detail::score_pool(d, fit, split.unseen_test_idx,
                                        split.partition.test_classes, {});
    accs.push_back(accuracy(cfg.acc_kind, predict(sm), truth, detail::truth_classes(truth)));
  }
  ZslReport report;
  std::tie(report.acc_unseen, report.acc_unseen_std) = detail::mean_std(accs);
  report.lambda_star = lambda_star;
  report.seed = cfg.seed;
  report.grid = cfg.lambda_grid;
  report.n_runs = runs;
  return report;
}

/// Attribute-MSE diagnostic: for each lambda, a visual-to-semantic ridge model
/// is fit on the train pool and its prediction error is reported separately on
/// the seen and unseen test pools.
inline MseCurves mse_vs_lambda_curves(const Dataset& d, const GzslSplit& split,
                                      const std::vector<double>& grid) {
  if (grid.empty()) throw Error(ErrorCode::EmptyInput, "lambda grid is empty");
  Matrix x_train = gather_rows(d.features, split.train_idx);
  Matrix t_train = build_target_matrix(d, split.train_idx);
  Matrix x_seen = gather_rows(d.features, split.seen_test_idx);
  Matrix t_seen = build_target_matrix(d, split.seen_test_idx);
  Matrix x_unseen = gather_rows(d.features, split.unseen_test_idx);
  Matrix t_unseen = build_target_matrix(d, split.unseen_test_idx);

  MseCurves curves;
  for (double lambda : grid) {
    Matrix w = fit_linear_vs(x_train, t_train, lambda);
    curves.lambdas.push_back(lambda);
    curves.seen_mse.push_back(attribute_mse(x_seen * w.transpose(), t_seen));
    curves.unseen_mse.push_back(attribute_mse(x_unseen * w.transpose(), t_unseen));
  }
  return curves;
}

}  // namespace gzsl
