#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gzsl/data_model.hpp"
#include "gzsl/metrics.hpp"

namespace gzsl {

struct TradeoffPoint {
  double gamma = 0.0;
  double acc_unseen_in_all = 0.0;
  double acc_seen_in_all = 0.0;
};

/// Argmax over candidate classes per row; ties go to the lowest class id.
inline Labels predict(const ScoreMatrix& sm) {
  if (sm.candidate_classes.empty())
    throw Error(ErrorCode::EmptyInput, "no candidate classes");
  Labels out(static_cast<std::size_t>(sm.scores.rows()));
  for (Eigen::Index m = 0; m < sm.scores.rows(); ++m) {
    double best = sm.scores(m, 0);
    int best_id = sm.candidate_classes[0];
    for (Eigen::Index c = 1; c < sm.scores.cols(); ++c) {
      double v = sm.scores(m, c);
      int id = sm.candidate_classes[static_cast<std::size_t>(c)];
      if (v > best || (v == best && id < best_id)) {
        best = v;
        best_id = id;
      }
    }
    out[static_cast<std::size_t>(m)] = best_id;
  }
  return out;
}

/// Subtracts gamma from the seen-class columns (the unseen ones are untouched).
inline ScoreMatrix calibrate_scores(const ScoreMatrix& sm, double gamma) {
  ScoreMatrix out = sm;
  for (Eigen::Index c = 0; c < out.scores.cols(); ++c)
    if (out.seen_mask[static_cast<std::size_t>(c)]) out.scores.col(c).array() -= gamma;
  return out;
}

namespace detail {

// Per-row reduction: best seen and best unseen candidate, id ties to lowest.
struct RowBest {
  double seen_score, unseen_score;
  int seen_id, unseen_id;
};

inline std::vector<RowBest> row_bests(const ScoreMatrix& sm) {
  bool any_seen = false, any_unseen = false;
  for (bool b : sm.seen_mask) (b ? any_seen : any_unseen) = true;
  if (!any_seen) throw Error(ErrorCode::NoSeenClass, "seen_mask marks no candidate");
  if (!any_unseen) throw Error(ErrorCode::NoUnseenClass, "seen_mask marks every candidate");

  std::vector<RowBest> out;
  out.reserve(static_cast<std::size_t>(sm.scores.rows()));
  for (Eigen::Index m = 0; m < sm.scores.rows(); ++m) {
    RowBest rb{-std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity(), -1, -1};
    for (Eigen::Index c = 0; c < sm.scores.cols(); ++c) {
      double v = sm.scores(m, c);
      int id = sm.candidate_classes[static_cast<std::size_t>(c)];
      if (sm.seen_mask[static_cast<std::size_t>(c)]) {
        if (v > rb.seen_score || (v == rb.seen_score && id < rb.seen_id)) {
          rb.seen_score = v;
          rb.seen_id = id;
        }
      } else {
        if (v > rb.unseen_score || (v == rb.unseen_score && id < rb.unseen_id)) {
          rb.unseen_score = v;
          rb.unseen_id = id;
        }
      }
    }
    out.push_back(rb);
  }
  return out;
}

// Calibrated winner of a row at the given gamma; equivalent to
// predict(calibrate_scores(sm, gamma)) for that row.
inline int winner_at(const RowBest& rb, double gamma) {
  double seen = rb.seen_score - gamma;
  if (seen > rb.unseen_score) return rb.seen_id;
  if (seen < rb.unseen_score) return rb.unseen_id;
  return std::min(rb.seen_id, rb.unseen_id);
}

}  // namespace detail

/// The gamma values at which some row's calibrated winner switches between the
/// seen and unseen populations: per row, best-seen minus best-unseen score.
/// Between consecutive breakpoints every winner is constant.
inline std::vector<double> gamma_breakpoints(const ScoreMatrix& sm) {
  auto bests = detail::row_bests(sm);
  std::vector<double> bp;
  bp.reserve(bests.size());
  for (const auto& rb : bests) bp.push_back(rb.seen_score - rb.unseen_score);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return bp;
}

namespace detail {

// Candidate gammas covering every distinct prediction pattern: midpoints
// between consecutive breakpoints plus a point on each side. When
// with_breakpoints is set the breakpoints themselves are added, where the
// tie-break of predict() applies.
inline std::vector<double> gamma_candidates(const std::vector<double>& bp,
                                            bool with_breakpoints) {
  std::vector<double> g;
  g.reserve(2 * bp.size() + 1);
  g.push_back(bp.front() - 1.0);
  for (std::size_t i = 0; i < bp.size(); ++i) {
    if (with_breakpoints) g.push_back(bp[i]);
    if (i + 1 < bp.size()) g.push_back(0.5 * (bp[i] + bp[i + 1]));
  }
  g.push_back(bp.back() + 1.0);
  return g;
}

struct Populations {
  std::vector<std::size_t> seen_rows, unseen_rows;
  Labels seen_truth, unseen_truth;
  ClassSet seen_truth_classes, unseen_truth_classes;
};

inline Populations split_populations(const ScoreMatrix& sm, const Labels& truth) {
  if (truth.size() != static_cast<std::size_t>(sm.scores.rows()))
    throw Error(ErrorCode::ShapeMismatch, "truth length does not match score rows");
  ClassSet seen_classes;
  for (std::size_t c = 0; c < sm.candidate_classes.size(); ++c)
    if (sm.seen_mask[c]) seen_classes.insert(sm.candidate_classes[c]);
  Populations p;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (contains(seen_classes, truth[i])) {
      p.seen_rows.push_back(i);
      p.seen_truth.push_back(truth[i]);
      p.seen_truth_classes.insert(truth[i]);
    } else {
      p.unseen_rows.push_back(i);
      p.unseen_truth.push_back(truth[i]);
      p.unseen_truth_classes.insert(truth[i]);
    }
  }
  if (p.seen_rows.empty())
    throw Error(ErrorCode::EmptyInput, "no sample from a seen class");
  if (p.unseen_rows.empty())
    throw Error(ErrorCode::EmptyInput, "no sample from an unseen class");
  return p;
}

inline TradeoffPoint point_at(const std::vector<RowBest>& bests, const Populations& p,
                              AccuracyKind kind, double gamma) {
  Labels pred_unseen, pred_seen;
  pred_unseen.reserve(p.unseen_rows.size());
  for (std::size_t i : p.unseen_rows) pred_unseen.push_back(winner_at(bests[i], gamma));
  pred_seen.reserve(p.seen_rows.size());
  for (std::size_t i : p.seen_rows) pred_seen.push_back(winner_at(bests[i], gamma));
  TradeoffPoint tp;
  tp.gamma = gamma;
  tp.acc_unseen_in_all = accuracy(kind, pred_unseen, p.unseen_truth, p.unseen_truth_classes);
  tp.acc_seen_in_all = accuracy(kind, pred_seen, p.seen_truth, p.seen_truth_classes);
  return tp;
}

}  // namespace detail

/// One point per plateau of the calibration sweep, sorted by gamma.
inline std::vector<TradeoffPoint> tradeoff_curve(const ScoreMatrix& sm, const Labels& truth,
                                                 AccuracyKind kind,
                                                 bool with_breakpoints = false) {
  auto bests = detail::row_bests(sm);
  auto pops = detail::split_populations(sm, truth);
  auto gammas = detail::gamma_candidates(gamma_breakpoints(sm), with_breakpoints);
  std::vector<TradeoffPoint> curve;
  curve.reserve(gammas.size());
  for (double g : gammas) curve.push_back(detail::point_at(bests, pops, kind, g));
  return curve;
}

/// Exact maximization of the harmonic mean over all real gamma. Returns the
/// maximizing gamma (ties to the smallest) and the attained harmonic mean.
inline std::pair<double, double> select_gamma(const ScoreMatrix& sm, const Labels& truth,
                                              AccuracyKind kind) {
  auto curve = tradeoff_curve(sm, truth, kind, /*with_breakpoints=*/true);
  double best_gamma = curve.front().gamma;
  double best_h = -1.0;
  for (const auto& tp : curve) {
    double h = harmonic_mean(tp.acc_unseen_in_all, tp.acc_seen_in_all);
    if (h > best_h) {
      best_h = h;
      best_gamma = tp.gamma;
    }
  }
  return {best_gamma, best_h};
}

/// Area under the seen-unseen curve, accuracies taken in [0, 1].
inline double ausuc(const ScoreMatrix& sm, const Labels& truth, AccuracyKind kind) {
  auto curve = tradeoff_curve(sm, truth, kind);
  std::vector<std::pair<double, double>> pts;  // (acc_unseen, acc_seen) in [0,1]
  pts.reserve(curve.size());
  for (const auto& tp : curve)
    pts.emplace_back(tp.acc_unseen_in_all / 100.0, tp.acc_seen_in_all / 100.0);
  // Ascending acc_unseen; ties keep the higher acc_seen first so the points
  // follow the curve's traversal order (acc_seen only falls as gamma grows).
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.first < b.first || (a.first == b.first && a.second > b.second);
  });
  double area = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    area += (pts[i].first - pts[i - 1].first) * 0.5 * (pts[i].second + pts[i - 1].second);
  return area;
}

}  // namespace gzsl
