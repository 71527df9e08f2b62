#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "gzsl/data_model.hpp"

namespace gzsl {

/// Gaussian class clusters with a linear attribute-to-feature link, so the
/// ridge scorers are well specified on this data.
struct SyntheticConfig {
  int n_classes = 40;
  int samples_per_class = 30;
  int feature_dim = 64;
  int attribute_dim = 16;
  double inter_var = 10.0;
  double intra_var = 1.0;
  double noise_var = 0.1;
  std::uint64_t seed = 0;
};

/// Prototypes are unit-norm standard-normal directions; class centroids are
/// their image under a random linear map scaled by sqrt(inter_var); samples add
/// isotropic intra-class spread plus observation noise.
inline Dataset generate(const SyntheticConfig& cfg) {
  if (cfg.n_classes < 2 || cfg.samples_per_class < 1 || cfg.feature_dim < 1 ||
      cfg.attribute_dim < 1)
    throw Error(ErrorCode::EmptyDataset, "invalid synthetic config");
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix prototypes(cfg.n_classes, cfg.attribute_dim);
  for (Eigen::Index r = 0; r < prototypes.rows(); ++r)
    for (Eigen::Index c = 0; c < prototypes.cols(); ++c) prototypes(r, c) = normal(rng);
  prototypes = normalize_prototypes(prototypes);

  Matrix link(cfg.attribute_dim, cfg.feature_dim);
  const double link_scale = std::sqrt(cfg.inter_var / static_cast<double>(cfg.attribute_dim));
  for (Eigen::Index r = 0; r < link.rows(); ++r)
    for (Eigen::Index c = 0; c < link.cols(); ++c) link(r, c) = link_scale * normal(rng);

  const Eigen::Index n = static_cast<Eigen::Index>(cfg.n_classes) * cfg.samples_per_class;
  Dataset d;
  d.features.resize(n, cfg.feature_dim);
  d.labels.resize(static_cast<std::size_t>(n));
  d.prototypes = prototypes;
  d.class_count = cfg.n_classes;

  const double spread = std::sqrt(cfg.intra_var);
  const double noise = std::sqrt(cfg.noise_var);
  Eigen::Index row = 0;
  for (int cls = 0; cls < cfg.n_classes; ++cls) {
    Eigen::RowVectorXd centroid = prototypes.row(cls) * link;
    for (int i = 0; i < cfg.samples_per_class; ++i, ++row) {
      d.labels[static_cast<std::size_t>(row)] = cls;
      for (Eigen::Index c = 0; c < d.features.cols(); ++c)
        d.features(row, c) = centroid(c) + spread * normal(rng) + noise * normal(rng);
    }
  }
  return d;
}

}  // namespace gzsl
