#pragma once

#include "addsel/basis.hpp"

namespace addsel {

/// Least-squares fit of Y on Z_S. Entry 0 of `coefficients` is sqrt(K) * mu;
/// the rest are the blocks of S in index order.
struct FitResult {
  Submodel submodel;
  Vector coefficients;
  double rss = 0.0;
  bool rank_deficient = false;
  Eigen::Index rank = 0;
};

/// Minimum-norm least squares via complete orthogonal decomposition
/// (pivoted QR). Singular directions below 1e-10 of the largest pivot are
/// dropped and `rank_deficient` is set.
FitResult fit_least_squares(const Matrix& columns, const Vector& y, Submodel label = {});

/// Convenience: fit_least_squares(submatrix(design, S), y, S).
FitResult fit_submodel(const DesignMatrix& design, const Vector& y, const Submodel& S);

double recover_intercept(const FitResult& fit, int dim);
double recover_intercept(double scaled_intercept, int dim);

/// One fitted additive component, evaluable on the original covariate scale
/// with the training-sample centering offsets.
struct ComponentEstimate {
  int index = 0;
  Vector block;
  SplineSpec spec;
  Vector offsets;
  CovariateRange range;
};

/// Estimate for component j taken from a full-layout coefficient vector
/// (length 1 + pK).
ComponentEstimate component_from_full(const DesignMatrix& design, const Vector& full, int j);

/// Estimate for component j from a submodel fit; zero block if j is not in S.
ComponentEstimate component_from_fit(const DesignMatrix& design, const FitResult& fit, int j);

/// Scatters a submodel fit into the full 1 + pK layout.
Vector expand_to_full(const DesignMatrix& design, const FitResult& fit);

/// Points outside the training range are clamped to it.
double eval_component(const ComponentEstimate& est, double x);

}  // namespace addsel
