#include "addsel/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "addsel/error.hpp"

namespace addsel {

namespace {
constexpr double kRankThreshold = 1e-10;
}

FitResult fit_least_squares(const Matrix& columns, const Vector& y, Submodel label) {
  if (columns.rows() != y.size()) {
    throw DimensionMismatch("design has " + std::to_string(columns.rows()) +
                            " rows but response has " + std::to_string(y.size()));
  }
  FitResult fit;
  fit.submodel = std::move(label);
  if (columns.cols() == 0) {
    fit.coefficients = Vector(0);
    fit.rss = y.squaredNorm();
    return fit;
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(kRankThreshold);
  cod.compute(columns);
  fit.coefficients = cod.solve(y);
  fit.rank = cod.rank();
  fit.rank_deficient = fit.rank < columns.cols();
  fit.rss = (y - columns * fit.coefficients).squaredNorm();
  return fit;
}

FitResult fit_submodel(const DesignMatrix& design, const Vector& y, const Submodel& S) {
  return fit_least_squares(submatrix(design, S), y, S);
}

double recover_intercept(double scaled_intercept, int dim) {
  return scaled_intercept / std::sqrt(static_cast<double>(dim));
}

double recover_intercept(const FitResult& fit, int dim) {
  return fit.coefficients.size() == 0 ? 0.0 : recover_intercept(fit.coefficients[0], dim);
}

namespace {

ComponentEstimate empty_estimate(const DesignMatrix& design, int j) {
  if (j < 0 || j >= design.p()) {
    throw InvalidParameters("component index " + std::to_string(j) + " out of range");
  }
  return ComponentEstimate{j, Vector::Zero(design.dim()), design.spec(),
                           design.centering_offsets().row(j).transpose(),
                           design.covariate_ranges()[static_cast<std::size_t>(j)]};
}

}  // namespace

ComponentEstimate component_from_full(const DesignMatrix& design, const Vector& full, int j) {
  if (full.size() != design.values().cols()) {
    throw DimensionMismatch("coefficient vector does not match the full design layout");
  }
  auto est = empty_estimate(design, j);
  est.block = full.segment(design.block_start(j), design.dim());
  return est;
}

ComponentEstimate component_from_fit(const DesignMatrix& design, const FitResult& fit, int j) {
  auto est = empty_estimate(design, j);
  const auto& idx = fit.submodel.indices();
  const auto it = std::lower_bound(idx.begin(), idx.end(), j);
  if (it != idx.end() && *it == j) {
    const auto pos = static_cast<Eigen::Index>(it - idx.begin());
    est.block = fit.coefficients.segment(1 + pos * design.dim(), design.dim());
  }
  return est;
}

Vector expand_to_full(const DesignMatrix& design, const FitResult& fit) {
  Vector full = Vector::Zero(design.values().cols());
  if (fit.coefficients.size() == 0) return full;
  full[0] = fit.coefficients[0];
  Eigen::Index at = 1;
  for (int j : fit.submodel) {
    full.segment(design.block_start(j), design.dim()) = fit.coefficients.segment(at, design.dim());
    at += design.dim();
  }
  return full;
}

double eval_component(const ComponentEstimate& est, double x) {
  const double u = std::clamp(est.range.to_unit(x), 0.0, 1.0);
  const Vector raw = eval_raw_basis(est.spec, u);
  const Eigen::Index k = est.block.size();
  return est.block.dot(raw.head(k) - est.offsets.head(k));
}

}  // namespace addsel
