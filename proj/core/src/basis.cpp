#include "addsel/basis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "addsel/error.hpp"

namespace addsel {

SplineSpec::SplineSpec(int order, int dim) : order_(order), dim_(dim) {
  if (order < 2) {
    throw InvalidParameters("spline order must be >= 2, got " + std::to_string(order));
  }
  if (dim < order - 1) {
    throw InvalidParameters("spline dimension K=" + std::to_string(dim) +
                            " must be >= order - 1 = " + std::to_string(order - 1));
  }
  const int interior = internal_knot_count();
  knots_.reserve(static_cast<std::size_t>(interior + 2 * order));
  knots_.insert(knots_.end(), static_cast<std::size_t>(order), 0.0);
  for (int k = 1; k <= interior; ++k) {
    knots_.push_back(static_cast<double>(k) / static_cast<double>(interior + 1));
  }
  knots_.insert(knots_.end(), static_cast<std::size_t>(order), 1.0);
}

std::vector<double> SplineSpec::internal_knots() const {
  return {knots_.begin() + order_, knots_.end() - order_};
}

SplineSpec make_spec(int order, int dim) { return SplineSpec(order, dim); }

int default_dim(int order, std::size_t n, double scale) {
  if (n == 0 || !(scale > 0.0)) {
    throw InvalidParameters("default_dim needs n > 0 and a positive scale");
  }
  const double k = std::ceil(scale * std::pow(static_cast<double>(n), 0.2));
  return std::max(order - 1, static_cast<int>(k));
}

int eval_raw_basis_into(const SplineSpec& spec, double x, Eigen::Ref<Eigen::VectorXd> out) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("basis evaluation point " + std::to_string(x) + " is outside [0,1]");
  }
  const auto& knots = spec.knots();
  const int degree = spec.degree();
  const int last = spec.raw_size() - 1;

  // Knot span: knots[span] <= x < knots[span + 1], with x = 1 folded into the
  // last nonempty span.
  int span = last;
  if (x < 1.0) {
    const auto it = std::upper_bound(knots.begin() + degree, knots.begin() + last + 1, x);
    span = static_cast<int>(it - knots.begin()) - 1;
  }

  // Orders are small; a fixed scratch covers any realistic degree.
  constexpr int kMaxOrder = 32;
  if (spec.order() > kMaxOrder) {
    throw InvalidParameters("spline order above " + std::to_string(kMaxOrder) + " is not supported");
  }
  std::array<double, kMaxOrder> left{};
  std::array<double, kMaxOrder> right{};
  std::array<double, kMaxOrder> local{};
  local[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[j] = x - knots[span + 1 - j];
    right[j] = knots[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = local[r] / (right[r + 1] + left[j - r]);
      local[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    local[j] = saved;
  }

  out.setZero();
  const int first = span - degree;
  for (int r = 0; r <= degree; ++r) out[first + r] = local[r];
  return first;
}

Vector eval_raw_basis(const SplineSpec& spec, double x) {
  Vector out(spec.raw_size());
  eval_raw_basis_into(spec, x, out);
  return out;
}

RescaledCovariates rescale_covariates(const Matrix& raw) {
  RescaledCovariates result{Matrix(raw.rows(), raw.cols()), {}};
  result.ranges.reserve(static_cast<std::size_t>(raw.cols()));
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    const double lo = raw.col(j).minCoeff();
    const double hi = raw.col(j).maxCoeff();
    if (!(hi > lo)) {
      throw InvalidParameters("covariate column " + std::to_string(j) +
                              " is constant; cannot rescale");
    }
    const CovariateRange range{lo, hi};
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
      // Clamp guards the rounding of (x - lo) / (hi - lo) at the endpoints.
      result.unit(i, j) = std::clamp(range.to_unit(raw(i, j)), 0.0, 1.0);
    }
    result.ranges.push_back(range);
  }
  return result;
}

Submodel::Submodel(std::vector<int> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw InvalidParameters("submodel contains duplicate component indices");
  }
  if (!indices_.empty() && indices_.front() < 0) {
    throw InvalidParameters("submodel contains a negative component index");
  }
}

Submodel Submodel::full(int p) {
  std::vector<int> all(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) all[static_cast<std::size_t>(j)] = j;
  return Submodel(std::move(all));
}

bool Submodel::contains(int j) const {
  return std::binary_search(indices_.begin(), indices_.end(), j);
}

bool Submodel::includes(const Submodel& other) const {
  return std::includes(indices_.begin(), indices_.end(), other.indices_.begin(),
                       other.indices_.end());
}

void Submodel::check_range(int p) const {
  if (!indices_.empty() && indices_.back() >= p) {
    throw InvalidParameters("component index " + std::to_string(indices_.back()) +
                            " out of range for p=" + std::to_string(p));
  }
}

Submodel Submodel::with(int j) const {
  auto next = indices_;
  next.push_back(j);
  return Submodel(std::move(next));
}

bool operator<(const Submodel& a, const Submodel& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.indices_ < b.indices_;
}

DesignMatrix::DesignMatrix(SplineSpec spec, Matrix values, Matrix centering_offsets,
                           std::vector<CovariateRange> ranges)
    : spec_(std::move(spec)),
      values_(std::move(values)),
      centering_offsets_(std::move(centering_offsets)),
      ranges_(std::move(ranges)) {
  const auto p = centering_offsets_.rows();
  if (values_.cols() != 1 + p * spec_.dim() ||
      centering_offsets_.cols() != spec_.raw_size() ||
      static_cast<Eigen::Index>(ranges_.size()) != p) {
    throw DimensionMismatch("design matrix parts have inconsistent shapes");
  }
}

double DesignMatrix::intercept_value() const noexcept {
  return 1.0 / std::sqrt(static_cast<double>(dim()));
}

DesignMatrix build_design(const Matrix& unit_covariates, const SplineSpec& spec,
                          std::vector<CovariateRange> ranges) {
  const Eigen::Index n = unit_covariates.rows();
  const Eigen::Index p = unit_covariates.cols();
  if (n < 2) throw InvalidParameters("design needs at least 2 observations");
  if (ranges.empty()) ranges.assign(static_cast<std::size_t>(p), CovariateRange{});
  if (static_cast<Eigen::Index>(ranges.size()) != p) {
    throw DimensionMismatch("one covariate range per column is required");
  }

  const int dim = spec.dim();
  const int raw = spec.raw_size();
  Matrix values(n, 1 + p * dim);
  Matrix offsets(p, raw);
  values.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(dim)));

  Matrix raw_block(n, raw);
  Vector row(raw);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      eval_raw_basis_into(spec, unit_covariates(i, j), row);
      raw_block.row(i) = row.transpose();
    }
    const Eigen::RowVectorXd means = raw_block.colwise().mean();
    offsets.row(j) = means;
    values.middleCols(1 + j * dim, dim) =
        raw_block.leftCols(dim).rowwise() - means.head(dim);
  }
  return DesignMatrix(spec, std::move(values), std::move(offsets), std::move(ranges));
}

std::vector<Eigen::Index> submatrix_columns(const DesignMatrix& design, const Submodel& S) {
  S.check_range(design.p());
  std::vector<Eigen::Index> cols;
  cols.reserve(1 + S.size() * static_cast<std::size_t>(design.dim()));
  cols.push_back(0);
  for (int j : S) {
    const auto start = design.block_start(j);
    for (int k = 0; k < design.dim(); ++k) cols.push_back(start + k);
  }
  return cols;
}

Matrix submatrix(const DesignMatrix& design, const Submodel& S) {
  S.check_range(design.p());
  const int dim = design.dim();
  Matrix out(design.values().rows(), 1 + static_cast<Eigen::Index>(S.size()) * dim);
  out.col(0) = design.intercept();
  Eigen::Index at = 1;
  for (int j : S) {
    out.middleCols(at, dim) = design.block(j);
    at += dim;
  }
  return out;
}

}  // namespace addsel
