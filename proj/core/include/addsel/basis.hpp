#pragma once

#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace addsel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Clamped B-spline space on [0,1] with equally spaced internal knots.
///
/// `dim()` is K, the number of centered columns each component contributes
/// to the design. The raw basis has K + 1 functions; after empirical
/// centering one of them is redundant and the last one is dropped.
class SplineSpec {
 public:
  SplineSpec(int order, int dim);

  int order() const noexcept { return order_; }
  int dim() const noexcept { return dim_; }
  int internal_knot_count() const noexcept { return dim_ - order_ + 1; }
  int raw_size() const noexcept { return dim_ + 1; }
  int degree() const noexcept { return order_ - 1; }

  /// Full clamped knot vector: `order` zeros, the internal knots, `order` ones.
  const std::vector<double>& knots() const noexcept { return knots_; }
  std::vector<double> internal_knots() const;

  bool operator==(const SplineSpec& other) const noexcept {
    return order_ == other.order_ && dim_ == other.dim_;
  }

 private:
  int order_;
  int dim_;
  std::vector<double> knots_;
};

/// Throws InvalidParameters unless q >= 2 and K >= q - 1.
SplineSpec make_spec(int order, int dim);

/// K = max(q - 1, ceil(scale * n^(1/5))).
int default_dim(int order, std::size_t n, double scale = 2.0);

/// Values of all K + 1 raw B-splines at x (Cox-de Boor). x = 1 is taken as
/// the limit from the left, so the last function is 1 there.
Vector eval_raw_basis(const SplineSpec& spec, double x);

/// Same as eval_raw_basis but writes into `out` (size raw_size()) without
/// allocating. Returns the index of the first possibly-nonzero function;
/// entries outside [first, first + order) are zero.
int eval_raw_basis_into(const SplineSpec& spec, double x,
                        Eigen::Ref<Eigen::VectorXd> out);

struct CovariateRange {
  double min = 0.0;
  double max = 1.0;

  double to_unit(double x) const { return (x - min) / (max - min); }
  double from_unit(double u) const { return min + u * (max - min); }
};

struct RescaledCovariates {
  Matrix unit;
  std::vector<CovariateRange> ranges;
};

/// Min-max scales every column onto [0,1].
RescaledCovariates rescale_covariates(const Matrix& raw);

/// Sorted set of 0-based component indices.
class Submodel {
 public:
  Submodel() = default;
  /// Sorts and validates; throws InvalidParameters on duplicates.
  explicit Submodel(std::vector<int> indices);
  Submodel(std::initializer_list<int> indices)
      : Submodel(std::vector<int>(indices)) {}

  static Submodel full(int p);

  const std::vector<int>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(int j) const;
  bool includes(const Submodel& other) const;

  /// Throws InvalidParameters if any index is outside [0, p).
  void check_range(int p) const;

  Submodel with(int j) const;

  auto begin() const noexcept { return indices_.begin(); }
  auto end() const noexcept { return indices_.end(); }

  friend bool operator==(const Submodel&, const Submodel&) = default;
  /// Size first, then lexicographic.
  friend bool operator<(const Submodel& a, const Submodel& b);

 private:
  std::vector<int> indices_;
};

/// Intercept column 1/sqrt(K) followed by p centered B-spline blocks.
class DesignMatrix {
 public:
  DesignMatrix(SplineSpec spec, Matrix values, Matrix centering_offsets,
               std::vector<CovariateRange> ranges);

  std::size_t n() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  int p() const noexcept { return static_cast<int>(centering_offsets_.rows()); }
  const SplineSpec& spec() const noexcept { return spec_; }
  int dim() const noexcept { return spec_.dim(); }

  const Matrix& values() const noexcept { return values_; }
  /// p x (K+1): sample means of raw basis values, per component.
  const Matrix& centering_offsets() const noexcept { return centering_offsets_; }
  const std::vector<CovariateRange>& covariate_ranges() const noexcept { return ranges_; }

  /// First column of block j.
  Eigen::Index block_start(int j) const noexcept { return 1 + static_cast<Eigen::Index>(j) * dim(); }
  auto block(int j) const { return values_.middleCols(block_start(j), dim()); }
  auto intercept() const { return values_.col(0); }

  double intercept_value() const noexcept;

 private:
  SplineSpec spec_;
  Matrix values_;
  Matrix centering_offsets_;
  std::vector<CovariateRange> ranges_;
};

/// Builds Z from covariates already on [0,1]. `ranges` records the original
/// scale (identity ranges when omitted).
DesignMatrix build_design(const Matrix& unit_covariates, const SplineSpec& spec,
                          std::vector<CovariateRange> ranges = {});

/// Intercept column plus the blocks of S in index order (copy).
Matrix submatrix(const DesignMatrix& design, const Submodel& S);

/// Column indices of Z_S within Z.
std::vector<Eigen::Index> submatrix_columns(const DesignMatrix& design,
                                            const Submodel& S);

}  // namespace addsel
