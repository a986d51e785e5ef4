#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "addsel/basis.hpp"
#include "addsel/criterion.hpp"

namespace addsel {

/// Per-component penalty weights w_j in (0, +inf]; +inf pins the group to 0.
struct Weights {
  std::vector<double> values;

  static Weights unit(int p) { return {std::vector<double>(static_cast<std::size_t>(p), 1.0)}; }
  int size() const noexcept { return static_cast<int>(values.size()); }
  double operator[](int j) const { return values[static_cast<std::size_t>(j)]; }
  bool all_infinite() const;
};

inline constexpr double kInfiniteWeight = std::numeric_limits<double>::infinity();

/// w_j = 1 / ||b_j||, +inf where the initial block is zero.
Weights adaptive_weights(const DesignMatrix& design, const Vector& initial_coefficients);

/// Per-group spectral data of Z_j^T Z_j, computed once per design and shared
/// by every lambda and weight vector.
class GroupLassoProblem {
 public:
  explicit GroupLassoProblem(const DesignMatrix& design);

  const DesignMatrix& design() const noexcept { return *design_; }
  const Matrix& gram(int j) const { return grams_[static_cast<std::size_t>(j)]; }
  const Matrix& eigenvectors(int j) const { return eigenvectors_[static_cast<std::size_t>(j)]; }
  const Vector& eigenvalues(int j) const { return eigenvalues_[static_cast<std::size_t>(j)]; }

 private:
  const DesignMatrix* design_;
  std::vector<Matrix> grams_;
  std::vector<Matrix> eigenvectors_;
  std::vector<Vector> eigenvalues_;
};

struct SolverOptions {
  /// Sweeps stop once max |change| <= tol * max(1, ||a||_inf) and the KKT
  /// residual is <= 10 * tol.
  double tol = 1e-7;
  int max_sweeps = 1000;
  /// Record the penalized objective after every sweep.
  bool trace_objective = false;
};

struct GroupLassoFit {
  Vector coefficients;  // full layout, length 1 + pK
  int sweeps = 0;
  bool converged = false;
  double kkt = 0.0;
  std::vector<double> objective_trace;
};

/// ||y - Z a||^2 + sum_j lambda w_j ||b_j||.
double penalized_objective(const DesignMatrix& design, const Vector& y, double lambda,
                           const Weights& weights, const Vector& coefficients);

/// Smallest lambda at which all groups are zero:
/// max over finite w_j of 2 ||Z_j^T (y - ybar)|| / w_j.
double lambda_max(const DesignMatrix& design, const Vector& y, const Weights& weights);

/// Block coordinate descent with exact block minimization. `warm_start`
/// (full layout) seeds the iterate when non-null.
GroupLassoFit fit_group_lasso(const GroupLassoProblem& problem, const Vector& y, double lambda,
                              const Weights& weights, const SolverOptions& options = {},
                              const Vector* warm_start = nullptr);
GroupLassoFit fit_group_lasso(const DesignMatrix& design, const Vector& y, double lambda,
                              const Weights& weights, const SolverOptions& options = {});

/// Largest violation of the first-order conditions at `coefficients`.
double kkt_residual(const DesignMatrix& design, const Vector& y, double lambda,
                    const Weights& weights, const Vector& coefficients);

struct PathOptions {
  int count = 100;
  double min_ratio = 1e-3;
  /// Stop after the first entry whose active set has more than this many
  /// groups; 0 keeps the whole grid.
  int stop_above = 0;
  SolverOptions solver;
};

struct PathResult {
  std::vector<double> lambdas;  // strictly decreasing
  std::vector<Vector> coefficients;
  std::vector<Submodel> active_sets;
  std::vector<int> sweeps;
  std::vector<bool> converged;
  std::vector<double> kkt;

  std::size_t size() const noexcept { return lambdas.size(); }
  bool all_converged() const;
};

/// Log-spaced grid from lambda_max to lambda_max * min_ratio, warm-started.
/// Degenerate problems (lambda_max = 0 or all weights infinite) give a single
/// entry at lambda = 0 with every group zero.
PathResult solve_path(const GroupLassoProblem& problem, const Vector& y, const Weights& weights,
                      const PathOptions& options = {});
PathResult solve_path(const DesignMatrix& design, const Vector& y, const Weights& weights,
                      const PathOptions& options = {});

struct LambdaSelection {
  std::size_t index = 0;
  double lambda = 0.0;
  BICRecord record;
  std::vector<BICRecord> records;     // one per path entry
  std::vector<std::size_t> discarded;  // entries with |S_lambda| > M
};

/// Index of the best record with size <= M in path order (ties keep the
/// earlier entry); `discarded` receives the inadmissible indices. Throws
/// NoAdmissibleEntry when nothing qualifies.
std::size_t select_admissible(const std::vector<BICRecord>& records, int max_size,
                              std::vector<std::size_t>* discarded = nullptr);

/// arg min BIC(lambda) over entries with |S_lambda| <= M; ties go to the
/// larger lambda. Throws NoAdmissibleEntry when nothing qualifies.
LambdaSelection select_lambda(const PathResult& path, const DesignMatrix& design, const Vector& y,
                              const PenaltySpec& spec, int max_size);

/// Group LASSO with unit weights tuned by BIC(lambda), then the adaptive
/// refit with w_j = 1 / ||b~_j||, again tuned by BIC(lambda).
struct AdaptiveResult {
  PathResult initial_path;
  LambdaSelection initial;
  Weights weights;
  PathResult adaptive_path;
  LambdaSelection selection;
  Submodel selected;
  Vector coefficients;
};

AdaptiveResult adaptive_group_lasso(const DesignMatrix& design, const Vector& y,
                                    const PenaltySpec& spec, int max_size,
                                    const PathOptions& options = {});

}  // namespace addsel
