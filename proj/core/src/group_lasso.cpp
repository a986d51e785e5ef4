#include "addsel/group_lasso.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "addsel/error.hpp"

namespace addsel {

namespace {

// Eigenvalues at or below this fraction of the largest are treated as null
// directions of Z_j^T Z_j.
constexpr double kNullEigen = 1e-12;
// Slack on the zero-block test so that lambda = lambda_max reproduces the
// all-zero solution despite rounding in Z_j^T r.
constexpr double kZeroSlack = 1e-12;

// Exact minimizer over b of ||r_j - Z_j b||^2 + penalty ||b||, where
// g = Z_j^T r_j and Z_j^T Z_j = V diag(d) V^T.
//
// Nonzero solutions satisfy b = (2 Z^T Z + (penalty / t) I)^{-1} 2 g with
// t = ||b||; in the eigenbasis this is the secular equation
// sum_i c_i^2 / (2 d_i t + penalty)^2 = 1, c = 2 V^T g.
Vector solve_block(const Matrix& vecs, const Vector& vals, const Vector& g, double penalty) {
  const Eigen::Index k = g.size();
  const double d_max = vals.size() > 0 ? vals.maxCoeff() : 0.0;
  const double null_cut = kNullEigen * std::max(d_max, 0.0);
  Vector c = 2.0 * (vecs.transpose() * g);

  if (penalty == 0.0) {
    Vector rot(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      rot[i] = vals[i] > null_cut && vals[i] > 0.0 ? c[i] / (2.0 * vals[i]) : 0.0;
    }
    return vecs * rot;
  }
  if (2.0 * g.norm() <= penalty * (1.0 + kZeroSlack)) return Vector::Zero(k);

  double d_min = d_max;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (vals[i] > null_cut && vals[i] > 0.0) {
      d_min = std::min(d_min, vals[i]);
    } else {
      c[i] = 0.0;
    }
  }
  const double c_norm = c.norm();
  if (c_norm <= penalty || !(d_min > 0.0)) return Vector::Zero(k);

  // f(t) = G(t)^{-1/2} - 1 is increasing with f(0) < 0 <= f(hi); exactly
  // linear when one eigen-direction carries all of c.
  auto eval = [&](double t, double& f, double& df) {
    double G = 0.0;
    double dG = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (c[i] == 0.0) continue;
      const double den = 2.0 * vals[i] * t + penalty;
      const double term = c[i] * c[i] / (den * den);
      G += term;
      dG -= 4.0 * vals[i] * term / den;
    }
    const double inv_sqrt = 1.0 / std::sqrt(G);
    f = inv_sqrt - 1.0;
    df = -0.5 * inv_sqrt * inv_sqrt * inv_sqrt * dG;
  };

  double lo = 0.0;
  double hi = (c_norm - penalty) / (2.0 * d_min);
  double t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    double f = 0.0;
    double df = 0.0;
    eval(t, f, df);
    if (f == 0.0) break;
    (f < 0.0 ? lo : hi) = t;
    double next = df > 0.0 ? t - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * std::max(t, 1e-300) || hi - lo <= 1e-15 * hi) {
      t = next;
      break;
    }
    t = next;
  }

  Vector rot(k);
  for (Eigen::Index i = 0; i < k; ++i) rot[i] = c[i] * t / (2.0 * vals[i] * t + penalty);
  return vecs * rot;
}

double block_penalty(double lambda, double w) {
  return std::isinf(w) ? kInfiniteWeight : lambda * w;
}

void check_weights(const DesignMatrix& design, const Weights& weights) {
  if (weights.size() != design.p()) {
    throw DimensionMismatch("expected " + std::to_string(design.p()) + " weights, got " +
                            std::to_string(weights.size()));
  }
  for (double w : weights.values) {
    if (!(w > 0.0)) throw InvalidParameters("group weights must be positive");
  }
}

}  // namespace

bool Weights::all_infinite() const {
  return std::all_of(values.begin(), values.end(), [](double w) { return std::isinf(w); });
}

Weights adaptive_weights(const DesignMatrix& design, const Vector& initial_coefficients) {
  if (initial_coefficients.size() != design.values().cols()) {
    throw DimensionMismatch("initial coefficients do not match the full design layout");
  }
  Weights w;
  w.values.reserve(static_cast<std::size_t>(design.p()));
  for (int j = 0; j < design.p(); ++j) {
    const double norm = initial_coefficients.segment(design.block_start(j), design.dim()).norm();
    w.values.push_back(norm > 0.0 ? 1.0 / norm : kInfiniteWeight);
  }
  return w;
}

GroupLassoProblem::GroupLassoProblem(const DesignMatrix& design) : design_(&design) {
  const auto p = static_cast<std::size_t>(design.p());
  grams_.reserve(p);
  eigenvectors_.reserve(p);
  eigenvalues_.reserve(p);
  for (int j = 0; j < design.p(); ++j) {
    Matrix gram = design.block(j).transpose() * design.block(j);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    grams_.push_back(std::move(gram));
    eigenvectors_.push_back(eig.eigenvectors());
    eigenvalues_.push_back(eig.eigenvalues());
  }
}

double penalized_objective(const DesignMatrix& design, const Vector& y, double lambda,
                           const Weights& weights, const Vector& coefficients) {
  check_weights(design, weights);
  double value = (y - design.values() * coefficients).squaredNorm();
  for (int j = 0; j < design.p(); ++j) {
    const double norm = coefficients.segment(design.block_start(j), design.dim()).norm();
    if (norm > 0.0) value += block_penalty(lambda, weights[j]) * norm;
  }
  return value;
}

double lambda_max(const DesignMatrix& design, const Vector& y, const Weights& weights) {
  check_weights(design, weights);
  if (weights.all_infinite()) throw InvalidParameters("all group weights are infinite");
  const Vector r0 = y.array() - y.mean();
  double best = 0.0;
  for (int j = 0; j < design.p(); ++j) {
    if (std::isinf(weights[j])) continue;
    best = std::max(best, 2.0 * (design.block(j).transpose() * r0).norm() / weights[j]);
  }
  return best;
}

double kkt_residual(const DesignMatrix& design, const Vector& y, double lambda,
                    const Weights& weights, const Vector& coefficients) {
  check_weights(design, weights);
  const Vector r = y - design.values() * coefficients;
  double worst = std::abs(design.intercept().dot(r));
  for (int j = 0; j < design.p(); ++j) {
    const auto b = coefficients.segment(design.block_start(j), design.dim());
    const Vector grad = 2.0 * (design.block(j).transpose() * r);
    const double norm = b.norm();
    const double pen = block_penalty(lambda, weights[j]);
    double violation = 0.0;
    if (norm > 0.0) {
      violation = std::isinf(pen) ? kInfiniteWeight : (grad - pen * b / norm).norm();
    } else {
      violation = std::max(0.0, grad.norm() - pen);
    }
    worst = std::max(worst, violation);
  }
  return worst;
}

GroupLassoFit fit_group_lasso(const GroupLassoProblem& problem, const Vector& y, double lambda,
                              const Weights& weights, const SolverOptions& options,
                              const Vector* warm_start) {
  const DesignMatrix& design = problem.design();
  if (!(lambda >= 0.0)) throw InvalidParameters("lambda must be >= 0");
  if (!(options.tol > 0.0)) throw InvalidParameters("solver tolerance must be > 0");
  if (y.size() != design.values().rows()) {
    throw DimensionMismatch("response length does not match the design");
  }
  check_weights(design, weights);

  const int p = design.p();
  const int dim = design.dim();
  GroupLassoFit fit;
  fit.coefficients = warm_start ? *warm_start : Vector::Zero(design.values().cols());
  if (fit.coefficients.size() != design.values().cols()) {
    throw DimensionMismatch("warm start does not match the full design layout");
  }
  Vector& a = fit.coefficients;
  for (int j = 0; j < p; ++j) {
    if (std::isinf(weights[j])) a.segment(design.block_start(j), dim).setZero();
  }
  Vector r = y - design.values() * a;
  const double intercept_sq = design.intercept().squaredNorm();

  auto objective = [&] {
    double value = r.squaredNorm();
    for (int j = 0; j < p; ++j) {
      const double norm = a.segment(design.block_start(j), dim).norm();
      if (norm > 0.0) value += lambda * weights[j] * norm;
    }
    return value;
  };

  // One pass over the intercept and the listed groups; returns max |change|.
  auto pass = [&](bool active_only) {
    double change = 0.0;
    const double step0 = design.intercept().dot(r) / intercept_sq;
    if (step0 != 0.0) {
      a[0] += step0;
      r -= step0 * design.intercept();
      change = std::abs(step0);
    }
    for (int j = 0; j < p; ++j) {
      const double w = weights[j];
      if (std::isinf(w)) continue;
      auto b = a.segment(design.block_start(j), dim);
      const bool zero = b.squaredNorm() == 0.0;
      if (active_only && zero) continue;
      const Vector g = design.block(j).transpose() * r + problem.gram(j) * b;
      Vector next = solve_block(problem.eigenvectors(j), problem.eigenvalues(j), g, lambda * w);
      const Vector delta = next - b;
      const double moved = delta.cwiseAbs().maxCoeff();
      if (moved > 0.0) {
        r.noalias() -= design.block(j) * delta;
        b = next;
        change = std::max(change, moved);
      }
    }
    ++fit.sweeps;
    if (options.trace_objective) fit.objective_trace.push_back(objective());
    return change;
  };

  auto threshold = [&] { return options.tol * std::max(1.0, a.cwiseAbs().maxCoeff()); };

  while (fit.sweeps < options.max_sweeps) {
    const double change = pass(false);
    if (change <= threshold()) {
      r = y - design.values() * a;
      fit.kkt = kkt_residual(design, y, lambda, weights, a);
      if (fit.kkt <= 10.0 * options.tol) {
        fit.converged = true;
        break;
      }
      continue;
    }
    while (fit.sweeps < options.max_sweeps) {
      if (pass(true) <= threshold()) break;
    }
  }
  if (!fit.converged) fit.kkt = kkt_residual(design, y, lambda, weights, a);
  return fit;
}

GroupLassoFit fit_group_lasso(const DesignMatrix& design, const Vector& y, double lambda,
                              const Weights& weights, const SolverOptions& options) {
  const GroupLassoProblem problem(design);
  return fit_group_lasso(problem, y, lambda, weights, options);
}

bool PathResult::all_converged() const {
  return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

PathResult solve_path(const GroupLassoProblem& problem, const Vector& y, const Weights& weights,
                      const PathOptions& options) {
  if (options.count < 2) throw InvalidParameters("lambda grid needs at least 2 points");
  if (!(options.min_ratio > 0.0 && options.min_ratio < 1.0)) {
    throw InvalidParameters("lambda grid min_ratio must be in (0, 1)");
  }
  const DesignMatrix& design = problem.design();
  check_weights(design, weights);

  PathResult path;
  auto push = [&](double lambda, GroupLassoFit&& fit) {
    path.lambdas.push_back(lambda);
    path.active_sets.push_back(active_set(design, fit.coefficients));
    path.sweeps.push_back(fit.sweeps);
    path.converged.push_back(fit.converged);
    path.kkt.push_back(fit.kkt);
    path.coefficients.push_back(std::move(fit.coefficients));
  };

  const double top = weights.all_infinite() ? 0.0 : lambda_max(design, y, weights);
  if (top == 0.0) {
    push(0.0, fit_group_lasso(problem, y, 0.0, weights, options.solver));
    return path;
  }

  const Vector* warm = nullptr;
  for (int k = 0; k < options.count; ++k) {
    const double lambda =
        k == 0 ? top
               : top * std::pow(options.min_ratio, static_cast<double>(k) / (options.count - 1));
    push(lambda, fit_group_lasso(problem, y, lambda, weights, options.solver, warm));
    warm = &path.coefficients.back();
    if (options.stop_above > 0 &&
        static_cast<int>(path.active_sets.back().size()) > options.stop_above) {
      break;
    }
  }
  return path;
}

PathResult solve_path(const DesignMatrix& design, const Vector& y, const Weights& weights,
                      const PathOptions& options) {
  const GroupLassoProblem problem(design);
  return solve_path(problem, y, weights, options);
}

std::size_t select_admissible(const std::vector<BICRecord>& records, int max_size,
                              std::vector<std::size_t>* discarded) {
  std::size_t best = records.size();
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (static_cast<int>(records[i].size) > max_size) {
      if (discarded) discarded->push_back(i);
      continue;
    }
    // Strict comparison keeps the earlier, larger lambda on ties.
    if (best == records.size() || records[i].criterion < records[best].criterion) best = i;
  }
  if (best == records.size()) {
    throw NoAdmissibleEntry("every path entry has more than M=" + std::to_string(max_size) +
                            " active components");
  }
  return best;
}

LambdaSelection select_lambda(const PathResult& path, const DesignMatrix& design, const Vector& y,
                              const PenaltySpec& spec, int max_size) {
  if (path.size() == 0) throw InvalidParameters("lambda path is empty");
  LambdaSelection sel;
  sel.records.reserve(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    sel.records.push_back(bic_lambda(design, y, path.coefficients[i], path.lambdas[i], spec));
  }
  sel.index = select_admissible(sel.records, max_size, &sel.discarded);
  sel.lambda = path.lambdas[sel.index];
  sel.record = sel.records[sel.index];
  return sel;
}

AdaptiveResult adaptive_group_lasso(const DesignMatrix& design, const Vector& y,
                                    const PenaltySpec& spec, int max_size,
                                    const PathOptions& options) {
  const GroupLassoProblem problem(design);
  AdaptiveResult out;
  out.initial_path = solve_path(problem, y, Weights::unit(design.p()), options);
  out.initial = select_lambda(out.initial_path, design, y, spec, max_size);
  out.weights = adaptive_weights(design, out.initial_path.coefficients[out.initial.index]);
  out.adaptive_path = solve_path(problem, y, out.weights, options);
  out.selection = select_lambda(out.adaptive_path, design, y, spec, max_size);
  out.selected = out.adaptive_path.active_sets[out.selection.index];
  out.coefficients = out.adaptive_path.coefficients[out.selection.index];
  return out;
}

}  // namespace addsel
