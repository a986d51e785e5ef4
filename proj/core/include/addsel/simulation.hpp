#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "addsel/pipeline.hpp"
#include "addsel/random.hpp"

namespace addsel {

/// True component function on [0,1]: a named built-in or a table of values
/// on a uniform grid, linearly interpolated.
///
///   linear     5x - 2.5
///   quadratic  3(2x - 1)^2 - 1
///   sine       2 sin(2 pi x)
///
/// All three built-ins integrate to zero over U[0,1].
class TruthFunction {
 public:
  static TruthFunction named(std::string_view name);
  static TruthFunction tabulated(std::vector<double> values);
  /// Parses a built-in name or `table:v0 v1 ... vm`.
  static TruthFunction parse(std::string_view text);

  double operator()(double x) const;
  const std::string& name() const noexcept { return name_; }

 private:
  enum class Kind { Linear, Quadratic, Sine, Table };
  Kind kind_ = Kind::Linear;
  std::string name_;
  std::vector<double> table_;
};

/// The default truth: linear, quadratic, sine, cycled to length s.
std::vector<TruthFunction> default_truth(int s);

enum class NoiseFamily { Gaussian, Uniform, Rademacher };
enum class CovariateKind { IidUniform, GaussianCopula };

std::string_view to_string(NoiseFamily f);
NoiseFamily parse_noise_family(std::string_view name);
std::string_view to_string(CovariateKind k);
CovariateKind parse_covariate_kind(std::string_view name);

/// Mean-zero i.i.d. draws with variance sd^2. Gaussian N(0, sd^2); uniform on
/// [-sqrt(3) sd, sqrt(3) sd]; Rademacher +-sd.
Vector noise_sample(NoiseFamily family, double sd, std::size_t n, Philox& rng);

struct MethodSpec {
  Method method = Method::Penalized;
  PenaltySpec penalty;
  std::string label() const;
};

struct SimConfig {
  int n = 200;
  int p = 50;
  int s = 3;
  double intercept = 0.0;
  std::vector<TruthFunction> truth;  // empty: default_truth(s)

  NoiseFamily noise = NoiseFamily::Gaussian;
  double noise_sd = 1.0;

  CovariateKind covariates = CovariateKind::IidUniform;
  double rho = 0.0;

  int order = 4;
  int dim = 0;  // 0: default_dim(order, n, dim_scale)
  double dim_scale = 2.0;

  std::vector<MethodSpec> methods{MethodSpec{}};
  SelectionOptions selection;

  int replications = 100;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  int resolved_dim() const;
  std::vector<TruthFunction> resolved_truth() const;
};

/// Throws InputError naming the offending key.
void validate(const SimConfig& config);

struct Dataset {
  Matrix covariates;  // n x p on [0,1]
  Vector response;
  Submodel truth;     // {0, ..., s-1}
};

/// Replication `rep` drawn from the stream keyed by (seed, rep).
Dataset gen_dataset(const SimConfig& config, std::uint64_t rep);

/// Sum over j in S0 u S of the integral of (fhat_j - f0_j)^2 on [0,1]
/// (trapezoid rule on a 201-point grid).
double estimation_error(const DesignMatrix& design, const Vector& coefficients,
                        const Submodel& selected, const std::vector<TruthFunction>& truth);

struct MethodRow {
  MethodSpec spec;
  int replications = 0;
  int exact = 0;
  int underfit = 0;
  int overfit = 0;
  double exact_rate = 0.0;
  double underfit_rate = 0.0;
  double overfit_rate = 0.0;
  double mean_size = 0.0;
  double mean_error = 0.0;
  int unconverged = 0;
};

struct SelectionReport {
  SimConfig config;
  std::vector<MethodRow> rows;
  /// selections[m][r]: submodel chosen by method m on replication r.
  std::vector<std::vector<Submodel>> selections;
};

/// Runs every configured method on the same replications. Replications may
/// run on config.threads workers; the report does not depend on scheduling.
SelectionReport run_experiment(const SimConfig& config);

}  // namespace addsel
