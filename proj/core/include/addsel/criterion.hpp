#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "addsel/basis.hpp"
#include "addsel/fitting.hpp"

namespace addsel {

enum class PenaltyVariant { Semiparametric, Classic, Scaled, Custom };

/// pen(S) as a function of (|S|, K, n, p).
///
///   semiparametric: |S| K (log n + log p) / n
///   classic:        |S| K log n / n
///   scaled:         C_n |S| K log n / n, C_n = log(log n) unless given
struct PenaltySpec {
  using CustomFn = std::function<double(std::size_t size, int dim, std::size_t n, int p)>;

  PenaltyVariant variant = PenaltyVariant::Semiparametric;
  std::optional<double> scale;  // C_n for the scaled variant
  CustomFn custom;

  static PenaltySpec semiparametric() { return {}; }
  static PenaltySpec classic() { return {PenaltyVariant::Classic, std::nullopt, {}}; }
  static PenaltySpec scaled(std::optional<double> c = std::nullopt) {
    return {PenaltyVariant::Scaled, c, {}};
  }
  static PenaltySpec custom_fn(CustomFn fn) {
    return {PenaltyVariant::Custom, std::nullopt, std::move(fn)};
  }
};

std::string_view to_string(PenaltyVariant v);
/// Accepts `semiparametric`, `classic`, `scaled`.
PenaltyVariant parse_penalty_variant(std::string_view name);

double penalty_value(const PenaltySpec& spec, std::size_t size, int dim, std::size_t n, int p);

inline constexpr double kRssFloor = 1e-300;
/// Residual sums below this fraction of ||y||^2 are roundoff of an exact fit.
inline constexpr double kRelativeRssFloor = 1e-24;

/// max(kRssFloor, kRelativeRssFloor * ||y||^2).
double rss_floor(const Vector& y);

/// Criterion value for a submodel or a penalized path entry.
struct BICRecord {
  std::variant<Submodel, double> label;
  double rss = 0.0;
  double penalty = 0.0;
  double criterion = 0.0;
  bool floored = false;
  std::size_t size = 0;  // |S| or |S_lambda|
};

/// log(max(rss, floor)) + penalty.
BICRecord make_record(std::variant<Submodel, double> label, double rss, double penalty,
                      std::size_t size, double floor = kRssFloor);

BICRecord bic_submodel(const DesignMatrix& design, const Vector& y, const Submodel& S,
                       const PenaltySpec& spec);

/// Components whose coefficient block has nonzero norm.
Submodel active_set(const DesignMatrix& design, const Vector& full_coefficients);

/// BIC(lambda) from penalized coefficients in the full layout; the rss is
/// that of the penalized fit itself, not a refit.
BICRecord bic_lambda(const DesignMatrix& design, const Vector& y, const Vector& full_coefficients,
                     double lambda, const PenaltySpec& spec);

}  // namespace addsel
