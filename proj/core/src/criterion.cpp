#include "addsel/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "addsel/error.hpp"

namespace addsel {

std::string_view to_string(PenaltyVariant v) {
  switch (v) {
    case PenaltyVariant::Semiparametric: return "semiparametric";
    case PenaltyVariant::Classic: return "classic";
    case PenaltyVariant::Scaled: return "scaled";
    case PenaltyVariant::Custom: return "custom";
  }
  return "unknown";
}

PenaltyVariant parse_penalty_variant(std::string_view name) {
  if (name == "semiparametric") return PenaltyVariant::Semiparametric;
  if (name == "classic") return PenaltyVariant::Classic;
  if (name == "scaled") return PenaltyVariant::Scaled;
  throw InvalidParameters("unknown penalty variant '" + std::string(name) + "'");
}

double penalty_value(const PenaltySpec& spec, std::size_t size, int dim, std::size_t n, int p) {
  if (n < 2 || p < 1 || dim < 1) {
    throw InvalidParameters("penalty needs n >= 2, p >= 1, K >= 1");
  }
  if (size == 0) return 0.0;
  const double nd = static_cast<double>(n);
  const double base = static_cast<double>(size) * dim / nd;
  switch (spec.variant) {
    case PenaltyVariant::Semiparametric:
      return base * (std::log(nd) + std::log(static_cast<double>(p)));
    case PenaltyVariant::Classic:
      return base * std::log(nd);
    case PenaltyVariant::Scaled: {
      const double c = spec.scale.value_or(std::log(std::log(nd)));
      if (!(c > 0.0)) {
        throw InvalidParameters("scaled penalty needs C_n > 0 (default log(log n) requires n >= 3)");
      }
      return c * base * std::log(nd);
    }
    case PenaltyVariant::Custom: {
      if (!spec.custom) throw InvalidParameters("custom penalty has no function");
      const double v = spec.custom(size, dim, n, p);
      if (!(v >= 0.0)) throw InvalidParameters("custom penalty returned a negative value");
      return v;
    }
  }
  throw InvalidParameters("unknown penalty variant");
}

double rss_floor(const Vector& y) {
  return std::max(kRssFloor, kRelativeRssFloor * y.squaredNorm());
}

BICRecord make_record(std::variant<Submodel, double> label, double rss, double penalty,
                      std::size_t size, double floor) {
  BICRecord rec;
  rec.label = std::move(label);
  rec.rss = rss;
  rec.penalty = penalty;
  rec.size = size;
  rec.floored = !(rss > floor);
  rec.criterion = std::log(rec.floored ? floor : rss) + penalty;
  return rec;
}

BICRecord bic_submodel(const DesignMatrix& design, const Vector& y, const Submodel& S,
                       const PenaltySpec& spec) {
  const FitResult fit = fit_submodel(design, y, S);
  const double pen = penalty_value(spec, S.size(), design.dim(), design.n(), design.p());
  return make_record(S, fit.rss, pen, S.size(), rss_floor(y));
}

Submodel active_set(const DesignMatrix& design, const Vector& full_coefficients) {
  if (full_coefficients.size() != design.values().cols()) {
    throw DimensionMismatch("coefficient vector does not match the full design layout");
  }
  std::vector<int> active;
  for (int j = 0; j < design.p(); ++j) {
    if (full_coefficients.segment(design.block_start(j), design.dim()).squaredNorm() > 0.0) {
      active.push_back(j);
    }
  }
  return Submodel(std::move(active));
}

BICRecord bic_lambda(const DesignMatrix& design, const Vector& y, const Vector& full_coefficients,
                     double lambda, const PenaltySpec& spec) {
  if (y.size() != design.values().rows()) {
    throw DimensionMismatch("response length does not match the design");
  }
  const Submodel active = active_set(design, full_coefficients);
  const double rss = (y - design.values() * full_coefficients).squaredNorm();
  const double pen = penalty_value(spec, active.size(), design.dim(), design.n(), design.p());
  return make_record(lambda, rss, pen, active.size(), rss_floor(y));
}

}  // namespace addsel
