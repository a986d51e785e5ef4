#include "addsel/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "addsel/error.hpp"
#include "addsel/parallel.hpp"

namespace addsel {

TruthFunction TruthFunction::named(std::string_view name) {
  TruthFunction f;
  f.name_ = std::string(name);
  if (name == "linear") {
    f.kind_ = Kind::Linear;
  } else if (name == "quadratic") {
    f.kind_ = Kind::Quadratic;
  } else if (name == "sine") {
    f.kind_ = Kind::Sine;
  } else {
    throw InvalidParameters("unknown truth function '" + f.name_ + "'");
  }
  return f;
}

TruthFunction TruthFunction::tabulated(std::vector<double> values) {
  if (values.size() < 2) throw InvalidParameters("a tabulated truth function needs >= 2 values");
  TruthFunction f;
  f.kind_ = Kind::Table;
  std::ostringstream label;
  label.precision(17);
  label << "table:";
  for (std::size_t i = 0; i < values.size(); ++i) label << (i ? " " : "") << values[i];
  f.name_ = label.str();
  f.table_ = std::move(values);
  return f;
}

TruthFunction TruthFunction::parse(std::string_view text) {
  constexpr std::string_view kPrefix = "table:";
  if (text.substr(0, kPrefix.size()) != kPrefix) return named(text);
  std::istringstream in{std::string(text.substr(kPrefix.size()))};
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw InvalidParameters("bad table value '" + token + "'");
    values.push_back(v);
  }
  return tabulated(std::move(values));
}

double TruthFunction::operator()(double x) const {
  switch (kind_) {
    case Kind::Linear: return 5.0 * x - 2.5;
    case Kind::Quadratic: {
      const double u = 2.0 * x - 1.0;
      return 3.0 * u * u - 1.0;
    }
    case Kind::Sine: return 2.0 * std::sin(2.0 * std::numbers::pi * x);
    case Kind::Table: {
      const double pos = std::clamp(x, 0.0, 1.0) * static_cast<double>(table_.size() - 1);
      const auto i = std::min(static_cast<std::size_t>(pos), table_.size() - 2);
      const double frac = pos - static_cast<double>(i);
      return table_[i] + frac * (table_[i + 1] - table_[i]);
    }
  }
  return 0.0;
}

std::vector<TruthFunction> default_truth(int s) {
  static const char* const kTrio[] = {"linear", "quadratic", "sine"};
  std::vector<TruthFunction> out;
  for (int j = 0; j < s; ++j) out.push_back(TruthFunction::named(kTrio[j % 3]));
  return out;
}

std::string_view to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::Gaussian: return "gaussian";
    case NoiseFamily::Uniform: return "uniform";
    case NoiseFamily::Rademacher: return "rademacher";
  }
  return "unknown";
}

NoiseFamily parse_noise_family(std::string_view name) {
  if (name == "gaussian") return NoiseFamily::Gaussian;
  if (name == "uniform") return NoiseFamily::Uniform;
  if (name == "rademacher") return NoiseFamily::Rademacher;
  throw InvalidParameters("unknown noise family '" + std::string(name) + "'");
}

std::string_view to_string(CovariateKind k) {
  return k == CovariateKind::IidUniform ? "iid-uniform" : "gaussian-copula";
}

CovariateKind parse_covariate_kind(std::string_view name) {
  if (name == "iid-uniform") return CovariateKind::IidUniform;
  if (name == "gaussian-copula") return CovariateKind::GaussianCopula;
  throw InvalidParameters("unknown covariate kind '" + std::string(name) + "'");
}

Vector noise_sample(NoiseFamily family, double sd, std::size_t n, Philox& rng) {
  if (!(sd >= 0.0)) throw InvalidParameters("noise sd must be >= 0");
  Vector out(static_cast<Eigen::Index>(n));
  const double half_width = std::sqrt(3.0) * sd;
  for (auto& v : out) {
    switch (family) {
      case NoiseFamily::Gaussian: v = sd * rng.normal(); break;
      case NoiseFamily::Uniform: v = half_width * (2.0 * rng.uniform() - 1.0); break;
      case NoiseFamily::Rademacher: v = (rng() >> 63) ? sd : -sd; break;
    }
  }
  return out;
}

std::string MethodSpec::label() const {
  return std::string(to_string(method)) + "/" + std::string(to_string(penalty.variant));
}

int SimConfig::resolved_dim() const {
  return dim > 0 ? dim : default_dim(order, static_cast<std::size_t>(n), dim_scale);
}

std::vector<TruthFunction> SimConfig::resolved_truth() const {
  return truth.empty() ? default_truth(s) : truth;
}

void validate(const SimConfig& c) {
  auto fail = [](const char* key, const std::string& msg) {
    throw InputError(key, std::string(key) + ": " + msg);
  };
  if (c.n < 2) fail("n", "must be >= 2");
  if (c.p < 1) fail("p", "must be >= 1");
  if (c.s < 0 || c.s > c.p) fail("s", "must satisfy 0 <= s <= p");
  if (!c.truth.empty() && static_cast<int>(c.truth.size()) != c.s) {
    fail("truth.functions", "needs exactly s entries");
  }
  if (!(c.noise_sd >= 0.0)) fail("noise.sd", "must be >= 0");
  if (!(c.rho >= 0.0 && c.rho < 1.0)) fail("covariates.rho", "must be in [0, 1)");
  if (c.order < 2) fail("spline.order", "must be >= 2");
  if (c.dim != 0 && c.dim < c.order - 1) fail("spline.k", "must be >= order - 1");
  if (!(c.dim_scale > 0.0)) fail("spline.k_scale", "must be > 0");
  if (c.methods.empty()) fail("search.method", "at least one method is required");
  if (c.selection.max_size < 0) fail("search.max_size", "must be >= 0");
  if (c.replications < 1) fail("replications", "must be >= 1");
  if (c.selection.path.count < 2) fail("lambda.count", "must be >= 2");
  if (!(c.selection.path.min_ratio > 0.0 && c.selection.path.min_ratio < 1.0)) {
    fail("lambda.min_ratio", "must be in (0, 1)");
  }
  for (const auto& m : c.methods) {
    if (m.method == Method::Exhaustive) {
      const auto required = submodel_count(c.p, std::min(c.selection.max_size, c.p));
      if (required > c.selection.search.budget) {
        throw BudgetExceeded(required, c.selection.search.budget);
      }
    }
    if (m.penalty.variant == PenaltyVariant::Scaled && m.penalty.scale && !(*m.penalty.scale > 0.0)) {
      fail("penalty.scale", "must be > 0");
    }
  }
}

Dataset gen_dataset(const SimConfig& config, std::uint64_t rep) {
  validate(config);
  const auto truth = config.resolved_truth();
  Philox rng(stream_key(config.seed, rep));
  const Eigen::Index n = config.n;
  const Eigen::Index p = config.p;

  Dataset data;
  data.covariates.resize(n, p);
  const double innovation = std::sqrt(1.0 - config.rho * config.rho);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (config.covariates == CovariateKind::IidUniform) {
      for (Eigen::Index j = 0; j < p; ++j) data.covariates(i, j) = rng.uniform();
    } else {
      // AR(1) latent row: corr(z_j, z_k) = rho^|j-k|, then the normal CDF.
      double z = rng.normal();
      for (Eigen::Index j = 0; j < p; ++j) {
        if (j > 0) z = config.rho * z + innovation * rng.normal();
        data.covariates(i, j) = std::clamp(0.5 * std::erfc(-z / std::numbers::sqrt2), 0.0, 1.0);
      }
    }
  }

  const Vector noise = noise_sample(config.noise, config.noise_sd, static_cast<std::size_t>(n), rng);
  data.response.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double mean = config.intercept;
    for (int j = 0; j < config.s; ++j) mean += truth[static_cast<std::size_t>(j)](data.covariates(i, j));
    data.response[i] = mean + noise[i];
  }
  std::vector<int> s0(static_cast<std::size_t>(config.s));
  for (int j = 0; j < config.s; ++j) s0[static_cast<std::size_t>(j)] = j;
  data.truth = Submodel(std::move(s0));
  return data;
}

double estimation_error(const DesignMatrix& design, const Vector& coefficients,
                        const Submodel& selected, const std::vector<TruthFunction>& truth) {
  constexpr int kGrid = 201;
  const int s = static_cast<int>(truth.size());
  double total = 0.0;
  for (int j = 0; j < design.p(); ++j) {
    if (j >= s && !selected.contains(j)) continue;
    const auto est = component_from_full(design, coefficients, j);
    double integral = 0.0;
    for (int g = 0; g < kGrid; ++g) {
      const double u = static_cast<double>(g) / (kGrid - 1);
      const double x = est.range.from_unit(u);
      const double truth_value = j < s ? truth[static_cast<std::size_t>(j)](u) : 0.0;
      const double diff = eval_component(est, x) - truth_value;
      const double weight = (g == 0 || g == kGrid - 1) ? 0.5 : 1.0;
      integral += weight * diff * diff;
    }
    total += integral / (kGrid - 1);
  }
  return total;
}

namespace {

struct Outcome {
  Submodel selected;
  double error = 0.0;
  bool converged = true;
};

}  // namespace

SelectionReport run_experiment(const SimConfig& config) {
  validate(config);
  const auto truth = config.resolved_truth();
  const auto spec = make_spec(config.order, config.resolved_dim());
  const auto reps = static_cast<std::size_t>(config.replications);
  const auto methods = config.methods.size();

  std::vector<std::vector<Outcome>> outcomes(reps, std::vector<Outcome>(methods));
  parallel_for(reps, config.threads, [&](std::size_t r) {
    try {
      const Dataset data = gen_dataset(config, r);
      const DesignMatrix design = build_design(data.covariates, spec);
      for (std::size_t m = 0; m < methods; ++m) {
        const auto& ms = config.methods[m];
        const auto sel = select_model(design, data.response, ms.method, ms.penalty, config.selection);
        outcomes[r][m] = {sel.selected, estimation_error(design, sel.coefficients, sel.selected, truth),
                          sel.converged};
      }
    } catch (const std::exception& e) {
      throw Error("replication " + std::to_string(r) + " failed: " + e.what());
    }
  });

  SelectionReport report;
  report.config = config;
  const Submodel s0 = gen_dataset(config, 0).truth;
  for (std::size_t m = 0; m < methods; ++m) {
    MethodRow row;
    row.spec = config.methods[m];
    row.replications = config.replications;
    double size_sum = 0.0;
    double error_sum = 0.0;
    std::vector<Submodel> chosen;
    chosen.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& o = outcomes[r][m];
      if (o.selected == s0) {
        ++row.exact;
      } else if (o.selected.includes(s0)) {
        ++row.overfit;
      } else {
        ++row.underfit;
      }
      if (!o.converged) ++row.unconverged;
      size_sum += static_cast<double>(o.selected.size());
      error_sum += o.error;
      chosen.push_back(o.selected);
    }
    const double R = static_cast<double>(reps);
    row.exact_rate = row.exact / R;
    row.underfit_rate = row.underfit / R;
    row.overfit_rate = row.overfit / R;
    row.mean_size = size_sum / R;
    row.mean_error = error_sum / R;
    report.rows.push_back(row);
    report.selections.push_back(std::move(chosen));
  }
  return report;
}

}  // namespace addsel
