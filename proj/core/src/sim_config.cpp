#include "addsel/sim_config.hpp"

#include <charconv>
#include <map>
#include <sstream>

#include "addsel/error.hpp"
#include "addsel/io.hpp"

namespace addsel {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) items.push_back(std::move(t));
  }
  return items;
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw InputError(key, key + ": cannot parse '" + value + "' as a number");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError(key, key + ": cannot parse '" + value + "' as a real number");
}

template <class Fn>
auto keyed(const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(key, key + ": " + e.what());
  }
}

}  // namespace

SimConfig parse_sim_config(std::string_view text) {
  std::map<std::string, std::string> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    auto key = trim(std::string_view(line).substr(0, eq));
    auto value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw InputError("", "line " + std::to_string(line_no) + ": empty key");
    if (!entries.emplace(key, value).second) {
      throw InputError(key, key + ": duplicate key");
    }
  }

  SimConfig c;
  std::vector<PenaltyVariant> variants{PenaltyVariant::Semiparametric};
  std::optional<double> scale;
  std::vector<Method> methods{Method::Penalized};

  for (const auto& [key, value] : entries) {
    if (key == "n") {
      c.n = parse_number<int>(key, value);
    } else if (key == "p") {
      c.p = parse_number<int>(key, value);
    } else if (key == "s") {
      c.s = parse_number<int>(key, value);
    } else if (key == "intercept") {
      c.intercept = parse_real(key, value);
    } else if (key == "replications") {
      c.replications = parse_number<int>(key, value);
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "threads") {
      c.threads = parse_number<unsigned>(key, value);
    } else if (key == "truth.functions") {
      c.truth.clear();
      for (const auto& item : split_list(value)) {
        c.truth.push_back(keyed(key, [&] { return TruthFunction::parse(item); }));
      }
    } else if (key == "noise.family") {
      c.noise = keyed(key, [&] { return parse_noise_family(value); });
    } else if (key == "noise.sd") {
      c.noise_sd = parse_real(key, value);
    } else if (key == "covariates.kind") {
      c.covariates = keyed(key, [&] { return parse_covariate_kind(value); });
    } else if (key == "covariates.rho") {
      c.rho = parse_real(key, value);
    } else if (key == "spline.order") {
      c.order = parse_number<int>(key, value);
    } else if (key == "spline.k") {
      c.dim = value == "auto" ? 0 : parse_number<int>(key, value);
      if (value != "auto" && c.dim < 1) throw InputError(key, key + ": must be >= 1 or 'auto'");
    } else if (key == "spline.k_scale") {
      c.dim_scale = parse_real(key, value);
    } else if (key == "search.method") {
      methods.clear();
      for (const auto& item : split_list(value)) {
        methods.push_back(keyed(key, [&] { return parse_method(item); }));
      }
    } else if (key == "search.max_size") {
      c.selection.max_size = parse_number<int>(key, value);
    } else if (key == "search.budget") {
      c.selection.search.budget = parse_number<std::size_t>(key, value);
    } else if (key == "search.screen_keep") {
      c.selection.search.screen_keep = parse_number<int>(key, value);
    } else if (key == "penalty.variant") {
      variants.clear();
      for (const auto& item : split_list(value)) {
        variants.push_back(keyed(key, [&] { return parse_penalty_variant(item); }));
      }
    } else if (key == "penalty.scale") {
      scale = parse_real(key, value);
    } else if (key == "lambda.count") {
      c.selection.path.count = parse_number<int>(key, value);
    } else if (key == "lambda.min_ratio") {
      c.selection.path.min_ratio = parse_real(key, value);
    } else if (key == "lambda.stop_above") {
      c.selection.path.stop_above = parse_number<int>(key, value);
    } else if (key == "solver.tol") {
      c.selection.path.solver.tol = parse_real(key, value);
    } else if (key == "solver.max_sweeps") {
      c.selection.path.solver.max_sweeps = parse_number<int>(key, value);
    } else {
      throw InputError(key, "unknown configuration key '" + key + "'");
    }
  }

  if (methods.empty()) throw InputError("search.method", "search.method: empty list");
  if (variants.empty()) throw InputError("penalty.variant", "penalty.variant: empty list");
  c.methods.clear();
  for (Method m : methods) {
    for (PenaltyVariant v : variants) {
      PenaltySpec pen;
      pen.variant = v;
      if (v == PenaltyVariant::Scaled) pen.scale = scale;
      c.methods.push_back({m, pen});
    }
  }
  if (!(c.selection.path.solver.tol > 0.0)) throw InputError("solver.tol", "solver.tol: must be > 0");
  if (c.selection.path.solver.max_sweeps < 1) {
    throw InputError("solver.max_sweeps", "solver.max_sweeps: must be >= 1");
  }
  validate(c);
  return c;
}

nlohmann::ordered_json config_to_json(const SimConfig& c) {
  nlohmann::ordered_json j;
  j["n"] = c.n;
  j["p"] = c.p;
  j["s"] = c.s;
  j["intercept"] = c.intercept;
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  auto truth = nlohmann::ordered_json::array();
  for (const auto& f : c.resolved_truth()) truth.push_back(f.name());
  j["truth.functions"] = truth;
  j["noise.family"] = to_string(c.noise);
  j["noise.sd"] = c.noise_sd;
  j["covariates.kind"] = to_string(c.covariates);
  j["covariates.rho"] = c.rho;
  j["spline.order"] = c.order;
  j["spline.k"] = c.resolved_dim();
  j["spline.k_scale"] = c.dim_scale;
  auto methods = nlohmann::ordered_json::array();
  for (const auto& m : c.methods) methods.push_back(m.label());
  j["methods"] = methods;
  j["search.max_size"] = c.selection.max_size;
  j["search.budget"] = c.selection.search.budget;
  j["search.screen_keep"] =
      c.selection.search.screen_keep > 0
          ? c.selection.search.screen_keep
          : default_screen_keep(static_cast<std::size_t>(c.n), c.p);
  for (const auto& m : c.methods) {
    if (m.penalty.variant == PenaltyVariant::Scaled) {
      j["penalty.scale"] = m.penalty.scale ? nlohmann::ordered_json(*m.penalty.scale)
                                           : nlohmann::ordered_json("log(log(n))");
      break;
    }
  }
  j["lambda.count"] = c.selection.path.count;
  j["lambda.min_ratio"] = c.selection.path.min_ratio;
  j["lambda.stop_above"] = c.selection.path.stop_above;
  j["solver.tol"] = c.selection.path.solver.tol;
  j["solver.max_sweeps"] = c.selection.path.solver.max_sweeps;
  return j;
}

std::string report_csv(const SelectionReport& report) {
  using io::format_double;
  std::string out =
      "method,penalty,replications,exact_rate,underfit_rate,overfit_rate,mean_size,"
      "mean_estimation_error,unconverged\n";
  for (const auto& row : report.rows) {
    out += std::string(to_string(row.spec.method)) + "," +
           std::string(to_string(row.spec.penalty.variant)) + "," +
           std::to_string(row.replications) + "," + format_double(row.exact_rate) + "," +
           format_double(row.underfit_rate) + "," + format_double(row.overfit_rate) + "," +
           format_double(row.mean_size) + "," + format_double(row.mean_error) + "," +
           std::to_string(row.unconverged) + "\n";
  }
  return out;
}

nlohmann::ordered_json report_json(const SelectionReport& report) {
  nlohmann::ordered_json j;
  j["seed"] = report.config.seed;
  j["replications"] = report.config.replications;
  j["config"] = config_to_json(report.config);
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t m = 0; m < report.rows.size(); ++m) {
    const auto& row = report.rows[m];
    nlohmann::ordered_json r;
    r["method"] = to_string(row.spec.method);
    r["penalty"] = to_string(row.spec.penalty.variant);
    r["exact"] = row.exact;
    r["underfit"] = row.underfit;
    r["overfit"] = row.overfit;
    r["exact_rate"] = row.exact_rate;
    r["underfit_rate"] = row.underfit_rate;
    r["overfit_rate"] = row.overfit_rate;
    r["mean_size"] = row.mean_size;
    r["mean_estimation_error"] = row.mean_error;
    r["unconverged"] = row.unconverged;
    auto sel = nlohmann::ordered_json::array();
    for (const auto& S : report.selections[m]) sel.push_back(S.indices());
    r["selections"] = sel;
    rows.push_back(r);
  }
  j["methods"] = rows;
  return j;
}

}  // namespace addsel
