#include "addsel_cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "addsel/basis.hpp"
#include "addsel/criterion.hpp"
#include "addsel/error.hpp"
#include "addsel/fitting.hpp"
#include "addsel/io.hpp"
#include "addsel/pipeline.hpp"
#include "addsel/sim_config.hpp"
#include "addsel/simulation.hpp"

namespace addsel::cli {

namespace fs = std::filesystem;
using io::format_double;

namespace {

constexpr int kGrid = 201;
constexpr int kMinRows = 10;

struct CliConfig {
  std::string input;
  fs::path out_dir = ".";
  std::string y_col = "y";
  int order = 4;
  std::string spline_k = "auto";
  std::string penalty = "semiparametric";
  std::optional<double> scale;
  std::string method = "exhaustive";
  int max_size = 10;
  std::size_t budget = SearchOptions{}.budget;
  int screen_keep = 0;
  int lambda_count = PathOptions{}.count;
  double lambda_min_ratio = PathOptions{}.min_ratio;
  int lambda_stop_above = 0;
  double tol = SolverOptions{}.tol;
  int max_sweeps = SolverOptions{}.max_sweeps;
  bool refuse_nonconvergence = false;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::uint64_t rep = 0;
  bool verbose = false;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Covariates and response pulled from an input CSV.
struct InputData {
  std::vector<std::string> names;
  Matrix raw;
  Vector y;
};

InputData load_input(const CliConfig& cfg) {
  if (cfg.input.empty()) throw InputError("--input", "--input is required");
  const auto table = io::read_csv(fs::path(cfg.input));
  const auto ycol = table.column(cfg.y_col);
  InputData data;
  std::vector<Eigen::Index> xcols;
  for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(table.header.size()); ++c) {
    if (c == ycol) continue;
    xcols.push_back(c);
    data.names.push_back(table.header[static_cast<std::size_t>(c)]);
  }
  if (xcols.empty()) throw InputError(cfg.y_col, "input has no covariate columns besides '" + cfg.y_col + "'");
  const auto n = table.values.rows();
  if (n < kMinRows) {
    throw InputError("--input", "input has " + std::to_string(n) + " rows, at least " +
                                    std::to_string(kMinRows) + " are required");
  }
  data.raw.resize(n, static_cast<Eigen::Index>(xcols.size()));
  for (std::size_t j = 0; j < xcols.size(); ++j) {
    const auto col = table.values.col(xcols[j]);
    if (!(col.maxCoeff() > col.minCoeff())) {
      throw InputError(data.names[j], "covariate column '" + data.names[j] + "' is constant");
    }
    data.raw.col(static_cast<Eigen::Index>(j)) = col;
  }
  data.y = table.values.col(ycol);
  return data;
}

int resolve_dim(const CliConfig& cfg, std::optional<std::size_t> n) {
  if (cfg.spline_k == "auto") {
    if (!n) throw InputError("--spline-k", "--spline-k auto needs data; give an integer");
    return default_dim(cfg.order, *n);
  }
  std::size_t used = 0;
  int k = 0;
  try {
    k = std::stoi(cfg.spline_k, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cfg.spline_k.size()) {
    throw InputError("--spline-k", "--spline-k must be an integer or 'auto', got '" + cfg.spline_k + "'");
  }
  return k;
}

SplineSpec spline_from(const CliConfig& cfg, std::optional<std::size_t> n) {
  const int k = resolve_dim(cfg, n);
  try {
    return make_spec(cfg.order, k);
  } catch (const InvalidParameters& e) {
    throw InputError("--spline-k", e.what());
  }
}

PenaltySpec penalty_from(const CliConfig& cfg) {
  PenaltySpec spec;
  try {
    spec.variant = parse_penalty_variant(cfg.penalty);
  } catch (const Error& e) {
    throw InputError("--penalty", e.what());
  }
  if (spec.variant == PenaltyVariant::Custom) {
    throw InputError("--penalty", "custom penalties are not available from the command line");
  }
  if (cfg.scale) {
    if (spec.variant != PenaltyVariant::Scaled) {
      throw InputError("--scale", "--scale applies to the scaled penalty only");
    }
    if (!(*cfg.scale > 0.0)) throw InputError("--scale", "--scale must be > 0");
    spec.scale = cfg.scale;
  }
  return spec;
}

SelectionOptions selection_from(const CliConfig& cfg) {
  if (cfg.max_size < 0) throw InputError("--max-size", "--max-size must be >= 0");
  if (cfg.lambda_count < 2) throw InputError("--lambda-count", "--lambda-count must be >= 2");
  if (!(cfg.lambda_min_ratio > 0.0 && cfg.lambda_min_ratio < 1.0)) {
    throw InputError("--lambda-min-ratio", "--lambda-min-ratio must be in (0, 1)");
  }
  if (!(cfg.tol > 0.0)) throw InputError("--tol", "--tol must be > 0");
  if (cfg.max_sweeps < 1) throw InputError("--max-sweeps", "--max-sweeps must be >= 1");
  SelectionOptions opts;
  opts.max_size = cfg.max_size;
  opts.search.budget = cfg.budget;
  opts.search.screen_keep = cfg.screen_keep;
  opts.search.threads = cfg.threads.value_or(1);
  opts.path.count = cfg.lambda_count;
  opts.path.min_ratio = cfg.lambda_min_ratio;
  opts.path.stop_above = cfg.lambda_stop_above;
  opts.path.solver.tol = cfg.tol;
  opts.path.solver.max_sweeps = cfg.max_sweeps;
  return opts;
}

void write_output(const CliConfig& cfg, const std::string& name, const std::string& contents) {
  fs::create_directories(cfg.out_dir);
  io::write_file_atomic(cfg.out_dir / name, contents);
}

nlohmann::ordered_json to_array(const Vector& v) {
  auto a = nlohmann::ordered_json::array();
  for (double x : v) a.push_back(x);
  return a;
}

int cmd_fit(const CliConfig& cfg, std::ostream& out) {
  const auto data = load_input(cfg);
  const auto spec = spline_from(cfg, static_cast<std::size_t>(data.raw.rows()));
  const auto penalty = penalty_from(cfg);
  const auto opts = selection_from(cfg);
  Method method{};
  try {
    method = parse_method(cfg.method);
  } catch (const Error& e) {
    throw InputError("--method", e.what());
  }

  const auto scaled = rescale_covariates(data.raw);
  const auto design = build_design(scaled.unit, spec, scaled.ranges);
  const auto sel = select_model(design, data.y, method, penalty, opts);
  if (cfg.refuse_nonconvergence && !sel.converged) {
    throw NotConverged("group lasso solver did not converge within --max-sweeps");
  }

  nlohmann::ordered_json j;
  j["method"] = to_string(method);
  j["penalty"] = to_string(penalty.variant);
  j["n"] = design.n();
  j["p"] = design.p();
  j["order"] = spec.order();
  j["dim"] = spec.dim();
  j["max_size"] = cfg.max_size;
  auto names = nlohmann::ordered_json::array();
  for (int idx : sel.selected) names.push_back(data.names[static_cast<std::size_t>(idx)]);
  j["selected"] = names;
  j["selected_indices"] = sel.selected.indices();
  j["intercept"] = recover_intercept(sel.coefficients[0], spec.dim());
  if (const auto* lambda = std::get_if<double>(&sel.record.label)) j["lambda"] = *lambda;
  j["rss"] = sel.record.rss;
  j["penalty_value"] = sel.record.penalty;
  j["criterion"] = sel.record.criterion;
  j["rss_floored"] = sel.record.floored;
  j["evaluations"] = sel.evaluations;
  j["converged"] = sel.converged;

  auto comps = nlohmann::ordered_json::array();
  std::string csv = "component,x,fhat\n";
  for (int idx : sel.selected) {
    const auto est = component_from_full(design, sel.coefficients, idx);
    const auto& name = data.names[static_cast<std::size_t>(idx)];
    nlohmann::ordered_json c;
    c["name"] = name;
    c["index"] = idx;
    c["range"] = {est.range.min, est.range.max};
    c["coefficients"] = to_array(est.block);
    c["centering"] = to_array(est.offsets);
    comps.push_back(c);
    for (int g = 0; g < kGrid; ++g) {
      const double x = est.range.from_unit(static_cast<double>(g) / (kGrid - 1));
      csv += csv_field(name) + "," + format_double(x) + "," + format_double(eval_component(est, x)) + "\n";
    }
  }
  j["components"] = comps;

  write_output(cfg, "selected.json", j.dump(2) + "\n");
  write_output(cfg, "components.csv", csv);
  out << "selected " << names.dump() << " criterion " << format_double(sel.record.criterion) << "\n";
  return kOk;
}

int cmd_path(const CliConfig& cfg, std::ostream& out) {
  const auto data = load_input(cfg);
  const auto spec = spline_from(cfg, static_cast<std::size_t>(data.raw.rows()));
  const auto penalty = penalty_from(cfg);
  const auto opts = selection_from(cfg);

  const auto scaled = rescale_covariates(data.raw);
  const auto design = build_design(scaled.unit, spec, scaled.ranges);
  const auto result = adaptive_group_lasso(design, data.y, penalty, opts.max_size, opts.path);
  const auto& path = result.adaptive_path;
  if (cfg.refuse_nonconvergence && !(result.initial_path.all_converged() && path.all_converged())) {
    throw NotConverged("group lasso solver did not converge within --max-sweeps");
  }

  std::string csv = "lambda,size,rss,penalty,criterion,converged,selected\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto& rec = result.selection.records[i];
    csv += format_double(path.lambdas[i]) + "," + std::to_string(rec.size) + "," +
           format_double(rec.rss) + "," + format_double(rec.penalty) + "," +
           format_double(rec.criterion) + "," + (path.converged[i] ? "1" : "0") + "," +
           (i == result.selection.index ? "1" : "0") + "\n";
  }
  write_output(cfg, "path.csv", csv);
  out << "path entries " << path.size() << ", selected lambda "
      << format_double(result.selection.lambda) << "\n";
  return kOk;
}

SimConfig load_sim_config(const CliConfig& cfg) {
  if (cfg.config.empty()) throw InputError("--config", "--config is required");
  auto config = parse_sim_config(io::read_text(fs::path(cfg.config)));
  if (cfg.seed) config.seed = *cfg.seed;
  if (cfg.threads) config.threads = *cfg.threads;
  return config;
}

int cmd_simulate(const CliConfig& cfg, std::ostream& out) {
  const auto config = load_sim_config(cfg);
  const auto report = run_experiment(config);
  write_output(cfg, "report.csv", report_csv(report));
  write_output(cfg, "report.json", report_json(report).dump(2) + "\n");
  for (const auto& row : report.rows) {
    out << row.spec.label() << " exact_rate " << format_double(row.exact_rate) << "\n";
  }
  return kOk;
}

int cmd_basis(const CliConfig& cfg, std::ostream& out) {
  const auto spec = spline_from(cfg, std::nullopt);
  std::string csv = "x";
  for (int k = 1; k <= spec.raw_size(); ++k) csv += ",B_" + std::to_string(k);
  csv += "\n";
  Vector row(spec.raw_size());
  for (int g = 0; g < kGrid; ++g) {
    const double x = static_cast<double>(g) / (kGrid - 1);
    eval_raw_basis_into(spec, x, row);
    csv += format_double(x);
    for (double b : row) csv += "," + format_double(b);
    csv += "\n";
  }
  write_output(cfg, "basis.csv", csv);
  out << "basis order " << spec.order() << ", " << spec.raw_size() << " functions\n";
  return kOk;
}

int cmd_generate(const CliConfig& cfg, std::ostream& out) {
  const auto config = load_sim_config(cfg);
  const auto data = gen_dataset(config, cfg.rep);
  std::string csv;
  for (int j = 0; j < config.p; ++j) csv += "x" + std::to_string(j + 1) + ",";
  csv += "y\n";
  for (Eigen::Index i = 0; i < data.covariates.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.covariates.cols(); ++j) {
      csv += format_double(data.covariates(i, j)) + ",";
    }
    csv += format_double(data.response[i]) + "\n";
  }
  write_output(cfg, "data.csv", csv);
  out << "wrote " << data.covariates.rows() << " rows\n";
  return kOk;
}

void add_out_dir(CLI::App* sub, CliConfig& cfg) {
  sub->add_option("--out-dir", cfg.out_dir, "Directory for output files")->capture_default_str();
}

void add_spline(CLI::App* sub, CliConfig& cfg, bool allow_auto) {
  sub->add_option("--order", cfg.order, "Spline order q")->capture_default_str();
  auto* k = sub->add_option("--spline-k", cfg.spline_k,
                            allow_auto ? "Spline dimension K, or 'auto'" : "Spline dimension K");
  if (allow_auto) {
    k->capture_default_str();
  } else {
    k->required();
  }
}

void add_data(CLI::App* sub, CliConfig& cfg) {
  sub->add_option("--input", cfg.input, "Input CSV with a response column")->required();
  sub->add_option("--y-col", cfg.y_col, "Response column name")->capture_default_str();
  sub->add_option("--penalty", cfg.penalty, "semiparametric, classic or scaled")->capture_default_str();
  sub->add_option("--scale", cfg.scale, "Constant C_n for the scaled penalty");
  sub->add_option("--max-size", cfg.max_size, "Largest admissible submodel size M")->capture_default_str();
  sub->add_option("--seed", cfg.seed, "Accepted for symmetry; fitting draws no random numbers");
  sub->add_option("--threads", cfg.threads, "Worker threads for subset search");
  sub->add_option("--tol", cfg.tol, "Group lasso convergence tolerance")->capture_default_str();
  sub->add_option("--max-sweeps", cfg.max_sweeps, "Group lasso sweep limit")->capture_default_str();
  sub->add_flag("--refuse-nonconvergence", cfg.refuse_nonconvergence,
                "Exit 4 when the group lasso solver does not converge");
  sub->add_flag("-v,--verbose", cfg.verbose, "Print the resolved settings");
}

std::vector<CLI::Option*> add_lambda(CLI::App* sub, CliConfig& cfg) {
  return {
      sub->add_option("--lambda-count", cfg.lambda_count, "Grid size")->capture_default_str(),
      sub->add_option("--lambda-min-ratio", cfg.lambda_min_ratio, "Smallest lambda / lambda_max")
          ->capture_default_str(),
      sub->add_option("--lambda-stop-above", cfg.lambda_stop_above,
                      "Truncate the path once more than this many components are active (0: never)")
          ->capture_default_str(),
  };
}

int dispatch(CLI::App& app, CLI::App* fit, CLI::App* path, CLI::App* simulate, CLI::App* basis,
             const std::vector<CLI::Option*>& fit_lambda, const CliConfig& cfg, std::ostream& out,
             std::ostream& err) {
  if (cfg.verbose) {
    err << "out-dir " << cfg.out_dir.string() << ", order " << cfg.order << ", spline-k "
        << cfg.spline_k << ", penalty " << cfg.penalty << ", M " << cfg.max_size << "\n";
  }
  if (fit->parsed()) {
    const bool penalized = cfg.method == "penalized";
    for (const auto* opt : fit_lambda) {
      if (opt->count() > 0 && !penalized) {
        throw InputError(opt->get_name(), opt->get_name() + " applies only with --method penalized");
      }
    }
    return cmd_fit(cfg, out);
  }
  if (path->parsed()) return cmd_path(cfg, out);
  if (simulate->parsed()) return cmd_simulate(cfg, out);
  if (basis->parsed()) return cmd_basis(cfg, out);
  err << app.help();
  return kBadInput;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  CLI::App app{"Component selection for sparse additive models", "addsel"};
  app.require_subcommand(1);

  auto* fit = app.add_subcommand("fit", "Select components and fit the chosen submodel");
  add_data(fit, cfg);
  add_spline(fit, cfg, true);
  add_out_dir(fit, cfg);
  fit->add_option("--method", cfg.method, "exhaustive, greedy, screen or penalized")->capture_default_str();
  fit->add_option("--budget", cfg.budget, "Exhaustive search evaluation budget")->capture_default_str();
  fit->add_option("--screen-keep", cfg.screen_keep, "Components kept by screening (0: automatic)")
      ->capture_default_str();
  const auto fit_lambda = add_lambda(fit, cfg);

  auto* path = app.add_subcommand("path", "Adaptive group lasso path with BIC(lambda) per entry");
  add_data(path, cfg);
  add_spline(path, cfg, true);
  add_out_dir(path, cfg);
  add_lambda(path, cfg);

  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo selection experiment");
  simulate->add_option("--config", cfg.config, "Experiment config file")->required();
  simulate->add_option("--seed", cfg.seed, "Override the config seed");
  simulate->add_option("--threads", cfg.threads, "Override the config thread count");
  add_out_dir(simulate, cfg);

  auto* basis = app.add_subcommand("basis", "Dump the raw B-spline basis on a 201-point grid");
  add_spline(basis, cfg, false);
  add_out_dir(basis, cfg);

  auto* generate = app.add_subcommand("generate", "Write one simulated dataset as CSV");
  generate->add_option("--config", cfg.config, "Experiment config file")->required();
  generate->add_option("--seed", cfg.seed, "Override the config seed");
  generate->add_option("--rep", cfg.rep, "Replication index")->capture_default_str();
  add_out_dir(generate, cfg);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "addsel: " << e.what() << "\n";
    return kBadInput;
  }

  try {
    if (generate->parsed()) return cmd_generate(cfg, out);
    return dispatch(app, fit, path, simulate, basis, fit_lambda, cfg, out, err);
  } catch (const BudgetExceeded& e) {
    err << "addsel: " << e.what() << "\n";
    return kBudgetExceeded;
  } catch (const NotConverged& e) {
    err << "addsel: " << e.what() << "\n";
    return kNotConverged;
  } catch (const InputError& e) {
    err << "addsel: " << e.what() << "\n";
    return kBadInput;
  } catch (const InvalidParameters& e) {
    err << "addsel: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    err << "addsel: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace addsel::cli
