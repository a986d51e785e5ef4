#include "addsel/pipeline.hpp"

#include <string>

#include "addsel/error.hpp"

namespace addsel {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Exhaustive: return "exhaustive";
    case Method::Greedy: return "greedy";
    case Method::ScreenExhaustive: return "screen+exhaustive";
    case Method::Penalized: return "penalized";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "exhaustive") return Method::Exhaustive;
  if (name == "greedy") return Method::Greedy;
  if (name == "screen+exhaustive" || name == "screen") return Method::ScreenExhaustive;
  if (name == "penalized") return Method::Penalized;
  throw InvalidParameters("unknown selection method '" + std::string(name) + "'");
}

SelectionOutcome select_model(const DesignMatrix& design, const Vector& y, Method method,
                              const PenaltySpec& penalty, const SelectionOptions& options) {
  SelectionOutcome out;
  out.method = method;
  if (method == Method::Penalized) {
    auto result = adaptive_group_lasso(design, y, penalty, options.max_size, options.path);
    out.selected = result.selected;
    out.coefficients = result.coefficients;
    out.record = result.selection.record;
    out.evaluations = result.initial_path.size() + result.adaptive_path.size();
    out.converged = result.initial_path.all_converged() && result.adaptive_path.all_converged();
    out.penalized = std::move(result);
    return out;
  }

  SearchResult search;
  switch (method) {
    case Method::Exhaustive:
      search = exhaustive_select(design, y, options.max_size, penalty, options.search);
      break;
    case Method::Greedy:
      search = greedy_forward_select(design, y, options.max_size, penalty, options.search);
      break;
    default:
      search = screen_then_exhaustive(design, y, options.max_size, penalty, options.search);
      break;
  }
  out.selected = search.selected;
  out.record = search.best;
  out.evaluations = search.evaluations;
  out.coefficients = expand_to_full(design, fit_submodel(design, y, search.selected));
  return out;
}

}  // namespace addsel
