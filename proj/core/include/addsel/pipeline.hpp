#pragma once

#include <optional>
#include <string_view>

#include "addsel/group_lasso.hpp"
#include "addsel/subset_search.hpp"

namespace addsel {

enum class Method { Exhaustive, Greedy, ScreenExhaustive, Penalized };

std::string_view to_string(Method m);
/// `exhaustive`, `greedy`, `screen+exhaustive` (or `screen`), `penalized`.
Method parse_method(std::string_view name);

struct SelectionOptions {
  int max_size = 10;
  SearchOptions search;
  PathOptions path;
};

/// Result of one model-selection run, whatever the method.
struct SelectionOutcome {
  Method method = Method::Exhaustive;
  Submodel selected;
  Vector coefficients;  // full layout; least-squares refit or penalized fit
  BICRecord record;
  std::size_t evaluations = 0;
  bool converged = true;
  /// Filled for Method::Penalized only.
  std::optional<AdaptiveResult> penalized;
};

SelectionOutcome select_model(const DesignMatrix& design, const Vector& y, Method method,
                              const PenaltySpec& penalty, const SelectionOptions& options);

}  // namespace addsel
