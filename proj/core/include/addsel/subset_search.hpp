#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "addsel/criterion.hpp"

namespace addsel {

enum class SearchStrategy { Exhaustive, Greedy, ScreenExhaustive };

std::string_view to_string(SearchStrategy s);

struct SearchOptions {
  std::size_t budget = 2'000'000;
  unsigned threads = 1;
  /// Components kept by screening; 0 means min(p, ceil(n / log n)).
  int screen_keep = 0;
};

struct SearchResult {
  Submodel selected;
  BICRecord best;
  std::vector<BICRecord> records;
  SearchStrategy strategy = SearchStrategy::Exhaustive;
  std::size_t evaluations = 0;
};

/// sum_{j=0}^{M} C(p, j), saturating at SIZE_MAX.
std::size_t submodel_count(int p, int max_size);

/// True when `a` beats `b`: lower criterion, then smaller |S|, then
/// lexicographically smaller indices.
bool better_record(const BICRecord& a, const BICRecord& b);

/// Evaluates every submodel of size <= M. Throws BudgetExceeded when the
/// count exceeds options.budget.
SearchResult exhaustive_select(const DesignMatrix& design, const Vector& y, int max_size,
                               const PenaltySpec& spec, const SearchOptions& options = {});

/// Exhaustive search restricted to submodels drawn from `candidates`. The
/// penalty still uses the full p of the design.
SearchResult exhaustive_select_among(const DesignMatrix& design, const Vector& y,
                                     const std::vector<int>& candidates, int max_size,
                                     const PenaltySpec& spec, const SearchOptions& options = {});

/// Forward selection from the empty model; stops when no single addition
/// lowers the criterion or M components are in.
SearchResult greedy_forward_select(const DesignMatrix& design, const Vector& y, int max_size,
                                   const PenaltySpec& spec, const SearchOptions& options = {});

struct ScreeningResult {
  std::vector<int> ranked;         // top m components, best first
  std::vector<double> reductions;  // rss(intercept) - rss({j}), aligned with ranked
};

int default_screen_keep(std::size_t n, int p);

/// Marginal spline fits; ranks components by RSS reduction over the
/// intercept-only fit (ties by lower index).
ScreeningResult screen_components(const DesignMatrix& design, const Vector& y, int keep);
ScreeningResult screen_components(const Matrix& unit_covariates, const Vector& y,
                                  const SplineSpec& spec, int keep);

/// Screening to options.screen_keep components, then exhaustive search.
SearchResult screen_then_exhaustive(const DesignMatrix& design, const Vector& y, int max_size,
                                    const PenaltySpec& spec, const SearchOptions& options = {});

}  // namespace addsel
