#include "addsel/subset_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "addsel/error.hpp"
#include "addsel/parallel.hpp"

namespace addsel {

std::string_view to_string(SearchStrategy s) {
  switch (s) {
    case SearchStrategy::Exhaustive: return "exhaustive";
    case SearchStrategy::Greedy: return "greedy";
    case SearchStrategy::ScreenExhaustive: return "screen+exhaustive";
  }
  return "unknown";
}

std::size_t submodel_count(int p, int max_size) {
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  std::size_t total = 0;
  std::size_t term = 1;  // C(p, j)
  for (int j = 0; j <= std::min(max_size, p); ++j) {
    if (j > 0) {
      // term * (p - j + 1) / j is exact in integers since C(p, j-1)(p-j+1) = j C(p, j).
      const auto mul = static_cast<std::size_t>(p - j + 1);
      if (term > kMax / mul) return kMax;
      term = term * mul / static_cast<std::size_t>(j);
    }
    if (total > kMax - term) return kMax;
    total += term;
  }
  return total;
}

bool better_record(const BICRecord& a, const BICRecord& b) {
  if (a.criterion != b.criterion) return a.criterion < b.criterion;
  const auto* sa = std::get_if<Submodel>(&a.label);
  const auto* sb = std::get_if<Submodel>(&b.label);
  if (sa && sb) return *sa < *sb;
  return a.size < b.size;
}

namespace {

int clamp_max_size(int max_size, int p) {
  if (max_size < 0) throw InvalidParameters("maximum submodel size M must be >= 0");
  return std::min(max_size, p);
}

// Lexicographic k-subsets of `pool`, k = 0..max_size.
std::vector<Submodel> enumerate_submodels(const std::vector<int>& pool, int max_size) {
  std::vector<Submodel> out;
  const int m = static_cast<int>(pool.size());
  std::vector<int> pos;
  for (int k = 0; k <= max_size; ++k) {
    pos.resize(static_cast<std::size_t>(k));
    std::iota(pos.begin(), pos.end(), 0);
    while (true) {
      std::vector<int> idx(pos.size());
      for (std::size_t t = 0; t < pos.size(); ++t) idx[t] = pool[static_cast<std::size_t>(pos[t])];
      out.emplace_back(std::move(idx));
      int t = k - 1;
      while (t >= 0 && pos[static_cast<std::size_t>(t)] == m - k + t) --t;
      if (t < 0) break;
      ++pos[static_cast<std::size_t>(t)];
      for (int u = t + 1; u < k; ++u) {
        pos[static_cast<std::size_t>(u)] = pos[static_cast<std::size_t>(u - 1)] + 1;
      }
    }
  }
  return out;
}

const BICRecord& pick_best(const std::vector<BICRecord>& records) {
  const BICRecord* best = &records.front();
  for (const auto& rec : records) {
    if (better_record(rec, *best)) best = &rec;
  }
  return *best;
}

}  // namespace

SearchResult exhaustive_select_among(const DesignMatrix& design, const Vector& y,
                                     const std::vector<int>& candidates, int max_size,
                                     const PenaltySpec& spec, const SearchOptions& options) {
  Submodel pool(candidates);
  pool.check_range(design.p());
  const int m = static_cast<int>(pool.size());
  const int limit = clamp_max_size(max_size, m);
  const std::size_t required = submodel_count(m, limit);
  if (required > options.budget) throw BudgetExceeded(required, options.budget);

  const auto submodels = enumerate_submodels(pool.indices(), limit);
  std::vector<BICRecord> records(submodels.size());
  parallel_for(submodels.size(), options.threads, [&](std::size_t i) {
    records[i] = bic_submodel(design, y, submodels[i], spec);
  });

  SearchResult result;
  result.best = pick_best(records);
  result.selected = std::get<Submodel>(result.best.label);
  result.records = std::move(records);
  result.strategy = SearchStrategy::Exhaustive;
  result.evaluations = submodels.size();
  return result;
}

SearchResult exhaustive_select(const DesignMatrix& design, const Vector& y, int max_size,
                               const PenaltySpec& spec, const SearchOptions& options) {
  return exhaustive_select_among(design, y, Submodel::full(design.p()).indices(), max_size, spec,
                                 options);
}

SearchResult greedy_forward_select(const DesignMatrix& design, const Vector& y, int max_size,
                                   const PenaltySpec& spec, const SearchOptions& options) {
  const int limit = clamp_max_size(max_size, design.p());
  SearchResult result;
  result.strategy = SearchStrategy::Greedy;
  result.records.push_back(bic_submodel(design, y, Submodel{}, spec));
  BICRecord current = result.records.back();

  while (static_cast<int>(std::get<Submodel>(current.label).size()) < limit) {
    const auto& S = std::get<Submodel>(current.label);
    std::vector<int> pool;
    for (int j = 0; j < design.p(); ++j) {
      if (!S.contains(j)) pool.push_back(j);
    }
    std::vector<BICRecord> step(pool.size());
    parallel_for(pool.size(), options.threads, [&](std::size_t i) {
      step[i] = bic_submodel(design, y, S.with(pool[i]), spec);
    });
    const BICRecord candidate = pick_best(step);
    result.records.insert(result.records.end(), step.begin(), step.end());
    if (!(candidate.criterion < current.criterion)) break;
    current = candidate;
  }

  result.best = current;
  result.selected = std::get<Submodel>(current.label);
  result.evaluations = result.records.size();
  return result;
}

int default_screen_keep(std::size_t n, int p) {
  const double nd = static_cast<double>(n);
  const int budget = static_cast<int>(std::ceil(nd / std::log(nd)));
  return std::max(1, std::min(p, budget));
}

ScreeningResult screen_components(const DesignMatrix& design, const Vector& y, int keep) {
  const int p = design.p();
  if (keep < 1 || keep > p) {
    throw InvalidParameters("screening keep count must be in [1, p], got " + std::to_string(keep));
  }
  const double base_rss = fit_submodel(design, y, Submodel{}).rss;
  std::vector<double> reduction(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    reduction[static_cast<std::size_t>(j)] = base_rss - fit_submodel(design, y, Submodel{j}).rss;
  }
  std::vector<int> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return reduction[static_cast<std::size_t>(a)] > reduction[static_cast<std::size_t>(b)];
  });
  ScreeningResult out;
  for (int r = 0; r < keep; ++r) {
    const int j = order[static_cast<std::size_t>(r)];
    out.ranked.push_back(j);
    out.reductions.push_back(reduction[static_cast<std::size_t>(j)]);
  }
  return out;
}

ScreeningResult screen_components(const Matrix& unit_covariates, const Vector& y,
                                  const SplineSpec& spec, int keep) {
  return screen_components(build_design(unit_covariates, spec), y, keep);
}

SearchResult screen_then_exhaustive(const DesignMatrix& design, const Vector& y, int max_size,
                                    const PenaltySpec& spec, const SearchOptions& options) {
  const int keep = options.screen_keep > 0 ? std::min(options.screen_keep, design.p())
                                           : default_screen_keep(design.n(), design.p());
  const auto screened = screen_components(design, y, keep);
  auto result = exhaustive_select_among(design, y, screened.ranked, max_size, spec, options);
  result.strategy = SearchStrategy::ScreenExhaustive;
  result.evaluations += static_cast<std::size_t>(design.p()) + 1;
  return result;
}

}  // namespace addsel
