#include "addsel/error.hpp"

namespace addsel {

BudgetExceeded::BudgetExceeded(std::size_t required, std::size_t budget)
    : Error("exhaustive search needs " + std::to_string(required) +
            " submodel evaluations, budget is " + std::to_string(budget)),
      required_(required),
      budget_(budget) {}

}  // namespace addsel
