#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace addsel {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on a numeric or structural parameter failed.
class InvalidParameters : public Error {
 public:
  using Error::Error;
};

/// An evaluation point fell outside the supported domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Malformed input data or configuration. `key()` names the offending
/// column or config key when one is known.
class InputError : public Error {
 public:
  InputError(std::string key, const std::string& what)
      : Error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Exhaustive search would evaluate more submodels than the budget allows.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::size_t required, std::size_t budget);
  std::size_t required() const noexcept { return required_; }
  std::size_t budget() const noexcept { return budget_; }

 private:
  std::size_t required_;
  std::size_t budget_;
};

/// Every entry of a penalized path exceeds the submodel-size bound M.
class NoAdmissibleEntry : public Error {
 public:
  using Error::Error;
};

/// The penalized solver hit its sweep limit and the caller asked to refuse
/// unconverged fits.
class NotConverged : public Error {
 public:
  using Error::Error;
};

}  // namespace addsel
