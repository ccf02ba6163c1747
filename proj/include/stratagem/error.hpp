#ifndef STRATAGEM_ERROR_HPP
#define STRATAGEM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace stratagem {

enum class Errc {
  UnknownStrategy,
  UnknownConstant,
  TypeMismatch,
  IllTyped,
  NotFinite,
  DanglingReference,
  NotWellFounded,
  InconsistentTables,
  BudgetExceeded,
  NoResult,
  NotAHomomorphism,
  ParseError,
  UsageError,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace stratagem

#endif
