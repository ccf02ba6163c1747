#ifndef STRATAGEM_PCF_HPP
#define STRATAGEM_PCF_HPP

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "stratagem/library.hpp"
#include "stratagem/system.hpp"

namespace stratagem {
namespace pcf {

// PCF / PCF+ surface terms: variables, annotated lambdas `\x:T. e`,
// application by juxtaposition, constants by name, decimal numerals.
// pif/por/bexists are gated behind Lang::PcfPlus.
struct PcfTerm;
using PcfPtr = std::shared_ptr<const PcfTerm>;

struct PcfTerm {
  enum class Kind { Var, Lam, App, Const, Lit };
  Kind kind;
  std::string var;        // Var name / Lam parameter
  Type annot;             // Lam parameter annotation
  PcfPtr fun, arg;        // App; Lam stores its body in fun
  std::string constant;   // Const
  Nat lit = 0;            // Lit
  size_t offset = 0;      // source offset, for error positions

  static PcfPtr mkvar(std::string name, size_t at = 0);
  static PcfPtr lam(std::string name, Type annot, PcfPtr body, size_t at = 0);
  static PcfPtr app(PcfPtr fun, PcfPtr arg, size_t at = 0);
  static PcfPtr constant_(std::string name, size_t at = 0);
  static PcfPtr lit_(Nat v, size_t at = 0);
};

PcfPtr parse(std::string_view text);

std::string to_string(const PcfTerm& t);

// Principal simple type; constants are polymorphic schemes resolved
// per-occurrence. Throws IllTyped (with source offset) on failure,
// UnknownConstant for constants outside the language's set.
struct Typing {
  Type type;
  std::map<const PcfTerm*, Type> at;  // type of every subterm
};
Typing typecheck(const PcfPtr& term, Lang lang);

// Lambdas eliminated by bracket abstraction onto S/K/I instances; constants
// map to the builtin strategies; numerals to numeral strategies.
struct Compiled {
  Term term;      // closed applicative term over the builtin namespace
  Type type;
  System system;  // builtins plus derived strategies, ready to evaluate
  std::string root;  // the derived-strategy name of `term`
};
Compiled compile(const PcfPtr& term, Lang lang);

// Parses and compiles in one step.
Compiled compile_text(std::string_view text, Lang lang);

// One leftmost-outermost beta reduction, or null when none applies.
PcfPtr beta_reduce_once(const PcfPtr& term);

// The PCF+ consistency-check term #;  # c f is 1 when the c-th strict
// finite function is inconsistent with f, 0 when it approximates f, and
// undefined otherwise. Type (nat,(nat->nat))->nat.
PcfPtr hash_check_term();

}  // namespace pcf
}  // namespace stratagem

#endif
