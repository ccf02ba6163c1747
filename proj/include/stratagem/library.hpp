#ifndef STRATAGEM_LIBRARY_HPP
#define STRATAGEM_LIBRARY_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stratagem/system.hpp"

namespace stratagem {

enum class Lang { Pcf, PcfPlus };

// The builtin strategy namespace:
//   numerals            0, 1, 2, ...
//   if, succ, pred, eq  ground arithmetic (eq strict in both arguments)
//   S{a,b,c} K{a,b} I{a} Y{a} omega{a}   typed combinator instances
//   mu, exists_ws, exists_s, exists_sn   sequential quantifier strategies
//   fin_size, fin_arg, fin_val           strict-finite-function decoding
//   pif, por, bexists                    PCF+ only (wittingly consistent)
// The namespace is infinite (one instance per type); names are resolved on
// demand. PCF+ systems are flagged nondeterministic.
System builtin_system(Lang lang);

// Combinator instance names.
std::string combinator_s_name(const Type& a, const Type& b, const Type& c);
std::string combinator_k_name(const Type& a, const Type& b);
std::string combinator_i_name(const Type& a);
std::string fixpoint_name(const Type& a);
std::string omega_name(const Type& a);
std::string numeral_name(Nat v);

// Bracket abstraction over terms: the closed combinator C with
// C x1 ... xn = body, for body using canonical variables vars (in order).
// Uses the plain S/K/I scheme without the eta optimization.
Term bracket_abstract(std::span<const std::pair<int, Type>> vars, const Term& body);

// The finite fragment of pif with prompt values and results bounded by
// `bound` — exactly the bound-restriction of the builtin pif, materialized
// as a table (so it can be checked and serialized).
System make_pif_table(Nat bound);
// Same for por.
System make_por_table(Nat bound);

// --- Strict finite functions and their effective numbering ------------------

// [b0..bn-1 / a0..an-1]: the strict finite function mapping ai to bi and
// everything else to Bottom. Entries are kept sorted by argument.
struct StrictFiniteFunction {
  std::vector<std::pair<Nat, Nat>> entries;

  std::optional<Nat> apply(Nat x) const;
  bool operator==(const StrictFiniteFunction& other) const {
    return entries == other.entries;
  }
};

StrictFiniteFunction make_strict_finite(std::vector<std::pair<Nat, Nat>> entries);

// Two strict finite functions are consistent when no shared argument maps to
// different values (then their union exists).
bool consistent(const StrictFiniteFunction& f, const StrictFiniteFunction& g);
StrictFiniteFunction merge(const StrictFiniteFunction& f, const StrictFiniteFunction& g);

// Bijective numbering; n, ai, bi are recoverable from the code. The empty
// function is 0.
Nat encode_strict_finite(const StrictFiniteFunction& f);
StrictFiniteFunction decode_strict_finite(Nat code);

// A strict finite function as a level-1 strategy (finite table).
System strict_finite_strategy(const std::string& name, const StrictFiniteFunction& f);

// --- The strict level-2 universal construction (finite data) ----------------

// Longest prefix of (alpha, beta) whose union U_k [beta(k)/phi_alpha(k)]
// exists; unchanged when the unrestricted union exists.
std::pair<std::vector<Nat>, std::vector<Nat>> correct(std::vector<Nat> alpha,
                                                      std::vector<Nat> beta);

// The wittingly consistent strategy computing U_k [beta(k)/phi_alpha(k)] at
// type (nat->nat)->nat. Throws InconsistentTables when the union does not
// exist and correction is disabled.
std::pair<System, std::string> strict_universal(std::vector<Nat> alpha,
                                                std::vector<Nat> beta,
                                                bool apply_correction = false);

// --- The m-star transform ----------------------------------------------------

// A deterministic 1-1 enumeration of well-typed ground terms over a fixed
// vocabulary of names and canonical variables, ordered by size then
// structure. Grows lazily; index_of enumerates until it finds the term.
class TermEnumeration {
 public:
  TermEnumeration(std::vector<std::pair<std::string, Type>> names,
                  std::vector<std::pair<int, Type>> vars);
  Term at(size_t index);
  size_t index_of(const Term& term);

 private:
  void grow();
  std::vector<std::pair<std::string, Type>> names_;
  std::vector<std::pair<int, Type>> vars_;
  int next_size_ = 1;
  std::vector<std::vector<Term>> by_size_;  // all well-typed terms, per size
  std::vector<Term> ground_;                // the enumeration itself
  std::map<std::string, size_t> index_;     // printed term -> index
};

// m-star: behaves like m but asks "f(a) = ?" in place of its query A_ma,
// where a is the enumeration index of A_ma over the system's declared names.
// Returns the containing system and the new name (type (nat->nat)->nat).
std::pair<System, std::string> star_transform(const System& system,
                                              const std::string& name);

// The enumeration used by star_transform for a given strategy.
std::shared_ptr<TermEnumeration> star_enumeration(const System& system,
                                                  const std::string& name);

}  // namespace stratagem

#endif
