#ifndef STRATAGEM_EQUIVALENCE_HPP
#define STRATAGEM_EQUIVALENCE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stratagem/machine.hpp"
#include "stratagem/system.hpp"

namespace stratagem {

// Ground preorder on evaluation outcomes: a is below b iff a is not a
// Result, or both are Results with equal value. FuelExhausted counts as
// undefined; callers record the soundness caveat.
bool ground_leq(const EvalOutcome& a, const EvalOutcome& b);

struct ArgumentBounds {
  int max_rank = 0;
  size_t max_entries = 2;
  Nat max_value = 1;
};

// One enumerated argument strategy (a tiny finitary system with one root).
struct EnumeratedStrategy {
  TableStrategy strategy;
  std::string describe() const;
};

// Deterministic, duplicate-free enumeration of all well-formed finitary
// tables of the given type within bounds, ordered by table size then
// structure. Rank 0 queries use only the canonical variables; rank >= 1 also
// allows ground numeral arguments (values <= max_value).
std::vector<EnumeratedStrategy> enumerate_strategies(const Type& type,
                                                     const ArgumentBounds& bounds);

// All argument tuples for the given types, ordered by total size.
std::vector<std::vector<EnumeratedStrategy>> enumerate_arguments(
    const std::vector<Type>& types, const ArgumentBounds& bounds);

struct RefutationVerdict {
  bool refuted = false;
  // Refuted: the witness tuple and both outcomes.
  std::vector<std::pair<std::string, TableStrategy>> witness_args;
  EvalOutcome left, right;
  std::string left_task, right_task;  // printed closed terms
  bool fuel_caveat = false;  // a FuelExhausted outcome contributed
  // NotRefuted: the enumeration bounds and how many tuples were checked.
  ArgumentBounds bounds;
  size_t samples = 0;
  size_t inconclusive = 0;  // tuples skipped because the left side ran out of fuel
};

std::string to_string(const RefutationVerdict& v);

// Semi-decision of p below q at the same type: searches the enumerated
// argument tuples for one where p's application yields a Result and q's
// yields a different Result, a dead end, or fuel exhaustion (flagged).
// A left-side FuelExhausted makes the tuple inconclusive, never a witness.
RefutationVerdict refute_preorder(const System& system, const std::string& p,
                                  const std::string& q, const ArgumentBounds& bounds,
                                  const SearchBudget& budget = {});

// Re-evaluates a Refuted witness; true when it still refutes.
bool replay_witness(const System& system, const std::string& p, const std::string& q,
                    const RefutationVerdict& verdict, const SearchBudget& budget = {});

// Serialization of a witness as a strategy file plus task terms.
std::string witness_to_text(const std::string& p, const std::string& q,
                            const RefutationVerdict& verdict);

struct ContextProbeReport {
  RefutationVerdict direct;
  bool observer_refuted = false;
  std::string observer_description;
  bool agree = false;  // the two formulations reached the same verdict
  size_t observers_tried = 0;
};

// Cross-checks direct refutation of q below q' against refutation through
// enumerated observer strategies p : alpha -> nat applied as p q vs p q'
// (the context-lemma formulation). The observer pool includes the
// separating shape  p x = if x a1..an = v then c else bottom  for every
// enumerated tuple and v, c <= max_value.
ContextProbeReport context_probe(const System& system, const std::string& q,
                                 const std::string& q2, size_t max_observers,
                                 const ArgumentBounds& bounds,
                                 const SearchBudget& budget = {});

}  // namespace stratagem

#endif
