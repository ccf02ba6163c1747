#ifndef STRATAGEM_MACHINE_HPP
#define STRATAGEM_MACHINE_HPP

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stratagem/system.hpp"

namespace stratagem {

// A configuration: a finite string over Basic-Terms and naturals, driven by
// the rewriting rules
//   H1: h C w |- h v        when respond(head C, w) is a value v
//   H2: h C w |- h C w C'   when respond(head C, w) is a query B, with
//                           C' = B{D1..Dn} for C = m D1..Dn
//   H3: v h C |- h v        when C is headed by a variable
// plus the nondeterministic extension: a Hash reply appends an Oracle
// answer r to the pending task's prompt.
using ConfigItem = std::variant<Nat, Term>;
using Configuration = std::vector<ConfigItem>;

std::string configuration_to_string(const Configuration& config);

enum class StepRule { H1, H2, H3, Hash, None };

// Search budget for evaluation. fuel counts H1-H3 applications per branch;
// hash answers are drawn from 0..hash_bound-1, at most hash_depth of them
// per branch. The whole nondeterministic search is additionally capped at
// fuel * max(1, hash_depth) steps.
struct SearchBudget {
  Nat fuel = 100000;
  Nat hash_bound = 8;
  Nat hash_depth = 16;
};

enum class OutcomeKind {
  Result,          // case 1: u(A y) |- v with u exhausted
  VariableQuery,   // case 2: u(A y) |- (A y) h C, C variable-headed
  DeadEnd,         // case 3: no rule applies / respond is Bottom
  PrefixResult,    // case 3: u'(A y) |- v for a proper prefix u' of u
  FuelExhausted,   // budget ran out before any of the above
  RuntimeInconsistency,  // two hash branches produced distinct results
};

std::string to_string(OutcomeKind kind);

struct EvalOutcome {
  OutcomeKind kind = OutcomeKind::DeadEnd;
  Nat value = 0;                     // Result / PrefixResult
  std::optional<Term> query;        // VariableQuery: the variable-headed task
  Configuration residue;            // VariableQuery: the final configuration
  Prompt hash_script;               // hash answers used on the winning branch
  Nat steps = 0;                    // machine steps on the winning branch
  Nat total_steps = 0;              // over the whole search
  Nat branches = 1;                 // branches explored
  bool saw_fuel_exhaustion = false; // some branch ran out of fuel
  // RuntimeInconsistency: the two conflicting branches.
  Prompt conflict_script_a, conflict_script_b;
  Nat conflict_value_a = 0, conflict_value_b = 0;

  bool is_result() const { return kind == OutcomeKind::Result; }
};

using TraceSink = std::function<void(size_t step, StepRule rule, const Configuration&)>;

// One H1/H2/H3 application. Returns the applied rule, None when terminal.
// Hash replies are reported as StepRule::Hash without changing the
// configuration; eval supplies the oracle answer.
StepRule step(const System& system, Configuration& config);

// Runs the machine on the initial configuration u(A y-bar) where y-bar is
// the canonical variable list of A's type. For closed ground A and empty u
// this is the task "A = ?".
EvalOutcome run_configuration(const System& system, PromptView u, const Term& seed,
                              const SearchBudget& budget,
                              const TraceSink& trace = nullptr);

// Evaluation of a closed ground task.
EvalOutcome eval_ground(const System& system, const Term& task,
                        const SearchBudget& budget = {},
                        const TraceSink& trace = nullptr);

// Deterministic run with a fixed hash-answer script (no search). An
// unexpected extra Hash state beyond the script ends the run as
// FuelExhausted with saw_fuel_exhaustion set.
EvalOutcome run_scripted(const System& system, PromptView u, const Term& seed,
                         const SearchBudget& budget, PromptView script,
                         const TraceSink& trace = nullptr);

// Derived-strategy names [[A]] for closed terms A.
std::string derived_name(const Term& closed_term);
bool is_derived_name(const std::string& name);

// The system (M-hat, M-hat-script): every closed term A over `base` gains a
// strategy [[A]] whose response function is the machine outcome on
// u(A y-bar): Value on case 1, Query delta(C) on case 2, Bottom otherwise.
// Responses are memoized per prompt. The namespace resolves [[...]] names
// (recursively) on top of base's own names.
System derived_system(System base, const SearchBudget& budget = {});

// Registers A and returns (system containing [[A]], its name).
std::pair<System, std::string> derived_strategy(const System& base, const Term& closed_term,
                                                const SearchBudget& budget = {});

// Associativity probe (the regrouping law): evaluates A and the term
// obtained by replacing the selected variable-free subterms of A with their
// derived strategies, and compares outcome kind and value.
// `grouping` selects subterm positions by preorder index (0 = whole term).
bool assoc_probe(const System& system, const Term& task,
                 const std::vector<size_t>& grouping, const SearchBudget& budget = {});

// Regrouped term: wraps the selected preorder subterm positions of `task`
// into derived-strategy leaves (used by assoc_probe and tests).
Term regroup(const Term& task, const std::vector<size_t>& grouping);

// Number of subterm positions (preorder) in a term.
size_t subterm_count(const Term& term);

}  // namespace stratagem

#endif
