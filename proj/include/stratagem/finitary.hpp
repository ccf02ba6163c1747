#ifndef STRATAGEM_FINITARY_HPP
#define STRATAGEM_FINITARY_HPP

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stratagem/machine.hpp"
#include "stratagem/system.hpp"

namespace stratagem {

// Restriction of a finite system: keep only `keep` strategies and the
// entries passing `entry_filter` (null = keep all). Throws DanglingReference
// when a kept query mentions a dropped name.
System restrict_system(const System& system, const std::set<std::string>& keep,
                       const std::function<bool(const std::string&, PromptView)>&
                           entry_filter = nullptr);

// The k-restriction M^[k]: respond'(m, w) is defined iff w consists of
// numbers <= k and any Value reply is <= k; then it equals respond(m, w).
// Lazy wrapper over any system; tables are filtered on demand.
System k_restrict(const System& system, Nat k);

// Materializes a strategy's defined entries with prompt values <= value_bound
// and prompt length <= length_bound into a table. Throws BudgetExceeded when
// the sweep finds more than max_entries defined entries.
TableStrategy materialize_table(const System& system, const std::string& name,
                                Nat value_bound, size_t length_bound,
                                size_t max_entries = 100000);

// The projection strategy psi^[k] at type alpha->alpha, with its child
// projections for alpha's argument types. Finitary by construction.
std::pair<System, std::string> projection_strategy(const Type& alpha, Nat k);

// Ranked-pair names <m,n>, encoded m@n.
std::string ranked_name(const std::string& name, Nat rank);
// pi: <m,n> -> m.
std::string rank_project(const std::string& ranked);

// The lazy ranked system over names <m,n>: respond(<m,n>, w) renames every
// strategy in the reply to rank n+1. declared() lists the rank-0 layer.
System rank_transform(const System& system);

// Maximal descendant-chain length from `name` (finite tables only).
// Throws NotWellFounded on a reachable cycle, NotFinite on a programmatic
// descendant (numerals count as rank-0 constants).
int rank_of(const System& system, const std::string& name);

struct FinitaryCertificate {
  bool finitary = false;
  std::string reason;                 // when not finitary
  System subsystem;                   // the finite ranked restriction
  std::map<std::string, int> ranks;   // rank per descendant
};

// True iff respond has finite domain for `name` and all descendants and the
// descendant relation is well-founded; the certificate is the finite ranked
// subsystem.
FinitaryCertificate is_finitary(const System& system, const std::string& name);

struct TabulateResult {
  System system;            // finite tables for [[A]] and its descendants
  std::string root;         // [[A]]
  std::vector<Nat> vocabulary;
  Nat sentinel = 0;
};

// Materializes the derived strategy [[A]] of a closed term over a finitary
// system as a full finite table, exploring prompts over the system's
// vocabulary (all naturals in table keys, Value replies and numeral leaves)
// and verifying that one out-of-vocabulary sentinel dead-ends everywhere.
// Throws BudgetExceeded if the internal sanity fuel trips.
TabulateResult tabulate(const System& system, const Term& closed_term,
                        const SearchBudget& budget = {},
                        size_t max_prompts = 100000);

// Renames awkward machine-generated names (derived [[...]] forms) to plain
// identifiers d0, d1, ... for serialization. Returns the renamed system and
// the name map original -> exported.
std::pair<System, std::map<std::string, std::string>> rename_for_export(
    const System& system);

// The vocabulary used by tabulate.
std::vector<Nat> system_vocabulary(const System& system, const Term* task = nullptr);

// Runs the task to a Result and returns the finite restriction containing
// exactly the (strategy, history) entries consulted on the winning branch;
// replaying the task under the restriction reproduces the Result. Throws
// NoResult when the task does not produce a Result.
System extract_support(const System& system, const Term& task,
                       const SearchBudget& budget = {});

// Deterministic replay of a previously found hash script (no search).
EvalOutcome eval_with_script(const System& system, const Term& task,
                             const SearchBudget& budget, PromptView script);

}  // namespace stratagem

#endif
