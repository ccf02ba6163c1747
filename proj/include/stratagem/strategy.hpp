#ifndef STRATAGEM_STRATEGY_HPP
#define STRATAGEM_STRATEGY_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stratagem/system.hpp"

namespace stratagem {

// A well-formedness violation, as data.
struct Violation {
  enum class Kind { Prefix, SelfConsistency, BadQueryVariable, HashInSequential };
  Kind kind;
  std::string strategy;
  Prompt prompt;
  std::string detail;
};

std::string to_string(const Violation& v);

// Checks the two §-style conditions on response functions:
//  - prefix: a defined reply after w forces respond(m, w) to be a query;
//  - self-consistency: respond is defined only on histories that never
//    answer the same query differently.
// Also checks that query replies use only the canonical variables and that
// Hash appears only in nondeterministic systems. Finite tables are scanned
// exhaustively; programmatic strategies are probed on all prompts with
// values <= prompt_bound and length <= prompt_bound.
std::vector<Violation> well_formed(const System& system, Nat prompt_bound = 3);
std::vector<Violation> well_formed_strategy(const System& system,
                                            const std::string& name,
                                            Nat prompt_bound = 3);

// Witting consistency of a finite table: on every pair of prompts that never
// answer a shared query differently (# positions are unconstrained), two
// defined Values must agree.
struct ConsistencyReport {
  bool consistent = true;
  // Witness when inconsistent.
  std::string strategy;
  Prompt first, second;
  Nat first_value = 0, second_value = 0;
};

ConsistencyReport check_wittingly_consistent(const System& system);
ConsistencyReport check_wittingly_consistent(const System& system,
                                             const std::string& name);

// Canonical form: every query is a head variable applied to arguments that
// are each exactly a strategy name applied to the full canonical list
// x1...xn in order. Finite tables are checked exhaustively; programmatic
// strategies are probed within prompt_bound.
bool is_canonical(const System& system, const std::string& name,
                  Nat prompt_bound = 3);

// Rewrites a strategy into canonical form: behaviour is routed through the
// machine's derived strategy (whose queries are variable-headed) and each
// query argument D{x} is bracket-abstracted into a closed combinator child
// applied to the full canonical list. Returns the containing system and the
// new name; returns the input unchanged when already canonical.
std::pair<System, std::string> canonicalize(const System& system,
                                            const std::string& name);

// phi-image of a finite system under a type-preserving name map. Throws
// TypeMismatch if phi changes a type, NotAHomomorphism if two merged
// strategies disagree on a prompt.
System apply_homomorphism(const std::map<std::string, std::string>& phi,
                          const System& system);

// Pointwise homomorphism law check on given probes:
//   respond'(phi(m), w) == respond(m, w)^phi.
bool check_homomorphism(
    const std::function<std::string(const std::string&)>& phi,
    const System& source, const System& image,
    const std::vector<std::pair<std::string, Prompt>>& probes);

}  // namespace stratagem

#endif
