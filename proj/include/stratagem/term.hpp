#ifndef STRATAGEM_TERM_HPP
#define STRATAGEM_TERM_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stratagem/type.hpp"

namespace stratagem {

// Applicative terms over strategy names, canonical variables and hole
// placeholders. Immutable values with structural equality. Leaves:
//   Name(name, type)   -- a strategy constant
//   Var(index >= 1)    -- the i-th canonical variable of the enclosing
//                         strategy's type; the type is carried on the leaf
//   Hole(type)         -- the erased-strategy placeholder
// plus application nodes. Every node is well-typed by construction.
class Term {
 public:
  enum class Kind { Name, Var, Hole, App };

  static Term name(std::string name, Type type);
  static Term var(int index, Type type);
  static Term hole(Type type);
  static Term app(Term fun, Term arg);  // throws TypeMismatch if ill-typed
  static Term apply_all(Term fun, std::span<const Term> args);

  Kind kind() const;
  const Type& type() const;

  const std::string& name_text() const;  // Name leaves
  int var_index() const;                 // Var leaves
  Term fun() const;                      // App nodes
  Term arg() const;                      // App nodes

  // Spine view: head leaf and the argument list, outermost application last.
  Term head() const;
  std::vector<Term> spine_args() const;

  bool is_leaf() const { return kind() != Kind::App; }
  bool contains_var() const;
  bool contains_hole() const;
  bool is_closed() const { return !contains_var(); }

  bool operator==(const Term& other) const;
  bool operator!=(const Term& other) const { return !(*this == other); }
  bool operator<(const Term& other) const;  // structural order

  // Number of leaves (term size, used by enumeration orders).
  int size() const;

  std::string to_string() const;

  // Strategy names: `m`, `K{nat,nat}`; variables `$1 $2 ...`; application by
  // juxtaposition; parentheses for grouping. Leaf types are resolved by
  // `name_type` for names and `var_type` for variable indices.
  static Term parse(std::string_view text,
                    const std::function<Type(const std::string&)>& name_type,
                    const std::function<Type(int)>& var_type);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// The canonical variable list x1:a1, ..., xn:an for a type a1,...,an->Ground.
std::vector<std::pair<int, Type>> canonical_variables(const Type& t);

// A term `m x1 ... xn` applying a strategy leaf to its canonical variables.
Term full_application(const std::string& name, const Type& type);

// mu_j: the j-th (1-based) strategy-name occurrence in left-to-right
// preorder, or nullopt when fewer than j occurrences exist. For hole terms,
// occurrences of holes are counted instead (the Appendix's dual reading).
std::optional<Term> occurrence(const Term& term, int j);

// All strategy-name occurrences in preorder.
std::vector<Term> occurrences(const Term& term);

// All hole occurrences in preorder (the dual count used for hole terms).
std::vector<Term> hole_occurrences(const Term& term);

// Box_M: replace every strategy-name leaf by a hole of the same type.
Term erase_names(const Term& term);

// Replace the j-th hole (preorder) by leaves[j-1]; inverse of erase_names.
Term substitute_holes(const Term& term, std::span<const Term> leaves);

// Substitute canonical variables: var $i becomes args[i-1]. Used by the
// machine's rule H2. Variables with index > args.size() are an error.
Term substitute_vars(const Term& term, std::span<const Term> args);

// delta: wrap every maximal variable-free subterm B into a single derived
// strategy leaf whose name is wrap(B) and whose type is B's type. Variables
// and the application skeleton above them are preserved.
Term splice(const Term& term,
            const std::function<std::string(const Term&)>& wrap);

}  // namespace stratagem

#endif
