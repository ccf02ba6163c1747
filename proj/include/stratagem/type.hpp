#ifndef STRATAGEM_TYPE_HPP
#define STRATAGEM_TYPE_HPP

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stratagem {

// Simple types over the single ground type. A type is either Ground or an
// arrow; level and arity are precomputed on construction.
class Type {
 public:
  Type();  // Ground
  static Type ground();
  static Type arrow(Type argument, Type result);
  // Uncurried constructor: (args...) -> result.
  static Type function(std::span<const Type> arguments, Type result);

  bool is_ground() const;
  const Type& argument() const;  // requires arrow
  const Type& result() const;    // requires arrow

  // level(Ground) = 0; level(a1,...,an -> Ground) = max(1 + level(ai)).
  int level() const;
  // Number of arguments to reach Ground.
  int arity() const;
  // Uncurried argument list a1..an.
  std::vector<Type> argument_list() const;

  bool operator==(const Type& other) const;
  bool operator!=(const Type& other) const { return !(*this == other); }
  // Total order for use as map keys; ground < arrows, then lexicographic.
  bool operator<(const Type& other) const;

  // Textual syntax: `nat` and `(T1,...,Tn)->T`; `->` is right-associative,
  // so nat->nat->nat parses as (nat,nat)->nat.
  std::string to_string() const;
  static Type parse(std::string_view text);

  size_t hash() const;

 private:
  struct Node;
  explicit Type(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;  // null means Ground
};

}  // namespace stratagem

#endif
