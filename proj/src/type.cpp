#include "stratagem/type.hpp"

#include <algorithm>
#include <cctype>

#include "stratagem/error.hpp"

namespace stratagem {

struct Type::Node {
  Type argument;
  Type result;
  int level = 0;
  int arity = 0;
};

Type::Type() : node_(nullptr) {}

Type Type::ground() { return Type(); }

Type Type::arrow(Type argument, Type result) {
  auto node = std::make_shared<Node>();
  node->level = std::max(1 + argument.level(), result.level());
  node->arity = 1 + result.arity();
  node->argument = std::move(argument);
  node->result = std::move(result);
  return Type(std::move(node));
}

Type Type::function(std::span<const Type> arguments, Type result) {
  Type t = std::move(result);
  for (auto it = arguments.rbegin(); it != arguments.rend(); ++it)
    t = arrow(*it, std::move(t));
  return t;
}

bool Type::is_ground() const { return node_ == nullptr; }

const Type& Type::argument() const { return node_->argument; }
const Type& Type::result() const { return node_->result; }

int Type::level() const { return node_ ? node_->level : 0; }
int Type::arity() const { return node_ ? node_->arity : 0; }

std::vector<Type> Type::argument_list() const {
  std::vector<Type> args;
  const Type* t = this;
  while (!t->is_ground()) {
    args.push_back(t->argument());
    t = &t->result();
  }
  return args;
}

bool Type::operator==(const Type& other) const {
  if (node_ == other.node_) return true;
  if (!node_ || !other.node_) return false;
  return node_->argument == other.node_->argument &&
         node_->result == other.node_->result;
}

bool Type::operator<(const Type& other) const {
  if (is_ground()) return !other.is_ground();
  if (other.is_ground()) return false;
  if (argument() < other.argument()) return true;
  if (other.argument() < argument()) return false;
  return result() < other.result();
}

size_t Type::hash() const {
  if (!node_) return 0x9e3779b97f4a7c15ull;
  size_t h = node_->argument.hash();
  h ^= node_->result.hash() + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

std::string Type::to_string() const {
  if (is_ground()) return "nat";
  std::string out = "(";
  auto args = argument_list();
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += args[i].to_string();
  }
  out += ")->nat";
  return out;
}

namespace {

// type := item ('->' type)?
// item := 'nat' | '(' type (',' type)* ')'
// A multi-item parenthesized list is only legal as an argument list, i.e.
// must be followed by ->.
struct TypeParser {
  std::string_view text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  bool eat_arrow() {
    skip_ws();
    if (pos + 1 < text.size() && text[pos] == '-' && text[pos + 1] == '>') {
      pos += 2;
      return true;
    }
    return false;
  }

  [[noreturn]] void error(const std::string& what) {
    fail(Errc::ParseError,
         "type syntax error at offset " + std::to_string(pos) + ": " + what +
             " in \"" + std::string(text) + "\"");
  }

  Type parse_type() {
    std::vector<Type> items = parse_item();
    if (eat_arrow()) {
      Type rest = parse_type();
      return Type::function(items, std::move(rest));
    }
    if (items.size() != 1) error("argument list must be followed by ->");
    return items[0];
  }

  std::vector<Type> parse_item() {
    skip_ws();
    if (eat('(')) {
      std::vector<Type> items;
      items.push_back(parse_type());
      while (eat(',')) items.push_back(parse_type());
      if (!eat(')')) error("expected )");
      return items;
    }
    skip_ws();
    if (text.substr(pos, 3) == "nat") {
      pos += 3;
      return {Type::ground()};
    }
    error("expected nat or (");
  }
};

}  // namespace

Type Type::parse(std::string_view text) {
  TypeParser p{text};
  Type t = p.parse_type();
  p.skip_ws();
  if (p.pos != text.size()) p.error("trailing characters");
  return t;
}

}  // namespace stratagem
