#include "stratagem/term.hpp"

#include <algorithm>
#include <cctype>

#include "stratagem/error.hpp"

namespace stratagem {

struct Term::Node {
  Kind kind;
  Type type;
  std::string name;                      // Name
  int var_index = 0;                     // Var
  std::shared_ptr<const Node> fun, arg;  // App
  bool has_var = false;
  bool has_hole = false;
  int size = 1;
};

Term Term::name(std::string name, Type type) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Name;
  n->type = std::move(type);
  n->name = std::move(name);
  return Term(std::move(n));
}

Term Term::var(int index, Type type) {
  if (index < 1) fail(Errc::IllTyped, "variable index must be >= 1");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->type = std::move(type);
  n->var_index = index;
  n->has_var = true;
  return Term(std::move(n));
}

Term Term::hole(Type type) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Hole;
  n->type = std::move(type);
  n->has_hole = true;
  return Term(std::move(n));
}

Term Term::app(Term fun, Term arg) {
  if (fun.type().is_ground())
    fail(Errc::TypeMismatch, "cannot apply ground-type term " + fun.to_string());
  if (fun.type().argument() != arg.type())
    fail(Errc::TypeMismatch, "operand type " + arg.type().to_string() +
                                 " does not match operator argument type " +
                                 fun.type().argument().to_string() + " in " +
                                 fun.to_string() + " @ " + arg.to_string());
  auto n = std::make_shared<Node>();
  n->kind = Kind::App;
  n->type = fun.type().result();
  n->has_var = fun.node_->has_var || arg.node_->has_var;
  n->has_hole = fun.node_->has_hole || arg.node_->has_hole;
  n->size = fun.node_->size + arg.node_->size;
  n->fun = std::move(fun.node_);
  n->arg = std::move(arg.node_);
  return Term(std::move(n));
}

Term Term::apply_all(Term fun, std::span<const Term> args) {
  Term t = std::move(fun);
  for (const Term& a : args) t = app(std::move(t), a);
  return t;
}

Term::Kind Term::kind() const { return node_->kind; }
const Type& Term::type() const { return node_->type; }
const std::string& Term::name_text() const { return node_->name; }
int Term::var_index() const { return node_->var_index; }
Term Term::fun() const { return Term(node_->fun); }
Term Term::arg() const { return Term(node_->arg); }

Term Term::head() const {
  std::shared_ptr<const Node> n = node_;
  while (n->kind == Kind::App) n = n->fun;
  return Term(std::move(n));
}

std::vector<Term> Term::spine_args() const {
  std::vector<Term> args;
  std::shared_ptr<const Node> n = node_;
  while (n->kind == Kind::App) {
    args.push_back(Term(n->arg));
    n = n->fun;
  }
  std::reverse(args.begin(), args.end());
  return args;
}

bool Term::contains_var() const { return node_->has_var; }
bool Term::contains_hole() const { return node_->has_hole; }
int Term::size() const { return node_->size; }

bool Term::operator==(const Term& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case Kind::Name:
      return node_->name == other.node_->name && type() == other.type();
    case Kind::Var:
      return node_->var_index == other.node_->var_index && type() == other.type();
    case Kind::Hole:
      return type() == other.type();
    case Kind::App:
      return fun() == other.fun() && arg() == other.arg();
  }
  return false;
}

bool Term::operator<(const Term& other) const {
  if (kind() != other.kind()) return kind() < other.kind();
  switch (kind()) {
    case Kind::Name:
      if (node_->name != other.node_->name) return node_->name < other.node_->name;
      return type() < other.type();
    case Kind::Var:
      if (node_->var_index != other.node_->var_index)
        return node_->var_index < other.node_->var_index;
      return type() < other.type();
    case Kind::Hole:
      return type() < other.type();
    case Kind::App:
      if (fun() < other.fun()) return true;
      if (other.fun() < fun()) return false;
      return arg() < other.arg();
  }
  return false;
}

std::string Term::to_string() const {
  switch (kind()) {
    case Kind::Name:
      return node_->name;
    case Kind::Var:
      return "$" + std::to_string(node_->var_index);
    case Kind::Hole:
      return "_";
    case Kind::App: {
      std::string f = fun().kind() == Kind::App || fun().is_leaf()
                          ? fun().to_string()
                          : "(" + fun().to_string() + ")";
      std::string a = arg().is_leaf() ? arg().to_string()
                                      : "(" + arg().to_string() + ")";
      return f + " " + a;
    }
  }
  return "?";
}

std::vector<std::pair<int, Type>> canonical_variables(const Type& t) {
  std::vector<std::pair<int, Type>> vars;
  auto args = t.argument_list();
  for (size_t i = 0; i < args.size(); ++i)
    vars.emplace_back(static_cast<int>(i) + 1, args[i]);
  return vars;
}

Term full_application(const std::string& name, const Type& type) {
  Term t = Term::name(name, type);
  for (auto& [index, vt] : canonical_variables(type))
    t = Term::app(std::move(t), Term::var(index, vt));
  return t;
}

namespace {

void collect_names(const Term& t, std::vector<Term>& out) {
  switch (t.kind()) {
    case Term::Kind::Name:
      out.push_back(t);
      break;
    case Term::Kind::App:
      collect_names(t.fun(), out);
      collect_names(t.arg(), out);
      break;
    default:
      break;
  }
}

void collect_holes(const Term& t, std::vector<Term>& out) {
  switch (t.kind()) {
    case Term::Kind::Hole:
      out.push_back(t);
      break;
    case Term::Kind::App:
      collect_holes(t.fun(), out);
      collect_holes(t.arg(), out);
      break;
    default:
      break;
  }
}

}  // namespace

std::vector<Term> occurrences(const Term& term) {
  std::vector<Term> out;
  collect_names(term, out);
  return out;
}

std::vector<Term> hole_occurrences(const Term& term) {
  std::vector<Term> out;
  collect_holes(term, out);
  return out;
}

std::optional<Term> occurrence(const Term& term, int j) {
  if (j < 1) return std::nullopt;
  auto occ = occurrences(term);
  if (static_cast<size_t>(j) > occ.size()) return std::nullopt;
  return occ[j - 1];
}

Term erase_names(const Term& term) {
  switch (term.kind()) {
    case Term::Kind::Name:
      return Term::hole(term.type());
    case Term::Kind::App:
      return Term::app(erase_names(term.fun()), erase_names(term.arg()));
    default:
      return term;
  }
}

namespace {

Term substitute_holes_walk(const Term& t, std::span<const Term> leaves, size_t& next) {
  switch (t.kind()) {
    case Term::Kind::Hole: {
      if (next >= leaves.size())
        fail(Errc::TypeMismatch, "not enough leaves to fill holes");
      const Term& leaf = leaves[next++];
      if (leaf.type() != t.type())
        fail(Errc::TypeMismatch, "hole of type " + t.type().to_string() +
                                     " filled with " + leaf.type().to_string());
      return leaf;
    }
    case Term::Kind::App: {
      Term f = substitute_holes_walk(t.fun(), leaves, next);
      Term a = substitute_holes_walk(t.arg(), leaves, next);
      return Term::app(std::move(f), std::move(a));
    }
    default:
      return t;
  }
}

}  // namespace

Term substitute_holes(const Term& term, std::span<const Term> leaves) {
  size_t next = 0;
  return substitute_holes_walk(term, leaves, next);
}

Term substitute_vars(const Term& term, std::span<const Term> args) {
  switch (term.kind()) {
    case Term::Kind::Var: {
      size_t i = static_cast<size_t>(term.var_index());
      if (i == 0 || i > args.size())
        fail(Errc::TypeMismatch,
             "variable $" + std::to_string(term.var_index()) + " has no argument");
      if (args[i - 1].type() != term.type())
        fail(Errc::TypeMismatch, "argument for $" + std::to_string(term.var_index()) +
                                     " has type " + args[i - 1].type().to_string() +
                                     ", expected " + term.type().to_string());
      return args[i - 1];
    }
    case Term::Kind::App:
      return Term::app(substitute_vars(term.fun(), args),
                       substitute_vars(term.arg(), args));
    default:
      return term;
  }
}

Term splice(const Term& term,
            const std::function<std::string(const Term&)>& wrap) {
  if (!term.contains_var()) return Term::name(wrap(term), term.type());
  if (term.kind() == Term::Kind::App)
    return Term::app(splice(term.fun(), wrap), splice(term.arg(), wrap));
  return term;
}

namespace {

struct TermParser {
  std::string_view text;
  size_t pos = 0;
  const std::function<Type(const std::string&)>& name_type;
  const std::function<Type(int)>& var_type;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  [[noreturn]] void error(const std::string& what) {
    fail(Errc::ParseError,
         "term syntax error at offset " + std::to_string(pos) + ": " + what +
             " in \"" + std::string(text) + "\"");
  }

  static bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' ||
           c == '@' || c == ':';
  }

  bool at_atom_start() {
    skip_ws();
    if (pos >= text.size()) return false;
    char c = text[pos];
    return c == '(' || c == '$' || is_ident_char(c) ||
           (c == '[' && pos + 1 < text.size() && text[pos + 1] == '[');
  }

  Term parse_term() {
    Term t = parse_atom();
    while (at_atom_start()) t = Term::app(std::move(t), parse_atom());
    return t;
  }

  Term parse_atom() {
    skip_ws();
    if (pos >= text.size()) error("unexpected end of input");
    char c = text[pos];
    if (c == '(') {
      ++pos;
      Term t = parse_term();
      skip_ws();
      if (pos >= text.size() || text[pos] != ')') error("expected )");
      ++pos;
      return t;
    }
    if (c == '$') {
      ++pos;
      size_t start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (start == pos) error("expected variable index after $");
      int index = std::stoi(std::string(text.substr(start, pos - start)));
      return Term::var(index, var_type(index));
    }
    std::string name = parse_name();
    return Term::name(name, name_type(name));
  }

  void scan_double_bracket() {
    // positioned at "[["
    int depth = 0;
    while (pos < text.size()) {
      if (text.substr(pos, 2) == "[[") {
        depth++;
        pos += 2;
      } else if (text.substr(pos, 2) == "]]") {
        depth--;
        pos += 2;
        if (depth == 0) return;
      } else {
        ++pos;
      }
    }
    error("unterminated [[ ... ]] name");
  }

  void scan_braces() {
    int depth = 0;
    while (pos < text.size()) {
      if (text[pos] == '{') depth++;
      if (text[pos] == '}') {
        depth--;
        ++pos;
        if (depth == 0) return;
        continue;
      }
      ++pos;
    }
    error("unterminated { in name");
  }

  // name := (ident | '[[' balanced ']]' | '{' balanced '}')+ starting with an
  // ident char or '[['. Covers plain names, numerals, type-instantiated
  // builtins like K{nat,nat}, derived names [[m1 m2]] and canonicalized
  // names like cn[[m]].
  std::string parse_name() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size()) {
      if (is_ident_char(text[pos])) {
        ++pos;
      } else if (text.substr(pos, 2) == "[[") {
        scan_double_bracket();
      } else if (text[pos] == '{') {
        scan_braces();
      } else {
        break;
      }
    }
    if (pos == start) error("expected a name");
    return std::string(text.substr(start, pos - start));
  }
};

}  // namespace

Term Term::parse(std::string_view text,
                 const std::function<Type(const std::string&)>& name_type,
                 const std::function<Type(int)>& var_type) {
  TermParser p{text, 0, name_type, var_type};
  Term t = p.parse_term();
  p.skip_ws();
  if (p.pos != text.size()) p.error("trailing characters");
  return t;
}

}  // namespace stratagem
