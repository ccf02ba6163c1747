#include "stratagem/pcf.hpp"

#include <cctype>
#include <set>

#include "stratagem/error.hpp"
#include "stratagem/machine.hpp"

namespace stratagem {
namespace pcf {

PcfPtr PcfTerm::mkvar(std::string name, size_t at) {
  auto t = std::make_shared<PcfTerm>();
  t->kind = Kind::Var;
  t->var = std::move(name);
  t->offset = at;
  return t;
}

PcfPtr PcfTerm::lam(std::string name, Type annot, PcfPtr body, size_t at) {
  auto t = std::make_shared<PcfTerm>();
  t->kind = Kind::Lam;
  t->var = std::move(name);
  t->annot = std::move(annot);
  t->fun = std::move(body);
  t->offset = at;
  return t;
}

PcfPtr PcfTerm::app(PcfPtr fun, PcfPtr arg, size_t at) {
  auto t = std::make_shared<PcfTerm>();
  t->kind = Kind::App;
  t->fun = std::move(fun);
  t->arg = std::move(arg);
  t->offset = at;
  return t;
}

PcfPtr PcfTerm::constant_(std::string name, size_t at) {
  auto t = std::make_shared<PcfTerm>();
  t->kind = Kind::Const;
  t->constant = std::move(name);
  t->offset = at;
  return t;
}

PcfPtr PcfTerm::lit_(Nat v, size_t at) {
  auto t = std::make_shared<PcfTerm>();
  t->kind = Kind::Lit;
  t->lit = v;
  t->offset = at;
  return t;
}

std::string to_string(const PcfTerm& t) {
  switch (t.kind) {
    case PcfTerm::Kind::Var:
      return t.var;
    case PcfTerm::Kind::Lam:
      return "\\" + t.var + ":" + t.annot.to_string() + ". " + to_string(*t.fun);
    case PcfTerm::Kind::App: {
      std::string f = t.fun->kind == PcfTerm::Kind::Lam
                          ? "(" + to_string(*t.fun) + ")"
                          : to_string(*t.fun);
      bool wrap = t.arg->kind == PcfTerm::Kind::App || t.arg->kind == PcfTerm::Kind::Lam;
      std::string a = wrap ? "(" + to_string(*t.arg) + ")" : to_string(*t.arg);
      return f + " " + a;
    }
    case PcfTerm::Kind::Const:
      return t.constant;
    case PcfTerm::Kind::Lit:
      return std::to_string(t.lit);
  }
  return "?";
}

namespace {

struct PcfParser {
  std::string_view text;
  size_t pos = 0;

  void skip_ws() {
    for (;;) {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos + 1 < text.size() && text[pos] == '-' && text[pos + 1] == '-') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
        continue;
      }
      return;
    }
  }

  [[noreturn]] void error(const std::string& what) {
    fail(Errc::ParseError,
         "pcf syntax error at offset " + std::to_string(pos) + ": " + what);
  }

  bool at_atom() {
    skip_ws();
    if (pos >= text.size()) return false;
    char c = text[pos];
    return c == '(' || c == '\\' || std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  PcfPtr parse_expr() {
    skip_ws();
    if (pos < text.size() && text[pos] == '\\') return parse_lambda();
    PcfPtr t = parse_atom();
    while (at_atom()) {
      size_t at = pos;
      if (pos < text.size() && text[pos] == '\\') {
        t = PcfTerm::app(std::move(t), parse_lambda(), at);
        break;
      }
      t = PcfTerm::app(std::move(t), parse_atom(), at);
    }
    return t;
  }

  PcfPtr parse_lambda() {
    size_t at = pos;
    ++pos;  // backslash
    std::string name = parse_ident();
    skip_ws();
    if (pos >= text.size() || text[pos] != ':') error("lambda needs `\\x:T. e`");
    ++pos;
    size_t dot = text.find('.', pos);
    if (dot == std::string_view::npos) error("lambda needs `.` after the type");
    Type annot = Type::parse(std::string(text.substr(pos, dot - pos)));
    pos = dot + 1;
    PcfPtr body = parse_expr();
    return PcfTerm::lam(std::move(name), std::move(annot), std::move(body), at);
  }

  PcfPtr parse_atom() {
    skip_ws();
    if (pos >= text.size()) error("unexpected end of input");
    size_t at = pos;
    char c = text[pos];
    if (c == '(') {
      ++pos;
      PcfPtr t = parse_expr();
      skip_ws();
      if (pos >= text.size() || text[pos] != ')') error("expected )");
      ++pos;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      return PcfTerm::lit_(std::stoull(std::string(text.substr(start, pos - start))), at);
    }
    std::string name = parse_ident();
    return PcfTerm::mkvar(std::move(name), at);  // resolved to Const in typecheck
  }

  std::string parse_ident() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    if (start == pos) error("expected an identifier");
    return std::string(text.substr(start, pos - start));
  }
};

}  // namespace

PcfPtr parse(std::string_view text) {
  PcfParser p{text};
  PcfPtr t = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.error("trailing characters");
  return t;
}

// --- type inference ----------------------------------------------------------

namespace {

// Inference types: ground, arrow, or metavariable.
struct MType;
using MPtr = std::shared_ptr<MType>;

struct MType {
  enum class Kind { Ground, Arrow, Meta };
  Kind kind;
  MPtr a, b;       // Arrow
  MPtr link;       // Meta: union-find forwarding
  int id = 0;      // Meta id (diagnostics)
};

MPtr mground() {
  auto t = std::make_shared<MType>();
  t->kind = MType::Kind::Ground;
  return t;
}
MPtr marrow(MPtr a, MPtr b) {
  auto t = std::make_shared<MType>();
  t->kind = MType::Kind::Arrow;
  t->a = std::move(a);
  t->b = std::move(b);
  return t;
}

struct Inference {
  int next_meta = 0;

  MPtr meta() {
    auto t = std::make_shared<MType>();
    t->kind = MType::Kind::Meta;
    t->id = next_meta++;
    return t;
  }

  MPtr find(MPtr t) {
    while (t->kind == MType::Kind::Meta && t->link) t = t->link;
    return t;
  }

  bool occurs(const MPtr& m, MPtr t) {
    t = find(std::move(t));
    if (t == m) return true;
    if (t->kind == MType::Kind::Arrow) return occurs(m, t->a) || occurs(m, t->b);
    return false;
  }

  void unify(MPtr x, MPtr y, size_t at) {
    x = find(std::move(x));
    y = find(std::move(y));
    if (x == y) return;
    if (x->kind == MType::Kind::Meta) {
      if (occurs(x, y))
        fail(Errc::IllTyped, "offset " + std::to_string(at) + ": infinite type");
      x->link = y;
      return;
    }
    if (y->kind == MType::Kind::Meta) {
      unify(y, x, at);
      return;
    }
    if (x->kind != y->kind)
      fail(Errc::IllTyped, "offset " + std::to_string(at) + ": type mismatch");
    if (x->kind == MType::Kind::Arrow) {
      unify(x->a, y->a, at);
      unify(x->b, y->b, at);
    }
  }

  MPtr lift(const Type& t) {
    if (t.is_ground()) return mground();
    return marrow(lift(t.argument()), lift(t.result()));
  }

  Type lower(MPtr t, size_t at) {
    t = find(std::move(t));
    switch (t->kind) {
      case MType::Kind::Ground:
        return Type::ground();
      case MType::Kind::Arrow:
        return Type::arrow(lower(t->a, at), lower(t->b, at));
      case MType::Kind::Meta:
        fail(Errc::IllTyped, "offset " + std::to_string(at) +
                                 ": ambiguous constant instance (add an annotation)");
    }
    return Type::ground();
  }
};

const Type kNat = Type::ground();

// Monomorphic constant types per language.
std::optional<Type> mono_constant_type(const std::string& name, Lang lang) {
  const Type pred = Type::arrow(kNat, kNat);
  if (name == "succ" || name == "pred" || name == "fin_size")
    return Type::arrow(kNat, kNat);
  if (name == "eq" || name == "fin_arg" || name == "fin_val")
    return Type::function(std::array{kNat, kNat}, kNat);
  if (name == "if") return Type::function(std::array{kNat, kNat, kNat}, kNat);
  if (name == "mu" || name == "exists_ws" || name == "exists_s")
    return Type::arrow(pred, kNat);
  if (name == "exists_sn") return Type::function(std::array{kNat, pred}, kNat);
  if (lang == Lang::PcfPlus) {
    if (name == "pif") return Type::function(std::array{kNat, kNat, kNat}, kNat);
    if (name == "por") return Type::function(std::array{kNat, kNat}, kNat);
    if (name == "bexists") return Type::function(std::array{kNat, pred}, kNat);
  }
  return std::nullopt;
}

bool is_poly_constant(const std::string& name) {
  return name == "S" || name == "K" || name == "I" || name == "Y" || name == "omega";
}

struct Checker {
  Lang lang;
  Inference inf;
  std::map<const PcfTerm*, MPtr> mtypes;

  MPtr check(const PcfPtr& t, std::vector<std::pair<std::string, MPtr>>& env) {
    MPtr out;
    switch (t->kind) {
      case PcfTerm::Kind::Lit:
        out = mground();
        break;
      case PcfTerm::Kind::Var: {
        for (auto it = env.rbegin(); it != env.rend(); ++it)
          if (it->first == t->var) {
            out = it->second;
            break;
          }
        if (!out) out = constant_type(t);
        break;
      }
      case PcfTerm::Kind::Const:
        out = constant_type(t);
        break;
      case PcfTerm::Kind::Lam: {
        MPtr a = inf.lift(t->annot);
        env.emplace_back(t->var, a);
        MPtr b = check(t->fun, env);
        env.pop_back();
        out = marrow(std::move(a), std::move(b));
        break;
      }
      case PcfTerm::Kind::App: {
        MPtr f = check(t->fun, env);
        MPtr x = check(t->arg, env);
        MPtr r = inf.meta();
        inf.unify(f, marrow(std::move(x), r), t->offset);
        out = r;
        break;
      }
    }
    mtypes[t.get()] = out;
    return out;
  }

  MPtr constant_type(const PcfPtr& t) {
    const std::string& name = t->kind == PcfTerm::Kind::Var ? t->var : t->constant;
    if (auto mono = mono_constant_type(name, lang)) return inf.lift(*mono);
    if (name == "S") {
      MPtr a = inf.meta(), b = inf.meta(), c = inf.meta();
      return marrow(marrow(a, marrow(b, c)), marrow(marrow(a, b), marrow(a, c)));
    }
    if (name == "K") {
      MPtr a = inf.meta(), b = inf.meta();
      return marrow(a, marrow(std::move(b), a));
    }
    if (name == "I") {
      MPtr a = inf.meta();
      return marrow(a, a);
    }
    if (name == "Y") {
      MPtr a = inf.meta();
      return marrow(marrow(a, a), a);
    }
    if (name == "omega") return inf.meta();
    fail(Errc::UnknownConstant, "offset " + std::to_string(t->offset) +
                                    ": unknown constant or unbound variable " + name);
  }
};

}  // namespace

Typing typecheck(const PcfPtr& term, Lang lang) {
  Checker checker{lang, {}, {}};
  std::vector<std::pair<std::string, MPtr>> env;
  MPtr root = checker.check(term, env);
  Typing out;
  out.type = checker.inf.lower(root, term->offset);
  for (auto& [node, mt] : checker.mtypes)
    out.at[node] = checker.inf.lower(mt, node->offset);
  return out;
}

// --- compilation --------------------------------------------------------------

namespace {

std::string bound_var_leaf(const std::string& name) { return "%" + name; }

bool contains_leaf(const Term& t, const std::string& leaf) {
  switch (t.kind()) {
    case Term::Kind::Name:
      return t.name_text() == leaf;
    case Term::Kind::App:
      return contains_leaf(t.fun(), leaf) || contains_leaf(t.arg(), leaf);
    default:
      return false;
  }
}

// Bracket abstraction over a named leaf (a bound PCF variable).
Term abstract_leaf(const std::string& leaf, const Type& var_type, const Term& body) {
  if (body.kind() == Term::Kind::Name && body.name_text() == leaf)
    return Term::name(combinator_i_name(var_type), Type::arrow(var_type, var_type));
  if (!contains_leaf(body, leaf)) {
    Term k = Term::name(combinator_k_name(body.type(), var_type),
                        Type::arrow(body.type(), Type::arrow(var_type, body.type())));
    return Term::app(std::move(k), body);
  }
  Term fa = abstract_leaf(leaf, var_type, body.fun());
  Term fb = abstract_leaf(leaf, var_type, body.arg());
  const Type &a = var_type, b = body.arg().type(), c = body.type();
  Term s = Term::name(combinator_s_name(a, b, c),
                      Type::arrow(Type::arrow(a, Type::arrow(b, c)),
                                  Type::arrow(Type::arrow(a, b), Type::arrow(a, c))));
  return Term::app(Term::app(std::move(s), std::move(fa)), std::move(fb));
}

struct Lowering {
  Lang lang;
  const Typing& typing;

  Type type_at(const PcfTerm* t) const { return typing.at.at(t); }

  Term lower(const PcfPtr& t, std::vector<std::pair<std::string, Type>>& env) {
    switch (t->kind) {
      case PcfTerm::Kind::Lit:
        return Term::name(numeral_name(t->lit), kNat);
      case PcfTerm::Kind::Var: {
        for (auto it = env.rbegin(); it != env.rend(); ++it)
          if (it->first == t->var)
            return Term::name(bound_var_leaf(t->var), it->second);
        return constant_leaf(t.get());
      }
      case PcfTerm::Kind::Const:
        return constant_leaf(t.get());
      case PcfTerm::Kind::Lam: {
        env.emplace_back(t->var, t->annot);
        Term body = lower(t->fun, env);
        env.pop_back();
        return abstract_leaf(bound_var_leaf(t->var), t->annot, body);
      }
      case PcfTerm::Kind::App:
        return Term::app(lower(t->fun, env), lower(t->arg, env));
    }
    fail(Errc::IllTyped, "unreachable");
  }

  Term constant_leaf(const PcfTerm* t) const {
    const std::string& name = t->kind == PcfTerm::Kind::Var ? t->var : t->constant;
    Type type = type_at(t);
    if (auto mono = mono_constant_type(name, lang)) return Term::name(name, *mono);
    if (name == "S") {
      // (a -> b -> c) -> (a -> b) -> a -> c
      Type a = type.argument().argument();
      Type b = type.argument().result().argument();
      Type c = type.argument().result().result();
      return Term::name(combinator_s_name(a, b, c), type);
    }
    if (name == "K") {
      Type a = type.argument();
      Type b = type.result().argument();
      return Term::name(combinator_k_name(a, b), type);
    }
    if (name == "I") return Term::name(combinator_i_name(type.argument()), type);
    if (name == "Y") return Term::name(fixpoint_name(type.result()), type);
    if (name == "omega") return Term::name(omega_name(type), type);
    fail(Errc::UnknownConstant, "unknown constant " + name);
  }
};

}  // namespace

Compiled compile(const PcfPtr& term, Lang lang) {
  Typing typing = typecheck(term, lang);
  Lowering lowering{lang, typing};
  std::vector<std::pair<std::string, Type>> env;
  Term lowered = lowering.lower(term, env);
  if (!lowered.is_closed())
    fail(Errc::IllTyped, "compile needs a closed term");
  Compiled out{lowered, typing.type, derived_system(builtin_system(lang)),
               derived_name(lowered)};
  return out;
}

Compiled compile_text(std::string_view text, Lang lang) {
  return compile(parse(text), lang);
}

// --- beta reduction (for the soundness property tests) ------------------------

namespace {

PcfPtr substitute(const PcfPtr& body, const std::string& var, const PcfPtr& value) {
  switch (body->kind) {
    case PcfTerm::Kind::Var:
      return body->var == var ? value : body;
    case PcfTerm::Kind::Lam: {
      if (body->var == var) return body;  // shadowed
      PcfPtr inner = substitute(body->fun, var, value);
      return inner == body->fun
                 ? body
                 : PcfTerm::lam(body->var, body->annot, inner, body->offset);
    }
    case PcfTerm::Kind::App: {
      PcfPtr f = substitute(body->fun, var, value);
      PcfPtr a = substitute(body->arg, var, value);
      return (f == body->fun && a == body->arg) ? body
                                                : PcfTerm::app(f, a, body->offset);
    }
    default:
      return body;
  }
}

// Free variables of `t`.
void free_vars(const PcfPtr& t, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (t->kind) {
    case PcfTerm::Kind::Var:
      if (!bound.count(t->var)) out.insert(t->var);
      break;
    case PcfTerm::Kind::Lam: {
      bool fresh = bound.insert(t->var).second;
      free_vars(t->fun, bound, out);
      if (fresh) bound.erase(t->var);
      break;
    }
    case PcfTerm::Kind::App:
      free_vars(t->fun, bound, out);
      free_vars(t->arg, bound, out);
      break;
    default:
      break;
  }
}

bool captures(const PcfPtr& lam_body, const std::string& param, const PcfPtr& value) {
  // A capture can only happen if value has a free variable bound by a lambda
  // inside lam_body on the path to an occurrence of param. Conservative
  // check: any free variable of value that appears as a binder in lam_body.
  std::set<std::string> bound, fv;
  free_vars(value, bound, fv);
  std::function<bool(const PcfPtr&)> any_binder = [&](const PcfPtr& t) -> bool {
    if (t->kind == PcfTerm::Kind::Lam)
      return fv.count(t->var) > 0 || any_binder(t->fun);
    if (t->kind == PcfTerm::Kind::App)
      return any_binder(t->fun) || any_binder(t->arg);
    return false;
  };
  (void)param;
  return any_binder(lam_body);
}

}  // namespace

PcfPtr beta_reduce_once(const PcfPtr& term) {
  switch (term->kind) {
    case PcfTerm::Kind::App: {
      if (term->fun->kind == PcfTerm::Kind::Lam) {
        const PcfPtr& lam = term->fun;
        if (!captures(lam->fun, lam->var, term->arg))
          return substitute(lam->fun, lam->var, term->arg);
      }
      if (PcfPtr f = beta_reduce_once(term->fun))
        return PcfTerm::app(f, term->arg, term->offset);
      if (PcfPtr a = beta_reduce_once(term->arg))
        return PcfTerm::app(term->fun, a, term->offset);
      return nullptr;
    }
    case PcfTerm::Kind::Lam: {
      if (PcfPtr b = beta_reduce_once(term->fun))
        return PcfTerm::lam(term->var, term->annot, b, term->offset);
      return nullptr;
    }
    default:
      return nullptr;
  }
}

// --- the # consistency-check term ---------------------------------------------

PcfPtr hash_check_term() {
  // \c:nat. \f:nat->nat.
  //   bexists (fin_size c) (\i:nat. if (eq (f (fin_arg c i)) (fin_val c i)) 0 1)
  auto v = [](const char* n) { return PcfTerm::mkvar(n); };
  auto ap = [](PcfPtr f, PcfPtr a) { return PcfTerm::app(std::move(f), std::move(a)); };
  PcfPtr fa = ap(ap(v("fin_arg"), v("c")), v("i"));
  PcfPtr fv = ap(ap(v("fin_val"), v("c")), v("i"));
  PcfPtr neq = ap(ap(ap(v("if"), ap(ap(v("eq"), ap(v("f"), fa)), fv)),
                     PcfTerm::lit_(0)),
                  PcfTerm::lit_(1));
  PcfPtr pred = PcfTerm::lam("i", Type::ground(), neq);
  PcfPtr body = ap(ap(v("bexists"), ap(v("fin_size"), v("c"))), pred);
  PcfPtr inner = PcfTerm::lam("f", Type::arrow(Type::ground(), Type::ground()), body);
  return PcfTerm::lam("c", Type::ground(), inner);
}

}  // namespace pcf
}  // namespace stratagem
