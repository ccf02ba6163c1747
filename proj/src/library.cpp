#include "stratagem/library.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>

#include "stratagem/error.hpp"

namespace stratagem {

namespace {

const Type kNat = Type::ground();

Term numeral_term(Nat v) { return Term::name(std::to_string(v), kNat); }

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

// Splits "base{T1,...,Tk}" into base and top-level comma-separated pieces.
bool split_instance(const std::string& name, std::string& base,
                    std::vector<std::string>& args) {
  auto brace = name.find('{');
  if (brace == std::string::npos || name.back() != '}') return false;
  base = name.substr(0, brace);
  std::string inner = name.substr(brace + 1, name.size() - brace - 2);
  int depth = 0;
  std::string cur;
  for (char c : inner) {
    if (c == '(' || c == '{') depth++;
    if (c == ')' || c == '}') depth--;
    if (c == ',' && depth == 0) {
      args.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) args.push_back(cur);
  return true;
}

}  // namespace

std::string combinator_s_name(const Type& a, const Type& b, const Type& c) {
  return "S{" + a.to_string() + "," + b.to_string() + "," + c.to_string() + "}";
}
std::string combinator_k_name(const Type& a, const Type& b) {
  return "K{" + a.to_string() + "," + b.to_string() + "}";
}
std::string combinator_i_name(const Type& a) { return "I{" + a.to_string() + "}"; }
std::string fixpoint_name(const Type& a) { return "Y{" + a.to_string() + "}"; }
std::string omega_name(const Type& a) { return "omega{" + a.to_string() + "}"; }
std::string numeral_name(Nat v) { return std::to_string(v); }

namespace {

// Applies `t` to the canonical variables of `of` starting at variable
// index `first`, using of's argument list.
Term apply_tail_vars(Term t, const Type& of, int first) {
  auto args = of.argument_list();
  for (size_t i = 0; i < args.size(); ++i)
    t = Term::app(std::move(t), Term::var(first + static_cast<int>(i), args[i]));
  return t;
}

// One-query combinator behaviour: Λ -> query, <v> -> v, else Bottom.
RespondFn echo_query(Term query) {
  return [query = std::move(query)](PromptView w) -> Reply {
    if (w.empty()) return Reply::query(query);
    if (w.size() == 1) return Reply::value(w[0]);
    return Reply::bottom();
  };
}

struct Builtin {
  Type type;
  RespondFn respond;
};

std::optional<Builtin> resolve_combinator(const std::string& name) {
  std::string base;
  std::vector<std::string> args;
  if (!split_instance(name, base, args)) return std::nullopt;
  std::vector<Type> types;
  for (auto& a : args) types.push_back(Type::parse(a));

  if (base == "S" && types.size() == 3) {
    const Type &a = types[0], &b = types[1], &c = types[2];
    Type type = Type::arrow(Type::arrow(a, Type::arrow(b, c)),
                            Type::arrow(Type::arrow(a, b), Type::arrow(a, c)));
    Term x1 = Term::var(1, Type::arrow(a, Type::arrow(b, c)));
    Term x2 = Term::var(2, Type::arrow(a, b));
    Term x3 = Term::var(3, a);
    Term q = Term::app(Term::app(x1, x3), Term::app(x2, x3));
    q = apply_tail_vars(std::move(q), c, 4);
    return Builtin{type, echo_query(std::move(q))};
  }
  if (base == "K" && types.size() == 2) {
    const Type &a = types[0], &b = types[1];
    Type type = Type::arrow(a, Type::arrow(b, a));
    Term q = apply_tail_vars(Term::var(1, a), a, 3);
    return Builtin{type, echo_query(std::move(q))};
  }
  if (base == "I" && types.size() == 1) {
    const Type& a = types[0];
    Term q = apply_tail_vars(Term::var(1, a), a, 2);
    return Builtin{Type::arrow(a, a), echo_query(std::move(q))};
  }
  if (base == "Y" && types.size() == 1) {
    const Type& a = types[0];
    Type fa = Type::arrow(a, a);
    Term x1 = Term::var(1, fa);
    Term rec = Term::app(Term::name(fixpoint_name(a), Type::arrow(fa, a)), x1);
    Term q = apply_tail_vars(Term::app(x1, std::move(rec)), a, 2);
    return Builtin{Type::arrow(fa, a), echo_query(std::move(q))};
  }
  if (base == "omega" && types.size() == 1) {
    return Builtin{types[0], [](PromptView) { return Reply::bottom(); }};
  }
  return std::nullopt;
}

Builtin make_if() {
  Type type = Type::function(std::array{kNat, kNat, kNat}, kNat);
  return {type, [](PromptView w) -> Reply {
            if (w.empty()) return Reply::query(Term::var(1, kNat));
            if (w[0] > 1) return Reply::bottom();
            if (w.size() == 1)
              return Reply::query(Term::var(w[0] == 1 ? 2 : 3, kNat));
            if (w.size() == 2) return Reply::value(w[1]);
            return Reply::bottom();
          }};
}

Builtin make_succ() {
  return {Type::arrow(kNat, kNat), [](PromptView w) -> Reply {
            if (w.empty()) return Reply::query(Term::var(1, kNat));
            if (w.size() == 1) return Reply::value(w[0] + 1);
            return Reply::bottom();
          }};
}

Builtin make_pred() {
  return {Type::arrow(kNat, kNat), [](PromptView w) -> Reply {
            if (w.empty()) return Reply::query(Term::var(1, kNat));
            if (w.size() == 1) return Reply::value(w[0] == 0 ? 0 : w[0] - 1);
            return Reply::bottom();
          }};
}

Builtin make_eq() {
  Type type = Type::function(std::array{kNat, kNat}, kNat);
  return {type, [](PromptView w) -> Reply {
            if (w.empty()) return Reply::query(Term::var(1, kNat));
            if (w.size() == 1) return Reply::query(Term::var(2, kNat));
            if (w.size() == 2) return Reply::value(w[0] == w[1] ? 1 : 0);
            return Reply::bottom();
          }};
}

const Type kPredType = Type::arrow(kNat, kNat);  // iota -> iota predicates

// mu: least x with P x = 1, probing P 0, P 1, ... sequentially.
Builtin make_mu() {
  Type type = Type::arrow(kPredType, kNat);
  return {type, [](PromptView w) -> Reply {
            for (size_t i = 0; i + 1 < w.size(); ++i)
              if (w[i] != 0) return Reply::bottom();
            if (w.empty())
              return Reply::query(Term::app(Term::var(1, kPredType), numeral_term(0)));
            if (w.back() == 0)
              return Reply::query(
                  Term::app(Term::var(1, kPredType), numeral_term(w.size())));
            if (w.back() == 1) return Reply::value(w.size() - 1);
            return Reply::bottom();
          }};
}

Builtin make_exists_ws() {
  Type type = Type::arrow(kPredType, kNat);
  return {type, [](PromptView w) -> Reply {
            for (size_t i = 0; i + 1 < w.size(); ++i)
              if (w[i] != 0) return Reply::bottom();
            if (w.empty())
              return Reply::query(Term::app(Term::var(1, kPredType), numeral_term(0)));
            if (w.back() == 0)
              return Reply::query(
                  Term::app(Term::var(1, kPredType), numeral_term(w.size())));
            if (w.back() == 1) return Reply::value(1);
            return Reply::bottom();
          }};
}

Builtin make_exists_s() {
  Type type = Type::arrow(kPredType, kNat);
  Term mu = Term::name("mu", Type::arrow(kPredType, kNat));
  Term q = Term::app(Term::var(1, kPredType),
                     Term::app(std::move(mu), Term::var(1, kPredType)));
  return {type, [q = std::move(q)](PromptView w) -> Reply {
            if (w.empty()) return Reply::query(q);
            if (w.size() == 1) return Reply::value(w[0]);
            return Reply::bottom();
          }};
}

// exists_sn n P: probes P 0 .. P n in order, then P bottom.
Builtin make_exists_sn() {
  Type type = Type::function(std::array{kNat, kPredType}, kNat);
  return {type, [](PromptView w) -> Reply {
            if (w.empty()) return Reply::query(Term::var(1, kNat));
            Nat n = w[0];
            size_t m = w.size() - 1;  // number of P answers so far
            for (size_t i = 1; i + 1 < w.size(); ++i)
              if (w[i] != 0) return Reply::bottom();
            if (m == 0)
              return Reply::query(Term::app(Term::var(2, kPredType), numeral_term(0)));
            Nat last = w.back();
            if (m <= n + 1) {
              if (last == 1) return Reply::value(1);
              if (last != 0) return Reply::bottom();
              if (m <= n)
                return Reply::query(
                    Term::app(Term::var(2, kPredType), numeral_term(m)));
              return Reply::query(Term::app(Term::var(2, kPredType),
                                            Term::name(omega_name(kNat), kNat)));
            }
            if (m == n + 2) return Reply::value(last);
            return Reply::bottom();
          }};
}

Builtin make_pif() {
  Type type = Type::function(std::array{kNat, kNat, kNat}, kNat);
  return {type, [](PromptView w) -> Reply {
            if (w.empty()) return Reply::hash();
            if (w[0] > 1) return Reply::bottom();
            if (w[0] == 0) {
              if (w.size() == 1) return Reply::query(Term::var(1, kNat));
              if (w[1] > 1) return Reply::bottom();
              if (w.size() == 2)
                return Reply::query(Term::var(w[1] == 1 ? 2 : 3, kNat));
              if (w.size() == 3) return Reply::value(w[2]);
              return Reply::bottom();
            }
            if (w.size() == 1) return Reply::query(Term::var(2, kNat));
            if (w.size() == 2) return Reply::query(Term::var(3, kNat));
            if (w.size() == 3 && w[1] == w[2]) return Reply::value(w[1]);
            return Reply::bottom();
          }};
}

Builtin make_por() {
  Type type = Type::function(std::array{kNat, kNat}, kNat);
  return {type, [](PromptView w) -> Reply {
            if (w.empty()) return Reply::hash();
            if (w[0] > 1) return Reply::bottom();
            if (w[0] == 0) {
              if (w.size() == 1) return Reply::query(Term::var(1, kNat));
              if (w[1] == 1) return w.size() == 2 ? Reply::value(1) : Reply::bottom();
              if (w[1] != 0) return Reply::bottom();
              if (w.size() == 2) return Reply::query(Term::var(2, kNat));
              if (w.size() == 3) return Reply::value(w[2]);
              return Reply::bottom();
            }
            if (w.size() == 1) return Reply::query(Term::var(2, kNat));
            if (w.size() == 2 && w[1] == 1) return Reply::value(1);
            return Reply::bottom();
          }};
}

// Bounded existential quantifier via the recursion
//   bexists n P = if n = 0 then 0 else por (bexists (n-1) P) (P (n-1)).
Builtin make_bexists() {
  Type type = Type::function(std::array{kNat, kPredType}, kNat);
  Type por_type = Type::function(std::array{kNat, kNat}, kNat);
  Type self_type = type;
  return {type, [por_type, self_type](PromptView w) -> Reply {
            if (w.empty()) return Reply::query(Term::var(1, kNat));
            if (w.size() == 1) {
              Nat n = w[0];
              if (n == 0) return Reply::value(0);
              Term rec = Term::app(
                  Term::app(Term::name("bexists", self_type), numeral_term(n - 1)),
                  Term::var(2, kPredType));
              Term probe = Term::app(Term::var(2, kPredType), numeral_term(n - 1));
              Term q = Term::app(Term::app(Term::name("por", por_type), rec), probe);
              return Reply::query(std::move(q));
            }
            if (w.size() == 2) return Reply::value(w[1]);
            return Reply::bottom();
          }};
}

Builtin make_fin_size() {
  return {Type::arrow(kNat, kNat), [](PromptView w) -> Reply {
            if (w.empty()) return Reply::query(Term::var(1, kNat));
            if (w.size() == 1)
              return Reply::value(decode_strict_finite(w[0]).entries.size());
            return Reply::bottom();
          }};
}

Builtin make_fin_entry(bool value_side) {
  Type type = Type::function(std::array{kNat, kNat}, kNat);
  return {type, [value_side](PromptView w) -> Reply {
            if (w.empty()) return Reply::query(Term::var(1, kNat));
            if (w.size() == 1) return Reply::query(Term::var(2, kNat));
            if (w.size() == 2) {
              auto f = decode_strict_finite(w[0]);
              if (w[1] >= f.entries.size()) return Reply::bottom();
              return Reply::value(value_side ? f.entries[w[1]].second
                                             : f.entries[w[1]].first);
            }
            return Reply::bottom();
          }};
}

class BuiltinImpl : public SystemImpl {
 public:
  explicit BuiltinImpl(Lang lang) : lang_(lang) {}

  bool contains(const std::string& name) const override {
    return resolve(name) != nullptr;
  }
  Type type_of(const std::string& name) const override {
    const Builtin* b = resolve(name);
    if (!b) fail(Errc::UnknownStrategy, "unknown strategy: " + name);
    return b->type;
  }
  Reply respond(const std::string& name, PromptView prompt) const override {
    const Builtin* b = resolve(name);
    if (!b) fail(Errc::UnknownStrategy, "unknown strategy: " + name);
    return b->respond(prompt);
  }
  bool nondeterministic() const override { return lang_ == Lang::PcfPlus; }

 private:
  const Builtin* resolve(const std::string& name) const {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = cache_.find(name);
      if (it != cache_.end()) return it->second ? &*it->second : nullptr;
    }
    std::optional<Builtin> b = build(name);
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, _] = cache_.try_emplace(name, std::move(b));
    return it->second ? &*it->second : nullptr;
  }

  std::optional<Builtin> build(const std::string& name) const {
    if (all_digits(name)) {
      Nat v = 0;
      try {
        v = std::stoull(name);
      } catch (const std::out_of_range&) {
        return std::nullopt;
      }
      return Builtin{kNat, [v](PromptView w) -> Reply {
                       return w.empty() ? Reply::value(v) : Reply::bottom();
                     }};
    }
    if (name == "if") return make_if();
    if (name == "succ") return make_succ();
    if (name == "pred") return make_pred();
    if (name == "eq") return make_eq();
    if (name == "mu") return make_mu();
    if (name == "exists_ws") return make_exists_ws();
    if (name == "exists_s") return make_exists_s();
    if (name == "exists_sn") return make_exists_sn();
    if (name == "fin_size") return make_fin_size();
    if (name == "fin_arg") return make_fin_entry(false);
    if (name == "fin_val") return make_fin_entry(true);
    if (lang_ == Lang::PcfPlus) {
      if (name == "pif") return make_pif();
      if (name == "por") return make_por();
      if (name == "bexists") return make_bexists();
    }
    try {
      return resolve_combinator(name);
    } catch (const Error&) {
      return std::nullopt;  // malformed type arguments: not a builtin
    }
  }

  Lang lang_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::optional<Builtin>> cache_;
};

}  // namespace

System builtin_system(Lang lang) {
  return System(std::make_shared<BuiltinImpl>(lang));
}

namespace {

bool contains_var_index(const Term& t, int index) {
  switch (t.kind()) {
    case Term::Kind::Var:
      return t.var_index() == index;
    case Term::Kind::App:
      return contains_var_index(t.fun(), index) ||
             contains_var_index(t.arg(), index);
    default:
      return false;
  }
}

Term abstract_one(int index, const Type& var_type, const Term& body) {
  if (body.kind() == Term::Kind::Var && body.var_index() == index)
    return Term::name(combinator_i_name(var_type), Type::arrow(var_type, var_type));
  if (!contains_var_index(body, index)) {
    Term k = Term::name(combinator_k_name(body.type(), var_type),
                        Type::arrow(body.type(), Type::arrow(var_type, body.type())));
    return Term::app(std::move(k), body);
  }
  // body = A B with x somewhere inside
  Term fa = abstract_one(index, var_type, body.fun());
  Term fb = abstract_one(index, var_type, body.arg());
  Type a = var_type, b = body.arg().type(), c = body.type();
  Term s = Term::name(combinator_s_name(a, b, c),
                      Type::arrow(Type::arrow(a, Type::arrow(b, c)),
                                  Type::arrow(Type::arrow(a, b), Type::arrow(a, c))));
  return Term::app(Term::app(std::move(s), std::move(fa)), std::move(fb));
}

}  // namespace

Term bracket_abstract(std::span<const std::pair<int, Type>> vars, const Term& body) {
  Term cur = body;
  for (auto it = vars.rbegin(); it != vars.rend(); ++it)
    cur = abstract_one(it->first, it->second, cur);
  return cur;
}

System make_pif_table(Nat bound) {
  Type type = Type::function(std::array{kNat, kNat, kNat}, kNat);
  Table t;
  t.insert_or_assign(Prompt{}, Reply::hash());
  t.insert_or_assign(Prompt{0}, Reply::query(Term::var(1, kNat)));
  t.insert_or_assign(Prompt{1}, Reply::query(Term::var(2, kNat)));
  for (Nat v = 0; v <= bound; ++v) {
    if (v <= 1) t.insert_or_assign(Prompt{0, v}, Reply::query(Term::var(v == 1 ? 2 : 3, kNat)));
    t.insert_or_assign(Prompt{1, v}, Reply::query(Term::var(3, kNat)));
    t.insert_or_assign(Prompt{1, v, v}, Reply::value(v));
    for (Nat u = 0; u <= bound; ++u) {
      if (v <= 1) t.insert_or_assign(Prompt{0, v, u}, Reply::value(u));
    }
  }
  return make_table_system({{"pif", {type, std::move(t)}}}, true);
}

System make_por_table(Nat bound) {
  Type type = Type::function(std::array{kNat, kNat}, kNat);
  Table t;
  t.insert_or_assign(Prompt{}, Reply::hash());
  t.insert_or_assign(Prompt{0}, Reply::query(Term::var(1, kNat)));
  if (bound >= 1) t.insert_or_assign(Prompt{0, 1}, Reply::value(1));
  t.insert_or_assign(Prompt{0, 0}, Reply::query(Term::var(2, kNat)));
  for (Nat v = 0; v <= bound; ++v) t.insert_or_assign(Prompt{0, 0, v}, Reply::value(v));
  if (bound >= 1) {
    t.insert_or_assign(Prompt{1}, Reply::query(Term::var(2, kNat)));
    t.insert_or_assign(Prompt{1, 1}, Reply::value(1));
  }
  return make_table_system({{"por", {type, std::move(t)}}}, true);
}

// --- strict finite functions -------------------------------------------------

std::optional<Nat> StrictFiniteFunction::apply(Nat x) const {
  for (auto& [a, b] : entries)
    if (a == x) return b;
  return std::nullopt;
}

StrictFiniteFunction make_strict_finite(std::vector<std::pair<Nat, Nat>> entries) {
  std::sort(entries.begin(), entries.end());
  for (size_t i = 0; i + 1 < entries.size(); ++i)
    if (entries[i].first == entries[i + 1].first &&
        entries[i].second != entries[i + 1].second)
      fail(Errc::InconsistentTables, "duplicate argument in a strict finite function");
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
  return {std::move(entries)};
}

bool consistent(const StrictFiniteFunction& f, const StrictFiniteFunction& g) {
  for (auto& [a, b] : f.entries) {
    auto v = g.apply(a);
    if (v && *v != b) return false;
  }
  return true;
}

StrictFiniteFunction merge(const StrictFiniteFunction& f, const StrictFiniteFunction& g) {
  if (!consistent(f, g))
    fail(Errc::InconsistentTables, "union of inconsistent strict finite functions");
  auto entries = f.entries;
  entries.insert(entries.end(), g.entries.begin(), g.entries.end());
  return make_strict_finite(std::move(entries));
}

namespace {

Nat checked(unsigned __int128 v, const char* what) {
  if (v > static_cast<unsigned __int128>(~Nat{0}))
    fail(Errc::BudgetExceeded, std::string("numbering overflow in ") + what);
  return static_cast<Nat>(v);
}

Nat pair_code(Nat x, Nat y) {
  unsigned __int128 s = static_cast<unsigned __int128>(x) + y;
  unsigned __int128 tri = s * (s + 1) / 2;
  return checked(tri + y, "pair");
}

std::pair<Nat, Nat> unpair_code(Nat z) {
  // Largest s with s(s+1)/2 <= z.
  Nat s = static_cast<Nat>((std::sqrt(8.0L * static_cast<long double>(z) + 1.0L) - 1.0L) / 2.0L);
  while ((static_cast<unsigned __int128>(s) + 1) * (s + 2) / 2 <= z) ++s;
  while (static_cast<unsigned __int128>(s) * (s + 1) / 2 > z) --s;
  Nat tri = static_cast<Nat>(static_cast<unsigned __int128>(s) * (s + 1) / 2);
  Nat y = z - tri;
  Nat x = s - y;
  return {x, y};
}

}  // namespace

Nat encode_strict_finite(const StrictFiniteFunction& f) {
  // Entries are sorted by argument; arguments are coded as gaps so that
  // every natural decodes to a valid sorted table (the numbering is a
  // bijection).
  Nat code = 0;
  Nat prev = 0;
  bool first = true;
  std::vector<Nat> items;
  for (auto& [a, b] : f.entries) {
    Nat delta = first ? a : a - prev - 1;
    items.push_back(pair_code(delta, b));
    prev = a;
    first = false;
  }
  for (auto it = items.rbegin(); it != items.rend(); ++it)
    code = checked(static_cast<unsigned __int128>(pair_code(*it, code)) + 1, "list");
  return code;
}

StrictFiniteFunction decode_strict_finite(Nat code) {
  StrictFiniteFunction f;
  Nat prev = 0;
  bool first = true;
  while (code != 0) {
    auto [item, rest] = unpair_code(code - 1);
    auto [delta, b] = unpair_code(item);
    Nat a = first ? delta : prev + 1 + delta;
    f.entries.emplace_back(a, b);
    prev = a;
    first = false;
    code = rest;
  }
  return f;
}

System strict_finite_strategy(const std::string& name, const StrictFiniteFunction& f) {
  Table t;
  t.insert_or_assign(Prompt{}, Reply::query(Term::var(1, kNat)));
  for (auto& [a, b] : f.entries) t.insert_or_assign(Prompt{a}, Reply::value(b));
  return make_table_system({{name, {Type::arrow(kNat, kNat), std::move(t)}}}, false);
}

// --- strict level-2 universal ------------------------------------------------

namespace {

bool union_exists(const std::vector<Nat>& alpha, const std::vector<Nat>& beta,
                  size_t count) {
  for (size_t i = 0; i < count; ++i)
    for (size_t j = i + 1; j < count; ++j) {
      if (beta[i] == beta[j]) continue;
      if (consistent(decode_strict_finite(alpha[i]), decode_strict_finite(alpha[j])))
        return false;
    }
  return true;
}

}  // namespace

std::pair<std::vector<Nat>, std::vector<Nat>> correct(std::vector<Nat> alpha,
                                                      std::vector<Nat> beta) {
  size_t len = std::min(alpha.size(), beta.size());
  size_t keep = 0;
  while (keep < len && union_exists(alpha, beta, keep + 1)) ++keep;
  alpha.resize(keep);
  beta.resize(keep);
  return {std::move(alpha), std::move(beta)};
}

std::pair<System, std::string> strict_universal(std::vector<Nat> alpha,
                                                std::vector<Nat> beta,
                                                bool apply_correction) {
  if (alpha.size() != beta.size())
    fail(Errc::InconsistentTables, "alpha and beta must have the same length");
  if (apply_correction) {
    auto [a, b] = correct(std::move(alpha), std::move(beta));
    alpha = std::move(a);
    beta = std::move(b);
  } else if (!union_exists(alpha, beta, alpha.size())) {
    fail(Errc::InconsistentTables,
         "the union of the strict finite tables does not exist");
  }

  Type type = Type::arrow(Type::arrow(kNat, kNat), kNat);
  Table t;
  if (!alpha.empty()) {
    t.insert_or_assign(Prompt{}, Reply::hash());
    for (size_t k = 0; k < alpha.size(); ++k) {
      auto phi = decode_strict_finite(alpha[k]);
      Prompt w{static_cast<Nat>(k)};
      for (auto& [a, b] : phi.entries) {
        t.insert_or_assign(
            w, Reply::query(Term::app(Term::var(1, Type::arrow(kNat, kNat)),
                                      numeral_term(a))));
        w.push_back(b);
      }
      t.insert_or_assign(w, Reply::value(beta[k]));
    }
  }
  return {make_table_system({{"ustrict", {type, std::move(t)}}}, true), "ustrict"};
}

// --- term enumeration and the star transform ---------------------------------

TermEnumeration::TermEnumeration(std::vector<std::pair<std::string, Type>> names,
                                 std::vector<std::pair<int, Type>> vars)
    : names_(std::move(names)), vars_(std::move(vars)) {
  std::sort(names_.begin(), names_.end());
}

void TermEnumeration::grow() {
  if (next_size_ > 40)
    fail(Errc::BudgetExceeded, "term enumeration grew past size 40");
  int s = next_size_++;
  std::vector<Term> layer;
  if (s == 1) {
    for (auto& [n, t] : names_) layer.push_back(Term::name(n, t));
    for (auto& [i, t] : vars_) layer.push_back(Term::var(i, t));
  } else {
    for (int ls = 1; ls < s; ++ls) {
      for (const Term& f : by_size_[ls - 1]) {
        if (f.type().is_ground()) continue;
        for (const Term& x : by_size_[s - ls - 1])
          if (x.type() == f.type().argument())
            layer.push_back(Term::app(f, x));
      }
    }
  }
  for (const Term& t : layer)
    if (t.type().is_ground()) {
      index_.emplace(t.to_string(), ground_.size());
      ground_.push_back(t);
    }
  by_size_.push_back(std::move(layer));
}

Term TermEnumeration::at(size_t index) {
  while (ground_.size() <= index) grow();
  return ground_[index];
}

size_t TermEnumeration::index_of(const Term& term) {
  std::string key = term.to_string();
  for (;;) {
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    grow();
  }
}

std::shared_ptr<TermEnumeration> star_enumeration(const System& system,
                                                  const std::string& name) {
  std::vector<std::pair<std::string, Type>> vocabulary;
  for (auto& n : system.declared()) vocabulary.emplace_back(n, system.type_of(n));
  return std::make_shared<TermEnumeration>(std::move(vocabulary),
                                           canonical_variables(system.type_of(name)));
}

std::pair<System, std::string> star_transform(const System& system,
                                              const std::string& name) {
  auto enumeration = star_enumeration(system, name);
  auto mutex = std::make_shared<std::mutex>();
  std::string star_name = name + "_star";
  Type type = Type::arrow(Type::arrow(kNat, kNat), kNat);
  RespondFn respond = [system, name, enumeration, mutex](PromptView w) -> Reply {
    Reply r = system.respond(name, w);
    if (!r.is_query()) return r;
    std::lock_guard<std::mutex> lock(*mutex);
    size_t a = enumeration->index_of(r.query_term());
    return Reply::query(Term::app(Term::var(1, Type::arrow(kNat, kNat)),
                                  numeral_term(static_cast<Nat>(a))));
  };
  System star = make_programmatic_system(
      {}, {{star_name, {type, std::move(respond)}}}, system.nondeterministic());
  return {union_system(std::move(star), system), star_name};
}

}  // namespace stratagem
