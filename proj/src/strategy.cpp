#include "stratagem/strategy.hpp"

#include <algorithm>
#include <set>

#include "stratagem/error.hpp"

namespace stratagem {

std::string to_string(const Violation& v) {
  std::string kind;
  switch (v.kind) {
    case Violation::Kind::Prefix: kind = "prefix"; break;
    case Violation::Kind::SelfConsistency: kind = "self-consistency"; break;
    case Violation::Kind::BadQueryVariable: kind = "query-variable"; break;
    case Violation::Kind::HashInSequential: kind = "hash-in-sequential"; break;
  }
  return kind + " violation at (" + v.strategy + ", " +
         prompt_to_string(v.prompt) + "): " + v.detail;
}

namespace {

// All prompts with values <= bound and length <= len, in length-lex order.
std::vector<Prompt> bounded_prompts(Nat bound, size_t len) {
  std::vector<Prompt> out{{}};
  std::vector<Prompt> layer{{}};
  for (size_t l = 1; l <= len; ++l) {
    std::vector<Prompt> next;
    for (auto& w : layer)
      for (Nat v = 0; v <= bound; ++v) {
        Prompt u = w;
        u.push_back(v);
        next.push_back(u);
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

// The prompts on which a strategy is defined: table keys for table-backed
// strategies, a bounded probe sweep otherwise.
std::vector<Prompt> defined_prompts(const System& system, const std::string& name,
                                    Nat bound) {
  std::vector<Prompt> out;
  if (const TableStrategy* t = system.table(name)) {
    for (auto& [w, _] : t->table) out.push_back(w);
    return out;
  }
  for (auto& w : bounded_prompts(bound, static_cast<size_t>(bound)))
    if (system.respond(name, w).defined()) out.push_back(w);
  return out;
}

bool query_vars_canonical(const Term& q, const Type& strategy_type) {
  auto vars = canonical_variables(strategy_type);
  bool ok = true;
  std::function<void(const Term&)> walk = [&](const Term& t) {
    if (t.kind() == Term::Kind::Var) {
      int i = t.var_index();
      if (i < 1 || static_cast<size_t>(i) > vars.size() ||
          !(vars[i - 1].second == t.type()))
        ok = false;
    } else if (t.kind() == Term::Kind::App) {
      walk(t.fun());
      walk(t.arg());
    }
  };
  walk(q);
  return ok && q.type().is_ground();
}

void check_one(const System& system, const std::string& name, Nat bound,
               std::vector<Violation>& out) {
  Type type = system.type_of(name);
  auto prompts = defined_prompts(system, name, bound);
  bool nondet = system.nondeterministic();

  for (auto& w : prompts) {
    Reply r = system.respond(name, w);
    if (r.is_hash() && !nondet)
      out.push_back({Violation::Kind::HashInSequential, name, w,
                     "# reply in a sequential system"});
    if (r.is_query() && !query_vars_canonical(r.query_term(), type))
      out.push_back({Violation::Kind::BadQueryVariable, name, w,
                     "query " + r.query_term().to_string() +
                         " uses variables outside the canonical list"});
    // Prefix condition: every proper prefix must reply with a query or #.
    for (size_t l = 0; l < w.size(); ++l) {
      Reply p = system.respond(name, PromptView(w.data(), l));
      if (p.is_value() || p.is_bottom()) {
        out.push_back({Violation::Kind::Prefix, name, w,
                       "defined after " + prompt_to_string(PromptView(w.data(), l)) +
                           " which replies " + p.to_string()});
        break;
      }
    }
    // Self-consistency: within w, equal queries must get equal answers.
    for (size_t i = 0; i < w.size(); ++i) {
      Reply ri = system.respond(name, PromptView(w.data(), i));
      if (!ri.is_query()) continue;
      for (size_t j = i + 1; j < w.size(); ++j) {
        Reply rj = system.respond(name, PromptView(w.data(), j));
        if (rj.is_query() && ri.query_term() == rj.query_term() && w[i] != w[j]) {
          out.push_back({Violation::Kind::SelfConsistency, name, w,
                         "query " + ri.query_term().to_string() + " answered " +
                             std::to_string(w[i]) + " then " + std::to_string(w[j])});
          i = w.size();
          break;
        }
      }
    }
  }
}

}  // namespace

std::vector<Violation> well_formed_strategy(const System& system,
                                            const std::string& name,
                                            Nat prompt_bound) {
  std::vector<Violation> out;
  check_one(system, name, prompt_bound, out);
  return out;
}

std::vector<Violation> well_formed(const System& system, Nat prompt_bound) {
  std::vector<Violation> out;
  for (auto& name : system.declared()) check_one(system, name, prompt_bound, out);
  return out;
}

namespace {

// m-consistency of a prompt pair: no shared Basic-Term query answered
// differently. Hash positions are unconstrained.
bool m_consistent(const System& system, const std::string& name,
                  const Prompt& w, const Prompt& u) {
  for (size_t i = 0; i < w.size(); ++i) {
    Reply ri = system.respond(name, PromptView(w.data(), i));
    if (!ri.is_query()) continue;
    for (size_t j = 0; j < u.size(); ++j) {
      Reply rj = system.respond(name, PromptView(u.data(), j));
      if (rj.is_query() && ri.query_term() == rj.query_term() && w[i] != u[j])
        return false;
    }
  }
  return true;
}

}  // namespace

ConsistencyReport check_wittingly_consistent(const System& system,
                                             const std::string& name) {
  const TableStrategy* t = system.table(name);
  if (!t)
    fail(Errc::NotFinite,
         "witting-consistency check needs a finite table for " + name);
  std::vector<std::pair<Prompt, Nat>> values;
  for (auto& [w, r] : t->table)
    if (r.is_value()) values.emplace_back(w, r.value());
  for (size_t a = 0; a < values.size(); ++a)
    for (size_t b = a + 1; b < values.size(); ++b) {
      if (values[a].second == values[b].second) continue;
      if (m_consistent(system, name, values[a].first, values[b].first)) {
        ConsistencyReport rep;
        rep.consistent = false;
        rep.strategy = name;
        rep.first = values[a].first;
        rep.second = values[b].first;
        rep.first_value = values[a].second;
        rep.second_value = values[b].second;
        return rep;
      }
    }
  return {};
}

ConsistencyReport check_wittingly_consistent(const System& system) {
  for (auto& name : system.declared()) {
    ConsistencyReport rep = check_wittingly_consistent(system, name);
    if (!rep.consistent) return rep;
  }
  return {};
}

namespace {

// Canonical-shape test per the displayed form: head variable applied to
// arguments that are each a name applied to x1..xn in order.
bool canonical_query_shape(const Term& q, const Type& strategy_type) {
  if (q.head().kind() != Term::Kind::Var) return false;
  auto vars = canonical_variables(strategy_type);
  for (const Term& argument : q.spine_args()) {
    if (argument.head().kind() != Term::Kind::Name) return false;
    auto inner = argument.spine_args();
    if (inner.size() != vars.size()) return false;
    for (size_t i = 0; i < inner.size(); ++i) {
      if (inner[i].kind() != Term::Kind::Var) return false;
      if (inner[i].var_index() != static_cast<int>(i) + 1) return false;
    }
  }
  return true;
}

}  // namespace

bool is_canonical(const System& system, const std::string& name,
                  Nat prompt_bound) {
  Type type = system.type_of(name);
  for (auto& w : defined_prompts(system, name, prompt_bound)) {
    Reply r = system.respond(name, w);
    if (r.is_query() && !canonical_query_shape(r.query_term(), type))
      return false;
  }
  return true;
}

namespace {

Reply rename_reply(const Reply& r,
                   const std::function<std::string(const std::string&)>& phi,
                   const System& typer) {
  if (!r.is_query()) return r;
  std::function<Term(const Term&)> walk = [&](const Term& t) -> Term {
    switch (t.kind()) {
      case Term::Kind::Name:
        return Term::name(phi(t.name_text()), t.type());
      case Term::Kind::App:
        return Term::app(walk(t.fun()), walk(t.arg()));
      default:
        return t;
    }
  };
  (void)typer;
  return Reply::query(walk(r.query_term()));
}

}  // namespace

System apply_homomorphism(const std::map<std::string, std::string>& phi,
                          const System& system) {
  auto lookup = [&phi](const std::string& n) -> std::string {
    auto it = phi.find(n);
    if (it == phi.end())
      fail(Errc::NotAHomomorphism, "name map is not total: missing " + n);
    return it->second;
  };
  std::map<std::string, TableStrategy> image;
  for (auto& name : system.declared()) {
    const TableStrategy* t = system.table(name);
    if (!t) fail(Errc::NotFinite, "apply_homomorphism needs finite tables");
    std::string target = lookup(name);
    auto [it, fresh] = image.try_emplace(target, TableStrategy{t->type, {}});
    if (!fresh && !(it->second.type == t->type))
      fail(Errc::TypeMismatch, "homomorphism changes the type of " + name);
    for (auto& [w, r] : t->table) {
      Reply renamed = rename_reply(r, lookup, system);
      auto [jt, inserted] = it->second.table.try_emplace(w, renamed);
      if (!inserted && !(jt->second == renamed))
        fail(Errc::NotAHomomorphism,
             "merged strategies disagree at (" + target + ", " +
                 prompt_to_string(w) + ")");
    }
  }
  return make_table_system(std::move(image), system.nondeterministic());
}

bool check_homomorphism(
    const std::function<std::string(const std::string&)>& phi,
    const System& source, const System& image,
    const std::vector<std::pair<std::string, Prompt>>& probes) {
  for (auto& [name, w] : probes) {
    Reply expect = rename_reply(source.respond(name, w), phi, source);
    Reply got = image.respond(phi(name), w);
    if (!(expect == got)) return false;
  }
  return true;
}

}  // namespace stratagem
