#include <mutex>

#include "stratagem/error.hpp"
#include "stratagem/library.hpp"
#include "stratagem/machine.hpp"
#include "stratagem/strategy.hpp"

namespace stratagem {

namespace {

std::string canon_name(const Term& closed_term) {
  return "cn[[" + closed_term.to_string() + "]]";
}

bool is_canon_name(const std::string& name) {
  return name.size() > 6 && name.substr(0, 4) == "cn[[" &&
         name.substr(name.size() - 2) == "]]";
}

// Canonical-form wrapper: cn[[T]] behaves as the derived strategy [[T]] with
// every query argument D{x} rewritten to a full application (c x1...xn) of a
// closed child c, itself canonicalized lazily. Children are either the head
// of an already-full application or the bracket abstraction (lambda x.D)
// compiled to S/K/I.
class CanonImpl : public SystemImpl {
 public:
  CanonImpl(System base, SearchBudget budget)
      : base_(std::move(base)), derived_(derived_system(base_, budget)) {}

  bool contains(const std::string& name) const override {
    if (base_.contains(name)) return true;
    if (!is_canon_name(name)) return false;
    return try_term(name) != nullptr;
  }

  Type type_of(const std::string& name) const override {
    if (base_.contains(name)) return base_.type_of(name);
    const Term* t = is_canon_name(name) ? try_term(name) : nullptr;
    if (!t) fail(Errc::UnknownStrategy, "unknown strategy: " + name);
    return t->type();
  }

  Reply respond(const std::string& name, PromptView prompt) const override {
    if (base_.contains(name)) return base_.respond(name, prompt);
    const Term* t = is_canon_name(name) ? try_term(name) : nullptr;
    if (!t) fail(Errc::UnknownStrategy, "unknown strategy: " + name);
    Reply r = derived_.respond(derived_name(*t), prompt);
    if (!r.is_query()) return r;
    return Reply::query(rewrite_query(r.query_term(), t->type()));
  }

  bool nondeterministic() const override { return base_.nondeterministic(); }
  std::vector<std::string> declared() const override { return base_.declared(); }
  const TableStrategy* table(const std::string& name) const override {
    return base_.table(name);
  }

 private:
  const Term* try_term(const std::string& name) const {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = terms_.find(name);
      if (it != terms_.end()) return it->second ? &*it->second : nullptr;
    }
    std::optional<Term> parsed;
    try {
      std::string inner = name.substr(4, name.size() - 6);
      parsed = Term::parse(
          inner, [this](const std::string& n) { return derived_.type_of(n); },
          [](int i) -> Type {
            fail(Errc::IllTyped, "variable $" + std::to_string(i) +
                                     " in a canonicalized-strategy name");
          });
      if (parsed->contains_var() || parsed->contains_hole()) parsed.reset();
    } catch (const Error&) {
      parsed.reset();
    }
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, _] = terms_.try_emplace(name, std::move(parsed));
    return it->second ? &*it->second : nullptr;
  }

  // True when `argument` is exactly (name x1 ... xn) for the canonical list.
  static bool full_application_shape(const Term& argument, size_t n) {
    if (argument.head().kind() != Term::Kind::Name) return false;
    auto inner = argument.spine_args();
    if (inner.size() != n) return false;
    for (size_t i = 0; i < inner.size(); ++i)
      if (inner[i].kind() != Term::Kind::Var ||
          inner[i].var_index() != static_cast<int>(i) + 1)
        return false;
    return true;
  }

  Term rewrite_query(const Term& query, const Type& strategy_type) const {
    auto vars = canonical_variables(strategy_type);
    Term head = query.head();
    // Derived-strategy queries are always variable-headed (case 2 of the
    // machine outcome display).
    Term out = head;
    for (const Term& argument : query.spine_args()) {
      Term child_term = full_application_shape(argument, vars.size())
                            ? argument.head()
                            : bracket_abstract(vars, argument);
      Term child = Term::name(canon_name(child_term), child_term.type());
      for (auto& [i, vt] : vars) child = Term::app(std::move(child), Term::var(i, vt));
      out = Term::app(std::move(out), std::move(child));
    }
    return out;
  }

  System base_;
  System derived_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::optional<Term>> terms_;
};

}  // namespace

std::pair<System, std::string> canonicalize(const System& system,
                                            const std::string& name) {
  if (is_canonical(system, name)) return {system, name};
  Type type = system.type_of(name);
  // Children produced by bracket abstraction need the combinator namespace.
  System base = union_system(system, builtin_system(Lang::Pcf));
  System canon(std::make_shared<CanonImpl>(std::move(base), SearchBudget{}));
  return {canon, canon_name(Term::name(name, type))};
}

}  // namespace stratagem
