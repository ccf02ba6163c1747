#include "stratagem/machine.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "stratagem/error.hpp"

namespace stratagem {

std::string configuration_to_string(const Configuration& config) {
  std::string out;
  for (size_t i = 0; i < config.size(); ++i) {
    if (i) out += " · ";
    if (std::holds_alternative<Nat>(config[i]))
      out += std::to_string(std::get<Nat>(config[i]));
    else
      out += "(" + std::get<Term>(config[i]).to_string() + ")";
  }
  return out;
}

std::string to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Result: return "Result";
    case OutcomeKind::VariableQuery: return "VariableQuery";
    case OutcomeKind::DeadEnd: return "DeadEnd";
    case OutcomeKind::PrefixResult: return "PrefixResult";
    case OutcomeKind::FuelExhausted: return "FuelExhausted";
    case OutcomeKind::RuntimeInconsistency: return "RuntimeInconsistency";
  }
  return "?";
}

namespace {

// Index of the last Term in the configuration, or npos.
size_t last_term_index(const Configuration& config) {
  for (size_t i = config.size(); i-- > 0;)
    if (std::holds_alternative<Term>(config[i])) return i;
  return static_cast<size_t>(-1);
}

Prompt trailing_prompt(const Configuration& config, size_t term_index) {
  Prompt w;
  for (size_t i = term_index + 1; i < config.size(); ++i)
    w.push_back(std::get<Nat>(config[i]));
  return w;
}

}  // namespace

StepRule step(const System& system, Configuration& config) {
  size_t i = last_term_index(config);
  if (i == static_cast<size_t>(-1)) return StepRule::None;
  const Term C = std::get<Term>(config[i]);
  const Term head = C.head();

  if (head.kind() == Term::Kind::Var) {
    // H3 needs C final and a numeric prompt at the front.
    if (i + 1 == config.size() && !config.empty() &&
        std::holds_alternative<Nat>(config.front())) {
      Nat v = std::get<Nat>(config.front());
      config.erase(config.begin());
      config.back() = v;
      return StepRule::H3;
    }
    return StepRule::None;
  }

  if (head.kind() != Term::Kind::Name) return StepRule::None;  // holes never run
  Prompt w = trailing_prompt(config, i);
  Reply r = system.respond(head.name_text(), w);
  switch (r.kind()) {
    case Reply::Kind::Value:
      config.resize(i);
      config.push_back(r.value());
      return StepRule::H1;
    case Reply::Kind::Query: {
      auto args = C.spine_args();
      Term sub = substitute_vars(r.query_term(), args);
      config.push_back(std::move(sub));
      return StepRule::H2;
    }
    case Reply::Kind::Hash:
      return StepRule::Hash;
    case Reply::Kind::Bottom:
      return StepRule::None;
  }
  return StepRule::None;
}

namespace {

enum class BranchEnd { Result, VariableQuery, DeadEnd, PrefixResult, Fuel, NeedHash };

struct BranchState {
  BranchEnd end;
  Nat value = 0;
  std::optional<Term> query;
  Configuration residue;
};

// Runs H1-H3 deterministically until a terminal state or a Hash reply.
BranchState run_branch(const System& system, Configuration& config, Nat fuel,
                       Nat& steps, Nat& total_steps, Nat total_cap,
                       const TraceSink& trace) {
  for (;;) {
    size_t i = last_term_index(config);
    if (i == static_cast<size_t>(-1)) {
      if (config.size() == 1)
        return {BranchEnd::Result, std::get<Nat>(config[0]), std::nullopt, {}};
      BranchState s{BranchEnd::PrefixResult, std::get<Nat>(config.back()),
                    std::nullopt, config};
      return s;
    }
    const Term& C = std::get<Term>(config[i]);
    if (C.head().kind() == Term::Kind::Var && i + 1 == config.size() &&
        std::holds_alternative<Term>(config.front())) {
      // Case 2: the prompt is exhausted and a variable-headed task waits.
      return {BranchEnd::VariableQuery, 0, C, config};
    }
    if (steps >= fuel || total_steps >= total_cap)
      return {BranchEnd::Fuel, 0, std::nullopt, {}};
    StepRule rule = step(system, config);
    if (rule == StepRule::None) return {BranchEnd::DeadEnd, 0, std::nullopt, {}};
    if (rule == StepRule::Hash) return {BranchEnd::NeedHash, 0, std::nullopt, {}};
    ++steps;
    ++total_steps;
    if (trace) trace(steps, rule, config);
  }
}

struct SearchState {
  const System& system;
  const SearchBudget& budget;
  const TraceSink& trace;
  Nat total_cap;
  Nat total_steps = 0;
  Nat branches = 0;
  bool saw_fuel = false;

  std::optional<EvalOutcome> first_result;
  std::optional<EvalOutcome> first_query;
  std::optional<EvalOutcome> first_prefix;
  bool saw_dead_end = false;
  std::optional<EvalOutcome> conflict;

  // Lexicographic DFS over hash-answer scripts.
  void explore(Configuration config, Prompt script, Nat steps) {
    ++branches;
    BranchState state = run_branch(system, config, budget.fuel, steps,
                                   total_steps, total_cap, trace);
    switch (state.end) {
      case BranchEnd::Result: {
        if (first_result && first_result->value != state.value && !conflict) {
          EvalOutcome c;
          c.kind = OutcomeKind::RuntimeInconsistency;
          c.conflict_script_a = first_result->hash_script;
          c.conflict_value_a = first_result->value;
          c.conflict_script_b = script;
          c.conflict_value_b = state.value;
          conflict = c;
          return;
        }
        if (!first_result) {
          EvalOutcome o;
          o.kind = OutcomeKind::Result;
          o.value = state.value;
          o.hash_script = script;
          o.steps = steps;
          first_result = o;
        }
        return;
      }
      case BranchEnd::VariableQuery: {
        if (!first_query) {
          EvalOutcome o;
          o.kind = OutcomeKind::VariableQuery;
          o.query = state.query;
          o.residue = state.residue;
          o.hash_script = script;
          o.steps = steps;
          first_query = o;
        }
        return;
      }
      case BranchEnd::PrefixResult: {
        if (!first_prefix) {
          EvalOutcome o;
          o.kind = OutcomeKind::PrefixResult;
          o.value = state.value;
          o.residue = state.residue;
          o.hash_script = script;
          o.steps = steps;
          first_prefix = o;
        }
        return;
      }
      case BranchEnd::DeadEnd:
        saw_dead_end = true;
        return;
      case BranchEnd::Fuel:
        saw_fuel = true;
        return;
      case BranchEnd::NeedHash: {
        if (script.size() >= budget.hash_depth || total_steps >= total_cap) {
          saw_fuel = true;  // search truncated, not a definite dead end
          return;
        }
        if (trace) trace(steps, StepRule::Hash, config);
        for (Nat r = 0; r < budget.hash_bound; ++r) {
          if (conflict) return;
          Configuration next = config;
          next.push_back(r);
          Prompt s = script;
          s.push_back(r);
          explore(std::move(next), std::move(s), steps);
        }
        return;
      }
    }
  }
};

}  // namespace

EvalOutcome run_configuration(const System& system, PromptView u, const Term& seed,
                              const SearchBudget& budget, const TraceSink& trace) {
  Term task = seed;
  for (auto& [i, vt] : canonical_variables(seed.type()))
    task = Term::app(std::move(task), Term::var(i, vt));
  Configuration config;
  for (Nat v : u) config.push_back(v);
  config.push_back(std::move(task));

  SearchState search{system, budget, trace,
                     budget.fuel * std::max<Nat>(Nat{1}, budget.hash_depth)};
  search.explore(std::move(config), {}, 0);

  EvalOutcome out;
  if (search.conflict) {
    out = *search.conflict;
  } else if (search.first_result) {
    out = *search.first_result;
  } else if (search.first_query) {
    out = *search.first_query;
  } else if (search.saw_fuel) {
    out.kind = OutcomeKind::FuelExhausted;
  } else if (search.first_prefix) {
    out = *search.first_prefix;
  } else {
    out.kind = OutcomeKind::DeadEnd;
  }
  out.total_steps = search.total_steps;
  out.branches = search.branches;
  out.saw_fuel_exhaustion = search.saw_fuel;
  return out;
}

EvalOutcome eval_ground(const System& system, const Term& task,
                        const SearchBudget& budget, const TraceSink& trace) {
  if (!task.type().is_ground())
    fail(Errc::IllTyped, "eval_ground needs a ground-type task, got " +
                             task.type().to_string());
  if (!task.is_closed())
    fail(Errc::IllTyped, "eval_ground needs a closed task");
  return run_configuration(system, {}, task, budget, trace);
}

EvalOutcome run_scripted(const System& system, PromptView u, const Term& seed,
                         const SearchBudget& budget, PromptView script,
                         const TraceSink& trace) {
  Term task = seed;
  for (auto& [i, vt] : canonical_variables(seed.type()))
    task = Term::app(std::move(task), Term::var(i, vt));
  Configuration config;
  for (Nat v : u) config.push_back(v);
  config.push_back(std::move(task));

  EvalOutcome out;
  Nat steps = 0;
  Nat total = 0;
  Nat cap = budget.fuel * std::max<Nat>(Nat{1}, budget.hash_depth);
  size_t next_answer = 0;
  for (;;) {
    BranchState state =
        run_branch(system, config, budget.fuel, steps, total, cap, trace);
    if (state.end == BranchEnd::NeedHash) {
      if (next_answer >= script.size()) {
        out.kind = OutcomeKind::FuelExhausted;
        out.saw_fuel_exhaustion = true;
        break;
      }
      config.push_back(script[next_answer++]);
      continue;
    }
    switch (state.end) {
      case BranchEnd::Result:
        out.kind = OutcomeKind::Result;
        out.value = state.value;
        break;
      case BranchEnd::VariableQuery:
        out.kind = OutcomeKind::VariableQuery;
        out.query = state.query;
        out.residue = state.residue;
        break;
      case BranchEnd::PrefixResult:
        out.kind = OutcomeKind::PrefixResult;
        out.value = state.value;
        out.residue = state.residue;
        break;
      case BranchEnd::DeadEnd:
        out.kind = OutcomeKind::DeadEnd;
        break;
      case BranchEnd::Fuel:
        out.kind = OutcomeKind::FuelExhausted;
        out.saw_fuel_exhaustion = true;
        break;
      case BranchEnd::NeedHash:
        break;
    }
    break;
  }
  out.hash_script = Prompt(script.begin(), script.begin() + next_answer);
  out.steps = steps;
  out.total_steps = total;
  return out;
}

std::string derived_name(const Term& closed_term) {
  return "[[" + closed_term.to_string() + "]]";
}

bool is_derived_name(const std::string& name) {
  return name.size() > 4 && name.substr(0, 2) == "[[" &&
         name.substr(name.size() - 2) == "]]";
}

namespace {

class DerivedImpl : public SystemImpl {
 public:
  DerivedImpl(System base, SearchBudget budget)
      : base_(std::move(base)), budget_(budget) {}

  bool contains(const std::string& name) const override {
    if (base_.contains(name)) return true;
    if (!is_derived_name(name)) return false;
    return try_term(name) != nullptr;
  }

  Type type_of(const std::string& name) const override {
    if (base_.contains(name)) return base_.type_of(name);
    const Term* t = try_term(name);
    if (!t) fail(Errc::UnknownStrategy, "unknown strategy: " + name);
    return t->type();
  }

  Reply respond(const std::string& name, PromptView prompt) const override {
    if (base_.contains(name)) return base_.respond(name, prompt);
    const Term* seed = try_term(name);
    if (!seed) fail(Errc::UnknownStrategy, "unknown strategy: " + name);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = memo_.find({name, Prompt(prompt.begin(), prompt.end())});
      if (it != memo_.end()) return it->second;
    }
    Reply r = compute(*seed, prompt);
    std::lock_guard<std::mutex> lock(mutex_);
    return memo_.try_emplace({name, Prompt(prompt.begin(), prompt.end())}, r)
        .first->second;
  }

  bool nondeterministic() const override { return base_.nondeterministic(); }
  std::vector<std::string> declared() const override { return base_.declared(); }
  const TableStrategy* table(const std::string& name) const override {
    return base_.table(name);
  }

  void self(const std::weak_ptr<const DerivedImpl>& w) { self_ = w; }

 private:
  System self_system() const {
    return System(std::shared_ptr<const SystemImpl>(self_.lock()));
  }

  // Parses the inner term of a [[...]] name in the derived namespace itself,
  // so nested derived names resolve. Returns nullptr when unparsable.
  const Term* try_term(const std::string& name) const {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = terms_.find(name);
      if (it != terms_.end()) return it->second ? &*it->second : nullptr;
    }
    std::optional<Term> parsed;
    try {
      System self = self_system();
      parsed = Term::parse(
          std::string_view(name).substr(2, name.size() - 4),
          [&self](const std::string& n) { return self.type_of(n); },
          [](int i) -> Type {
            fail(Errc::IllTyped, "variable $" + std::to_string(i) +
                                     " in a derived-strategy name");
          });
      if (parsed->contains_var() || parsed->contains_hole()) parsed.reset();
    } catch (const Error&) {
      parsed.reset();
    }
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, _] = terms_.try_emplace(name, std::move(parsed));
    return it->second ? &*it->second : nullptr;
  }

  Reply compute(const Term& seed_term, PromptView prompt) const {
    System self = self_system();
    EvalOutcome out = run_configuration(self, prompt, seed_term, budget_);
    switch (out.kind) {
      case OutcomeKind::Result:
        return Reply::value(out.value);
      case OutcomeKind::VariableQuery:
        return Reply::query(
            splice(*out.query, [](const Term& b) { return derived_name(b); }));
      default:
        return Reply::bottom();  // case 3: dead-ended, infinite, or a prefix result
    }
  }

  System base_;
  SearchBudget budget_;
  std::weak_ptr<const DerivedImpl> self_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<std::string, Prompt>, Reply> memo_;
  mutable std::map<std::string, std::optional<Term>> terms_;
};

}  // namespace

System derived_system(System base, const SearchBudget& budget) {
  auto impl = std::make_shared<DerivedImpl>(std::move(base), budget);
  impl->self(impl);
  return System(impl);
}

std::pair<System, std::string> derived_strategy(const System& base,
                                                const Term& closed_term,
                                                const SearchBudget& budget) {
  if (!closed_term.is_closed())
    fail(Errc::IllTyped, "derived strategies need closed terms");
  System sys = derived_system(base, budget);
  return {sys, derived_name(closed_term)};
}

size_t subterm_count(const Term& term) {
  if (term.kind() != Term::Kind::App) return 1;
  return 1 + subterm_count(term.fun()) + subterm_count(term.arg());
}

namespace {

Term regroup_walk(const Term& t, const std::vector<size_t>& grouping, size_t& index) {
  size_t my_index = index++;
  bool selected = std::find(grouping.begin(), grouping.end(), my_index) != grouping.end();
  Term rebuilt = t;
  if (t.kind() == Term::Kind::App) {
    Term f = regroup_walk(t.fun(), grouping, index);
    Term a = regroup_walk(t.arg(), grouping, index);
    rebuilt = Term::app(std::move(f), std::move(a));
  }
  if (selected && !rebuilt.contains_var())
    return Term::name(derived_name(rebuilt), rebuilt.type());
  return rebuilt;
}

}  // namespace

Term regroup(const Term& task, const std::vector<size_t>& grouping) {
  size_t index = 0;
  return regroup_walk(task, grouping, index);
}

bool assoc_probe(const System& system, const Term& task,
                 const std::vector<size_t>& grouping, const SearchBudget& budget) {
  EvalOutcome direct = eval_ground(system, task, budget);
  Term regrouped = regroup(task, grouping);
  EvalOutcome grouped = eval_ground(derived_system(system, budget), regrouped, budget);
  if (direct.kind != grouped.kind) return false;
  if (direct.kind == OutcomeKind::Result && direct.value != grouped.value)
    return false;
  return true;
}

}  // namespace stratagem
