#include "stratagem/finitary.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <mutex>

#include "stratagem/error.hpp"
#include "stratagem/strategy.hpp"

namespace stratagem {

namespace {

bool numeral_like(const std::string& name) {
  return !name.empty() &&
         std::all_of(name.begin(), name.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

System restrict_system(const System& system, const std::set<std::string>& keep,
                       const std::function<bool(const std::string&, PromptView)>&
                           entry_filter) {
  auto all = tables_of(system);
  std::map<std::string, TableStrategy> kept;
  for (auto& [name, strat] : all) {
    if (!keep.count(name)) continue;
    TableStrategy out{strat.type, {}};
    for (auto& [w, r] : strat.table) {
      if (entry_filter && !entry_filter(name, w)) continue;
      if (r.is_query())
        for (const Term& leaf : occurrences(r.query_term())) {
          const std::string& ref = leaf.name_text();
          if (all.count(ref) && !keep.count(ref))
            fail(Errc::DanglingReference,
                 "kept entry (" + name + ", " + prompt_to_string(w) +
                     ") references dropped strategy " + ref);
        }
      out.table.emplace(w, r);
    }
    kept.emplace(name, std::move(out));
  }
  return make_table_system(std::move(kept), system.nondeterministic());
}

namespace {

class KRestrictImpl : public SystemImpl {
 public:
  KRestrictImpl(System base, Nat k) : base_(std::move(base)), k_(k) {}

  bool contains(const std::string& name) const override {
    return base_.contains(name);
  }
  Type type_of(const std::string& name) const override {
    return base_.type_of(name);
  }
  Reply respond(const std::string& name, PromptView w) const override {
    for (Nat v : w)
      if (v > k_) return Reply::bottom();
    Reply r = base_.respond(name, w);
    if (r.is_value() && r.value() > k_) return Reply::bottom();
    return r;
  }
  bool nondeterministic() const override { return base_.nondeterministic(); }
  std::vector<std::string> declared() const override { return base_.declared(); }
  const TableStrategy* table(const std::string& name) const override {
    const TableStrategy* t = base_.table(name);
    if (!t) return nullptr;
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(name);
    if (it != cache_.end()) return &it->second;
    TableStrategy filtered{t->type, {}};
    for (auto& [w, r] : t->table) {
      if (std::any_of(w.begin(), w.end(), [this](Nat v) { return v > k_; })) continue;
      if (r.is_value() && r.value() > k_) continue;
      filtered.table.emplace(w, r);
    }
    return &cache_.emplace(name, std::move(filtered)).first->second;
  }

 private:
  System base_;
  Nat k_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, TableStrategy> cache_;
};

}  // namespace

System k_restrict(const System& system, Nat k) {
  return System(std::make_shared<KRestrictImpl>(system, k));
}

TableStrategy materialize_table(const System& system, const std::string& name,
                                Nat value_bound, size_t length_bound,
                                size_t max_entries) {
  TableStrategy out{system.type_of(name), {}};
  std::deque<Prompt> frontier{{}};
  while (!frontier.empty()) {
    Prompt w = std::move(frontier.front());
    frontier.pop_front();
    Reply r = system.respond(name, w);
    if (!r.defined()) continue;
    out.table.emplace(w, r);
    if (out.table.size() > max_entries)
      fail(Errc::BudgetExceeded, "materialize_table: more than " +
                                     std::to_string(max_entries) + " entries for " + name);
    // Values and Bottom cannot be extended (prefix condition); queries and
    // hash states can.
    if ((r.is_query() || r.is_hash()) && w.size() < length_bound)
      for (Nat v = 0; v <= value_bound; ++v) {
        Prompt u = w;
        u.push_back(v);
        frontier.push_back(std::move(u));
      }
  }
  return out;
}

// --- projections ---------------------------------------------------------------

namespace {

std::string psi_name(Nat k, const Type& t) {
  return "psi{" + std::to_string(k) + "," + t.to_string() + "}";
}

void build_psi(const Type& t, Nat k, std::map<std::string, TableStrategy>& out) {
  std::string name = psi_name(k, t);
  if (out.count(name)) return;
  Table table;
  Term query = Term::var(1, t);
  if (!t.is_ground()) {
    auto args = t.argument_list();
    for (size_t i = 0; i < args.size(); ++i) {
      build_psi(args[i], k, out);
      Term child = Term::name(psi_name(k, args[i]), Type::arrow(args[i], args[i]));
      query = Term::app(std::move(query),
                        Term::app(std::move(child),
                                  Term::var(static_cast<int>(i) + 2, args[i])));
    }
  }
  table.emplace(Prompt{}, Reply::query(std::move(query)));
  for (Nat v = 0; v <= k; ++v) table.emplace(Prompt{v}, Reply::value(v));
  out.emplace(name, TableStrategy{Type::arrow(t, t), std::move(table)});
}

}  // namespace

std::pair<System, std::string> projection_strategy(const Type& alpha, Nat k) {
  std::map<std::string, TableStrategy> tables;
  build_psi(alpha, k, tables);
  return {make_table_system(std::move(tables), false), psi_name(k, alpha)};
}

// --- ranked systems -------------------------------------------------------------

std::string ranked_name(const std::string& name, Nat rank) {
  return name + "@" + std::to_string(rank);
}

namespace {

// Splits m@n; returns false when the name has no numeric rank suffix.
bool split_ranked(const std::string& ranked, std::string& base, Nat& rank) {
  auto at = ranked.rfind('@');
  if (at == std::string::npos || at + 1 >= ranked.size()) return false;
  std::string digits = ranked.substr(at + 1);
  if (!numeral_like(digits)) return false;
  base = ranked.substr(0, at);
  try {
    rank = std::stoull(digits);
  } catch (...) {
    return false;
  }
  return true;
}

class RankTransformImpl : public SystemImpl {
 public:
  explicit RankTransformImpl(System base) : base_(std::move(base)) {}

  bool contains(const std::string& name) const override {
    std::string m;
    Nat n;
    return split_ranked(name, m, n) && base_.contains(m);
  }
  Type type_of(const std::string& name) const override {
    std::string m;
    Nat n;
    if (!split_ranked(name, m, n))
      fail(Errc::UnknownStrategy, "unknown ranked strategy: " + name);
    return base_.type_of(m);
  }
  Reply respond(const std::string& name, PromptView w) const override {
    std::string m;
    Nat n;
    if (!split_ranked(name, m, n))
      fail(Errc::UnknownStrategy, "unknown ranked strategy: " + name);
    Reply r = base_.respond(m, w);
    if (!r.is_query()) return r;
    Nat next = n + 1;
    std::function<Term(const Term&)> sub = [&](const Term& t) -> Term {
      switch (t.kind()) {
        case Term::Kind::Name:
          return Term::name(ranked_name(t.name_text(), next), t.type());
        case Term::Kind::App:
          return Term::app(sub(t.fun()), sub(t.arg()));
        default:
          return t;
      }
    };
    return Reply::query(sub(r.query_term()));
  }
  bool nondeterministic() const override { return base_.nondeterministic(); }
  std::vector<std::string> declared() const override {
    std::vector<std::string> out;
    for (auto& n : base_.declared()) out.push_back(ranked_name(n, 0));
    return out;
  }

 private:
  System base_;
};

}  // namespace

std::string rank_project(const std::string& ranked) {
  std::string base;
  Nat rank;
  if (!split_ranked(ranked, base, rank))
    fail(Errc::UnknownStrategy, "not a ranked name: " + ranked);
  return base;
}

System rank_transform(const System& system) {
  return System(std::make_shared<RankTransformImpl>(system));
}

// --- rank and finitary recognition ----------------------------------------------

namespace {

std::vector<std::string> table_children(const TableStrategy& strat) {
  std::vector<std::string> out;
  for (auto& [w, r] : strat.table)
    if (r.is_query())
      for (const Term& leaf : occurrences(r.query_term()))
        out.push_back(leaf.name_text());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct RankWalk {
  const System& system;
  std::map<std::string, int> state;  // 0 = visiting, 1 = done
  std::map<std::string, int> rank;
  std::string failure;

  // Longest descendant chain; -1 on failure (cycle or non-finite).
  int visit(const std::string& name) {
    auto st = state.find(name);
    if (st != state.end()) {
      if (st->second == 1) return rank[name];
      failure = "cycle through " + name;
      return -1;
    }
    state[name] = 0;
    const TableStrategy* t = system.table(name);
    int r = 0;
    if (!t) {
      if (!numeral_like(name)) {
        failure = "strategy " + name + " is not table-backed";
        return -1;
      }
      // numerals are rank-0 constants
    } else {
      for (auto& child : table_children(*t)) {
        int c = visit(child);
        if (c < 0) return -1;
        r = std::max(r, c + 1);
      }
    }
    state[name] = 1;
    rank[name] = r;
    return r;
  }
};

}  // namespace

int rank_of(const System& system, const std::string& name) {
  if (!system.contains(name))
    fail(Errc::UnknownStrategy, "unknown strategy: " + name);
  RankWalk walk{system};
  int r = walk.visit(name);
  if (r < 0) {
    if (walk.failure.find("cycle") != std::string::npos)
      fail(Errc::NotWellFounded, walk.failure);
    fail(Errc::NotFinite, walk.failure);
  }
  return r;
}

FinitaryCertificate is_finitary(const System& system, const std::string& name) {
  if (!system.contains(name))
    fail(Errc::UnknownStrategy, "unknown strategy: " + name);
  if (!system.table(name) && !numeral_like(name))
    fail(Errc::NotFinite, "is_finitary needs a finite table for " + name);
  RankWalk walk{system};
  FinitaryCertificate cert;
  int r = walk.visit(name);
  if (r < 0) {
    cert.finitary = false;
    cert.reason = walk.failure;
    return cert;
  }
  cert.finitary = true;
  cert.ranks = walk.rank;
  std::map<std::string, TableStrategy> sub;
  for (auto& [n, _] : walk.rank) {
    if (const TableStrategy* t = system.table(n)) {
      sub.emplace(n, *t);
    } else {
      Table constant;
      constant.emplace(Prompt{}, Reply::value(std::stoull(n)));
      sub.emplace(n, TableStrategy{Type::ground(), std::move(constant)});
    }
  }
  cert.subsystem = make_table_system(std::move(sub), false);
  return cert;
}

// --- vocabulary and tabulation ---------------------------------------------------

namespace {

void term_numerals(const Term& t, std::set<Nat>& out) {
  for (const Term& leaf : occurrences(t))
    if (numeral_like(leaf.name_text())) out.insert(std::stoull(leaf.name_text()));
}

}  // namespace

std::vector<Nat> system_vocabulary(const System& system, const Term* task) {
  std::set<Nat> vocab;
  for (auto& name : system.declared()) {
    const TableStrategy* t = system.table(name);
    if (!t) continue;
    for (auto& [w, r] : t->table) {
      for (Nat v : w) vocab.insert(v);
      if (r.is_value()) vocab.insert(r.value());
      if (r.is_query()) term_numerals(r.query_term(), vocab);
    }
    if (numeral_like(name)) vocab.insert(std::stoull(name));
  }
  if (task) term_numerals(*task, vocab);
  return std::vector<Nat>(vocab.begin(), vocab.end());
}

TabulateResult tabulate(const System& system, const Term& closed_term,
                        const SearchBudget& budget, size_t max_prompts) {
  if (!closed_term.is_closed())
    fail(Errc::IllTyped, "tabulate needs a closed term");
  TabulateResult result;
  result.vocabulary = system_vocabulary(system, &closed_term);
  result.sentinel =
      result.vocabulary.empty() ? 0 : result.vocabulary.back() + 1;
  result.root = derived_name(closed_term);

  System derived = derived_system(system, budget);
  std::map<std::string, Term> pending{{result.root, closed_term}};
  std::map<std::string, TableStrategy> tables;
  size_t prompts_explored = 0;

  while (!pending.empty()) {
    auto [name, term] = *pending.begin();
    pending.erase(pending.begin());
    if (tables.count(name)) continue;
    TableStrategy strat{term.type(), {}};
    std::deque<Prompt> frontier{{}};
    while (!frontier.empty()) {
      Prompt u = std::move(frontier.front());
      frontier.pop_front();
      if (++prompts_explored > max_prompts)
        fail(Errc::BudgetExceeded, "tabulate: prompt budget exceeded");
      EvalOutcome out = run_configuration(derived, u, term, budget);
      switch (out.kind) {
        case OutcomeKind::Result:
          strat.table.emplace(u, Reply::value(out.value));
          break;
        case OutcomeKind::VariableQuery: {
          std::vector<std::pair<std::string, Term>> children;
          Term q = splice(*out.query, [&children](const Term& b) {
            std::string n = derived_name(b);
            children.emplace_back(n, b);
            return n;
          });
          strat.table.emplace(u, Reply::query(std::move(q)));
          for (auto& [cn, ct] : children)
            if (!tables.count(cn)) pending.emplace(cn, ct);
          for (Nat v : result.vocabulary) {
            Prompt next = u;
            next.push_back(v);
            frontier.push_back(std::move(next));
          }
          // The sentinel answer must dead-end.
          Prompt sentinel_prompt = u;
          sentinel_prompt.push_back(result.sentinel);
          EvalOutcome s = run_configuration(derived, sentinel_prompt, term, budget);
          if (s.kind == OutcomeKind::Result || s.kind == OutcomeKind::VariableQuery ||
              s.kind == OutcomeKind::FuelExhausted)
            fail(Errc::BudgetExceeded,
                 "tabulate: sentinel answer does not dead-end after prompt " +
                     prompt_to_string(u));
          break;
        }
        case OutcomeKind::FuelExhausted:
          fail(Errc::BudgetExceeded, "tabulate: fuel exhausted at prompt " +
                                         prompt_to_string(u));
        default:
          break;  // Bottom: no entry
      }
    }
    tables.emplace(name, std::move(strat));
  }
  result.system = make_table_system(std::move(tables), system.nondeterministic());
  return result;
}

std::pair<System, std::map<std::string, std::string>> rename_for_export(
    const System& system) {
  auto tables = tables_of(system);
  std::map<std::string, std::string> renamed;
  std::set<std::string> taken;
  for (auto& [name, _] : tables) {
    bool plain = !name.empty() &&
                 std::all_of(name.begin(), name.end(), [](char c) {
                   return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                          c == '\'';
                 });
    if (plain) taken.insert(name);
  }
  int next = 0;
  for (auto& [name, _] : tables) {
    if (taken.count(name)) {
      renamed[name] = name;
      continue;
    }
    std::string candidate;
    do {
      candidate = "d" + std::to_string(next++);
    } while (taken.count(candidate));
    taken.insert(candidate);
    renamed[name] = candidate;
  }
  return {apply_homomorphism(renamed, system), renamed};
}

// --- support extraction -----------------------------------------------------------

namespace {

struct Recorder {
  std::map<std::pair<std::string, Prompt>, Reply> used;
};

class RecordingImpl : public SystemImpl {
 public:
  RecordingImpl(System base, std::shared_ptr<Recorder> rec)
      : base_(std::move(base)), rec_(std::move(rec)) {}

  bool contains(const std::string& name) const override {
    return base_.contains(name);
  }
  Type type_of(const std::string& name) const override {
    return base_.type_of(name);
  }
  Reply respond(const std::string& name, PromptView w) const override {
    Reply r = base_.respond(name, w);
    if (r.defined())
      rec_->used.emplace(std::make_pair(name, Prompt(w.begin(), w.end())), r);
    return r;
  }
  bool nondeterministic() const override { return base_.nondeterministic(); }
  std::vector<std::string> declared() const override { return base_.declared(); }
  const TableStrategy* table(const std::string& name) const override {
    return base_.table(name);
  }

 private:
  System base_;
  std::shared_ptr<Recorder> rec_;
};

}  // namespace

EvalOutcome eval_with_script(const System& system, const Term& task,
                             const SearchBudget& budget, PromptView script) {
  return run_scripted(system, {}, task, budget, script);
}

System extract_support(const System& system, const Term& task,
                       const SearchBudget& budget) {
  EvalOutcome out = eval_ground(system, task, budget);
  if (out.kind != OutcomeKind::Result)
    fail(Errc::NoResult,
         "task did not produce a Result (got " + to_string(out.kind) + ")");
  auto rec = std::make_shared<Recorder>();
  System recording(std::make_shared<RecordingImpl>(system, rec));
  EvalOutcome replay = run_scripted(recording, {}, task, budget, out.hash_script);
  if (replay.kind != OutcomeKind::Result || replay.value != out.value)
    fail(Errc::NoResult, "internal: scripted replay diverged from the search");

  std::map<std::string, TableStrategy> tables;
  bool nondet = false;
  for (auto& [key, reply] : rec->used) {
    auto& [name, prompt] = key;
    auto [it, _] = tables.try_emplace(name, TableStrategy{system.type_of(name), {}});
    it->second.table.emplace(prompt, reply);
    if (reply.is_hash()) nondet = true;
  }
  // Declare referenced-but-unconsulted names as empty tables so the
  // restriction is closed under query references.
  std::vector<std::string> refs;
  for (auto& [name, strat] : tables)
    for (auto& [w, r] : strat.table)
      if (r.is_query())
        for (const Term& leaf : occurrences(r.query_term()))
          refs.push_back(leaf.name_text());
  for (const Term& leaf : occurrences(task)) refs.push_back(leaf.name_text());
  for (auto& ref : refs)
    if (!tables.count(ref))
      tables.emplace(ref, TableStrategy{system.type_of(ref), {}});
  return make_table_system(std::move(tables), nondet);
}

}  // namespace stratagem
