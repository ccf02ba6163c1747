#include "stratagem/equivalence.hpp"

#include <algorithm>
#include <sstream>

#include "stratagem/error.hpp"
#include "stratagem/strategy.hpp"
#include "stratagem/strategy_file.hpp"

namespace stratagem {

bool ground_leq(const EvalOutcome& a, const EvalOutcome& b) {
  if (a.kind != OutcomeKind::Result) return true;
  return b.kind == OutcomeKind::Result && b.value == a.value;
}

namespace {

const Type kNat = Type::ground();

// Variable-only ground query terms over the canonical list, by size.
// For rank >= 1, also applications with numeral arguments.
std::vector<Term> query_pool(const Type& type, const ArgumentBounds& bounds) {
  auto vars = canonical_variables(type);
  std::vector<Term> atoms;
  for (auto& [i, vt] : vars) atoms.push_back(Term::var(i, vt));
  if (bounds.max_rank >= 1)
    for (Nat v = 0; v <= bounds.max_value; ++v)
      atoms.push_back(Term::name(numeral_name(v), kNat));

  // Close under application up to size 3.
  std::vector<Term> pool = atoms;
  std::vector<Term> layer = atoms;
  for (int round = 0; round < 2; ++round) {
    std::vector<Term> next;
    for (const Term& f : pool)
      if (!f.type().is_ground())
        for (const Term& x : layer)
          if (x.type() == f.type().argument()) next.push_back(Term::app(f, x));
    for (auto& t : next) pool.push_back(t);
    layer = std::move(next);
    if (layer.empty()) break;
  }
  std::vector<Term> ground;
  for (auto& t : pool)
    if (t.type().is_ground()) ground.push_back(t);
  std::sort(ground.begin(), ground.end(), [](const Term& a, const Term& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  ground.erase(std::unique(ground.begin(), ground.end()), ground.end());
  // Rank 0 strategies may not mention numerals in query arguments.
  if (bounds.max_rank < 1) {
    std::vector<Term> vars_only;
    for (auto& t : ground)
      if (occurrences(t).empty()) vars_only.push_back(t);
    return vars_only;
  }
  return ground;
}

// Behaviour trees: a table with at most `budget` defined entries is Bottom
// (no entry), a Value leaf, or a Query with subtrees per answer; queries
// never repeat along a path (self-consistency holds by construction).
struct TreeEnumerator {
  const std::vector<Term>& pool;
  Nat max_value;

  // All tables with <= budget entries using only queries whose pool indices
  // are in `available` along the current path.
  std::vector<Table> enumerate(size_t budget, std::vector<size_t> available) {
    std::vector<Table> out;
    out.push_back({});  // Bottom everywhere
    if (budget == 0) return out;
    for (Nat v = 0; v <= max_value; ++v) {
      Table t;
      t.emplace(Prompt{}, Reply::value(v));
      out.push_back(std::move(t));
    }
    for (size_t pos = 0; pos < available.size(); ++pos) {
      size_t qi = available[pos];
      std::vector<size_t> rest = available;
      rest.erase(rest.begin() + static_cast<long>(pos));
      std::vector<Table> continuations = enumerate(budget - 1, rest);
      // Assignments answer -> continuation index; index 0 (Bottom) is
      // omitted from the map.
      std::vector<std::map<Nat, size_t>> assignments{{}};
      for (Nat a = 0; a <= max_value; ++a) {
        std::vector<std::map<Nat, size_t>> next;
        for (auto& partial : assignments)
          for (size_t ci = 0; ci < continuations.size(); ++ci) {
            auto with = partial;
            if (ci != 0) with[a] = ci;
            next.push_back(std::move(with));
          }
        assignments = std::move(next);
      }
      for (auto& assignment : assignments) {
        Table t;
        t.emplace(Prompt{}, Reply::query(pool[qi]));
        for (auto& [answer, ci] : assignment)
          for (auto& [w, r] : continuations[ci]) {
            Prompt shifted{answer};
            shifted.insert(shifted.end(), w.begin(), w.end());
            t.emplace(std::move(shifted), r);
          }
        if (t.size() <= budget) out.push_back(std::move(t));
      }
    }
    return out;
  }
};

std::string table_repr(const TableStrategy& s) {
  std::ostringstream os;
  for (auto& [w, r] : s.table)
    os << prompt_to_string(w) << "->" << r.to_string() << ";";
  return os.str();
}

}  // namespace

std::string EnumeratedStrategy::describe() const {
  if (strategy.table.empty()) return "bot";
  if (strategy.table.size() == 1 && strategy.table.begin()->second.is_value() &&
      strategy.table.begin()->first.empty())
    return std::to_string(strategy.table.begin()->second.value());
  return table_repr(strategy);
}

std::vector<EnumeratedStrategy> enumerate_strategies(const Type& type,
                                                     const ArgumentBounds& bounds) {
  std::vector<Term> pool = query_pool(type, bounds);
  TreeEnumerator en{pool, bounds.max_value};
  std::vector<size_t> all;
  for (size_t i = 0; i < pool.size(); ++i) all.push_back(i);
  std::vector<Table> tables = en.enumerate(bounds.max_entries, all);

  std::vector<EnumeratedStrategy> out;
  std::set<std::string> seen;
  for (auto& t : tables) {
    if (t.size() > bounds.max_entries) continue;
    TableStrategy s{type, std::move(t)};
    std::string key = table_repr(s);
    if (seen.insert(key).second) out.push_back({std::move(s)});
  }
  std::sort(out.begin(), out.end(),
            [](const EnumeratedStrategy& a, const EnumeratedStrategy& b) {
              if (a.strategy.table.size() != b.strategy.table.size())
                return a.strategy.table.size() < b.strategy.table.size();
              return table_repr(a.strategy) < table_repr(b.strategy);
            });
  return out;
}

std::vector<std::vector<EnumeratedStrategy>> enumerate_arguments(
    const std::vector<Type>& types, const ArgumentBounds& bounds) {
  std::vector<std::vector<EnumeratedStrategy>> per_type;
  for (auto& t : types) per_type.push_back(enumerate_strategies(t, bounds));

  std::vector<std::vector<EnumeratedStrategy>> tuples{{}};
  for (auto& choices : per_type) {
    std::vector<std::vector<EnumeratedStrategy>> next;
    for (auto& partial : tuples)
      for (auto& choice : choices) {
        auto with = partial;
        with.push_back(choice);
        next.push_back(std::move(with));
      }
    tuples = std::move(next);
  }
  std::sort(tuples.begin(), tuples.end(),
            [](const auto& a, const auto& b) {
              size_t sa = 0, sb = 0;
              for (auto& s : a) sa += s.strategy.table.size();
              for (auto& s : b) sb += s.strategy.table.size();
              if (sa != sb) return sa < sb;
              std::string ra, rb;
              for (auto& s : a) ra += table_repr(s.strategy) + "|";
              for (auto& s : b) rb += table_repr(s.strategy) + "|";
              return ra < rb;
            });
  return tuples;
}

namespace {

// Installs a tuple as strategies arg1.. argN over the base system and
// returns the application task p arg1 ... argN.
std::pair<System, Term> install_tuple(const System& base, const std::string& p,
                                      const std::vector<EnumeratedStrategy>& tuple) {
  std::map<std::string, TableStrategy> args;
  for (size_t i = 0; i < tuple.size(); ++i)
    args.emplace("arg" + std::to_string(i + 1), tuple[i].strategy);
  System merged =
      union_system(make_table_system(std::move(args), false), base);
  Term task = Term::name(p, base.type_of(p));
  for (size_t i = 0; i < tuple.size(); ++i) {
    std::string an = "arg" + std::to_string(i + 1);
    task = Term::app(std::move(task), Term::name(an, merged.type_of(an)));
  }
  return {std::move(merged), std::move(task)};
}

}  // namespace

std::string to_string(const RefutationVerdict& v) {
  if (!v.refuted) {
    std::ostringstream os;
    os << "NotRefuted after " << v.samples << " argument tuples (rank<="
       << v.bounds.max_rank << ", entries<=" << v.bounds.max_entries
       << ", values<=" << v.bounds.max_value << ")";
    if (v.inconclusive) os << ", " << v.inconclusive << " inconclusive";
    return os.str();
  }
  std::ostringstream os;
  os << "REFUTED: " << v.left_task << " = " << to_string(v.left.kind);
  if (v.left.kind == OutcomeKind::Result) os << " " << v.left.value;
  os << " but " << v.right_task << " = " << to_string(v.right.kind);
  if (v.right.kind == OutcomeKind::Result) os << " " << v.right.value;
  if (v.fuel_caveat) os << " (fuel caveat)";
  return os.str();
}

RefutationVerdict refute_preorder(const System& system, const std::string& p,
                                  const std::string& q, const ArgumentBounds& bounds,
                                  const SearchBudget& budget) {
  Type tp = system.type_of(p);
  Type tq = system.type_of(q);
  if (!(tp == tq))
    fail(Errc::TypeMismatch, "refute_preorder needs equal types, got " +
                                 tp.to_string() + " vs " + tq.to_string());
  RefutationVerdict verdict;
  verdict.bounds = bounds;
  auto tuples = enumerate_arguments(tp.argument_list(), bounds);
  for (auto& tuple : tuples) {
    ++verdict.samples;
    auto [sys_p, task_p] = install_tuple(system, p, tuple);
    EvalOutcome left = eval_ground(sys_p, task_p, budget);
    if (left.kind == OutcomeKind::FuelExhausted) {
      ++verdict.inconclusive;
      continue;
    }
    if (left.kind != OutcomeKind::Result) continue;
    auto [sys_q, task_q] = install_tuple(system, q, tuple);
    EvalOutcome right = eval_ground(sys_q, task_q, budget);
    if (!ground_leq(left, right)) {
      verdict.refuted = true;
      for (size_t i = 0; i < tuple.size(); ++i)
        verdict.witness_args.emplace_back("arg" + std::to_string(i + 1),
                                          tuple[i].strategy);
      verdict.left = left;
      verdict.right = right;
      verdict.left_task = task_p.to_string();
      verdict.right_task = task_q.to_string();
      verdict.fuel_caveat = right.kind == OutcomeKind::FuelExhausted;
      return verdict;
    }
  }
  return verdict;
}

bool replay_witness(const System& system, const std::string& p, const std::string& q,
                    const RefutationVerdict& verdict, const SearchBudget& budget) {
  if (!verdict.refuted) return false;
  std::map<std::string, TableStrategy> args(verdict.witness_args.begin(),
                                            verdict.witness_args.end());
  System merged = union_system(make_table_system(std::move(args), false), system);
  auto apply_args = [&](const std::string& root) {
    Term task = Term::name(root, merged.type_of(root));
    for (auto& [an, _] : verdict.witness_args)
      task = Term::app(std::move(task), Term::name(an, merged.type_of(an)));
    return task;
  };
  EvalOutcome left = eval_ground(merged, apply_args(p), budget);
  EvalOutcome right = eval_ground(merged, apply_args(q), budget);
  if (left.kind != OutcomeKind::Result) return false;
  return right.kind != OutcomeKind::Result || right.value != left.value;
}

std::string witness_to_text(const std::string& p, const std::string& q,
                            const RefutationVerdict& verdict) {
  std::ostringstream os;
  os << "-- preorder refutation witness\n";
  os << "-- left:  " << verdict.left_task << " = " << to_string(verdict.left.kind);
  if (verdict.left.kind == OutcomeKind::Result) os << " " << verdict.left.value;
  os << "\n-- right: " << verdict.right_task << " = " << to_string(verdict.right.kind);
  if (verdict.right.kind == OutcomeKind::Result) os << " " << verdict.right.value;
  os << "\n-- compare " << p << " vs " << q << "\n";
  std::map<std::string, TableStrategy> args(verdict.witness_args.begin(),
                                            verdict.witness_args.end());
  bool nondet = false;
  for (auto& [n, s] : args)
    for (auto& [w, r] : s.table)
      if (r.is_hash()) nondet = true;
  os << print_strategy_file(make_table_system(std::move(args), nondet));
  return os.str();
}

ContextProbeReport context_probe(const System& system, const std::string& q,
                                 const std::string& q2, size_t max_observers,
                                 const ArgumentBounds& bounds,
                                 const SearchBudget& budget) {
  ContextProbeReport report;
  report.direct = refute_preorder(system, q, q2, bounds, budget);

  Type alpha = system.type_of(q);
  auto tuples = enumerate_arguments(alpha.argument_list(), bounds);

  // Observers p : alpha -> nat with the separating shape
  //   p x = if x a1..an = v then c else bottom.
  for (auto& tuple : tuples) {
    if (report.observers_tried >= max_observers) break;
    for (Nat v = 0; v <= bounds.max_value && report.observers_tried < max_observers;
         ++v) {
      Nat c = v;  // one output value per guard suffices to separate
      ++report.observers_tried;
      std::map<std::string, TableStrategy> obs;
      Term probe = Term::var(1, alpha);
      for (size_t i = 0; i < tuple.size(); ++i) {
        obs.emplace("obsarg" + std::to_string(i + 1), tuple[i].strategy);
        probe = Term::app(std::move(probe),
                          Term::name("obsarg" + std::to_string(i + 1),
                                     tuple[i].strategy.type));
      }
      Table pt;
      pt.emplace(Prompt{}, Reply::query(std::move(probe)));
      pt.emplace(Prompt{v}, Reply::value(c));
      obs.emplace("observer", TableStrategy{Type::arrow(alpha, kNat), std::move(pt)});
      bool nondet = system.nondeterministic();
      System merged = union_system(make_table_system(std::move(obs), nondet), system);
      Term left = Term::app(Term::name("observer", Type::arrow(alpha, kNat)),
                            Term::name(q, alpha));
      Term right = Term::app(Term::name("observer", Type::arrow(alpha, kNat)),
                             Term::name(q2, alpha));
      EvalOutcome lo = eval_ground(merged, left, budget);
      if (lo.kind != OutcomeKind::Result) continue;
      EvalOutcome ro = eval_ground(merged, right, budget);
      if (ro.kind != OutcomeKind::Result || ro.value != lo.value) {
        report.observer_refuted = true;
        report.observer_description =
            "observer x -> if x tuple = " + std::to_string(v) + " then " +
            std::to_string(c) + " else bottom, tuple #" +
            std::to_string(report.observers_tried);
        break;
      }
    }
    if (report.observer_refuted) break;
  }
  report.agree = report.direct.refuted == report.observer_refuted;
  return report;
}

}  // namespace stratagem
