#include "stratagem/system.hpp"

#include <algorithm>
#include <sstream>

#include "stratagem/error.hpp"

namespace stratagem {

std::string prompt_to_string(PromptView w) {
  if (w.empty()) return "_";
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) out += " ";
    out += std::to_string(w[i]);
  }
  return out;
}

std::string Reply::to_string() const {
  switch (kind_) {
    case Kind::Value:
      return std::to_string(value_);
    case Kind::Query:
      return "? " + query_->to_string();
    case Kind::Hash:
      return "#";
    case Kind::Bottom:
      return "bot";
  }
  return "?";
}

bool System::contains(const std::string& name) const {
  return impl_ && impl_->contains(name);
}

Type System::type_of(const std::string& name) const {
  if (!contains(name))
    fail(Errc::UnknownStrategy, "unknown strategy: " + name);
  return impl_->type_of(name);
}

Reply System::respond(const std::string& name, PromptView prompt) const {
  if (!contains(name))
    fail(Errc::UnknownStrategy, "unknown strategy: " + name);
  return impl_->respond(name, prompt);
}

bool System::nondeterministic() const {
  return impl_ && impl_->nondeterministic();
}

std::vector<std::string> System::declared() const {
  return impl_ ? impl_->declared() : std::vector<std::string>{};
}

const TableStrategy* System::table(const std::string& name) const {
  return impl_ ? impl_->table(name) : nullptr;
}

Term System::parse_term(std::string_view text, const Type& of) const {
  auto vars = canonical_variables(of);
  return Term::parse(
      text,
      [this](const std::string& n) { return type_of(n); },
      [&vars](int i) -> Type {
        if (i < 1 || static_cast<size_t>(i) > vars.size())
          fail(Errc::IllTyped, "variable $" + std::to_string(i) +
                                   " is outside the canonical list");
        return vars[i - 1].second;
      });
}

Term System::parse_closed_term(std::string_view text) const {
  return Term::parse(
      text, [this](const std::string& n) { return type_of(n); },
      [](int i) -> Type {
        fail(Errc::IllTyped,
             "variable $" + std::to_string(i) + " in a closed term");
      });
}

namespace {

class TableSystemImpl : public SystemImpl {
 public:
  TableSystemImpl(std::map<std::string, TableStrategy> tables,
                  std::map<std::string, ProgrammaticStrategy> rules,
                  bool nondet)
      : tables_(std::move(tables)), rules_(std::move(rules)), nondet_(nondet) {}

  bool contains(const std::string& name) const override {
    return tables_.count(name) || rules_.count(name);
  }

  Type type_of(const std::string& name) const override {
    if (auto it = tables_.find(name); it != tables_.end()) return it->second.type;
    return rules_.at(name).type;
  }

  Reply respond(const std::string& name, PromptView prompt) const override {
    if (auto it = tables_.find(name); it != tables_.end()) {
      auto entry = it->second.table.find(Prompt(prompt.begin(), prompt.end()));
      if (entry == it->second.table.end()) return Reply::bottom();
      return entry->second;
    }
    return rules_.at(name).respond(prompt);
  }

  bool nondeterministic() const override { return nondet_; }

  std::vector<std::string> declared() const override {
    std::vector<std::string> names;
    for (auto& [n, _] : tables_) names.push_back(n);
    for (auto& [n, _] : rules_) names.push_back(n);
    return names;
  }

  const TableStrategy* table(const std::string& name) const override {
    auto it = tables_.find(name);
    return it == tables_.end() ? nullptr : &it->second;
  }

 private:
  std::map<std::string, TableStrategy> tables_;
  std::map<std::string, ProgrammaticStrategy> rules_;
  bool nondet_;
};

class UnionImpl : public SystemImpl {
 public:
  UnionImpl(System front, System back)
      : front_(std::move(front)), back_(std::move(back)) {}

  bool contains(const std::string& name) const override {
    return front_.contains(name) || back_.contains(name);
  }
  Type type_of(const std::string& name) const override {
    return front_.contains(name) ? front_.type_of(name) : back_.type_of(name);
  }
  Reply respond(const std::string& name, PromptView prompt) const override {
    return front_.contains(name) ? front_.respond(name, prompt)
                                 : back_.respond(name, prompt);
  }
  bool nondeterministic() const override {
    return front_.nondeterministic() || back_.nondeterministic();
  }
  std::vector<std::string> declared() const override {
    auto names = front_.declared();
    for (auto& n : back_.declared())
      if (!front_.contains(n)) names.push_back(n);
    return names;
  }
  const TableStrategy* table(const std::string& name) const override {
    if (front_.contains(name)) return front_.table(name);
    return back_.table(name);
  }

 private:
  System front_, back_;
};

}  // namespace

System make_table_system(std::map<std::string, TableStrategy> strategies,
                         bool nondeterministic) {
  return System(std::make_shared<TableSystemImpl>(
      std::move(strategies), std::map<std::string, ProgrammaticStrategy>{},
      nondeterministic));
}

System make_programmatic_system(std::map<std::string, TableStrategy> tables,
                                std::map<std::string, ProgrammaticStrategy> rules,
                                bool nondeterministic) {
  return System(std::make_shared<TableSystemImpl>(
      std::move(tables), std::move(rules), nondeterministic));
}

System union_system(System front, System back) {
  return System(std::make_shared<UnionImpl>(std::move(front), std::move(back)));
}

std::map<std::string, TableStrategy> tables_of(const System& system) {
  std::map<std::string, TableStrategy> out;
  for (auto& name : system.declared()) {
    const TableStrategy* t = system.table(name);
    if (!t)
      fail(Errc::NotFinite, "strategy " + name + " is not table-backed");
    out.emplace(name, *t);
  }
  return out;
}

bool same_tables(const System& a, const System& b) {
  auto ta = tables_of(a);
  auto tb = tables_of(b);
  if (ta.size() != tb.size()) return false;
  for (auto& [name, strat] : ta) {
    auto it = tb.find(name);
    if (it == tb.end()) return false;
    if (!(it->second.type == strat.type)) return false;
    if (it->second.table.size() != strat.table.size()) return false;
    auto jt = it->second.table.begin();
    for (auto& [w, r] : strat.table) {
      if (jt->first != w || !(jt->second == r)) return false;
      ++jt;
    }
  }
  return true;
}

}  // namespace stratagem
