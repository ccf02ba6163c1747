#include "stratagem/strategy_file.hpp"

#include <fstream>
#include <sstream>

#include "stratagem/error.hpp"
#include "stratagem/machine.hpp"

namespace stratagem {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

struct RawRule {
  std::string strategy;
  std::string prompt;
  std::string rhs;
  int line;
};

struct RawDefine {
  std::string name;
  std::string term;
  int line;
};

}  // namespace

LoadedFile parse_strategy_file(std::istream& in, const std::string& filename) {
  std::map<std::string, TableStrategy> tables;
  std::vector<std::string> builtins;
  std::vector<RawDefine> defines;
  std::vector<RawRule> rules;
  bool nondet = false;
  std::optional<std::string> root;

  auto err = [&filename](int line, const std::string& what) -> void {
    fail(Errc::ParseError, filename + ":" + std::to_string(line) + ": " + what);
  };

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto dash = line.find("--"); dash != std::string::npos)
      line = line.substr(0, dash);
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword == "mode") {
      std::string mode;
      ls >> mode;
      if (mode != "nondeterministic") err(lineno, "unknown mode: " + mode);
      nondet = true;
    } else if (keyword == "root") {
      std::string name;
      ls >> name;
      if (name.empty()) err(lineno, "root needs a name");
      root = name;
    } else if (keyword == "strategy") {
      std::string rest = trim(line.substr(keyword.size()));
      auto colon = rest.find(':');
      if (colon == std::string::npos) err(lineno, "strategy needs `name : type`");
      std::string name = trim(rest.substr(0, colon));
      Type type = Type::parse(rest.substr(colon + 1));
      if (name.empty()) err(lineno, "strategy needs a name");
      if (!tables.try_emplace(name, TableStrategy{type, {}}).second)
        err(lineno, "duplicate strategy " + name);
    } else if (keyword == "rule") {
      std::string rest = trim(line.substr(keyword.size()));
      auto bar = rest.find('|');
      if (bar == std::string::npos) err(lineno, "rule needs `name | prompt -> rhs`");
      auto arrow = rest.find("->", bar);
      if (arrow == std::string::npos) err(lineno, "rule needs ->");
      rules.push_back({trim(rest.substr(0, bar)),
                       trim(rest.substr(bar + 1, arrow - bar - 1)),
                       trim(rest.substr(arrow + 2)), lineno});
    } else if (keyword == "builtin") {
      std::string name;
      ls >> name;
      if (name.empty()) err(lineno, "builtin needs a name");
      builtins.push_back(name);
    } else if (keyword == "define") {
      std::string rest = trim(line.substr(keyword.size()));
      auto assign = rest.find(":=");
      if (assign == std::string::npos) err(lineno, "define needs `name := term`");
      defines.push_back({trim(rest.substr(0, assign)),
                         trim(rest.substr(assign + 2)), lineno});
    } else {
      err(lineno, "unknown directive: " + keyword);
    }
  }

  Lang lang = nondet ? Lang::PcfPlus : Lang::Pcf;
  System builtin_ns = builtin_system(lang);
  for (auto& b : builtins)
    if (!builtin_ns.contains(b))
      fail(Errc::UnknownStrategy,
           filename + ": builtin " + b + " is not in the library" +
               (nondet ? "" : " (sequential mode)"));

  // Declarations first, then rules; queries may reference any declared
  // strategy, any builtin, or any define (resolved below, after defines).
  System table_part = make_table_system(tables, nondet);
  System base = union_system(table_part, builtin_ns);

  // Defines in order; each may use earlier defines.
  System with_defines = base;
  for (auto& d : defines) {
    System derived = derived_system(with_defines);
    Term term = derived.parse_closed_term(d.term);
    std::string alias = derived_name(term);
    Type type = term.type();
    RespondFn respond = [derived, alias](PromptView w) {
      return derived.respond(alias, w);
    };
    System alias_sys = make_programmatic_system(
        {}, {{d.name, {type, std::move(respond)}}}, nondet);
    with_defines = union_system(std::move(alias_sys), with_defines);
  }

  // Parse the rules against the full namespace and rebuild the tables.
  for (auto& r : rules) {
    auto it = tables.find(r.strategy);
    if (it == tables.end())
      err(r.line, "rule for undeclared strategy " + r.strategy);
    Prompt w;
    if (r.prompt != "_") {
      std::istringstream ps(r.prompt);
      std::string tok;
      while (ps >> tok) {
        try {
          w.push_back(std::stoull(tok));
        } catch (...) {
          err(r.line, "bad prompt element: " + tok);
        }
      }
    }
    Reply reply = Reply::bottom();
    if (r.rhs == "bot") {
      continue;  // a table stores only defined entries
    } else if (r.rhs == "#") {
      if (!nondet) err(r.line, "# rule outside `mode nondeterministic`");
      reply = Reply::hash();
    } else if (!r.rhs.empty() && r.rhs[0] == '?') {
      std::string text = trim(r.rhs.substr(1));
      auto vars = canonical_variables(it->second.type);
      Term q = Term::parse(
          text,
          [&with_defines](const std::string& n) { return with_defines.type_of(n); },
          [&vars](int i) -> Type {
            if (i < 1 || static_cast<size_t>(i) > vars.size())
              fail(Errc::IllTyped, "variable $" + std::to_string(i) +
                                       " outside the canonical list");
            return vars[i - 1].second;
          });
      if (!q.type().is_ground())
        err(r.line, "query must have ground type");
      reply = Reply::query(std::move(q));
    } else {
      try {
        reply = Reply::value(std::stoull(r.rhs));
      } catch (...) {
        err(r.line, "bad rule right-hand side: " + r.rhs);
      }
    }
    if (!it->second.table.emplace(w, reply).second)
      err(r.line, "duplicate rule for (" + r.strategy + ", " + r.prompt + ")");
  }

  // Rebuild with the filled tables.
  System filled = make_table_system(std::move(tables), nondet);
  System full = union_system(filled, builtin_ns);
  for (auto& d : defines) {
    // Rebind aliases over the filled tables.
    System derived = derived_system(full);
    Term term = derived.parse_closed_term(d.term);
    std::string alias = derived_name(term);
    Type type = term.type();
    RespondFn respond = [derived, alias](PromptView w) {
      return derived.respond(alias, w);
    };
    System alias_sys = make_programmatic_system(
        {}, {{d.name, {type, std::move(respond)}}}, nondet);
    full = union_system(std::move(alias_sys), full);
  }

  LoadedFile out;
  out.system = std::move(full);
  out.root = root;
  out.nondeterministic = nondet;
  return out;
}

LoadedFile parse_strategy_text(const std::string& text, const std::string& filename) {
  std::istringstream in(text);
  return parse_strategy_file(in, filename);
}

LoadedFile load_strategy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::UsageError, "cannot open " + path);
  return parse_strategy_file(in, path);
}

std::string print_strategy_file(const System& system,
                                const std::optional<std::string>& root) {
  auto tables = tables_of(system);
  std::ostringstream out;
  bool nondet = false;
  for (auto& [name, strat] : tables)
    for (auto& [w, r] : strat.table)
      if (r.is_hash()) nondet = true;
  if (nondet) out << "mode nondeterministic\n";
  if (root) out << "root " << *root << "\n";
  for (auto& [name, strat] : tables)
    out << "strategy " << name << " : " << strat.type.to_string() << "\n";
  for (auto& [name, strat] : tables)
    for (auto& [w, r] : strat.table)
      out << "rule " << name << " | " << prompt_to_string(w) << " -> "
          << r.to_string() << "\n";
  return out.str();
}

}  // namespace stratagem
