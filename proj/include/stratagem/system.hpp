#ifndef STRATAGEM_SYSTEM_HPP
#define STRATAGEM_SYSTEM_HPP

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "stratagem/basics.hpp"
#include "stratagem/reply.hpp"
#include "stratagem/type.hpp"

namespace stratagem {

// One strategy's finite table: the defined part of its response function.
// Absent prompts mean Bottom. Replies stored here are Value/Query/Hash only.
using Table = std::map<Prompt, Reply>;

struct TableStrategy {
  Type type;
  Table table;
};

class SystemImpl;

// A system of strategies: typed names with a response function
//   respond : names x N* -> Value | Query | Hash | Bottom.
// Value-semantic handle over an immutable implementation; respond is pure,
// memo tables inside implementations are internally synchronized.
class System {
 public:
  System() = default;
  explicit System(std::shared_ptr<const SystemImpl> impl) : impl_(std::move(impl)) {}

  bool valid() const { return impl_ != nullptr; }
  bool contains(const std::string& name) const;
  Type type_of(const std::string& name) const;  // throws UnknownStrategy
  Reply respond(const std::string& name, PromptView prompt) const;
  bool nondeterministic() const;

  // The explicitly declared (finite) name list. Lazy namespaces (builtins,
  // derived strategies, ranked pairs) resolve more names than declared here.
  std::vector<std::string> declared() const;
  // Finite-table backing for a name, or nullptr when the strategy is
  // programmatic or lazily derived.
  const TableStrategy* table(const std::string& name) const;

  const std::shared_ptr<const SystemImpl>& impl() const { return impl_; }

  // Parses a term in this system's name vocabulary; variable types are the
  // canonical list of `of` when given.
  Term parse_term(std::string_view text, const Type& of) const;
  Term parse_closed_term(std::string_view text) const;

 private:
  std::shared_ptr<const SystemImpl> impl_;
};

class SystemImpl {
 public:
  virtual ~SystemImpl() = default;
  virtual bool contains(const std::string& name) const = 0;
  virtual Type type_of(const std::string& name) const = 0;
  virtual Reply respond(const std::string& name, PromptView prompt) const = 0;
  virtual bool nondeterministic() const = 0;
  virtual std::vector<std::string> declared() const { return {}; }
  virtual const TableStrategy* table(const std::string&) const { return nullptr; }
};

// A finite system backed entirely by tables.
System make_table_system(std::map<std::string, TableStrategy> strategies,
                         bool nondeterministic);

// A programmatic strategy: a total rule.
using RespondFn = std::function<Reply(PromptView)>;

struct ProgrammaticStrategy {
  Type type;
  RespondFn respond;
};

System make_programmatic_system(std::map<std::string, TableStrategy> tables,
                                std::map<std::string, ProgrammaticStrategy> rules,
                                bool nondeterministic);

// Left-biased union: names resolve in `front` first, then `back`.
System union_system(System front, System back);

// The finite tables of a system, gathered from declared names.
// Throws NotFinite if any declared name is not table-backed.
std::map<std::string, TableStrategy> tables_of(const System& system);

bool same_tables(const System& a, const System& b);

}  // namespace stratagem

#endif
