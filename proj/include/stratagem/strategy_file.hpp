#ifndef STRATAGEM_STRATEGY_FILE_HPP
#define STRATAGEM_STRATEGY_FILE_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stratagem/library.hpp"
#include "stratagem/system.hpp"

namespace stratagem {

// Strategy table files (UTF-8, line-oriented):
//   -- comment
//   mode nondeterministic        (required before any # rule)
//   root <name>                  (optional; default entry point)
//   strategy <name> : <type>     declares a table-backed strategy
//   rule <name> | <p1 p2 ...|_> -> <rhs>
//        rhs: a natural, '#', 'bot', or '? <basic-term>'
//   builtin <name>               references a library builtin by name
//   define <name> := <term>      a derived strategy for a closed term
// `bot` rules are accepted and dropped (a table stores only defined
// entries). Defines may reference tables, builtins and earlier defines.
struct LoadedFile {
  System system;
  std::optional<std::string> root;
  bool nondeterministic = false;
};

LoadedFile parse_strategy_file(std::istream& in, const std::string& filename = "<input>");
LoadedFile parse_strategy_text(const std::string& text, const std::string& filename = "<input>");
LoadedFile load_strategy_file(const std::string& path);

// Serializes the finite (table-backed) part of a system. parse(print(s))
// equals s on finite systems.
std::string print_strategy_file(const System& system,
                                const std::optional<std::string>& root = std::nullopt);

}  // namespace stratagem

#endif
