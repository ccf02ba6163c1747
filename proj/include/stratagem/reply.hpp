#ifndef STRATAGEM_REPLY_HPP
#define STRATAGEM_REPLY_HPP

#include <optional>
#include <string>

#include "stratagem/basics.hpp"
#include "stratagem/term.hpp"

namespace stratagem {

// One entry of a response function: a final value, a ground-type query over
// the canonical variables, the nondeterministic state #, or Bottom
// (= the response function is undefined here).
class Reply {
 public:
  enum class Kind { Value, Query, Hash, Bottom };

  static Reply value(Nat v) { return Reply(Kind::Value, v, std::nullopt); }
  static Reply query(Term q) { return Reply(Kind::Query, 0, std::move(q)); }
  static Reply hash() { return Reply(Kind::Hash, 0, std::nullopt); }
  static Reply bottom() { return Reply(Kind::Bottom, 0, std::nullopt); }

  Kind kind() const { return kind_; }
  bool is_value() const { return kind_ == Kind::Value; }
  bool is_query() const { return kind_ == Kind::Query; }
  bool is_hash() const { return kind_ == Kind::Hash; }
  bool is_bottom() const { return kind_ == Kind::Bottom; }
  bool defined() const { return kind_ != Kind::Bottom; }

  Nat value() const { return value_; }
  const Term& query_term() const { return *query_; }

  bool operator==(const Reply& other) const {
    if (kind_ != other.kind_) return false;
    if (kind_ == Kind::Value) return value_ == other.value_;
    if (kind_ == Kind::Query) return *query_ == *other.query_;
    return true;
  }
  bool operator!=(const Reply& other) const { return !(*this == other); }

  std::string to_string() const;

 private:
  Reply(Kind kind, Nat value, std::optional<Term> query)
      : kind_(kind), value_(value), query_(std::move(query)) {}
  Kind kind_;
  Nat value_;
  std::optional<Term> query_;
};

}  // namespace stratagem

#endif
