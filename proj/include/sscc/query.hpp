#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sscc/geometry.hpp"

namespace sscc::query {

// Grammar of the executable query language:
//
//   query      := "query" pipeline
//   pipeline   := source stage* terminal
//   source     := IDENT "feed" | "(" source stage* ")"
//   stage      := "filter" "[" pred "]"
//               | "head" "[" INT "]"
//               | "distancescan" "[" pointlit "," INT "]"
//               | "symmjoin" "[" joinpred "]" IDENT "feed"
//   terminal   := "consume" | "count"
//   pred       := ".geom" ("intersects" | "inside") refexpr
//               | "distance" "(" ".geom" "," refexpr ")" "<" NUM
//               | ".attr" "(" STRING ")" ("=" | "<" | ">") (STRING | NUM)
//   joinpred   := ".geom" "intersects" "..geom"
//               | "distance" "(" ".geom" "," "..geom" ")" "<" NUM
//   refexpr    := "ref" "(" STRING ")" | pointlit
//   pointlit   := "POINT" "(" NUM NUM ")"

/// Reference to a named entity: ref("name").
struct EntityRef {
  std::string name;
  friend bool operator==(const EntityRef&, const EntityRef&) = default;
};

using RefExpr = std::variant<EntityRef, Point>;

enum class SpatialOp { kIntersects, kInside };
enum class CompareOp { kEq, kLt, kGt };

struct SpatialPredicate {
  SpatialOp op = SpatialOp::kIntersects;
  RefExpr target;
  friend bool operator==(const SpatialPredicate&, const SpatialPredicate&) = default;
};

struct DistancePredicate {
  RefExpr target;
  double limit = 0;
  friend bool operator==(const DistancePredicate&, const DistancePredicate&) = default;
};

struct AttributePredicate {
  std::string key;
  CompareOp op = CompareOp::kEq;
  std::variant<std::string, double> value;
  friend bool operator==(const AttributePredicate&, const AttributePredicate&) = default;
};

using Predicate = std::variant<SpatialPredicate, DistancePredicate, AttributePredicate>;

struct JoinPredicate {
  /// Distance join when set; otherwise an intersects join.
  bool by_distance = false;
  double limit = 0;
  friend bool operator==(const JoinPredicate&, const JoinPredicate&) = default;
};

struct Filter {
  Predicate predicate;
  friend bool operator==(const Filter&, const Filter&) = default;
};
struct Head {
  std::uint64_t n = 0;
  friend bool operator==(const Head&, const Head&) = default;
};
struct DistanceScan {
  Point anchor;
  std::uint64_t k = 0;
  friend bool operator==(const DistanceScan&, const DistanceScan&) = default;
};
/// Joins the tuples produced so far (left) with the tuples of `right_table`.
struct SymmJoin {
  JoinPredicate predicate;
  std::string right_table;
  friend bool operator==(const SymmJoin&, const SymmJoin&) = default;
};

using Stage = std::variant<Filter, Head, DistanceScan, SymmJoin>;

struct Pipeline;

/// A table scan, or a parenthesised sub-pipeline without terminal.
struct Source {
  std::string table;
  std::shared_ptr<const Pipeline> nested;

  bool is_table() const { return nested == nullptr; }
};

struct Pipeline {
  Source source;
  std::vector<Stage> stages;
};

bool operator==(const Source& a, const Source& b);
bool operator==(const Pipeline& a, const Pipeline& b);

enum class Terminal { kConsume, kCount };

struct Query {
  Pipeline pipeline;
  Terminal terminal = Terminal::kConsume;
  friend bool operator==(const Query&, const Query&) = default;
};

class QueryError : public std::runtime_error {
 public:
  enum class Kind { kLexical, kSyntax, kTrailing };

  QueryError(Kind kind, std::size_t offset, std::vector<std::string> expected, const std::string& what);

  Kind kind() const { return kind_; }
  /// Byte offset of the offending token.
  std::size_t offset() const { return offset_; }
  /// Token spellings that would have been accepted at the offset.
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  Kind kind_;
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// Parses one query. Throws QueryError (never anything else) on invalid input.
Query parse_query(std::string_view text);

/// Canonical text; parse_query(print_query(q)) == q.
std::string print_query(const Query& q);

/// Quoted string literal with backslash escapes, as accepted by the lexer.
std::string quote_string(std::string_view s);

/// POINT (x y) with round-tripping coordinates.
std::string print_point(Point p);

}  // namespace sscc::query
