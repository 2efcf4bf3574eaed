#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sscc/dataset.hpp"
#include "sscc/query.hpp"
#include "sscc/str_tree.hpp"
#include "sscc/templates.hpp"

namespace sscc::query {

/// Raised by typecheck; `token` is the offending table name, ref or literal.
class TypeCheckError : public std::runtime_error {
 public:
  TypeCheckError(std::string token, const std::string& what)
      : std::runtime_error(what), token_(std::move(token)) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

class ExecutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A query whose names resolved against one dataset.
struct CheckedPlan {
  Query query;
  std::map<std::string, EntityId> refs;
};

CheckedPlan typecheck(const Query& q, const Dataset& d);

struct ExecOptions {
  std::size_t row_cap = 1'000'000;
};

/// Tuples of entity ids (one column, or two after a join), or a scalar count.
struct ResultSet {
  bool is_count = false;
  std::uint64_t count = 0;
  std::vector<std::vector<EntityId>> rows;

  std::size_t size() const { return is_count ? 1 : rows.size(); }
  friend bool operator==(const ResultSet&, const ResultSet&) = default;
};

/// Runs a checked plan. `tree` must index `d` by entity id.
/// Throws ExecutionError("result cap exceeded") when an intermediate result grows past the cap.
ResultSet execute(const CheckedPlan& plan, const Dataset& d, const StrTree& tree,
                  const ExecOptions& opts = {});

struct Verdict {
  bool valid = false;
  /// parse, typecheck, execute or result; empty when valid.
  std::string stage;
  std::string reason;
  std::size_t rows_returned = 0;
};

Verdict validate_query(std::string_view exe, const Dataset& d, const StrTree& tree,
                       const ExecOptions& opts = {});
Verdict validate_pair(const QueryPair& p, const Dataset& d, const StrTree& tree,
                      const ExecOptions& opts = {});

/// Validates each query on up to `jobs` workers; verdicts keep input order.
std::vector<Verdict> validate_batch(const std::vector<std::string>& exes, const Dataset& d,
                                    const StrTree& tree, std::size_t jobs = 1,
                                    const ExecOptions& opts = {});

}  // namespace sscc::query
