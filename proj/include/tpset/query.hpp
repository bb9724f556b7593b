#ifndef TPSET_QUERY_HPP
#define TPSET_QUERY_HPP

#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "tpset/core.hpp"
#include "tpset/setops.hpp"

namespace tpset {

/// Binary tree of set operations whose leaves name relation files.
struct QueryExpr {
  std::string path;  // leaf only
  SetOpKind op = SetOpKind::Union;
  std::unique_ptr<QueryExpr> lhs;
  std::unique_ptr<QueryExpr> rhs;

  bool is_leaf() const { return lhs == nullptr; }
};

/// Parses `c.tsv - (a.tsv + b.tsv)`: `+` union, `-` difference, `*`
/// intersection. `*` binds tighter than `+` and `-`; all are left
/// associative. Operators and parentheses separate tokens; any other run of
/// non-space characters is a path. Throws ParseError with a 1-based column.
QueryExpr parse_query(std::string_view text);

/// Canonical text of a query, fully parenthesized.
std::string to_string(const QueryExpr& q);

using RelationLoader = std::function<TpRelation(const std::string& path)>;

/// Evaluates bottom-up. Each distinct path is loaded once.
TpRelation evaluate_query(const QueryExpr& q, const RelationLoader& load, SetOpOptions opts = {});

}  // namespace tpset

#endif  // TPSET_QUERY_HPP
