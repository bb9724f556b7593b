#ifndef TPSET_IO_HPP
#define TPSET_IO_HPP

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tpset/core.hpp"
#include "tpset/lawa.hpp"

namespace tpset {

/// Malformed input. `line` and `column` are 1-based; 0 means not applicable.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(what), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Lineage text grammar, loosest binding first:
//
//   expr    := term ('|' term)*
//   term    := factor ('&' factor)*
//   factor  := '!' factor | atom | '(' expr ')'
//   atom    := [A-Za-z_][A-Za-z0-9_]*
//
// Binary operators associate to the left; whitespace is ignored.

/// Parses a lineage expression. Atoms found in `known` get that probability
/// embedded. Throws ParseError with the 1-based column of the problem.
Lineage parse_lineage(std::string_view text, const ProbAssignment* known = nullptr);

/// Prints with the parentheses needed to reparse the same tree, e.g.
/// `c2 & !(a1 | b1)`.
std::string print_lineage(const Lineage& l);

/// Nine significant digits, e.g. 0.18 -> "0.180000000". NaN prints as "-".
std::string format_probability(double p);

struct RelationFile {
  TpRelation relation;
  ProbAssignment probabilities;
};

/// Reads the tab-separated relation format:
///
///   #fact:k<TAB>lambda<TAB>ts<TAB>te<TAB>p
///   f1 ... fk<TAB>lambda<TAB>ts<TAB>te<TAB>p
///
/// In a base relation every lambda is a distinct atom id with p in (0,1].
/// Result files may hold full expressions; their atoms take the probability of
/// a bare-atom row with the same id when one exists.
/// `source` names the input in diagnostics.
RelationFile read_relation(std::istream& in, std::string_view source = "<input>");
RelationFile read_relation_file(const std::string& path);

/// Writes in (fact, ts) order. Without lineage the lambda column is omitted.
void write_relation(std::ostream& out, const TpRelation& rel, bool with_lineage = true);
std::string write_relation(const TpRelation& rel, bool with_lineage = true);

/// Window listing: `#fact:k  ts  te  lambda_r  lambda_s`, absent sides as "-".
void write_windows(std::ostream& out, std::span<const Window> ws, std::size_t arity);

}  // namespace tpset

#endif  // TPSET_IO_HPP
