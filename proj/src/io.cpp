#include "tpset/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>
#include <vector>

namespace tpset {

// --- lineage text ------------------------------------------------------------

namespace {

bool ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

class LineageParser {
 public:
  LineageParser(std::string_view text, const ProbAssignment* known)
      : text_(text), known_(known) {}

  Lineage parse() {
    Lineage l = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return l;
  }

 private:
  Lineage expr() {
    Lineage l = term();
    while (accept('|')) l = Lineage::disjunction(std::move(l), term());
    return l;
  }

  Lineage term() {
    Lineage l = factor();
    while (accept('&')) l = Lineage::conjunction(std::move(l), factor());
    return l;
  }

  Lineage factor() {
    skip_ws();
    if (pos_ == text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '!') {
      ++pos_;
      return Lineage::negation(factor());
    }
    if (c == '(') {
      ++pos_;
      Lineage inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (ident_start(c)) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
      std::string id(text_.substr(start, pos_ - start));
      if (known_ != nullptr) {
        if (auto it = known_->find(id); it != known_->end()) {
          return Lineage::atom(std::move(id), it->second);
        }
      }
      return Lineage::atom(std::move(id));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                   text_[pos_] == '\n' || text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("lineage syntax error at column " + std::to_string(pos_ + 1) + ": " + msg,
                     0, pos_ + 1);
  }

  std::string_view text_;
  const ProbAssignment* known_;
  std::size_t pos_ = 0;
};

void print_into(const Lineage& l, std::string& out) {
  auto wrapped = [&out](const Lineage& child, bool parens) {
    if (parens) out += '(';
    print_into(child, out);
    if (parens) out += ')';
  };
  switch (l.kind()) {
    case LineageKind::Atom:
      out += l.atom_id();
      return;
    case LineageKind::Not:
      out += '!';
      wrapped(l.operand(), !(l.operand().is_atom() || l.operand().kind() == LineageKind::Not));
      return;
    case LineageKind::And:
      wrapped(l.lhs(), l.lhs().kind() == LineageKind::Or);
      out += " & ";
      wrapped(l.rhs(), l.rhs().kind() == LineageKind::Or || l.rhs().kind() == LineageKind::And);
      return;
    case LineageKind::Or:
      print_into(l.lhs(), out);
      out += " | ";
      wrapped(l.rhs(), l.rhs().kind() == LineageKind::Or);
      return;
  }
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !ident_start(s.front())) return false;
  for (char c : s) {
    if (!ident_char(c)) return false;
  }
  return true;
}

}  // namespace

Lineage parse_lineage(std::string_view text, const ProbAssignment* known) {
  return LineageParser(text, known).parse();
}

std::string print_lineage(const Lineage& l) {
  std::string out;
  print_into(l, out);
  return out;
}

std::string format_probability(double p) {
  if (std::isnan(p)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8e", p);
  const char* e = std::strchr(buf, 'e');
  const int exponent = e != nullptr ? std::atoi(e + 1) : 0;
  const int decimals = exponent >= 8 ? 0 : 8 - exponent;
  std::snprintf(buf, sizeof buf, "%.*f", decimals, p);
  return buf;
}

// --- relation files ----------------------------------------------------------

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

struct RawRow {
  std::size_t line;
  std::vector<std::string> attrs;
  std::string lambda;
  TimePoint ts;
  TimePoint te;
  double p;
};

}  // namespace

RelationFile read_relation(std::istream& in, std::string_view source) {
  const std::string where(source);
  auto error = [&where](std::size_t line, const std::string& msg) -> ParseError {
    return ParseError(where + ":" + std::to_string(line) + ": " + msg, line, 0);
  };

  std::string line;
  if (!std::getline(in, line)) throw error(1, "missing header row");
  constexpr std::string_view kPrefix = "#fact:";
  const auto header = split_tabs(line);
  if (header.size() != 5 || !header[0].starts_with(kPrefix) || header[1] != "lambda" ||
      header[2] != "ts" || header[3] != "te" || header[4] != "p") {
    throw error(1, "expected header '#fact:k\\tlambda\\tts\\tte\\tp'");
  }
  std::size_t arity = 0;
  {
    const auto digits = header[0].substr(kPrefix.size());
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), arity);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || arity == 0) {
      throw error(1, "invalid fact arity '" + std::string(digits) + "'");
    }
  }

  std::vector<RawRow> rows;
  bool has_expressions = false;
  for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
    const auto fields = split_tabs(line);
    if (fields.size() != arity + 4) {
      throw error(lineno, "expected " + std::to_string(arity + 4) + " fields, found " +
                              std::to_string(fields.size()));
    }
    RawRow row{lineno, {}, std::string(fields[arity]), 0, 0, 0.0};
    for (std::size_t i = 0; i < arity; ++i) row.attrs.emplace_back(fields[i]);

    auto parse_time = [&](std::string_view f, const char* name) {
      TimePoint v = 0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw error(lineno, std::string("invalid ") + name + " '" + std::string(f) + "'");
      }
      return v;
    };
    row.ts = parse_time(fields[arity + 1], "ts");
    row.te = parse_time(fields[arity + 2], "te");
    if (row.te <= row.ts) {
      throw error(lineno, "interval [" + std::to_string(row.ts) + "," + std::to_string(row.te) +
                              ") is empty or inverted");
    }
    if (row.ts < kMinTime || row.te > kMaxTime) throw error(lineno, "interval outside time domain");

    const auto pf = fields[arity + 3];
    auto [ptr, ec] = std::from_chars(pf.data(), pf.data() + pf.size(), row.p);
    if (ec != std::errc() || ptr != pf.data() + pf.size() || std::isnan(row.p)) {
      throw error(lineno, "invalid probability '" + std::string(pf) + "'");
    }
    if (!is_identifier(row.lambda)) has_expressions = true;
    rows.push_back(std::move(row));
  }

  // Bare-atom rows define atom probabilities. In a base relation every id is
  // distinct; in a result file one atom may label several rows, but always
  // with the same probability.
  ProbAssignment probs;
  for (const auto& row : rows) {
    if (!is_identifier(row.lambda)) continue;
    if (!(row.p > 0.0 && row.p <= 1.0)) {
      throw error(row.line, "probability " + format_probability(row.p) + " outside (0,1]");
    }
    auto [it, inserted] = probs.emplace(row.lambda, row.p);
    if (!inserted && (!has_expressions || it->second != row.p)) {
      throw error(row.line, has_expressions
                                ? "atom id '" + row.lambda + "' has inconsistent probabilities"
                                : "duplicate atom id '" + row.lambda + "'");
    }
  }

  std::vector<TpTuple> tuples;
  tuples.reserve(rows.size());
  for (auto& row : rows) {
    auto make_lineage = [&]() -> Lineage {
      if (is_identifier(row.lambda)) return Lineage::atom(row.lambda, row.p);
      if (!(row.p >= 0.0 && row.p <= 1.0)) {
        throw error(row.line, "probability " + format_probability(row.p) + " outside [0,1]");
      }
      try {
        return parse_lineage(row.lambda, &probs);
      } catch (const ParseError& e) {
        throw ParseError(where + ":" + std::to_string(row.line) + ": " + e.what(), row.line,
                         e.column());
      }
    };
    Lineage lineage = make_lineage();
    // Consecutive rows of one fact share attribute storage.
    Fact fact = (!tuples.empty() && std::equal(row.attrs.begin(), row.attrs.end(),
                                               tuples.back().fact.attrs().begin()))
                    ? tuples.back().fact
                    : Fact(std::move(row.attrs));
    tuples.push_back(TpTuple{std::move(fact), std::move(lineage), Interval(row.ts, row.te), row.p});
  }

  TpRelation rel(arity, std::move(tuples));
  if (auto v = validate_duplicate_free(rel)) {
    auto describe = [](const TpTuple& t) {
      return "'" + print_lineage(t.lineage) + "' [" + std::to_string(t.interval.ts()) + "," +
             std::to_string(t.interval.te()) + ")";
    };
    throw ValidationError(where + ": relation is not duplicate-free: fact '" +
                          to_string(v->first.fact) + "' has " + describe(v->first) +
                          " overlapping " + describe(v->second));
  }
  return {std::move(rel), std::move(probs)};
}

RelationFile read_relation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0, 0);
  return read_relation(in, path);
}

namespace {

void write_fact(std::ostream& out, const Fact& fact) {
  for (const auto& attr : fact.attrs()) {
    if (attr.find_first_of("\t\n") != std::string::npos) {
      throw ValidationError("fact attribute '" + attr + "' contains a tab or newline");
    }
    out << attr << '\t';
  }
}

}  // namespace

void write_relation(std::ostream& out, const TpRelation& rel, bool with_lineage) {
  out << "#fact:" << rel.arity() << (with_lineage ? "\tlambda" : "") << "\tts\tte\tp\n";
  const auto order = sweep_order(rel);
  for (std::size_t i = 0; i < rel.size(); ++i) {
    const TpTuple& t = order.empty() ? rel[i] : rel[order[i]];
    write_fact(out, t.fact);
    if (with_lineage) out << print_lineage(t.lineage) << '\t';
    out << t.interval.ts() << '\t' << t.interval.te() << '\t' << format_probability(t.p) << '\n';
  }
}

std::string write_relation(const TpRelation& rel, bool with_lineage) {
  std::ostringstream out;
  write_relation(out, rel, with_lineage);
  return out.str();
}

void write_windows(std::ostream& out, std::span<const Window> ws, std::size_t arity) {
  out << "#fact:" << arity << "\tts\tte\tlambda_r\tlambda_s\n";
  for (const auto& w : ws) {
    write_fact(out, w.fact);
    out << w.interval.ts() << '\t' << w.interval.te() << '\t'
        << (w.lambda_r ? print_lineage(*w.lambda_r) : "-") << '\t'
        << (w.lambda_s ? print_lineage(*w.lambda_s) : "-") << '\n';
  }
}

}  // namespace tpset
