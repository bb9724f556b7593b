#include "tpset/query.hpp"

#include <map>
#include <vector>

#include "tpset/io.hpp"

namespace tpset {

namespace {

struct Token {
  enum class Kind { Path, Plus, Minus, Star, LParen, RParen, End } kind;
  std::string text;
  std::size_t column;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    const std::size_t col = i + 1;
    if (text[i] == '(') {
      out.push_back({Token::Kind::LParen, "(", col});
      ++i;
      continue;
    }
    if (text[i] == ')') {
      out.push_back({Token::Kind::RParen, ")", col});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j]) && text[j] != '(' && text[j] != ')') ++j;
    std::string word(text.substr(i, j - i));
    Token::Kind kind = Token::Kind::Path;
    if (word == "+") kind = Token::Kind::Plus;
    if (word == "-") kind = Token::Kind::Minus;
    if (word == "*") kind = Token::Kind::Star;
    out.push_back({kind, std::move(word), col});
    i = j;
  }
  out.push_back({Token::Kind::End, "", text.size() + 1});
  return out;
}

class QueryParser {
 public:
  explicit QueryParser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  QueryExpr parse() {
    QueryExpr q = expr();
    if (peek().kind != Token::Kind::End) fail("unexpected '" + peek().text + "'");
    return q;
  }

 private:
  QueryExpr expr() {
    QueryExpr q = term();
    for (;;) {
      const auto k = peek().kind;
      if (k != Token::Kind::Plus && k != Token::Kind::Minus) return q;
      ++pos_;
      q = combine(k == Token::Kind::Plus ? SetOpKind::Union : SetOpKind::Difference,
                  std::move(q), term());
    }
  }

  QueryExpr term() {
    QueryExpr q = primary();
    while (peek().kind == Token::Kind::Star) {
      ++pos_;
      q = combine(SetOpKind::Intersection, std::move(q), primary());
    }
    return q;
  }

  QueryExpr primary() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Path) {
      ++pos_;
      QueryExpr leaf;
      leaf.path = t.text;
      return leaf;
    }
    if (t.kind == Token::Kind::LParen) {
      ++pos_;
      QueryExpr inner = expr();
      if (peek().kind != Token::Kind::RParen) fail("expected ')'");
      ++pos_;
      return inner;
    }
    fail(t.kind == Token::Kind::End ? "unexpected end of query"
                                    : "unexpected '" + t.text + "'");
  }

  static QueryExpr combine(SetOpKind op, QueryExpr lhs, QueryExpr rhs) {
    QueryExpr q;
    q.op = op;
    q.lhs = std::make_unique<QueryExpr>(std::move(lhs));
    q.rhs = std::make_unique<QueryExpr>(std::move(rhs));
    return q;
  }

  const Token& peek() const { return tokens_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    const std::size_t col = peek().column;
    throw ParseError("query syntax error at column " + std::to_string(col) + ": " + msg, 0, col);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

TpRelation eval(const QueryExpr& q, const RelationLoader& load, SetOpOptions opts,
                std::map<std::string, TpRelation>& cache) {
  if (q.is_leaf()) {
    auto it = cache.find(q.path);
    if (it == cache.end()) it = cache.emplace(q.path, load(q.path)).first;
    return it->second;
  }
  const TpRelation lhs = eval(*q.lhs, load, opts, cache);
  const TpRelation rhs = eval(*q.rhs, load, opts, cache);
  return apply_setop(q.op, lhs, rhs, opts);
}

}  // namespace

QueryExpr parse_query(std::string_view text) { return QueryParser(tokenize(text)).parse(); }

std::string to_string(const QueryExpr& q) {
  if (q.is_leaf()) return q.path;
  const char* op = q.op == SetOpKind::Union ? " + " : q.op == SetOpKind::Difference ? " - " : " * ";
  return "(" + to_string(*q.lhs) + op + to_string(*q.rhs) + ")";
}

TpRelation evaluate_query(const QueryExpr& q, const RelationLoader& load, SetOpOptions opts) {
  std::map<std::string, TpRelation> cache;
  return eval(q, load, opts, cache);
}

}  // namespace tpset
