#include <random>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "tpset/datagen.hpp"
#include "tpset/io.hpp"
#include "tpset/setops.hpp"

using namespace tpset;
using namespace tpset::testing;

namespace {

RelationFile read(const std::string& text) {
  std::istringstream in(text);
  return read_relation(in, "test");
}

const char* kHeader = "#fact:1\tlambda\tts\tte\tp\n";

}  // namespace

TEST_CASE("parse a base row") {
  const auto f = read(std::string(kHeader) + "milk\ta1\t2\t10\t0.3\n");
  REQUIRE(f.relation.size() == 1);
  const auto& t = f.relation[0];
  CHECK(t.fact == Fact({"milk"}));
  CHECK(t.lineage.atom_id() == "a1");
  CHECK(t.interval == Interval(2, 10));
  CHECK(t.p == 0.3);
  CHECK(t.lineage.atom_probability() == 0.3);
  CHECK(f.probabilities.at("a1") == 0.3);
}

TEST_CASE("header-only file is an empty relation") {
  CHECK(read(kHeader).relation.empty());
  CHECK(read("#fact:3\tlambda\tts\tte\tp\n").relation.arity() == 3);
}

TEST_CASE("malformed files are rejected with the line number") {
  auto fails_on = [](const std::string& text, std::size_t line) {
    try {
      read(text);
    } catch (const ParseError& e) {
      CHECK(e.line() == line);
      return;
    }
    FAIL("expected a parse error");
  };
  fails_on(std::string(kHeader) + "milk\ta1\t5\t5\t0.3\n", 2);
  fails_on(std::string(kHeader) + "milk\ta1\t1\t5\t0.3\nmilk\ta2\t9\t7\t0.3\n", 3);
  fails_on(std::string(kHeader) + "milk\ta1\t1\t5\n", 2);
  fails_on(std::string(kHeader) + "milk\ta1\tx\t5\t0.3\n", 2);
  fails_on(std::string(kHeader) + "milk\ta1\t1\t5\t1.5\n", 2);
  fails_on(std::string(kHeader) + "milk\ta1\t1\t5\t0\n", 2);
  fails_on(std::string(kHeader) + "milk\ta1\t1\t5\tnan\n", 2);
  fails_on(std::string(kHeader) + "milk\ta1\t1\t5\t0.3\nchips\ta1\t1\t5\t0.3\n", 3);
  fails_on(std::string(kHeader) + "milk\ta1 &\t1\t5\t0.3\n", 2);
  fails_on("fact\tlambda\tts\tte\tp\n", 1);
  fails_on("#fact:0\tlambda\tts\tte\tp\n", 1);
  fails_on("", 1);
}

TEST_CASE("overlapping rows fail validation") {
  CHECK_THROWS_AS(read(std::string(kHeader) + "milk\tx1\t1\t5\t0.5\nmilk\tx2\t4\t8\t0.5\n"),
                  ValidationError);
}

TEST_CASE("result files resolve atoms from bare rows") {
  const auto f = read(std::string(kHeader) +
                      "milk\ta1\t4\t6\t0.3\nmilk\ta1 & !c2\t6\t8\t0.09\nmilk\ta1\t8\t10\t0.3\n");
  REQUIRE(f.relation.size() == 3);
  const auto& l = f.relation[1].lineage;
  CHECK(l.lhs().atom_probability() == 0.3);
  CHECK_FALSE(l.rhs().operand().atom_probability().has_value());
  CHECK_THROWS_AS(read(std::string(kHeader) + "milk\ta1\t4\t6\t0.3\nmilk\ta1 & !c2\t6\t8\t0.09\n"
                                              "milk\ta1\t8\t10\t0.4\n"),
                  ParseError);
}

TEST_CASE("derived rows may have probability zero") {
  const auto f = read(std::string(kHeader) + "f\tx & !x\t1\t2\t0\n");
  CHECK(f.relation[0].p == 0.0);
}

TEST_CASE("lineage parsing") {
  const auto l = parse_lineage("a1 & !c1");
  CHECK(l.kind() == LineageKind::And);
  CHECK(l.lhs().atom_id() == "a1");
  CHECK(l.rhs().kind() == LineageKind::Not);
  CHECK(l.rhs().operand().atom_id() == "c1");
  CHECK(parse_lineage("x").atom_id() == "x");

  const auto p = parse_lineage("a & b | c");
  CHECK(p.kind() == LineageKind::Or);
  CHECK(p.lhs().kind() == LineageKind::And);
  CHECK(parse_lineage("a | b & c").rhs().kind() == LineageKind::And);
  CHECK(parse_lineage("!a & b").lhs().kind() == LineageKind::Not);
  CHECK(parse_lineage("  ( a )  ").atom_id() == "a");
  CHECK(parse_lineage("a & b & c").lhs().kind() == LineageKind::And);
}

TEST_CASE("lineage syntax errors report the column") {
  auto column_of = [](const std::string& text) -> std::size_t {
    try {
      parse_lineage(text);
    } catch (const ParseError& e) {
      return e.column();
    }
    return 0;
  };
  CHECK(column_of("a &") == 4);
  CHECK(column_of("(a | b") == 7);
  CHECK(column_of("a b") == 3);
  CHECK(column_of("1a") == 1);
  CHECK(column_of("") == 1);
  CHECK(column_of("a & |b") == 5);
  CHECK(column_of("a)") == 2);
}

TEST_CASE("printing reparses to the same tree") {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 500; ++i) {
    const auto l = random_formula(rng, 5, 4);
    const std::string text = print_lineage(l);
    const auto back = parse_lineage(text);
    CHECK(print_lineage(back) == text);
    CHECK(canonical_key(back) == canonical_key(l));
    // The printed tree is the same tree, not just an equivalent one.
    CHECK(atom_occurrences(back) == atom_occurrences(l));
  }
  CHECK(print_lineage(parse_lineage("c2 & !(a1 | b1)")) == "c2 & !(a1 | b1)");
  CHECK(print_lineage(parse_lineage("a & (b & c)")) == "a & (b & c)");
  CHECK(print_lineage(parse_lineage("(a & b) & c")) == "a & b & c");
  CHECK(print_lineage(parse_lineage("!!a")) == "!!a");
}

TEST_CASE("probability formatting") {
  CHECK(format_probability(0.18) == "0.180000000");
  CHECK(format_probability(0.3) == "0.300000000");
  CHECK(format_probability(1.0) == "1.00000000");
  CHECK(format_probability(0.014) == "0.0140000000");
  CHECK(format_probability(std::nan("")) == "-");
}

TEST_CASE("writing the intersection of a and c") {
  const std::string text = write_relation(intersect(market_a(), market_c()));
  CHECK(text == "#fact:1\tlambda\tts\tte\tp\n"
                "chips\ta2 & c3\t4\t5\t0.560000000\n"
                "milk\ta1 & c1\t2\t4\t0.180000000\n"
                "milk\ta1 & c2\t6\t8\t0.210000000\n");
  CHECK(write_relation(TpRelation()) == kHeader);
  CHECK(write_relation(TpRelation(2), false) == "#fact:2\tts\tte\tp\n");
}

TEST_CASE("writer rejects attributes that would break the format") {
  const TpRelation bad(1, {TpTuple{Fact({"a\tb"}), A("x"), Interval(0, 1), 0.5}});
  CHECK_THROWS_AS(write_relation(bad), ValidationError);
}

TEST_CASE("result relations round-trip through text") {
  const auto result = except(market_c(), unite(market_a(), market_b()));
  const std::string text = write_relation(result);
  const auto back = read(text);
  CHECK(write_relation(back.relation) == text);
  const std::string diff = relation_diff(back.relation, result, 1e-9);
  CHECK_MESSAGE(diff.empty(), diff);
}

TEST_CASE("generated relations round-trip byte-exactly") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GenParams g;
    g.num_tuples = 200;
    g.num_facts = 1 + seed % 7;
    g.seed = seed;
    const TpRelation rel = generate(g);
    const std::string text = write_relation(rel);
    const auto back = read(text);
    REQUIRE(back.relation.size() == rel.size());
    CHECK(write_relation(back.relation) == text);
    for (std::size_t i = 0; i < rel.size(); ++i) {
      CHECK(back.relation[i].fact == rel[i].fact);
      CHECK(back.relation[i].interval == rel[i].interval);
      CHECK(back.relation[i].lineage.atom_id() == rel[i].lineage.atom_id());
      CHECK(std::abs(back.relation[i].p - rel[i].p) <= 5e-9);
    }
  }
}

TEST_CASE("window listing") {
  std::ostringstream out;
  const auto ws = windows(market_a(), market_b());
  write_windows(out, ws, 1);
  const std::string text = out.str();
  CHECK(text.rfind("#fact:1\tts\tte\tlambda_r\tlambda_s\nchips\t3\t4\t-\tb2\n", 0) == 0);
  CHECK(text.find("milk\t5\t9\ta1\tb1\n") != std::string::npos);
  std::ostringstream empty;
  write_windows(empty, {}, 1);
  CHECK(empty.str() == "#fact:1\tts\tte\tlambda_r\tlambda_s\n");
}
