#include <random>

#include "doctest.h"
#include "support.hpp"
#include "tpset/lawa.hpp"

using namespace tpset;
using namespace tpset::testing;

namespace {

struct Expect {
  const char* fact;
  TimePoint ts, te;
  const char* r;  // nullptr: absent
  const char* s;
};

void check_windows(const std::vector<Window>& got, const std::vector<Expect>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CAPTURE(i);
    CHECK(got[i].fact == Fact({want[i].fact}));
    CHECK(got[i].interval == Interval(want[i].ts, want[i].te));
    CHECK(got[i].lambda_r.has_value() == (want[i].r != nullptr));
    CHECK(got[i].lambda_s.has_value() == (want[i].s != nullptr));
    if (want[i].r) CHECK(got[i].lambda_r->atom_id() == want[i].r);
    if (want[i].s) CHECK(got[i].lambda_s->atom_id() == want[i].s);
  }
}

TpRelation only_fact(const TpRelation& r, const std::string& fact) {
  std::vector<TpTuple> out;
  for (const auto& t : r) {
    if (t.fact == Fact({fact})) out.push_back(t);
  }
  return TpRelation(r.arity(), std::move(out));
}

}  // namespace

TEST_CASE("windows of a and c") {
  check_windows(windows(market_a(), market_c()), {{"chips", 4, 5, "a2", "c3"},
                                            {"chips", 5, 7, "a2", nullptr},
                                            {"chips", 7, 9, nullptr, "c4"},
                                            {"dates", 1, 3, "a3", nullptr},
                                            {"milk", 1, 2, nullptr, "c1"},
                                            {"milk", 2, 4, "a1", "c1"},
                                            {"milk", 4, 6, "a1", nullptr},
                                            {"milk", 6, 8, "a1", "c2"},
                                            {"milk", 8, 10, "a1", nullptr}});
}

TEST_CASE("windows of a and b") {
  check_windows(windows(market_a(), market_b()), {{"chips", 3, 4, nullptr, "b2"},
                                            {"chips", 4, 6, "a2", "b2"},
                                            {"chips", 6, 7, "a2", nullptr},
                                            {"dates", 1, 3, "a3", nullptr},
                                            {"milk", 2, 5, "a1", nullptr},
                                            {"milk", 5, 9, "a1", "b1"},
                                            {"milk", 9, 10, "a1", nullptr}});
}

TEST_CASE("window count bound for a and c") {
  CHECK(window_count_bound(market_a(), market_c()) == 11);
  CHECK(count_windows(market_a(), market_c()) == 9);
}

TEST_CASE("init positions cursors at the first sorted tuples") {
  const TpRelation c = sort_relation(market_c());
  const TpRelation a = sort_relation(market_a());
  const SweepStatus st = init_status(c, a);
  REQUIRE(st.r_cursor() != nullptr);
  REQUIRE(st.s_cursor() != nullptr);
  CHECK(st.r_cursor()->fact == Fact({"chips"}));
  CHECK(st.r_cursor()->interval == Interval(4, 5));
  CHECK(st.s_cursor()->interval == Interval(4, 7));
  CHECK_FALSE(st.prev_win_te.has_value());

  const TpRelation empty;
  const SweepStatus e = init_status(empty, empty);
  CHECK(e.r_cursor() == nullptr);
  CHECK(e.s_cursor() == nullptr);

  const SweepStatus ae = init_status(a, empty);
  REQUIRE(ae.r_cursor() != nullptr);
  CHECK(ae.r_cursor()->interval == Interval(4, 7));
  CHECK(ae.s_cursor() == nullptr);
}

TEST_CASE("init rejects unsorted or duplicated input") {
  const TpRelation unsorted(1, {tup("milk", "x", 5, 6, 0.5), tup("chips", "y", 1, 2, 0.5)});
  const TpRelation empty;
  CHECK_THROWS_AS(init_status(unsorted, empty), ValidationError);
  const TpRelation dup(1, {tup("milk", "x", 1, 5, 0.5), tup("milk", "y", 4, 8, 0.5)});
  CHECK_THROWS_AS(init_status(sort_relation(dup), empty), ValidationError);
  CHECK_THROWS_AS(windows(empty, dup), ValidationError);
}

TEST_CASE("step-by-step sweep of c and a on milk") {
  const TpRelation c = sort_relation(only_fact(market_c(), "milk"));
  const TpRelation a = sort_relation(only_fact(market_a(), "milk"));
  SweepStatus st = init_status(c, a);

  auto w = lawa_next(st);
  REQUIRE(w);
  CHECK(w->interval == Interval(1, 2));
  CHECK(w->lambda_r->atom_id() == "c1");
  CHECK_FALSE(w->lambda_s.has_value());

  w = lawa_next(st);
  REQUIRE(w);
  CHECK(w->interval == Interval(2, 4));
  CHECK(w->lambda_r->atom_id() == "c1");
  CHECK(w->lambda_s->atom_id() == "a1");

  std::optional<Window> last;
  while (auto next = lawa_next(st)) last = next;
  REQUIRE(last);
  CHECK(last->interval == Interval(8, 10));
  CHECK_FALSE(last->lambda_r.has_value());
  CHECK(last->lambda_s->atom_id() == "a1");

  const auto before = st.prev_win_te;
  CHECK_FALSE(lawa_next(st).has_value());
  CHECK(st.prev_win_te == before);
  CHECK(st.r_done());
  CHECK(st.s_done());
}

TEST_CASE("empty inputs produce no windows") {
  const TpRelation empty;
  CHECK(windows(empty, empty).empty());
  SweepStatus st = init_status(empty, empty);
  CHECK_FALSE(lawa_advance(st).has_value());
}

TEST_CASE("window properties on random small instances") {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 500; ++round) {
    const InstanceShape shape{12, 3, 30};
    const TpRelation r = random_relation(rng, "r", shape);
    const TpRelation s = random_relation(rng, "s", shape);
    const auto ws = windows(r, s);
    const auto ref = reference_windows(r, s);

    // Coverage, lineage fidelity and maximality: identical to runs computed
    // chronon by chronon.
    REQUIRE(ws.size() == ref.size());
    for (std::size_t i = 0; i < ws.size(); ++i) {
      CHECK(ws[i].fact == ref[i].fact);
      CHECK(ws[i].interval == Interval(ref[i].ts, ref[i].te));
      CHECK(ws[i].lambda_r.has_value() == (ref[i].r != nullptr));
      CHECK(ws[i].lambda_s.has_value() == (ref[i].s != nullptr));
      if (ref[i].r) CHECK(ws[i].lambda_r->same_node(ref[i].r->lineage));
      if (ref[i].s) CHECK(ws[i].lambda_s->same_node(ref[i].s->lineage));
      CHECK((ws[i].lambda_r || ws[i].lambda_s));
    }

    CHECK(ws.size() <= window_count_bound(r, s));
    CHECK(window_count_bound(r, s) == 2 * r.size() + 2 * s.size() - distinct_facts(r, s));
    CHECK(count_windows(r, s) == ws.size());

    // Resumability: driving the advancer one call at a time.
    WindowAdvancer adv(r, s);
    std::size_t i = 0;
    while (auto w = adv.next()) {
      REQUIRE(i < ws.size());
      CHECK(w->interval == ws[i].interval);
      ++i;
    }
    CHECK(i == ws.size());
  }
}

TEST_CASE("dense random instances keep the bound") {
  std::mt19937_64 rng(22);
  for (int round = 0; round < 200; ++round) {
    const InstanceShape shape{30, 1, 50};
    const TpRelation r = random_relation(rng, "r", shape);
    const TpRelation s = random_relation(rng, "s", shape);
    CHECK(count_windows(r, s) <= window_count_bound(r, s));
    CHECK(count_windows(r, s) == reference_windows(r, s).size());
  }
}

TEST_CASE("one side exhausted early still yields the other's windows") {
  const TpRelation r(1, {tup("f", "r1", 1, 10, 0.5)});
  const TpRelation s(1, {tup("f", "s1", 1, 3, 0.5), tup("f", "s2", 5, 8, 0.5)});
  check_windows(windows(r, s), {{"f", 1, 3, "r1", "s1"},
                                {"f", 3, 5, "r1", nullptr},
                                {"f", 5, 8, "r1", "s2"},
                                {"f", 8, 10, "r1", nullptr}});
  check_windows(windows(s, r), {{"f", 1, 3, "s1", "r1"},
                                {"f", 3, 5, nullptr, "r1"},
                                {"f", 5, 8, "s2", "r1"},
                                {"f", 8, 10, nullptr, "r1"}});
}

TEST_CASE("identical start across facts is resolved by fact order") {
  const TpRelation r(1, {tup("g", "r1", 1, 3, 0.5)});
  const TpRelation s(1, {tup("f", "s1", 1, 3, 0.5)});
  check_windows(windows(r, s), {{"f", 1, 3, nullptr, "s1"}, {"g", 1, 3, "r1", nullptr}});
}
