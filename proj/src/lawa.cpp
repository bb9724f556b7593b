#include "tpset/lawa.hpp"

#include <algorithm>
#include <set>

namespace tpset {

Window WindowRef::materialize() const {
  Window w{*fact, interval, std::nullopt, std::nullopt};
  if (r) w.lambda_r = r->lineage;
  if (s) w.lambda_s = s->lineage;
  return w;
}

namespace {

void require_sweepable(const TpRelation& rel, const char* side) {
  if (!is_sweep_ordered(rel)) {
    throw ValidationError(std::string(side) + " relation is not sorted by (fact, ts)");
  }
  require_duplicate_free(rel);
}

const Interval kPastEnd(kMaxTime - 1, kMaxTime);

// Interval of t, or a stand-in ending at kMaxTime. The pointer is chosen
// before anything is loaded so the choice compiles to a select.
const Interval& interval_of(const TpTuple* t) {
  return *(t != nullptr ? &t->interval : &kPastEnd);
}

[[gnu::always_inline]] inline bool on_fact(const TpTuple* t, const Fact& fact, const Fact*& eq,
                                           const Fact*& ne) {
  if (t == nullptr) return false;
  if (eq != nullptr && t->fact.shares_storage(*eq)) return true;
  if (ne != nullptr && t->fact.shares_storage(*ne)) return false;
  if (t->fact == fact) {
    eq = &t->fact;
    return true;
  }
  ne = &t->fact;
  return false;
}

// Start of the next window when no tuple carries over from the previous one:
// the earliest start among the cursor tuples of the smallest pending fact,
// r winning exact ties. Facts are processed in ascending order, so a cursor
// that still holds the current fact always holds the smallest pending fact.
const TpTuple& next_region_start(SweepStatus& st, const TpTuple* r, const TpTuple* s) {
  if (!r) return *s;
  if (!s) return *r;
  if (st.curr_fact != nullptr && on_fact(r, *st.curr_fact, st.r_fact_eq, st.r_fact_ne) &&
      on_fact(s, *st.curr_fact, st.s_fact_eq, st.s_fact_ne)) {
    return s->interval.ts() < r->interval.ts() ? *s : *r;
  }
  return sweep_less(*s, *r) ? *s : *r;
}

}  // namespace

SweepStatus init_status(const TpRelation& r, const TpRelation& s) {
  require_sweepable(r, "left");
  require_sweepable(s, "right");
  SweepStatus status;
  status.r = SweepInput(r.tuples(), {});
  status.s = SweepInput(s.tuples(), {});
  return status;
}

std::optional<WindowRef> lawa_advance(SweepStatus& st) {
  const TpTuple* r = st.r_cursor();
  const TpTuple* s = st.s_cursor();

  TimePoint win_ts;
  if (st.r_valid == nullptr && st.s_valid == nullptr) {
    if (r == nullptr && s == nullptr) return std::nullopt;
    const TpTuple& first = next_region_start(st, r, s);
    win_ts = first.interval.ts();
    const bool same_fact =
        st.curr_fact != nullptr &&
        (&first == r ? on_fact(r, *st.curr_fact, st.r_fact_eq, st.r_fact_ne)
                     : on_fact(s, *st.curr_fact, st.s_fact_eq, st.s_fact_ne));
    if (!same_fact) {
      st.curr_fact = &first.fact;
      st.r_fact_eq = st.r_fact_ne = st.s_fact_eq = st.s_fact_ne = nullptr;
    }
  } else {
    // A valid tuple survives the previous window: the next window is adjacent.
    win_ts = *st.prev_win_te;
  }
  const Fact& fact = *st.curr_fact;

  // Selects rather than branches below: with mixed overlap the outcomes are
  // close to random and mispredictions dominate the cost of a step.
  const bool r_on = on_fact(r, fact, st.r_fact_eq, st.r_fact_ne);
  const bool take_r = r_on & (interval_of(r).ts() == win_ts);
  st.r_valid = take_r ? r : st.r_valid;
  st.r_next += take_r;
  r = st.r_cursor();
  const bool s_on = on_fact(s, fact, st.s_fact_eq, st.s_fact_ne);
  const bool take_s = s_on & (interval_of(s).ts() == win_ts);
  st.s_valid = take_s ? s : st.s_valid;
  st.s_next += take_s;
  s = st.s_cursor();

  // Only tuples of the current fact can change which tuples are valid for it.
  const TimePoint r_start = on_fact(r, fact, st.r_fact_eq, st.r_fact_ne) ? interval_of(r).ts() : kMaxTime;
  const TimePoint s_start = on_fact(s, fact, st.s_fact_eq, st.s_fact_ne) ? interval_of(s).ts() : kMaxTime;
  const TimePoint r_end = interval_of(st.r_valid).te();
  const TimePoint s_end = interval_of(st.s_valid).te();
  const TimePoint win_te = std::min(std::min(r_start, s_start), std::min(r_end, s_end));

  WindowRef window{st.curr_fact, Interval(win_ts, win_te), st.r_valid, st.s_valid};

  st.r_valid = r_end == win_te ? nullptr : st.r_valid;
  st.s_valid = s_end == win_te ? nullptr : st.s_valid;
  st.prev_win_te = win_te;
  return window;
}

std::optional<Window> lawa_next(SweepStatus& status) {
  auto ref = lawa_advance(status);
  if (!ref) return std::nullopt;
  return ref->materialize();
}

WindowAdvancer::WindowAdvancer(const TpRelation& r, const TpRelation& s)
    : r_order_(sweep_order(r)), s_order_(sweep_order(s)) {
  status_.r = SweepInput(r.tuples(), r_order_);
  status_.s = SweepInput(s.tuples(), s_order_);
  // Duplicate-freeness in sweep order, reusing the permutations.
  auto check = [](const SweepInput& in, const char* side) {
    for (std::size_t i = 1; i < in.size(); ++i) {
      const TpTuple& prev = in[i - 1];
      const TpTuple& cur = in[i];
      if (prev.fact == cur.fact && prev.interval.te() > cur.interval.ts()) {
        throw ValidationError(std::string(side) + " relation is not duplicate-free: fact '" +
                              to_string(cur.fact) + "' has overlapping tuples at [" +
                              std::to_string(prev.interval.ts()) + "," +
                              std::to_string(prev.interval.te()) + ") and [" +
                              std::to_string(cur.interval.ts()) + "," +
                              std::to_string(cur.interval.te()) + ")");
      }
    }
  };
  check(status_.r, "left");
  check(status_.s, "right");
}

std::vector<Window> windows(const TpRelation& r, const TpRelation& s) {
  WindowAdvancer advancer(r, s);
  std::vector<Window> out;
  while (auto w = advancer.next()) out.push_back(w->materialize());
  return out;
}

std::size_t count_windows(const TpRelation& r, const TpRelation& s) {
  WindowAdvancer advancer(r, s);
  std::size_t n = 0;
  while (advancer.next()) ++n;
  return n;
}

std::size_t window_count_bound(const TpRelation& r, const TpRelation& s) {
  std::set<Fact> facts;
  for (const auto& t : r) facts.insert(t.fact);
  for (const auto& t : s) facts.insert(t.fact);
  return 2 * r.size() + 2 * s.size() - facts.size();
}

}  // namespace tpset
