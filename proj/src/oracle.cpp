#include "tpset/oracle.hpp"

#include <algorithm>
#include <set>

namespace tpset::oracle {

Snapshot timeslice(const TpRelation& rel, TimePoint t) {
  Snapshot snap{t, {}};
  for (const auto& tuple : rel) {
    if (tuple.interval.contains(t)) snap.entries.emplace(tuple.fact, tuple.lineage);
  }
  return snap;
}

std::map<Fact, Lineage> snapshot_setop(SetOpKind kind, const Snapshot& sr, const Snapshot& ss) {
  std::set<Fact> facts;
  for (const auto& [f, l] : sr.entries) facts.insert(f);
  for (const auto& [f, l] : ss.entries) facts.insert(f);

  std::map<Fact, Lineage> out;
  for (const auto& f : facts) {
    std::optional<Lineage> lr;
    std::optional<Lineage> ls;
    if (auto it = sr.entries.find(f); it != sr.entries.end()) lr = it->second;
    if (auto it = ss.entries.find(f); it != ss.entries.end()) ls = it->second;
    switch (kind) {
      case SetOpKind::Intersection:
        if (lr && ls) out.emplace(f, and_fn(lr, ls));
        break;
      case SetOpKind::Union:
        out.emplace(f, or_fn(lr, ls));
        break;
      case SetOpKind::Difference:
        if (lr) out.emplace(f, and_not_fn(lr, ls));
        break;
    }
  }
  return out;
}

namespace {

struct Run {
  TimePoint ts;
  TimePoint te;
  Lineage lineage;
};

TpRelation facts_subset(const TpRelation& rel, const Fact& fact) {
  std::vector<TpTuple> tuples;
  for (const auto& t : rel) {
    if (t.fact == fact) tuples.push_back(t);
  }
  return TpRelation(rel.arity(), std::move(tuples));
}

}  // namespace

TpRelation oracle_setop(SetOpKind kind, const TpRelation& r, const TpRelation& s) {
  if (r.arity() != s.arity()) throw ValidationError("operands have incompatible fact arity");
  require_duplicate_free(r);
  require_duplicate_free(s);

  TimePoint lo = kMaxTime;
  TimePoint hi = kMinTime;
  std::set<Fact> facts;
  for (const TpRelation* rel : {&r, &s}) {
    for (const auto& t : *rel) {
      lo = std::min(lo, t.interval.ts());
      hi = std::max(hi, t.interval.te());
      facts.insert(t.fact);
    }
  }
  if (!facts.empty() && hi - lo > kMaxSpan) {
    throw ValidationError("oracle span " + std::to_string(hi - lo) + " exceeds limit " +
                          std::to_string(kMaxSpan));
  }

  ProbAssignment env = probability_assignment(r);
  env.merge(probability_assignment(s));
  const AtomProbability prob = lookup_in(env);

  std::vector<TpTuple> out;
  for (const Fact& fact : facts) {
    const TpRelation rf = facts_subset(r, fact);
    const TpRelation sf = facts_subset(s, fact);
    TimePoint from = kMaxTime;
    TimePoint to = kMinTime;
    for (const TpRelation* rel : {&rf, &sf}) {
      for (const auto& t : *rel) {
        from = std::min(from, t.interval.ts());
        to = std::max(to, t.interval.te());
      }
    }

    std::optional<Run> run;
    auto flush = [&] {
      if (!run) return;
      const double p = evaluate(run->lineage, prob).p;
      out.push_back(TpTuple{fact, run->lineage, Interval(run->ts, run->te), p});
      run.reset();
    };
    for (TimePoint t = from; t < to; ++t) {
      const auto result = snapshot_setop(kind, timeslice(rf, t), timeslice(sf, t));
      auto it = result.find(fact);
      if (it == result.end()) {
        flush();
        continue;
      }
      if (run && run->te == t && syntactic_equiv(run->lineage, it->second)) {
        run->te = t + 1;
      } else {
        flush();
        run = Run{t, t + 1, it->second};
      }
    }
    flush();
  }
  return TpRelation(r.arity(), std::move(out), true);
}

}  // namespace tpset::oracle
