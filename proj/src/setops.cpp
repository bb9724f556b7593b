#include "tpset/setops.hpp"

#include <limits>

#include "tpset/lawa.hpp"

namespace tpset {

std::string_view to_string(SetOpKind kind) {
  switch (kind) {
    case SetOpKind::Intersection:
      return "intersect";
    case SetOpKind::Union:
      return "union";
    case SetOpKind::Difference:
      return "except";
  }
  return "?";
}

namespace {

constexpr double kNoProbability = std::numeric_limits<double>::quiet_NaN();

// When the two sides share no atom they are independent, so the output
// probability follows from the input tuples' probabilities. Otherwise the
// whole formula is evaluated from its atoms.
double annotate(SetOpKind kind, const Lineage& out, const TpTuple* r, const TpTuple* s) {
  if (r == nullptr) return s->p;
  if (s == nullptr) return r->p;
  if (!atoms_disjoint(r->lineage, s->lineage)) return probability(out);
  switch (kind) {
    case SetOpKind::Intersection:
      return r->p * s->p;
    case SetOpKind::Union:
      return 1.0 - (1.0 - r->p) * (1.0 - s->p);
    case SetOpKind::Difference:
      return r->p * (1.0 - s->p);
  }
  return kNoProbability;
}

template <SetOpKind Kind>
TpRelation run(const TpRelation& r, const TpRelation& s, SetOpOptions opts) {
  if (r.arity() != s.arity()) {
    throw ValidationError("operands have incompatible fact arity " + std::to_string(r.arity()) +
                          " and " + std::to_string(s.arity()));
  }
  WindowAdvancer advancer(r, s);
  std::vector<TpTuple> out;
  // Upper bound on the output size. Pages beyond the used prefix are never
  // touched, so over-reserving costs address space only.
  out.reserve(Kind == SetOpKind::Intersection ? r.size() + s.size()
              : Kind == SetOpKind::Difference ? r.size() + 2 * s.size()
                                              : 2 * (r.size() + s.size()));
  for (;;) {
    const SweepStatus& st = advancer.status();
    // Stop once no further window can pass the filter.
    if constexpr (Kind == SetOpKind::Intersection) {
      if (st.r_done() | st.s_done()) break;
    } else if constexpr (Kind == SetOpKind::Difference) {
      if (st.r_done()) break;
    }
    auto w = advancer.next();
    if (!w) break;

    auto lineage_of = [](const TpTuple* t) { return t == nullptr ? nullptr : &t->lineage; };
    if constexpr (Kind == SetOpKind::Intersection) {
      if (w->r == nullptr || w->s == nullptr) continue;
    } else if constexpr (Kind == SetOpKind::Difference) {
      if (w->r == nullptr) continue;
    }
    Lineage lambda = [&] {
      if constexpr (Kind == SetOpKind::Intersection) {
        return and_fn(w->r->lineage, w->s->lineage);
      } else if constexpr (Kind == SetOpKind::Difference) {
        return and_not_fn(w->r->lineage, lineage_of(w->s));
      } else {
        return or_fn(lineage_of(w->r), lineage_of(w->s));
      }
    }();
    const double p =
        opts.annotate_probability ? annotate(Kind, lambda, w->r, w->s) : kNoProbability;
    out.push_back(TpTuple{*w->fact, std::move(lambda), w->interval, p});
  }
  return TpRelation(r.arity(), std::move(out), true);
}

}  // namespace

TpRelation intersect(const TpRelation& r, const TpRelation& s, SetOpOptions opts) {
  return run<SetOpKind::Intersection>(r, s, opts);
}

TpRelation unite(const TpRelation& r, const TpRelation& s, SetOpOptions opts) {
  return run<SetOpKind::Union>(r, s, opts);
}

TpRelation except(const TpRelation& r, const TpRelation& s, SetOpOptions opts) {
  return run<SetOpKind::Difference>(r, s, opts);
}

TpRelation apply_setop(SetOpKind kind, const TpRelation& r, const TpRelation& s,
                       SetOpOptions opts) {
  switch (kind) {
    case SetOpKind::Intersection:
      return intersect(r, s, opts);
    case SetOpKind::Union:
      return unite(r, s, opts);
    case SetOpKind::Difference:
      return except(r, s, opts);
  }
  throw std::logic_error("unknown set operation");
}

}  // namespace tpset
