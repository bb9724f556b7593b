#include "tpset/core.hpp"

#include <algorithm>
#include <numeric>

namespace tpset {

void Interval::reject(TimePoint ts, TimePoint te) {
  if (ts < kMinTime || te > kMaxTime) {
    throw ValidationError("interval [" + std::to_string(ts) + "," + std::to_string(te) +
                          ") outside the time domain");
  }
  throw ValidationError("empty or inverted interval [" + std::to_string(ts) + "," +
                        std::to_string(te) + ")");
}

namespace {

const std::shared_ptr<const std::vector<std::string>>& empty_attrs() {
  static const auto attrs = std::make_shared<const std::vector<std::string>>();
  return attrs;
}

}  // namespace

Fact::Fact() : attrs_(empty_attrs()) {}

Fact::Fact(std::vector<std::string> attrs)
    : attrs_(std::make_shared<const std::vector<std::string>>(std::move(attrs))) {}

Fact::Fact(std::initializer_list<std::string> attrs)
    : Fact(std::vector<std::string>(attrs)) {}

std::strong_ordering operator<=>(const Fact& a, const Fact& b) {
  if (a.attrs_ == b.attrs_) return std::strong_ordering::equal;
  const auto& x = *a.attrs_;
  const auto& y = *b.attrs_;
  const std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int c = x[i].compare(y[i]);
    if (c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return x.size() <=> y.size();
}

bool operator==(const Fact& a, const Fact& b) {
  return a.attrs_ == b.attrs_ || *a.attrs_ == *b.attrs_;
}

std::string to_string(const Fact& fact) {
  std::string out;
  for (const auto& attr : fact.attrs()) {
    if (!out.empty()) out += ',';
    out += attr;
  }
  return out;
}

TpRelation::TpRelation(std::size_t arity) : arity_(arity), sorted_(true) {}

TpRelation::TpRelation(std::size_t arity, std::vector<TpTuple> tuples, bool sorted)
    : arity_(arity), tuples_(std::move(tuples)), sorted_(sorted || tuples_.size() <= 1) {
  for (const auto& t : tuples_) {
    if (t.fact.arity() != arity_) {
      throw ValidationError("fact '" + to_string(t.fact) + "' has arity " +
                            std::to_string(t.fact.arity()) + ", relation expects " +
                            std::to_string(arity_));
    }
  }
}

bool sweep_less(const TpTuple& a, const TpTuple& b) {
  const auto c = a.fact <=> b.fact;
  if (c != 0) return c < 0;
  return a.interval.ts() < b.interval.ts();
}

bool is_sweep_ordered(const TpRelation& rel) {
  if (rel.sorted()) return true;
  const auto tuples = rel.tuples();
  return std::is_sorted(tuples.begin(), tuples.end(), sweep_less);
}

std::vector<std::size_t> sweep_order(const TpRelation& rel) {
  if (is_sweep_ordered(rel)) return {};
  std::vector<std::size_t> order(rel.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&rel](std::size_t a, std::size_t b) { return sweep_less(rel[a], rel[b]); });
  return order;
}

TpRelation sort_relation(const TpRelation& rel) {
  const auto order = sweep_order(rel);
  if (order.empty()) {
    return TpRelation(rel.arity(), std::vector<TpTuple>(rel.begin(), rel.end()), true);
  }
  std::vector<TpTuple> tuples;
  tuples.reserve(rel.size());
  for (std::size_t i : order) tuples.push_back(rel[i]);
  return TpRelation(rel.arity(), std::move(tuples), true);
}

std::optional<DuplicateViolation> validate_duplicate_free(const TpRelation& rel) {
  const auto order = sweep_order(rel);
  auto at = [&](std::size_t i) -> const TpTuple& { return order.empty() ? rel[i] : rel[order[i]]; };
  // In sweep order any overlap shows up between neighbours: if tuples i < j
  // overlap then ts(i+1) <= ts(j) < te(i).
  for (std::size_t i = 1; i < rel.size(); ++i) {
    const TpTuple& prev = at(i - 1);
    const TpTuple& cur = at(i);
    if (prev.fact == cur.fact && prev.interval.te() > cur.interval.ts()) {
      return DuplicateViolation{prev, cur};
    }
  }
  return std::nullopt;
}

void require_duplicate_free(const TpRelation& rel) {
  if (auto v = validate_duplicate_free(rel)) {
    auto describe = [](const TpTuple& t) {
      std::string id = t.lineage.is_atom() ? t.lineage.atom_id() : std::string("<derived>");
      return id + " (" + to_string(t.fact) + ", [" + std::to_string(t.interval.ts()) + "," +
             std::to_string(t.interval.te()) + "))";
    };
    throw ValidationError("relation is not duplicate-free: " + describe(v->first) +
                          " overlaps " + describe(v->second));
  }
}

namespace {

void collect_probabilities(const Lineage& l, ProbAssignment& out) {
  switch (l.kind()) {
    case LineageKind::Atom:
      if (auto p = l.atom_probability()) out.emplace(l.atom_id(), *p);
      return;
    case LineageKind::Not:
      collect_probabilities(l.operand(), out);
      return;
    default:
      collect_probabilities(l.lhs(), out);
      collect_probabilities(l.rhs(), out);
      return;
  }
}

}  // namespace

ProbAssignment probability_assignment(const TpRelation& rel) {
  ProbAssignment out;
  for (const auto& t : rel) collect_probabilities(t.lineage, out);
  return out;
}

}  // namespace tpset
