#ifndef TPSET_CORE_HPP
#define TPSET_CORE_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpset/lineage.hpp"

namespace tpset {

/// Chronon index. The accepted domain is [kMinTime, kMaxTime] so that
/// successor/predecessor arithmetic never overflows.
using TimePoint = std::int64_t;

inline constexpr TimePoint kMinTime = -(TimePoint{1} << 62);
inline constexpr TimePoint kMaxTime = TimePoint{1} << 62;

/// Raised when a relation or one of its tuples breaks a data-model invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Half-open interval [ts, te) with ts < te.
class Interval {
 public:
  Interval(TimePoint ts, TimePoint te) : ts_(ts), te_(te) {
    if (ts < kMinTime || te > kMaxTime || !(ts < te)) [[unlikely]] reject(ts, te);
  }

  TimePoint ts() const { return ts_; }
  TimePoint te() const { return te_; }
  TimePoint length() const { return te_ - ts_; }
  bool contains(TimePoint t) const { return ts_ <= t && t < te_; }
  bool overlaps(const Interval& other) const {
    return ts_ < other.te_ && other.ts_ < te_;
  }

  friend bool operator==(const Interval&, const Interval&) = default;
  friend auto operator<=>(const Interval&, const Interval&) = default;

 private:
  [[noreturn]] static void reject(TimePoint ts, TimePoint te);

  TimePoint ts_;
  TimePoint te_;
};

/// Non-temporal attribute values of a tuple. Attribute storage is shared, so
/// copies are cheap and tuples generated for the same fact can alias it.
class Fact {
 public:
  Fact();
  explicit Fact(std::vector<std::string> attrs);
  Fact(std::initializer_list<std::string> attrs);

  std::span<const std::string> attrs() const { return *attrs_; }
  std::size_t arity() const { return attrs_->size(); }

  /// True when both facts use the same attribute storage, which implies
  /// equality. Cheaper than operator== but may be false for equal facts.
  bool shares_storage(const Fact& other) const { return attrs_ == other.attrs_; }

  /// Attribute-wise lexicographic order, then by arity.
  friend std::strong_ordering operator<=>(const Fact& a, const Fact& b);
  friend bool operator==(const Fact& a, const Fact& b);

 private:
  std::shared_ptr<const std::vector<std::string>> attrs_;
};

/// Human-readable rendering, attributes joined by ','. Diagnostics only.
std::string to_string(const Fact& fact);

struct TpTuple {
  Fact fact;
  Lineage lineage;
  Interval interval;
  double p;
};

/// A finite set of TP tuples over facts of one arity.
///
/// The sorted flag is a cached fact about tuple order, (fact asc, ts asc).
/// Relations are immutable once built; share them freely across threads.
class TpRelation {
 public:
  explicit TpRelation(std::size_t arity = 1);
  TpRelation(std::size_t arity, std::vector<TpTuple> tuples, bool sorted = false);

  std::size_t arity() const { return arity_; }
  std::size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }
  bool sorted() const { return sorted_; }

  std::span<const TpTuple> tuples() const { return tuples_; }
  const TpTuple& operator[](std::size_t i) const { return tuples_[i]; }
  auto begin() const { return tuples_.begin(); }
  auto end() const { return tuples_.end(); }

 private:
  std::size_t arity_;
  std::vector<TpTuple> tuples_;
  bool sorted_;
};

/// Order used for sweeping: fact ascending, then start point ascending.
bool sweep_less(const TpTuple& a, const TpTuple& b);

/// A pair of same-fact tuples whose intervals overlap.
struct DuplicateViolation {
  TpTuple first;
  TpTuple second;
};

/// Returns the first offending pair in sweep order, or nullopt if the
/// relation is duplicate-free.
std::optional<DuplicateViolation> validate_duplicate_free(const TpRelation& rel);

/// Throws ValidationError describing the first violation, if any.
void require_duplicate_free(const TpRelation& rel);

/// Stable sort by (fact, ts). Returns the input unchanged (but flagged) when it
/// is already in order.
TpRelation sort_relation(const TpRelation& rel);

/// True when the tuples are in sweep order, checked by a linear scan unless the
/// relation is already flagged.
bool is_sweep_ordered(const TpRelation& rel);

/// Tuple indices in sweep order. Empty means the relation is already ordered
/// and the identity permutation applies.
std::vector<std::size_t> sweep_order(const TpRelation& rel);

/// Atom probabilities embedded in the relation's lineages. Atoms without a
/// known probability are skipped.
ProbAssignment probability_assignment(const TpRelation& rel);

}  // namespace tpset

#endif  // TPSET_CORE_HPP
