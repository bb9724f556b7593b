#ifndef TPSET_LAWA_HPP
#define TPSET_LAWA_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tpset/core.hpp"

namespace tpset {

/// Lineage-aware temporal window: over `interval`, fact `fact` is included in
/// the r-tuple with lineage `lambda_r` (if any) and the s-tuple with lineage
/// `lambda_s` (if any). At least one side is present.
struct Window {
  Fact fact;
  Interval interval;
  std::optional<Lineage> lambda_r;
  std::optional<Lineage> lambda_s;
};

/// A relation seen in sweep order, either directly or through a permutation.
class SweepInput {
 public:
  SweepInput() = default;
  SweepInput(std::span<const TpTuple> tuples, std::span<const std::size_t> order)
      : tuples_(tuples), order_(order) {}

  std::size_t size() const { return tuples_.size(); }
  const TpTuple& operator[](std::size_t i) const {
    return order_.empty() ? tuples_[i] : tuples_[order_[i]];
  }

 private:
  std::span<const TpTuple> tuples_;
  std::span<const std::size_t> order_;
};

/// State carried between calls of the window advancer.
///
/// `r_valid`/`s_valid` point at the tuple of each side that is valid at the
/// previous window's end and includes `curr_fact`; `r_next`/`s_next` are the
/// positions of the next unconsumed tuples. Cursors only move forward.
struct SweepStatus {
  SweepInput r;
  SweepInput s;
  std::optional<TimePoint> prev_win_te;
  const Fact* curr_fact = nullptr;
  const TpTuple* r_valid = nullptr;
  const TpTuple* s_valid = nullptr;
  std::size_t r_next = 0;
  std::size_t s_next = 0;

  // Facts of each side already compared with curr_fact, so tuples sharing
  // their storage skip the string comparison. Cleared when curr_fact changes.
  const Fact* r_fact_eq = nullptr;
  const Fact* r_fact_ne = nullptr;
  const Fact* s_fact_eq = nullptr;
  const Fact* s_fact_ne = nullptr;

  const TpTuple* r_cursor() const { return r_next < r.size() ? &r[r_next] : nullptr; }
  const TpTuple* s_cursor() const { return s_next < s.size() ? &s[s_next] : nullptr; }

  /// No tuple of r can contribute to any further window.
  bool r_done() const { return (r_valid == nullptr) & (r_next >= r.size()); }
  bool s_done() const { return (s_valid == nullptr) & (s_next >= s.size()); }
};

/// Borrowed view of a window; pointers reference the swept relations.
struct WindowRef {
  const Fact* fact;
  Interval interval;
  const TpTuple* r;  // valid r-tuple, or null
  const TpTuple* s;  // valid s-tuple, or null

  Window materialize() const;
};

/// Status positioned before the first window of two relations that are
/// already in sweep order. Throws ValidationError if either relation is out
/// of order or not duplicate-free. The relations must outlive the status.
SweepStatus init_status(const TpRelation& r, const TpRelation& s);

/// Advances the sweep by one window. Returns nullopt, leaving the status
/// unchanged, once neither side has a valid tuple nor an unconsumed one.
std::optional<WindowRef> lawa_advance(SweepStatus& status);

/// Same as lawa_advance, returning an owning Window.
std::optional<Window> lawa_next(SweepStatus& status);

/// Owns the sweep permutations for relations in arbitrary order and drives
/// the advancer over them. Not copyable; the relations must outlive it.
class WindowAdvancer {
 public:
  WindowAdvancer(const TpRelation& r, const TpRelation& s);
  WindowAdvancer(const WindowAdvancer&) = delete;
  WindowAdvancer& operator=(const WindowAdvancer&) = delete;

  std::optional<WindowRef> next() { return lawa_advance(status_); }
  const SweepStatus& status() const { return status_; }

 private:
  std::vector<std::size_t> r_order_;
  std::vector<std::size_t> s_order_;
  SweepStatus status_;
};

/// Every lineage-aware window of r and s, facts ascending and intervals
/// ascending within a fact.
std::vector<Window> windows(const TpRelation& r, const TpRelation& s);

/// Number of windows without materializing them.
std::size_t count_windows(const TpRelation& r, const TpRelation& s);

/// Upper bound on the window count: start and end points of both relations
/// minus the number of distinct facts.
std::size_t window_count_bound(const TpRelation& r, const TpRelation& s);

}  // namespace tpset

#endif  // TPSET_LAWA_HPP
