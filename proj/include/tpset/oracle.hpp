#ifndef TPSET_ORACLE_HPP
#define TPSET_ORACLE_HPP

#include <map>

#include "tpset/core.hpp"
#include "tpset/setops.hpp"

// Reference semantics by direct snapshot evaluation. Every chronon is
// evaluated on its own, and maximal runs of equivalent lineage are
// coalesced. Cost grows with the time span, so this is a test oracle only.

namespace tpset::oracle {

/// Largest time span oracle_setop accepts.
inline constexpr TimePoint kMaxSpan = 100'000;

struct Snapshot {
  TimePoint at;
  std::map<Fact, Lineage> entries;
};

/// Lineage of the tuple valid at t, per fact.
Snapshot timeslice(const TpRelation& rel, TimePoint t);

/// Per-fact filter and concatenation of one operation at a single chronon.
std::map<Fact, Lineage> snapshot_setop(SetOpKind kind, const Snapshot& sr, const Snapshot& ss);

/// Sequenced evaluation of r `kind` s. Probabilities are computed from the
/// atoms' embedded probabilities. Throws ValidationError when the operands
/// span more than kMaxSpan chronons or are not duplicate-free.
TpRelation oracle_setop(SetOpKind kind, const TpRelation& r, const TpRelation& s);

}  // namespace tpset::oracle

#endif  // TPSET_ORACLE_HPP
