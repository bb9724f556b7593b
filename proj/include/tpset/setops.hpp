#ifndef TPSET_SETOPS_HPP
#define TPSET_SETOPS_HPP

#include <cstdint>
#include <string_view>

#include "tpset/core.hpp"

namespace tpset {

enum class SetOpKind : std::uint8_t { Intersection, Union, Difference };

std::string_view to_string(SetOpKind kind);

struct SetOpOptions {
  /// When false, output probabilities are left as NaN and only lineage is
  /// computed.
  bool annotate_probability = true;
};

/// r ∩ s: windows where both sides are valid, lineage (λr) ∧ (λs).
TpRelation intersect(const TpRelation& r, const TpRelation& s, SetOpOptions opts = {});

/// r ∪ s: every window, lineage λr ∨ λs (or the present side alone).
TpRelation unite(const TpRelation& r, const TpRelation& s, SetOpOptions opts = {});

/// r − s: windows where r is valid, lineage (λr) ∧ ¬(λs), or λr alone.
TpRelation except(const TpRelation& r, const TpRelation& s, SetOpOptions opts = {});

TpRelation apply_setop(SetOpKind kind, const TpRelation& r, const TpRelation& s,
                       SetOpOptions opts = {});

}  // namespace tpset

#endif  // TPSET_SETOPS_HPP
