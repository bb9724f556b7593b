#ifndef TPSET_DATAGEN_HPP
#define TPSET_DATAGEN_HPP

#include <cstdint>
#include <string>

#include "tpset/core.hpp"

namespace tpset {

/// Parameters of a synthetic relation.
///
/// Tuples are dealt round-robin to `num_facts` facts. Per fact they are laid
/// out left to right from time 0: each interval is 1..max_interval_len
/// chronons long and followed by a gap of 0..max_gap chronons, so the result
/// is duplicate-free by construction. Probabilities are uniform over the
/// multiples of 1e-9 in (prob_low, prob_high].
struct GenParams {
  std::size_t num_tuples = 1000;
  std::size_t num_facts = 1;
  TimePoint max_interval_len = 3;
  TimePoint max_gap = 3;
  double prob_low = 0.0;
  double prob_high = 1.0;
  std::uint64_t seed = 1;
  std::string atom_prefix = "r";
  std::string fact_prefix = "f";
};

/// Throws std::invalid_argument describing the first bad parameter.
void validate(const GenParams& params);

/// Deterministic for a given seed on every platform. The result is emitted in
/// sweep order and flagged sorted; atom ids are atom_prefix followed by the
/// tuple's position.
TpRelation generate(const GenParams& params);

/// Fraction of lineage-aware windows of r and s in which both sides are
/// valid. Throws std::invalid_argument when there are no windows at all.
double overlapping_factor(const TpRelation& r, const TpRelation& s);

/// SplitMix64: a small, fully specified generator.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, bound] (inclusive).
  std::uint64_t below_or_equal(std::uint64_t bound);

  /// Uniform double in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace tpset

#endif  // TPSET_DATAGEN_HPP
