#include "tpset/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tpset/lawa.hpp"

namespace tpset {

namespace {

// Probabilities are drawn on a grid of 1e-9 so that every value is written
// and read back exactly by the relation file format.
constexpr double kProbGrid = 1e9;

}  // namespace

std::uint64_t SplitMix64::below_or_equal(std::uint64_t bound) {
  if (bound == std::numeric_limits<std::uint64_t>::max()) return next();
  // Lemire's multiply-shift with rejection; unbiased.
  const std::uint64_t range = bound + 1;
  unsigned __int128 m = static_cast<unsigned __int128>(next()) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next()) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

void validate(const GenParams& p) {
  if (p.num_facts == 0) throw std::invalid_argument("num_facts must be at least 1");
  if (p.num_facts > p.num_tuples) {
    throw std::invalid_argument("num_facts must not exceed num_tuples");
  }
  if (p.max_interval_len < 1) throw std::invalid_argument("max_interval_len must be at least 1");
  if (p.max_gap < 0) throw std::invalid_argument("max_gap must be non-negative");
  if (!(p.prob_low >= 0.0 && p.prob_low <= p.prob_high && p.prob_high <= 1.0 &&
        p.prob_high * kProbGrid >= 1.0)) {
    throw std::invalid_argument("probability range must satisfy 0 <= low <= high <= 1, high >= 1e-9");
  }
  const auto per_fact = static_cast<TimePoint>((p.num_tuples + p.num_facts - 1) / p.num_facts);
  if (p.max_interval_len > kMaxTime / 2 || p.max_gap > kMaxTime / 2 ||
      per_fact > kMaxTime / (p.max_interval_len + p.max_gap)) {
    throw std::invalid_argument("layout would exceed the time domain");
  }
}

TpRelation generate(const GenParams& params) {
  validate(params);
  SplitMix64 rng(params.seed);

  std::vector<std::pair<Fact, std::size_t>> facts;  // fact, tuple count
  facts.reserve(params.num_facts);
  for (std::size_t k = 0; k < params.num_facts; ++k) {
    const std::size_t count =
        params.num_tuples / params.num_facts + (k < params.num_tuples % params.num_facts ? 1 : 0);
    facts.emplace_back(Fact({params.fact_prefix + std::to_string(k)}), count);
  }
  std::sort(facts.begin(), facts.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // Grid points in (prob_low, prob_high].
  const auto k_high = static_cast<std::uint64_t>(std::llround(params.prob_high * kProbGrid));
  const auto k_low =
      std::min(k_high - 1, static_cast<std::uint64_t>(std::llround(params.prob_low * kProbGrid)));
  std::vector<TpTuple> tuples;
  tuples.reserve(params.num_tuples);
  for (const auto& [fact, count] : facts) {
    TimePoint t = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const auto len = 1 + static_cast<TimePoint>(
                               rng.below_or_equal(static_cast<std::uint64_t>(params.max_interval_len - 1)));
      const auto gap =
          static_cast<TimePoint>(rng.below_or_equal(static_cast<std::uint64_t>(params.max_gap)));
      const double p =
          static_cast<double>(k_high - rng.below_or_equal(k_high - k_low - 1)) / kProbGrid;
      Lineage atom = Lineage::atom(params.atom_prefix + std::to_string(tuples.size()), p);
      tuples.push_back(TpTuple{fact, std::move(atom), Interval(t, t + len), p});
      t += len + gap;
    }
  }
  return TpRelation(1, std::move(tuples), true);
}

double overlapping_factor(const TpRelation& r, const TpRelation& s) {
  WindowAdvancer advancer(r, s);
  std::size_t total = 0;
  std::size_t both = 0;
  while (auto w = advancer.next()) {
    ++total;
    if (w->r != nullptr && w->s != nullptr) ++both;
  }
  if (total == 0) throw std::invalid_argument("overlapping factor undefined: no windows");
  return static_cast<double>(both) / static_cast<double>(total);
}

}  // namespace tpset
