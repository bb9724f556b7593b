// Shared fixtures and independent reference computations for the tests.
#ifndef TPSET_TESTS_SUPPORT_HPP
#define TPSET_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "tpset/core.hpp"
#include "tpset/lawa.hpp"
#include "tpset/lineage.hpp"

namespace tpset::testing {

inline TpTuple tup(const std::string& fact, const std::string& atom, TimePoint ts, TimePoint te,
                   double p) {
  return TpTuple{Fact({fact}), Lineage::atom(atom, p), Interval(ts, te), p};
}

inline TpRelation market_a() {
  return TpRelation(1, {tup("milk", "a1", 2, 10, 0.3), tup("chips", "a2", 4, 7, 0.8),
                        tup("dates", "a3", 1, 3, 0.6)});
}

inline TpRelation market_b() {
  return TpRelation(1, {tup("milk", "b1", 5, 9, 0.6), tup("chips", "b2", 3, 6, 0.9)});
}

inline TpRelation market_c() {
  return TpRelation(1, {tup("milk", "c1", 1, 4, 0.6), tup("milk", "c2", 6, 8, 0.7),
                        tup("chips", "c3", 4, 5, 0.7), tup("chips", "c4", 7, 9, 0.8)});
}

inline Lineage A(const std::string& id) { return Lineage::atom(id); }
inline Lineage operator&(const Lineage& a, const Lineage& b) { return Lineage::conjunction(a, b); }
inline Lineage operator|(const Lineage& a, const Lineage& b) { return Lineage::disjunction(a, b); }
inline Lineage operator!(const Lineage& a) { return Lineage::negation(a); }

// Truth value of l in the world where exactly the atoms in `world` are true.
inline bool truth(const Lineage& l, const std::map<std::string, bool>& world) {
  switch (l.kind()) {
    case LineageKind::Atom: return world.at(l.atom_id());
    case LineageKind::Not: return !truth(l.operand(), world);
    case LineageKind::And: return truth(l.lhs(), world) && truth(l.rhs(), world);
    case LineageKind::Or: return truth(l.lhs(), world) || truth(l.rhs(), world);
  }
  return false;
}

// Sum over all 2^n possible worlds.
inline double enumerate_probability(const Lineage& l, const ProbAssignment& pa) {
  const auto atoms = base_atoms(l);
  const std::vector<std::string> ids(atoms.begin(), atoms.end());
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << ids.size()); ++mask) {
    std::map<std::string, bool> world;
    double weight = 1.0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const bool on = (mask >> i) & 1U;
      world[ids[i]] = on;
      const double p = pa.at(ids[i]);
      weight *= on ? p : 1.0 - p;
    }
    if (truth(l, world)) total += weight;
  }
  return total;
}

// Random formula over atoms x0..x{n_atoms-1}; atoms may repeat.
inline Lineage random_formula(std::mt19937_64& rng, std::size_t n_atoms, int depth) {
  std::uniform_int_distribution<int> pick(0, 3);
  const int k = depth <= 0 ? 0 : pick(rng);
  if (k == 0) {
    std::uniform_int_distribution<std::size_t> atom(0, n_atoms - 1);
    return Lineage::atom("x" + std::to_string(atom(rng)));
  }
  if (k == 1) return Lineage::negation(random_formula(rng, n_atoms, depth - 1));
  Lineage l = random_formula(rng, n_atoms, depth - 1);
  Lineage r = random_formula(rng, n_atoms, depth - 1);
  return k == 2 ? Lineage::conjunction(l, r) : Lineage::disjunction(l, r);
}

struct InstanceShape {
  std::size_t max_tuples = 30;
  std::size_t max_facts = 5;
  TimePoint domain = 50;
};

// Random duplicate-free relation: per fact, a random set of disjoint intervals
// inside [0, domain). Atom ids are prefix + index; tuples come out shuffled.
inline TpRelation random_relation(std::mt19937_64& rng, const std::string& prefix,
                                  const InstanceShape& shape) {
  std::uniform_int_distribution<std::size_t> nfacts(1, shape.max_facts);
  std::uniform_int_distribution<std::size_t> ntuples(0, shape.max_tuples);
  std::uniform_real_distribution<double> prob(0.05, 1.0);
  // Density knob: how much of the domain is covered.
  std::uniform_int_distribution<int> density(1, 4);

  const std::size_t facts = nfacts(rng);
  const std::size_t target = ntuples(rng);
  const int dens = density(rng);
  std::vector<TpTuple> out;
  for (std::size_t f = 0; f < facts && out.size() < target; ++f) {
    const Fact fact({"f" + std::to_string(f)});
    TimePoint t = std::uniform_int_distribution<TimePoint>(0, 5)(rng);
    while (out.size() < target) {
      t += std::uniform_int_distribution<TimePoint>(0, 4 / dens + 1)(rng);
      const TimePoint len = std::uniform_int_distribution<TimePoint>(1, 2 * dens + 1)(rng);
      if (t + len > shape.domain) break;
      const double p = prob(rng);
      out.push_back(TpTuple{fact, Lineage::atom(prefix + std::to_string(out.size()), p),
                            Interval(t, t + len), p});
      t += len;
      if (std::uniform_int_distribution<int>(0, static_cast<int>(target))(rng) == 0) break;
    }
  }
  std::shuffle(out.begin(), out.end(), rng);
  return TpRelation(1, std::move(out));
}

// Windows computed chronon by chronon: for every fact and time point, the
// indices of the valid tuples on each side; maximal runs of equal pairs.
struct RefWindow {
  Fact fact;
  TimePoint ts;
  TimePoint te;
  const TpTuple* r;
  const TpTuple* s;
};

inline std::vector<RefWindow> reference_windows(const TpRelation& r, const TpRelation& s) {
  std::map<Fact, std::map<TimePoint, std::pair<const TpTuple*, const TpTuple*>>> grid;
  for (const auto& t : r) {
    for (TimePoint x = t.interval.ts(); x < t.interval.te(); ++x) grid[t.fact][x].first = &t;
  }
  for (const auto& t : s) {
    for (TimePoint x = t.interval.ts(); x < t.interval.te(); ++x) grid[t.fact][x].second = &t;
  }
  std::vector<RefWindow> out;
  for (const auto& [fact, points] : grid) {
    std::optional<RefWindow> cur;
    for (const auto& [x, pair] : points) {
      if (cur && cur->te == x && cur->r == pair.first && cur->s == pair.second) {
        cur->te = x + 1;
        continue;
      }
      if (cur) out.push_back(*cur);
      cur = RefWindow{fact, x, x + 1, pair.first, pair.second};
    }
    if (cur) out.push_back(*cur);
  }
  return out;
}

inline std::size_t distinct_facts(const TpRelation& r, const TpRelation& s) {
  std::map<Fact, int> facts;
  for (const auto& t : r) facts[t.fact];
  for (const auto& t : s) facts[t.fact];
  return facts.size();
}

// Compares two relations as sets: same (fact, interval) keys, equivalent
// lineage, probabilities within tol. Returns a description of the first
// difference, or an empty string.
inline std::string relation_diff(const TpRelation& got, const TpRelation& want, double tol) {
  using Key = std::tuple<Fact, TimePoint, TimePoint>;
  std::map<Key, const TpTuple*> a;
  std::map<Key, const TpTuple*> b;
  for (const auto& t : got) a[{t.fact, t.interval.ts(), t.interval.te()}] = &t;
  for (const auto& t : want) b[{t.fact, t.interval.ts(), t.interval.te()}] = &t;
  auto name = [](const Key& k) {
    return to_string(std::get<0>(k)) + " [" + std::to_string(std::get<1>(k)) + "," +
           std::to_string(std::get<2>(k)) + ")";
  };
  if (a.size() != got.size() || b.size() != want.size()) return "duplicate keys";
  for (const auto& [k, t] : a) {
    if (!b.count(k)) return "unexpected " + name(k);
  }
  for (const auto& [k, t] : b) {
    auto it = a.find(k);
    if (it == a.end()) return "missing " + name(k);
    if (!syntactic_equiv(it->second->lineage, t->lineage)) return "lineage differs at " + name(k);
    if (!(std::abs(it->second->p - t->p) <= tol)) {
      return "probability differs at " + name(k) + ": " + std::to_string(it->second->p) +
             " vs " + std::to_string(t->p);
    }
  }
  return {};
}

}  // namespace tpset::testing

#endif  // TPSET_TESTS_SUPPORT_HPP
