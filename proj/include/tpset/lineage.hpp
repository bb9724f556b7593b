#ifndef TPSET_LINEAGE_HPP
#define TPSET_LINEAGE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace tpset {

/// Identifier of a base tuple; each one is an independent Boolean variable.
using AtomId = std::string;

/// Marginal probability of every base atom, keyed by id.
using ProbAssignment = std::unordered_map<AtomId, double>;

/// Misuse of the concatenation functions (absent operands where the
/// operation requires one).
class LineageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Probability evaluation failed: an atom has no known probability, or a
/// non-read-once formula exceeds the expansion budget.
class ProbabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LineageKind : std::uint8_t { Atom, Not, And, Or };

/// Immutable Boolean formula over atom ids.
///
/// A Lineage is a reference-counted handle to a shared tree node; copies are
/// O(1) and trees are never mutated after construction. Atoms may carry the
/// marginal probability of the base tuple they name so that derived relations
/// stay self-contained inputs for further operations.
class Lineage {
 public:
  static Lineage atom(AtomId id);
  static Lineage atom(AtomId id, double p);
  static Lineage negation(Lineage operand);
  static Lineage conjunction(Lineage lhs, Lineage rhs);
  static Lineage disjunction(Lineage lhs, Lineage rhs);

  Lineage(const Lineage& other) noexcept;
  Lineage(Lineage&& other) noexcept;
  Lineage& operator=(const Lineage& other) noexcept;
  Lineage& operator=(Lineage&& other) noexcept;
  ~Lineage();

  LineageKind kind() const;
  bool is_atom() const { return kind() == LineageKind::Atom; }

  // Atom accessors.
  const AtomId& atom_id() const;
  std::optional<double> atom_probability() const;

  // Not: operand(). And/Or: lhs(), rhs().
  const Lineage& operand() const;
  const Lineage& lhs() const;
  const Lineage& rhs() const;

  /// Identity of the underlying node, not structural equality.
  bool same_node(const Lineage& other) const { return node_ == other.node_; }

 private:
  struct Node;
  struct AtomNode;
  struct InnerNode;
  explicit Lineage(Node* node) noexcept : node_(node) {}

  Node* node_;
};

// Concatenation functions. These never simplify: the output contains every
// atom occurrence of the inputs.

/// (l1) AND (l2). Both operands are required.
Lineage and_fn(const std::optional<Lineage>& l1, const std::optional<Lineage>& l2);

/// l1 if l2 is absent, otherwise (l1) AND NOT (l2). l1 is required.
Lineage and_not_fn(const std::optional<Lineage>& l1, const std::optional<Lineage>& l2);

/// The present operand if only one is, otherwise (l1) OR (l2).
Lineage or_fn(const std::optional<Lineage>& l1, const std::optional<Lineage>& l2);

// Same functions with absent operands passed as null pointers; these avoid
// copying handles into optionals on hot paths.
Lineage and_fn(const Lineage& l1, const Lineage& l2);
Lineage and_not_fn(const Lineage& l1, const Lineage* l2);
Lineage or_fn(const Lineage* l1, const Lineage* l2);

std::set<AtomId> base_atoms(const Lineage& l);

/// Number of atom leaves, counting repetitions.
std::size_t atom_occurrences(const Lineage& l);

/// True iff no atom id occurs more than once.
bool is_one_occurrence_form(const Lineage& l);

/// True iff the two formulas share no atom id.
bool atoms_disjoint(const Lineage& a, const Lineage& b);

/// Flattens same-operator And/Or chains and orders their operands by
/// canonical_key. Negations stay in place; duplicates are kept.
Lineage canonicalize(const Lineage& l);

/// Deterministic preorder serialization of the canonical form.
std::string canonical_key(const Lineage& l);

/// Both absent, or both present with identical canonical forms. Sound but
/// incomplete with respect to logical equivalence.
bool syntactic_equiv(const std::optional<Lineage>& l1, const std::optional<Lineage>& l2);

/// Resolves the probability of an atom leaf. Throws ProbabilityError when the
/// atom is unknown.
using AtomProbability = std::function<double(const Lineage& atom)>;

/// Probability embedded in the atom node.
double embedded_probability(const Lineage& atom);

/// Looks the atom up in an assignment.
AtomProbability lookup_in(const ProbAssignment& pa);

enum class EvaluationPath : std::uint8_t { ReadOnce, ShannonExpansion };

struct Evaluation {
  double p;
  EvaluationPath path;
};

/// Maximum number of distinct repeated atoms Shannon expansion conditions on.
inline constexpr std::size_t kShannonBudget = 25;

/// Exact marginal probability under atom independence. One-occurrence
/// formulas are evaluated bottom-up in linear time; anything else is expanded
/// on its repeated atoms.
Evaluation evaluate(const Lineage& l, const AtomProbability& prob);

double probability(const Lineage& l, const ProbAssignment& pa);

/// Uses probabilities embedded in the atoms.
double probability(const Lineage& l);

/// Bottom-up evaluation that assumes independence of every subformula.
/// Throws ProbabilityError if the formula is not in one-occurrence form.
double read_once_probability(const Lineage& l, const AtomProbability& prob);

enum class ExpansionScope : std::uint8_t {
  RepeatedAtoms,  // condition until what remains is read-once
  AllAtoms,       // condition on every atom until the formula is constant
};

/// Shannon expansion. Budget applies to the number of atoms the scope selects.
double shannon_probability(const Lineage& l, const AtomProbability& prob,
                           ExpansionScope scope = ExpansionScope::RepeatedAtoms);

}  // namespace tpset

#endif  // TPSET_LINEAGE_HPP
