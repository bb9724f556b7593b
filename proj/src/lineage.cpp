#include "tpset/lineage.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <mutex>
#include <string_view>
#include <utility>
#include <vector>

namespace tpset {

namespace {

// Fixed-size blocks carved from large slabs, recycled through a per-thread
// free list. A block freed on another thread joins that thread's list. Slabs
// live until process exit.
template <std::size_t Size>
class NodePool {
 public:
  static void* allocate() {
    State& st = state();
    if (st.free != nullptr) {
      Block* b = st.free;
      st.free = b->next;
      return b;
    }
    if (st.cursor == st.end) refill(st);
    void* p = st.cursor;
    st.cursor += Size;
    return p;
  }

  static void release(void* p) noexcept {
    State& st = state();
    auto* b = static_cast<Block*>(p);
    b->next = st.free;
    st.free = b;
  }

 private:
  static_assert(Size >= sizeof(void*) && Size % alignof(void*) == 0);
  struct Block {
    Block* next;
  };
  struct State {
    Block* free = nullptr;
    char* cursor = nullptr;
    char* end = nullptr;
  };
  static constexpr std::size_t kSlabBlocks = 4096;

  static State& state() {
    thread_local State st;
    return st;
  }

  static void refill(State& st) {
    static std::mutex mu;
    static std::vector<std::unique_ptr<char[]>> slabs;
    auto slab = std::make_unique<char[]>(Size * kSlabBlocks);
    st.cursor = slab.get();
    st.end = st.cursor + Size * kSlabBlocks;
    std::lock_guard lock(mu);
    slabs.push_back(std::move(slab));
  }
};

}  // namespace

struct Lineage::Node {
  std::atomic<std::uint32_t> refs{1};
  LineageKind kind;

  explicit Node(LineageKind k) : kind(k) {}
};

struct Lineage::AtomNode : Lineage::Node {
  double p;
  AtomId id;

  AtomNode(AtomId i, double prob) : Node(LineageKind::Atom), p(prob), id(std::move(i)) {}

  static void* operator new(std::size_t);
  static void operator delete(void* p) noexcept;
};

void* Lineage::AtomNode::operator new(std::size_t) { return NodePool<sizeof(AtomNode)>::allocate(); }
void Lineage::AtomNode::operator delete(void* p) noexcept {
  NodePool<sizeof(AtomNode)>::release(p);
}

// Not keeps its operand in lhs.
struct Lineage::InnerNode : Lineage::Node {
  Lineage lhs;
  Lineage rhs{nullptr};

  InnerNode(LineageKind k, Lineage l) : Node(k), lhs(std::move(l)) {}
  InnerNode(LineageKind k, Lineage l, Lineage r) : Node(k), lhs(std::move(l)), rhs(std::move(r)) {}

  static void* operator new(std::size_t);
  static void operator delete(void* p) noexcept;
};

void* Lineage::InnerNode::operator new(std::size_t) {
  return NodePool<sizeof(InnerNode)>::allocate();
}
void Lineage::InnerNode::operator delete(void* p) noexcept {
  NodePool<sizeof(InnerNode)>::release(p);
}

Lineage Lineage::atom(AtomId id) {
  return Lineage(new AtomNode(std::move(id), std::numeric_limits<double>::quiet_NaN()));
}

Lineage Lineage::atom(AtomId id, double p) { return Lineage(new AtomNode(std::move(id), p)); }

Lineage Lineage::negation(Lineage operand) {
  return Lineage(new InnerNode(LineageKind::Not, std::move(operand)));
}

Lineage Lineage::conjunction(Lineage lhs, Lineage rhs) {
  return Lineage(new InnerNode(LineageKind::And, std::move(lhs), std::move(rhs)));
}

Lineage Lineage::disjunction(Lineage lhs, Lineage rhs) {
  return Lineage(new InnerNode(LineageKind::Or, std::move(lhs), std::move(rhs)));
}

Lineage::Lineage(const Lineage& other) noexcept : node_(other.node_) {
  if (node_) node_->refs.fetch_add(1, std::memory_order_relaxed);
}

Lineage::Lineage(Lineage&& other) noexcept : node_(std::exchange(other.node_, nullptr)) {}

Lineage& Lineage::operator=(const Lineage& other) noexcept {
  Lineage tmp(other);
  std::swap(node_, tmp.node_);
  return *this;
}

Lineage& Lineage::operator=(Lineage&& other) noexcept {
  Lineage tmp(std::move(other));
  std::swap(node_, tmp.node_);
  return *this;
}

Lineage::~Lineage() {
  if (node_ && node_->refs.fetch_sub(1, std::memory_order_acq_rel) == 1) {
    if (node_->kind == LineageKind::Atom) {
      delete static_cast<AtomNode*>(node_);
    } else {
      delete static_cast<InnerNode*>(node_);
    }
  }
}

LineageKind Lineage::kind() const { return node_->kind; }
const AtomId& Lineage::atom_id() const { return static_cast<const AtomNode*>(node_)->id; }

std::optional<double> Lineage::atom_probability() const {
  const double p = static_cast<const AtomNode*>(node_)->p;
  if (std::isnan(p)) return std::nullopt;
  return p;
}

const Lineage& Lineage::operand() const { return static_cast<const InnerNode*>(node_)->lhs; }
const Lineage& Lineage::lhs() const { return static_cast<const InnerNode*>(node_)->lhs; }
const Lineage& Lineage::rhs() const { return static_cast<const InnerNode*>(node_)->rhs; }

// --- concatenation -----------------------------------------------------------

Lineage and_fn(const Lineage& l1, const Lineage& l2) { return Lineage::conjunction(l1, l2); }

Lineage and_not_fn(const Lineage& l1, const Lineage* l2) {
  if (l2 == nullptr) return l1;
  return Lineage::conjunction(l1, Lineage::negation(*l2));
}

Lineage or_fn(const Lineage* l1, const Lineage* l2) {
  if (l1 == nullptr && l2 == nullptr) throw LineageError("or: at least one operand must be present");
  if (l1 == nullptr) return *l2;
  if (l2 == nullptr) return *l1;
  return Lineage::disjunction(*l1, *l2);
}

Lineage and_fn(const std::optional<Lineage>& l1, const std::optional<Lineage>& l2) {
  if (!l1 || !l2) throw LineageError("and: both operands must be present");
  return and_fn(*l1, *l2);
}

Lineage and_not_fn(const std::optional<Lineage>& l1, const std::optional<Lineage>& l2) {
  if (!l1) throw LineageError("andNot: left operand must be present");
  return and_not_fn(*l1, l2 ? &*l2 : nullptr);
}

Lineage or_fn(const std::optional<Lineage>& l1, const std::optional<Lineage>& l2) {
  return or_fn(l1 ? &*l1 : nullptr, l2 ? &*l2 : nullptr);
}

// --- atom sets ---------------------------------------------------------------

namespace {

void collect_ids(const Lineage& l, std::vector<std::string_view>& out) {
  switch (l.kind()) {
    case LineageKind::Atom:
      out.push_back(l.atom_id());
      return;
    case LineageKind::Not:
      collect_ids(l.operand(), out);
      return;
    case LineageKind::And:
    case LineageKind::Or:
      collect_ids(l.lhs(), out);
      collect_ids(l.rhs(), out);
      return;
  }
}

}  // namespace

std::set<AtomId> base_atoms(const Lineage& l) {
  std::vector<std::string_view> ids;
  collect_ids(l, ids);
  return {ids.begin(), ids.end()};
}

std::size_t atom_occurrences(const Lineage& l) {
  switch (l.kind()) {
    case LineageKind::Atom:
      return 1;
    case LineageKind::Not:
      return atom_occurrences(l.operand());
    default:
      return atom_occurrences(l.lhs()) + atom_occurrences(l.rhs());
  }
}

bool is_one_occurrence_form(const Lineage& l) {
  if (l.is_atom()) return true;
  std::vector<std::string_view> ids;
  collect_ids(l, ids);
  std::sort(ids.begin(), ids.end());
  return std::adjacent_find(ids.begin(), ids.end()) == ids.end();
}

bool atoms_disjoint(const Lineage& a, const Lineage& b) {
  if (a.is_atom() && b.is_atom()) {
    // Hot in set operations over base relations; ids usually differ early.
    if (a.same_node(b)) return false;
    const AtomId& x = a.atom_id();
    const AtomId& y = b.atom_id();
    if (x.size() != y.size()) return true;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] != y[i]) return true;
    }
    return false;
  }
  std::vector<std::string_view> left;
  std::vector<std::string_view> right;
  collect_ids(a, left);
  collect_ids(b, right);
  std::sort(left.begin(), left.end());
  std::sort(right.begin(), right.end());
  auto i = left.begin();
  auto j = right.begin();
  while (i != left.end() && j != right.end()) {
    if (*i == *j) return false;
    if (*i < *j) {
      ++i;
    } else {
      ++j;
    }
  }
  return true;
}

// --- canonical form ----------------------------------------------------------

namespace {

struct Canonical {
  Lineage lineage;
  std::string key;
};

Canonical canonical(const Lineage& l);

void flatten(const Lineage& l, LineageKind op, std::vector<Canonical>& out) {
  if (l.kind() == op) {
    flatten(l.lhs(), op, out);
    flatten(l.rhs(), op, out);
  } else {
    out.push_back(canonical(l));
  }
}

Canonical canonical(const Lineage& l) {
  switch (l.kind()) {
    case LineageKind::Atom:
      return {l, "@" + std::to_string(l.atom_id().size()) + ":" + l.atom_id()};
    case LineageKind::Not: {
      Canonical inner = canonical(l.operand());
      return {Lineage::negation(inner.lineage), "!(" + inner.key + ")"};
    }
    case LineageKind::And:
    case LineageKind::Or: {
      std::vector<Canonical> operands;
      flatten(l, l.kind(), operands);
      std::stable_sort(operands.begin(), operands.end(),
                       [](const Canonical& a, const Canonical& b) { return a.key < b.key; });
      const bool is_and = l.kind() == LineageKind::And;
      std::string key = is_and ? "&(" : "|(";
      Lineage built = operands.front().lineage;
      key += operands.front().key;
      for (std::size_t i = 1; i < operands.size(); ++i) {
        built = is_and ? Lineage::conjunction(built, operands[i].lineage)
                       : Lineage::disjunction(built, operands[i].lineage);
        key += ',';
        key += operands[i].key;
      }
      key += ')';
      return {std::move(built), std::move(key)};
    }
  }
  throw std::logic_error("unreachable lineage kind");
}

}  // namespace

Lineage canonicalize(const Lineage& l) { return canonical(l).lineage; }

std::string canonical_key(const Lineage& l) { return canonical(l).key; }

bool syntactic_equiv(const std::optional<Lineage>& l1, const std::optional<Lineage>& l2) {
  if (!l1 || !l2) return !l1 && !l2;
  if (l1->same_node(*l2)) return true;
  return canonical_key(*l1) == canonical_key(*l2);
}

// --- probability -------------------------------------------------------------

double embedded_probability(const Lineage& atom) {
  if (auto p = atom.atom_probability()) return *p;
  throw ProbabilityError("no probability known for atom '" + atom.atom_id() + "'");
}

AtomProbability lookup_in(const ProbAssignment& pa) {
  return [&pa](const Lineage& atom) {
    auto it = pa.find(atom.atom_id());
    if (it == pa.end()) {
      throw ProbabilityError("no probability assigned to atom '" + atom.atom_id() + "'");
    }
    return it->second;
  };
}

namespace {

double read_once(const Lineage& l, const AtomProbability& prob) {
  switch (l.kind()) {
    case LineageKind::Atom:
      return prob(l);
    case LineageKind::Not:
      return 1.0 - read_once(l.operand(), prob);
    case LineageKind::And:
      return read_once(l.lhs(), prob) * read_once(l.rhs(), prob);
    case LineageKind::Or:
      return 1.0 - (1.0 - read_once(l.lhs(), prob)) * (1.0 - read_once(l.rhs(), prob));
  }
  throw std::logic_error("unreachable lineage kind");
}

// Flattened formula used by Shannon expansion. Variables are indices into a
// probability table; conditioning folds constants and drops dead subtrees.
struct Flat {
  enum class Op : std::uint8_t { False, True, Var, Not, And, Or };
  struct Node {
    Op op;
    std::uint32_t a = 0;  // Var: variable index; otherwise first child
    std::uint32_t b = 0;
  };
  std::vector<Node> nodes;
  std::uint32_t root = 0;

  std::uint32_t push(Node n) {
    nodes.push_back(n);
    return static_cast<std::uint32_t>(nodes.size() - 1);
  }
  bool constant() const { return nodes[root].op == Op::False || nodes[root].op == Op::True; }
};

struct Compiler {
  const AtomProbability& prob;
  std::unordered_map<std::string_view, std::uint32_t> index;
  std::vector<double> probs;
  Flat flat;

  std::uint32_t compile(const Lineage& l) {
    switch (l.kind()) {
      case LineageKind::Atom: {
        auto [it, inserted] =
            index.try_emplace(l.atom_id(), static_cast<std::uint32_t>(probs.size()));
        if (inserted) probs.push_back(prob(l));
        return flat.push({Flat::Op::Var, it->second, 0});
      }
      case LineageKind::Not: {
        std::uint32_t c = compile(l.operand());
        return flat.push({Flat::Op::Not, c, 0});
      }
      case LineageKind::And:
      case LineageKind::Or: {
        std::uint32_t a = compile(l.lhs());
        std::uint32_t b = compile(l.rhs());
        return flat.push({l.kind() == LineageKind::And ? Flat::Op::And : Flat::Op::Or, a, b});
      }
    }
    throw std::logic_error("unreachable lineage kind");
  }
};

std::uint32_t rebuild(const Flat& in, std::uint32_t at, std::uint32_t var, bool value,
                      Flat& out) {
  using Op = Flat::Op;
  const Flat::Node& n = in.nodes[at];
  switch (n.op) {
    case Op::False:
    case Op::True:
      return out.push(n);
    case Op::Var:
      if (n.a == var) return out.push({value ? Op::True : Op::False});
      return out.push(n);
    case Op::Not: {
      std::uint32_t c = rebuild(in, n.a, var, value, out);
      Op cop = out.nodes[c].op;
      if (cop == Op::True) return out.push({Op::False});
      if (cop == Op::False) return out.push({Op::True});
      return out.push({Op::Not, c, 0});
    }
    case Op::And:
    case Op::Or: {
      const Op absorbing = n.op == Op::And ? Op::False : Op::True;
      const Op neutral = n.op == Op::And ? Op::True : Op::False;
      std::uint32_t a = rebuild(in, n.a, var, value, out);
      if (out.nodes[a].op == absorbing) return a;
      std::uint32_t b = rebuild(in, n.b, var, value, out);
      if (out.nodes[b].op == absorbing) return b;
      if (out.nodes[a].op == neutral) return b;
      if (out.nodes[b].op == neutral) return a;
      return out.push({n.op, a, b});
    }
  }
  throw std::logic_error("unreachable flat op");
}

Flat condition(const Flat& f, std::uint32_t var, bool value) {
  Flat out;
  out.nodes.reserve(f.nodes.size());
  out.root = rebuild(f, f.root, var, value, out);
  return out;
}

double flat_read_once(const Flat& f, std::uint32_t at, const std::vector<double>& probs) {
  using Op = Flat::Op;
  const Flat::Node& n = f.nodes[at];
  switch (n.op) {
    case Op::False:
      return 0.0;
    case Op::True:
      return 1.0;
    case Op::Var:
      return probs[n.a];
    case Op::Not:
      return 1.0 - flat_read_once(f, n.a, probs);
    case Op::And:
      return flat_read_once(f, n.a, probs) * flat_read_once(f, n.b, probs);
    case Op::Or:
      return 1.0 - (1.0 - flat_read_once(f, n.a, probs)) * (1.0 - flat_read_once(f, n.b, probs));
  }
  throw std::logic_error("unreachable flat op");
}

// Occurrence counts of reachable variables. Conditioning rebuilds from the root,
// so every node in the vector is reachable except dropped constants, which
// never carry a variable.
std::vector<std::uint32_t> occurrences(const Flat& f, std::size_t nvars) {
  std::vector<std::uint32_t> counts(nvars, 0);
  std::vector<std::uint32_t> stack{f.root};
  while (!stack.empty()) {
    const Flat::Node& n = f.nodes[stack.back()];
    stack.pop_back();
    switch (n.op) {
      case Flat::Op::Var:
        ++counts[n.a];
        break;
      case Flat::Op::Not:
        stack.push_back(n.a);
        break;
      case Flat::Op::And:
      case Flat::Op::Or:
        stack.push_back(n.a);
        stack.push_back(n.b);
        break;
      default:
        break;
    }
  }
  return counts;
}

double expand(const Flat& f, const std::vector<double>& probs, ExpansionScope scope) {
  if (f.constant()) return f.nodes[f.root].op == Flat::Op::True ? 1.0 : 0.0;
  const auto counts = occurrences(f, probs.size());
  const std::uint32_t threshold = scope == ExpansionScope::RepeatedAtoms ? 2 : 1;
  std::uint32_t pick = 0;
  std::uint32_t best = 0;
  for (std::uint32_t v = 0; v < counts.size(); ++v) {
    if (counts[v] >= threshold && counts[v] > best) {
      best = counts[v];
      pick = v;
    }
  }
  if (best == 0) return flat_read_once(f, f.root, probs);
  const double p = probs[pick];
  return p * expand(condition(f, pick, true), probs, scope) +
         (1.0 - p) * expand(condition(f, pick, false), probs, scope);
}

}  // namespace

double read_once_probability(const Lineage& l, const AtomProbability& prob) {
  if (!is_one_occurrence_form(l)) {
    throw ProbabilityError("formula is not in one-occurrence form");
  }
  return read_once(l, prob);
}

double shannon_probability(const Lineage& l, const AtomProbability& prob,
                           ExpansionScope scope) {
  Compiler compiler{prob, {}, {}, {}};
  compiler.flat.root = compiler.compile(l);
  const auto counts = occurrences(compiler.flat, compiler.probs.size());
  const std::uint32_t threshold = scope == ExpansionScope::RepeatedAtoms ? 2 : 1;
  const auto selected = static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [&](std::uint32_t c) { return c >= threshold; }));
  if (selected > kShannonBudget) {
    throw ProbabilityError("Shannon expansion needs " + std::to_string(selected) +
                           " variables, budget is " + std::to_string(kShannonBudget));
  }
  return expand(compiler.flat, compiler.probs, scope);
}

Evaluation evaluate(const Lineage& l, const AtomProbability& prob) {
  if (is_one_occurrence_form(l)) return {read_once(l, prob), EvaluationPath::ReadOnce};
  return {shannon_probability(l, prob, ExpansionScope::RepeatedAtoms),
          EvaluationPath::ShannonExpansion};
}

double probability(const Lineage& l, const ProbAssignment& pa) {
  return evaluate(l, lookup_in(pa)).p;
}

double probability(const Lineage& l) { return evaluate(l, embedded_probability).p; }

}  // namespace tpset
