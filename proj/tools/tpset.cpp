// tpset: command-line front end for temporal-probabilistic set operations.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "CLI11.hpp"
#include "tpset/core.hpp"
#include "tpset/datagen.hpp"
#include "tpset/io.hpp"
#include "tpset/lawa.hpp"
#include "tpset/lineage.hpp"
#include "tpset/query.hpp"
#include "tpset/setops.hpp"

using namespace tpset;

namespace {

class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool stdin_taken = false;

TpRelation load(const std::string& path) {
  if (path == "-") {
    if (stdin_taken) throw IoError("standard input can only be read once");
    stdin_taken = true;
    return read_relation(std::cin, "<stdin>").relation;
  }
  return read_relation_file(path).relation;
}

// Writes via `emit` to --out, or to stdout when no path is given.
template <typename Emit>
void with_output(const std::string& out_path, Emit emit) {
  if (out_path.empty() || out_path == "-") {
    emit(std::cout);
    std::cout.flush();
    if (!std::cout) throw IoError("failed writing to standard output");
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + out_path + "' for writing");
  emit(out);
  out.flush();
  if (!out) throw IoError("failed writing '" + out_path + "'");
}

SetOpKind parse_kind(const std::string& s) {
  if (s == "intersect") return SetOpKind::Intersection;
  if (s == "union") return SetOpKind::Union;
  if (s == "except") return SetOpKind::Difference;
  throw std::invalid_argument("unknown operation '" + s + "'");
}

void require_same_arity(const TpRelation& r, const TpRelation& s) {
  if (r.arity() != s.arity()) {
    throw ValidationError("operands have incompatible fact arity " + std::to_string(r.arity()) +
                          " and " + std::to_string(s.arity()));
  }
}

struct BenchOptions {
  std::vector<std::size_t> sizes{20000, 50000, 100000, 200000};
  std::string op = "intersect";
  int repeats = 5;
  std::size_t facts = 1;
  TimePoint max_len = 3;
  TimePoint max_len_s = 0;  // 0: same as max_len
  TimePoint max_gap = 1;
  std::uint64_t seed = 1;
  bool no_prob = false;
};

void run_bench(const BenchOptions& o, std::ostream& out) {
  if (o.repeats < 1) throw std::invalid_argument("--repeats must be at least 1");
  const SetOpKind kind = parse_kind(o.op);
#if defined(__GLIBC__)
  // Keep freed memory in the heap so repeated runs reuse warm pages.
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
  out << "size\top\tmedian_ms\n";
  for (const std::size_t n : o.sizes) {
    GenParams pr;
    pr.num_tuples = n;
    pr.num_facts = o.facts;
    pr.max_interval_len = o.max_len;
    pr.max_gap = o.max_gap;
    pr.seed = o.seed;
    pr.atom_prefix = "r";
    GenParams ps = pr;
    ps.max_interval_len = o.max_len_s > 0 ? o.max_len_s : o.max_len;
    ps.seed = o.seed + 1;
    ps.atom_prefix = "s";
    const TpRelation r = generate(pr);
    const TpRelation s = generate(ps);

    std::vector<double> ms;
    for (int i = 0; i <= o.repeats; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      const TpRelation result = apply_setop(kind, r, s, {.annotate_probability = !o.no_prob});
      const auto t1 = std::chrono::steady_clock::now();
      if (i > 0) ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::sort(ms.begin(), ms.end());
    const double median = ms.size() % 2 == 1 ? ms[ms.size() / 2]
                                             : (ms[ms.size() / 2 - 1] + ms[ms.size() / 2]) / 2;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", median);
    out << n << '\t' << o.op << '\t' << buf << '\n';
    out.flush();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal-probabilistic set operations over TSV relations"};
  app.require_subcommand(1);

  std::string out_path;
  bool no_prob = false;

  // op
  std::string op_kind, op_left, op_right;
  auto* op = app.add_subcommand("op", "Apply one set operation: L <op> R");
  op->add_option("kind", op_kind, "intersect, union or except")
      ->required()
      ->check(CLI::IsMember({"intersect", "union", "except"}));
  op->add_option("left", op_left, "left relation ('-' for stdin)")->required();
  op->add_option("right", op_right, "right relation ('-' for stdin)")->required();
  op->add_option("--out", out_path, "output file (default stdout)");
  op->add_flag("--no-prob", no_prob, "compute lineage only");

  // query
  std::string query_text;
  auto* query = app.add_subcommand("query", "Evaluate an expression such as 'c.tsv - (a.tsv + b.tsv)'");
  query->add_option("expr", query_text, "+ union, - difference, * intersection")->required();
  query->add_option("--out", out_path, "output file (default stdout)");
  query->add_flag("--no-prob", no_prob, "compute lineage only");

  // windows
  std::string win_left, win_right;
  auto* wins = app.add_subcommand("windows", "List the lineage-aware windows of two relations");
  wins->add_option("left", win_left)->required();
  wins->add_option("right", win_right)->required();
  wins->add_option("--out", out_path, "output file (default stdout)");

  // gen
  GenParams gen_params;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic base relation");
  gen->add_option("--tuples", gen_params.num_tuples, "number of tuples")->capture_default_str();
  gen->add_option("--facts", gen_params.num_facts, "number of distinct facts")->capture_default_str();
  gen->add_option("--max-len", gen_params.max_interval_len, "maximum interval length")
      ->capture_default_str();
  gen->add_option("--max-gap", gen_params.max_gap, "maximum gap between intervals")
      ->capture_default_str();
  gen->add_option("--prob-low", gen_params.prob_low)->capture_default_str();
  gen->add_option("--prob-high", gen_params.prob_high)->capture_default_str();
  gen->add_option("--seed", gen_params.seed)->capture_default_str();
  gen->add_option("--prefix", gen_params.atom_prefix, "atom id prefix")->capture_default_str();
  gen->add_option("--out", out_path, "output file (default stdout)");

  // validate
  std::string validate_path;
  auto* val = app.add_subcommand("validate", "Check that a relation file parses and is duplicate-free");
  val->add_option("file", validate_path)->required();

  // overlap
  std::string ov_left, ov_right;
  auto* overlap = app.add_subcommand("overlap", "Print the overlapping factor of two relations");
  overlap->add_option("left", ov_left)->required();
  overlap->add_option("right", ov_right)->required();

  // bench
  BenchOptions bench_opts;
  auto* bench = app.add_subcommand("bench", "Time a set operation on generated relations");
  bench->add_option("--sizes", bench_opts.sizes, "tuples per side")->delimiter(',');
  bench->add_option("--op", bench_opts.op)
      ->check(CLI::IsMember({"intersect", "union", "except"}))
      ->capture_default_str();
  bench->add_option("--repeats", bench_opts.repeats)->capture_default_str();
  bench->add_option("--facts", bench_opts.facts)->capture_default_str();
  bench->add_option("--max-len", bench_opts.max_len)->capture_default_str();
  bench->add_option("--max-len-s", bench_opts.max_len_s, "maximum interval length of s (default --max-len)");
  bench->add_option("--max-gap", bench_opts.max_gap)->capture_default_str();
  bench->add_option("--seed", bench_opts.seed)->capture_default_str();
  bench->add_flag("--no-prob", bench_opts.no_prob);
  bench->add_option("--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const SetOpOptions opts{.annotate_probability = !no_prob};
    if (*op) {
      const TpRelation r = load(op_left);
      const TpRelation s = load(op_right);
      const TpRelation result = apply_setop(parse_kind(op_kind), r, s, opts);
      with_output(out_path, [&](std::ostream& o) { write_relation(o, result); });
    } else if (*query) {
      const QueryExpr q = parse_query(query_text);
      const TpRelation result = evaluate_query(q, load, opts);
      with_output(out_path, [&](std::ostream& o) { write_relation(o, result); });
    } else if (*wins) {
      const TpRelation r = load(win_left);
      const TpRelation s = load(win_right);
      require_same_arity(r, s);
      const auto ws = windows(r, s);
      with_output(out_path, [&](std::ostream& o) { write_windows(o, ws, r.arity()); });
    } else if (*gen) {
      const TpRelation rel = generate(gen_params);
      with_output(out_path, [&](std::ostream& o) { write_relation(o, rel); });
    } else if (*val) {
      const TpRelation rel = load(validate_path);
      std::cout << "ok\t" << rel.size() << " tuples\n";
    } else if (*overlap) {
      const TpRelation r = load(ov_left);
      const TpRelation s = load(ov_right);
      require_same_arity(r, s);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6f", overlapping_factor(r, s));
      std::cout << buf << '\n';
    } else if (*bench) {
      with_output(out_path, [&](std::ostream& o) { run_bench(bench_opts, o); });
    }
  } catch (const ParseError& e) {
    std::cerr << "tpset: " << e.what() << '\n';
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "tpset: " << e.what() << '\n';
    return 1;
  } catch (const ProbabilityError& e) {
    std::cerr << "tpset: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    std::cerr << "tpset: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "tpset: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "tpset: internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
