#pragma once

// Interposition: programs that come before a target in the program order
// while still matching its witness. The teacher cares because the learner
// stops at the first match, so any interposer hijacks the lesson. This
// header enumerates interposition sets exactly, computes the size/call
// ranges and cardinality bounds used to prune that enumeration, augments
// witnesses until no interposer survives, and builds the library that
// deliberately raises a concept's teaching size.
//
// The range formulas only hold under side conditions (every primitive
// fails the witness; the base learner's program does not precede the
// target). They are validated by execution before any pruning happens;
// membership is always confirmed by running the candidate.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "teachsize/conditional.hpp"
#include "teachsize/trie.hpp"

namespace teachsize {

struct SCRanges {
  bool empty = true;
  size_t i_min = 0, i_max = 0;  // instruction counts of the unfolded program
  std::vector<std::pair<long, long>> j_bounds;  // call-count range per i
  unsigned long long bound = 0;  // cardinality bound from the counting sum

  bool contains(size_t i, size_t j) const {
    if (empty || i < i_min || i > i_max) return false;
    const auto& [lo, hi] = j_bounds[i - i_min];
    return long(j) >= lo && long(j) <= hi;
  }
};

namespace detail {

inline long floor_div(long num, long den) {
  long q = num / den, r = num % den;
  return (r != 0 && ((r < 0) != (den < 0))) ? q - 1 : q;
}

inline long ceil_div(long num, long den) { return -floor_div(-num, den); }

inline unsigned __int128 pow_i128(unsigned __int128 base, size_t exp) {
  unsigned __int128 out = 1;
  while (exp--) out *= base;
  return out;
}

inline unsigned __int128 binom_i128(size_t n, size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 out = 1;
  for (size_t t = 1; t <= k; ++t) out = out * (n - k + t) / t;
  return out;
}

inline unsigned long long clamp_u64(unsigned __int128 v) {
  unsigned __int128 cap = ~0ULL;
  return v > cap ? ~0ULL : (unsigned long long)(v);
}

}  // namespace detail

// Single-primitive ranges: n_a = primitive size, n_b = base program size,
// n_bp = target size, all in instructions.
inline SCRanges sc_ranges_single(size_t n_a, size_t n_b, size_t n_bp) {
  if (n_a <= 1)
    throw Error("ranges: the single-primitive case needs a primitive of more "
                "than one instruction");
  SCRanges r;
  size_t lo = n_a < n_b ? n_b : n_a + 1;
  size_t hi = 1 + (n_bp - 1) * n_a;
  if (lo > hi) return r;  // marked empty
  r.empty = false;
  r.i_min = lo;
  r.i_max = hi;
  unsigned __int128 total = 0;
  for (size_t i = lo; i <= hi; ++i) {
    long jmin = std::max<long>(
        0, detail::ceil_div(long(i) - long(n_bp), long(n_a) - 1));
    long jmax = long(i / n_a);
    r.j_bounds.emplace_back(jmin, jmax);
    for (long j = jmin; j <= jmax; ++j) {
      size_t plain = i - n_a * size_t(j);
      total += detail::binom_i128(plain + size_t(j), size_t(j)) *
               detail::pow_i128(7, plain);
    }
  }
  r.bound = detail::clamp_u64(total);
  return r;
}

// Multi-primitive ranges, arithmetic in bits so the fractional cost of a
// call is exact.
inline SCRanges sc_ranges_multi(const Library& b, const Program& p_c,
                                const Program& p_cp) {
  if (b.size() <= 1)
    throw Error("ranges: the multi-primitive case needs at least two "
                "primitives");
  size_t ell_at = b.ctx().call_bits();
  size_t n_min = SIZE_MAX, n_max = 0;
  for (const Program& prim : b.prims) {
    n_min = std::min(n_min, prim.ninst());
    n_max = std::max(n_max, prim.ninst());
  }
  size_t n_c = p_c.ninst(), n_cp = p_cp.ninst();
  size_t big_d = p_cp.bit_len() / ell_at;
  size_t rem = p_cp.bit_len() % ell_at;

  SCRanges r;
  size_t lo = n_min <= n_c ? n_c : n_min + 1;
  size_t hi = big_d * n_max + rem / 3;
  if (lo > hi) return r;
  r.empty = false;
  r.i_min = lo;
  r.i_max = hi;
  long den = long(ell_at) - 3 * long(n_max);
  for (size_t i = lo; i <= hi; ++i) {
    long jmin = 1;
    if (den != 0)
      jmin = std::max<long>(
          1, detail::floor_div((long(n_cp) - long(i)) * 3, den));
    long jmax = std::min<long>(long(big_d), long(i / n_min));
    r.j_bounds.emplace_back(jmin, jmax);
  }
  unsigned __int128 total = 0;
  for (size_t s = 2; s <= n_cp; ++s)
    for (size_t t = 1; t <= s; ++t)
      total += detail::pow_i128(7, s - t) * detail::pow_i128(b.size(), t - 1);
  r.bound = detail::clamp_u64((unsigned __int128)b.size() * total);
  return r;
}

// Emptiness shortcut: the base program is too big for anything citing the
// primitive to slip in front of the target.
inline bool is_interposition_impossible(size_t n_a, size_t n_b, size_t n_bp) {
  return n_b > 1 + (n_bp - 1) * n_a;
}

struct InterpositionReport {
  std::vector<Program> members;  // in program order
  SCRanges ranges;
  unsigned long long bound = 0;
  bool ranges_validated = false;  // side conditions held, pruning was active
  double pruned_fraction = 0.0;
};

inline InterpositionReport interposition_set(const ExampleSet& w,
                                             const Program& p,
                                             const Library& b,
                                             const ComplexityFunction& f,
                                             TrieBoundParams tb = {},
                                             Caps caps = {},
                                             bool prune = true) {
  Evaluator ev(b, f, tb, caps);
  if (!(p.ctx() == ev.ctx()))
    throw Error("interposition: target program built for another library");
  if (!ev.compatible(p, w))
    throw Error("interposition: target fails its own witness");

  InterpositionReport rep;

  // Side conditions for the range derivation, checked by execution: the base
  // learner's program must not precede the target (else a call-free
  // interposer could exist), and no primitive may satisfy the witness.
  Evaluator base_ev(Library{}, f, tb, caps, ev.cache());
  auto p_b = base_ev.learner(w);
  bool prims_fail = true;
  for (const Program& prim : b.prims) prims_fail &= !base_ev.compatible(prim, w);
  if (b.size() >= 1 && prims_fail && p_b && p_b->call_count() == 0) {
    Program lifted(p_b->code(), ev.ctx());
    if (!precedes(lifted, p)) {
      if (b.size() == 1) {
        size_t n_a = b.prims[0].ninst();
        if (n_a > 1) {
          rep.ranges = sc_ranges_single(n_a, p_b->ninst(), p.ninst());
          rep.ranges_validated = true;
        }
      } else {
        rep.ranges = sc_ranges_multi(b, *p_b, p);
        rep.ranges_validated = true;
      }
      rep.bound = rep.ranges.bound;
    }
  }

  size_t considered = 0, skipped = 0;
  for_each_program(ev.ctx(), p.bit_len(), [&](const Program& q) {
    if (q == p) return false;  // everything after is not ≺ p
    ++considered;
    if (prune && rep.ranges_validated) {
      size_t unfolded = 0;
      for (const Instr& ins : q.code())
        unfolded += ins.op == Op::kCall ? b.prims[ins.arg].ninst() : 1;
      if (!rep.ranges.contains(unfolded, q.call_count())) {
        ++skipped;
        return true;
      }
    }
    if (ev.compatible(q, w)) rep.members.push_back(q);
    return true;
  });
  rep.pruned_fraction = considered ? double(skipped) / double(considered) : 0.0;
  return rep;
}

namespace detail {

inline uint64_t generous_budget(const BitString& in,
                                const ComplexityFunction& f,
                                const TrieBoundParams& tb, const Caps& caps) {
  uint64_t lam = tb.rho * std::min<uint64_t>(in.size(), caps.input_len_cap) +
                 tb.kappa + 256;
  return std::max(f(in.size()), lam) + 256;
}

// The program's observed behaviour on one input, as an example pair.
inline Example observed_pair(Evaluator& ev, const Program& p,
                             const BitString& in) {
  uint64_t budget =
      generous_budget(in, ev.f(), ev.trie_bound(), ev.caps());
  ExecOutcome r = ev.outcome(p, in, budget);
  if (r.halted) return {in, r.output};
  return {in, std::nullopt};
}

}  // namespace detail

// Augment a witness until nothing precedes the target on it:
// for each surviving interposer, add the cheapest pair of the target's own
// behaviour that the interposer gets wrong.
inline ExampleSet isafe_augment(const ExampleSet& w, const Program& p_prime,
                                const Library& b, const ComplexityFunction& f,
                                TrieBoundParams tb = {}, Caps caps = {}) {
  Evaluator ev(b, f, tb, caps);
  if (!ev.compatible(p_prime, w))
    throw Error("i-safe: target fails its own witness");
  ExampleSet bar = w;

  // Candidate pairs in witness order: the target's behaviour on each input,
  // cheapest singleton encodings first.
  std::vector<std::pair<Example, std::string>> cands;
  uint64_t n_inputs = (uint64_t(2) << caps.input_len_cap) - 1;
  for (uint64_t ix = 0; ix < n_inputs; ++ix) {
    Example e = detail::observed_pair(ev, p_prime, BitString::from_index(ix));
    cands.emplace_back(e, ExampleSet({e}).encode().text());
  }
  std::sort(cands.begin(), cands.end(), [](const auto& x, const auto& y) {
    if (x.second.size() != y.second.size())
      return x.second.size() < y.second.size();
    return x.second < y.second;
  });

  // Appending pairs can enlarge budgets and let new interposers through, so
  // iterate to a fixpoint.
  for (int round = 0;; ++round) {
    if (round == 8) throw Error("i-safe: interposers kept appearing");
    auto rep = interposition_set(bar, p_prime, b, f, tb, caps);
    if (rep.members.empty()) break;
    for (const Program& q : rep.members) {
      if (!ev.compatible(q, bar)) continue;  // already ruled out this round
      bool placed = false;
      for (const auto& [cand, enc] : cands) {
        if (bar.find(cand.in)) continue;
        ExampleSet trial = bar.with_example(cand);
        if (ev.compatible(p_prime, trial) && !ev.compatible(q, trial)) {
          bar = trial;
          placed = true;
          break;
        }
      }
      if (!placed)
        throw Error("i-safe: no input within caps distinguishes '" +
                    q.text() + "' from the target");
    }
  }

  auto learned = ev.learner(bar);
  if (!learned || !ev.concept_equiv(*learned, p_prime))
    throw Error("i-safe: augmented witness no longer teaches the target");
  if (bar.delta() < w.delta())
    throw Error("i-safe: augmentation shrank the witness");
  return bar;
}

// Build the library that makes one concept harder to teach: a single
// primitive covering the concept's behaviour on every cheap input plus one
// deliberately contradicting pair. Every witness as cheap as the book's is
// then hijacked by the 3-bit call.
inline Library interposing_library(const TeachingBookEntry& entry,
                                   const ComplexityFunction& f,
                                   TrieBoundParams tb = {}, Caps caps = {}) {
  if (entry.program.ninst() < 2)
    throw Error("interposing library: target needs at least two instructions");
  Evaluator base_ev(Library{}, f, tb, caps);
  const Program& c = entry.program;

  std::vector<Example> covered;
  uint64_t n_inputs = (uint64_t(2) << caps.input_len_cap) - 1;
  for (uint64_t ix = 0; ix < n_inputs; ++ix) {
    Example e = detail::observed_pair(base_ev, c, BitString::from_index(ix));
    if (ExampleSet({e}).delta() <= entry.ts_bits) covered.push_back(e);
  }

  auto rep_of = [](const BitString& in) {
    std::string r = in.text();
    while (!r.empty() && r.back() == '0') r.pop_back();
    return r;
  };
  std::set<std::string> covered_classes;
  for (const Example& e : covered) covered_classes.insert(rep_of(e.in));

  // Cheapest-first contradicting pair on a fresh input class.
  std::optional<Example> bad;
  for_each_example_set(
      caps.max_witness_bits, caps.input_len_cap, [&](const ExampleSet& s) {
        if (s.size() != 1) return true;
        const Example& e = s.examples()[0];
        if (covered_classes.count(rep_of(e.in))) return true;
        if (base_ev.compatible(c, s)) return true;
        bad = e;
        return false;
      });
  if (!bad)
    throw Error("interposing library: no contradicting pair within caps");

  covered.push_back(*bad);
  Program trie = compile_trie(ExampleSet(covered), tb);
  Library lib;
  lib.add(trie, "interposer");

  // The point of the construction: nothing at or below the book's witness
  // cost teaches the concept against this library.
  Evaluator ev(lib, f, tb, caps);
  bool violated = false;
  for_each_example_set(entry.ts_bits, caps.input_len_cap,
                       [&](const ExampleSet& s) {
                         auto p = ev.learner(s);
                         if (p && ev.concept_equiv(*p, c)) {
                           violated = true;
                           return false;
                         }
                         return true;
                       });
  if (violated)
    throw Error("interposing library: construction failed to raise the "
                "teaching size");
  return lib;
}

struct NonmonoFinding {
  Program a, b;
  size_t k_ab, k_ba;    // shortest-program bits, each given the other
  size_t ts_ab, ts_ba;  // teaching sizes, each given the other
};

// Exploratory scan for pairs where the complexity order and the teaching
// order disagree. May well find nothing; every hit is re-verifiable.
inline std::vector<NonmonoFinding> nonmonotonicity_scan(
    const TeachingBook& book) {
  std::vector<NonmonoFinding> out;
  for (size_t x = 0; x < book.entries.size(); ++x)
    for (size_t y = 0; y < book.entries.size(); ++y) {
      if (x == y) continue;
      const Program& a = book.entries[x].program;
      const Program& b = book.entries[y].program;
      auto k_ab = cond_k_len(a, {b}, book);
      auto k_ba = cond_k_len(b, {a}, book);
      auto t_ab = cond_teaching_size(a, {b}, book);
      auto t_ba = cond_teaching_size(b, {a}, book);
      if (k_ab && k_ba && t_ab && t_ba && *k_ab < *k_ba && *t_ab > *t_ba)
        out.push_back({a, b, *k_ab, *k_ba, *t_ab, *t_ba});
    }
  return out;
}

}  // namespace teachsize
