#pragma once

// Curricula over a set of concepts: split the set into ordered branches,
// teach each branch in sequence while the library grows with every concept
// already taught, and search for the split with the smallest overall
// teaching size.  The search starts from the no-reuse curriculum (every
// concept its own branch, taught from scratch) and only moves away from it
// when some ordering is strictly cheaper.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "teachsize/conditional.hpp"
#include "teachsize/interposition.hpp"
#include "teachsize/protocol.hpp"

namespace teachsize {

// A partition of concept indices 0..n-1 into ordered branches.  The branch
// list itself is a set; we keep it sorted by leading concept so that equal
// curricula compare equal.
struct Curriculum {
  std::vector<std::vector<size_t>> branches;

  void canonicalize() {
    std::sort(branches.begin(), branches.end(),
              [](const std::vector<size_t>& a, const std::vector<size_t>& b) {
                return a.front() < b.front();
              });
  }

  void validate(size_t n) const {
    std::vector<char> seen(n, 0);
    size_t covered = 0;
    for (const std::vector<size_t>& b : branches) {
      if (b.empty()) throw Error("curriculum: empty branch");
      for (size_t ix : b) {
        if (ix >= n || seen[ix])
          throw Error("curriculum: branches do not partition the concepts");
        seen[ix] = 1;
        ++covered;
      }
    }
    if (covered != n)
      throw Error("curriculum: branches do not partition the concepts");
  }

  bool single_branches() const {
    for (const std::vector<size_t>& b : branches)
      if (b.size() != 1) return false;
    return true;
  }

  bool operator==(const Curriculum& o) const { return branches == o.branches; }
  bool operator!=(const Curriculum& o) const { return !(*this == o); }

  std::string text(const std::vector<std::string>& labels) const {
    std::string out = "{";
    for (size_t i = 0; i < branches.size(); ++i) {
      if (i) out += " | ";
      for (size_t j = 0; j < branches[i].size(); ++j) {
        if (j) out += ">";
        out += labels[branches[i][j]];
      }
    }
    out += "}";
    return out;
  }
};

// Every concept alone in its own branch: teaching cost is the sum of the
// unconditional teaching sizes.
inline Curriculum no_reuse_curriculum(size_t n) {
  Curriculum pi;
  for (size_t i = 0; i < n; ++i) pi.branches.push_back({i});
  return pi;
}

// Number of curricula over n concepts: choose which of the n! orderings
// survive as branch sequences.  Splitting a permutation of all n concepts
// into k+1 branches and forgetting the branch order gives
// sum_k C(n-1,k) * n!/(k+1)!, with the factorial quotient computed as the
// product (k+2)*(k+3)*...*n to stay in integers.
inline unsigned long long curriculum_count(size_t n) {
  if (n == 0) throw Error("curricula: need at least one concept");
  // The count first exceeds 64 bits at n = 20; refuse early so the wide
  // intermediate below stays exact.
  if (n > 20) throw Error("curricula: count does not fit in 64 bits");
  using u128 = unsigned __int128;
  u128 total = 0;
  for (size_t k = 0; k < n; ++k) {
    u128 term = 1;
    for (size_t i = 0; i < k; ++i) term = term * (n - 1 - i) / (i + 1);
    for (size_t j = k + 2; j <= n; ++j) term *= j;
    total += term;
  }
  if (total > u128(~0ull))
    throw Error("curricula: count does not fit in 64 bits");
  return static_cast<unsigned long long>(total);
}

// All curricula over n concepts, canonicalized, in a fixed generation order:
// set partitions via restricted-growth strings (lexicographic), and within a
// partition every combination of branch orderings (lexicographic per block,
// later blocks varying fastest).  The no-reuse curriculum appears where its
// partition falls in that order.
inline std::vector<Curriculum> enumerate_curricula(size_t n) {
  if (n == 0) throw Error("curricula: need at least one concept");
  std::vector<Curriculum> out;
  std::vector<size_t> rgs(n, 0);

  auto emit_partition = [&]() {
    size_t nblocks = 1 + *std::max_element(rgs.begin(), rgs.end());
    std::vector<std::vector<size_t>> blocks(nblocks);
    for (size_t i = 0; i < n; ++i) blocks[rgs[i]].push_back(i);
    // Cartesian product of permutations, one per block.
    std::vector<std::vector<size_t>> perm = blocks;
    std::function<void(size_t)> step = [&](size_t bi) {
      if (bi == nblocks) {
        Curriculum pi{perm};
        pi.canonicalize();
        out.push_back(std::move(pi));
        return;
      }
      std::vector<size_t>& blk = perm[bi];
      std::sort(blk.begin(), blk.end());
      do {
        step(bi + 1);
      } while (std::next_permutation(blk.begin(), blk.end()));
    };
    step(0);
  };

  std::function<void(size_t, size_t)> walk = [&](size_t i, size_t next) {
    if (i == n) {
      emit_partition();
      return;
    }
    for (size_t b = 0; b <= next; ++b) {
      rgs[i] = b;
      walk(i + 1, std::max(next, b + 1));
    }
  };
  walk(0, 0);
  return out;
}

// One taught concept: which program the book knows for it, which branch it
// sat in, and what the teacher spent once the branch's earlier concepts were
// already in the library.
struct CurriculumStep {
  Program concept_program;
  size_t branch = 0;
  size_t ts_bits = 0;
  ExampleSet witness;
};

struct CurriculumResult {
  Curriculum curriculum;
  size_t total_ts_bits = 0;
  std::vector<CurriculumStep> per_step;
};

namespace detail {

inline std::vector<const TeachingBookEntry*> resolve_concepts(
    const std::vector<Program>& q, const TeachingBook& book) {
  if (q.empty()) throw Error("curriculum: need at least one concept");
  Evaluator ev(Library{}, book.f, book.trie_bound, book.caps);
  std::vector<const TeachingBookEntry*> entries;
  entries.reserve(q.size());
  for (const Program& c : q) {
    const TeachingBookEntry* e = find_equivalent(book, ev, c);
    if (!e)
      throw Error("curriculum: no book entry behaves like '" + c.text() + "'");
    entries.push_back(e);
  }
  return entries;
}

}  // namespace detail

// Total teaching size of one curriculum: branches are independent, and
// within a branch each concept is taught by the conditional teacher against
// the library of the branch's earlier concepts.
inline CurriculumResult curriculum_ts(const Curriculum& pi,
                                      const std::vector<Program>& q,
                                      const TeachingBook& book) {
  pi.validate(q.size());
  std::vector<const TeachingBookEntry*> entries =
      detail::resolve_concepts(q, book);
  Curriculum canon = pi;
  canon.canonicalize();

  CurriculumResult res{canon, 0, {}};
  for (size_t bi = 0; bi < canon.branches.size(); ++bi) {
    Library lib;
    for (size_t ci : canon.branches[bi]) {
      const TeachingBookEntry& e = *entries[ci];
      Evaluator ev(lib, book.f, book.trie_bound, book.caps);
      std::optional<ExampleSet> w = ev.teacher(e.program);
      if (!w)
        throw Error("curriculum: teaching '" + e.program.text() + "' given " +
                    lib.text() + " exceeded the witness cap after " +
                    std::to_string(res.per_step.size()) + " taught steps");
      res.per_step.push_back({e.program, bi, w->delta(), *w});
      res.total_ts_bits += w->delta();
      lib.add(detail::strip_calls(e.program), e.program.text());
    }
  }
  return res;
}

// Decision core of the pairwise prune, on precomputed values so the rule can
// be exercised on constructed instances as well as on real books.  plain[i]
// is TS(i); cond[i][j] is TS(i | j), absent when the conditional teacher ran
// out of caps.  The returned pairs (y, x) must not start a branch as y
// followed by x: x's help to y costs nothing while y's help to x gains
// nothing, with at least one of the two comparisons strict so that a fully
// symmetric pair is left alone.
inline std::set<std::pair<size_t, size_t>> forbidden_branch_starts(
    const std::vector<size_t>& plain,
    const std::vector<std::vector<std::optional<size_t>>>& cond) {
  std::set<std::pair<size_t, size_t>> out;
  size_t n = plain.size();
  for (size_t x = 0; x < n; ++x) {
    for (size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      const std::optional<size_t>& yx = cond[y][x];
      const std::optional<size_t>& xy = cond[x][y];
      if (!yx || !xy) continue;
      bool helps = *yx <= plain[y] && *xy >= plain[x];
      bool strict = *yx < plain[y] || *xy > plain[x];
      if (helps && strict) out.insert({y, x});
    }
  }
  return out;
}

// Ordered concept pairs still allowed to open a branch.  Pairs whose
// conditional teaching size could not be established within the caps are
// kept admissible.
inline std::set<std::pair<size_t, size_t>> pairwise_prune(
    const std::vector<Program>& q, const TeachingBook& book) {
  std::vector<const TeachingBookEntry*> entries =
      detail::resolve_concepts(q, book);
  size_t n = q.size();
  std::vector<size_t> plain(n);
  for (size_t i = 0; i < n; ++i) plain[i] = entries[i]->ts_bits;
  std::vector<std::vector<std::optional<size_t>>> cond(
      n, std::vector<std::optional<size_t>>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      cond[i][j] = cond_teaching_size(entries[i]->program,
                                      {entries[j]->program}, book);
    }
  std::set<std::pair<size_t, size_t>> forbidden =
      forbidden_branch_starts(plain, cond);
  std::set<std::pair<size_t, size_t>> admissible;
  for (size_t a = 0; a < n; ++a)
    for (size_t b = 0; b < n; ++b)
      if (a != b && !forbidden.count({a, b})) admissible.insert({a, b});
  return admissible;
}

// The search below assumes that for every candidate concept, any witness
// whose examples reflect the concept's true behaviour is also met within the
// time budget; otherwise a cheaper-looking witness could be rejected for
// time and the reported minimum would be wrong.  Verify this up front for
// all witnesses up to delta_cap encoded bits: find a program whose true
// behaviour matches a witness yet overruns the budget, and report it.
inline void verify_time_assumption(const std::vector<Program>& q,
                                   const TeachingBook& book,
                                   size_t delta_cap) {
  Evaluator ev(Library{}, book.f, book.trie_bound, book.caps);
  size_t n_inputs = (size_t(2) << book.caps.input_len_cap) - 1;
  struct Obs {
    bool halted;
    uint64_t steps;
    BitString out;
  };
  std::vector<std::vector<Obs>> obs(q.size());
  for (size_t ci = 0; ci < q.size(); ++ci) {
    obs[ci].reserve(n_inputs);
    for (size_t ix = 0; ix < n_inputs; ++ix) {
      BitString in = BitString::from_index(ix);
      ExecOutcome r = ev.outcome(
          q[ci], in, detail::generous_budget(in, book.f, book.trie_bound,
                                             book.caps));
      obs[ci].push_back({r.halted, r.steps_used, r.output});
    }
  }
  for_each_example_set(
      delta_cap, book.caps.input_len_cap, [&](const ExampleSet& s) {
        for (size_t ci = 0; ci < q.size(); ++ci) {
          bool truthful = true;
          bool overrun = false;
          for (const Example& e : s.examples()) {
            size_t ix = e.in.index();
            if (ix >= n_inputs) {
              truthful = false;
              break;
            }
            const Obs& o = obs[ci][ix];
            if (e.out) {
              if (!o.halted || o.out != *e.out) {
                truthful = false;
                break;
              }
              if (o.steps > ev.budget_for(e.in, s)) overrun = true;
            } else if (o.halted) {
              truthful = false;
              break;
            }
          }
          if (truthful && overrun)
            throw Error("curriculum search: '" + q[ci].text() +
                        "' outruns its time budget on the truthful witness " +
                        format_witness(s));
        }
        return true;
      });
}

namespace detail {

// Teach one candidate curriculum, abandoning it as soon as its running total
// plus the cheapest witness still open can no longer beat `bound`.  Each
// step replays the conditional teacher exactly: scan witnesses in canonical
// order and accept the first whose learner behaves like the concept.
inline std::optional<CurriculumResult> teach_curriculum_bounded(
    const Curriculum& pi, const std::vector<const TeachingBookEntry*>& entries,
    const TeachingBook& book, size_t d_cap, size_t bound) {
  CurriculumResult res{pi, 0, {}};
  for (size_t bi = 0; bi < pi.branches.size(); ++bi) {
    Library lib;
    for (size_t ci : pi.branches[bi]) {
      const TeachingBookEntry& e = *entries[ci];
      Evaluator ev(lib, book.f, book.trie_bound, book.caps);
      bool accepted = false;
      for (size_t d = 1; d <= d_cap && !accepted; ++d) {
        if (bound <= res.total_ts_bits + d) return std::nullopt;
        for (const ExampleSet& s : ev.witness_pool(d)) {
          std::optional<Program> p = ev.learner(s);
          if (p && ev.concept_equiv(*p, e.program)) {
            res.per_step.push_back({e.program, bi, s.delta(), s});
            res.total_ts_bits += s.delta();
            accepted = true;
            break;
          }
        }
      }
      if (!accepted)
        throw Error("curriculum search: teaching '" + e.program.text() +
                    "' given " + lib.text() +
                    " exceeded the witness cap after " +
                    std::to_string(res.per_step.size()) + " taught steps");
      lib.add(strip_calls(e.program), e.program.text());
    }
  }
  return res;
}

}  // namespace detail

// Minimal-total-teaching-size curriculum.  Starts from the no-reuse
// curriculum, prunes branch starts that provably cannot help, and walks the
// remaining candidates in enumeration order, keeping a strictly better total
// only.  `horizon` caps the witness size considered per step; left at zero
// it becomes the sum of unconditional teaching sizes plus slack, which the
// bounding rule makes semantically inert: any candidate forced past that
// size is already costlier than teaching everything from scratch.  The
// time-assumption check always covers witnesses up to the unconditional
// sum.  With threads > 1 candidates are evaluated in blocks against a
// snapshot of the incumbent; the merge is serial and in enumeration order,
// so the result is identical to the single-threaded search.
inline CurriculumResult i_search(const std::vector<Program>& q,
                                 const TeachingBook& book, size_t horizon = 0,
                                 unsigned threads = 1) {
  std::vector<const TeachingBookEntry*> entries =
      detail::resolve_concepts(q, book);
  size_t n = q.size();
  size_t sum_ts = 0;
  for (const TeachingBookEntry* e : entries) sum_ts += e->ts_bits;
  if (horizon == 0) horizon = sum_ts + 8;
  size_t d_cap = std::min(book.caps.max_witness_bits, horizon - 1);
  verify_time_assumption(q, book, sum_ts);

  std::set<std::pair<size_t, size_t>> admissible = pairwise_prune(q, book);
  std::vector<Curriculum> candidates;
  for (Curriculum& pi : enumerate_curricula(n)) {
    if (pi.single_branches()) continue;
    bool ok = true;
    for (const std::vector<size_t>& b : pi.branches)
      if (b.size() >= 2 && !admissible.count({b[0], b[1]})) {
        ok = false;
        break;
      }
    if (ok) candidates.push_back(std::move(pi));
  }

  CurriculumResult best = *detail::teach_curriculum_bounded(
      no_reuse_curriculum(n), entries, book, d_cap, size_t(-1));

  if (threads <= 1) {
    for (const Curriculum& pi : candidates) {
      std::optional<CurriculumResult> r = detail::teach_curriculum_bounded(
          pi, entries, book, d_cap, best.total_ts_bits);
      if (r && r->total_ts_bits < best.total_ts_bits) best = std::move(*r);
    }
    return best;
  }

  // A completed candidate can only lose to the serial search's tighter
  // running bound, never win against it, so block snapshots of the incumbent
  // keep the merged result exactly equal to the serial one.
  size_t block = size_t(threads) * 4;
  for (size_t base = 0; base < candidates.size(); base += block) {
    size_t hi = std::min(candidates.size(), base + block);
    std::vector<std::optional<CurriculumResult>> got(hi - base);
    size_t snapshot = best.total_ts_bits;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t]() {
        for (size_t i = base + t; i < hi; i += threads)
          got[i - base] = detail::teach_curriculum_bounded(
              candidates[i], entries, book, d_cap, snapshot);
      });
    }
    for (std::thread& th : pool) th.join();
    for (std::optional<CurriculumResult>& r : got)
      if (r && r->total_ts_bits < best.total_ts_bits) best = std::move(*r);
  }
  return best;
}

// Exhaustive reference: teach every curriculum and keep the first minimum in
// enumeration order.  The search seeds with the no-reuse curriculum instead,
// so on ties the two can return different curricula with the same total.
inline CurriculumResult brute_force_optimum(const std::vector<Program>& q,
                                            const TeachingBook& book) {
  size_t n = q.size();
  if (curriculum_count(n) > 501)
    throw Error("curriculum brute force: too many curricula over " +
                std::to_string(n) + " concepts");
  std::optional<CurriculumResult> best;
  for (const Curriculum& pi : enumerate_curricula(n)) {
    CurriculumResult r = curriculum_ts(pi, q, book);
    if (!best || r.total_ts_bits < best->total_ts_bits) best = std::move(r);
  }
  return *best;
}

// One-branch heuristic: repeatedly append the concept whose teaching size
// shrinks the most against the current library, breaking ties by book order.
inline CurriculumResult greedy_curriculum(const std::vector<Program>& q,
                                          const TeachingBook& book) {
  std::vector<const TeachingBookEntry*> entries =
      detail::resolve_concepts(q, book);
  size_t n = q.size();

  auto book_pos = [&](size_t ci) {
    for (size_t i = 0; i < book.entries.size(); ++i)
      if (&book.entries[i] == entries[ci]) return i;
    return book.entries.size();
  };
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return book_pos(a) < book_pos(b); });

  CurriculumResult res;
  res.curriculum.branches.push_back({});
  Library lib;
  std::vector<char> taken(n, 0);
  for (size_t round = 0; round < n; ++round) {
    Evaluator ev(lib, book.f, book.trie_bound, book.caps);
    long best_gain = -1;
    size_t pick = n;
    std::optional<ExampleSet> pick_w;
    for (size_t ci : order) {
      if (taken[ci]) continue;
      std::optional<ExampleSet> w = ev.teacher(entries[ci]->program);
      if (!w)
        throw Error("greedy curriculum: teaching '" +
                    entries[ci]->program.text() + "' given " + lib.text() +
                    " exceeded the witness cap");
      long gain = long(entries[ci]->ts_bits) - long(w->delta());
      if (gain > best_gain) {
        best_gain = gain;
        pick = ci;
        pick_w = w;
      }
    }
    taken[pick] = 1;
    res.curriculum.branches[0].push_back(pick);
    res.per_step.push_back(
        {entries[pick]->program, 0, pick_w->delta(), *pick_w});
    res.total_ts_bits += pick_w->delta();
    lib.add(detail::strip_calls(entries[pick]->program),
            entries[pick]->program.text());
  }
  return res;
}

}  // namespace teachsize
