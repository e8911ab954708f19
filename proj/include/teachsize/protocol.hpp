#pragma once

// The teaching book: walk witness sets in canonical order, hand each to the
// learner, and keep the first witness for every behaviour not seen before.
// The resulting book pairs each reachable concept with its cheapest witness,
// so teaching size and shortest-program length can be read off entries.
//
// Builds may shard the learner calls across worker threads, but insertion
// stays strictly in witness order, so serial and parallel builds produce
// identical books.

#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "teachsize/evaluator.hpp"

namespace teachsize {

struct TeachingBookEntry {
  Program program;     // what the learner inferred from the witness
  ExampleSet witness;  // canonically first set teaching this behaviour
  size_t ts_bits;      // encoded witness length
  size_t k_bits;       // program length in bits
};

struct TeachingBook {
  std::vector<TeachingBookEntry> entries;
  ComplexityFunction f;
  TrieBoundParams trie_bound;
  Caps caps;
};

// Behaviour fingerprint over the probe inputs; two programs compare equal
// under Evaluator::concept_equiv exactly when their signatures match.
inline std::string outcome_signature(Evaluator& ev, const Program& p) {
  uint64_t n_inputs = (uint64_t(2) << ev.caps().h_in) - 1;
  std::string sig;
  for (uint64_t ix = 0; ix < n_inputs; ++ix) {
    BitString in = BitString::from_index(ix);
    uint64_t budget = std::max(ev.f()(in.size()), ev.trie_bound().kappa);
    ExecOutcome r = ev.outcome(p, in, budget);
    if (r.halted) {
      sig += 'h';
      sig += r.output.text();
    } else {
      sig += 'd';
    }
    sig += '|';
  }
  return sig;
}

inline TeachingBook build_book(const ComplexityFunction& f,
                               const TrieBoundParams& tb, const Caps& caps,
                               unsigned threads = 1) {
  TeachingBook book{{}, f, tb, caps};
  Evaluator ev(Library{}, f, tb, caps);

  // Once a program text has been decided (inserted or found redundant) it
  // never needs another scan; signatures catch distinct texts with the same
  // behaviour.
  std::unordered_map<std::string, bool> decided;
  std::unordered_set<std::string> covered;

  auto commit = [&](const ExampleSet& s, const std::optional<Program>& p) {
    if (!p) return;  // no program within caps fits this set
    if (decided.count(p->text())) return;
    std::string sig = outcome_signature(ev, *p);
    if (covered.insert(sig).second)
      book.entries.push_back({*p, s, s.delta(), p->bit_len()});
    decided.emplace(p->text(), true);
  };

  std::vector<std::unique_ptr<Evaluator>> workers;
  if (threads > 1)
    for (unsigned t = 0; t < threads; ++t)
      workers.push_back(std::make_unique<Evaluator>(Library{}, f, tb, caps));

  constexpr size_t kBlock = 256;
  for (size_t d = 1; d <= caps.max_witness_bits; ++d) {
    const auto& pool = ev.witness_pool(d);
    for (size_t start = 0; start < pool.size(); start += kBlock) {
      size_t end = std::min(start + kBlock, pool.size());
      std::vector<std::optional<Program>> got(end - start);
      if (threads <= 1) {
        for (size_t j = start; j < end; ++j) got[j - start] = ev.learner(pool[j]);
      } else {
        std::vector<std::thread> crew;
        for (unsigned t = 0; t < threads; ++t)
          crew.emplace_back([&, t] {
            for (size_t j = start + t; j < end; j += threads)
              got[j - start] = workers[t]->learner(pool[j]);
          });
        for (auto& th : crew) th.join();
      }
      for (size_t j = start; j < end; ++j) commit(pool[j], got[j - start]);
    }
  }
  return book;
}

// First book entry behaving like the reference, if any.
inline const TeachingBookEntry* find_equivalent(const TeachingBook& book,
                                                Evaluator& ev,
                                                const Program& c_ref) {
  std::string want = outcome_signature(ev, c_ref);
  for (const TeachingBookEntry& e : book.entries)
    if (outcome_signature(ev, e.program) == want) return &e;
  return nullptr;
}

}  // namespace teachsize
