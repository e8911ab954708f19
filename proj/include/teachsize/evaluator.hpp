#pragma once

// Budgets and the bounded teacher-learner machinery: f-compatibility, the
// learner (first fitting program), observational concept equivalence, the
// teacher (first teaching witness), and bounded program complexity.
//
// All executions go through a cache keyed on unfolded base code, so a
// (program, input) pair is run once at a generous budget and every later
// budget query is answered exactly from the stored outcome.

#include <cstdint>
#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

#include "teachsize/codec.hpp"
#include "teachsize/interp.hpp"
#include "teachsize/lang.hpp"

namespace teachsize {

// Affine time allowance f(n) = a*n + b over input length.
struct ComplexityFunction {
  uint64_t a = 64;
  uint64_t b = 512;

  uint64_t operator()(uint64_t n) const { return a * n + b; }
};

// Linear run-time envelope for teaching witnesses: rho steps per input bit
// plus a constant floor. Calibrated so compiled tries fit inside it.
struct TrieBoundParams {
  uint64_t rho = 16;
  uint64_t kappa = 32;
};

struct Caps {
  size_t max_witness_bits = 24;  // teacher search ceiling on delta
  size_t max_prog_bits = 15;     // learner search ceiling on program bits
  size_t h_in = 5;               // input length horizon for equivalence
  size_t h = 0;                  // witness-size horizon, 0 = derive from TS
  size_t input_len_cap = 8;      // longest input the teacher may cite
};

// Witness time bound: rho * min(own length, longest input) plus the longest
// halting output, plus the constant floor. Empty sets get the floor only.
inline uint64_t lambda_bound(const BitString& input, const ExampleSet& s,
                             const TrieBoundParams& tb) {
  if (s.empty()) return tb.kappa;
  size_t max_in = 0, max_out = 0;
  for (const Example& e : s.examples()) {
    max_in = std::max(max_in, e.in.size());
    if (e.out) max_out = std::max(max_out, e.out->size());
  }
  return tb.rho * std::min(input.size(), max_in) + max_out + tb.kappa;
}

// Outcome store. Entries remember the budget they were run at; queries above
// it trigger a rerun at a doubled budget, so answers are always exact.
class ExecCache {
 public:
  ExecOutcome run(const Program& base, const BitString& input,
                  uint64_t budget) {
    Entry* e = find(base, input);
    if (e->budget < budget) {
      uint64_t fresh = std::max(budget, e->budget * 2);
      ExecOutcome got = execute(base, input, fresh);
      e->budget = fresh;
      e->halted = got.halted;
      e->steps = got.steps_used;
      e->output = got.output;
    }
    ExecOutcome out;
    if (e->halted && e->steps <= budget) {
      out.halted = true;
      out.steps_used = e->steps;
      out.output = e->output;
    } else {
      out.steps_used = budget;
    }
    return out;
  }

  size_t size() const { return packed_.size() + spilled_.size(); }

 private:
  struct Entry {
    uint64_t budget = 0;  // 0 = never run
    uint64_t steps = 0;
    bool halted = false;
    BitString output;
  };
  struct KeyHash {
    size_t operator()(const std::pair<uint64_t, uint64_t>& k) const {
      uint64_t h = k.first * 0x9e3779b97f4a7c15ull ^ k.second;
      h ^= h >> 29;
      h *= 0xbf58476d1ce4e5b9ull;
      return size_t(h ^ (h >> 32));
    }
  };

  Entry* find(const Program& base, const BitString& input) {
    auto packed = pack_base_code(base.code());
    if (packed && input.size() < 63)
      return &packed_[{*packed, input.index()}];
    return &spilled_[base.text() + "\n" + input.text()];
  }

  std::unordered_map<std::pair<uint64_t, uint64_t>, Entry, KeyHash> packed_;
  std::unordered_map<std::string, Entry> spilled_;
};

// One evaluator per library (the empty library covers the base language).
// Holds the shared outcome cache plus per-context program and witness lists.
class Evaluator {
 public:
  Evaluator(Library lib, ComplexityFunction f, TrieBoundParams tb, Caps caps,
            std::shared_ptr<ExecCache> cache = nullptr)
      : lib_(std::move(lib)), f_(f), tb_(tb), caps_(caps),
        cache_(cache ? std::move(cache) : std::make_shared<ExecCache>()) {}

  static Evaluator base(ComplexityFunction f = {}, TrieBoundParams tb = {},
                        Caps caps = {}) {
    return Evaluator(Library{}, f, tb, caps);
  }

  const Library& lib() const { return lib_; }
  LangContext ctx() const { return lib_.ctx(); }
  const ComplexityFunction& f() const { return f_; }
  const TrieBoundParams& trie_bound() const { return tb_; }
  const Caps& caps() const { return caps_; }
  const std::shared_ptr<ExecCache>& cache() const { return cache_; }

  // Accepts both base programs and programs of this evaluator's library.
  ExecOutcome outcome(const Program& p, const BitString& input,
                      uint64_t budget) {
    if (p.ctx().lib_size == 0) return cache_->run(p, input, budget);
    if (p.ctx() != ctx()) throw Error("evaluator: foreign program context");
    return cache_->run(unfold(p, lib_), input, budget);
  }

  uint64_t budget_for(const BitString& input, const ExampleSet& s) const {
    return std::max(f_(input.size()), lambda_bound(input, s, tb_));
  }

  bool compatible(const Program& p, const ExampleSet& s) {
    for (const Example& e : s.examples()) {
      ExecOutcome r = outcome(p, e.in, budget_for(e.in, s));
      if (e.out) {
        if (!r.halted || r.output != *e.out) return false;
      } else {
        if (r.halted) return false;
      }
    }
    return true;
  }

  // First program in precedence order that fits the witness, up to the
  // program-bits cap; empty result means the cap was exhausted.
  std::optional<Program> learner(const ExampleSet& s) {
    for (const Program& p : programs(caps_.max_prog_bits))
      if (compatible(p, s)) return p;
    return std::nullopt;
  }

  // Observational identity: same halting behaviour and output on every
  // input up to the length horizon, under the input's own f-budget floor.
  bool concept_equiv(const Program& p, const Program& q) {
    uint64_t n_inputs = (uint64_t(2) << caps_.h_in) - 1;
    for (uint64_t ix = 0; ix < n_inputs; ++ix) {
      BitString in = BitString::from_index(ix);
      uint64_t budget = std::max(f_(in.size()), tb_.kappa);
      ExecOutcome a = outcome(p, in, budget);
      ExecOutcome b = outcome(q, in, budget);
      if (a.halted != b.halted) return false;
      if (a.halted && a.output != b.output) return false;
    }
    return true;
  }

  // First witness whose learner result lands in the reference concept.
  std::optional<ExampleSet> teacher(const Program& c_ref) {
    for (size_t d = 1; d <= caps_.max_witness_bits; ++d) {
      for (const ExampleSet& s : witness_pool(d)) {
        std::optional<Program> got = learner(s);
        if (got && concept_equiv(*got, c_ref)) return s;
      }
    }
    return std::nullopt;
  }

  // First program of this language equivalent to the base reference; the
  // lifted reference itself qualifies, so the search always succeeds.
  Program first_equivalent(const Program& c_ref) {
    std::optional<Program> found;
    for_each_program(ctx(), c_ref.bit_len(), [&](const Program& p) {
      if (!concept_equiv(p, c_ref)) return true;
      found = p;
      return false;
    });
    if (!found) throw Error("first_equivalent: reference not reachable");
    return *found;
  }

  // Bounded description length: bits of the first equivalent program within
  // the program cap; empty on exhaustion.
  std::optional<size_t> k_len(const Program& c_ref) {
    for (const Program& p : programs(caps_.max_prog_bits))
      if (concept_equiv(p, c_ref)) return p.bit_len();
    return std::nullopt;
  }

  // Materialized program list in precedence order, shared per bit cap.
  const std::vector<Program>& programs(size_t max_bits) {
    auto it = programs_.find(max_bits);
    if (it == programs_.end()) {
      std::vector<Program> v;
      for_each_program(ctx(), max_bits, [&](const Program& p) {
        v.push_back(p);
        return true;
      });
      it = programs_.emplace(max_bits, std::move(v)).first;
    }
    return it->second;
  }

  // Witness lists per exact delta, inputs capped, outputs free.
  const std::vector<ExampleSet>& witness_pool(size_t delta) {
    auto it = witnesses_.find(delta);
    if (it == witnesses_.end()) {
      it = witnesses_
               .emplace(delta,
                        example_sets_with_delta(delta, caps_.input_len_cap))
               .first;
    }
    return it->second;
  }

 private:
  Library lib_;
  ComplexityFunction f_;
  TrieBoundParams tb_;
  Caps caps_;
  std::shared_ptr<ExecCache> cache_;
  std::map<size_t, std::vector<Program>> programs_;
  std::map<size_t, std::vector<ExampleSet>> witnesses_;
};

}  // namespace teachsize
