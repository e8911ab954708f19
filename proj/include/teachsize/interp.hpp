#pragma once

// Step-counted interpreter. One machine step per executed instruction,
// jumps included. A call costs nothing by itself: its body runs inline and
// only the body's instructions are counted, so unfolding preserves step
// counts exactly.

#include <cstdint>
#include <vector>

#include "teachsize/bitstring.hpp"
#include "teachsize/lang.hpp"

namespace teachsize {

struct ExecOutcome {
  bool halted = false;
  BitString output;       // meaningful only when halted
  uint64_t steps_used = 0;
  bool ran_call_code = false;  // instrumentation: some call body executed
};

inline bool same_outcome(const ExecOutcome& a, const ExecOutcome& b) {
  if (a.halted != b.halted) return false;
  if (a.steps_used != b.steps_used) return false;
  return !a.halted || a.output == b.output;
}

namespace detail {

// Matching-bracket table; -1 for non-brackets.
inline std::vector<int> bracket_matches(const std::vector<Instr>& code) {
  std::vector<int> match(code.size(), -1);
  std::vector<int> stack;
  for (size_t i = 0; i < code.size(); ++i) {
    if (code[i].op == Op::kOpen) stack.push_back(int(i));
    if (code[i].op == Op::kClose) {
      match[i] = stack.back();
      match[stack.back()] = int(i);
      stack.pop_back();
    }
  }
  return match;
}

// Work tape: bit cells, unbounded both ways, all zero at start.
class Tape {
 public:
  int read(int64_t pos) const {
    const std::vector<uint8_t>& half = pos >= 0 ? right_ : left_;
    size_t ix = pos >= 0 ? size_t(pos) : size_t(-pos - 1);
    return ix < half.size() ? half[ix] : 0;
  }
  void flip(int64_t pos) {
    std::vector<uint8_t>& half = pos >= 0 ? right_ : left_;
    size_t ix = pos >= 0 ? size_t(pos) : size_t(-pos - 1);
    if (ix >= half.size()) half.resize(ix + 1, 0);
    half[ix] ^= 1;
  }
  void set(int64_t pos, int v) {
    if (read(pos) != v) flip(pos);
  }

 private:
  std::vector<uint8_t> right_, left_;
};

struct Frame {
  const std::vector<Instr>* code;
  const std::vector<int>* match;
  size_t ip = 0;
};

}  // namespace detail

// Runs `p` on `input` with at most `budget` steps. `lib` supplies call
// bodies and may be null for base code; a call that finds no body spins in
// place, draining the budget. Reads past the input end yield zero bits.
inline ExecOutcome execute(const Program& p, const BitString& input,
                           uint64_t budget, const Library* lib = nullptr) {
  if (lib != nullptr && p.ctx().lib_size != lib->size())
    throw Error("execute: program context does not match library");

  // Per-code bracket tables, built once per run. Bodies are indexed 0..k-1,
  // the main program sits at slot k.
  size_t nbodies = lib ? lib->size() : 0;
  std::vector<std::vector<int>> match(nbodies + 1);
  for (size_t i = 0; i < nbodies; ++i)
    match[i] = detail::bracket_matches(lib->prims[i].code());
  match[nbodies] = detail::bracket_matches(p.code());

  std::vector<detail::Frame> stack;
  stack.push_back({&p.code(), &match[nbodies], 0});

  detail::Tape tape;
  int64_t head = 0;
  size_t cursor = 0;  // next unread input bit
  BitString output;
  ExecOutcome out;

  while (out.steps_used < budget) {
    // Pop finished frames; running off the outer frame is the halt.
    while (!stack.empty() && stack.back().ip >= stack.back().code->size())
      stack.pop_back();
    if (stack.empty()) {
      out.halted = true;
      out.output = output;
      return out;
    }

    detail::Frame& fr = stack.back();
    const Instr& ins = (*fr.code)[fr.ip];
    switch (ins.op) {
      case Op::kRight:
        ++head;
        ++fr.ip;
        break;
      case Op::kLeft:
        --head;
        ++fr.ip;
        break;
      case Op::kFlip:
        tape.flip(head);
        ++fr.ip;
        break;
      case Op::kOut:
        output.push_back(tape.read(head));
        ++fr.ip;
        break;
      case Op::kIn:
        tape.set(head, cursor < input.size() ? input.bit(cursor) : 0);
        ++cursor;
        ++fr.ip;
        break;
      case Op::kOpen:
        if (tape.read(head) == 0)
          fr.ip = size_t((*fr.match)[fr.ip]) + 1;
        else
          ++fr.ip;
        break;
      case Op::kClose:
        if (tape.read(head) == 1)
          fr.ip = size_t((*fr.match)[fr.ip]);
        else
          ++fr.ip;
        break;
      case Op::kCall:
        if (nbodies == 0) {
          // No library to call into: spin here, one step at a time.
          ++out.steps_used;
          continue;
        }
        ++fr.ip;  // return past the call
        stack.push_back({&lib->prims[ins.arg].code(), &match[ins.arg], 0});
        out.ran_call_code = true;
        continue;  // entering the body costs nothing by itself
      default:
        throw Error("execute: bad opcode");
    }
    ++out.steps_used;
  }

  // Budget exhausted. One more chance to observe a halt that needs no
  // further steps (all remaining frames already finished).
  while (!stack.empty() && stack.back().ip >= stack.back().code->size())
    stack.pop_back();
  if (stack.empty()) {
    out.halted = true;
    out.output = output;
  }
  return out;
}

}  // namespace teachsize
