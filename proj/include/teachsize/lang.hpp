#pragma once

// The toy language: eight opcodes over a bit tape, fixed 3-bit opcode table,
// plus indexed calls into a library of named programs. Covers parsing, the
// bit-level form, program ordering, enumeration and call unfolding.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "teachsize/bitstring.hpp"

namespace teachsize {

// Opcode value == position in the fixed symbol order "><+.,[]@",
// which is also the 3-bit code written in the bit form.
enum class Op : uint8_t {
  kRight = 0,  // >  move work head right
  kLeft = 1,   // <  move work head left
  kFlip = 2,   // +  flip current work cell
  kOut = 3,    // .  append current cell to output
  kIn = 4,     // ,  read next input bit into cell (0 past end)
  kOpen = 5,   // [  jump past matching ] when cell is 0
  kClose = 6,  // ]  jump back to matching [ when cell is 1
  kCall = 7,   // @  run library program, index in the extra bits
};

inline constexpr int kOpcodeBits = 3;
inline constexpr int kNumOps = 8;
inline constexpr char kOpChars[kNumOps + 1] = "><+.,[]@";

struct Instr {
  Op op;
  uint16_t arg = 0;  // library index, meaningful for kCall only

  bool operator==(const Instr& o) const { return op == o.op && arg == o.arg; }
};

// Instruction ordering used everywhere a lexicographic tie-break is needed:
// opcode position first, call index second.
inline bool instr_less(const Instr& a, const Instr& b) {
  if (a.op != b.op) return a.op < b.op;
  return a.arg < b.arg;
}

// How many bits a call carries for a library of the given size. A lone
// program (or none) needs no index; otherwise indexes are fixed-width.
struct LangContext {
  uint32_t lib_size = 0;

  int index_bits() const {
    if (lib_size <= 1) return 0;
    int b = 0;
    while ((uint64_t(1) << b) < lib_size) ++b;
    return b;
  }
  int call_bits() const { return kOpcodeBits + index_bits(); }

  bool operator==(const LangContext& o) const { return lib_size == o.lib_size; }
  bool operator!=(const LangContext& o) const { return lib_size != o.lib_size; }
};

// A validated instruction sequence for one context. Brackets must nest and
// call indexes must be in range; both are checked at construction.
class Program {
 public:
  Program() = default;

  Program(std::vector<Instr> code, LangContext ctx)
      : code_(std::move(code)), ctx_(ctx) {
    validate();
  }

  static Program parse(const std::string& text, LangContext ctx) {
    std::vector<Instr> code;
    size_t i = 0;
    while (i < text.size()) {
      char c = text[i];
      if (c == ' ') { ++i; continue; }
      int op = -1;
      for (int k = 0; k < kNumOps; ++k)
        if (kOpChars[k] == c) op = k;
      if (op < 0) throw Error(std::string("program: bad symbol '") + c + "'");
      ++i;
      uint16_t arg = 0;
      if (Op(op) == Op::kCall && ctx.lib_size > 1) {
        size_t start = i;
        uint32_t v = 0;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
          v = v * 10 + uint32_t(text[i] - '0');
          if (v > 0xffff) throw Error("program: call index too large");
          ++i;
        }
        if (i == start) throw Error("program: call needs an index here");
        arg = uint16_t(v);
      }
      code.push_back({Op(op), arg});
    }
    return Program(std::move(code), ctx);
  }

  static Program from_bits(const BitString& bits, LangContext ctx) {
    std::vector<Instr> code;
    size_t pos = 0;
    while (pos < bits.size()) {
      if (pos + kOpcodeBits > bits.size())
        throw Error("program bits: truncated opcode");
      int op = 0;
      for (int j = 0; j < kOpcodeBits; ++j) op = (op << 1) | bits.bit(pos + j);
      pos += kOpcodeBits;
      uint16_t arg = 0;
      if (Op(op) == Op::kCall) {
        int ib = ctx.index_bits();
        if (pos + size_t(ib) > bits.size())
          throw Error("program bits: truncated call index");
        uint32_t v = 0;
        for (int j = 0; j < ib; ++j) v = (v << 1) | uint32_t(bits.bit(pos + j));
        pos += size_t(ib);
        arg = uint16_t(v);
      }
      code.push_back({Op(op), arg});
    }
    return Program(std::move(code), ctx);
  }

  const std::vector<Instr>& code() const { return code_; }
  const LangContext& ctx() const { return ctx_; }

  // Instruction count; a call counts once no matter how wide its index is.
  size_t ninst() const { return code_.size(); }

  size_t call_count() const {
    size_t n = 0;
    for (const Instr& ins : code_)
      if (ins.op == Op::kCall) ++n;
    return n;
  }

  // Code length in bits: 3 per plain opcode, 3 + index width per call.
  size_t bit_len() const {
    size_t calls = call_count();
    return kOpcodeBits * (code_.size() - calls) + size_t(ctx_.call_bits()) * calls;
  }

  std::string text() const {
    std::string out;
    for (const Instr& ins : code_) {
      out.push_back(kOpChars[int(ins.op)]);
      if (ins.op == Op::kCall && ctx_.lib_size > 1)
        out += std::to_string(ins.arg);
    }
    return out;
  }

  BitString bits() const {
    BitString out;
    int ib = ctx_.index_bits();
    for (const Instr& ins : code_) {
      int op = int(ins.op);
      for (int j = kOpcodeBits - 1; j >= 0; --j) out.push_back((op >> j) & 1);
      if (ins.op == Op::kCall)
        for (int j = ib - 1; j >= 0; --j) out.push_back((ins.arg >> j) & 1);
    }
    return out;
  }

  bool operator==(const Program& o) const {
    return ctx_ == o.ctx_ && code_ == o.code_;
  }
  bool operator!=(const Program& o) const { return !(*this == o); }

 private:
  void validate() const {
    int depth = 0;
    for (const Instr& ins : code_) {
      if (ins.op == Op::kOpen) ++depth;
      if (ins.op == Op::kClose && --depth < 0)
        throw Error("program: unmatched ]");
      if (ins.op == Op::kCall && ctx_.lib_size > 0 && ins.arg >= ctx_.lib_size)
        throw Error("program: call index out of range");
      // In an empty-library context a bare call is legal; it just never
      // finds a body and spins.
    }
    if (depth != 0) throw Error("program: unmatched [");
  }

  std::vector<Instr> code_;
  LangContext ctx_;
};

// Total order used by the learner: shorter bit length first, then
// lexicographic on the instruction sequence. Programs of equal bit length
// never have one a strict prefix of the other, so the tie-break is sound.
inline bool precedes(const Program& a, const Program& b) {
  if (a.ctx() != b.ctx()) throw Error("precedes: different contexts");
  size_t la = a.bit_len(), lb = b.bit_len();
  if (la != lb) return la < lb;
  const auto& x = a.code();
  const auto& y = b.code();
  for (size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] == y[i])) return instr_less(x[i], y[i]);
  }
  return false;  // identical (sizes must match at equal bit length)
}

// Enumerates every valid program with bit_len <= max_bits, in `precedes`
// order starting from the empty program. The callback returns false to stop.
// Strings with unbalanced brackets or out-of-range call indexes are skipped.
inline void for_each_program(LangContext ctx, size_t max_bits,
                             const std::function<bool(const Program&)>& fn) {
  const size_t call_cost = size_t(ctx.call_bits());
  std::vector<Instr> code;
  bool stop = false;

  // Depth-first in symbol order over sequences of exactly `target` bits.
  // Emitting only full-length sequences keeps the order lexicographic.
  std::function<void(size_t, size_t, int)> walk = [&](size_t target,
                                                      size_t used, int depth) {
    if (stop) return;
    if (used == target) {
      if (depth == 0) {
        if (!fn(Program(code, ctx))) stop = true;
      }
      return;
    }
    for (int op = 0; op < kNumOps && !stop; ++op) {
      size_t cost = (Op(op) == Op::kCall) ? call_cost : kOpcodeBits;
      if (used + cost > target) continue;
      int ndepth = depth;
      if (Op(op) == Op::kOpen) ++ndepth;
      if (Op(op) == Op::kClose) {
        if (depth == 0) continue;
        --ndepth;
      }
      // Every open bracket still needs a 3-bit close.
      if (used + cost + size_t(ndepth) * kOpcodeBits > target) continue;
      if (Op(op) == Op::kCall) {
        uint32_t limit = ctx.lib_size > 0 ? ctx.lib_size : 1;
        for (uint32_t ix = 0; ix < limit && !stop; ++ix) {
          code.push_back({Op::kCall, uint16_t(ix)});
          walk(target, used + cost, ndepth);
          code.pop_back();
        }
      } else {
        code.push_back({Op(op), 0});
        walk(target, used + cost, ndepth);
        code.pop_back();
      }
    }
  };

  for (size_t target = 0; target <= max_bits && !stop; ++target)
    walk(target, 0, 0);
}

// Library of callable programs. Bodies are call-free base-language code so
// that a call always expands to plain instructions in one step.
struct Library {
  std::vector<Program> prims;   // base-language, no calls
  std::vector<std::string> labels;

  size_t size() const { return prims.size(); }
  LangContext ctx() const { return LangContext{uint32_t(prims.size())}; }

  void add(Program p, std::string label) {
    if (p.ctx().lib_size != 0) throw Error("library: body must be base code");
    if (p.call_count() != 0) throw Error("library: body must be call-free");
    prims.push_back(std::move(p));
    labels.push_back(std::move(label));
  }

  std::string text() const {
    std::string out = "[";
    for (size_t i = 0; i < prims.size(); ++i) {
      if (i) out += "; ";
      out += prims[i].text();
    }
    out += "]";
    return out;
  }
};

// Macro-expansion of calls: each @i is replaced by the body of primitive i.
// The result is base code that behaves identically, step counts included.
inline Program unfold(const Program& p, const Library& lib) {
  if (p.ctx().lib_size != lib.size()) throw Error("unfold: context mismatch");
  std::vector<Instr> out;
  for (const Instr& ins : p.code()) {
    if (ins.op == Op::kCall) {
      if (ins.arg >= lib.size()) throw Error("unfold: call index out of range");
      const auto& body = lib.prims[ins.arg].code();
      out.insert(out.end(), body.begin(), body.end());
    } else {
      out.push_back(ins);
    }
  }
  return Program(std::move(out), LangContext{0});
}

// Packs a call-free instruction sequence into one integer for cache keys:
// a leading 1 marker, then 3 bits per opcode. Fails above 20 instructions.
inline std::optional<uint64_t> pack_base_code(const std::vector<Instr>& code) {
  if (code.size() > 20) return std::nullopt;
  uint64_t v = 1;
  for (const Instr& ins : code) {
    if (ins.op == Op::kCall && ins.arg != 0) return std::nullopt;
    v = (v << kOpcodeBits) | uint64_t(ins.op);
  }
  return v;
}

}  // namespace teachsize
