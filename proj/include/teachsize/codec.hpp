#pragma once

// Example sets and their bit-exact prefix encoding. The encoded length is
// the size measure delta; the total order on witnesses is delta first, then
// lexicographic on the encoded bits. Layout: enc(|S|), then per example in
// input-index order enc(N(input)) enc(outcode), where enc(n) = gamma(n+1)
// and outcode is 0 for the diverge marker, N(output)+1 otherwise.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "teachsize/bitstring.hpp"

namespace teachsize {

// One observation: input and either an output or the diverge marker.
struct Example {
  BitString in;
  std::optional<BitString> out;  // nullopt = program must not halt

  bool operator==(const Example& o) const { return in == o.in && out == o.out; }
};

// Canonical finite example set: sorted by input index, one output per input.
class ExampleSet {
 public:
  ExampleSet() { delta_ = 1; }  // enc(0) = "1"

  explicit ExampleSet(std::vector<Example> examples)
      : examples_(std::move(examples)) {
    std::sort(examples_.begin(), examples_.end(),
              [](const Example& a, const Example& b) {
                return a.in.index() < b.in.index();
              });
    // Equal duplicates collapse; conflicting outputs are a caller bug.
    size_t w = 0;
    for (size_t r = 0; r < examples_.size(); ++r) {
      if (w > 0 && examples_[r].in == examples_[w - 1].in) {
        if (examples_[r].out != examples_[w - 1].out)
          throw Error("example set: two outputs for input '" +
                      examples_[r].in.text() + "'");
        continue;
      }
      examples_[w++] = examples_[r];
    }
    examples_.resize(w);
    delta_ = encode().size();
  }

  const std::vector<Example>& examples() const { return examples_; }
  size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  size_t delta() const { return delta_; }

  const Example* find(const BitString& in) const {
    for (const Example& e : examples_)
      if (e.in == in) return &e;
    return nullptr;
  }

  ExampleSet with_example(Example e) const {
    std::vector<Example> v = examples_;
    v.push_back(std::move(e));
    return ExampleSet(std::move(v));
  }

  BitString encode() const {
    BitString out = elias_gamma(examples_.size() + 1);
    for (const Example& e : examples_) {
      out.append(elias_gamma(e.in.index() + 1));
      uint64_t outcode = e.out ? e.out->index() + 1 : 0;
      out.append(elias_gamma(outcode + 1));
    }
    return out;
  }

  bool operator==(const ExampleSet& o) const { return examples_ == o.examples_; }
  bool operator!=(const ExampleSet& o) const { return !(*this == o); }

 private:
  std::vector<Example> examples_;
  size_t delta_;
};

inline ExampleSet decode_example_set(const BitString& bits) {
  size_t pos = 0;
  auto next = [&]() -> uint64_t {
    auto got = elias_gamma_decode(bits, pos);
    if (!got) throw Error("example set bits: truncated");
    pos += got->second;
    return got->first - 1;  // undo the +1 shift of enc
  };
  uint64_t count = next();
  std::vector<Example> v;
  uint64_t prev_index = 0;
  for (uint64_t k = 0; k < count; ++k) {
    uint64_t ii = next();
    if (k > 0 && ii <= prev_index)
      throw Error("example set bits: inputs out of order");
    prev_index = ii;
    uint64_t outcode = next();
    Example e;
    e.in = BitString::from_index(ii);
    if (outcode > 0) e.out = BitString::from_index(outcode - 1);
    v.push_back(std::move(e));
  }
  if (pos != bits.size()) throw Error("example set bits: trailing bits");
  return ExampleSet(std::move(v));
}

// The witness order: smaller encoding first, ties by the encoded bits.
inline bool witness_precedes(const ExampleSet& a, const ExampleSet& b) {
  if (a.delta() != b.delta()) return a.delta() < b.delta();
  return a.encode() < b.encode();
}

namespace detail {

inline size_t gamma_len(uint64_t n) {
  size_t w = 0;
  while ((n >> w) > 1) ++w;
  return 2 * w + 1;
}

// Encoded cost of one example with the given input index and outcode.
inline size_t example_cost(uint64_t ii, uint64_t outcode) {
  return gamma_len(ii + 1) + gamma_len(outcode + 1);
}

}  // namespace detail

// All canonical sets whose encoding is exactly `delta` bits and whose
// strings fit the length caps, sorted by encoded bits.
inline std::vector<ExampleSet> example_sets_with_delta(
    size_t delta, size_t max_in_len, size_t max_out_len = size_t(-1)) {
  std::vector<ExampleSet> out;
  std::vector<Example> cur;

  // Picks example k of m; inputs have strictly rising indices.
  std::function<void(size_t, uint64_t, size_t)> pick = [&](size_t left,
                                                           uint64_t min_ii,
                                                           size_t bits_left) {
    if (left == 0) {
      if (bits_left == 0) out.push_back(ExampleSet(cur));
      return;
    }
    size_t reserve = (left - 1) * 2;  // later examples cost two bits minimum
    for (uint64_t ii = min_ii;; ++ii) {
      size_t cin = detail::gamma_len(ii + 1);
      if (cin + 1 + reserve > bits_left) break;  // gamma_len rises with ii
      BitString in = BitString::from_index(ii);
      if (in.size() > max_in_len) break;  // index order is length order
      for (uint64_t oc = 0;; ++oc) {
        size_t cost = cin + detail::gamma_len(oc + 1);
        if (cost + reserve > bits_left) break;
        if (oc > 0 && BitString::from_index(oc - 1).size() > max_out_len)
          break;
        Example e;
        e.in = in;
        if (oc > 0) e.out = BitString::from_index(oc - 1);
        cur.push_back(std::move(e));
        pick(left - 1, ii + 1, bits_left - cost);
        cur.pop_back();
      }
    }
  };

  for (size_t m = 0; detail::gamma_len(m + 1) <= delta; ++m) {
    size_t count_cost = detail::gamma_len(m + 1);
    if (count_cost + m * 2 > delta) continue;
    if (m == 0) {
      if (count_cost == delta) out.push_back(ExampleSet());
      continue;
    }
    pick(m, 0, delta - count_cost);
  }

  std::sort(out.begin(), out.end(), [](const ExampleSet& a, const ExampleSet& b) {
    return a.encode() < b.encode();
  });
  return out;
}

// Streams every canonical set with delta <= max_delta in witness order,
// starting from the empty set. The callback returns false to stop.
inline void for_each_example_set(
    size_t max_delta, size_t max_in_len,
    const std::function<bool(const ExampleSet&)>& fn,
    size_t max_out_len = size_t(-1)) {
  for (size_t d = 1; d <= max_delta; ++d) {
    for (const ExampleSet& s :
         example_sets_with_delta(d, max_in_len, max_out_len))
      if (!fn(s)) return;
  }
}

// Text form used by the command line: `{ -> 1, 10 -> _|_}`.
inline std::string format_witness(const ExampleSet& s) {
  std::string out = "{";
  bool first = true;
  for (const Example& e : s.examples()) {
    if (!first) out += ", ";
    first = false;
    out += e.in.text() + " -> " + (e.out ? e.out->text() : "_|_");
  }
  out += "}";
  return out;
}

inline ExampleSet parse_witness(const std::string& text) {
  size_t lo = text.find_first_not_of(" \t");
  size_t hi = text.find_last_not_of(" \t");
  if (lo == std::string::npos || text[lo] != '{' || text[hi] != '}')
    throw Error("witness: expected {...}");
  std::string body = text.substr(lo + 1, hi - lo - 1);

  std::vector<Example> v;
  size_t pos = 0;
  bool any = body.find_first_not_of(" \t") != std::string::npos;
  while (any) {
    size_t comma = body.find(',', pos);
    std::string item = body.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    size_t arrow = item.find("->");
    if (arrow == std::string::npos) throw Error("witness: missing -> in item");
    auto strip = [](std::string s) {
      size_t a = s.find_first_not_of(" \t");
      if (a == std::string::npos) return std::string();
      size_t b = s.find_last_not_of(" \t");
      return s.substr(a, b - a + 1);
    };
    std::string in = strip(item.substr(0, arrow));
    std::string outs = strip(item.substr(arrow + 2));
    Example e;
    e.in = BitString(in);
    if (outs != "_|_") e.out = BitString(outs);
    v.push_back(std::move(e));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return ExampleSet(std::move(v));
}

}  // namespace teachsize
