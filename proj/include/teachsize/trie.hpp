#pragma once

// Compiles an example set into a base program of nested if-then-else checks
// over the input stream: halt with the paired output on covered inputs,
// loop forever on everything else.
//
// Reads past the input end produce zeros, so inputs that agree up to
// trailing zeros are indistinguishable; the compiler works with those
// padded classes and refuses sets that put two behaviours in one class.
// Divergence on non-members extends to the verify depth: an input whose
// class differs from every covered class within that many stream bits is
// sent into a loop.
//
// Cell layout: cell 0 is the working cell W (reads, emits), cell 1 is an
// active flag F set by the prologue. Each leaf is wrapped in a guard that
// only fires while F is up and drops it afterwards, so once one leaf has
// run, the rest of the code falls through in a handful of steps and the
// program halts inside the witness time envelope. The envelope is enforced
// by construction: the compiler executes every halting member and lowers
// the verify depth until all of them fit, or gives up.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "teachsize/evaluator.hpp"

namespace teachsize {

struct CompiledTrie {
  Program program;
  size_t verify_depth;
};

namespace detail {

struct TrieClass {
  std::string stream;  // class bits zero-padded to the verify depth
  std::optional<BitString> out;
};

// Guarded action: runs body once while the flag is up, then keeps the flag
// down; costs three steps when skipped.
inline void trie_guard(std::string& code, const std::string& body) {
  code += ">[+<" + body + ">]<";
}

inline void trie_leaf(std::string& code, const TrieClass& cl, size_t d,
                      size_t v) {
  std::string body;
  if (!cl.out) {
    body = "+[]";  // members of a diverging class never come back
  } else {
    // Check the rest of the class stream, then write the output.
    for (size_t p = d; p < v; ++p)
      body += cl.stream[p] == '1' ? ",+[]" : ",[]";
    char w = '0';
    for (size_t j = 0; j < cl.out->size(); ++j) {
      if (cl.out->bit(j) != w - '0') {
        body += "+";
        w = char('0' + cl.out->bit(j));
      }
      body += ".";
    }
    body += "[+]";  // leave W clear so enclosing brackets fall through
  }
  trie_guard(code, body);
}

inline void trie_node(std::string& code, const std::vector<TrieClass>& cls,
                      const std::vector<size_t>& idxs, size_t d, size_t v) {
  if (idxs.size() == 1) {
    trie_leaf(code, cls[idxs[0]], d, v);
    return;
  }
  std::vector<size_t> ones, zeros;
  for (size_t ix : idxs)
    (cls[ix].stream[d] == '1' ? ones : zeros).push_back(ix);
  if (ones.empty()) {
    code += ",[]";  // a one here matches nothing: loop on it
    trie_node(code, cls, zeros, d + 1, v);
  } else if (zeros.empty()) {
    code += ",[+";
    trie_node(code, cls, ones, d + 1, v);
    code += "]";
    trie_guard(code, "+[]");  // a zero here matches nothing
  } else {
    code += ",[+";
    trie_node(code, cls, ones, d + 1, v);
    code += "]";
    trie_node(code, cls, zeros, d + 1, v);
  }
}

}  // namespace detail

inline CompiledTrie compile_trie_detailed(const ExampleSet& s,
                                          TrieBoundParams tb = {}) {
  // Group examples into padded classes; each class must behave one way.
  std::map<std::string, std::optional<BitString>> classes;
  for (const Example& e : s.examples()) {
    std::string rep = e.in.text();
    while (!rep.empty() && rep.back() == '0') rep.pop_back();
    auto it = classes.find(rep);
    if (it == classes.end()) {
      classes.emplace(rep, e.out);
    } else if (it->second != e.out) {
      throw Error("trie: inputs '" + e.in.text() + "' and earlier '" + rep +
                  "' padding are indistinguishable but need different "
                  "behaviour");
    }
  }

  size_t deepest = 0;
  bool any_halting = false;
  for (const auto& [rep, out] : classes) {
    deepest = std::max(deepest, rep.size());
    any_halting |= out.has_value();
  }
  if (!any_halting) {
    // Nothing ever halts; covers the empty set too.
    return {Program::parse("+[]", LangContext{0}), deepest};
  }

  for (size_t v = std::max<size_t>(deepest, 5);; --v) {
    std::vector<detail::TrieClass> cls;
    std::vector<size_t> idxs;
    for (const auto& [rep, out] : classes) {
      detail::TrieClass c;
      c.stream = rep + std::string(v - rep.size(), '0');
      c.out = out;
      idxs.push_back(cls.size());
      cls.push_back(std::move(c));
    }
    std::string code = ">+<";  // raise the active flag
    detail::trie_node(code, cls, idxs, 0, v);
    Program prog = Program::parse(code, LangContext{0});

    bool fits = true;
    for (const Example& e : s.examples()) {
      uint64_t bound = lambda_bound(e.in, s, tb);
      ExecOutcome r = execute(prog, e.in, bound);
      if (e.out) {
        fits &= r.halted && r.output == *e.out;
      } else {
        fits &= !execute(prog, e.in, 2 * bound + 256).halted;
      }
    }
    if (fits) return {prog, v};
    if (v == deepest)
      throw Error("trie: cannot meet the time envelope for this set");
  }
}

inline Program compile_trie(const ExampleSet& s, TrieBoundParams tb = {}) {
  return compile_trie_detailed(s, tb).program;
}

}  // namespace teachsize
