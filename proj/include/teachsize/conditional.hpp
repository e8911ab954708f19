#pragma once

// Conditional teaching: build a library from already-taught concepts and
// measure teaching size and shortest-program length relative to it. The
// extended language gains one call opcode per library slot, so anything the
// library covers can be cited instead of spelled out.

#include <optional>
#include <string>
#include <vector>

#include "teachsize/protocol.hpp"

namespace teachsize {

// Call-free stand-in for a spin instruction: loops from any cell state, so
// substituting it for `@` preserves behaviour exactly.
inline const char* kDivergerText = "[]+[]";

namespace detail {

inline Program strip_calls(const Program& p) {
  std::string out;
  for (char ch : p.text())
    if (ch == '@')
      out += kDivergerText;
    else
      out += ch;
  return Program::parse(out, LangContext{0});
}

}  // namespace detail

inline Library make_library(const TeachingBook& book, Evaluator& ev,
                            const std::vector<Program>& concepts) {
  Library lib;
  for (const Program& c : concepts) {
    const TeachingBookEntry* e = find_equivalent(book, ev, c);
    if (!e)
      throw Error("library: no book entry behaves like '" + c.text() + "'");
    lib.add(detail::strip_calls(e->program), e->program.text());
  }
  return lib;
}

inline Library make_library(const TeachingBook& book,
                            const std::vector<Program>& concepts) {
  Evaluator ev(Library{}, book.f, book.trie_bound, book.caps);
  return make_library(book, ev, concepts);
}

inline std::optional<ExampleSet> cond_teaching_witness(
    const Program& c_ref, const std::vector<Program>& given,
    const TeachingBook& book) {
  Library b = make_library(book, given);
  Evaluator ev(b, book.f, book.trie_bound, book.caps);
  return ev.teacher(c_ref);
}

inline std::optional<size_t> cond_teaching_size(
    const Program& c_ref, const std::vector<Program>& given,
    const TeachingBook& book) {
  auto w = cond_teaching_witness(c_ref, given, book);
  if (!w) return std::nullopt;
  return w->delta();
}

inline Program first_equivalent_in(const Program& c_ref, const Library& b,
                                   const ComplexityFunction& f,
                                   const TrieBoundParams& tb,
                                   const Caps& caps) {
  Evaluator ev(b, f, tb, caps);
  return ev.first_equivalent(c_ref);
}

inline std::optional<size_t> cond_k_len(const Program& c_ref,
                                        const std::vector<Program>& given,
                                        const TeachingBook& book) {
  Library b = make_library(book, given);
  Evaluator ev(b, book.f, book.trie_bound, book.caps);
  return ev.k_len(c_ref);
}

}  // namespace teachsize
