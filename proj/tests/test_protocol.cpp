#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>

#include "teachsize/protocol.hpp"

using namespace teachsize;

namespace {

Caps small_caps() {
  Caps c;
  c.max_witness_bits = 11;
  c.max_prog_bits = 12;
  return c;
}

TeachingBook& small_book() {
  static TeachingBook book =
      build_book(ComplexityFunction{}, TrieBoundParams{}, small_caps());
  return book;
}

Evaluator& base_eval() {
  static Evaluator ev(Library{}, ComplexityFunction{}, TrieBoundParams{},
                      small_caps());
  return ev;
}

const TeachingBookEntry* entry_for_program(const TeachingBook& b,
                                           const std::string& text) {
  for (const TeachingBookEntry& e : b.entries)
    if (e.program.text() == text) return &e;
  return nullptr;
}

}  // namespace

TEST_CASE("book starts with the empty witness teaching the empty program") {
  const TeachingBook& b = small_book();
  REQUIRE(!b.entries.empty());
  CHECK(b.entries[0].program.text() == "");
  CHECK(b.entries[0].witness.empty());
  CHECK(b.entries[0].ts_bits == 1);
  CHECK(b.entries[0].k_bits == 0);
}

TEST_CASE("book holds the hand-checked early entries") {
  const TeachingBook& b = small_book();

  const TeachingBookEntry* diverger = entry_for_program(b, "@");
  REQUIRE(diverger);
  CHECK(diverger->ts_bits == 5);
  CHECK(diverger->k_bits == 3);
  CHECK(format_witness(diverger->witness) == "{ -> _|_}");

  const TeachingBookEntry* const1 = entry_for_program(b, "+.");
  REQUIRE(const1);
  CHECK(const1->ts_bits == 9);
  CHECK(format_witness(const1->witness) == "{ -> 1}");

  CHECK(entry_for_program(b, "."));      // constant "0"
  CHECK(entry_for_program(b, ".."));     // constant "00"
  CHECK(entry_for_program(b, "+.."));    // constant "11", delta 11
}

TEST_CASE("entries are in strict witness order with unique parts") {
  const TeachingBook& b = small_book();
  CHECK(b.entries.size() >= 8);
  std::set<std::string> progs, wits;
  for (size_t i = 0; i < b.entries.size(); ++i) {
    const TeachingBookEntry& e = b.entries[i];
    CHECK(e.ts_bits == e.witness.delta());
    CHECK(e.k_bits == e.program.bit_len());
    CHECK(progs.insert(e.program.text()).second);
    CHECK(wits.insert(e.witness.encode().text()).second);
    if (i > 0)
      CHECK(witness_precedes(b.entries[i - 1].witness, e.witness));
  }
}

TEST_CASE("no two entries share behaviour and each witness maps back") {
  const TeachingBook& b = small_book();
  Evaluator& ev = base_eval();
  std::set<std::string> sigs;
  for (const TeachingBookEntry& e : b.entries) {
    CHECK(sigs.insert(outcome_signature(ev, e.program)).second);
    auto learned = ev.learner(e.witness);
    REQUIRE(learned);
    CHECK(*learned == e.program);
  }
}

TEST_CASE("no earlier witness teaches an entry's behaviour") {
  const TeachingBook& b = small_book();
  Evaluator& ev = base_eval();
  for (const TeachingBookEntry& e : b.entries) {
    bool stop = false;
    for_each_example_set(
        e.ts_bits, ev.caps().input_len_cap, [&](const ExampleSet& s) {
          if (!witness_precedes(s, e.witness)) {
            stop = true;
            return false;
          }
          auto p = ev.learner(s);
          if (p) CHECK_FALSE(ev.concept_equiv(*p, e.program));
          return true;
        });
    CHECK(stop);
  }
}

TEST_CASE("witness-program map is a bijection with small length spread") {
  const TeachingBook& b = small_book();
  Evaluator& ev = base_eval();
  long max_k_minus_ts = -1000, max_ts_minus_k = -1000;
  for (const TeachingBookEntry& e : b.entries) {
    auto k = ev.k_len(e.program);
    REQUIRE(k);
    CHECK(*k <= e.k_bits);  // the learner's program can't beat the shortest
    long d = long(*k) - long(e.ts_bits);
    max_k_minus_ts = std::max(max_k_minus_ts, d);
    max_ts_minus_k = std::max(max_ts_minus_k, -d);
  }
  // Book-wide constant: shortest equivalent program never exceeds the
  // teaching size by more than this measured slack.
  long k_m = max_k_minus_ts;
  CHECK(k_m <= 3);
  CHECK(max_ts_minus_k <= 8);
  for (const TeachingBookEntry& e : b.entries)
    CHECK(long(*ev.k_len(e.program)) - long(e.ts_bits) <= k_m);
}

TEST_CASE("parallel build is identical to the serial build") {
  const TeachingBook& serial = small_book();
  TeachingBook par =
      build_book(ComplexityFunction{}, TrieBoundParams{}, small_caps(), 3);
  REQUIRE(par.entries.size() == serial.entries.size());
  for (size_t i = 0; i < par.entries.size(); ++i) {
    CHECK(par.entries[i].program == serial.entries[i].program);
    CHECK(par.entries[i].witness.encode() == serial.entries[i].witness.encode());
    CHECK(par.entries[i].ts_bits == serial.entries[i].ts_bits);
    CHECK(par.entries[i].k_bits == serial.entries[i].k_bits);
  }
}

TEST_CASE("find_equivalent resolves references by behaviour") {
  const TeachingBook& b = small_book();
  Evaluator& ev = base_eval();

  const TeachingBookEntry* hit =
      find_equivalent(b, ev, Program::parse("+.", LangContext{0}));
  REQUIRE(hit);
  CHECK(hit->ts_bits == 9);

  // Different text, same behaviour: trailing flip never prints.
  hit = find_equivalent(b, ev, Program::parse("+.+", LangContext{0}));
  REQUIRE(hit);
  CHECK(hit->program.text() == "+.");

  // The diverging concept resolves to the call-free diverger's entry.
  hit = find_equivalent(b, ev, Program::parse("+[]", LangContext{0}));
  REQUIRE(hit);
  CHECK(hit->program.text() == "@");
}
