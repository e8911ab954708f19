#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "teachsize/codec.hpp"

using namespace teachsize;

namespace {

Example ex(const char* in, const char* out) {
  Example e;
  e.in = BitString(in);
  if (out) e.out = BitString(out);
  return e;
}

}  // namespace

TEST_CASE("worked encodings") {
  CHECK(ExampleSet().encode().text() == "1");
  CHECK(ExampleSet().delta() == 1);

  ExampleSet bot({ex("", nullptr)});
  CHECK(bot.encode().text() == "01011");
  CHECK(bot.delta() == 5);

  ExampleSet one({ex("0", "1")});
  CHECK(one.encode().text() == "01001000100");
  CHECK(one.delta() == 11);
}

TEST_CASE("canonical form sorts and collapses") {
  ExampleSet s({ex("1", "0"), ex("", "1"), ex("1", "0")});
  REQUIRE(s.size() == 2);
  CHECK(s.examples()[0].in.text() == "");
  CHECK(s.examples()[1].in.text() == "1");
  CHECK_THROWS_AS(ExampleSet({ex("1", "0"), ex("1", "1")}), Error);
  CHECK_THROWS_AS(ExampleSet({ex("1", "0"), ex("1", nullptr)}), Error);

  CHECK(s.find(BitString("1")) != nullptr);
  CHECK(s.find(BitString("0")) == nullptr);
  CHECK(s.with_example(ex("0", nullptr)).size() == 3);
}

TEST_CASE("decode inverts encode") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Example> v;
    size_t m = rng() % 4;
    std::set<uint64_t> used;
    for (size_t k = 0; k < m; ++k) {
      uint64_t ii = rng() % 40;
      if (!used.insert(ii).second) continue;
      Example e;
      e.in = BitString::from_index(ii);
      if (rng() % 3) e.out = BitString::from_index(rng() % 40);
      v.push_back(e);
    }
    ExampleSet s(std::move(v));
    REQUIRE(decode_example_set(s.encode()) == s);
  }
  CHECK_THROWS_AS(decode_example_set(BitString("01")), Error);
  CHECK_THROWS_AS(decode_example_set(BitString("11")), Error);  // trailing
}

TEST_CASE("witness order is delta then encoded bits") {
  ExampleSet empty;
  ExampleSet bot({ex("", nullptr)});
  ExampleSet one({ex("0", "1")});
  CHECK(witness_precedes(empty, bot));
  CHECK(witness_precedes(bot, one));
  CHECK_FALSE(witness_precedes(one, bot));
  CHECK_FALSE(witness_precedes(bot, bot));
}

TEST_CASE("enumeration starts with the empty set and stays sorted") {
  std::vector<ExampleSet> seen;
  for_each_example_set(9, 8, [&](const ExampleSet& s) {
    seen.push_back(s);
    return true;
  });
  REQUIRE(!seen.empty());
  CHECK(seen[0] == ExampleSet());
  for (size_t i = 1; i < seen.size(); ++i)
    REQUIRE(witness_precedes(seen[i - 1], seen[i]));

  // The diverge-on-empty witness shows up at delta 5.
  ExampleSet bot({ex("", nullptr)});
  bool found = false;
  for (const ExampleSet& s : seen) found |= s == bot;
  CHECK(found);
}

TEST_CASE("enumeration is complete against brute force") {
  // Independent generator: walk all bit strings up to 16 bits and keep the
  // ones that decode cleanly. Must agree exactly with the enumerator.
  std::set<std::string> brute;
  for (size_t len = 1; len <= 16; ++len) {
    for (uint64_t v = 0; v < (uint64_t(1) << len); ++v) {
      std::string bits;
      for (size_t j = len; j-- > 0;) bits.push_back(char('0' + ((v >> j) & 1)));
      try {
        ExampleSet s = decode_example_set(BitString(bits));
        bool ok = true;
        for (const Example& e : s.examples()) ok &= e.in.size() <= 8;
        if (ok) brute.insert(bits);
      } catch (const Error&) {
      }
    }
  }
  std::set<std::string> enumerated;
  for_each_example_set(16, 8, [&](const ExampleSet& s) {
    enumerated.insert(s.encode().text());
    return true;
  });
  REQUIRE(enumerated == brute);
}

TEST_CASE("encodings are prefix free") {
  // In bit-sorted order a prefix pair would sit adjacent, shorter first.
  std::vector<std::string> codes;
  for_each_example_set(14, 8, [&](const ExampleSet& s) {
    codes.push_back(s.encode().text());
    return true;
  });
  std::sort(codes.begin(), codes.end());
  for (size_t i = 1; i < codes.size(); ++i)
    REQUIRE(codes[i].compare(0, codes[i - 1].size(), codes[i - 1]) != 0);
}

TEST_CASE("length caps filter the stream") {
  size_t with_cap = 0, without_cap = 0;
  for_each_example_set(13, 1, [&](const ExampleSet&) {
    ++with_cap;
    return true;
  });
  for_each_example_set(13, 8, [&](const ExampleSet&) {
    ++without_cap;
    return true;
  });
  CHECK(with_cap < without_cap);

  for_each_example_set(13, 1, [&](const ExampleSet& s) {
    for (const Example& e : s.examples()) REQUIRE(e.in.size() <= 1);
    return true;
  });
  for_each_example_set(13, 8, [&](const ExampleSet& s) {
    for (const Example& e : s.examples())
      if (e.out) REQUIRE(e.out->size() <= 1);
    return true;
  }, 1);
}

TEST_CASE("witness text round trips") {
  ExampleSet s({ex("", "1"), ex("10", nullptr)});
  CHECK(format_witness(s) == "{ -> 1, 10 -> _|_}");
  CHECK(parse_witness("{ -> 1, 10 -> _|_}") == s);
  CHECK(parse_witness("{10->_|_,->1}") == s);
  CHECK(parse_witness("{}") == ExampleSet());
  CHECK(parse_witness("  {  }  ") == ExampleSet());
  CHECK_THROWS_AS(parse_witness("nope"), Error);
  CHECK_THROWS_AS(parse_witness("{1}"), Error);
  CHECK_THROWS_AS(parse_witness("{1->2}"), Error);
}
