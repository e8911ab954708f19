#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "teachsize/lang.hpp"

using namespace teachsize;

namespace {
const LangContext kBase{0};
}

TEST_CASE("parse and text round trip") {
  Program p = Program::parse("+.[,].@", kBase);
  CHECK(p.text() == "+.[,].@");
  CHECK(p.ninst() == 7);
  CHECK(p.bit_len() == 21);
  CHECK(Program::parse(" + . ", kBase).text() == "+.");
  CHECK(Program::parse("", kBase) == Program());
}

TEST_CASE("parse rejects bad programs") {
  CHECK_THROWS_AS(Program::parse("]", kBase), Error);
  CHECK_THROWS_AS(Program::parse("[", kBase), Error);
  CHECK_THROWS_AS(Program::parse("[]][", kBase), Error);
  CHECK_THROWS_AS(Program::parse("x", kBase), Error);
  LangContext two{2};
  CHECK_THROWS_AS(Program::parse("@2", two), Error);
  CHECK_THROWS_AS(Program::parse("@", two), Error);
  CHECK(Program::parse("@1", two).text() == "@1");
}

TEST_CASE("call width depends on library size") {
  CHECK(LangContext{0}.call_bits() == 3);
  CHECK(LangContext{1}.call_bits() == 3);
  CHECK(LangContext{2}.call_bits() == 4);
  CHECK(LangContext{3}.call_bits() == 5);
  CHECK(LangContext{4}.call_bits() == 5);
  CHECK(LangContext{5}.call_bits() == 6);

  Program p = Program::parse("@0@1", LangContext{2});
  CHECK(p.ninst() == 2);
  CHECK(p.call_count() == 2);
  CHECK(p.bit_len() == 8);
  Program q = Program::parse("@,", LangContext{1});
  CHECK(q.bit_len() == 6);
}

TEST_CASE("bit form round trips") {
  // Opcode values follow the symbol order, so ">" is 000 and "@" is 111.
  CHECK(Program::parse(">", kBase).bits().text() == "000");
  CHECK(Program::parse("@", kBase).bits().text() == "111");
  CHECK(Program::parse("+.", kBase).bits().text() == "010011");
  CHECK(Program::parse("@1", LangContext{2}).bits().text() == "1111");
  CHECK(Program::parse("@2", LangContext{3}).bits().text() == "11110");

  for (const char* text : {"", ">", "+.[,]", "[[]]@", ",,[+.]"}) {
    Program p = Program::parse(text, kBase);
    REQUIRE(Program::from_bits(p.bits(), kBase) == p);
  }
  Program c = Program::parse("@3@0,", LangContext{4});
  REQUIRE(Program::from_bits(c.bits(), LangContext{4}) == c);
  CHECK_THROWS_AS(Program::from_bits(BitString("0001"), kBase), Error);
  CHECK_THROWS_AS(Program::from_bits(BitString("111"), LangContext{2}), Error);
}

TEST_CASE("precedes orders by bit length then symbols") {
  auto lt = [](const char* a, const char* b) {
    return precedes(Program::parse(a, kBase), Program::parse(b, kBase));
  };
  CHECK(lt("", ">"));
  CHECK(lt(">", "><"));
  CHECK(lt("+.", ".+"));
  CHECK(lt(",", "@"));
  CHECK_FALSE(lt("@", ","));
  CHECK_FALSE(lt(">", ">"));
  // In a two-entry library a call is wider than a plain opcode.
  LangContext two{2};
  CHECK(precedes(Program::parse(">", two), Program::parse("@0", two)));
  CHECK(precedes(Program::parse("@0", two), Program::parse("@1", two)));
  CHECK_THROWS_AS(
      precedes(Program::parse(">", kBase), Program::parse(">", two)), Error);
}

TEST_CASE("enumeration of short base programs") {
  std::vector<std::string> got;
  for_each_program(kBase, 6, [&](const Program& p) {
    got.push_back(p.text());
    return true;
  });
  // One empty, six singles (brackets cannot stand alone), then pairs.
  REQUIRE(got.size() == 44);
  std::vector<std::string> head = {"", ">", "<", "+", ".", ",", "@"};
  for (size_t i = 0; i < head.size(); ++i) REQUIRE(got[i] == head[i]);
  CHECK(got[7] == ">>");
  CHECK(got[12] == ">@");
  CHECK(got[37] == "[]");
  CHECK(got[38] == "@>");
  CHECK(got[43] == "@@");
}

TEST_CASE("enumeration respects call width") {
  std::vector<std::string> got;
  for_each_program(LangContext{2}, 4, [&](const Program& p) {
    got.push_back(p.text());
    return true;
  });
  // Calls cost four bits here, so they arrive after every three-bit opcode.
  REQUIRE(got == std::vector<std::string>{"", ">", "<", "+", ".", ",",
                                          "@0", "@1"});
}

TEST_CASE("enumeration is sorted and stoppable") {
  std::vector<Program> all;
  for_each_program(kBase, 9, [&](const Program& p) {
    all.push_back(p);
    return true;
  });
  for (size_t i = 1; i < all.size(); ++i)
    REQUIRE(precedes(all[i - 1], all[i]));

  size_t seen = 0;
  for_each_program(kBase, 9, [&](const Program&) { return ++seen < 5; });
  CHECK(seen == 5);
}

TEST_CASE("library text and unfolding") {
  Library lib1;
  lib1.add(Program::parse(">>", kBase), "shift2");
  CHECK(lib1.text() == "[>>]");
  Program p = Program::parse("@,", lib1.ctx());
  CHECK(unfold(p, lib1).text() == ">>,");

  Library lib2;
  lib2.add(Program::parse("+", kBase), "flip");
  lib2.add(Program::parse("><", kBase), "wiggle");
  CHECK(lib2.text() == "[+; ><]");
  Program q = Program::parse("@1@0", lib2.ctx());
  Program u = unfold(q, lib2);
  CHECK(u.text() == "><+");
  CHECK(u.ctx().lib_size == 0);

  CHECK_THROWS_AS(unfold(p, lib2), Error);

  Library bad;
  CHECK_THROWS_AS(bad.add(Program::parse("@", kBase), "call"), Error);
}

TEST_CASE("packed code keys are distinct") {
  std::vector<std::string> texts = {"", ">", "<", "+.", ">>", "[]", "[+]",
                                    ",[+.]", "++++"};
  std::vector<uint64_t> keys;
  for (const auto& t : texts) {
    auto k = pack_base_code(Program::parse(t, kBase).code());
    REQUIRE(k.has_value());
    keys.push_back(*k);
  }
  for (size_t i = 0; i < keys.size(); ++i)
    for (size_t j = i + 1; j < keys.size(); ++j) REQUIRE(keys[i] != keys[j]);

  std::vector<Instr> longcode(21, Instr{Op::kFlip, 0});
  CHECK_FALSE(pack_base_code(longcode).has_value());
}
