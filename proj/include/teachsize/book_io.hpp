#pragma once

// Teaching-book persistence.  "TSB1" is a line-based text format that
// freezes the book together with the configuration that produced it: a
// magic line, the semantic config keys, the config digest, and one line per
// entry carrying the program bits and witness bits in hex plus their exact
// bit lengths.  Serialization is a pure function of the book, so rebuilding
// under the same config reproduces the file byte for byte.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "teachsize/codec.hpp"
#include "teachsize/config.hpp"
#include "teachsize/protocol.hpp"

namespace teachsize {
namespace detail {

// Hex is MSB-first with zero padding in the last nibble; "-" marks a
// zero-length payload so every field stays non-empty.
inline std::string bits_to_hex(const BitString& b) {
  static const char* kDigits = "0123456789abcdef";
  if (b.size() == 0) return "-";
  std::string out;
  int nib = 0;
  int used = 0;
  for (size_t i = 0; i < b.size(); ++i) {
    nib = (nib << 1) | b.bit(i);
    if (++used == 4) {
      out += kDigits[nib];
      nib = 0;
      used = 0;
    }
  }
  if (used) out += kDigits[nib << (4 - used)];
  return out;
}

inline BitString hex_to_bits(const std::string& hex, size_t nbits) {
  BitString out;
  if (hex == "-") {
    if (nbits != 0) throw Error("book file: hex payload missing its bits");
    return out;
  }
  if (hex.size() != (nbits + 3) / 4 || nbits == 0)
    throw Error("book file: hex payload does not match its bit length");
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9')
      v = c - '0';
    else if (c >= 'a' && c <= 'f')
      v = c - 'a' + 10;
    else
      throw Error("book file: bad hex digit");
    for (int j = 3; j >= 0; --j) {
      int bit = (v >> j) & 1;
      if (out.size() < nbits)
        out.push_back(bit);
      else if (bit)
        throw Error("book file: nonzero padding bits");
    }
  }
  return out;
}

inline std::string expect_field(const std::string& token, const char* name) {
  std::string prefix = std::string(name) + "=";
  if (token.rfind(prefix, 0) != 0)
    throw Error("book file: expected '" + prefix + "...' got '" + token + "'");
  return token.substr(prefix.size());
}

}  // namespace detail

inline std::string book_to_text(const TeachingBook& book) {
  RunConfig cfg{book.f, book.trie_bound, book.caps, 1};
  std::ostringstream out;
  out << "TSB1\n"
      << config_semantic_text(cfg)
      << "digest=" << digest_hex(config_digest(cfg)) << "\n"
      << "entries=" << book.entries.size() << "\n";
  for (const TeachingBookEntry& e : book.entries) {
    out << "p=" << detail::bits_to_hex(e.program.bits())
        << " w=" << detail::bits_to_hex(e.witness.encode())
        << " delta=" << e.ts_bits << " ell=" << e.k_bits << "\n";
  }
  return out.str();
}

inline TeachingBook book_from_text(const std::string& text,
                                   const RunConfig& cfg) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "TSB1")
    throw Error("book file: not a TSB1 file");

  RunConfig file_cfg;
  std::string digest_line;
  while (std::getline(in, line)) {
    if (line.rfind("digest=", 0) == 0) {
      digest_line = line.substr(7);
      break;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("book file: malformed header line '" + line + "'");
    apply_config_override(file_cfg, line.substr(0, eq), line.substr(eq + 1));
  }
  if (digest_line.empty()) throw Error("book file: header digest missing");
  if (digest_line != digest_hex(config_digest(file_cfg)))
    throw Error("book file: header digest does not match its own keys");
  if (config_digest(file_cfg) != config_digest(cfg))
    throw Error("book file: built with a different configuration (digest " +
                digest_hex(config_digest(file_cfg)) + ", expected " +
                digest_hex(config_digest(cfg)) + ")");

  if (!std::getline(in, line) || line.rfind("entries=", 0) != 0)
    throw Error("book file: entry count missing");
  size_t n = detail::parse_config_number("entries", line.substr(8));

  TeachingBook book{{}, cfg.f, cfg.trie_bound, cfg.caps};
  for (size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw Error("book file: truncated after " + std::to_string(i) +
                  " entries");
    std::istringstream fields(line);
    std::string tp, tw, td, te;
    if (!(fields >> tp >> tw >> td >> te))
      throw Error("book file: malformed entry '" + line + "'");
    size_t delta = detail::parse_config_number(
        "delta", detail::expect_field(td, "delta"));
    size_t ell =
        detail::parse_config_number("ell", detail::expect_field(te, "ell"));
    Program p = Program::from_bits(
        detail::hex_to_bits(detail::expect_field(tp, "p"), ell),
        LangContext{0});
    ExampleSet w =
        decode_example_set(detail::hex_to_bits(detail::expect_field(tw, "w"),
                                               delta));
    if (p.bit_len() != ell || w.delta() != delta)
      throw Error("book file: entry lengths disagree with their payloads");
    book.entries.push_back({p, w, delta, ell});
  }
  return book;
}

inline void save_book(const TeachingBook& book, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("book file: cannot write '" + path + "'");
  out << book_to_text(book);
  if (!out) throw Error("book file: write to '" + path + "' failed");
}

inline TeachingBook load_book(const std::string& path, const RunConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("book file: cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return book_from_text(buf.str(), cfg);
}

}  // namespace teachsize
