#pragma once

// Run configuration: the complexity budget f, the witness time envelope, and
// the search caps, readable from a plain key=value file with overrides
// applied on top.  Everything except the worker count is semantic: it
// changes teaching sizes, so it is digested into persisted books and a
// mismatch refuses to load.  The worker count only changes scheduling and
// deliberately stays out of the digest.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "teachsize/evaluator.hpp"

namespace teachsize {

struct RunConfig {
  ComplexityFunction f;
  TrieBoundParams trie_bound;
  Caps caps;
  unsigned threads = 1;
};

namespace detail {

inline uint64_t parse_config_number(const std::string& key,
                                    const std::string& value) {
  if (value.empty())
    throw Error("config: empty value for '" + key + "'");
  uint64_t v = 0;
  for (char c : value) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw Error("config: value for '" + key + "' is not a number: '" +
                  value + "'");
    uint64_t next = v * 10 + uint64_t(c - '0');
    if (next < v) throw Error("config: value for '" + key + "' overflows");
    v = next;
  }
  return v;
}

}  // namespace detail

inline void apply_config_override(RunConfig& cfg, const std::string& key,
                                  const std::string& value) {
  uint64_t v = detail::parse_config_number(key, value);
  auto positive = [&](const char* what) {
    if (v == 0)
      throw Error(std::string("config: ") + what + " must be positive");
    return v;
  };
  if (key == "f.a") {
    cfg.f.a = v;
  } else if (key == "f.b") {
    cfg.f.b = v;
  } else if (key == "rho") {
    cfg.trie_bound.rho = v;
  } else if (key == "kappa") {
    cfg.trie_bound.kappa = v;
  } else if (key == "max_witness_bits") {
    cfg.caps.max_witness_bits = positive("max_witness_bits");
  } else if (key == "max_prog_bits") {
    cfg.caps.max_prog_bits = positive("max_prog_bits");
  } else if (key == "h_in") {
    cfg.caps.h_in = positive("h_in");
  } else if (key == "h") {
    cfg.caps.h = v;  // zero means: derive from the teaching sizes at hand
  } else if (key == "input_len_cap") {
    cfg.caps.input_len_cap = positive("input_len_cap");
  } else if (key == "threads") {
    cfg.threads = unsigned(positive("threads"));
  } else {
    throw Error("config: unknown key '" + key + "'");
  }
}

// key=value per line; blank lines and #-comments allowed.
inline RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  auto trim = [](std::string s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config line " + std::to_string(lineno) +
                  ": expected key=value");
    apply_config_override(cfg, trim(line.substr(0, eq)),
                          trim(line.substr(eq + 1)));
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

// The semantic keys in their documented order; this exact text is what the
// book digest covers.
inline std::string config_semantic_text(const RunConfig& cfg) {
  std::ostringstream out;
  out << "f.a=" << cfg.f.a << "\n"
      << "f.b=" << cfg.f.b << "\n"
      << "rho=" << cfg.trie_bound.rho << "\n"
      << "kappa=" << cfg.trie_bound.kappa << "\n"
      << "max_witness_bits=" << cfg.caps.max_witness_bits << "\n"
      << "max_prog_bits=" << cfg.caps.max_prog_bits << "\n"
      << "h_in=" << cfg.caps.h_in << "\n"
      << "h=" << cfg.caps.h << "\n"
      << "input_len_cap=" << cfg.caps.input_len_cap << "\n";
  return out.str();
}

inline std::string config_text(const RunConfig& cfg) {
  return config_semantic_text(cfg) + "threads=" + std::to_string(cfg.threads) +
         "\n";
}

// FNV-1a over the canonical semantic text.
inline uint64_t config_digest(const RunConfig& cfg) {
  uint64_t h = 14695981039346656037ull;
  for (char c : config_semantic_text(cfg)) {
    h ^= uint64_t(static_cast<unsigned char>(c));
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string digest_hex(uint64_t digest) {
  static const char* kDigits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kDigits[digest & 0xf];
    digest >>= 4;
  }
  return out;
}

}  // namespace teachsize
