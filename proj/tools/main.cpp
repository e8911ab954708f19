// Command-line surface for the teaching-size toolkit: build and persist
// teaching books, query plain and conditional teaching sizes and program
// lengths, inspect interposition sets and their pruning ranges, and run the
// curriculum searches.  Human-readable lines by default; --records switches
// to one JSON object per line for tooling.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "teachsize/book_io.hpp"
#include "teachsize/config.hpp"
#include "teachsize/curriculum.hpp"
#include "teachsize/interposition.hpp"

using nlohmann::json;
using namespace teachsize;

namespace {

struct CliState {
  RunConfig cfg;
  bool records = false;
  std::string config_path;
  std::vector<std::string> overrides;
  unsigned threads_flag = 0;
  std::chrono::steady_clock::time_point t0;

  void finalize() {
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const std::string& kv : overrides) {
      size_t eq = kv.find('=');
      if (eq == std::string::npos)
        throw CLI::ValidationError("--set expects key=value, got '" + kv +
                                   "'");
      apply_config_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (threads_flag) cfg.threads = threads_flag;
    t0 = std::chrono::steady_clock::now();
  }

  void emit(const std::string& command, const json& result,
            const std::vector<std::string>& human) const {
    if (records) {
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
      json out{{"command", command},
               {"digest", digest_hex(config_digest(cfg))},
               {"elapsed_ms", ms},
               {"result", result}};
      std::cout << out.dump() << "\n";
    } else {
      for (const std::string& line : human) std::cout << line << "\n";
    }
  }
};

std::string trimmed(const std::string& s) {
  size_t a = s.find_first_not_of(' ');
  size_t b = s.find_last_not_of(' ');
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

// Semicolon-separated program texts; the comma is an opcode, so it cannot
// separate list items.
std::vector<Program> parse_concepts(const std::string& text) {
  std::vector<Program> out;
  std::string rest = text;
  while (true) {
    size_t semi = rest.find(';');
    out.push_back(
        Program::parse(trimmed(rest.substr(0, semi)), LangContext{0}));
    if (semi == std::string::npos) break;
    rest = rest.substr(semi + 1);
  }
  return out;
}

std::vector<Program> parse_library_concepts(const std::string& text) {
  std::string t = trimmed(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']')
    throw Error("library text must look like [p1; p2], got '" + text + "'");
  std::string inner = trimmed(t.substr(1, t.size() - 2));
  if (inner.empty()) return {};
  return parse_concepts(inner);
}

std::vector<std::string> concept_labels(const std::vector<Program>& q) {
  std::vector<std::string> out;
  for (const Program& p : q)
    out.push_back(p.bit_len() == 0 ? "<empty>" : p.text());
  return out;
}

json witness_json(const ExampleSet& s) {
  return json{{"text", format_witness(s)}, {"delta", s.delta()}};
}

json curriculum_json(const CurriculumResult& r,
                     const std::vector<std::string>& labels) {
  json steps = json::array();
  for (const CurriculumStep& st : r.per_step)
    steps.push_back(json{{"concept", st.concept_program.text()},
                         {"branch", st.branch},
                         {"ts_bits", st.ts_bits},
                         {"witness", format_witness(st.witness)}});
  return json{{"curriculum", r.curriculum.text(labels)},
              {"total_ts_bits", r.total_ts_bits},
              {"steps", steps}};
}

std::vector<std::string> curriculum_lines(const CurriculumResult& r,
                                          const std::vector<std::string>&
                                              labels) {
  std::vector<std::string> out;
  out.push_back("curriculum = " + r.curriculum.text(labels));
  out.push_back("total = " + std::to_string(r.total_ts_bits) + " bits");
  for (const CurriculumStep& st : r.per_step)
    out.push_back("  branch " + std::to_string(st.branch) + ": " +
                  (st.concept_program.bit_len() == 0
                       ? std::string("<empty>")
                       : st.concept_program.text()) +
                  " via " + format_witness(st.witness) + " (" +
                  std::to_string(st.ts_bits) + " bits)");
  return out;
}

const TeachingBookEntry& entry_for(const TeachingBook& book,
                                   const Program& c) {
  Evaluator ev(Library{}, book.f, book.trie_bound, book.caps);
  const TeachingBookEntry* e = find_equivalent(book, ev, c);
  if (!e)
    throw Error("no book entry behaves like '" + c.text() + "'");
  return *e;
}

}  // namespace

int main(int argc, char** argv) {
  CliState st;
  CLI::App app{"teaching-size toolkit for the bit-tape language"};
  app.require_subcommand(1);
  app.add_option("--config", st.config_path, "key=value config file");
  app.add_option("--set", st.overrides, "override one config key (key=value)")
      ->take_all();
  app.add_option("--threads", st.threads_flag, "worker cap");
  app.add_flag("--records", st.records, "JSON-lines output");

  // book build
  auto* book_cmd = app.add_subcommand("book", "teaching-book maintenance");
  book_cmd->require_subcommand(1);
  std::string out_path = "teaching_book.tsb";
  auto* build_cmd =
      book_cmd->add_subcommand("build", "run the teacher-learner protocol "
                                        "over all witnesses within caps");
  build_cmd->add_option("--out", out_path, "where to write the TSB1 file");
  build_cmd->callback([&] {
    st.finalize();
    TeachingBook book =
        build_book(st.cfg.f, st.cfg.trie_bound, st.cfg.caps, st.cfg.threads);
    save_book(book, out_path);
    st.emit("book build",
            json{{"entries", book.entries.size()}, {"path", out_path}},
            {"entries = " + std::to_string(book.entries.size()),
             "digest = " + digest_hex(config_digest(st.cfg)),
             "written " + out_path});
  });

  // Shared option storage for the query commands.
  std::string concept_text, lib_text, book_path, witness_text, target_text;
  size_t na = 0, nb = 0, nbp = 0, count_n = 0;

  // ts
  auto* ts_cmd = app.add_subcommand("ts", "teaching size of a concept");
  ts_cmd->add_option("--concept", concept_text, "program text")->required();
  ts_cmd->add_option("--book", book_path, "TSB1 file");
  ts_cmd->callback([&] {
    st.finalize();
    Program c = Program::parse(concept_text, LangContext{0});
    std::optional<ExampleSet> w;
    if (!book_path.empty()) {
      TeachingBook book = load_book(book_path, st.cfg);
      w = cond_teaching_witness(c, {}, book);
    } else {
      Evaluator ev(Library{}, st.cfg.f, st.cfg.trie_bound, st.cfg.caps);
      w = ev.teacher(c);
    }
    if (!w) throw Error("no teaching witness within caps for '" +
                        concept_text + "'");
    st.emit("ts",
            json{{"concept", concept_text}, {"ts_bits", w->delta()},
                 {"witness", format_witness(*w)}},
            {"TS = " + std::to_string(w->delta()) + " bits",
             "witness = " + format_witness(*w)});
  });

  // cond-ts
  auto* cts_cmd =
      app.add_subcommand("cond-ts", "teaching size given taught concepts");
  cts_cmd->add_option("--concept", concept_text, "program text")->required();
  cts_cmd->add_option("--lib", lib_text, "taught concepts, e.g. \"[+.; .]\"")
      ->required();
  cts_cmd->add_option("--book", book_path, "TSB1 file")->required();
  cts_cmd->callback([&] {
    st.finalize();
    TeachingBook book = load_book(book_path, st.cfg);
    Program c = Program::parse(concept_text, LangContext{0});
    std::vector<Program> given = parse_library_concepts(lib_text);
    std::optional<ExampleSet> w = cond_teaching_witness(c, given, book);
    if (!w) throw Error("no teaching witness within caps for '" +
                        concept_text + "' given " + lib_text);
    st.emit("cond-ts",
            json{{"concept", concept_text}, {"lib", lib_text},
                 {"ts_bits", w->delta()}, {"witness", format_witness(*w)}},
            {"TS(c|B) = " + std::to_string(w->delta()) + " bits",
             "witness = " + format_witness(*w)});
  });

  // k
  auto* k_cmd =
      app.add_subcommand("k", "shortest equivalent program, in bits");
  k_cmd->add_option("--concept", concept_text, "program text")->required();
  k_cmd->add_option("--book", book_path, "TSB1 file");
  k_cmd->callback([&] {
    st.finalize();
    Program c = Program::parse(concept_text, LangContext{0});
    std::optional<size_t> k;
    if (!book_path.empty()) {
      TeachingBook book = load_book(book_path, st.cfg);
      k = cond_k_len(c, {}, book);
    } else {
      Evaluator ev(Library{}, st.cfg.f, st.cfg.trie_bound, st.cfg.caps);
      k = ev.k_len(c);
    }
    if (!k) throw Error("no equivalent program within caps for '" +
                        concept_text + "'");
    st.emit("k", json{{"concept", concept_text}, {"k_bits", *k}},
            {"K = " + std::to_string(*k) + " bits"});
  });

  // cond-k
  auto* ck_cmd = app.add_subcommand(
      "cond-k", "shortest equivalent program given taught concepts");
  ck_cmd->add_option("--concept", concept_text, "program text")->required();
  ck_cmd->add_option("--lib", lib_text, "taught concepts")->required();
  ck_cmd->add_option("--book", book_path, "TSB1 file")->required();
  ck_cmd->callback([&] {
    st.finalize();
    TeachingBook book = load_book(book_path, st.cfg);
    Program c = Program::parse(concept_text, LangContext{0});
    std::vector<Program> given = parse_library_concepts(lib_text);
    std::optional<size_t> k = cond_k_len(c, given, book);
    if (!k) throw Error("no equivalent program within caps for '" +
                        concept_text + "' given " + lib_text);
    st.emit("cond-k",
            json{{"concept", concept_text}, {"lib", lib_text},
                 {"k_bits", *k}},
            {"K(c|B) = " + std::to_string(*k) + " bits"});
  });

  // interpose
  auto* ip_cmd = app.add_subcommand(
      "interpose", "programs preceding a target that fit its witness");
  ip_cmd->add_option("--witness", witness_text, "witness text")->required();
  ip_cmd->add_option("--target", target_text,
                     "target program, in library syntax")
      ->required();
  ip_cmd->add_option("--lib", lib_text, "taught concepts")->required();
  ip_cmd->add_option("--book", book_path, "TSB1 file")->required();
  ip_cmd->callback([&] {
    st.finalize();
    TeachingBook book = load_book(book_path, st.cfg);
    Library lib = make_library(book, parse_library_concepts(lib_text));
    Program target = Program::parse(target_text, lib.ctx());
    ExampleSet w = parse_witness(witness_text);
    InterpositionReport rep =
        interposition_set(w, target, lib, book.f, book.trie_bound, book.caps);
    json members = json::array();
    std::vector<std::string> human;
    human.push_back("members = " + std::to_string(rep.members.size()));
    for (const Program& m : rep.members) {
      members.push_back(m.text());
      human.push_back("  " + m.text());
    }
    human.push_back(rep.ranges_validated
                        ? "ranges validated, bound " +
                              std::to_string(rep.bound)
                        : "ranges not applicable");
    human.push_back("pruned fraction = " +
                    std::to_string(rep.pruned_fraction));
    st.emit("interpose",
            json{{"members", members},
                 {"ranges_validated", rep.ranges_validated},
                 {"bound", rep.bound},
                 {"pruned_fraction", rep.pruned_fraction}},
            human);
  });

  // ranges
  auto* rg_cmd = app.add_subcommand(
      "ranges", "instruction-count window for single-primitive interposers");
  rg_cmd->add_option("--na", na, "primitive instruction count")->required();
  rg_cmd->add_option("--nb", nb, "base learner instruction count")
      ->required();
  rg_cmd->add_option("--nbp", nbp, "target instruction count")->required();
  rg_cmd->callback([&] {
    st.finalize();
    if (is_interposition_impossible(na, nb, nbp)) {
      st.emit("ranges", json{{"empty", true}, {"impossible", true}},
              {"empty (interposition impossible)"});
      return;
    }
    SCRanges r = sc_ranges_single(na, nb, nbp);
    if (r.empty) {
      st.emit("ranges", json{{"empty", true}, {"impossible", false}},
              {"empty"});
      return;
    }
    json rows = json::array();
    std::vector<std::string> human;
    human.push_back("i in [" + std::to_string(r.i_min) + ", " +
                    std::to_string(r.i_max) + "]");
    for (size_t i = r.i_min; i <= r.i_max; ++i) {
      const auto& jb = r.j_bounds[i - r.i_min];
      rows.push_back(json{{"i", i}, {"j_min", jb.first}, {"j_max", jb.second}});
      human.push_back("  i=" + std::to_string(i) + ": j in [" +
                      std::to_string(jb.first) + ", " +
                      std::to_string(jb.second) + "]");
    }
    human.push_back("bound = " + std::to_string(r.bound));
    st.emit("ranges",
            json{{"empty", false}, {"i_min", r.i_min}, {"i_max", r.i_max},
                 {"rows", rows}, {"bound", r.bound}},
            human);
  });

  // isafe
  auto* is_cmd = app.add_subcommand(
      "isafe", "augment a witness until no interposer survives");
  is_cmd->add_option("--witness", witness_text, "witness text")->required();
  is_cmd->add_option("--target", target_text,
                     "target program, in library syntax")
      ->required();
  is_cmd->add_option("--lib", lib_text, "taught concepts")->required();
  is_cmd->add_option("--book", book_path, "TSB1 file")->required();
  is_cmd->callback([&] {
    st.finalize();
    TeachingBook book = load_book(book_path, st.cfg);
    Library lib = make_library(book, parse_library_concepts(lib_text));
    Program target = Program::parse(target_text, lib.ctx());
    ExampleSet w = parse_witness(witness_text);
    ExampleSet safe =
        isafe_augment(w, target, lib, book.f, book.trie_bound, book.caps);
    st.emit("isafe",
            json{{"witness", witness_json(safe)},
                 {"delta_before", w.delta()}},
            {"augmented witness = " + format_witness(safe),
             "delta " + std::to_string(w.delta()) + " -> " +
                 std::to_string(safe.delta()) + " bits"});
  });

  // demo-interposition
  auto* dm_cmd = app.add_subcommand(
      "demo-interposition",
      "build a library that strictly raises a concept's teaching size");
  dm_cmd->add_option("--concept", concept_text, "program text")->required();
  dm_cmd->add_option("--book", book_path, "TSB1 file")->required();
  dm_cmd->callback([&] {
    st.finalize();
    TeachingBook book = load_book(book_path, st.cfg);
    Program c = Program::parse(concept_text, LangContext{0});
    const TeachingBookEntry& e = entry_for(book, c);
    Library lib =
        interposing_library(e, book.f, book.trie_bound, book.caps);
    Evaluator ev(lib, book.f, book.trie_bound, book.caps);
    std::optional<ExampleSet> after = ev.teacher(e.program);
    std::string after_text =
        after ? std::to_string(after->delta()) + " bits" : "above the caps";
    st.emit("demo-interposition",
            json{{"concept", concept_text},
                 {"interposer", lib.prims[0].text()},
                 {"ts_before", e.ts_bits},
                 {"ts_after",
                  after ? json(after->delta()) : json(nullptr)}},
            {"interposer = " + lib.prims[0].text(),
             "TS before = " + std::to_string(e.ts_bits) + " bits",
             "TS after  = " + after_text});
  });

  // scan-nonmono
  auto* sn_cmd = app.add_subcommand(
      "scan-nonmono",
      "book pairs where complexity order and teaching order disagree");
  sn_cmd->add_option("--book", book_path, "TSB1 file")->required();
  sn_cmd->callback([&] {
    st.finalize();
    TeachingBook book = load_book(book_path, st.cfg);
    std::vector<NonmonoFinding> findings = nonmonotonicity_scan(book);
    json rows = json::array();
    std::vector<std::string> human;
    for (const NonmonoFinding& f : findings) {
      rows.push_back(json{{"a", f.a.text()}, {"b", f.b.text()},
                          {"k_ab", f.k_ab}, {"k_ba", f.k_ba},
                          {"ts_ab", f.ts_ab}, {"ts_ba", f.ts_ba}});
      human.push_back("'" + f.a.text() + "' vs '" + f.b.text() + "': K " +
                      std::to_string(f.k_ab) + " < " +
                      std::to_string(f.k_ba) + " but TS " +
                      std::to_string(f.ts_ab) + " > " +
                      std::to_string(f.ts_ba));
    }
    if (human.empty()) human.push_back("no reversals found");
    st.emit("scan-nonmono", json{{"findings", rows}}, human);
  });

  // curricula count | list
  auto* cur_cmd = app.add_subcommand("curricula", "curriculum enumeration");
  cur_cmd->require_subcommand(1);
  auto* cc_cmd = cur_cmd->add_subcommand("count", "how many curricula");
  cc_cmd->add_option("--n", count_n, "number of concepts")->required();
  cc_cmd->callback([&] {
    st.finalize();
    unsigned long long c = curriculum_count(count_n);
    st.emit("curricula count", json{{"n", count_n}, {"count", c}},
            {std::to_string(c)});
  });
  auto* cl_cmd = cur_cmd->add_subcommand("list", "print every curriculum");
  cl_cmd->add_option("--n", count_n, "number of concepts")->required();
  cl_cmd->callback([&] {
    st.finalize();
    std::vector<std::string> labels;
    for (size_t i = 0; i < count_n; ++i)
      labels.push_back(std::string(1, char('a' + (i % 26))));
    json rows = json::array();
    std::vector<std::string> human;
    for (const Curriculum& pi : enumerate_curricula(count_n)) {
      rows.push_back(pi.text(labels));
      human.push_back(pi.text(labels));
    }
    st.emit("curricula list", json{{"curricula", rows}}, human);
  });

  // isearch
  auto* se_cmd = app.add_subcommand(
      "isearch", "minimal-total-teaching-size curriculum");
  se_cmd->add_option("--concepts", concept_text,
                     "semicolon-separated program texts")
      ->required();
  se_cmd->add_option("--book", book_path, "TSB1 file")->required();
  se_cmd->callback([&] {
    st.finalize();
    TeachingBook book = load_book(book_path, st.cfg);
    std::vector<Program> q = parse_concepts(concept_text);
    CurriculumResult r = i_search(q, book, st.cfg.caps.h, st.cfg.threads);
    std::vector<std::string> labels = concept_labels(q);
    st.emit("isearch", curriculum_json(r, labels),
            curriculum_lines(r, labels));
  });

  // greedy
  auto* gr_cmd = app.add_subcommand(
      "greedy", "single-branch curriculum by largest local saving");
  gr_cmd->add_option("--concepts", concept_text,
                     "semicolon-separated program texts")
      ->required();
  gr_cmd->add_option("--book", book_path, "TSB1 file")->required();
  gr_cmd->callback([&] {
    st.finalize();
    TeachingBook book = load_book(book_path, st.cfg);
    std::vector<Program> q = parse_concepts(concept_text);
    CurriculumResult r = greedy_curriculum(q, book);
    std::vector<std::string> labels = concept_labels(q);
    st.emit("greedy", curriculum_json(r, labels),
            curriculum_lines(r, labels));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
