// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "fixtures.hpp"
#include "oracles/syllable_oracle.hpp"
#include "tibtext/tibtext.hpp"

namespace fs = std::filesystem;
using namespace tibtext;
using tibtext::test::resources;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) detail << "; ";
      ok = false;
      detail << what;
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& name, double time_limit, const std::function<void(Outcome&)>& body) {
  Outcome out;
  auto t0 = Clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.require(false, std::string("exception: ") + e.what());
  }
  double t = seconds_since(t0);
  if (time_limit > 0 && t > time_limit) out.require(false, "over time limit");
  failures += !out.ok;
  std::printf("%s %2d %-28s %8.2fs  %s\n", out.ok ? "PASS" : "FAIL", id, name.c_str(), t, out.detail.str().c_str());
  std::fflush(stdout);
}

std::string norm(std::string_view s) {
  const auto& r = resources();
  return stem_text(normalized_stem(parse_syllable(tokenize_letters(s), r.tables), r.rules));
}

std::vector<std::uint64_t> char_keys(const Document& d) {
  std::vector<std::uint64_t> k;
  for (const auto& s : d.surface)
    for (unsigned char c : s) k.push_back(c);
  return k;
}

std::string slurp(const fs::path& p) { return read_file(p.string()); }

int run(const std::string& args) {
  std::string cmd = std::string(TIBTEXT_CLI) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

int main() {
  const Resources& r = resources();
  AlignParams defaults;

  criterion(1, "stemmer grouping", 1.0, [&](Outcome& o) {
    std::size_t pass = 0;
    auto check = [&](bool c, const std::string& what) {
      pass += c;
      o.require(c, what);
    };
    check(norm("sgrub") == norm("bsgrubs") && norm("sgrub") == norm("bsgrub") && norm("sgrub") == norm("sgrubs"),
          "sgrub group");
    check(norm("grub") == norm("'grub"), "grub group");
    check(norm("grub") != norm("sgrub"), "groups distinct");
    check(norm("sogs") == norm("stsogs"), "sogs/stsogs");
    check(norm("brtag") == "rtog", "brtag");
    check(norm("brtags") == "rtog", "brtags");
    check(norm("dpyad") == norm("dpyod"), "dpyad");
    check(norm("dpyod") == "pyod", "dpyod stem");
    o.detail << pass << "/8 checks";
  });

  criterion(2, "parser soundness", 30.0, [&](Outcome& o) {
    auto all = enumerate_valid_syllables(r.tables, SIZE_MAX);
    o.require(all.size() >= 10000, "fewer than 10000 syllables");
    std::size_t oracle_ok = 0, parse_ok = 0, round_trip = 0;
    std::set<std::string> spellings;
    for (const auto& t : all) {
      std::string text = render_syllable(t, r.tables);
      spellings.insert(text);
      LetterSequence seq = tokenize_letters(text);
      auto found = oracle::conventional(r.tables, seq.letters, seq.has_separator_after(0),
                                        oracle::all_assignments(r.tables, seq.letters));
      oracle_ok += found.size() == 1 && found.front() == t;
      SyllableTuple parsed = parse_syllable(seq, r.tables);
      parse_ok += parsed == t;
      round_trip += render_syllable(parsed, r.tables) == text;
    }
    o.require(spellings.size() == all.size(), "duplicate spellings");
    o.require(oracle_ok == all.size(), "oracle disagreement");
    o.require(parse_ok == all.size(), "parser disagreement");
    o.require(round_trip == all.size(), "round trip");
    o.detail << all.size() << " syllables, oracle " << oracle_ok << ", parser " << parse_ok << ", round trip "
             << round_trip;
  });

  criterion(3, "alignment vs oracle", 120.0, [&](Outcome& o) {
    std::size_t pairs = 0, outputs = 0, sound = 0, maximal = 0, recalled = 0;
    for (std::uint64_t seed = 101; seed <= 125; ++seed) {
      auto x = test::documents_of(make_gold_fixture(test::small_fixture_options(seed), r), r);
      if (x.a.size() * x.b.size() > 100000) {
        o.require(false, "seed " + std::to_string(seed) + " exceeds the oracle guard");
        continue;
      }
      ++pairs;
      auto out = align_pair(x.a, x.b, defaults, r.costs);
      for (const auto& q : out) {
        ++outputs;
        sound += oracle_accepts(x.a.stems, x.b.stems, defaults, r.costs, q.a, q.b);
      }
      for (const auto& m : oracle_align(x.a, x.b, defaults, r.costs)) {
        ++maximal;
        recalled += test::covered(out, m, 0.9);
      }
    }
    const double recall = maximal ? double(recalled) / double(maximal) : 0.0;
    o.require(pairs == 25, "not 25 pairs");
    o.require(sound == outputs, "unsound output");
    o.require(recall >= 0.95, "recall below 0.95");
    o.detail << pairs << " pairs, sound " << sound << "/" << outputs << ", recall " << recalled << "/" << maximal;
  });

  criterion(4, "planted-quote recovery", 60.0, [&](Outcome& o) {
    FixtureOptions opt;
    auto rates = opt.rates.as_array();
    o.require(rates[0] + rates[1] + rates[2] <= 0.20 && rates[3] + rates[4] <= 0.05, "mutation rates out of range");
    auto x = test::documents_of(make_gold_fixture(opt, r), r);
    auto out = align_pair(x.a, x.b, defaults, r.costs);
    auto ev = eval_alignment(as_predictions(out, x.a.id, x.b.id), x.fixture.gold);
    o.require(x.fixture.gold.size() == 24, "gold size");
    o.require(ev.recall >= 0.95, "recall");
    o.require(ev.precision >= 0.90, "precision");
    o.detail << "P " << ev.precision << " R " << ev.recall << " (" << out.size() << " passages)";
  });

  criterion(5, "chunk equivalence", 60.0, [&](Outcome& o) {
    auto x = test::documents_of(make_gold_fixture(test::large_fixture_options(7, 10000), r), r);
    o.require(x.a.size() >= 10000 && x.b.size() >= 10000, "documents under 10k syllables");
    auto ref = align_pair(x.a, x.b, defaults, r.costs);
    for (std::size_t w : {1, 2, 8})
      o.require(align_chunked(x.a, x.b, defaults, r.costs, ChunkOptions{2000, 400, w}) == ref,
                std::to_string(w) + " workers differ");
    o.detail << x.a.size() << "x" << x.b.size() << ", " << ref.size() << " passages";
  });

  criterion(6, "stem-level speedup", 0, [&](Outcome& o) {
    auto x = test::documents_of(make_gold_fixture(test::large_fixture_options(6, 5000), r), r);
    auto t0 = Clock::now();
    auto stem_out = align_pair(x.a, x.b, defaults, r.costs);
    double t_stem = seconds_since(t0);
    auto ca = char_keys(x.a), cb = char_keys(x.b);
    // Same minimum passage measured in characters.
    AlignParams pc = defaults;
    pc.min_length = static_cast<std::size_t>(defaults.min_length * double(ca.size()) / double(x.a.size()));
    t0 = Clock::now();
    auto char_out = align_keys(ca, cb, pc);
    double t_char = seconds_since(t0);
    const double ratio = t_char / std::max(t_stem, 1e-6);
    o.require(ratio >= 5.0, "speedup below 5x");
    o.detail << x.a.size() << "x" << x.b.size() << " syllables, stem " << t_stem << "s, char " << t_char << "s, "
             << ratio << "x";
  });

  criterion(7, "variant statistics", 0, [&](Outcome& o) {
    // Seed 1 is the pinned fixture; the other seeds are reported only. They
    // can differ through chance matches in the flanking text or a substitute
    // that repeats its neighbour.
    std::size_t exact = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      FixtureOptions opt;
      opt.seed = seed;
      opt.n_pairs = 1;
      opt.min_plant = opt.max_plant = 60;
      opt.particle_rate = 0.35;
      opt.rates = MutationRates::zero();
      opt.rates.particle_swap = 10.0 / 60.0;
      opt.rates.substitution = 3.0 / 60.0;
      auto x = test::documents_of(make_gold_fixture(opt, r), r);
      std::array<std::size_t, 5> logged{};
      for (const auto& rec : x.fixture.log) ++logged[static_cast<std::size_t>(rec.type)];
      auto out = align_pair(x.a, x.b, defaults, r.costs);
      const auto& c = replacement_stats(out, x.a, x.b).classes.counts;
      const std::size_t ns = c[std::size_t(VariantClass::non_substantial)];
      const std::size_t sub = c[std::size_t(VariantClass::substantial_substitution)];
      const std::size_t gap = c[std::size_t(VariantClass::substantial_gap)];
      const bool spans = out.size() == 1 && out[0].a == x.fixture.gold[0].a && out[0].b == x.fixture.gold[0].b;
      const bool ok = logged == std::array<std::size_t, 5>{10, 0, 0, 3, 0} && spans && ns == 10 && sub == 3 && gap == 0;
      exact += ok;
      if (seed == 1) {
        o.require(logged == std::array<std::size_t, 5>{10, 0, 0, 3, 0}, "plant log is not 10 swaps + 3 substitutions");
        o.require(spans, "passage spans differ from gold");
        o.require(ns == 10 && sub == 3 && gap == 0, "tallies differ from log");
        o.detail << "seed 1 tally " << ns << "/" << sub << "/" << gap << " (non-substantial/substitution/gap); ";
      }
    }
    o.detail << exact << "/10 seeds match exactly";
  });

  criterion(8, "perceptron", 0, [&](Outcome& o) {
    std::vector<LabeledExample> toy;
    Rng rng(3);
    while (toy.size() < 60) {
      double x = rng.unit(), y = rng.unit();
      if (std::abs(x - y) < 0.05) continue;
      toy.push_back({{{"x", x}, {"y", y}}, x > y ? "pos" : "neg"});
    }
    auto m = train_perceptron(toy);
    double train_acc = evaluate(m, toy).accuracy;
    o.require(train_acc == 1.0, "toy training accuracy");
    o.require(m.meta["epochs_run"].get<std::size_t>() <= 100, "toy epochs");

    auto examples = [&](std::uint64_t seed) {
      std::vector<LabeledExample> out;
      for (const auto& d : make_translationese_corpus(r, seed, 50, 400))
        out.push_back({extract_style_features(make_document(d.id, d.text, r), r), d.label});
      return out;
    };
    auto style = train_perceptron(examples(11));
    double holdout = evaluate(style, examples(12)).accuracy;
    o.require(holdout >= 0.9, "holdout accuracy");
    o.detail << "toy " << train_acc << " in " << m.meta["epochs_run"] << " epochs, translationese holdout " << holdout;
  });

  criterion(9, "segmenter", 0, [&](Outcome& o) {
    auto corpus = make_lexicon_corpus(r.tables, 1, 50, 400);
    std::vector<SegmentedSentence> train, test;
    for (std::size_t k = 0; k < corpus.lines.size(); ++k) {
      std::vector<std::string> syl;
      SegmentedSentence s;
      read_segmented_line(corpus.lines[k], syl, s.tags);
      for (const auto& x : syl) s.syllables.push_back(analyze_syllable(x, r.tables));
      (k % 4 == 3 ? test : train).push_back(std::move(s));
    }
    SegmenterOptions opt;
    auto m = train_segmenter(train, opt, &r.particles, &r.tables);
    std::vector<Segmentation> gold, pred;
    for (const auto& s : test) {
      gold.push_back(s.tags);
      pred.push_back(segment(m, s.syllables, &r.particles, &r.tables));
    }
    auto f = boundary_f1(gold, pred);
    bool same = serialize_model(m) == serialize_model(train_segmenter(train, opt, &r.particles, &r.tables));
    o.require(f.f1 >= 0.9, "held-out F1");
    o.require(same, "model differs between runs");
    o.detail << "held-out F1 " << f.f1 << " on " << test.size() << " sentences, deterministic " << same;
  });

  criterion(10, "CLI determinism", 0, [&](Outcome& o) {
    const fs::path dir = fs::path(TIBTEXT_ACCEPT_DIR);
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto p = [&](const std::string& name) { return (dir / name).string(); };
    std::size_t compared = 0;
    auto same = [&](const std::string& x, const std::string& y) {
      ++compared;
      o.require(slurp(x) == slurp(y), x + " != " + y);
    };
    o.require(run("fixture make-gold --seed 5 --out-dir " + p("f1")) == 0, "make-gold");
    o.require(run("fixture make-gold --seed 5 --out-dir " + p("f2")) == 0, "make-gold again");
    for (auto f : {"fixture_a.txt", "fixture_b.txt", "gold.jsonl", "plants.jsonl"})
      same(p("f1/") + f, p("f2/") + f);
    const std::string docs = " --a " + p("f1/fixture_a.txt") + " --b " + p("f1/fixture_b.txt");
    o.require(run("align run" + docs + " --out " + p("single.jsonl")) == 0, "align run");
    for (int w : {1, 2, 8}) {
      std::string out = p("chunked" + std::to_string(w) + ".jsonl");
      o.require(run("align run" + docs + " --chunk-size 800 --overlap 200 --workers " + std::to_string(w) +
                    " --out " + out + " --stats-out " + out + ".stats") == 0,
                "align run chunked");
      same(p("single.jsonl"), out);
      same(p("chunked1.jsonl.stats"), out + ".stats");
    }
    o.require(run("fixture make-lexicon --seed 2 --out " + p("lex.txt")) == 0, "make-lexicon");
    for (auto m : {"seg1.json", "seg2.json"})
      o.require(run("segment train --seed 4 --corpus " + p("lex.txt") + " --model-out " + p(m)) == 0, "segment train");
    same(p("seg1.json"), p("seg2.json"));
    o.require(run("fixture make-stylo --seed 3 --docs-per-class 10 --length 200 --out-dir " + p("sty")) == 0,
              "make-stylo");
    for (auto m : {"sty1.json", "sty2.json"})
      o.require(run("stylo train --seed 4 --ngram-min 1 --ngram-max 2 --labels " + p("sty/labels.txt") +
                    " --model-out " + p(m)) == 0,
                "stylo train");
    same(p("sty1.json"), p("sty2.json"));
    o.require(run("align run --a " + p("missing.txt") + " --b " + p("missing.txt")) == 2, "usage exit code");
    o.detail << compared << " output pairs byte-identical";
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
