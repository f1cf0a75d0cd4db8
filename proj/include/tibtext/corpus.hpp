#pragma once

// Document loading, gold-standard passage sets, alignment scoring and the
// synthetic planted-quote fixture.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tibtext/align.hpp"
#include "tibtext/cleaning.hpp"
#include "tibtext/document.hpp"
#include "tibtext/resources.hpp"
#include "tibtext/util.hpp"

namespace tibtext {

// Reads already-cleaned files; the document id is the file name without
// extension.
inline std::vector<Document> load_documents(const std::vector<std::string>& paths, const Resources& res) {
  std::vector<Document> docs;
  std::set<std::string> seen;
  for (const auto& path : paths) {
    std::string id = std::filesystem::path(path).stem().string();
    if (!seen.insert(id).second) throw Error(Errc::duplicate_doc_id, "document id '" + id + "' appears twice");
    docs.push_back(make_document(id, read_file(path), res));
  }
  return docs;
}

// ---------------------------------------------------------------------------
// Gold pairs

struct GoldPair {
  std::string doc_a;
  Span a;
  std::string doc_b;
  Span b;
  std::string note;

  bool operator==(const GoldPair&) const = default;
};

inline constexpr int kGoldFormatVersion = 1;

// JSON lines: a header {"format":"tibtext-gold","version":1}, then one
// {"doc_a","a_span":[start,end],"doc_b","b_span":[start,end],"note"} per
// pair, spans inclusive syllable indices.
inline std::string write_gold(const std::vector<GoldPair>& pairs) {
  std::string out = nlohmann::json{{"format", "tibtext-gold"}, {"version", kGoldFormatVersion}}.dump() + "\n";
  for (const auto& g : pairs) {
    nlohmann::ordered_json j;
    j["doc_a"] = g.doc_a;
    j["a_span"] = {g.a.start, g.a.end};
    j["doc_b"] = g.doc_b;
    j["b_span"] = {g.b.start, g.b.end};
    j["note"] = g.note;
    out += j.dump() + "\n";
  }
  return out;
}

inline std::vector<GoldPair> read_gold(std::string_view content) {
  std::vector<GoldPair> out;
  std::size_t line_no = 0;
  bool header = false;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    auto bad = [&](const std::string& why) {
      return Error(Errc::bad_format, "gold line " + std::to_string(line_no) + ": " + why);
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw bad(e.what());
    }
    if (!header) {
      if (j.value("format", "") != "tibtext-gold") throw bad("missing gold header");
      if (j.value("version", 0) != kGoldFormatVersion) throw bad("unsupported gold version");
      header = true;
      continue;
    }
    try {
      GoldPair g;
      g.doc_a = j.at("doc_a").get<std::string>();
      g.doc_b = j.at("doc_b").get<std::string>();
      auto sa = j.at("a_span"), sb = j.at("b_span");
      if (sa.size() != 2 || sb.size() != 2) throw bad("spans must be [start, end]");
      g.a = {sa[0].get<std::size_t>(), sa[1].get<std::size_t>()};
      g.b = {sb[0].get<std::size_t>(), sb[1].get<std::size_t>()};
      g.note = j.value("note", "");
      if (g.a.end < g.a.start || g.b.end < g.b.start) throw bad("span end precedes start");
      out.push_back(std::move(g));
    } catch (const nlohmann::json::exception& e) {
      throw bad(e.what());
    }
  }
  if (!header) throw Error(Errc::bad_format, "gold file has no header");
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

struct PredictedPassage {
  std::string doc_a;
  Span a;
  std::string doc_b;
  Span b;
  double score = 0.0;
};

struct EvalResult {
  double precision = 1.0;
  double recall = 0.0;
  std::size_t correct_predictions = 0;
  std::size_t predictions = 0;
  std::size_t gold = 0;
  std::vector<std::pair<std::size_t, std::size_t>> matched;  // (gold index, prediction index)
};

// Shared length over the longer of the two spans.
inline double span_overlap(const Span& x, const Span& y) {
  return double(overlap_length(x, y)) / double(std::max(x.length(), y.length()));
}

inline bool passage_matches(const PredictedPassage& p, const GoldPair& g, double threshold) {
  if (p.doc_a == g.doc_a && p.doc_b == g.doc_b && span_overlap(p.a, g.a) >= threshold &&
      span_overlap(p.b, g.b) >= threshold)
    return true;
  return p.doc_a == g.doc_b && p.doc_b == g.doc_a && span_overlap(p.a, g.b) >= threshold &&
         span_overlap(p.b, g.a) >= threshold;
}

// Predictions are visited by descending score and each takes the first
// still-unmatched gold pair it overlaps. With no predictions precision is 1.
inline EvalResult eval_alignment(const std::vector<PredictedPassage>& predicted, const std::vector<GoldPair>& gold,
                                 double threshold = 0.9) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw Error(Errc::invalid_argument, "overlap threshold must lie in (0, 1]");
  EvalResult r;
  r.predictions = predicted.size();
  r.gold = gold.size();
  std::vector<std::size_t> order(predicted.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return predicted[x].score > predicted[y].score; });
  std::vector<char> gold_used(gold.size(), 0);
  for (std::size_t k : order) {
    bool correct = false;
    for (std::size_t g = 0; g < gold.size(); ++g) {
      if (!passage_matches(predicted[k], gold[g], threshold)) continue;
      correct = true;
      if (!gold_used[g]) {
        gold_used[g] = 1;
        r.matched.emplace_back(g, k);
        break;
      }
    }
    r.correct_predictions += correct;
  }
  std::sort(r.matched.begin(), r.matched.end());
  r.precision = predicted.empty() ? 1.0 : double(r.correct_predictions) / double(predicted.size());
  r.recall = gold.empty() ? 1.0 : double(r.matched.size()) / double(gold.size());
  return r;
}

inline std::vector<PredictedPassage> as_predictions(const std::vector<ParallelPassage>& passages,
                                                    const std::string& doc_a, const std::string& doc_b) {
  std::vector<PredictedPassage> out;
  for (const auto& p : passages) out.push_back({doc_a, p.a, doc_b, p.b, p.score});
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic planted-quote fixture

enum class MutationType : std::uint8_t { particle_swap, orthographic, inflectional, substitution, gap };
inline constexpr std::array<std::string_view, 5> kMutationNames = {"particle_swap", "orthographic", "inflectional",
                                                                   "substitution", "gap"};

// Fraction of each planted passage's syllables mutated per type. The first
// three are non-substantial variants, the last two substantial.
struct MutationRates {
  double particle_swap = 0.08;
  double orthographic = 0.06;
  double inflectional = 0.06;
  double substitution = 0.03;
  double gap = 0.02;

  std::array<double, 5> as_array() const { return {particle_swap, orthographic, inflectional, substitution, gap}; }
  static MutationRates zero() { return {0, 0, 0, 0, 0}; }
};

struct FixtureOptions {
  std::uint64_t seed = 1;
  std::size_t n_pairs = 24;
  MutationRates rates;
  std::size_t min_plant = 30, max_plant = 60;
  std::size_t min_filler = 60, max_filler = 160;  // background between plants
  std::size_t vocabulary = 1500;
  double particle_rate = 0.15;
  double zipf_exponent = 0.7;
};

struct PlantRecord {
  std::size_t pair = 0;
  MutationType type = MutationType::substitution;
  std::optional<std::size_t> a_pos;  // absent for an insertion into b
  std::optional<std::size_t> b_pos;  // absent for a deletion from b
  std::string from, to;
};

struct GoldFixture {
  std::string id_a = "fixture_a", id_b = "fixture_b";
  std::string text_a, text_b;
  std::vector<std::string> syllables_a, syllables_b;
  std::vector<GoldPair> gold;
  std::vector<PlantRecord> log;
};

namespace detail {

class SyllableModel {
 public:
  SyllableModel(const FixtureOptions& o, const Resources& res, Rng& rng) : res_(res), rng_(rng), o_(o) {
    auto all = enumerate_valid_syllables(res.tables, SIZE_MAX);
    std::vector<std::string> pool;
    for (const auto& t : all) {
      std::string s = render_syllable(t, res.tables);
      if (res.particles.contains(s) || res.function_words.contains(s) || res.loanwords.contains(s)) continue;
      native_.push_back(s);
      tuple_[s] = t;
      by_norm_[normalized_stem(t, res.rules).key()].push_back(s);
      by_raw_[extract_stem(t).key()].push_back(s);
      if (!t.particle) pool.push_back(s);
    }
    // Favour syllables that admit orthographic or inflectional variants so
    // that those mutation types have room to apply.
    std::vector<std::string> rich, plain;
    for (const auto& s : pool) (has_variant(s) ? rich : plain).push_back(s);
    rng.shuffle(rich);
    rng.shuffle(plain);
    std::size_t want_rich = std::min(rich.size(), o.vocabulary / 2);
    vocab_.assign(rich.begin(), rich.begin() + static_cast<std::ptrdiff_t>(want_rich));
    for (std::size_t k = 0; vocab_.size() < o.vocabulary && k < plain.size(); ++k) vocab_.push_back(plain[k]);
    rng.shuffle(vocab_);
    double acc = 0.0;
    for (std::size_t r = 0; r < vocab_.size(); ++r) {
      acc += 1.0 / std::pow(double(r + 1), o.zipf_exponent);
      cumulative_.push_back(acc);
    }
    for (const auto& group : res.particles.groups())
      for (const auto& f : group) {
        particles_.push_back(f);
        double w = swappable(f) ? 6.0 : 1.0;
        particle_cum_.push_back((particle_cum_.empty() ? 0.0 : particle_cum_.back()) + w);
      }
  }

  std::string draw() {
    if (!particles_.empty() && rng_.chance(o_.particle_rate)) return particles_[rng_.weighted(particle_cum_)];
    return vocab_[rng_.weighted(cumulative_)];
  }

  std::string draw_content() { return vocab_[rng_.weighted(cumulative_)]; }

  // Allomorphs of a particle that share its normalized stem.
  std::vector<std::string> particle_alternatives(const std::string& s) const {
    std::vector<std::string> out;
    if (!res_.particles.contains(s)) return out;
    Stem base = stem_of_text(s);
    for (const auto& alt : res_.particles.alternatives(s))
      if (stem_of_text(alt).same_as(base)) out.push_back(alt);
    return out;
  }

  // Spellings with the same normalized stem but a different stem.
  std::vector<std::string> orthographic_alternatives(const std::string& s) const {
    std::vector<std::string> out;
    auto t = tuple_.find(s);
    if (t == tuple_.end()) return out;
    auto raw = extract_stem(t->second).key();
    auto it = by_norm_.find(normalized_stem(t->second, res_.rules).key());
    if (it == by_norm_.end()) return out;
    for (const auto& alt : it->second) {
      const auto& u = tuple_.at(alt);
      if (extract_stem(u).key() != raw && u.particle == t->second.particle) out.push_back(alt);
    }
    return out;
  }

  // Same stem, different prescript or postscript.
  std::vector<std::string> inflectional_alternatives(const std::string& s) const {
    std::vector<std::string> out;
    auto t = tuple_.find(s);
    if (t == tuple_.end()) return out;
    auto it = by_raw_.find(extract_stem(t->second).key());
    if (it == by_raw_.end()) return out;
    for (const auto& alt : it->second) {
      const auto& u = tuple_.at(alt);
      if (alt != s && u.particle == t->second.particle) out.push_back(alt);
    }
    return out;
  }

  bool has_variant(const std::string& s) const {
    return !orthographic_alternatives(s).empty() || !inflectional_alternatives(s).empty();
  }

  bool is_particle(const std::string& s) const { return res_.particles.contains(s); }

  Stem stem_of_text(const std::string& s) const {
    auto t = analyze_syllable(s, res_.tables);
    return t.foreign ? foreign_stem(s) : normalized_stem(t, res_.rules);
  }

 private:
  bool swappable(const std::string& f) const { return !particle_alternatives(f).empty(); }

  const Resources& res_;
  Rng& rng_;
  const FixtureOptions& o_;
  std::vector<std::string> native_, vocab_, particles_;
  std::vector<double> cumulative_, particle_cum_;
  std::map<std::string, SyllableTuple> tuple_;
  std::map<std::uint64_t, std::vector<std::string>> by_norm_, by_raw_;
};

inline std::string join_with_shads(const std::vector<std::string>& syllables, Rng& rng) {
  std::string out;
  std::size_t until_shad = rng.between(6, 14);
  for (std::size_t k = 0; k < syllables.size(); ++k) {
    if (k) out += ' ';
    out += syllables[k];
    if (--until_shad == 0 || k + 1 == syllables.size()) {
      out += " /";
      until_shad = rng.between(6, 14);
    }
  }
  return out;
}

}  // namespace detail

// Two documents sharing n_pairs planted passages: each passage appears
// verbatim in a and as a mutated copy in b (in shuffled order), surrounded by
// independent background text. Every mutation is logged with its positions.
inline GoldFixture make_gold_fixture(const FixtureOptions& o, const Resources& res) {
  if (o.min_plant < 3 || o.max_plant < o.min_plant) throw Error(Errc::invalid_argument, "bad plant length range");
  if (o.max_filler < o.min_filler) throw Error(Errc::invalid_argument, "bad filler length range");
  for (double r : o.rates.as_array())
    if (!(r >= 0.0 && r <= 1.0)) throw Error(Errc::invalid_argument, "mutation rates must lie in [0, 1]");
  Rng rng(o.seed);
  detail::SyllableModel model(o, res, rng);
  GoldFixture fx;

  struct Plant {
    std::vector<std::string> source, copy;
    std::vector<PlantRecord> log;  // positions relative to the plant
  };
  std::vector<Plant> plants(o.n_pairs);
  for (std::size_t k = 0; k < o.n_pairs; ++k) {
    Plant& pl = plants[k];
    std::size_t len = rng.between(o.min_plant, o.max_plant);
    for (std::size_t t = 0; t < len; ++t) pl.source.push_back(model.draw());

    // Mutation choice: each interior position is mutated at most once.
    std::vector<std::optional<MutationType>> what(len);
    std::vector<std::string> replacement(len);
    std::vector<char> insert_after(len, 0);
    auto rates = o.rates.as_array();
    for (std::size_t m = 0; m < rates.size(); ++m) {
      auto type = static_cast<MutationType>(m);
      std::size_t want = static_cast<std::size_t>(std::llround(rates[m] * double(len)));
      std::vector<std::size_t> eligible;
      for (std::size_t t = 1; t + 1 < len; ++t) {
        if (what[t]) continue;
        if (type == MutationType::gap) {
          if (what[t - 1] == MutationType::gap || what[t + 1] == MutationType::gap) continue;
        }
        const std::string& s = pl.source[t];
        bool ok = false;
        switch (type) {
          case MutationType::particle_swap: ok = !model.particle_alternatives(s).empty(); break;
          case MutationType::orthographic: ok = !model.is_particle(s) && !model.orthographic_alternatives(s).empty(); break;
          case MutationType::inflectional: ok = !model.is_particle(s) && !model.inflectional_alternatives(s).empty(); break;
          case MutationType::substitution: ok = !model.is_particle(s); break;
          case MutationType::gap: ok = !model.is_particle(s); break;
        }
        if (ok) eligible.push_back(t);
      }
      rng.shuffle(eligible);
      for (std::size_t c = 0; c < std::min(want, eligible.size()); ++c) {
        std::size_t t = eligible[c];
        const std::string& s = pl.source[t];
        what[t] = type;
        auto pick = [&](const std::vector<std::string>& alts) { return alts[rng.below(alts.size())]; };
        switch (type) {
          case MutationType::particle_swap: replacement[t] = pick(model.particle_alternatives(s)); break;
          case MutationType::orthographic: replacement[t] = pick(model.orthographic_alternatives(s)); break;
          case MutationType::inflectional: replacement[t] = pick(model.inflectional_alternatives(s)); break;
          case MutationType::substitution: {
            std::string r;
            do r = model.draw_content();
            while (model.stem_of_text(r).same_as(model.stem_of_text(s)));
            replacement[t] = r;
            break;
          }
          case MutationType::gap:
            if (rng.chance(0.5)) {
              insert_after[t] = 1;
              replacement[t] = model.draw_content();
            }
            break;
        }
      }
    }
    for (std::size_t t = 0; t < len; ++t) {
      const std::string& s = pl.source[t];
      if (!what[t]) {
        pl.copy.push_back(s);
        continue;
      }
      PlantRecord rec;
      rec.pair = k;
      rec.type = *what[t];
      if (rec.type == MutationType::gap) {
        if (insert_after[t]) {
          pl.copy.push_back(s);
          rec.b_pos = pl.copy.size();
          rec.to = replacement[t];
          pl.copy.push_back(replacement[t]);
        } else {
          rec.a_pos = t;
          rec.from = s;
        }
      } else {
        rec.a_pos = t;
        rec.b_pos = pl.copy.size();
        rec.from = s;
        rec.to = replacement[t];
        pl.copy.push_back(replacement[t]);
      }
      pl.log.push_back(std::move(rec));
    }
  }

  auto filler = [&](std::vector<std::string>& doc) {
    std::size_t n = rng.between(o.min_filler, o.max_filler);
    for (std::size_t t = 0; t < n; ++t) doc.push_back(model.draw());
  };

  std::vector<std::size_t> a_start(o.n_pairs), b_start(o.n_pairs);
  filler(fx.syllables_a);
  for (std::size_t k = 0; k < o.n_pairs; ++k) {
    a_start[k] = fx.syllables_a.size();
    fx.syllables_a.insert(fx.syllables_a.end(), plants[k].source.begin(), plants[k].source.end());
    filler(fx.syllables_a);
  }
  std::vector<std::size_t> order(o.n_pairs);
  for (std::size_t k = 0; k < o.n_pairs; ++k) order[k] = k;
  rng.shuffle(order);
  filler(fx.syllables_b);
  for (std::size_t k : order) {
    b_start[k] = fx.syllables_b.size();
    fx.syllables_b.insert(fx.syllables_b.end(), plants[k].copy.begin(), plants[k].copy.end());
    filler(fx.syllables_b);
  }

  for (std::size_t k = 0; k < o.n_pairs; ++k) {
    const Plant& pl = plants[k];
    fx.gold.push_back({fx.id_a, {a_start[k], a_start[k] + pl.source.size() - 1}, fx.id_b,
                       {b_start[k], b_start[k] + pl.copy.size() - 1}, "planted passage " + std::to_string(k)});
    for (PlantRecord rec : pl.log) {
      if (rec.a_pos) *rec.a_pos += a_start[k];
      if (rec.b_pos) *rec.b_pos += b_start[k];
      fx.log.push_back(std::move(rec));
    }
  }
  fx.text_a = detail::join_with_shads(fx.syllables_a, rng);
  fx.text_b = detail::join_with_shads(fx.syllables_b, rng);
  return fx;
}

inline std::string write_plant_log(const std::vector<PlantRecord>& log) {
  std::string out;
  for (const auto& r : log) {
    nlohmann::ordered_json j;
    j["pair"] = r.pair;
    j["type"] = kMutationNames[static_cast<std::size_t>(r.type)];
    j["a_pos"] = r.a_pos ? nlohmann::ordered_json(*r.a_pos) : nlohmann::ordered_json(nullptr);
    j["b_pos"] = r.b_pos ? nlohmann::ordered_json(*r.b_pos) : nlohmann::ordered_json(nullptr);
    j["from"] = r.from;
    j["to"] = r.to;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace tibtext
