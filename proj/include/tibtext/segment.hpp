#pragma once

// Word segmentation as per-syllable BEGIN/INSIDE tagging with a greedy
// averaged-perceptron tagger over slot features.

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tibtext/document.hpp"
#include "tibtext/lexicon.hpp"
#include "tibtext/linear_model.hpp"
#include "tibtext/stem.hpp"
#include "tibtext/syllable.hpp"
#include "tibtext/util.hpp"

namespace tibtext {

enum class Tag : std::uint8_t { begin, inside };
using Segmentation = std::vector<Tag>;

inline constexpr std::string_view kSegmenterTemplate = "seg-v1";

struct SegmentedSentence {
  std::vector<SyllableTuple> syllables;
  Segmentation tags;
};

namespace detail {

inline std::string slot_value(std::optional<Letter> l) { return l ? std::string(wylie_form(*l)) : "-"; }

// Per-syllable strings the template reads at every offset.
struct SyllableView {
  std::array<std::string, 8> slots;
  std::string stem;
  bool particle = false;
  bool foreign = false;
};

inline SyllableView view_of(const SyllableTuple& t, const Lexicon* particles, const SyllableTables* tables) {
  SyllableView v;
  v.foreign = t.foreign;
  if (t.foreign) {
    v.slots.fill("?");
    v.stem = "?";
    return v;
  }
  v.slots = {slot_value(t.prescript), slot_value(t.superscript), slot_value(t.core), slot_value(t.subscript),
             slot_value(t.vowel),     slot_value(t.coda),        slot_value(t.postscript), t.particle.value_or("-")};
  v.stem = stem_text(extract_stem(t));
  v.particle = t.particle.has_value() || (particles && tables && particles->contains(render_syllable(t, *tables)));
  return v;
}

inline constexpr std::array<std::string_view, 8> kSlotKeys = {"pre", "sup", "core", "sub", "vow", "coda", "post", "part"};

}  // namespace detail

// Sparse features for position i: slot values and stems at offsets -2..+2
// (with padding outside the sentence), neighbouring stem pairs, particle and
// foreign flags. The particle lexicon is optional.
class SegmentFeaturizer {
 public:
  SegmentFeaturizer(const std::vector<SyllableTuple>& syllables, const Lexicon* particles = nullptr,
                    const SyllableTables* tables = nullptr) {
    views_.reserve(syllables.size());
    for (const auto& t : syllables) views_.push_back(detail::view_of(t, particles, tables));
  }

  std::size_t size() const { return views_.size(); }

  std::vector<std::string> features(std::size_t i) const {
    std::vector<std::string> f;
    f.reserve(64);
    for (int d = -2; d <= 2; ++d) {
      const std::string o = "o" + std::to_string(d) + ":";
      const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(i) + d;
      if (k < 0) {
        f.push_back(o + "<s>");
        continue;
      }
      if (k >= static_cast<std::ptrdiff_t>(views_.size())) {
        f.push_back(o + "</s>");
        continue;
      }
      const auto& v = views_[static_cast<std::size_t>(k)];
      f.push_back(o + "stem=" + v.stem);
      for (std::size_t s = 0; s < v.slots.size(); ++s) f.push_back(o + std::string(detail::kSlotKeys[s]) + "=" + v.slots[s]);
      if (v.particle) f.push_back(o + "particle");
      if (v.foreign) f.push_back(o + "foreign");
    }
    const std::string prev = i > 0 ? views_[i - 1].stem : "<s>";
    const std::string next = i + 1 < views_.size() ? views_[i + 1].stem : "</s>";
    f.push_back("pair-1:" + prev + "|" + views_[i].stem);
    f.push_back("pair+1:" + views_[i].stem + "|" + next);
    return f;
  }

 private:
  std::vector<detail::SyllableView> views_;
};

inline std::vector<std::string> featurize(const std::vector<SyllableTuple>& syllables, std::size_t i) {
  if (i >= syllables.size()) throw Error(Errc::invalid_argument, "featurize index out of range");
  return SegmentFeaturizer(syllables).features(i);
}

struct SegmenterOptions {
  std::size_t epochs = 10;
  std::uint64_t seed = 1;
};

namespace detail {

inline std::string prev_tag_feature(std::optional<Tag> prev) {
  if (!prev) return "prev=<s>";
  return *prev == Tag::begin ? "prev=B" : "prev=I";
}

inline Segmentation tag_greedy(const std::unordered_map<std::string, double>& w, double bias,
                               const SegmentFeaturizer& fz) {
  Segmentation tags;
  tags.reserve(fz.size());
  for (std::size_t i = 0; i < fz.size(); ++i) {
    if (i == 0) {
      tags.push_back(Tag::begin);
      continue;
    }
    double s = bias;
    auto add = [&](const std::string& f) {
      if (auto it = w.find(f); it != w.end()) s += it->second;
    };
    for (const auto& f : fz.features(i)) add(f);
    add(prev_tag_feature(tags.back()));
    tags.push_back(s >= 0.0 ? Tag::begin : Tag::inside);
  }
  return tags;
}

}  // namespace detail

// Averaged perceptron; score >= 0 means BEGIN. The first syllable of a
// sentence is always BEGIN and is not trained on.
inline LinearModel train_segmenter(const std::vector<SegmentedSentence>& corpus, const SegmenterOptions& opt = {},
                                   const Lexicon* particles = nullptr, const SyllableTables* tables = nullptr) {
  if (corpus.empty()) throw Error(Errc::degenerate_data, "segmenter training corpus is empty");
  if (opt.epochs == 0) throw Error(Errc::invalid_argument, "epochs must be >= 1");
  std::vector<SegmentFeaturizer> fz;
  fz.reserve(corpus.size());
  for (const auto& s : corpus) {
    if (s.tags.size() != s.syllables.size())
      throw Error(Errc::shape_mismatch, "tag count " + std::to_string(s.tags.size()) + " differs from syllable count " +
                                            std::to_string(s.syllables.size()));
    fz.emplace_back(s.syllables, particles, tables);
  }
  std::unordered_map<std::string, double> w, u;
  double bias = 0.0, bias_u = 0.0;
  double c = 1.0;
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  Rng rng(opt.seed);
  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t k : order) {
      const auto& gold = corpus[k].tags;
      std::optional<Tag> prev;
      for (std::size_t i = 0; i < gold.size(); ++i) {
        if (i == 0) {
          prev = Tag::begin;
          continue;
        }
        auto feats = fz[k].features(i);
        feats.push_back(detail::prev_tag_feature(prev));
        double s = bias;
        for (const auto& f : feats)
          if (auto it = w.find(f); it != w.end()) s += it->second;
        Tag guess = s >= 0.0 ? Tag::begin : Tag::inside;
        if (guess != gold[i]) {
          double y = gold[i] == Tag::begin ? 1.0 : -1.0;
          for (const auto& f : feats) {
            w[f] += y;
            u[f] += y * c;
          }
          bias += y;
          bias_u += y * c;
        }
        prev = guess;
        c += 1.0;
      }
    }
  }
  LinearModel m;
  m.kind = "segmenter";
  m.template_id = std::string(kSegmenterTemplate);
  m.labels = {"BEGIN", "INSIDE"};
  m.bias = bias - bias_u / c;
  for (const auto& [f, v] : w) {
    double avg = v - u[f] / c;
    if (avg != 0.0) m.weights[f] = avg;
  }
  m.meta["epochs"] = opt.epochs;
  m.meta["seed"] = opt.seed;
  m.meta["sentences"] = corpus.size();
  return m;
}

inline Segmentation segment(const LinearModel& model, const std::vector<SyllableTuple>& syllables,
                            const Lexicon* particles = nullptr, const SyllableTables* tables = nullptr) {
  if (model.kind != "segmenter" || model.template_id != kSegmenterTemplate)
    throw Error(Errc::template_mismatch, "model template '" + model.template_id + "' is not " +
                                             std::string(kSegmenterTemplate));
  std::unordered_map<std::string, double> w(model.weights.begin(), model.weights.end());
  return detail::tag_greedy(w, model.bias, SegmentFeaturizer(syllables, particles, tables));
}

// Word strings ("syl_syl") for a segmentation of the given surface forms.
inline std::vector<std::string> words_of(const std::vector<std::string>& surface, const Segmentation& tags) {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < surface.size(); ++i) {
    if (i == 0 || tags[i] == Tag::begin) words.push_back(surface[i]);
    else words.back() += "_" + surface[i];
  }
  return words;
}

// Gold corpus lines: words separated by spaces, syllables of a word joined
// by "_"; a shad may end the line.
inline std::vector<std::string> read_segmented_line(std::string_view line, std::vector<std::string>& syllables,
                                                    Segmentation& tags) {
  std::vector<std::string> words;
  for (auto& tok : split_ws(line)) {
    if (tok == "/" || tok == "//") continue;
    words.push_back(tok);
    std::size_t start = 0;
    bool first = true;
    while (start <= tok.size()) {
      std::size_t us = tok.find('_', start);
      if (us == std::string::npos) us = tok.size();
      if (us > start) {
        syllables.push_back(tok.substr(start, us - start));
        tags.push_back(first ? Tag::begin : Tag::inside);
        first = false;
      }
      start = us + 1;
    }
  }
  return words;
}

struct BoundaryScore {
  double precision = 1.0, recall = 1.0, f1 = 1.0;
  std::size_t true_positive = 0, predicted = 0, gold = 0;
};

// Word-boundary F1 over BEGIN tags, ignoring the always-BEGIN first syllable.
inline BoundaryScore boundary_f1(const std::vector<Segmentation>& gold, const std::vector<Segmentation>& predicted) {
  if (gold.size() != predicted.size()) throw Error(Errc::shape_mismatch, "segmentation counts differ");
  BoundaryScore s;
  for (std::size_t k = 0; k < gold.size(); ++k) {
    if (gold[k].size() != predicted[k].size()) throw Error(Errc::shape_mismatch, "segmentation lengths differ");
    for (std::size_t i = 1; i < gold[k].size(); ++i) {
      bool g = gold[k][i] == Tag::begin, p = predicted[k][i] == Tag::begin;
      s.gold += g;
      s.predicted += p;
      s.true_positive += g && p;
    }
  }
  s.precision = s.predicted ? double(s.true_positive) / double(s.predicted) : 1.0;
  s.recall = s.gold ? double(s.true_positive) / double(s.gold) : 1.0;
  s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

// Synthetic corpus from a lexicon of n_words words of 1-3 syllables, no
// syllable shared between words, so concatenation is unambiguous.
struct LexiconCorpus {
  std::vector<std::vector<std::string>> lexicon;
  std::vector<std::string> lines;  // gold format
};

inline LexiconCorpus make_lexicon_corpus(const SyllableTables& tables, std::uint64_t seed, std::size_t n_words,
                                         std::size_t n_sentences) {
  Rng rng(seed);
  auto pool = enumerate_valid_syllables(tables, SIZE_MAX);
  std::erase_if(pool, [](const SyllableTuple& t) { return t.particle.has_value(); });
  rng.shuffle(pool);
  LexiconCorpus out;
  std::size_t next = 0;
  for (std::size_t w = 0; w < n_words; ++w) {
    std::size_t len = rng.between(1, 3);
    std::vector<std::string> word;
    for (std::size_t s = 0; s < len; ++s) word.push_back(render_syllable(pool[next++], tables));
    out.lexicon.push_back(std::move(word));
  }
  for (std::size_t k = 0; k < n_sentences; ++k) {
    std::size_t n = rng.between(4, 12);
    std::string line;
    for (std::size_t t = 0; t < n; ++t) {
      const auto& word = out.lexicon[rng.below(out.lexicon.size())];
      if (t) line += ' ';
      for (std::size_t s = 0; s < word.size(); ++s) line += (s ? "_" : "") + word[s];
    }
    out.lines.push_back(line + " /");
  }
  return out;
}

}  // namespace tibtext
