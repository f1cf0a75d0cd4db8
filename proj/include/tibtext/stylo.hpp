#pragma once

// Stylometric features and a binary perceptron classifier.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tibtext/document.hpp"
#include "tibtext/linear_model.hpp"
#include "tibtext/resources.hpp"
#include "tibtext/segment.hpp"
#include "tibtext/util.hpp"

namespace tibtext {

inline constexpr std::string_view kStyleMeanSyllableLength = "style:mean_syllable_length";
inline constexpr std::string_view kStyleMeanSentenceLength = "style:mean_sentence_length";
inline constexpr std::string_view kStyleVerbalPrefixFreq = "style:verbal_prefix_freq";
inline constexpr std::string_view kStyleFunctionWordFreq = "style:function_word_freq";
inline constexpr std::string_view kStyleForeignFreq = "style:foreign_freq";
inline constexpr std::string_view kStyleTypeTokenRatio = "style:type_token_ratio";

// Letters per syllable (characters for foreign syllables), syllables per
// sentence, share of verb forms (prescript from the verbal-prefix list,
// function words excluded so the two lexicon shares are disjoint), share of
// function words, share of foreign syllables, and distinct stems per token.
inline FeatureVector extract_style_features(const Document& doc, const Resources& res) {
  if (doc.empty()) throw Error(Errc::empty_document, "style features need a non-empty document");
  const double n = static_cast<double>(doc.size());
  std::size_t letters = 0, verbal = 0, function = 0, foreign = 0;
  std::set<std::uint64_t> types;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& t = doc.syllables[i];
    const auto& s = doc.surface[i];
    types.insert(doc.stems[i].key());
    if (t.foreign) {
      ++foreign;
      letters += s.size();
      continue;
    }
    letters += tokenize_letters(s).letters.size();
    bool fw = res.function_words.contains(s);
    function += fw;
    if (!fw && t.prescript && res.verbal_prefixes.contains(wylie_form(*t.prescript))) ++verbal;
  }
  std::size_t sentences = doc.sentence_ends.size();
  if (sentences == 0 || doc.sentence_ends.back() + 1 < doc.size()) ++sentences;
  FeatureVector fv;
  fv[std::string(kStyleMeanSyllableLength)] = double(letters) / n;
  fv[std::string(kStyleMeanSentenceLength)] = n / double(sentences);
  fv[std::string(kStyleVerbalPrefixFreq)] = double(verbal) / n;
  fv[std::string(kStyleFunctionWordFreq)] = double(function) / n;
  fv[std::string(kStyleForeignFreq)] = double(foreign) / n;
  fv[std::string(kStyleTypeTokenRatio)] = double(types.size()) / n;
  return fv;
}

// Relative n-gram frequencies for each n in [n_min, n_max]. Units are stems
// (foreign syllables by their text) or, with a segmenter, words. Unigrams
// are named "bow:<unit>", longer n-grams "ngram:<n>:<u1>|<u2>...".
inline FeatureVector extract_ngram_features(const Document& doc, std::size_t n_min, std::size_t n_max,
                                            const LinearModel* segmenter = nullptr, const Resources* res = nullptr) {
  if (n_min < 1 || n_max > 3 || n_min > n_max) throw Error(Errc::invalid_argument, "n-gram range must lie within 1..3");
  FeatureVector fv;
  if (doc.empty()) return fv;
  std::vector<std::string> units;
  if (segmenter) {
    auto tags = segment(*segmenter, doc.syllables, res ? &res->particles : nullptr, res ? &res->tables : nullptr);
    units = words_of(doc.surface, tags);
  } else {
    for (std::size_t i = 0; i < doc.size(); ++i)
      units.push_back(doc.stems[i].foreign() ? doc.surface[i] : stem_text(doc.stems[i]));
  }
  for (std::size_t n = n_min; n <= n_max; ++n) {
    if (units.size() < n) continue;
    std::map<std::string, std::size_t> counts;
    const std::size_t total = units.size() - n + 1;
    for (std::size_t i = 0; i < total; ++i) {
      std::string id = n == 1 ? "bow:" + units[i] : "ngram:" + std::to_string(n) + ":" + units[i];
      for (std::size_t k = 1; k < n; ++k) id += "|" + units[i + k];
      ++counts[id];
    }
    for (const auto& [id, c] : counts) fv[id] = double(c) / double(total);
  }
  return fv;
}

struct LabeledExample {
  FeatureVector features;
  std::string label;
};

struct PerceptronOptions {
  std::size_t epochs = 100;
  double learning_rate = 1.0;
  std::uint64_t seed = 1;
};

// Perceptron with per-epoch shuffling; stops after the first epoch without
// a training error. The first label (in order of appearance) scores
// positive.
inline LinearModel train_perceptron(const std::vector<LabeledExample>& examples, const PerceptronOptions& opt = {}) {
  if (opt.epochs == 0) throw Error(Errc::invalid_argument, "epochs must be >= 1");
  if (!(opt.learning_rate > 0.0)) throw Error(Errc::invalid_argument, "learning rate must be positive");
  LinearModel m;
  m.kind = "stylo";
  m.template_id = "stylo-v1";
  std::vector<std::string> labels;
  for (const auto& e : examples)
    if (std::find(labels.begin(), labels.end(), e.label) == labels.end()) labels.push_back(e.label);
  if (labels.size() != 2)
    throw Error(Errc::degenerate_data, "perceptron needs exactly two labels, got " + std::to_string(labels.size()));
  m.labels = {labels[0], labels[1]};
  std::vector<std::size_t> order(examples.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  Rng rng(opt.seed);
  std::size_t epochs_run = 0, last_errors = 0;
  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    rng.shuffle(order);
    std::size_t errors = 0;
    for (std::size_t k : order) {
      const auto& e = examples[k];
      if (m.predict(e.features).label == e.label) continue;
      ++errors;
      double y = e.label == m.labels[0] ? opt.learning_rate : -opt.learning_rate;
      for (const auto& [id, v] : e.features) m.weights[id] += y * v;
      m.bias += y;
    }
    epochs_run = epoch + 1;
    last_errors = errors;
    if (errors == 0) break;
  }
  std::erase_if(m.weights, [](const auto& kv) { return kv.second == 0.0; });
  m.meta["epochs"] = opt.epochs;
  m.meta["epochs_run"] = epochs_run;
  m.meta["final_epoch_errors"] = last_errors;
  m.meta["learning_rate"] = opt.learning_rate;
  m.meta["seed"] = opt.seed;
  return m;
}

struct LabelMetrics {
  double precision = 0.0, recall = 0.0;
  std::size_t true_positive = 0, predicted = 0, actual = 0;
};

struct ClassifierMetrics {
  double accuracy = 0.0;
  std::size_t correct = 0, total = 0;
  std::map<std::string, LabelMetrics> per_label;
  std::map<std::pair<std::string, std::string>, std::size_t> confusion;  // (gold, predicted)
};

inline ClassifierMetrics evaluate(const LinearModel& model, const std::vector<LabeledExample>& test) {
  if (test.empty()) throw Error(Errc::empty_test_set, "evaluation needs at least one example");
  ClassifierMetrics r;
  r.total = test.size();
  for (const auto& l : model.labels) r.per_label[l];
  for (const auto& e : test) {
    std::string guess = model.predict(e.features).label;
    ++r.confusion[{e.label, guess}];
    ++r.per_label[e.label].actual;
    ++r.per_label[guess].predicted;
    if (guess == e.label) {
      ++r.correct;
      ++r.per_label[guess].true_positive;
    }
  }
  r.accuracy = double(r.correct) / double(r.total);
  for (auto& [label, m] : r.per_label) {
    m.precision = m.predicted ? double(m.true_positive) / double(m.predicted) : 0.0;
    m.recall = m.actual ? double(m.true_positive) / double(m.actual) : 0.0;
  }
  return r;
}

// Synthetic two-class corpus whose classes differ in the style features:
// "translated" documents use longer sentences, more function words, more
// foreign syllables, more verb forms and a smaller vocabulary than
// "autochthonous" ones. Documents come back as text.
struct StyloCorpusDoc {
  std::string id;
  std::string label;
  std::string text;
};

inline std::vector<StyloCorpusDoc> make_translationese_corpus(const Resources& res, std::uint64_t seed,
                                                              std::size_t docs_per_class, std::size_t doc_length = 400) {
  Rng rng(seed);
  auto all = enumerate_valid_syllables(res.tables, SIZE_MAX);
  std::vector<std::string> plain, verbal;
  for (const auto& t : all) {
    if (t.particle) continue;
    std::string s = render_syllable(t, res.tables);
    if (res.function_words.contains(s) || res.particles.contains(s) || res.loanwords.contains(s)) continue;
    bool v = t.prescript && res.verbal_prefixes.contains(wylie_form(*t.prescript));
    (v ? verbal : plain).push_back(s);
  }
  rng.shuffle(plain);
  rng.shuffle(verbal);
  const auto fwords = res.function_words.forms();
  const std::vector<std::string> foreign = {"dharma", "sutra", "bhagavan", "tathagata", "mantra", "shri", "bodhi",
                                            "prajna", "paramita", "svaha"};
  struct Style {
    double function, foreign, verbal;
    std::size_t vocab, sentence_lo, sentence_hi;
  };
  const Style translated{0.30, 0.06, 0.16, 300, 12, 22};
  const Style native{0.18, 0.005, 0.07, 1200, 5, 11};

  std::vector<StyloCorpusDoc> out;
  for (std::size_t d = 0; d < 2 * docs_per_class; ++d) {
    const bool is_t = d % 2 == 0;
    const Style& st = is_t ? translated : native;
    auto jitter = [&](double x) { return x * (0.85 + 0.3 * rng.unit()); };
    const double pf = jitter(st.function), px = jitter(st.foreign), pv = jitter(st.verbal);
    std::string text;
    std::size_t until_shad = rng.between(st.sentence_lo, st.sentence_hi);
    for (std::size_t k = 0; k < doc_length; ++k) {
      double u = rng.unit();
      std::string s;
      if (u < pf) s = fwords[rng.below(fwords.size())];
      else if (u < pf + px) s = foreign[rng.below(foreign.size())];
      else if (u < pf + px + pv) s = verbal[rng.below(std::min(st.vocab, verbal.size()))];
      else s = plain[rng.below(std::min(st.vocab, plain.size()))];
      if (k) text += ' ';
      text += s;
      if (--until_shad == 0) {
        text += " /";
        until_shad = rng.between(st.sentence_lo, st.sentence_hi);
      }
    }
    out.push_back({(is_t ? "translated_" : "autochthonous_") + std::to_string(d / 2), is_t ? "translated" : "autochthonous",
                   text});
  }
  return out;
}

}  // namespace tibtext
