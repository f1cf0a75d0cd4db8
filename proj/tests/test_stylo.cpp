#include <gtest/gtest.h>

#include "common.hpp"
#include "tibtext/stylo.hpp"

using namespace tibtext;
using tibtext::test::resources;

namespace {

Document doc(std::string_view text) { return make_document("d", text, resources()); }

double at(const FeatureVector& fv, std::string_view id) {
  auto it = fv.find(std::string(id));
  return it == fv.end() ? -1.0 : it->second;
}

std::vector<LabeledExample> toy_set() {
  // Separable by x - y.
  std::vector<LabeledExample> out;
  Rng rng(3);
  for (int k = 0; k < 40; ++k) {
    double x = rng.unit(), y = rng.unit();
    if (std::abs(x - y) < 0.1) continue;
    out.push_back({{{"x", x}, {"y", y}}, x > y ? "pos" : "neg"});
  }
  return out;
}

}  // namespace

TEST(StyleFeatures, HandComputed) {
  // 8 syllables in 2 sentences. Letters: bsgrubs 7, pa 2, dang 3, bla 3,
  // ma 2, dharma 6 characters (foreign), kyi 3, bla 3 = 29.
  // Verb form: bsgrubs (prescript b). Function words: pa, dang, ma, kyi.
  // Distinct stems: sgrub pa dang bla ma dharma kyi = 7.
  auto fv = extract_style_features(doc("bsgrubs pa dang bla ma / dharma kyi bla /"), resources());
  EXPECT_EQ(fv.size(), 6u);
  EXPECT_DOUBLE_EQ(at(fv, kStyleMeanSyllableLength), 29.0 / 8.0);
  EXPECT_DOUBLE_EQ(at(fv, kStyleMeanSentenceLength), 4.0);
  EXPECT_DOUBLE_EQ(at(fv, kStyleVerbalPrefixFreq), 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(at(fv, kStyleFunctionWordFreq), 4.0 / 8.0);
  EXPECT_DOUBLE_EQ(at(fv, kStyleForeignFreq), 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(at(fv, kStyleTypeTokenRatio), 7.0 / 8.0);
}

TEST(StyleFeatures, SmallCases) {
  auto fv = extract_style_features(doc("ka ka kha"), resources());
  EXPECT_DOUBLE_EQ(at(fv, kStyleTypeTokenRatio), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(at(fv, kStyleForeignFreq), 0.0);
  EXPECT_DOUBLE_EQ(at(fv, kStyleMeanSentenceLength), 3.0);
  try {
    extract_style_features(doc(""), resources());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::empty_document);
  }
}

TEST(StyleFeatures, ProperFrequencies) {
  const auto& r = resources();
  for (const auto& d : make_translationese_corpus(r, 9, 10, 200)) {
    auto fv = extract_style_features(make_document(d.id, d.text, r), r);
    EXPECT_EQ(fv, extract_style_features(make_document(d.id, d.text, r), r));
    for (auto id : {kStyleVerbalPrefixFreq, kStyleFunctionWordFreq, kStyleForeignFreq, kStyleTypeTokenRatio}) {
      EXPECT_GE(at(fv, id), 0.0);
      EXPECT_LE(at(fv, id), 1.0);
    }
    EXPECT_LE(at(fv, kStyleVerbalPrefixFreq) + at(fv, kStyleFunctionWordFreq), 1.0);
  }
}

TEST(NgramFeatures, Examples) {
  auto uni = extract_ngram_features(doc("ka ka kha"), 1, 1);
  EXPECT_EQ(uni, (FeatureVector{{"bow:ka", 2.0 / 3.0}, {"bow:kha", 1.0 / 3.0}}));
  EXPECT_TRUE(extract_ngram_features(doc(""), 1, 3).empty());
  // Units are stems, so bsgrubs and sgrub coincide.
  auto bi = extract_ngram_features(doc("bsgrubs pa / sgrub pa dang"), 2, 2);
  EXPECT_EQ(bi, (FeatureVector{{"ngram:2:sgrub|pa", 2.0 / 4.0}, {"ngram:2:pa|sgrub", 1.0 / 4.0},
                               {"ngram:2:pa|dang", 1.0 / 4.0}}));
  auto tri = extract_ngram_features(doc("ka kha"), 3, 3);
  EXPECT_TRUE(tri.empty());
  EXPECT_THROW(extract_ngram_features(doc("ka"), 2, 4), Error);
  EXPECT_THROW(extract_ngram_features(doc("ka"), 0, 1), Error);
}

TEST(NgramFeatures, WithSegmenter) {
  const auto& r = resources();
  std::vector<SegmentedSentence> corpus;
  for (int k = 0; k < 20; ++k) {
    std::vector<std::string> syl;
    SegmentedSentence s;
    read_segmented_line(k % 2 ? "bla_ma dang sangs_rgyas" : "sangs_rgyas dang bla_ma", syl, s.tags);
    for (const auto& x : syl) s.syllables.push_back(analyze_syllable(x, r.tables));
    corpus.push_back(std::move(s));
  }
  auto m = train_segmenter(corpus, {}, &r.particles, &r.tables);
  auto fv = extract_ngram_features(doc("bla ma dang sangs rgyas"), 1, 1, &m, &r);
  EXPECT_EQ(fv, (FeatureVector{{"bow:bla_ma", 1.0 / 3.0}, {"bow:dang", 1.0 / 3.0}, {"bow:sangs_rgyas", 1.0 / 3.0}}));
}

TEST(Predict, Examples) {
  LinearModel m;
  m.labels = {"a", "b"};
  auto p = m.predict({});
  EXPECT_EQ(p.label, "a");
  EXPECT_DOUBLE_EQ(p.margin, 0.0);
  m.weights = {{"x", 1.0}};
  m.bias = -1.0;
  p = m.predict({{"x", 2.0}});
  EXPECT_EQ(p.label, "a");
  EXPECT_DOUBLE_EQ(p.margin, 1.0);
  EXPECT_EQ(m.predict({{"x", 0.5}}).label, "b");
}

TEST(Perceptron, SeparableToySet) {
  auto data = toy_set();
  auto m = train_perceptron(data);
  for (const auto& e : data) EXPECT_EQ(m.predict(e.features).label, e.label);
  EXPECT_EQ(m.meta["final_epoch_errors"], 0);
  EXPECT_LE(m.meta["epochs_run"].get<std::size_t>(), 100u);
  EXPECT_EQ(serialize_model(m), serialize_model(train_perceptron(data)));
}

TEST(Perceptron, ScaleInvariance) {
  auto data = toy_set();
  auto m = train_perceptron(data);
  for (double c : {0.01, 3.0, 1000.0}) {
    LinearModel s = m;
    s.bias *= c;
    for (auto& [id, w] : s.weights) w *= c;
    for (const auto& e : data) EXPECT_EQ(s.predict(e.features).label, m.predict(e.features).label);
  }
}

TEST(Perceptron, Errors) {
  std::vector<LabeledExample> one = {{{{"x", 1.0}}, "a"}, {{{"x", 2.0}}, "a"}};
  try {
    train_perceptron(one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::degenerate_data);
  }
  PerceptronOptions o;
  o.epochs = 0;
  EXPECT_THROW(train_perceptron(toy_set(), o), Error);
}

TEST(Evaluate, Arithmetic) {
  LinearModel m;
  m.labels = {"a", "b"};
  m.weights = {{"x", 1.0}};
  std::vector<LabeledExample> right = {{{{"x", 1.0}}, "a"}, {{{"x", -1.0}}, "b"}};
  EXPECT_DOUBLE_EQ(evaluate(m, right).accuracy, 1.0);
  std::vector<LabeledExample> wrong = {{{{"x", 1.0}}, "b"}, {{{"x", -1.0}}, "a"}};
  EXPECT_DOUBLE_EQ(evaluate(m, wrong).accuracy, 0.0);
  std::vector<LabeledExample> mixed = {
      {{{"x", 1.0}}, "a"}, {{{"x", 1.0}}, "a"}, {{{"x", -1.0}}, "b"}, {{{"x", 1.0}}, "b"}};
  auto r = evaluate(m, mixed);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.75);
  EXPECT_DOUBLE_EQ(r.per_label["a"].precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.per_label["a"].recall, 1.0);
  EXPECT_DOUBLE_EQ(r.per_label["b"].recall, 0.5);
  std::size_t sum = 0;
  for (const auto& [k, n] : r.confusion) sum += n;
  EXPECT_EQ(sum, mixed.size());
  try {
    evaluate(m, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::empty_test_set);
  }
}
