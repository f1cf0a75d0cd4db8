#include <gtest/gtest.h>

#include <set>

#include "common.hpp"
#include "fixtures.hpp"
#include "tibtext/align.hpp"
#include "tibtext/align_oracle.hpp"

using namespace tibtext;
using tibtext::test::resources;

namespace {

std::vector<std::uint64_t> keys(std::initializer_list<std::uint64_t> k) { return k; }

Document doc(const std::string& id, const std::vector<std::string>& syllables) {
  return make_document(id, syllables, resources());
}

std::vector<std::string> distinct_syllables(std::size_t n, std::size_t offset = 0) {
  static const std::vector<std::string> pool = {"ka",   "kha",  "ga",   "nga",  "ca",   "cha",  "ja",  "nya",
                                                "ta",   "tha",  "pha",  "tsa",  "tsha", "dza",  "wa",  "zha",
                                                "za",   "ya",   "sha",  "ha",   "ki",   "khi",  "gu",  "nge",
                                                "co",   "chu",  "ji",   "nyo",  "thu",  "phe",  "tsi", "tsho"};
  return {pool.begin() + static_cast<std::ptrdiff_t>(offset), pool.begin() + static_cast<std::ptrdiff_t>(offset + n)};
}

std::set<std::pair<Cell, Cell>> edge_cells(const MatchGraph& g) {
  std::set<std::pair<Cell, Cell>> out;
  for (auto [u, v] : g.edges()) out.insert({g.cell(u), g.cell(v)});
  return out;
}

}  // namespace

TEST(MatchGraph, IdenticalDocumentsHaveTheDiagonal) {
  auto k = keys({1, 2, 3, 4, 5});
  auto g = build_match_graph(k, k, 2);
  EXPECT_GE(g.vertex_count(), 5u);
  for (std::uint32_t i = 0; i < 5; ++i) EXPECT_TRUE(g.find(i, i).has_value());
}

TEST(MatchGraph, NoSharedStemsGivesEmptyGraph) {
  auto g = build_match_graph(keys({1, 2, 3}), keys({4, 5, 6}), 2);
  EXPECT_EQ(g.vertex_count(), 0u);
  EXPECT_TRUE(g.edges().empty());
}

TEST(MatchGraph, HandBuiltFourByFour) {
  // a = x y z x, b = x z y x
  auto a = keys({1, 2, 3, 1}), b = keys({1, 3, 2, 1});
  auto g0 = build_match_graph(a, b, 0);
  std::set<Cell> cells;
  for (std::size_t v = 0; v < g0.vertex_count(); ++v) cells.insert(g0.cell(v));
  EXPECT_EQ(cells, (std::set<Cell>{{0, 0}, {0, 3}, {1, 2}, {2, 1}, {3, 0}, {3, 3}}));
  EXPECT_TRUE(g0.edges().empty());

  auto g1 = build_match_graph(a, b, 1);
  std::set<std::pair<Cell, Cell>> expect = {
      {{0, 0}, {1, 2}}, {{0, 0}, {2, 1}}, {{1, 2}, {3, 3}}, {{2, 1}, {3, 3}}};
  EXPECT_EQ(edge_cells(g1), expect);
  EXPECT_DOUBLE_EQ(g1.edge_weight(*g1.find(0, 0), *g1.find(1, 2)), 1.0);
  EXPECT_DOUBLE_EQ(g1.edge_weight(*g1.find(1, 2), *g1.find(3, 3)), 1.0);
}

TEST(MatchGraph, EmptyDocumentIsAnError) {
  std::vector<std::uint64_t> none;
  try {
    build_match_graph(none, keys({1}), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::empty_document);
  }
}

TEST(MatchGraph, ThresholdAddsNearStems) {
  const auto& r = resources();
  auto a = doc("a", {"sgrub"}), b = doc("b", {"sgrib"});
  AlignParams p;
  EXPECT_EQ(build_match_graph(a, b, p, r.costs).vertex_count(), 0u);
  p.vertex_threshold = 0.5;
  auto g = build_match_graph(a, b, p, r.costs);
  ASSERT_EQ(g.vertex_count(), 1u);
  EXPECT_DOUBLE_EQ(g.vertex_cost(0), 0.5);
}

TEST(MaximalPaths, SingleDiagonal) {
  auto k = keys({1, 2, 3, 4, 5, 6, 7, 8});
  AlignParams p;
  p.error_budget = 0.0;
  auto paths = find_maximal_paths(build_match_graph(k, k, p.max_gap), p);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(paths[0].a, (Span{0, 7}));
  EXPECT_EQ(paths[0].b, (Span{0, 7}));
  EXPECT_DOUBLE_EQ(paths[0].cost, 0.0);
  EXPECT_DOUBLE_EQ(paths[0].score, 8.0);
}

TEST(MaximalPaths, DiagonalWithOneSubstitution) {
  auto a = keys({1, 2, 3, 4, 5, 6, 7, 8, 9}), b = keys({1, 2, 3, 4, 99, 6, 7, 8, 9});
  AlignParams p;
  auto paths = find_maximal_paths(build_match_graph(a, b, p.max_gap), p);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(paths[0].a, (Span{0, 8}));
  EXPECT_EQ(paths[0].b, (Span{0, 8}));
  EXPECT_DOUBLE_EQ(paths[0].cost, 2.0);
  // The oracle agrees the full span pair is acceptable.
  std::vector<Stem> sa, sb;
  for (auto x : a) sa.push_back(foreign_stem(std::to_string(x)));
  for (auto x : b) sb.push_back(foreign_stem(std::to_string(x)));
  auto orc = oracle_align(sa, sb, p, resources().costs);
  ASSERT_EQ(orc.size(), 1u);
  EXPECT_EQ(orc[0].a, (Span{0, 8}));
}

TEST(MaximalPaths, TwoDisjointDiagonals) {
  auto a = keys({1, 2, 3, 4, 5, 6, 50, 51, 52, 53, 54, 55, 10, 11, 12, 13, 14, 15, 16});
  auto b = keys({10, 11, 12, 13, 14, 15, 16, 60, 61, 62, 63, 64, 65, 1, 2, 3, 4, 5, 6});
  AlignParams p;
  auto out = align_keys(a, b, p);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].a, (Span{0, 5}));
  EXPECT_EQ(out[0].b, (Span{13, 18}));
  EXPECT_EQ(out[1].a, (Span{12, 18}));
  EXPECT_EQ(out[1].b, (Span{0, 6}));
}

TEST(MaximalPaths, EachVertexInOnePath) {
  auto fx = test::documents_of(make_gold_fixture(test::small_fixture_options(7), resources()), resources());
  AlignParams p;
  auto g = build_match_graph(fx.a, fx.b, p, resources().costs);
  std::set<Cell> seen;
  for (const auto& path : find_maximal_paths(g, p))
    for (const auto& c : path.cells) EXPECT_TRUE(seen.insert(c).second);
}

TEST(MergeAndFilter, Examples) {
  AlignParams p;
  auto path = [](std::uint32_t i0, std::uint32_t j0, std::uint32_t n) {
    AlignedPath x;
    for (std::uint32_t k = 0; k < n; ++k) x.cells.push_back({i0 + k, j0 + k});
    x.a = {i0, i0 + n - 1};
    x.b = {j0, j0 + n - 1};
    x.score = n;
    return x;
  };
  EXPECT_EQ(merge_and_filter({path(0, 0, 10)}, p).size(), 1u);
  EXPECT_TRUE(merge_and_filter({path(0, 0, p.min_length - 1)}, p).empty());

  auto big = path(0, 0, 20), near = path(2, 2, 20);
  near.score = 15;
  auto out = merge_and_filter({near, big}, p);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].a, (Span{0, 19}));

  auto ordered = merge_and_filter({path(50, 3, 8), path(10, 40, 8), path(10, 20, 8)}, p);
  ASSERT_EQ(ordered.size(), 3u);
  EXPECT_EQ(ordered[0].b.start, 20u);
  EXPECT_EQ(ordered[1].b.start, 40u);
  EXPECT_EQ(ordered[2].a.start, 50u);
}

TEST(AlignPair, SelfAlignmentCoversEverything) {
  auto a = doc("a", distinct_syllables(20));
  auto out = align_pair(a, a, AlignParams{}, resources().costs);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].a, (Span{0, 19}));
  EXPECT_EQ(out[0].b, (Span{0, 19}));
  EXPECT_EQ(out[0].variants[VariantClass::identical], 20u);
}

TEST(AlignPair, EmptyDocument) {
  Document empty;
  auto a = doc("a", distinct_syllables(8));
  EXPECT_THROW(align_pair(empty, a, AlignParams{}, resources().costs), Error);
}

TEST(AlignPair, InvalidParams) {
  auto a = doc("a", distinct_syllables(8));
  AlignParams p;
  p.error_budget = 1.0;
  EXPECT_THROW(align_pair(a, a, p, resources().costs), Error);
  p = {};
  p.min_length = 1;
  EXPECT_THROW(align_pair(a, a, p, resources().costs), Error);
}

TEST(AlignPair, UnrelatedTextsAreSound) {
  const auto& r = resources();
  FixtureOptions o = test::small_fixture_options(3);
  o.n_pairs = 0;
  o.min_filler = 150;
  o.max_filler = 200;
  auto x = test::documents_of(make_gold_fixture(o, r), r);
  AlignParams p;
  for (const auto& q : align_pair(x.a, x.b, p, r.costs))
    EXPECT_TRUE(oracle_accepts(x.a.stems, x.b.stems, p, r.costs, q.a, q.b));
}

// Soundness and recall against the brute-force oracle, plus symmetry, on
// small planted fixtures.
class OracleAgreement : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(OracleAgreement, SoundCompleteSymmetric) {
  const auto& r = resources();
  auto x = test::documents_of(make_gold_fixture(test::small_fixture_options(GetParam()), r), r);
  if (x.a.size() * x.b.size() > kOracleMaxProduct) GTEST_SKIP() << "fixture above the oracle guard";
  AlignParams p;
  auto out = align_pair(x.a, x.b, p, r.costs);
  for (const auto& q : out) {
    EXPECT_TRUE(oracle_accepts(x.a.stems, x.b.stems, p, r.costs, q.a, q.b));
    EXPECT_NEAR(q.score, double(q.matched) - q.cost, 1e-9);
  }
  for (const auto& m : oracle_align(x.a, x.b, p, r.costs)) EXPECT_TRUE(test::covered(out, m, 0.9));

  auto back = align_pair(x.b, x.a, p, r.costs);
  ASSERT_EQ(back.size(), out.size());
  std::vector<std::pair<Span, Span>> fwd, rev;
  for (const auto& q : out) fwd.emplace_back(q.a, q.b);
  for (const auto& q : back) rev.emplace_back(q.b, q.a);
  std::sort(rev.begin(), rev.end());
  std::sort(fwd.begin(), fwd.end());
  EXPECT_EQ(fwd, rev);
}

INSTANTIATE_TEST_SUITE_P(Seeds, OracleAgreement, ::testing::Values(101, 102, 103, 104, 105, 106));

TEST(Oracle, IdenticalAndDisjoint) {
  auto a = doc("a", distinct_syllables(10));
  auto c = doc("c", distinct_syllables(10, 12));
  auto full = oracle_align(a, a, AlignParams{}, resources().costs);
  bool found = false;
  for (const auto& m : full) found |= m.a == Span{0, 9} && m.b == Span{0, 9};
  EXPECT_TRUE(found);
  EXPECT_TRUE(oracle_align(a, c, AlignParams{}, resources().costs).empty());
}

TEST(Oracle, Guard) {
  std::vector<Stem> big(400, foreign_stem("x"));
  try {
    oracle_align(big, big, AlignParams{}, resources().costs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::too_large);
  }
}

TEST(Monotonicity, LargerBudgetKeepsCoverage) {
  const auto& r = resources();
  auto x = test::documents_of(make_gold_fixture(test::small_fixture_options(111), r), r);
  AlignParams tight;
  tight.error_budget = 0.15;
  AlignParams loose;
  loose.error_budget = 0.3;
  auto out = align_pair(x.a, x.b, loose, r.costs);
  for (const auto& q : align_pair(x.a, x.b, tight, r.costs)) EXPECT_TRUE(test::covered(out, q, 0.9));
}

TEST(Chunked, MatchesSinglePass) {
  const auto& r = resources();
  auto x = test::documents_of(make_gold_fixture(test::large_fixture_options(5, 1500), r), r);
  AlignParams p;
  auto ref = align_pair(x.a, x.b, p, r.costs);
  ASSERT_FALSE(ref.empty());
  for (std::size_t workers : {1, 2, 8}) {
    ChunkOptions o{300, 100, workers};
    EXPECT_EQ(align_chunked(x.a, x.b, p, r.costs, o), ref) << workers << " workers";
  }
  EXPECT_EQ(align_chunked(x.a, x.b, p, r.costs, ChunkOptions{5000, 400, 1}), ref);
}

TEST(Chunked, Preconditions) {
  const auto& r = resources();
  auto a = doc("a", distinct_syllables(20));
  auto expect_bad = [&](ChunkOptions o) {
    try {
      align_chunked(a, a, AlignParams{}, r.costs, o);
      ADD_FAILURE() << "no error";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::bad_chunking);
    }
  };
  expect_bad({100, 0, 1});
  expect_bad({100, 50, 1});
  EXPECT_THROW(align_chunked(a, a, AlignParams{}, r.costs, ChunkOptions{100, 20, 0}), Error);
}

TEST(Chunked, PassageLongerThanOverlapIsReported) {
  // Overlap meets the minimum but a 60-syllable passage straddles chunk
  // borders; the guard reports it instead of returning a partial result.
  const auto& r = resources();
  std::vector<std::string> s;
  for (const auto& t : distinct_syllables(32)) s.push_back(t);
  for (const auto& t : distinct_syllables(28)) s.push_back(t + "s");
  auto a = doc("a", s);
  try {
    align_chunked(a, a, AlignParams{}, r.costs, ChunkOptions{40, 18, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::bad_chunking);
  }
}

TEST(ClassifyVariant, Examples) {
  const auto& r = resources();
  auto syl = [&](std::string_view s) { return std::optional<SyllableTuple>(analyze_syllable(s, r.tables)); };
  const std::optional<SyllableTuple> none;
  EXPECT_EQ(classify_variant(syl("bsgrubs"), syl("sgrub"), r), VariantClass::non_substantial);
  EXPECT_EQ(classify_variant(syl("gi"), none, r), VariantClass::non_substantial);
  EXPECT_EQ(classify_variant(none, syl("kyi"), r), VariantClass::non_substantial);
  EXPECT_EQ(classify_variant(syl("sgrub"), syl("mthong"), r), VariantClass::substantial_substitution);
  EXPECT_EQ(classify_variant(syl("sgrub"), syl("sgrub"), r), VariantClass::identical);
  EXPECT_EQ(classify_variant(syl("la"), syl("na"), r), VariantClass::non_substantial);
  EXPECT_EQ(classify_variant(syl("sgrub"), none, r), VariantClass::substantial_gap);
  try {
    classify_variant(none, none, r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::both_absent);
  }
}

TEST(ReplacementStats, IdenticalDocuments) {
  auto a = doc("a", distinct_syllables(12));
  auto out = align_pair(a, a, AlignParams{}, resources().costs);
  auto rep = replacement_stats(out, a, a);
  EXPECT_EQ(rep.aligned_positions, 12u);
  EXPECT_EQ(rep.classes[VariantClass::identical], 12u);
  EXPECT_TRUE(rep.slot_changes.empty());
}

TEST(ReplacementStats, OneParticleSwap) {
  auto s = distinct_syllables(12);
  s.insert(s.begin() + 6, "gi");
  auto t = s;
  t[6] = "kyi";
  auto a = doc("a", s), b = doc("b", t);
  auto out = align_pair(a, b, AlignParams{}, resources().costs);
  ASSERT_EQ(out.size(), 1u);
  auto rep = replacement_stats(out, a, b);
  EXPECT_EQ(rep.aligned_positions, 13u);
  EXPECT_EQ(rep.classes[VariantClass::non_substantial], 1u);
  EXPECT_EQ(rep.classes[VariantClass::identical], 12u);
  EXPECT_EQ(rep.slot_changes["core"]["g>k"], 1u);
  EXPECT_EQ(rep.slot_changes["subscript"]["->y"], 1u);
}

TEST(ReplacementStats, TotalsEqualAlignedPositions) {
  const auto& r = resources();
  auto x = test::documents_of(make_gold_fixture(test::small_fixture_options(9), r), r);
  auto out = align_pair(x.a, x.b, AlignParams{}, r.costs);
  auto rep = replacement_stats(out, x.a, x.b);
  EXPECT_EQ(rep.classes.total(), rep.aligned_positions);
  VariantCounts sum;
  for (const auto& q : out) sum += q.variants;
  EXPECT_EQ(sum, rep.classes);
}
