#pragma once

// Fixture builders shared by the unit tests and the acceptance run.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tibtext/align.hpp"
#include "tibtext/corpus.hpp"
#include "tibtext/document.hpp"

namespace tibtext::test {

struct DocPair {
  Document a, b;
  GoldFixture fixture;
};

inline DocPair documents_of(GoldFixture fx, const Resources& res) {
  DocPair d;
  d.a = make_document(fx.id_a, fx.text_a, res);
  d.b = make_document(fx.id_b, fx.text_b, res);
  d.fixture = std::move(fx);
  return d;
}

// Two planted passages in short documents; stays under the oracle guard.
inline FixtureOptions small_fixture_options(std::uint64_t seed) {
  FixtureOptions o;
  o.seed = seed;
  o.n_pairs = 2;
  o.min_plant = 15;
  o.max_plant = 40;
  o.min_filler = 20;
  o.max_filler = 60;
  o.rates = {0.10, 0.05, 0.05, 0.05, 0.03};
  return o;
}

// Documents of roughly n syllables each with a handful of plants.
inline FixtureOptions large_fixture_options(std::uint64_t seed, std::size_t n) {
  FixtureOptions o;
  o.seed = seed;
  o.n_pairs = 20;
  o.min_filler = n / 21 - 30;
  o.max_filler = n / 21 + 30;
  o.vocabulary = 4000;
  return o;
}

// Whether some output covers at least `share` of the reference span pair.
inline bool covered(const std::vector<ParallelPassage>& out, const ParallelPassage& ref, double share) {
  for (const auto& q : out)
    if (double(overlap_length(q.a, ref.a)) >= share * double(ref.a.length()) &&
        double(overlap_length(q.b, ref.b)) >= share * double(ref.b.length()))
      return true;
  return false;
}

}  // namespace tibtext::test
