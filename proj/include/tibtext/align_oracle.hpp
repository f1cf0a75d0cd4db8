#pragma once

// Brute-force reference for the aligner on small inputs. It shares only the
// acceptance predicate with align.hpp: a span pair is accepted when both
// ends are matching positions, both lengths reach L, and the cheapest chain
// of matching positions between the ends (steps of 1..g+1 on each side,
// skipped syllables costing 1 each, plus vertex costs) stays within
// tau * max(length).

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "tibtext/align.hpp"

namespace tibtext {

inline constexpr std::size_t kOracleMaxProduct = 100000;

namespace detail {

struct OracleGrid {
  std::size_t n = 0, m = 0;
  std::vector<double> vertex;  // cost, or +inf when not a matching position

  double at(std::size_t i, std::size_t j) const { return vertex[i * m + j]; }
};

inline OracleGrid oracle_grid(std::span<const Stem> a, std::span<const Stem> b, const AlignParams& p,
                              const CostTable& costs) {
  if (a.empty() || b.empty()) throw Error(Errc::empty_document, "cannot align an empty document");
  if (a.size() * b.size() > kOracleMaxProduct)
    throw Error(Errc::too_large, "oracle is limited to " + std::to_string(kOracleMaxProduct) + " position pairs");
  OracleGrid g{a.size(), b.size(), std::vector<double>(a.size() * b.size())};
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      double d = stem_distance(a[i], b[j], costs);
      g.vertex[i * g.m + j] = d <= p.vertex_threshold + 1e-12 ? d : inf;
    }
  return g;
}

// Cheapest chain cost from (s1, s2) to every later cell, row by row.
inline void oracle_costs_from(const OracleGrid& g, std::size_t s1, std::size_t s2, std::size_t gap,
                              std::vector<double>& dist) {
  const double inf = std::numeric_limits<double>::infinity();
  std::fill(dist.begin(), dist.end(), inf);
  dist[s1 * g.m + s2] = g.at(s1, s2);
  const std::size_t reach = gap + 1;
  std::size_t last_live_row = s1;
  for (std::size_t i = s1 + 1; i < g.n && i <= last_live_row + reach; ++i) {
    for (std::size_t j = s2 + 1; j < g.m; ++j) {
      double c = g.at(i, j);
      if (c == inf) continue;
      double best = inf;
      for (std::size_t pi = (i >= s1 + reach ? i - reach : s1); pi < i; ++pi)
        for (std::size_t pj = (j >= s2 + reach ? j - reach : s2); pj < j; ++pj) {
          double d = dist[pi * g.m + pj];
          if (d == inf) continue;
          best = std::min(best, d + double(i - pi - 1) + double(j - pj - 1));
        }
      if (best == inf) continue;
      dist[i * g.m + j] = best + c;
      last_live_row = i;
    }
  }
}

}  // namespace detail

// Whether the span pair passes the acceptance predicate.
inline bool oracle_accepts(std::span<const Stem> a, std::span<const Stem> b, const AlignParams& p,
                           const CostTable& costs, Span sa, Span sb) {
  if (sa.end >= a.size() || sb.end >= b.size() || sa.start > sa.end || sb.start > sb.end) return false;
  if (sa.length() < p.min_length || sb.length() < p.min_length) return false;
  auto sub_a = a.subspan(sa.start, sa.length());
  auto sub_b = b.subspan(sb.start, sb.length());
  auto g = detail::oracle_grid(sub_a, sub_b, p, costs);
  if (g.at(0, 0) == std::numeric_limits<double>::infinity()) return false;
  std::vector<double> dist(g.n * g.m);
  detail::oracle_costs_from(g, 0, 0, p.max_gap, dist);
  return within_budget(dist.back(), sa.length(), sb.length(), p.error_budget);
}

// All accepted span pairs not strictly contained in another accepted pair.
inline std::vector<ParallelPassage> oracle_align(std::span<const Stem> a, std::span<const Stem> b,
                                                 const AlignParams& p, const CostTable& costs) {
  p.validate();
  auto g = detail::oracle_grid(a, b, p, costs);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.n * g.m);
  std::vector<ParallelPassage> accepted;
  for (std::size_t s1 = 0; s1 < g.n; ++s1)
    for (std::size_t s2 = 0; s2 < g.m; ++s2) {
      if (g.at(s1, s2) == inf) continue;
      if (s1 + p.min_length > g.n || s2 + p.min_length > g.m) continue;
      detail::oracle_costs_from(g, s1, s2, p.max_gap, dist);
      for (std::size_t e1 = s1 + p.min_length - 1; e1 < g.n; ++e1)
        for (std::size_t e2 = s2 + p.min_length - 1; e2 < g.m; ++e2) {
          double d = dist[e1 * g.m + e2];
          if (d == inf || !within_budget(d, e1 - s1 + 1, e2 - s2 + 1, p.error_budget)) continue;
          ParallelPassage pp;
          pp.a = {s1, e1};
          pp.b = {s2, e2};
          pp.cost = d;
          accepted.push_back(pp);
        }
    }
  std::sort(accepted.begin(), accepted.end(), [](const ParallelPassage& x, const ParallelPassage& y) {
    std::size_t sx = x.a.length() + x.b.length(), sy = y.a.length() + y.b.length();
    if (sx != sy) return sx > sy;
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  auto contains = [](const ParallelPassage& outer, const ParallelPassage& inner) {
    return outer.a.start <= inner.a.start && inner.a.end <= outer.a.end && outer.b.start <= inner.b.start &&
           inner.b.end <= outer.b.end;
  };
  std::vector<ParallelPassage> maximal;
  for (const auto& x : accepted) {
    bool inside = false;
    for (const auto& y : maximal)
      if (contains(y, x)) {
        inside = true;
        break;
      }
    if (!inside) maximal.push_back(x);
  }
  std::sort(maximal.begin(), maximal.end(), detail::passage_order);
  return maximal;
}

inline std::vector<ParallelPassage> oracle_align(const Document& a, const Document& b, const AlignParams& p,
                                                 const CostTable& costs) {
  return oracle_align(std::span<const Stem>(a.stems), std::span<const Stem>(b.stems), p, costs);
}

}  // namespace tibtext
