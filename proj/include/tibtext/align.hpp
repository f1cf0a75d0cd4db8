#pragma once

// Approximate parallel passages between two documents: a match graph over
// stem positions, a dynamic program for best feasible paths ending at each
// vertex, greedy one-vertex-one-path emission, and a chunked parallel driver
// that reproduces the single-pass result exactly.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "tibtext/document.hpp"
#include "tibtext/error.hpp"
#include "tibtext/resources.hpp"
#include "tibtext/stem.hpp"

namespace tibtext {

struct AlignParams {
  double vertex_threshold = 0.0;  // max stem distance for a vertex
  std::size_t max_gap = 2;        // syllables skipped per step, each side
  double error_budget = 0.25;     // max path cost per syllable of span
  std::size_t min_length = 6;

  void validate() const {
    if (!(vertex_threshold >= 0.0) || !std::isfinite(vertex_threshold))
      throw Error(Errc::invalid_argument, "vertex threshold must be finite and >= 0");
    if (!(error_budget >= 0.0 && error_budget < 1.0))
      throw Error(Errc::invalid_argument, "error budget must lie in [0, 1)");
    if (min_length < 2) throw Error(Errc::invalid_argument, "minimum passage length must be >= 2");
    if (max_gap > 64) throw Error(Errc::invalid_argument, "gap bound above 64 is not supported");
  }
};

// Inclusive syllable index range.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start + 1; }
  bool operator==(const Span&) const = default;
  auto operator<=>(const Span&) const = default;
};

inline std::size_t overlap_length(const Span& x, const Span& y) {
  std::size_t lo = std::max(x.start, y.start), hi = std::min(x.end, y.end);
  return lo > hi ? 0 : hi - lo + 1;
}

struct Cell {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  bool operator==(const Cell&) const = default;
  auto operator<=>(const Cell&) const = default;
};

// Cost of stepping from u to v: syllables skipped on both sides.
inline double gap_cost(Cell u, Cell v) { return double(v.i - u.i - 1) + double(v.j - u.j - 1); }

// Feasibility of a path with the given total cost and span lengths.
inline bool within_budget(double cost, std::size_t len_a, std::size_t len_b, double tau) {
  return cost <= tau * static_cast<double>(std::max(len_a, len_b)) + 1e-9;
}

// ---------------------------------------------------------------------------
// Match graph

// Vertices in lexicographic (row, column) order, stored row-compressed.
// Edges are implicit: u -> v whenever both coordinates advance by 1..g+1.
class MatchGraph {
 public:
  MatchGraph() = default;
  MatchGraph(std::size_t rows, std::size_t cols, std::size_t max_gap)
      : rows_(rows), cols_(cols), max_gap_(max_gap), row_start_(rows + 1, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t max_gap() const { return max_gap_; }
  std::size_t vertex_count() const { return col_.size(); }

  Cell cell(std::size_t v) const { return {row_of_[v], col_[v]}; }
  double vertex_cost(std::size_t v) const { return has_cost_ ? cost_[v] : 0.0; }

  std::size_t row_begin(std::size_t i) const { return row_start_[i]; }
  std::size_t row_end(std::size_t i) const { return row_start_[i + 1]; }

  std::optional<std::size_t> find(std::size_t i, std::size_t j) const {
    if (i >= rows_) return std::nullopt;
    auto first = col_.begin() + static_cast<std::ptrdiff_t>(row_start_[i]);
    auto last = col_.begin() + static_cast<std::ptrdiff_t>(row_start_[i + 1]);
    auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return std::nullopt;
    return static_cast<std::size_t>(it - col_.begin());
  }

  template <class F>
  void for_each_predecessor(std::size_t v, F&& f) const {
    const Cell c = cell(v);
    const std::size_t reach = max_gap_ + 1;
    const std::size_t r0 = c.i >= reach ? c.i - reach : 0;
    const std::uint32_t j0 = c.j >= reach ? static_cast<std::uint32_t>(c.j - reach) : 0;
    for (std::size_t r = r0; r < c.i; ++r) scan_row(r, j0, c.j, f);
  }

  template <class F>
  void for_each_successor(std::size_t v, F&& f) const {
    const Cell c = cell(v);
    const std::size_t reach = max_gap_ + 1;
    const std::size_t r1 = std::min<std::size_t>(rows_, c.i + reach + 1);
    const std::uint64_t j1 = std::min<std::uint64_t>(cols_, std::uint64_t{c.j} + reach + 1);
    for (std::size_t r = c.i + 1; r < r1; ++r) scan_row(r, c.j + 1, static_cast<std::uint32_t>(j1), f);
  }

  std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t v = 0; v < vertex_count(); ++v)
      for_each_successor(v, [&](std::size_t w) { out.emplace_back(v, w); });
    return out;
  }

  double edge_weight(std::size_t u, std::size_t v) const { return gap_cost(cell(u), cell(v)) + vertex_cost(v); }

  // Appends the vertices of the next row; columns must be increasing.
  void add_row(const std::vector<std::pair<std::uint32_t, double>>& row) {
    const std::size_t i = next_row_++;
    for (const auto& [j, c] : row) {
      if (c != 0.0 && !has_cost_) {
        cost_.assign(col_.size(), 0.0);
        has_cost_ = true;
      }
      col_.push_back(j);
      row_of_.push_back(static_cast<std::uint32_t>(i));
      if (has_cost_) cost_.push_back(c);
    }
    row_start_[i + 1] = col_.size();
  }

 private:
  // Calls f(v) for vertices of row r with column in [lo, hi).
  template <class F>
  void scan_row(std::size_t r, std::uint32_t lo, std::uint32_t hi, F& f) const {
    auto first = col_.begin() + static_cast<std::ptrdiff_t>(row_start_[r]);
    auto last = col_.begin() + static_cast<std::ptrdiff_t>(row_start_[r + 1]);
    for (auto it = std::lower_bound(first, last, lo); it != last && *it < hi; ++it)
      f(static_cast<std::size_t>(it - col_.begin()));
  }

  std::size_t rows_ = 0, cols_ = 0, max_gap_ = 0, next_row_ = 0;
  std::vector<std::size_t> row_start_;
  std::vector<std::uint32_t> col_;
  std::vector<std::uint32_t> row_of_;
  std::vector<double> cost_;  // empty when every vertex is free
  bool has_cost_ = false;
};

// Exact-key graph through an inverted index of b.
inline MatchGraph build_match_graph(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                                   std::size_t max_gap) {
  if (a.empty() || b.empty()) throw Error(Errc::empty_document, "cannot align an empty document");
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> index;
  for (std::size_t j = 0; j < b.size(); ++j) index[b[j]].push_back(static_cast<std::uint32_t>(j));
  MatchGraph g(a.size(), b.size(), max_gap);
  std::vector<std::pair<std::uint32_t, double>> row;
  for (std::size_t i = 0; i < a.size(); ++i) {
    row.clear();
    if (auto it = index.find(a[i]); it != index.end())
      for (std::uint32_t j : it->second) row.emplace_back(j, 0.0);
    g.add_row(row);
  }
  return g;
}

// Stem graph. Exact keys when only identical stems can be within the
// threshold; otherwise distinct stem pairs are compared once each and the
// matches expanded through the inverted index.
inline MatchGraph build_match_graph(std::span<const Stem> a, std::span<const Stem> b, const AlignParams& p,
                                   const CostTable& costs) {
  p.validate();
  if (a.empty() || b.empty()) throw Error(Errc::empty_document, "cannot align an empty document");
  if (p.vertex_threshold == 0.0 && !costs.has_free_stem_edit()) {
    std::vector<std::uint64_t> ka, kb;
    ka.reserve(a.size());
    kb.reserve(b.size());
    for (const auto& s : a) ka.push_back(s.key());
    for (const auto& s : b) kb.push_back(s.key());
    return build_match_graph(ka, kb, p.max_gap);
  }
  std::map<std::uint64_t, std::size_t> b_ids;
  std::vector<Stem> b_distinct;
  std::vector<std::vector<std::uint32_t>> b_positions;
  for (std::size_t j = 0; j < b.size(); ++j) {
    auto [it, fresh] = b_ids.emplace(b[j].key(), b_distinct.size());
    if (fresh) {
      b_distinct.push_back(b[j]);
      b_positions.emplace_back();
    }
    b_positions[it->second].push_back(static_cast<std::uint32_t>(j));
  }
  std::unordered_map<std::uint64_t, std::vector<std::pair<std::size_t, double>>> near;
  MatchGraph g(a.size(), b.size(), p.max_gap);
  std::vector<std::pair<std::uint32_t, double>> row;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto it = near.find(a[i].key());
    if (it == near.end()) {
      std::vector<std::pair<std::size_t, double>> hits;
      for (std::size_t k = 0; k < b_distinct.size(); ++k) {
        double d = stem_distance(a[i], b_distinct[k], costs);
        if (d <= p.vertex_threshold + 1e-12) hits.emplace_back(k, d);
      }
      it = near.emplace(a[i].key(), std::move(hits)).first;
    }
    row.clear();
    for (const auto& [k, d] : it->second)
      for (std::uint32_t j : b_positions[k]) row.emplace_back(j, d);
    std::sort(row.begin(), row.end());
    g.add_row(row);
  }
  return g;
}

inline MatchGraph build_match_graph(const Document& a, const Document& b, const AlignParams& p,
                                   const CostTable& costs) {
  return build_match_graph(std::span<const Stem>(a.stems), std::span<const Stem>(b.stems), p, costs);
}

// ---------------------------------------------------------------------------
// Paths

struct AlignedPath {
  std::vector<Cell> cells;
  double cost = 0.0;
  double score = 0.0;
  Span a, b;

  std::size_t matched() const { return cells.size(); }
};

// Total cost and spans of a vertex chain.
inline AlignedPath make_path(const MatchGraph& g, const std::vector<std::size_t>& vertices) {
  AlignedPath p;
  p.cells.reserve(vertices.size());
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    p.cells.push_back(g.cell(vertices[k]));
    p.cost += g.vertex_cost(vertices[k]);
    if (k) p.cost += gap_cost(p.cells[k - 1], p.cells[k]);
  }
  p.a = {p.cells.front().i, p.cells.back().i};
  p.b = {p.cells.front().j, p.cells.back().j};
  p.score = static_cast<double>(p.cells.size()) - p.cost;
  return p;
}

namespace detail {

constexpr std::uint32_t kNoVertex = std::numeric_limits<std::uint32_t>::max();

struct PathState {
  std::uint32_t start_i = 0, start_j = 0;
  std::uint32_t matched = 0;
  std::uint32_t back = kNoVertex;
  double cost = 0.0;

  double score() const { return static_cast<double>(matched) - cost; }
};

// Strict preference between two states ending at the same vertex.
inline bool better_state(const PathState& x, Cell x_pred, const PathState& y, Cell y_pred) {
  const double sx = x.score(), sy = y.score();
  if (std::abs(sx - sy) > 1e-12) return sx > sy;
  if (std::abs(x.cost - y.cost) > 1e-12) return x.cost < y.cost;
  if (x.start_i != y.start_i) return x.start_i < y.start_i;
  if (x.start_j != y.start_j) return x.start_j < y.start_j;
  return x_pred > y_pred;
}

struct Candidate {
  double score;
  Cell start, end;
  std::size_t id;  // end vertex, or index into the explicit chain store

  bool explicit_chain;
};

struct CandidateOrder {
  // Max-heap order: higher score first, then smaller start, then smaller end.
  bool operator()(const Candidate& x, const Candidate& y) const {
    if (std::abs(x.score - y.score) > 1e-12) return x.score < y.score;
    if (x.start != y.start) return x.start > y.start;
    if (x.end != y.end) return x.end > y.end;
    return x.id > y.id;
  }
};

}  // namespace detail

// Best feasible path ending at every vertex, then greedy emission: the
// highest-scoring candidate whose vertices are all unused is emitted and
// extended at both ends while feasible; a candidate that meets a used vertex
// is cut back to its unused suffix and requeued. Emitted paths that can be
// chained within budget are joined at the end.
inline std::vector<AlignedPath> find_maximal_paths(const MatchGraph& g, const AlignParams& p) {
  p.validate();
  using detail::PathState;
  const std::size_t n = g.vertex_count();
  if (n >= detail::kNoVertex) throw Error(Errc::too_large, "match graph exceeds 2^32 vertices");
  const double tau = p.error_budget;
  const std::size_t L = p.min_length;

  std::vector<PathState> st(n);
  for (std::size_t v = 0; v < n; ++v) {
    const Cell c = g.cell(v);
    const double cv = g.vertex_cost(v);
    PathState best{c.i, c.j, 1, detail::kNoVertex, cv};
    Cell best_pred{0, 0};  // unused while best is the fresh start: starts differ
    g.for_each_predecessor(v, [&](std::size_t u) {
      const PathState& su = st[u];
      const Cell cu = g.cell(u);
      PathState cand{su.start_i, su.start_j, su.matched + 1, static_cast<std::uint32_t>(u),
                     su.cost + gap_cost(cu, c) + cv};
      if (!within_budget(cand.cost, c.i - su.start_i + 1, c.j - su.start_j + 1, tau)) return;
      if (detail::better_state(cand, cu, best, best_pred)) {
        best = cand;
        best_pred = cu;
      }
    });
    st[v] = best;
  }

  // Chains of half the minimum length are emitted too: a mismatch near the
  // start of a passage can split it into two pieces that only the final
  // join pass puts back together. Short leftovers are dropped on merge.
  const std::size_t seed_len = (L + 1) / 2;
  std::priority_queue<detail::Candidate, std::vector<detail::Candidate>, detail::CandidateOrder> queue;
  for (std::size_t v = 0; v < n; ++v) {
    const Cell c = g.cell(v);
    if (c.i - st[v].start_i + 1 >= seed_len && c.j - st[v].start_j + 1 >= seed_len)
      queue.push({st[v].score(), {st[v].start_i, st[v].start_j}, c, v, false});
  }

  std::vector<std::vector<std::size_t>> chains;
  std::vector<std::uint32_t> owner(n, detail::kNoVertex);  // emitted path of each vertex
  auto used = [&](std::size_t v) { return owner[v] != detail::kNoVertex; };
  std::vector<AlignedPath> out;
  std::vector<std::vector<std::size_t>> emitted;
  std::vector<std::size_t> chain;

  auto feasible = [&](const AlignedPath& path) { return within_budget(path.cost, path.a.length(), path.b.length(), tau); };

  auto extend = [&](std::vector<std::size_t>& vs) {
    AlignedPath path = make_path(g, vs);
    bool grew = true;
    while (grew) {
      grew = false;
      // forward
      for (;;) {
        const std::size_t last = vs.back();
        const Cell cl = g.cell(last);
        std::optional<std::size_t> pick;
        double pick_add = 0.0;
        g.for_each_successor(last, [&](std::size_t w) {
          if (used(w)) return;
          const Cell cw = g.cell(w);
          double add = gap_cost(cl, cw) + g.vertex_cost(w);
          if (!within_budget(path.cost + add, cw.i - path.a.start + 1, cw.j - path.b.start + 1, tau)) return;
          if (!pick || add < pick_add - 1e-12 || (std::abs(add - pick_add) <= 1e-12 && cw < g.cell(*pick))) {
            pick = w;
            pick_add = add;
          }
        });
        if (!pick) break;
        vs.push_back(*pick);
        path.cost += pick_add;
        path.a.end = g.cell(*pick).i;
        path.b.end = g.cell(*pick).j;
        grew = true;
      }
      // backward
      for (;;) {
        const std::size_t first = vs.front();
        const Cell cf = g.cell(first);
        std::optional<std::size_t> pick;
        double pick_add = 0.0;
        g.for_each_predecessor(first, [&](std::size_t u) {
          if (used(u)) return;
          const Cell cu = g.cell(u);
          double add = gap_cost(cu, cf) + g.vertex_cost(u);
          if (!within_budget(path.cost + add, path.a.end - cu.i + 1, path.b.end - cu.j + 1, tau)) return;
          if (!pick || add < pick_add - 1e-12 || (std::abs(add - pick_add) <= 1e-12 && cu > g.cell(*pick))) {
            pick = u;
            pick_add = add;
          }
        });
        if (!pick) break;
        vs.insert(vs.begin(), *pick);
        path.cost += pick_add;
        path.a.start = g.cell(*pick).i;
        path.b.start = g.cell(*pick).j;
        grew = true;
      }
    }
  };

  while (!queue.empty()) {
    detail::Candidate c = queue.top();
    queue.pop();
    chain.clear();
    if (c.explicit_chain) {
      chain = chains[c.id];
    } else {
      for (std::size_t v = c.id; v != detail::kNoVertex; v = st[v].back) chain.push_back(v);
      std::reverse(chain.begin(), chain.end());
    }
    std::size_t cut = 0;
    for (std::size_t k = chain.size(); k-- > 0;) {
      if (used(chain[k])) {
        cut = k + 1;
        break;
      }
    }
    if (cut == 0) {
      extend(chain);
      for (std::size_t v : chain) owner[v] = static_cast<std::uint32_t>(emitted.size());
      emitted.push_back(chain);
      continue;
    }
    if (cut >= chain.size()) continue;
    std::vector<std::size_t> rest(chain.begin() + static_cast<std::ptrdiff_t>(cut), chain.end());
    AlignedPath trimmed = make_path(g, rest);
    if (trimmed.a.length() < seed_len || trimmed.b.length() < seed_len || !feasible(trimmed)) continue;
    chains.push_back(std::move(rest));
    queue.push({trimmed.score, trimmed.cells.front(), trimmed.cells.back(), chains.size() - 1, true});
  }

  // An emitted path is fused with another when a step from its last vertex
  // lands on a vertex of the other and the combined path stays within
  // budget. The part of the other path before that vertex stays a path of
  // its own if it is still feasible.
  std::vector<char> alive(emitted.size(), 1);
  std::vector<double> cost(emitted.size());
  for (std::size_t k = 0; k < emitted.size(); ++k) cost[k] = make_path(g, emitted[k]).cost;
  auto suffix_cost = [&](const std::vector<std::size_t>& c, std::size_t from) {
    double total = g.vertex_cost(c[from]);
    for (std::size_t t = from + 1; t < c.size(); ++t) total += g.edge_weight(c[t - 1], c[t]);
    return total;
  };
  struct Join {
    std::size_t chain, index;
    double total, score;
    Cell at;
  };
  for (std::size_t k = 0; k < emitted.size(); ++k) {
    while (alive[k]) {
      auto& ck = emitted[k];
      const Cell first = g.cell(ck.front());
      const Cell last = g.cell(ck.back());
      std::optional<Join> pick;
      g.for_each_successor(ck.back(), [&](std::size_t w) {
        const std::uint32_t q = owner[w];
        if (q == detail::kNoVertex || q == k || !alive[q]) return;
        const auto& cq = emitted[q];
        const std::size_t idx = static_cast<std::size_t>(std::find(cq.begin(), cq.end(), w) - cq.begin());
        const Cell at = g.cell(w), end = g.cell(cq.back());
        const double total = cost[k] + gap_cost(last, at) + suffix_cost(cq, idx);
        if (!within_budget(total, end.i - first.i + 1, end.j - first.j + 1, tau)) return;
        const double score = double(ck.size() + cq.size() - idx) - total;
        if (!pick || score > pick->score + 1e-12 || (std::abs(score - pick->score) <= 1e-12 && at < pick->at))
          pick = Join{q, idx, total, score, at};
      });
      if (!pick) break;
      auto& cq = emitted[pick->chain];
      for (std::size_t t = pick->index; t < cq.size(); ++t) {
        owner[cq[t]] = static_cast<std::uint32_t>(k);
        ck.push_back(cq[t]);
      }
      cq.resize(pick->index);
      cost[k] = pick->total;
      if (cq.empty() || !feasible(make_path(g, cq))) alive[pick->chain] = 0;
      else cost[pick->chain] = make_path(g, cq).cost;
    }
  }
  for (std::size_t k = 0; k < emitted.size(); ++k)
    if (alive[k]) out.push_back(make_path(g, emitted[k]));
  return out;
}

// ---------------------------------------------------------------------------
// Passages and variants

enum class VariantClass : std::uint8_t { identical, non_substantial, substantial_substitution, substantial_gap };
inline constexpr std::size_t kVariantClasses = 4;
inline constexpr std::array<std::string_view, kVariantClasses> kVariantClassNames = {
    "IDENTICAL", "NON_SUBSTANTIAL", "SUBSTANTIAL_SUBSTITUTION", "SUBSTANTIAL_GAP"};

struct VariantCounts {
  std::array<std::size_t, kVariantClasses> counts{};

  std::size_t& operator[](VariantClass c) { return counts[static_cast<std::size_t>(c)]; }
  std::size_t operator[](VariantClass c) const { return counts[static_cast<std::size_t>(c)]; }
  std::size_t total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }
  VariantCounts& operator+=(const VariantCounts& o) {
    for (std::size_t k = 0; k < kVariantClasses; ++k) counts[k] += o.counts[k];
    return *this;
  }
  bool operator==(const VariantCounts&) const = default;
};

struct ParallelPassage {
  Span a, b;
  double score = 0.0;
  double cost = 0.0;
  std::size_t matched = 0;
  VariantCounts variants;
  std::vector<Cell> path;

  bool operator==(const ParallelPassage&) const = default;
};

namespace detail {

inline bool passage_order(const ParallelPassage& x, const ParallelPassage& y) {
  return std::tie(x.a.start, x.b.start, x.a.end, x.b.end) < std::tie(y.a.start, y.b.start, y.a.end, y.b.end);
}

}  // namespace detail

// Drops short paths, then keeps paths greedily by score, discarding any that
// overlaps a kept one by at least half (of the shorter span) on both sides.
inline std::vector<ParallelPassage> merge_and_filter(std::vector<AlignedPath> paths, const AlignParams& p) {
  std::erase_if(paths, [&](const AlignedPath& x) { return x.a.length() < p.min_length || x.b.length() < p.min_length; });
  std::sort(paths.begin(), paths.end(), [](const AlignedPath& x, const AlignedPath& y) {
    if (std::abs(x.score - y.score) > 1e-12) return x.score > y.score;
    return std::tie(x.a.start, x.b.start, x.a.end, x.b.end) < std::tie(y.a.start, y.b.start, y.a.end, y.b.end);
  });
  auto half_overlap = [](const Span& x, const Span& y) {
    return 2 * overlap_length(x, y) >= std::min(x.length(), y.length());
  };
  std::vector<ParallelPassage> kept;
  for (auto& path : paths) {
    bool clash = false;
    for (const auto& k : kept)
      if (half_overlap(path.a, k.a) && half_overlap(path.b, k.b)) {
        clash = true;
        break;
      }
    if (clash) continue;
    ParallelPassage pp;
    pp.a = path.a;
    pp.b = path.b;
    pp.score = path.score;
    pp.cost = path.cost;
    pp.matched = path.cells.size();
    pp.path = std::move(path.cells);
    kept.push_back(std::move(pp));
  }
  std::sort(kept.begin(), kept.end(), detail::passage_order);
  return kept;
}

// Calls f(optional i, optional j) for every aligned position of a path:
// each vertex, and inside each step the skipped syllables, paired up
// positionally as substitutions with the remainder as one-sided gaps.
template <class F>
void for_each_aligned_position(const std::vector<Cell>& path, F&& f) {
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (k) {
      const Cell u = path[k - 1], v = path[k];
      const std::size_t skip_a = v.i - u.i - 1, skip_b = v.j - u.j - 1;
      const std::size_t paired = std::min(skip_a, skip_b);
      for (std::size_t t = 0; t < paired; ++t)
        f(std::optional<std::size_t>(u.i + 1 + t), std::optional<std::size_t>(u.j + 1 + t));
      for (std::size_t t = paired; t < skip_a; ++t) f(std::optional<std::size_t>(u.i + 1 + t), std::optional<std::size_t>());
      for (std::size_t t = paired; t < skip_b; ++t) f(std::optional<std::size_t>(), std::optional<std::size_t>(u.j + 1 + t));
    }
    f(std::optional<std::size_t>(path[k].i), std::optional<std::size_t>(path[k].j));
  }
}

namespace detail {

inline VariantClass classify(bool a_present, bool b_present, bool raw_equal, bool stems_equal, bool a_particle,
                             bool b_particle) {
  if (!a_present && !b_present) throw Error(Errc::both_absent, "variant needs at least one syllable");
  if (a_present && b_present) {
    if (raw_equal) return VariantClass::identical;
    if (stems_equal || (a_particle && b_particle)) return VariantClass::non_substantial;
    return VariantClass::substantial_substitution;
  }
  return (a_present ? a_particle : b_particle) ? VariantClass::non_substantial : VariantClass::substantial_gap;
}

}  // namespace detail

// Variant class of one aligned position given as syllable tuples. Raw
// equality is tuple equality; foreign tuples carry no text and only count
// as identical when both are the same foreign token, which a bare tuple
// cannot show, so they classify as substitutions.
inline VariantClass classify_variant(const std::optional<SyllableTuple>& a, const std::optional<SyllableTuple>& b,
                                     const Resources& res) {
  auto particle = [&](const std::optional<SyllableTuple>& t) {
    return t && !t->foreign && res.particles.contains(render_syllable(*t, res.tables));
  };
  bool raw_equal = a && b && !a->foreign && !b->foreign && *a == *b;
  bool stems_equal = a && b && !a->foreign && !b->foreign && stem_identical(*a, *b, res.rules);
  return detail::classify(a.has_value(), b.has_value(), raw_equal, stems_equal, particle(a), particle(b));
}

// Same decision over document positions, using the surface text.
inline VariantClass classify_position(const Document& a, std::optional<std::size_t> i, const Document& b,
                                      std::optional<std::size_t> j) {
  bool raw_equal = i && j && a.surface[*i] == b.surface[*j];
  bool stems_equal = i && j && a.stems[*i].same_as(b.stems[*j]);
  return detail::classify(i.has_value(), j.has_value(), raw_equal, stems_equal, i && a.is_particle[*i],
                          j && b.is_particle[*j]);
}

inline VariantCounts count_variants(const std::vector<Cell>& path, const Document& a, const Document& b) {
  VariantCounts vc;
  for_each_aligned_position(path, [&](auto i, auto j) { ++vc[classify_position(a, i, b, j)]; });
  return vc;
}

struct ReplacementReport {
  VariantCounts classes;
  std::size_t aligned_positions = 0;
  // slot name -> "from>to" -> count, over aligned native syllable pairs
  // whose text differs; "-" marks an empty slot.
  std::map<std::string, std::map<std::string, std::size_t>> slot_changes;
};

inline ReplacementReport replacement_stats(const std::vector<ParallelPassage>& passages, const Document& a,
                                           const Document& b) {
  ReplacementReport r;
  auto letter = [](std::optional<Letter> l) { return l ? std::string(wylie_form(*l)) : std::string("-"); };
  for (const auto& pp : passages) {
    for_each_aligned_position(pp.path, [&](std::optional<std::size_t> i, std::optional<std::size_t> j) {
      ++r.aligned_positions;
      ++r.classes[classify_position(a, i, b, j)];
      if (!i || !j || a.surface[*i] == b.surface[*j]) return;
      const SyllableTuple& x = a.syllables[*i];
      const SyllableTuple& y = b.syllables[*j];
      if (x.foreign || y.foreign) return;
      auto note = [&](const char* slot, const std::string& from, const std::string& to) {
        if (from != to) ++r.slot_changes[slot][from + ">" + to];
      };
      note("prescript", letter(x.prescript), letter(y.prescript));
      note("superscript", letter(x.superscript), letter(y.superscript));
      note("core", letter(x.core), letter(y.core));
      note("subscript", letter(x.subscript), letter(y.subscript));
      note("vowel", letter(x.vowel), letter(y.vowel));
      note("coda", letter(x.coda), letter(y.coda));
      note("postscript", letter(x.postscript), letter(y.postscript));
      note("particle", x.particle.value_or("-"), y.particle.value_or("-"));
    });
  }
  return r;
}

// ---------------------------------------------------------------------------
// Drivers

namespace detail {

// Documents are processed in a canonical order so that swapping the inputs
// yields exactly the mirrored result.
inline bool keys_precede(std::span<const std::uint64_t> x, std::span<const std::uint64_t> y) {
  if (x.size() != y.size()) return x.size() < y.size();
  return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
}

inline void mirror(std::vector<AlignedPath>& paths) {
  for (auto& p : paths) {
    for (auto& c : p.cells) std::swap(c.i, c.j);
    std::swap(p.a, p.b);
  }
}

}  // namespace detail

// Paths on exact keys, in canonical orientation, reported for (a, b).
inline std::vector<AlignedPath> key_paths(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                                          const AlignParams& p) {
  if (detail::keys_precede(b, a)) {
    auto paths = find_maximal_paths(build_match_graph(b, a, p.max_gap), p);
    detail::mirror(paths);
    return paths;
  }
  return find_maximal_paths(build_match_graph(a, b, p.max_gap), p);
}

// Alignment over arbitrary key sequences (used for character-level runs).
inline std::vector<ParallelPassage> align_keys(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                                               const AlignParams& p) {
  p.validate();
  return merge_and_filter(key_paths(a, b, p), p);
}

inline std::vector<AlignedPath> stem_paths(std::span<const Stem> a, std::span<const Stem> b, const AlignParams& p,
                                           const CostTable& costs) {
  std::vector<std::uint64_t> ka, kb;
  for (const auto& s : a) ka.push_back(s.key());
  for (const auto& s : b) kb.push_back(s.key());
  if (detail::keys_precede(kb, ka)) {
    auto paths = find_maximal_paths(build_match_graph(b, a, p, costs), p);
    detail::mirror(paths);
    return paths;
  }
  return find_maximal_paths(build_match_graph(a, b, p, costs), p);
}

inline void annotate(std::vector<ParallelPassage>& passages, const Document& a, const Document& b) {
  for (auto& pp : passages) pp.variants = count_variants(pp.path, a, b);
}

inline std::vector<ParallelPassage> align_pair(const Document& a, const Document& b, const AlignParams& p,
                                               const CostTable& costs) {
  p.validate();
  if (a.empty() || b.empty()) throw Error(Errc::empty_document, "cannot align an empty document");
  auto passages = merge_and_filter(stem_paths(a.stems, b.stems, p, costs), p);
  annotate(passages, a, b);
  return passages;
}

struct ChunkOptions {
  std::size_t chunk_size = 2000;
  std::size_t overlap = 400;
  std::size_t workers = 1;
};

namespace detail {

struct ChunkRange {
  std::size_t begin, end;  // [begin, end)
  std::size_t safe_lo, safe_hi;  // rows whose whole neighbourhood lies inside
};

inline std::vector<ChunkRange> chunk_ranges(std::size_t n, const ChunkOptions& o, std::size_t reach) {
  std::vector<ChunkRange> out;
  const std::size_t stride = o.chunk_size - o.overlap;
  for (std::size_t s = 0;; s += stride) {
    std::size_t e = std::min(n, s + o.chunk_size);
    ChunkRange r{s, e, s == 0 ? 0 : s + reach, e == n ? n : (e >= reach ? e - reach : 0)};
    out.push_back(r);
    if (e == n) break;
  }
  return out;
}

inline std::optional<std::size_t> owner_chunk(const std::vector<ChunkRange>& chunks, std::size_t lo, std::size_t hi) {
  for (std::size_t k = 0; k < chunks.size(); ++k)
    if (lo >= chunks[k].safe_lo && hi < chunks[k].safe_hi) return k;
  return std::nullopt;
}

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::uint32_t x, std::uint32_t y) {
    x = find(x);
    y = find(y);
    if (x != y) parent[std::max(x, y)] = std::min(x, y);
  }
};

struct ChunkResult {
  std::vector<AlignedPath> paths;         // from components this task owns
  std::vector<std::uint64_t> owned_cells;  // every vertex of those components
  std::vector<std::uint64_t> probes;       // one vertex per unsafe component
};

inline std::uint64_t cell_code(Cell c) { return std::uint64_t{c.i} << 32 | c.j; }

// Runs the single-pass algorithm on every chunk pair and keeps the paths of
// connected components that lie wholly inside a chunk's interior, each
// component assigned to exactly one chunk pair. A component that no chunk
// pair holds whole means the overlap was too small.
inline std::vector<AlignedPath> chunked_paths(std::span<const Stem> x, std::span<const Stem> y, const AlignParams& p,
                                              const CostTable& costs, const ChunkOptions& o) {
  const std::size_t reach = p.max_gap + 1;
  if (o.chunk_size <= 2 * o.overlap)
    throw Error(Errc::bad_chunking, "chunk size must exceed twice the overlap");
  if (o.overlap < p.min_length + 2 * reach)
    throw Error(Errc::bad_chunking, "overlap must be at least min_length + 2*(max_gap+1) = " +
                                        std::to_string(p.min_length + 2 * reach));
  if (o.workers == 0) throw Error(Errc::invalid_argument, "worker count must be positive");
  const auto cx = chunk_ranges(x.size(), o, reach);
  const auto cy = chunk_ranges(y.size(), o, reach);
  const std::size_t tasks = cx.size() * cy.size();
  std::vector<ChunkResult> results(tasks);
  std::vector<std::exception_ptr> errors(tasks);

  auto run = [&](std::size_t t) {
    const std::size_t kx = t / cy.size(), ky = t % cy.size();
    const ChunkRange& rx = cx[kx];
    const ChunkRange& ry = cy[ky];
    MatchGraph g = build_match_graph(x.subspan(rx.begin, rx.end - rx.begin), y.subspan(ry.begin, ry.end - ry.begin),
                                     p, costs);
    const std::size_t n = g.vertex_count();
    UnionFind uf(n);
    for (std::size_t v = 0; v < n; ++v)
      g.for_each_successor(v, [&](std::size_t w) { uf.unite(static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(w)); });
    struct Box {
      std::size_t i0 = SIZE_MAX, i1 = 0, j0 = SIZE_MAX, j1 = 0;
    };
    std::vector<Box> box(n);
    for (std::size_t v = 0; v < n; ++v) {
      Box& b = box[uf.find(static_cast<std::uint32_t>(v))];
      Cell c = g.cell(v);
      b.i0 = std::min<std::size_t>(b.i0, c.i + rx.begin);
      b.i1 = std::max<std::size_t>(b.i1, c.i + rx.begin);
      b.j0 = std::min<std::size_t>(b.j0, c.j + ry.begin);
      b.j1 = std::max<std::size_t>(b.j1, c.j + ry.begin);
    }
    // 0 = unsafe here, 1 = safe but owned elsewhere, 2 = owned
    std::vector<std::uint8_t> status(n, 0);
    ChunkResult& res = results[t];
    for (std::size_t v = 0; v < n; ++v) {
      if (uf.find(static_cast<std::uint32_t>(v)) != v) continue;
      const Box& b = box[v];
      bool safe = b.i0 >= rx.safe_lo && b.i1 < rx.safe_hi && b.j0 >= ry.safe_lo && b.j1 < ry.safe_hi;
      if (!safe) {
        Cell c = g.cell(v);
        res.probes.push_back(cell_code({static_cast<std::uint32_t>(c.i + rx.begin), static_cast<std::uint32_t>(c.j + ry.begin)}));
        continue;
      }
      status[v] = owner_chunk(cx, b.i0, b.i1) == kx && owner_chunk(cy, b.j0, b.j1) == ky ? 2 : 1;
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (status[uf.find(static_cast<std::uint32_t>(v))] != 2) continue;
      Cell c = g.cell(v);
      res.owned_cells.push_back(cell_code({static_cast<std::uint32_t>(c.i + rx.begin), static_cast<std::uint32_t>(c.j + ry.begin)}));
    }
    for (auto& path : find_maximal_paths(g, p)) {
      if (!g.find(path.cells.front().i, path.cells.front().j)) continue;
      std::size_t v0 = *g.find(path.cells.front().i, path.cells.front().j);
      if (status[uf.find(static_cast<std::uint32_t>(v0))] != 2) continue;
      for (auto& c : path.cells) {
        c.i += static_cast<std::uint32_t>(rx.begin);
        c.j += static_cast<std::uint32_t>(ry.begin);
      }
      path.a.start += rx.begin;
      path.a.end += rx.begin;
      path.b.start += ry.begin;
      path.b.end += ry.begin;
      res.paths.push_back(std::move(path));
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < tasks;) {
      try {
        run(t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const std::size_t nthreads = std::min(o.workers, tasks);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < nthreads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<std::uint64_t> owned;
  std::vector<AlignedPath> paths;
  for (auto& r : results) {
    owned.insert(owned.end(), r.owned_cells.begin(), r.owned_cells.end());
    for (auto& path : r.paths) paths.push_back(std::move(path));
  }
  std::sort(owned.begin(), owned.end());
  for (const auto& r : results)
    for (std::uint64_t probe : r.probes)
      if (!std::binary_search(owned.begin(), owned.end(), probe))
        throw Error(Errc::bad_chunking, "a match component spans more than the chunk overlap; increase overlap");
  return paths;
}

}  // namespace detail

// Same result as align_pair, computed over overlapping chunk pairs in
// parallel. Throws BadChunking when the overlap cannot guarantee that.
inline std::vector<ParallelPassage> align_chunked(const Document& a, const Document& b, const AlignParams& p,
                                                  const CostTable& costs, const ChunkOptions& o) {
  p.validate();
  if (a.empty() || b.empty()) throw Error(Errc::empty_document, "cannot align an empty document");
  auto ka = a.stem_keys(), kb = b.stem_keys();
  std::vector<AlignedPath> paths;
  if (detail::keys_precede(kb, ka)) {
    paths = detail::chunked_paths(b.stems, a.stems, p, costs, o);
    detail::mirror(paths);
  } else {
    paths = detail::chunked_paths(a.stems, b.stems, p, costs, o);
  }
  auto passages = merge_and_filter(std::move(paths), p);
  annotate(passages, a, b);
  return passages;
}

}  // namespace tibtext
