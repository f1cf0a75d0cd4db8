#pragma once

// Syllable stems (stack, vowel, coda), rule-driven normalization, stemmic
// identity and a weighted per-slot substitution distance.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "tibtext/error.hpp"
#include "tibtext/syllable.hpp"
#include "tibtext/util.hpp"
#include "tibtext/wylie.hpp"

namespace tibtext {

struct Stem {
  std::optional<Letter> superscript;
  Letter core = Letter::achen;
  std::optional<Letter> subscript;
  Letter vowel = Letter::vowel_a;
  std::optional<Letter> coda;
  bool normalized = false;
  // Non-zero only for the sentinel stem of a foreign syllable; derived from
  // the raw text so equal foreign tokens still match each other.
  std::uint64_t foreign_id = 0;

  bool foreign() const { return foreign_id != 0; }

  // Packs the identity-relevant fields; equal keys mean stemmic identity.
  std::uint64_t key() const {
    if (foreign()) return foreign_id;
    auto b = [](std::optional<Letter> l) -> std::uint64_t { return l ? static_cast<std::uint64_t>(*l) : 0; };
    return b(superscript) | b(core) << 8 | b(subscript) << 16 | b(vowel) << 24 | b(coda) << 32;
  }

  bool same_as(const Stem& o) const { return key() == o.key(); }
  bool operator==(const Stem&) const = default;
};

inline Stem foreign_stem(std::string_view raw) {
  Stem s;
  s.normalized = true;
  s.foreign_id = fnv1a(raw) | (std::uint64_t{1} << 63);
  return s;
}

inline std::string stem_text(const Stem& s) {
  if (s.foreign()) return "?";
  std::string out;
  if (s.superscript) out += wylie_form(*s.superscript);
  if (s.core != Letter::achen) out += wylie_form(s.core);
  if (s.subscript) out += wylie_form(*s.subscript);
  out += wylie_form(s.vowel);
  if (s.coda) out += wylie_form(*s.coda);
  return out;
}

inline Stem extract_stem(const SyllableTuple& t) {
  if (t.foreign) throw Error(Errc::foreign_syllable, "cannot stem a foreign syllable");
  Stem s;
  s.superscript = t.superscript;
  s.core = t.core;
  s.subscript = t.subscript;
  s.vowel = t.vowel;
  s.coda = t.coda;
  return s;
}

// ---------------------------------------------------------------------------
// Normalization rules

enum class StemSlot : std::uint8_t { superscript, core, subscript, vowel, coda };
inline constexpr std::size_t kStemSlots = 5;
inline constexpr std::array<std::string_view, kStemSlots> kStemSlotNames = {"super", "core", "sub", "vowel", "coda"};

inline std::optional<Letter> get_slot(const Stem& s, StemSlot slot) {
  switch (slot) {
    case StemSlot::superscript: return s.superscript;
    case StemSlot::core: return s.core;
    case StemSlot::subscript: return s.subscript;
    case StemSlot::vowel: return s.vowel;
    case StemSlot::coda: return s.coda;
  }
  return std::nullopt;
}

inline void set_slot(Stem& s, StemSlot slot, std::optional<Letter> v) {
  switch (slot) {
    case StemSlot::superscript: s.superscript = v; break;
    case StemSlot::core: s.core = v.value_or(Letter::achen); break;
    case StemSlot::subscript: s.subscript = v; break;
    case StemSlot::vowel: s.vowel = v.value_or(Letter::vowel_a); break;
    case StemSlot::coda: s.coda = v; break;
  }
}

// A partial stem: for each slot either unconstrained, absent ("-") or a
// specific letter.
struct StemPattern {
  std::array<std::optional<std::optional<Letter>>, kStemSlots> slots{};

  bool matches(const Stem& s) const {
    for (std::size_t i = 0; i < kStemSlots; ++i)
      if (slots[i] && *slots[i] != get_slot(s, static_cast<StemSlot>(i))) return false;
    return true;
  }
  void apply_to(Stem& s) const {
    for (std::size_t i = 0; i < kStemSlots; ++i)
      if (slots[i]) set_slot(s, static_cast<StemSlot>(i), *slots[i]);
  }
};

struct NormalizationRule {
  std::string rule_id;
  StemPattern pattern;
  StemPattern replacement;
};

// Ordered rule list. File format, one rule per line:
//
//   <rule_id>  <slot>=<value> ...  =>  <slot>=<value> ...
//
// where slot is super|core|sub|vowel|coda and value is a Wylie letter or
// "-" for an empty slot. Slots not named on the left match anything; slots
// not named on the right are left unchanged.
class RuleSet {
 public:
  RuleSet() = default;
  explicit RuleSet(std::vector<NormalizationRule> rules) : rules_(std::move(rules)) {}

  static RuleSet parse(std::string_view content) {
    std::vector<NormalizationRule> rules;
    for (const auto& [no, line] : data_lines(content)) {
      auto fields = split_ws(line);
      auto arrow = std::find(fields.begin(), fields.end(), "=>");
      if (fields.size() < 2 || arrow == fields.end() || arrow == fields.begin())
        throw Error(Errc::bad_format, "rules line " + std::to_string(no) + ": expected '<id> <pattern> => <replacement>'");
      NormalizationRule r;
      r.rule_id = fields.front();
      for (auto it = fields.begin() + 1; it != arrow; ++it) assign(r.pattern, *it, no);
      for (auto it = arrow + 1; it != fields.end(); ++it) assign(r.replacement, *it, no);
      rules.push_back(std::move(r));
    }
    return RuleSet(std::move(rules));
  }

  static RuleSet load(const std::string& path) { return parse(read_file(path)); }

  const std::vector<NormalizationRule>& rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }

 private:
  static void assign(StemPattern& p, const std::string& field, std::size_t no) {
    auto eq = field.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::bad_format, "rules line " + std::to_string(no) + ": bad field '" + field + "'");
    std::string name = field.substr(0, eq), value = field.substr(eq + 1);
    auto slot_it = std::find(kStemSlotNames.begin(), kStemSlotNames.end(), name);
    if (slot_it == kStemSlotNames.end())
      throw Error(Errc::bad_format, "rules line " + std::to_string(no) + ": unknown slot '" + name + "'");
    auto slot = static_cast<StemSlot>(slot_it - kStemSlotNames.begin());
    if (value == "-") {
      if (slot == StemSlot::core || slot == StemSlot::vowel)
        throw Error(Errc::bad_format, "rules line " + std::to_string(no) + ": " + name + " cannot be empty");
      p.slots[static_cast<std::size_t>(slot)].emplace(std::nullopt);
      return;
    }
    auto kind = slot == StemSlot::vowel ? LetterKind::vowel : LetterKind::consonant;
    auto letter = letter_from_form(value, kind);
    if (!letter)
      throw Error(Errc::bad_format, "rules line " + std::to_string(no) + ": unknown letter '" + value + "'");
    p.slots[static_cast<std::size_t>(slot)].emplace(*letter);
  }

  std::vector<NormalizationRule> rules_;
};

// Applies each rule at most once, in list order; a rule sees the output of
// the rules before it.
inline Stem normalize(Stem s, const RuleSet& rules) {
  if (s.foreign()) return s;
  for (const auto& rule : rules.rules())
    if (rule.pattern.matches(s)) rule.replacement.apply_to(s);
  s.normalized = true;
  return s;
}

inline Stem normalized_stem(const SyllableTuple& t, const RuleSet& rules) {
  return normalize(extract_stem(t), rules);
}

inline bool stem_identical(const SyllableTuple& a, const SyllableTuple& b, const RuleSet& rules) {
  return normalized_stem(a, rules).same_as(normalized_stem(b, rules));
}

// ---------------------------------------------------------------------------
// Substitution costs

enum class CostEntry : std::uint8_t {
  superscript_indel,
  superscript_sub,
  core_sub,
  subscript_indel,
  subscript_sub,
  vowel_sub,
  coda_indel,
  coda_sub,
  prescript_change,
  postscript_change,
};
inline constexpr std::size_t kCostEntries = 10;
inline constexpr std::array<std::string_view, kCostEntries> kCostEntryNames = {
    "superscript.indel", "superscript.sub", "core.sub",   "subscript.indel", "subscript.sub",
    "vowel.sub",         "coda.indel",      "coda.sub",   "prescript.change", "postscript.change",
};

// Non-negative per-slot edit costs plus the same/different decision
// threshold used by the fitter. Defaults are engineering placeholders.
struct CostTable {
  std::array<double, kCostEntries> cost = {1.0, 1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 0.5, 0.0, 0.0};
  double threshold = 0.25;

  double operator[](CostEntry e) const { return cost[static_cast<std::size_t>(e)]; }
  double& operator[](CostEntry e) { return cost[static_cast<std::size_t>(e)]; }

  // Whether some stem-level edit is free, so that distance 0 no longer
  // implies identical keys.
  bool has_free_stem_edit() const {
    for (std::size_t i = 0; i < static_cast<std::size_t>(CostEntry::prescript_change); ++i)
      if (cost[i] <= 0.0) return true;
    return false;
  }

  // "key value" per line.
  static CostTable parse(std::string_view content) {
    CostTable t;
    for (const auto& [no, line] : data_lines(content)) {
      auto f = split_ws(line);
      if (f.size() != 2) throw Error(Errc::bad_format, "costs line " + std::to_string(no) + ": expected 'key value'");
      double v;
      try {
        v = std::stod(f[1]);
      } catch (const std::exception&) {
        throw Error(Errc::bad_format, "costs line " + std::to_string(no) + ": bad number '" + f[1] + "'");
      }
      if (f[0] == "threshold") {
        t.threshold = v;
        continue;
      }
      auto it = std::find(kCostEntryNames.begin(), kCostEntryNames.end(), f[0]);
      if (it == kCostEntryNames.end())
        throw Error(Errc::bad_format, "costs line " + std::to_string(no) + ": unknown entry '" + f[0] + "'");
      if (!(v >= 0.0) || !std::isfinite(v))
        throw Error(Errc::bad_format, "costs line " + std::to_string(no) + ": costs must be finite and >= 0");
      t.cost[static_cast<std::size_t>(it - kCostEntryNames.begin())] = v;
    }
    return t;
  }

  static CostTable load(const std::string& path) { return parse(read_file(path)); }

  std::string serialize() const {
    std::string out;
    for (std::size_t i = 0; i < kCostEntries; ++i) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", cost[i]);
      out += std::string(kCostEntryNames[i]) + " " + buf + "\n";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", threshold);
    out += std::string("threshold ") + buf + "\n";
    return out;
  }
};

namespace detail {

// Cost of one optional slot: free when equal, indel when one side is empty,
// otherwise the cheaper of a substitution or a drop-and-add.
inline double slot_cost(std::optional<Letter> a, std::optional<Letter> b, double indel, double sub) {
  if (a == b) return 0.0;
  if (!a || !b) return indel;
  return std::min(sub, 2.0 * indel);
}

}  // namespace detail

inline double stem_distance(const Stem& a, const Stem& b, const CostTable& c) {
  if (a.foreign() || b.foreign())
    return a.key() == b.key() ? 0.0 : std::numeric_limits<double>::infinity();
  double d = 0.0;
  d += detail::slot_cost(a.superscript, b.superscript, c[CostEntry::superscript_indel], c[CostEntry::superscript_sub]);
  d += a.core == b.core ? 0.0 : c[CostEntry::core_sub];
  d += detail::slot_cost(a.subscript, b.subscript, c[CostEntry::subscript_indel], c[CostEntry::subscript_sub]);
  d += a.vowel == b.vowel ? 0.0 : c[CostEntry::vowel_sub];
  d += detail::slot_cost(a.coda, b.coda, c[CostEntry::coda_indel], c[CostEntry::coda_sub]);
  return d;
}

// Stem distance plus the prescript/postscript change costs.
inline double syllable_distance(const SyllableTuple& a, const SyllableTuple& b, const RuleSet& rules,
                                const CostTable& c) {
  double d = stem_distance(normalized_stem(a, rules), normalized_stem(b, rules), c);
  if (a.prescript != b.prescript) d += c[CostEntry::prescript_change];
  if (a.postscript != b.postscript) d += c[CostEntry::postscript_change];
  return d;
}

// ---------------------------------------------------------------------------
// Cost fitting

struct LabeledSyllablePair {
  SyllableTuple a;
  SyllableTuple b;
  bool same = false;
};

struct FitOptions {
  std::size_t epochs = 300;
  double learning_rate = 0.1;
  std::uint64_t seed = 1;
};

// Indicator of each cost entry a pair's cheapest decomposition uses.
inline std::array<double, kCostEntries> edit_features(const SyllableTuple& x, const SyllableTuple& y,
                                                      const RuleSet& rules) {
  std::array<double, kCostEntries> f{};
  Stem a = normalized_stem(x, rules), b = normalized_stem(y, rules);
  auto optional_slot = [&](std::optional<Letter> p, std::optional<Letter> q, CostEntry indel, CostEntry sub) {
    if (p == q) return;
    f[static_cast<std::size_t>((!p || !q) ? indel : sub)] = 1.0;
  };
  optional_slot(a.superscript, b.superscript, CostEntry::superscript_indel, CostEntry::superscript_sub);
  if (a.core != b.core) f[static_cast<std::size_t>(CostEntry::core_sub)] = 1.0;
  optional_slot(a.subscript, b.subscript, CostEntry::subscript_indel, CostEntry::subscript_sub);
  if (a.vowel != b.vowel) f[static_cast<std::size_t>(CostEntry::vowel_sub)] = 1.0;
  optional_slot(a.coda, b.coda, CostEntry::coda_indel, CostEntry::coda_sub);
  if (x.prescript != y.prescript) f[static_cast<std::size_t>(CostEntry::prescript_change)] = 1.0;
  if (x.postscript != y.postscript) f[static_cast<std::size_t>(CostEntry::postscript_change)] = 1.0;
  return f;
}

// Logistic regression on edit indicators: P(different) = sigmoid(d - t)
// where d is the weighted edit cost. Weights stay non-negative so the result
// is a valid cost table; a pair is predicted "same" when d <= t.
inline CostTable fit_costs(const std::vector<LabeledSyllablePair>& pairs, const RuleSet& rules,
                           const FitOptions& opt = {}) {
  std::size_t same = 0;
  for (const auto& p : pairs) same += p.same;
  if (pairs.empty() || same == 0 || same == pairs.size())
    throw Error(Errc::degenerate_data, "cost fitting needs both same and different pairs");

  std::vector<std::array<double, kCostEntries>> feats;
  feats.reserve(pairs.size());
  for (const auto& p : pairs) feats.push_back(edit_features(p.a, p.b, rules));

  std::array<double, kCostEntries> w{};
  w.fill(0.5);
  double t = 0.25;
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(opt.seed);
  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      double d = 0.0;
      for (std::size_t k = 0; k < kCostEntries; ++k) d += w[k] * feats[i][k];
      double z = d - t;
      double prob_diff = 1.0 / (1.0 + std::exp(-z));
      double target = pairs[i].same ? 0.0 : 1.0;
      double g = prob_diff - target;
      for (std::size_t k = 0; k < kCostEntries; ++k)
        w[k] = std::max(0.0, w[k] - opt.learning_rate * g * feats[i][k]);
      t += opt.learning_rate * g;
    }
  }
  CostTable out;
  out.cost = w;
  out.threshold = t;
  // A learned substitution cost must not be undercut by the drop-and-add
  // route, so the indel cost is raised to at least half of it.
  auto lift = [&](CostEntry sub, CostEntry indel) { out[indel] = std::max(out[indel], out[sub] / 2.0); };
  lift(CostEntry::superscript_sub, CostEntry::superscript_indel);
  lift(CostEntry::subscript_sub, CostEntry::subscript_indel);
  lift(CostEntry::coda_sub, CostEntry::coda_indel);
  return out;
}

}  // namespace tibtext
