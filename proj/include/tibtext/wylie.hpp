#pragma once

// Wylie letter inventory, letter tokenization and syllable/sentence splitting.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tibtext/error.hpp"

namespace tibtext {

// One Tibetan letter. Consonants come first in traditional alphabet order;
// a-chen is the last consonant and is never produced by the tokenizer (it is
// implicit in Wylie when a syllable starts with a vowel).
enum class Letter : std::uint8_t {
  k = 1, kh, g, ng, c, ch, j, ny, t, th, d, n, p, ph, b, m,
  ts, tsh, dz, w, zh, z, achung, y, r, l, sh, s, h, achen,
  vowel_a, vowel_i, vowel_u, vowel_e, vowel_o,
};

enum class LetterKind : std::uint8_t { consonant, vowel };

inline constexpr std::size_t kLetterCount = 35;

inline constexpr std::array<std::string_view, kLetterCount + 1> kLetterForms = {
    "",  "k",  "kh", "g",  "ng", "c",  "ch", "j", "ny", "t", "th", "d",
    "n", "p",  "ph", "b",  "m",  "ts", "tsh", "dz", "w", "zh", "z", "'",
    "y", "r",  "l",  "sh", "s",  "h",  "a",  "a", "i", "u", "e", "o",
};

inline constexpr std::string_view wylie_form(Letter l) {
  return kLetterForms[static_cast<std::size_t>(l)];
}

inline constexpr LetterKind kind_of(Letter l) {
  return static_cast<std::uint8_t>(l) >= static_cast<std::uint8_t>(Letter::vowel_a)
             ? LetterKind::vowel
             : LetterKind::consonant;
}

inline constexpr bool is_vowel(Letter l) { return kind_of(l) == LetterKind::vowel; }

inline constexpr std::array<Letter, kLetterCount> all_letters() {
  std::array<Letter, kLetterCount> out{};
  for (std::size_t i = 0; i < kLetterCount; ++i) out[i] = static_cast<Letter>(i + 1);
  return out;
}

// Reads a letter by its Wylie form. As a consonant "a" names a-chen;
// letter_from_form(form) without a kind prefers the vowel reading.
inline std::optional<Letter> letter_from_form(std::string_view form, LetterKind kind) {
  for (Letter l : all_letters()) {
    if (kind_of(l) == kind && wylie_form(l) == form) return l;
  }
  return std::nullopt;
}

inline std::optional<Letter> letter_from_form(std::string_view form) {
  if (auto v = letter_from_form(form, LetterKind::vowel)) return v;
  return letter_from_form(form, LetterKind::consonant);
}

// Result of tokenizing one syllable: the letters plus the indices after which
// an explicit "." disambiguator appeared.
struct LetterSequence {
  std::vector<Letter> letters;
  std::vector<std::size_t> separators_after;

  bool has_separator_after(std::size_t index) const {
    return std::find(separators_after.begin(), separators_after.end(), index) !=
           separators_after.end();
  }
  bool operator==(const LetterSequence&) const = default;
};

namespace detail {

// Inventory forms ordered longest first so the scan is maximal munch.
inline const std::vector<Letter>& munch_order() {
  static const std::vector<Letter> order = [] {
    std::vector<Letter> v;
    for (Letter l : all_letters())
      if (l != Letter::achen) v.push_back(l);
    std::stable_sort(v.begin(), v.end(), [](Letter a, Letter b) {
      return wylie_form(a).size() > wylie_form(b).size();
    });
    return v;
  }();
  return order;
}

}  // namespace detail

inline LetterSequence tokenize_letters(std::string_view text) {
  if (text.empty()) throw Error(Errc::invalid_argument, "empty syllable");
  LetterSequence out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == '.') {
      if (out.letters.empty() || pos + 1 == text.size() || out.has_separator_after(out.letters.size() - 1))
        throw Error(Errc::unknown_character, "misplaced '.' in '" + std::string(text) + "'", pos);
      out.separators_after.push_back(out.letters.size() - 1);
      ++pos;
      continue;
    }
    bool matched = false;
    for (Letter l : detail::munch_order()) {
      std::string_view form = wylie_form(l);
      if (text.substr(pos, form.size()) == form) {
        out.letters.push_back(l);
        pos += form.size();
        matched = true;
        break;
      }
    }
    if (!matched)
      throw Error(Errc::unknown_character,
                  "no Wylie letter at offset " + std::to_string(pos) + " of '" + std::string(text) + "'", pos);
  }
  return out;
}

inline std::string render_letters(const LetterSequence& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.letters.size(); ++i) {
    out += wylie_form(seq.letters[i]);
    if (seq.has_separator_after(i)) out += '.';
  }
  return out;
}

struct SourceSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
  bool operator==(const SourceSpan&) const = default;
};

struct RawSyllable {
  std::string text;
  SourceSpan source;
  bool operator==(const RawSyllable&) const = default;
};

struct SplitText {
  std::vector<RawSyllable> syllables;
  // Index of the last syllable of each shad-terminated sentence.
  std::vector<std::size_t> sentence_ends;
};

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Splits cleaned Wylie into syllables (runs between whitespace or shad) and
// records a sentence boundary for each run of shads that follows a syllable.
inline SplitText split_units(std::string_view text) {
  SplitText out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (is_space(c)) {
      ++i;
    } else if (c == '/') {
      if (!out.syllables.empty() &&
          (out.sentence_ends.empty() || out.sentence_ends.back() != out.syllables.size() - 1))
        out.sentence_ends.push_back(out.syllables.size() - 1);
      ++i;
    } else {
      std::size_t start = i;
      while (i < n && !is_space(text[i]) && text[i] != '/') ++i;
      out.syllables.push_back({std::string(text.substr(start, i - start)), {start, i - start}});
    }
  }
  return out;
}

}  // namespace tibtext
