#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tibtext/resources.hpp"
#include "tibtext/stem.hpp"
#include "tibtext/syllable.hpp"
#include "tibtext/wylie.hpp"

namespace tibtext {

// A parsed text: per-syllable surface form, source span, slot tuple and
// normalized stem. Foreign syllables keep a sentinel stem.
struct Document {
  std::string id;
  std::vector<std::string> surface;
  std::vector<SourceSpan> spans;
  std::vector<SyllableTuple> syllables;
  std::vector<Stem> stems;
  std::vector<bool> is_particle;
  std::vector<std::size_t> sentence_ends;

  std::size_t size() const { return surface.size(); }
  bool empty() const { return surface.empty(); }

  std::vector<std::uint64_t> stem_keys() const {
    std::vector<std::uint64_t> keys;
    keys.reserve(stems.size());
    for (const auto& s : stems) keys.push_back(s.key());
    return keys;
  }
};

inline void append_syllable(Document& doc, std::string text, SourceSpan span, const Resources& res) {
  SyllableTuple t = analyze_syllable(text, res.tables);
  if (!t.foreign && res.loanwords.contains(text)) {
    t = SyllableTuple{};
    t.foreign = true;
  }
  doc.stems.push_back(t.foreign ? foreign_stem(text) : normalized_stem(t, res.rules));
  doc.syllables.push_back(std::move(t));
  doc.is_particle.push_back(res.particles.contains(text));
  doc.spans.push_back(span);
  doc.surface.push_back(std::move(text));
}

inline Document make_document(std::string id, std::string_view cleaned_text, const Resources& res) {
  Document doc;
  doc.id = std::move(id);
  SplitText split = split_units(cleaned_text);
  doc.surface.reserve(split.syllables.size());
  for (auto& raw : split.syllables) append_syllable(doc, std::move(raw.text), raw.source, res);
  doc.sentence_ends = std::move(split.sentence_ends);
  return doc;
}

// Builds a document from already-split syllables; spans index a virtual
// single-space-joined text.
inline Document make_document(std::string id, const std::vector<std::string>& syllables, const Resources& res) {
  Document doc;
  doc.id = std::move(id);
  std::size_t offset = 0;
  for (const auto& s : syllables) {
    append_syllable(doc, s, {offset, s.size()}, res);
    offset += s.size() + 1;
  }
  return doc;
}

inline std::string document_text(const Document& doc) {
  std::string out;
  std::size_t next_end = 0;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (i) out += ' ';
    out += doc.surface[i];
    if (next_end < doc.sentence_ends.size() && doc.sentence_ends[next_end] == i) {
      out += " /";
      ++next_end;
    }
  }
  return out;
}

}  // namespace tibtext
