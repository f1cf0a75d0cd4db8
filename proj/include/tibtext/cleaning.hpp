#pragma once

// Removal of sigla and punctuation standardization for raw e-texts.

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tibtext/error.hpp"
#include "tibtext/util.hpp"
#include "tibtext/wylie.hpp"

namespace tibtext {

struct CleaningConfig {
  // Bracket pairs whose enclosed text (page/line sigla) is dropped.
  std::vector<std::pair<std::string, std::string>> sigla = {{"[", "]"}, {"{", "}"}, {"<", ">"}};
  // Tokens starting with one of these are dropped up to the next whitespace.
  std::vector<std::string> markers = {"@"};
  // Replacements applied after sigla removal; targets are "/" or " ".
  std::vector<std::pair<std::string, std::string>> punctuation = {{"|", "/"}, {";", "/"}, {"_", " "}, {",", " "}};

  // File format:
  //   sigla <open> <close>
  //   marker <prefix>
  //   punct <from> <to>        <to> is a literal or the word "space"
  static CleaningConfig parse(std::string_view content) {
    CleaningConfig cfg;
    cfg.sigla.clear();
    cfg.markers.clear();
    cfg.punctuation.clear();
    for (const auto& [no, line] : data_lines(content)) {
      auto f = split_ws(line);
      auto bad = [&](const std::string& why) {
        return Error(Errc::bad_format, "cleaning config line " + std::to_string(no) + ": " + why);
      };
      if (f[0] == "sigla") {
        if (f.size() != 3 || f[1].empty() || f[2].empty() || f[1] == f[2]) throw bad("expected 'sigla <open> <close>'");
        cfg.sigla.emplace_back(f[1], f[2]);
      } else if (f[0] == "marker") {
        if (f.size() != 2) throw bad("expected 'marker <prefix>'");
        cfg.markers.push_back(f[1]);
      } else if (f[0] == "punct") {
        if (f.size() != 3) throw bad("expected 'punct <from> <to>'");
        std::string to = f[2] == "space" ? " " : f[2];
        if (to != "/" && to != " ") throw bad("punctuation must map to '/' or space");
        cfg.punctuation.emplace_back(f[1], to);
      } else {
        throw bad("unknown directive '" + f[0] + "'");
      }
    }
    return cfg;
  }

  static CleaningConfig load(const std::string& path) { return parse(read_file(path)); }
};

namespace detail {

inline bool starts_at(std::string_view s, std::size_t pos, std::string_view what) {
  return s.substr(pos, what.size()) == what;
}

}  // namespace detail

// Drops bracketed sigla (nesting allowed per pair), maps punctuation, drops
// marker tokens, then collapses whitespace. Idempotent.
inline std::string clean(std::string_view raw, const CleaningConfig& cfg) {
  std::string stripped;
  stripped.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    bool handled = false;
    for (const auto& [open, close] : cfg.sigla) {
      if (detail::starts_at(raw, i, close))
        throw Error(Errc::unbalanced_sigla, "closing '" + close + "' without opening at offset " + std::to_string(i), i);
      if (!detail::starts_at(raw, i, open)) continue;
      std::size_t depth = 0, j = i;
      while (j < raw.size()) {
        if (detail::starts_at(raw, j, open)) {
          ++depth;
          j += open.size();
        } else if (detail::starts_at(raw, j, close)) {
          --depth;
          j += close.size();
          if (depth == 0) break;
        } else {
          ++j;
        }
      }
      if (depth != 0)
        throw Error(Errc::unbalanced_sigla, "unclosed '" + open + "' at offset " + std::to_string(i), i);
      stripped += ' ';
      i = j;
      handled = true;
      break;
    }
    if (handled) continue;
    stripped += raw[i++];
  }

  std::string mapped;
  mapped.reserve(stripped.size());
  for (std::size_t k = 0; k < stripped.size();) {
    bool replaced = false;
    for (const auto& [from, to] : cfg.punctuation) {
      if (!from.empty() && detail::starts_at(stripped, k, from)) {
        mapped += to;
        k += from.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) mapped += stripped[k++];
  }

  // Markers last: the earlier stages can expose a new token start.
  std::string unmarked;
  unmarked.reserve(mapped.size());
  for (std::size_t k = 0; k < mapped.size();) {
    bool dropped = false;
    if (k == 0 || is_space(mapped[k - 1])) {
      for (const auto& m : cfg.markers) {
        if (m.empty() || !detail::starts_at(mapped, k, m)) continue;
        while (k < mapped.size() && !is_space(mapped[k])) ++k;
        dropped = true;
        break;
      }
    }
    if (!dropped) unmarked += mapped[k++];
  }

  std::string out;
  out.reserve(unmarked.size());
  bool pending_space = false;
  for (char c : unmarked) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

}  // namespace tibtext
