#pragma once

// Slot decomposition of a Tibetan syllable (prescript, superscript, core,
// subscript, vowel, coda, postscript, appended particle) driven by a
// data-file of validity tables.

#include <algorithm>
#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tibtext/error.hpp"
#include "tibtext/wylie.hpp"

namespace tibtext {

struct SyllableTuple {
  std::optional<Letter> prescript;
  std::optional<Letter> superscript;
  Letter core = Letter::achen;
  std::optional<Letter> subscript;
  Letter vowel = Letter::vowel_a;
  std::optional<Letter> coda;
  std::optional<Letter> postscript;
  std::optional<std::string> particle;  // e.g. "'i"
  bool foreign = false;

  bool operator==(const SyllableTuple&) const = default;

  int vowel_count() const {
    int count = 1;
    if (particle)
      for (char ch : *particle)
        if (ch == 'a' || ch == 'i' || ch == 'u' || ch == 'e' || ch == 'o') ++count;
    return count;
  }
};

using LetterSet = std::bitset<kLetterCount + 1>;

enum class OnsetPreference { stack, prescript };

// One structural reading of the consonants before the vowel.
struct Onset {
  std::optional<Letter> prescript;
  std::optional<Letter> superscript;
  Letter core = Letter::achen;
  std::optional<Letter> subscript;
  bool operator==(const Onset&) const = default;
};

// Validity tables. Text format, one rule per line ('#' starts a comment):
//
//   prescript|superscript|subscript|core|coda|postscript <letter>...
//   particle <form>...          appended particles, e.g. 'i 'am
//   above <S> <core>...         superscript S may stand above these cores
//   below <B> <core>...         these cores take subscript B
//   stack <S> <core> <B>        permitted superscript+core+subscript stack
//   before <P> <head>...        prescript P may precede head; a head is a
//                               core letter (any subscript), core+sub for
//                               that exact pair, or ^S for any stack topped
//                               by superscript S
//   after <post> <coda>...      postscript may follow these codas
//   onset <first> <second> stack|prescript
//                               reading for an onset whose letters admit
//                               both a prescript and a stacked reading
class SyllableTables {
 public:
  static SyllableTables parse(std::string_view content) {
    SyllableTables t;
    std::istringstream in{std::string(content)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream fields(line);
      std::string kind;
      if (!(fields >> kind)) continue;
      std::vector<std::string> args;
      for (std::string a; fields >> a;) args.push_back(a);
      t.apply_rule(kind, args, line_no);
    }
    if (t.particles_.size() != 6)
      throw Error(Errc::bad_format, "syllable tables must configure exactly six appended particles, got " +
                                        std::to_string(t.particles_.size()));
    return t;
  }

  static SyllableTables load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open syllable tables '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  bool is_prescript(Letter l) const { return prescripts_[idx(l)]; }
  bool is_superscript(Letter l) const { return superscripts_[idx(l)]; }
  bool is_subscript(Letter l) const { return subscripts_[idx(l)]; }
  bool is_core(Letter l) const { return cores_[idx(l)]; }
  bool is_coda(Letter l) const { return codas_[idx(l)]; }
  bool is_postscript(Letter l) const { return postscripts_[idx(l)]; }

  const LetterSet& prescripts() const { return prescripts_; }
  const LetterSet& superscripts() const { return superscripts_; }
  const LetterSet& subscripts() const { return subscripts_; }
  const LetterSet& cores() const { return cores_; }
  const LetterSet& codas() const { return codas_; }
  const LetterSet& postscripts() const { return postscripts_; }

  bool allows_above(Letter super, Letter core) const { return above_[idx(super)][idx(core)]; }
  bool allows_below(Letter core, Letter sub) const { return below_[idx(sub)][idx(core)]; }
  bool allows_stack(Letter super, Letter core, Letter sub) const {
    return triple_stacks_.count({idx(super), idx(core), idx(sub)}) > 0;
  }
  bool allows_after(Letter coda, Letter post) const { return after_[idx(post)][idx(coda)]; }

  bool allows_before(Letter prescript, std::optional<Letter> super, Letter core, std::optional<Letter> sub) const {
    auto it = before_.find(idx(prescript));
    if (it == before_.end()) return false;
    const Heads& h = it->second;
    if (super) return h.superscripts[idx(*super)];
    if (h.cores[idx(core)]) return true;
    return sub && h.pairs.count({idx(core), idx(*sub)}) > 0;
  }

  const std::vector<std::string>& particles() const { return particles_; }
  const std::vector<std::vector<Letter>>& particle_letters() const { return particle_letters_; }

  std::optional<OnsetPreference> onset_exception(Letter first, Letter second) const {
    auto it = onset_exceptions_.find({idx(first), idx(second)});
    if (it == onset_exceptions_.end()) return std::nullopt;
    return it->second;
  }

  // Stack and prescript constraints for one onset reading.
  bool admits_onset(const Onset& o) const {
    if (o.core == Letter::achen) return is_core(o.core) && !o.prescript && !o.superscript && !o.subscript;
    if (!is_core(o.core)) return false;
    if (o.superscript && o.subscript) {
      if (!is_superscript(*o.superscript) || !is_subscript(*o.subscript)) return false;
      if (!allows_stack(*o.superscript, o.core, *o.subscript)) return false;
    } else if (o.superscript) {
      if (!is_superscript(*o.superscript) || !allows_above(*o.superscript, o.core)) return false;
    } else if (o.subscript) {
      if (!is_subscript(*o.subscript) || !allows_below(o.core, *o.subscript)) return false;
    }
    if (o.prescript) {
      if (!is_prescript(*o.prescript)) return false;
      if (!allows_before(*o.prescript, o.superscript, o.core, o.subscript)) return false;
    }
    return true;
  }

  bool admits_tail(std::optional<Letter> coda, std::optional<Letter> post) const {
    if (coda && !is_coda(*coda)) return false;
    if (post) {
      if (!coda || !is_postscript(*post) || !allows_after(*coda, *post)) return false;
    }
    return true;
  }

  // All table-valid readings of a consonant run, in a fixed order.
  std::vector<Onset> onset_readings(const std::vector<Letter>& run) const {
    std::vector<Onset> out;
    const std::size_t n = run.size();
    if (n == 0) {
      if (admits_onset(Onset{})) out.push_back(Onset{});
      return out;
    }
    // Shapes as (has prescript, has superscript, has subscript).
    static constexpr std::array<std::array<bool, 3>, 8> shapes = {{
        {false, false, false}, {true, false, false}, {false, true, false}, {false, false, true},
        {true, true, false},   {true, false, true},  {false, true, true},  {true, true, true},
    }};
    for (const auto& shape : shapes) {
      std::size_t need = 1 + shape[0] + shape[1] + shape[2];
      if (need != n) continue;
      Onset o;
      std::size_t k = 0;
      if (shape[0]) o.prescript = run[k++];
      if (shape[1]) o.superscript = run[k++];
      o.core = run[k++];
      if (shape[2]) o.subscript = run[k++];
      if (is_vowel(o.core)) continue;
      if (admits_onset(o)) out.push_back(o);
    }
    return out;
  }

  // Reading chosen for an onset with no explicit separator, or nullopt when
  // the policy cannot decide.
  std::optional<Onset> preferred_reading(const std::vector<Letter>& run, const std::vector<Onset>& readings) const {
    if (readings.empty()) return std::nullopt;
    if (readings.size() == 1) return readings.front();
    OnsetPreference pref = OnsetPreference::stack;
    if (run.size() >= 2)
      if (auto e = onset_exception(run[0], run[1])) pref = *e;
    std::optional<Onset> pick;
    for (const Onset& o : readings) {
      bool has_pre = o.prescript.has_value();
      if ((pref == OnsetPreference::prescript) == has_pre) {
        if (pick) return std::nullopt;
        pick = o;
      }
    }
    return pick;
  }

 private:
  struct Heads {
    LetterSet cores;
    LetterSet superscripts;
    std::set<std::pair<std::size_t, std::size_t>> pairs;
  };

  static std::size_t idx(Letter l) { return static_cast<std::size_t>(l); }

  static Letter consonant(const std::string& form, std::size_t line_no) {
    auto l = letter_from_form(form, LetterKind::consonant);
    if (!l) throw Error(Errc::bad_format, "line " + std::to_string(line_no) + ": unknown consonant '" + form + "'");
    return *l;
  }

  void fill(LetterSet& set, const std::vector<std::string>& args, std::size_t from, std::size_t line_no) {
    for (std::size_t i = from; i < args.size(); ++i) set.set(idx(consonant(args[i], line_no)));
  }

  void apply_rule(const std::string& kind, const std::vector<std::string>& args, std::size_t line_no) {
    auto need = [&](std::size_t n) {
      if (args.size() < n)
        throw Error(Errc::bad_format, "line " + std::to_string(line_no) + ": '" + kind + "' needs more fields");
    };
    if (kind == "prescript") {
      fill(prescripts_, args, 0, line_no);
    } else if (kind == "superscript") {
      fill(superscripts_, args, 0, line_no);
    } else if (kind == "subscript") {
      fill(subscripts_, args, 0, line_no);
    } else if (kind == "core") {
      fill(cores_, args, 0, line_no);
    } else if (kind == "coda") {
      fill(codas_, args, 0, line_no);
    } else if (kind == "postscript") {
      fill(postscripts_, args, 0, line_no);
    } else if (kind == "particle") {
      for (const auto& form : args) {
        if (form.size() < 2 || form[0] != '\'')
          throw Error(Errc::bad_format, "line " + std::to_string(line_no) + ": particle '" + form +
                                            "' must start with a-chung");
        particles_.push_back(form);
        particle_letters_.push_back(tokenize_letters(form).letters);
      }
    } else if (kind == "above") {
      need(2);
      fill(above_[idx(consonant(args[0], line_no))], args, 1, line_no);
    } else if (kind == "below") {
      need(2);
      fill(below_[idx(consonant(args[0], line_no))], args, 1, line_no);
    } else if (kind == "stack") {
      need(3);
      triple_stacks_.insert({idx(consonant(args[0], line_no)), idx(consonant(args[1], line_no)),
                             idx(consonant(args[2], line_no))});
    } else if (kind == "before") {
      need(2);
      Heads& h = before_[idx(consonant(args[0], line_no))];
      for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& head = args[i];
        if (head[0] == '^') {
          h.superscripts.set(idx(consonant(head.substr(1), line_no)));
        } else if (auto plus = head.find('+'); plus != std::string::npos) {
          h.pairs.insert({idx(consonant(head.substr(0, plus), line_no)),
                          idx(consonant(head.substr(plus + 1), line_no))});
        } else {
          h.cores.set(idx(consonant(head, line_no)));
        }
      }
    } else if (kind == "after") {
      need(2);
      fill(after_[idx(consonant(args[0], line_no))], args, 1, line_no);
    } else if (kind == "onset") {
      need(3);
      OnsetPreference pref;
      if (args[2] == "stack") pref = OnsetPreference::stack;
      else if (args[2] == "prescript") pref = OnsetPreference::prescript;
      else throw Error(Errc::bad_format, "line " + std::to_string(line_no) + ": onset reading must be stack or prescript");
      onset_exceptions_[{idx(consonant(args[0], line_no)), idx(consonant(args[1], line_no))}] = pref;
    } else {
      throw Error(Errc::bad_format, "line " + std::to_string(line_no) + ": unknown rule '" + kind + "'");
    }
  }

  LetterSet prescripts_, superscripts_, subscripts_, cores_, codas_, postscripts_;
  std::array<LetterSet, kLetterCount + 1> above_{}, below_{}, after_{};
  std::set<std::array<std::size_t, 3>> triple_stacks_;
  std::map<std::size_t, Heads> before_;
  std::map<std::pair<std::size_t, std::size_t>, OnsetPreference> onset_exceptions_;
  std::vector<std::string> particles_;
  std::vector<std::vector<Letter>> particle_letters_;
};

inline Onset onset_of(const SyllableTuple& t) {
  return Onset{t.prescript, t.superscript, t.core, t.subscript};
}

inline std::vector<Letter> onset_letters(const Onset& o) {
  std::vector<Letter> run;
  if (o.core == Letter::achen) return run;
  if (o.prescript) run.push_back(*o.prescript);
  if (o.superscript) run.push_back(*o.superscript);
  run.push_back(o.core);
  if (o.subscript) run.push_back(*o.subscript);
  return run;
}

// Full slot-table validity, ignoring how the tuple would be spelled.
inline bool admits(const SyllableTables& tables, const SyllableTuple& t) {
  if (t.foreign) return false;
  if (!is_vowel(t.vowel) || is_vowel(t.core)) return false;
  if (!tables.admits_onset(onset_of(t))) return false;
  if (!tables.admits_tail(t.coda, t.postscript)) return false;
  if (t.particle) {
    if (t.coda || t.postscript) return false;
    const auto& ps = tables.particles();
    if (std::find(ps.begin(), ps.end(), *t.particle) == ps.end()) return false;
  }
  return t.vowel_count() <= 2;
}

// True when the onset is only readable this way with an explicit "." after
// the prescript (the g.y convention).
inline bool needs_separator(const SyllableTables& tables, const SyllableTuple& t) {
  if (!t.prescript || t.superscript) return false;
  auto run = onset_letters(onset_of(t));
  auto readings = tables.onset_readings(run);
  if (readings.size() < 2) return false;
  auto pick = tables.preferred_reading(run, readings);
  return !pick || !pick->prescript;
}

// Valid and spellable: a stacked reading the policy never selects cannot be
// written in Wylie and is excluded.
inline bool representable(const SyllableTables& tables, const SyllableTuple& t) {
  if (!admits(tables, t)) return false;
  Onset o = onset_of(t);
  auto run = onset_letters(o);
  auto readings = tables.onset_readings(run);
  if (readings.size() < 2) return true;
  if (o.prescript) {
    std::size_t with_pre = 0;
    for (const auto& r : readings) with_pre += r.prescript.has_value();
    if (!needs_separator(tables, t)) return tables.preferred_reading(run, readings) == o;
    return with_pre == 1 && !o.superscript;
  }
  return tables.preferred_reading(run, readings) == o;
}

inline std::string render_syllable(const SyllableTuple& t, const SyllableTables& tables) {
  std::string out;
  if (t.prescript) {
    out += wylie_form(*t.prescript);
    if (needs_separator(tables, t)) out += '.';
  }
  if (t.superscript) out += wylie_form(*t.superscript);
  if (t.core != Letter::achen) out += wylie_form(t.core);
  if (t.subscript) out += wylie_form(*t.subscript);
  out += wylie_form(t.vowel);
  if (t.coda) out += wylie_form(*t.coda);
  if (t.postscript) out += wylie_form(*t.postscript);
  if (t.particle) out += *t.particle;
  return out;
}

namespace detail {

inline std::optional<SyllableTuple> parse_host(const std::vector<Letter>& letters, bool separator_after_first,
                                               const SyllableTables& tables) {
  std::size_t vowel_pos = letters.size();
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (is_vowel(letters[i])) {
      if (vowel_pos != letters.size()) return std::nullopt;
      vowel_pos = i;
    }
  }
  if (vowel_pos == letters.size()) return std::nullopt;
  std::vector<Letter> run(letters.begin(), letters.begin() + static_cast<std::ptrdiff_t>(vowel_pos));
  std::size_t tail = letters.size() - vowel_pos - 1;
  if (tail > 2) return std::nullopt;
  if (separator_after_first && run.size() < 2) return std::nullopt;

  auto readings = tables.onset_readings(run);
  std::optional<Onset> pick;
  if (separator_after_first) {
    for (const auto& r : readings) {
      if (r.prescript && !r.superscript) {
        if (pick) throw Error(Errc::ambiguous_parse, "several prescript readings after separator");
        pick = r;
      }
    }
  } else if (readings.size() > 1) {
    pick = tables.preferred_reading(run, readings);
    if (!pick) throw Error(Errc::ambiguous_parse, "onset policy does not resolve " + std::to_string(readings.size()) + " readings");
  } else if (readings.size() == 1) {
    pick = readings.front();
  }
  if (!pick) return std::nullopt;

  SyllableTuple t;
  t.prescript = pick->prescript;
  t.superscript = pick->superscript;
  t.core = pick->core;
  t.subscript = pick->subscript;
  t.vowel = letters[vowel_pos];
  if (tail >= 1) t.coda = letters[vowel_pos + 1];
  if (tail == 2) t.postscript = letters[vowel_pos + 2];
  if (!tables.admits_tail(t.coda, t.postscript)) return std::nullopt;
  if (separator_after_first != needs_separator(tables, t)) return std::nullopt;
  return t;
}

}  // namespace detail

// Throws NotTibetan when no slot assignment fits the tables.
inline SyllableTuple parse_syllable(const LetterSequence& seq, const SyllableTables& tables) {
  const auto& letters = seq.letters;
  if (letters.empty()) throw Error(Errc::invalid_argument, "empty letter sequence");
  for (std::size_t s : seq.separators_after)
    if (s != 0) throw Error(Errc::not_tibetan, "separator outside the prescript position");
  const bool sep = seq.has_separator_after(0);

  std::optional<SyllableTuple> found;
  auto consider = [&](std::optional<SyllableTuple> t) {
    if (!t || !admits(tables, *t)) return;
    if (found) throw Error(Errc::ambiguous_parse, "particle split is ambiguous for '" + render_letters(seq) + "'");
    found = std::move(t);
  };

  consider(detail::parse_host(letters, sep, tables));
  const auto& forms = tables.particles();
  const auto& particle_letters = tables.particle_letters();
  for (std::size_t p = 0; p < forms.size(); ++p) {
    const auto& pl = particle_letters[p];
    if (pl.size() >= letters.size()) continue;
    if (!std::equal(pl.rbegin(), pl.rend(), letters.rbegin())) continue;
    std::vector<Letter> host(letters.begin(), letters.end() - static_cast<std::ptrdiff_t>(pl.size()));
    if (sep && host.size() < 2) continue;
    auto t = detail::parse_host(host, sep, tables);
    if (t) t->particle = forms[p];
    consider(std::move(t));
  }
  if (!found) throw Error(Errc::not_tibetan, "no valid slot assignment for '" + render_letters(seq) + "'");
  return *found;
}

// Parses raw syllable text; syllables that do not tokenize or parse come back
// with the foreign flag set.
inline SyllableTuple analyze_syllable(std::string_view text, const SyllableTables& tables) {
  try {
    return parse_syllable(tokenize_letters(text), tables);
  } catch (const Error& e) {
    if (e.code() == Errc::unknown_character || e.code() == Errc::not_tibetan) {
      SyllableTuple t;
      t.foreign = true;
      return t;
    }
    throw;
  }
}

// Deterministic walk over every spellable tuple: onset, vowel, tail, particle.
inline std::vector<SyllableTuple> enumerate_valid_syllables(const SyllableTables& tables, std::size_t limit) {
  std::vector<SyllableTuple> out;
  if (limit == 0) return out;
  std::vector<std::optional<Letter>> pres{std::nullopt}, supers{std::nullopt}, subs{std::nullopt};
  std::vector<Letter> cores, vowels;
  std::vector<std::pair<std::optional<Letter>, std::optional<Letter>>> tails{{std::nullopt, std::nullopt}};
  for (Letter l : all_letters()) {
    if (tables.is_prescript(l)) pres.push_back(l);
    if (tables.is_superscript(l)) supers.push_back(l);
    if (tables.is_subscript(l)) subs.push_back(l);
    if (tables.is_core(l)) cores.push_back(l);
    if (is_vowel(l)) vowels.push_back(l);
  }
  for (Letter c : all_letters()) {
    if (!tables.is_coda(c)) continue;
    tails.push_back({c, std::nullopt});
    for (Letter p : all_letters())
      if (tables.admits_tail(c, p)) tails.push_back({c, p});
  }
  std::vector<std::optional<std::string>> particles{std::nullopt};
  for (const auto& p : tables.particles()) particles.push_back(p);

  for (Letter core : cores)
    for (auto sub : subs)
      for (auto super : supers)
        for (auto pre : pres) {
          Onset o{pre, super, core, sub};
          if (!tables.admits_onset(o)) continue;
          for (Letter v : vowels)
            for (const auto& [coda, post] : tails)
              for (const auto& particle : particles) {
                SyllableTuple t;
                t.prescript = pre;
                t.superscript = super;
                t.core = core;
                t.subscript = sub;
                t.vowel = v;
                t.coda = coda;
                t.postscript = post;
                t.particle = particle;
                if (!representable(tables, t)) continue;
                out.push_back(std::move(t));
                if (out.size() >= limit) return out;
              }
        }
  return out;
}

}  // namespace tibtext
