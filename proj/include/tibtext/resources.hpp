#pragma once

// The data files every pipeline stage reads, loaded together from one
// directory.

#include <cstdlib>
#include <filesystem>
#include <string>

#include "tibtext/cleaning.hpp"
#include "tibtext/lexicon.hpp"
#include "tibtext/stem.hpp"
#include "tibtext/syllable.hpp"

namespace tibtext {

struct Resources {
  SyllableTables tables;
  RuleSet rules;
  CostTable costs;
  Lexicon particles;        // grammatical particles, grouped by allomorph
  Lexicon function_words;
  Lexicon verbal_prefixes;  // prescript letters marking verb forms
  Lexicon loanwords;        // parseable syllables still counted as foreign
  CleaningConfig cleaning;
};

// TIBTEXT_DATA, then the directory baked in at build time, then ./data.
inline std::string default_data_dir() {
  if (const char* env = std::getenv("TIBTEXT_DATA"); env && *env) return env;
#ifdef TIBTEXT_DEFAULT_DATA_DIR
  return TIBTEXT_DEFAULT_DATA_DIR;
#else
  return "data";
#endif
}

inline Resources load_resources(const std::string& dir = default_data_dir()) {
  namespace fs = std::filesystem;
  auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };
  auto optional_lexicon = [&](const char* name) {
    return fs::exists(path(name)) ? Lexicon::load(path(name)) : Lexicon{};
  };
  Resources r{
      SyllableTables::load(path("syllable_tables.txt")),
      RuleSet::load(path("normalization_rules.txt")),
      CostTable::load(path("costs.txt")),
      Lexicon::load(path("particles.txt")),
      Lexicon::load(path("function_words.txt")),
      Lexicon::load(path("verbal_prefixes.txt")),
      optional_lexicon("loanwords.txt"),
      fs::exists(path("cleaning.txt")) ? CleaningConfig::load(path("cleaning.txt")) : CleaningConfig{},
  };
  return r;
}

}  // namespace tibtext
