#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tibtext {

enum class Errc {
  unknown_character,
  not_tibetan,
  ambiguous_parse,
  foreign_syllable,
  degenerate_data,
  shape_mismatch,
  template_mismatch,
  empty_document,
  empty_test_set,
  bad_chunking,
  too_large,
  both_absent,
  unbalanced_sigla,
  duplicate_doc_id,
  io_error,
  bad_format,
  invalid_argument,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::unknown_character: return "UnknownCharacter";
    case Errc::not_tibetan: return "NotTibetan";
    case Errc::ambiguous_parse: return "AmbiguousParse";
    case Errc::foreign_syllable: return "ForeignSyllable";
    case Errc::degenerate_data: return "DegenerateData";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::template_mismatch: return "TemplateMismatch";
    case Errc::empty_document: return "EmptyDocument";
    case Errc::empty_test_set: return "EmptyTestSet";
    case Errc::bad_chunking: return "BadChunking";
    case Errc::too_large: return "TooLarge";
    case Errc::both_absent: return "BothAbsent";
    case Errc::unbalanced_sigla: return "UnbalancedSigla";
    case Errc::duplicate_doc_id: return "DuplicateDocId";
    case Errc::io_error: return "IoError";
    case Errc::bad_format: return "BadFormat";
    case Errc::invalid_argument: return "InvalidArgument";
  }
  return "Error";
}

// All domain failures surface as this type. `position` is a byte offset for
// errors that have one (unknown characters, unbalanced sigla), else npos.
class Error : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Error(Errc code, const std::string& what, std::size_t position = npos)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code),
        position_(position) {}

  Errc code() const noexcept { return code_; }
  std::size_t position() const noexcept { return position_; }

 private:
  Errc code_;
  std::size_t position_;
};

}  // namespace tibtext
