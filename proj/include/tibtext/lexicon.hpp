#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tibtext/util.hpp"

namespace tibtext {

// Word list read from a line-oriented file. Each line is one group of
// interchangeable forms (allomorphs); single-entry lines are the common case.
class Lexicon {
 public:
  Lexicon() = default;

  static Lexicon parse(std::string_view content) {
    Lexicon lex;
    for (const auto& [no, line] : data_lines(content)) {
      auto forms = split_ws(line);
      const std::size_t group = lex.groups_.size();
      for (const auto& f : forms) lex.group_of_.emplace(f, group);
      lex.groups_.push_back(std::move(forms));
    }
    return lex;
  }

  static Lexicon load(const std::string& path) { return parse(read_file(path)); }

  bool contains(std::string_view form) const { return group_of_.count(std::string(form)) > 0; }

  // Other members of the group holding `form`, in file order.
  std::vector<std::string> alternatives(std::string_view form) const {
    std::vector<std::string> out;
    auto it = group_of_.find(std::string(form));
    if (it == group_of_.end()) return out;
    for (const auto& f : groups_[it->second])
      if (f != form) out.push_back(f);
    return out;
  }

  const std::vector<std::vector<std::string>>& groups() const { return groups_; }

  std::vector<std::string> forms() const {
    std::vector<std::string> out;
    for (const auto& g : groups_) out.insert(out.end(), g.begin(), g.end());
    return out;
  }

  std::size_t size() const { return group_of_.size(); }

 private:
  std::vector<std::vector<std::string>> groups_;
  std::map<std::string, std::size_t> group_of_;
};

}  // namespace tibtext
