#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace eventsum::text {

/// Paice/Husk stemmer driven by an external rule table so results are
/// reproducible byte-for-byte against the shipped data file.
///
/// Rule line syntax (one rule per line, '#' comments and blanks skipped):
///   <reversed-ending>[*]<digits>[<append>](.|>)
/// where <reversed-ending> is the word ending spelled backwards (rules are
/// bucketed by the word's final letter), '*' restricts the rule to intact
/// words, <digits> is the number of trailing characters to remove, <append>
/// is appended after removal, '.' terminates stemming and '>' re-enters the
/// rule table with the new ending.
class LancasterStemmer {
 public:
  static LancasterStemmer from_file(const std::string& path);
  static LancasterStemmer from_lines(const std::vector<std::string>& lines);

  /// Stems one lowercase token. Tokens containing characters outside
  /// [a-z] are returned unchanged.
  std::string stem(std::string_view token) const;

  std::size_t rule_count() const { return rules_.size(); }

 private:
  struct Rule {
    std::string ending;  // in word order (un-reversed)
    bool intact_only = false;
    int remove = 0;
    std::string append;
    bool stop = false;  // '.' terminator
  };

  static Rule parse_rule(std::string_view line);
  static bool acceptable(std::string_view stem);

  std::vector<Rule> rules_;
  std::array<std::vector<int>, 26> index_;  // rule ids per final letter
};

}  // namespace eventsum::text
