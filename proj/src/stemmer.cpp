#include "eventsum/stemmer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

namespace eventsum::text {

namespace {

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// 'y' counts as a vowel except word-initially.
bool has_inner_vowel(std::string_view s) {
  for (std::size_t i = 1; i < s.size(); ++i)
    if (is_vowel(s[i]) || s[i] == 'y') return true;
  return false;
}

}  // namespace

LancasterStemmer::Rule LancasterStemmer::parse_rule(std::string_view line) {
  Rule rule;
  std::size_t i = 0;
  while (i < line.size() && line[i] >= 'a' && line[i] <= 'z') ++i;
  if (i == 0) throw std::invalid_argument("stemmer rule without an ending: " + std::string(line));
  rule.ending.assign(line.rbegin() + static_cast<long>(line.size() - i), line.rend());
  if (i < line.size() && line[i] == '*') {
    rule.intact_only = true;
    ++i;
  }
  std::size_t digits = i;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i == digits) throw std::invalid_argument("stemmer rule without a count: " + std::string(line));
  rule.remove = std::stoi(std::string(line.substr(digits, i - digits)));
  std::size_t append = i;
  while (i < line.size() && line[i] >= 'a' && line[i] <= 'z') ++i;
  rule.append.assign(line.substr(append, i - append));
  if (i + 1 != line.size() || (line[i] != '.' && line[i] != '>'))
    throw std::invalid_argument("stemmer rule with a bad terminator: " + std::string(line));
  rule.stop = line[i] == '.';
  if (rule.remove == 0 && rule.append.empty() && !rule.stop)
    throw std::invalid_argument("stemmer rule would never terminate: " + std::string(line));
  return rule;
}

LancasterStemmer LancasterStemmer::from_lines(const std::vector<std::string>& lines) {
  LancasterStemmer s;
  for (const std::string& raw : lines) {
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && std::isspace(static_cast<unsigned char>(line[start]))) ++start;
    line.erase(0, start);
    if (line.empty()) continue;
    Rule rule = parse_rule(line);
    const char last = rule.ending.back();
    s.index_[last - 'a'].push_back(static_cast<int>(s.rules_.size()));
    s.rules_.push_back(std::move(rule));
  }
  if (s.rules_.empty()) throw std::invalid_argument("stemmer rule table is empty");
  return s;
}

LancasterStemmer LancasterStemmer::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stemmer rules: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return from_lines(lines);
}

bool LancasterStemmer::acceptable(std::string_view stem) {
  if (stem.empty()) return false;
  if (is_vowel(stem.front())) return stem.size() >= 2;
  return stem.size() >= 3 && has_inner_vowel(stem);
}

std::string LancasterStemmer::stem(std::string_view token) const {
  for (char c : token)
    if (c < 'a' || c > 'z') return std::string(token);
  std::string word(token);
  bool intact = true;
  bool progressed = true;
  while (progressed && !word.empty()) {
    progressed = false;
    for (int id : index_[word.back() - 'a']) {
      const Rule& rule = rules_[id];
      if (rule.intact_only && !intact) continue;
      if (rule.ending.size() > word.size() ||
          word.compare(word.size() - rule.ending.size(), rule.ending.size(), rule.ending) != 0)
        continue;
      if (static_cast<std::size_t>(rule.remove) > word.size()) continue;
      std::string candidate = word.substr(0, word.size() - rule.remove) + rule.append;
      if (!acceptable(candidate)) continue;
      word = std::move(candidate);
      intact = false;
      if (rule.stop) return word;
      progressed = true;
      break;
    }
  }
  return word;
}

}  // namespace eventsum::text
