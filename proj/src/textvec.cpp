#include "eventsum/textvec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace eventsum::text {

namespace {

bool token_char(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

void split_into(std::string_view text, TokenList& out) {
  std::string current;
  for (unsigned char c : text) {
    if (token_char(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
}

bool looks_like_url(std::string_view word) {
  return word.starts_with("http://") || word.starts_with("https://") ||
         word.starts_with("www.");
}

}  // namespace

TokenList split_tokens(std::string_view text) {
  TokenList out;
  split_into(text, out);
  return out;
}

TokenList tokenize(std::string_view text) {
  TokenList out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::string_view word = text.substr(i, j - i);
    i = j;
    if (word.empty() || looks_like_url(word) || word.front() == '@') continue;
    while (!word.empty() && word.front() == '#') word.remove_prefix(1);
    split_into(word, out);
  }
  return out;
}

std::vector<std::string> load_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open word list: " + path);
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    if (!line.empty()) words.push_back(line);
  }
  return words;
}

StopwordSet build_stopwords(std::span<const std::string> standard_list,
                            const std::unordered_map<std::string, std::size_t>& corpus_counts,
                            std::size_t top_k) {
  StopwordSet set(standard_list.begin(), standard_list.end());
  std::vector<std::pair<std::string, std::size_t>> ranked(corpus_counts.begin(),
                                                          corpus_counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > top_k) ranked.resize(top_k);
  for (auto& [token, count] : ranked) set.insert(std::move(token));
  return set;
}

TokenList ngrams(const TokenList& tokens, const VectorizeOptions& options) {
  TokenList kept;
  kept.reserve(tokens.size());
  for (const std::string& tok : tokens) {
    if (options.stopwords && options.stopwords->count(tok)) continue;
    kept.push_back(options.stemmer ? options.stemmer->stem(tok) : tok);
  }
  TokenList grams;
  for (int n = options.ngram_min; n <= options.ngram_max; ++n) {
    if (n < 1 || kept.size() < static_cast<std::size_t>(n)) continue;
    for (std::size_t i = 0; i + n <= kept.size(); ++i) {
      std::string gram = kept[i];
      for (int k = 1; k < n; ++k) {
        gram += ' ';
        gram += kept[i + k];
      }
      grams.push_back(std::move(gram));
    }
  }
  return grams;
}

std::vector<SparseVector> tfidf_vectors(std::span<const TokenList> docs,
                                        const VectorizeOptions& options) {
  if (docs.empty()) throw std::invalid_argument("tfidf_vectors: no documents");
  std::vector<std::map<std::string, double>> tf(docs.size());
  std::map<std::string, std::size_t> df;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (std::string& gram : ngrams(docs[d], options)) tf[d][std::move(gram)] += 1.0;
    for (const auto& [term, count] : tf[d]) ++df[term];
  }
  const double n_docs = static_cast<double>(docs.size());
  std::vector<SparseVector> vectors(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (auto& [term, count] : tf[d]) {
      const double idf = std::log((1.0 + n_docs) / (1.0 + static_cast<double>(df[term]))) + 1.0;
      vectors[d].weights[term] = count * idf;
    }
  }
  return vectors;
}

double SparseVector::norm() const {
  double sum = 0;
  for (const auto& [term, w] : weights) sum += w * w;
  return std::sqrt(sum);
}

double cosine(const SparseVector& a, const SparseVector& b) {
  if (a.zero() || b.zero()) return 0;
  const SparseVector& small = a.weights.size() <= b.weights.size() ? a : b;
  const SparseVector& large = a.weights.size() <= b.weights.size() ? b : a;
  double dot = 0;
  for (const auto& [term, w] : small.weights) {
    auto it = large.weights.find(term);
    if (it != large.weights.end()) dot += w * it->second;
  }
  if (dot == 0) return 0;
  return dot / (a.norm() * b.norm());
}

namespace {

double mean_minus_stddev(const std::vector<double>& values) {
  double mean = 0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return mean - std::sqrt(var);
}

}  // namespace

double pcss(std::span<const SparseVector> vectors) {
  if (vectors.size() < 2) throw std::invalid_argument("pcss: need at least 2 vectors");
  std::vector<double> sims;
  sims.reserve(vectors.size() * (vectors.size() - 1) / 2);
  for (std::size_t i = 0; i < vectors.size(); ++i)
    for (std::size_t j = i + 1; j < vectors.size(); ++j)
      sims.push_back(cosine(vectors[i], vectors[j]));
  return mean_minus_stddev(sims);
}

double cross_pcss(std::span<const SparseVector> a, std::span<const SparseVector> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("cross_pcss: empty set");
  std::vector<double> sims;
  sims.reserve(a.size() * b.size());
  for (const SparseVector& va : a)
    for (const SparseVector& vb : b) sims.push_back(cosine(va, vb));
  return mean_minus_stddev(sims);
}

}  // namespace eventsum::text
