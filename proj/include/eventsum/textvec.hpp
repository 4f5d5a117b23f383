#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "eventsum/stemmer.hpp"

namespace eventsum::text {

using TokenList = std::vector<std::string>;
using StopwordSet = std::unordered_set<std::string>;

/// Lowercases, drops URLs and @mentions, strips '#' off hashtags, then
/// splits on non-alphanumeric runs. Bytes >= 0x80 are kept inside tokens.
TokenList tokenize(std::string_view text);

/// Plain token split used for keyword matching: lowercase and split on
/// non-alphanumeric runs, nothing removed.
TokenList split_tokens(std::string_view text);

/// Loads a one-word-per-line list ('#' comments and blanks skipped).
std::vector<std::string> load_word_list(const std::string& path);

/// Standard list plus the top_k most frequent corpus tokens; rank ties are
/// broken lexicographically before truncation so the set is deterministic.
StopwordSet build_stopwords(std::span<const std::string> standard_list,
                            const std::unordered_map<std::string, std::size_t>& corpus_counts,
                            std::size_t top_k = 200);

/// Term -> weight map ordered by term so iteration is deterministic.
struct SparseVector {
  std::map<std::string, double> weights;

  double norm() const;
  bool zero() const { return weights.empty(); }
};

struct VectorizeOptions {
  int ngram_min = 1;
  int ngram_max = 1;
  const StopwordSet* stopwords = nullptr;
  const LancasterStemmer* stemmer = nullptr;
};

/// TF/IDF over exactly this document group: tf is the raw n-gram count in
/// the document, idf = ln((1 + N) / (1 + df)) + 1. N-grams are formed over
/// the stemmed (when enabled) non-stopword token sequence, joined by a
/// single space.
std::vector<SparseVector> tfidf_vectors(std::span<const TokenList> docs,
                                        const VectorizeOptions& options = {});

/// The processed n-gram multiset for one document under the same options;
/// exposed so callers can count document frequencies consistently.
TokenList ngrams(const TokenList& tokens, const VectorizeOptions& options);

/// dot(a, b) / (|a| |b|); 0 when either vector is zero.
double cosine(const SparseVector& a, const SparseVector& b);

/// Pairwise cosine similarity score: mean of all unordered pairwise
/// cosines minus their population standard deviation. Throws
/// std::invalid_argument for fewer than 2 vectors.
double pcss(std::span<const SparseVector> vectors);

/// PCSS over every (a, b) in A x B. Throws when either set is empty.
double cross_pcss(std::span<const SparseVector> a, std::span<const SparseVector> b);

}  // namespace eventsum::text
