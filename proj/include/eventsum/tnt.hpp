#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eventsum/ingest.hpp"
#include "eventsum/newsstore.hpp"
#include "eventsum/surveillance.hpp"
#include "eventsum/textvec.hpp"

namespace eventsum::tnt {

struct SummaryConfig {
  double pcss_threshold = -0.08;  // shared by the body and title gates
  double alpha = 0.05;            // Fisher significance level
  double df_gate = 0.05;          // minimum fraction of gist tweets containing a term
  int min_gist = 30;              // below this the event is not summarised
  int baseline_days = 28;
  std::size_t articles_per_term = 10;
  std::size_t top_k = 5;  // tweets and articles returned
};

/// One-sided (greater) Fisher exact p-value for the 2x2 table
///   [gist_with, gist_without; base_with, base_without]:
/// the hypergeometric upper tail P[X >= gist_with], evaluated with
/// log-factorials. Throws when either row margin is zero.
double fisher_one_sided(std::int64_t gist_with, std::int64_t gist_without,
                        std::int64_t base_with, std::int64_t base_without);

struct TermCandidate {
  std::string ngram;
  int gist_df = 0;
  int baseline_df = 0;
  double p_value = 1.0;
};

/// Gist messages for the event: kept messages matching its keyword group
/// and region with dates in [start, end].
std::vector<const ingest::IndexedMessage*> fetch_gist(const surveillance::Alarm& alarm,
                                                      const ingest::MessageIndex& index);

/// Same filter over the baseline_days days ending the day before the event.
std::vector<const ingest::IndexedMessage*> fetch_baseline(const surveillance::Alarm& alarm,
                                                          const ingest::MessageIndex& index,
                                                          int baseline_days = 28);

/// Unigrams/bigrams over non-stopword tokens present in at least df_gate of
/// the gist messages (document frequency, counted once per message), kept
/// when Fisher's test says they are over-represented versus the baseline at
/// p < alpha. Returns the top 2 unigrams and top 2 bigrams by ascending p
/// (ties by higher gist df, then lexicographically), with the primary
/// keyword appended (deduplicated, p reported as 1 when untested). Throws
/// std::invalid_argument when the gist is smaller than min_gist.
std::vector<TermCandidate> extract_candidate_terms(
    std::span<const text::TokenList> gist_docs, std::span<const text::TokenList> baseline_docs,
    const text::StopwordSet& stopwords, const std::string& primary, const SummaryConfig& config);

struct TermSelection {
  std::vector<std::string> good_terms;
  std::vector<const news::NewsArticle*> good_articles;  // union, deduplicated, by id
  bool any_articles = false;  // whether any candidate search returned articles
};

/// Algorithm steps 9-14: search each candidate term over the event dates,
/// drop terms whose top articles are incoherent (body PCSS <= threshold,
/// stopwords removed and stemming applied, unigrams) or too few (< 2), then
/// require each survivor's article titles (no stemming, n-grams 1-3) to
/// cross-PCSS above the threshold with at least one other survivor.
TermSelection select_good_terms(std::span<const std::string> candidate_terms,
                                const news::NewsStore& store, Date from, Date to,
                                const text::StopwordSet& stopwords,
                                const text::LancasterStemmer& stemmer,
                                const SummaryConfig& config);

struct RankedIndex {
  std::size_t index = 0;
  double score = 0;
};

/// Top-k items by cosine similarity to the mean vector, ties broken by
/// lower index. Callers order items by id beforehand.
std::vector<RankedIndex> rank_by_centroid_scored(std::span<const text::SparseVector> items,
                                                 std::size_t k);

/// Indices only, same ordering.
std::vector<std::size_t> rank_by_centroid(std::span<const text::SparseVector> items,
                                          std::size_t k);

enum class Status {
  full,        // good terms with linked news
  no_news,     // significant terms, news linkage failed; STT from candidates
  terms_only,  // significant terms but no message contains any of them
  gist_only,   // no statistically significant terms; GTT only
  too_small,   // gist below min_gist; GTT only
};

std::string to_string(Status status);

struct RankedMessage {
  std::string id;
  double score = 0;
};

struct RankedArticle {
  std::string id;
  std::string title;
  std::string url;
  double score = 0;
};

struct EventSummary {
  Status status = Status::too_small;
  std::vector<TermCandidate> candidates;
  std::vector<std::string> good_terms;
  std::vector<RankedArticle> articles;
  std::vector<RankedMessage> stt;
  std::vector<RankedMessage> gtt;
};

/// The whole pipeline for one event: gist/baseline fetch, candidate term
/// extraction, PCSS-gated news linkage, then centroid-cosine ranking of
/// articles and tweets. GTT is always produced from whatever gist exists;
/// STT uses good terms when available, falling back to candidate terms.
EventSummary summarise(const surveillance::Alarm& alarm, const std::string& primary,
                       const ingest::MessageIndex& index, const news::NewsStore& store,
                       const text::StopwordSet& stopwords, const text::LancasterStemmer& stemmer,
                       const SummaryConfig& config);

}  // namespace eventsum::tnt
