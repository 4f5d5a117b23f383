#include "eventsum/tnt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace eventsum::tnt {

namespace {

double log_factorial(std::int64_t n) {
  thread_local std::vector<double> cache{0.0, 0.0};
  while (static_cast<std::int64_t>(cache.size()) <= n)
    cache.push_back(cache.back() + std::log(static_cast<double>(cache.size())));
  return cache[static_cast<std::size_t>(n)];
}

double log_choose(std::int64_t n, std::int64_t k) {
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

}  // namespace

double fisher_one_sided(std::int64_t gist_with, std::int64_t gist_without,
                        std::int64_t base_with, std::int64_t base_without) {
  if (gist_with < 0 || gist_without < 0 || base_with < 0 || base_without < 0)
    throw std::invalid_argument("fisher_one_sided: negative count");
  const std::int64_t gist_total = gist_with + gist_without;
  const std::int64_t base_total = base_with + base_without;
  if (gist_total == 0 || base_total == 0)
    throw std::invalid_argument("fisher_one_sided: zero margin");
  const std::int64_t population = gist_total + base_total;
  const std::int64_t successes = gist_with + base_with;

  // Upper tail of Hypergeometric(population, successes, gist_total).
  const std::int64_t k_max = std::min(successes, gist_total);
  const double log_denominator = log_choose(population, gist_total);
  double p = 0;
  for (std::int64_t k = gist_with; k <= k_max; ++k) {
    p += std::exp(log_choose(successes, k) + log_choose(population - successes, gist_total - k) -
                  log_denominator);
  }
  return std::min(p, 1.0);
}

std::vector<const ingest::IndexedMessage*> fetch_gist(const surveillance::Alarm& alarm,
                                                      const ingest::MessageIndex& index) {
  return index.fetch(alarm.group, alarm.region, alarm.start, alarm.end);
}

std::vector<const ingest::IndexedMessage*> fetch_baseline(const surveillance::Alarm& alarm,
                                                          const ingest::MessageIndex& index,
                                                          int baseline_days) {
  return index.fetch(alarm.group, alarm.region, alarm.start - baseline_days, alarm.start - 1);
}

namespace {

// Document frequency of every unigram/bigram over non-stopword tokens,
// counted once per document.
std::map<std::string, int> ngram_document_frequency(std::span<const text::TokenList> docs,
                                                    const text::StopwordSet& stopwords) {
  std::map<std::string, int> df;
  text::VectorizeOptions opts{.ngram_min = 1, .ngram_max = 2, .stopwords = &stopwords};
  for (const text::TokenList& doc : docs) {
    std::set<std::string> seen;
    for (std::string& gram : text::ngrams(doc, opts)) seen.insert(std::move(gram));
    for (const std::string& gram : seen) ++df[gram];
  }
  return df;
}

bool is_bigram(const std::string& term) { return term.find(' ') != std::string::npos; }

}  // namespace

std::vector<TermCandidate> extract_candidate_terms(std::span<const text::TokenList> gist_docs,
                                                   std::span<const text::TokenList> baseline_docs,
                                                   const text::StopwordSet& stopwords,
                                                   const std::string& primary,
                                                   const SummaryConfig& config) {
  if (static_cast<int>(gist_docs.size()) < config.min_gist)
    throw std::invalid_argument("extract_candidate_terms: gist below minimum size");

  const auto gist_df = ngram_document_frequency(gist_docs, stopwords);
  const auto baseline_df = ngram_document_frequency(baseline_docs, stopwords);
  const int gist_size = static_cast<int>(gist_docs.size());
  const int baseline_size = static_cast<int>(baseline_docs.size());
  const int df_floor =
      static_cast<int>(std::ceil(config.df_gate * static_cast<double>(gist_size)));

  std::vector<TermCandidate> significant;
  for (const auto& [term, df] : gist_df) {
    if (df < df_floor) continue;
    TermCandidate candidate;
    candidate.ngram = term;
    candidate.gist_df = df;
    if (auto it = baseline_df.find(term); it != baseline_df.end()) candidate.baseline_df = it->second;
    // an empty baseline gives the test no evidence; the only possible
    // table is the observed one, so p stays 1
    candidate.p_value =
        baseline_size == 0
            ? 1.0
            : fisher_one_sided(df, gist_size - df, candidate.baseline_df,
                               baseline_size - candidate.baseline_df);
    if (candidate.p_value < config.alpha) significant.push_back(std::move(candidate));
  }

  std::sort(significant.begin(), significant.end(), [](const TermCandidate& a, const TermCandidate& b) {
    if (a.p_value != b.p_value) return a.p_value < b.p_value;
    if (a.gist_df != b.gist_df) return a.gist_df > b.gist_df;
    return a.ngram < b.ngram;
  });

  std::vector<TermCandidate> selected;
  std::size_t unigrams = 0, bigrams = 0;
  for (TermCandidate& candidate : significant) {
    const bool bigram = is_bigram(candidate.ngram);
    if (bigram && bigrams < 2) {
      selected.push_back(std::move(candidate));
      ++bigrams;
    } else if (!bigram && unigrams < 2) {
      selected.push_back(std::move(candidate));
      ++unigrams;
    }
    if (unigrams == 2 && bigrams == 2) break;
  }

  const std::string folded_primary = [&] {
    std::string s = primary;
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
  }();
  const bool already = std::any_of(selected.begin(), selected.end(), [&](const TermCandidate& c) {
    return c.ngram == folded_primary;
  });
  if (!already) {
    TermCandidate keyword;
    keyword.ngram = folded_primary;
    if (auto it = gist_df.find(folded_primary); it != gist_df.end()) keyword.gist_df = it->second;
    if (auto it = baseline_df.find(folded_primary); it != baseline_df.end())
      keyword.baseline_df = it->second;
    keyword.p_value = 1.0;
    selected.push_back(std::move(keyword));
  }
  return selected;
}

namespace {

std::vector<text::TokenList> tokenized_bodies(std::span<const news::NewsArticle* const> articles) {
  std::vector<text::TokenList> docs;
  docs.reserve(articles.size());
  for (const news::NewsArticle* a : articles) docs.push_back(text::tokenize(a->body));
  return docs;
}

std::vector<text::TokenList> tokenized_titles(std::span<const news::NewsArticle* const> articles) {
  std::vector<text::TokenList> docs;
  docs.reserve(articles.size());
  for (const news::NewsArticle* a : articles) docs.push_back(text::tokenize(a->title));
  return docs;
}

}  // namespace

TermSelection select_good_terms(std::span<const std::string> candidate_terms,
                                const news::NewsStore& store, Date from, Date to,
                                const text::StopwordSet& stopwords,
                                const text::LancasterStemmer& stemmer,
                                const SummaryConfig& config) {
  TermSelection result;

  struct Survivor {
    std::string term;
    std::vector<const news::NewsArticle*> articles;
    std::vector<text::TokenList> titles;
  };
  std::vector<Survivor> survivors;

  const text::VectorizeOptions body_opts{
      .ngram_min = 1, .ngram_max = 1, .stopwords = &stopwords, .stemmer = &stemmer};
  for (const std::string& term : candidate_terms) {
    auto articles = store.search(term, from, to, config.articles_per_term);
    if (!articles.empty()) result.any_articles = true;
    if (articles.size() < 2) continue;  // PCSS is undefined on fewer than 2 documents
    const auto bodies = tokenized_bodies(articles);
    const auto vectors = text::tfidf_vectors(bodies, body_opts);
    if (!(text::pcss(vectors) > config.pcss_threshold)) continue;
    auto titles = tokenized_titles(articles);
    survivors.push_back({term, std::move(articles), std::move(titles)});
  }

  if (survivors.size() >= 2) {
    // title cross-PCSS: no stemming, unigrams through trigrams; both sets
    // are vectorised together so their idf space is shared
    const text::VectorizeOptions title_opts{
        .ngram_min = 1, .ngram_max = 3, .stopwords = &stopwords, .stemmer = nullptr};
    std::vector<bool> good(survivors.size(), false);
    for (std::size_t i = 0; i < survivors.size(); ++i) {
      for (std::size_t j = i + 1; j < survivors.size(); ++j) {
        std::vector<text::TokenList> joint(survivors[i].titles);
        joint.insert(joint.end(), survivors[j].titles.begin(), survivors[j].titles.end());
        const auto vectors = text::tfidf_vectors(joint, title_opts);
        const std::span<const text::SparseVector> all(vectors);
        const double score = text::cross_pcss(all.first(survivors[i].titles.size()),
                                              all.subspan(survivors[i].titles.size()));
        if (score > config.pcss_threshold) good[i] = good[j] = true;
      }
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < survivors.size(); ++i) {
      if (!good[i]) continue;
      result.good_terms.push_back(survivors[i].term);
      for (const news::NewsArticle* a : survivors[i].articles)
        if (seen.insert(a->id).second) result.good_articles.push_back(a);
    }
    std::sort(result.good_articles.begin(), result.good_articles.end(),
              [](const news::NewsArticle* a, const news::NewsArticle* b) { return a->id < b->id; });
  }
  return result;
}

std::vector<RankedIndex> rank_by_centroid_scored(std::span<const text::SparseVector> items,
                                                 std::size_t k) {
  if (items.empty()) throw std::invalid_argument("rank_by_centroid: no items");
  text::SparseVector centroid;
  for (const text::SparseVector& v : items)
    for (const auto& [term, w] : v.weights) centroid.weights[term] += w;
  for (auto& [term, w] : centroid.weights) w /= static_cast<double>(items.size());

  std::vector<RankedIndex> scored;
  scored.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i)
    scored.push_back({i, text::cosine(items[i], centroid)});
  std::stable_sort(scored.begin(), scored.end(), [](const RankedIndex& a, const RankedIndex& b) {
    return a.score > b.score;
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

std::vector<std::size_t> rank_by_centroid(std::span<const text::SparseVector> items,
                                          std::size_t k) {
  std::vector<std::size_t> out;
  for (const RankedIndex& r : rank_by_centroid_scored(items, k)) out.push_back(r.index);
  return out;
}

std::string to_string(Status status) {
  switch (status) {
    case Status::full: return "full";
    case Status::no_news: return "no_news";
    case Status::terms_only: return "terms_only";
    case Status::gist_only: return "gist_only";
    case Status::too_small: return "too_small";
  }
  return "unknown";
}

namespace {

// The n-gram was built over the non-stopword token sequence, so membership
// is checked against the same sequence.
bool message_contains_term(const text::TokenList& tokens, const text::StopwordSet& stopwords,
                           const std::string& term) {
  text::TokenList kept;
  for (const std::string& tok : tokens)
    if (!stopwords.count(tok)) kept.push_back(tok);
  text::TokenList needle;
  std::size_t start = 0;
  while (start <= term.size()) {
    const std::size_t space = term.find(' ', start);
    needle.push_back(term.substr(start, space == std::string::npos ? space : space - start));
    if (space == std::string::npos) break;
    start = space + 1;
  }
  if (needle.empty() || needle.size() > kept.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= kept.size(); ++i) {
    bool all = true;
    for (std::size_t j = 0; j < needle.size(); ++j)
      if (kept[i + j] != needle[j]) {
        all = false;
        break;
      }
    if (all) return true;
  }
  return false;
}

std::vector<RankedMessage> rank_messages(std::span<const ingest::IndexedMessage* const> messages,
                                         const text::StopwordSet& stopwords,
                                         const text::LancasterStemmer& stemmer, std::size_t k) {
  std::vector<const ingest::IndexedMessage*> ordered(messages.begin(), messages.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const ingest::IndexedMessage* a, const ingest::IndexedMessage* b) {
              return a->id < b->id;
            });
  std::vector<text::TokenList> docs;
  docs.reserve(ordered.size());
  for (const ingest::IndexedMessage* m : ordered) docs.push_back(text::tokenize(m->text));
  const text::VectorizeOptions opts{
      .ngram_min = 1, .ngram_max = 1, .stopwords = &stopwords, .stemmer = &stemmer};
  const auto vectors = text::tfidf_vectors(docs, opts);
  std::vector<RankedMessage> out;
  for (const RankedIndex& r : rank_by_centroid_scored(vectors, k))
    out.push_back({ordered[r.index]->id, r.score});
  return out;
}

}  // namespace

EventSummary summarise(const surveillance::Alarm& alarm, const std::string& primary,
                       const ingest::MessageIndex& index, const news::NewsStore& store,
                       const text::StopwordSet& stopwords, const text::LancasterStemmer& stemmer,
                       const SummaryConfig& config) {
  EventSummary summary;
  const auto gist = fetch_gist(alarm, index);

  // GTT is produced from whatever gist exists, even when too small
  if (!gist.empty())
    summary.gtt = rank_messages(gist, stopwords, stemmer, config.top_k);

  if (static_cast<int>(gist.size()) < config.min_gist) {
    summary.status = Status::too_small;
    return summary;
  }

  const auto baseline = fetch_baseline(alarm, index, config.baseline_days);
  std::vector<text::TokenList> gist_docs, baseline_docs;
  gist_docs.reserve(gist.size());
  for (const auto* m : gist) gist_docs.push_back(text::tokenize(m->text));
  baseline_docs.reserve(baseline.size());
  for (const auto* m : baseline) baseline_docs.push_back(text::tokenize(m->text));

  summary.candidates =
      extract_candidate_terms(gist_docs, baseline_docs, stopwords, primary, config);

  const bool has_significant =
      std::any_of(summary.candidates.begin(), summary.candidates.end(),
                  [&](const TermCandidate& c) { return c.p_value < config.alpha; });

  std::vector<std::string> candidate_terms;
  for (const TermCandidate& c : summary.candidates) candidate_terms.push_back(c.ngram);

  const TermSelection selection = select_good_terms(candidate_terms, store, alarm.start,
                                                    alarm.end, stopwords, stemmer, config);
  summary.good_terms = selection.good_terms;

  if (!selection.good_articles.empty()) {
    const auto bodies = tokenized_bodies(selection.good_articles);
    const text::VectorizeOptions body_opts{
        .ngram_min = 1, .ngram_max = 1, .stopwords = &stopwords, .stemmer = &stemmer};
    const auto vectors = text::tfidf_vectors(bodies, body_opts);
    for (const RankedIndex& r : rank_by_centroid_scored(vectors, config.top_k)) {
      const news::NewsArticle* a = selection.good_articles[r.index];
      summary.articles.push_back({a->id, a->title, a->url, r.score});
    }
  }

  if (!has_significant) {
    summary.status = Status::gist_only;
    return summary;
  }

  // STT from good terms; candidate terms when news linkage found none
  const std::vector<std::string>& stt_terms =
      summary.good_terms.empty() ? candidate_terms : summary.good_terms;
  std::vector<const ingest::IndexedMessage*> filtered;
  for (std::size_t i = 0; i < gist.size(); ++i) {
    for (const std::string& term : stt_terms) {
      if (message_contains_term(gist_docs[i], stopwords, term)) {
        filtered.push_back(gist[i]);
        break;
      }
    }
  }
  if (!filtered.empty())
    summary.stt = rank_messages(filtered, stopwords, stemmer, config.top_k);

  if (!summary.good_terms.empty()) {
    summary.status = Status::full;
  } else if (!filtered.empty()) {
    summary.status = Status::no_news;
  } else {
    summary.status = Status::terms_only;
  }
  return summary;
}

}  // namespace eventsum::tnt
