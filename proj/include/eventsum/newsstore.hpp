#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "eventsum/date.hpp"
#include "eventsum/textvec.hpp"

namespace eventsum::news {

struct NewsArticle {
  std::string id;
  std::string title;
  std::string body;
  std::string url;  // optional
  Date published;
};

struct Reject {
  std::size_t line_no = 0;
  std::string reason;
};

struct IngestStats {
  std::size_t accepted = 0;
  std::vector<Reject> rejects;
};

/// Append-only article store with conjunctive term search over a date
/// range. Single writer during ingest; read-only searches afterwards.
class NewsStore {
 public:
  /// One JSON object per line: {"id", "title", "body", "published":
  /// "YYYY-MM-DD", "url": str|null}. Duplicate ids and malformed records
  /// become rejects.
  IngestStats ingest(std::istream& jsonl);

  std::size_t size() const { return articles_.size(); }
  const NewsArticle* by_id(const std::string& id) const;
  const std::vector<NewsArticle>& articles() const { return articles_; }

  /// Articles published in [from, to] whose title+body tokens contain all
  /// tokens of the term, ranked by BM25 (k1 = 1.2, b = 0.75, idf over the
  /// whole store), ties by (published, id) ascending. At most k results.
  std::vector<const NewsArticle*> search(const std::string& term, Date from, Date to,
                                         std::size_t k = 10) const;

 private:
  void index_article(std::uint32_t doc);

  std::vector<NewsArticle> articles_;
  std::vector<std::unordered_map<std::string, int>> term_counts_;  // per doc
  std::vector<int> doc_length_;
  std::unordered_map<std::string, std::vector<std::uint32_t>> postings_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  double total_length_ = 0;
};

}  // namespace eventsum::news
