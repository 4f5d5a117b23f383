#include "eventsum/newsstore.hpp"

#include <algorithm>
#include <cmath>
#include <istream>

#include <json.hpp>

namespace eventsum::news {

namespace {

using nlohmann::json;

constexpr double kBm25K1 = 1.2;
constexpr double kBm25B = 0.75;

}  // namespace

IngestStats NewsStore::ingest(std::istream& jsonl) {
  IngestStats stats;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(jsonl, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    auto reject = [&](std::string reason) { stats.rejects.push_back({line_no, std::move(reason)}); };
    if (j.is_discarded() || !j.is_object()) {
      reject("invalid json");
      continue;
    }
    NewsArticle a;
    bool bad = false;
    for (const char* field : {"id", "title", "body", "published"}) {
      if (!j.contains(field) || !j[field].is_string()) {
        reject(std::string("missing field ") + field);
        bad = true;
        break;
      }
    }
    if (bad) continue;
    a.id = j["id"].get<std::string>();
    a.title = j["title"].get<std::string>();
    a.body = j["body"].get<std::string>();
    if (j.contains("url") && j["url"].is_string()) a.url = j["url"].get<std::string>();
    if (a.title.empty() || a.body.empty()) {
      reject("empty title or body");
      continue;
    }
    const auto published = Date::parse(j["published"].get<std::string>());
    if (!published) {
      reject("bad published date");
      continue;
    }
    a.published = *published;
    if (ids_.count(a.id)) {
      reject("duplicate id " + a.id);
      continue;
    }
    const auto doc = static_cast<std::uint32_t>(articles_.size());
    ids_.emplace(a.id, doc);
    articles_.push_back(std::move(a));
    index_article(doc);
    ++stats.accepted;
  }
  return stats;
}

void NewsStore::index_article(std::uint32_t doc) {
  const NewsArticle& a = articles_[doc];
  std::unordered_map<std::string, int> counts;
  int length = 0;
  for (std::string& tok : text::tokenize(a.title + ' ' + a.body)) {
    ++counts[std::move(tok)];
    ++length;
  }
  for (const auto& [term, count] : counts) postings_[term].push_back(doc);
  term_counts_.push_back(std::move(counts));
  doc_length_.push_back(length);
  total_length_ += length;
}

const NewsArticle* NewsStore::by_id(const std::string& id) const {
  auto it = ids_.find(id);
  return it == ids_.end() ? nullptr : &articles_[it->second];
}

std::vector<const NewsArticle*> NewsStore::search(const std::string& term, Date from, Date to,
                                                  std::size_t k) const {
  std::vector<const NewsArticle*> out;
  if (articles_.empty() || k == 0) return out;
  const text::TokenList tokens = text::tokenize(term);
  if (tokens.empty()) return out;

  // intersect postings, scanning the rarest token's list
  const std::vector<std::uint32_t>* seed = nullptr;
  for (const std::string& tok : tokens) {
    auto it = postings_.find(tok);
    if (it == postings_.end()) return out;
    if (!seed || it->second.size() < seed->size()) seed = &it->second;
  }

  const double n_docs = static_cast<double>(articles_.size());
  const double avgdl = total_length_ / n_docs;
  struct Hit {
    double score;
    std::uint32_t doc;
  };
  std::vector<Hit> hits;
  for (std::uint32_t doc : *seed) {
    const NewsArticle& a = articles_[doc];
    if (a.published < from || a.published > to) continue;
    double score = 0;
    bool all = true;
    for (const std::string& tok : tokens) {
      auto it = term_counts_[doc].find(tok);
      if (it == term_counts_[doc].end()) {
        all = false;
        break;
      }
      const double tf = it->second;
      const double df = static_cast<double>(postings_.at(tok).size());
      const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
      const double norm = 1.0 - kBm25B + kBm25B * (doc_length_[doc] / avgdl);
      score += idf * (tf * (kBm25K1 + 1.0)) / (tf + kBm25K1 * norm);
    }
    if (all) hits.push_back({score, doc});
  }
  std::sort(hits.begin(), hits.end(), [&](const Hit& x, const Hit& y) {
    if (x.score != y.score) return x.score > y.score;
    const NewsArticle& ax = articles_[x.doc];
    const NewsArticle& ay = articles_[y.doc];
    if (ax.published != ay.published) return ax.published < ay.published;
    return ax.id < ay.id;
  });
  if (hits.size() > k) hits.resize(k);
  out.reserve(hits.size());
  for (const Hit& h : hits) out.push_back(&articles_[h.doc]);
  return out;
}

}  // namespace eventsum::news
