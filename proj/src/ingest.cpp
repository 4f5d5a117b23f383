#include "eventsum/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "eventsum/textvec.hpp"

namespace eventsum::ingest {

namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::optional<std::string> parse_message_line(const std::string& line, Message& out) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return "invalid json";
  for (const char* field : {"id", "user_id", "created_at", "text"}) {
    if (!j.contains(field) || !j[field].is_string()) return std::string("missing field ") + field;
  }
  for (const char* field : {"lat", "lon"}) {
    if (!j.contains(field) || !j[field].is_number()) return std::string("missing field ") + field;
  }
  if (j.contains("retweet") && !j["retweet"].is_boolean()) return "retweet not boolean";
  if (j.value("retweet", false)) return "retweet";
  out.id = j["id"].get<std::string>();
  out.user_id = j["user_id"].get<std::string>();
  out.text = j["text"].get<std::string>();
  if (out.id.empty()) return "id empty";
  if (out.user_id.empty()) return "user_id empty";
  if (out.text.empty()) return "text empty";
  const auto ts = parse_instant(j["created_at"].get<std::string>());
  if (!ts) return "bad timestamp";
  out.timestamp = *ts;
  out.point = {j["lat"].get<double>(), j["lon"].get<double>()};
  if (!std::isfinite(out.point.lat) || out.point.lat < -90.0 || out.point.lat > 90.0)
    return "lat out of range";
  if (!std::isfinite(out.point.lon) || out.point.lon < -180.0 || out.point.lon > 180.0)
    return "lon out of range";
  return std::nullopt;
}

ParseResult parse_messages(std::istream& in) {
  if (!in) throw std::runtime_error("parse_messages: unreadable stream");
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Message m;
    if (auto reason = parse_message_line(line, m)) {
      result.rejects.push_back({line_no, std::move(*reason)});
    } else {
      result.messages.push_back(std::move(m));
    }
  }
  return result;
}

std::vector<KeywordGroup> read_keyword_groups(std::istream& in) {
  json j = json::parse(in);
  if (!j.is_array()) throw std::runtime_error("keyword groups: expected a JSON array");
  std::vector<KeywordGroup> groups;
  for (const auto& g : j) {
    KeywordGroup group;
    const std::string cls = g.at("class").get<std::string>();
    if (cls == "symptom") {
      group.cls = KeywordGroup::Class::symptom;
    } else if (cls == "emotion") {
      group.cls = KeywordGroup::Class::emotion;
    } else {
      throw std::runtime_error("keyword groups: unknown class '" + cls + "'");
    }
    group.primary = g.at("primary").get<std::string>();
    if (group.primary.empty()) throw std::runtime_error("keyword groups: empty primary");
    std::set<std::string> seen;
    const std::string folded_primary = lower(group.primary);
    for (const auto& a : g.value("aliases", json::array())) {
      std::string alias = a.get<std::string>();
      std::string folded = lower(alias);
      if (folded == folded_primary)
        throw std::runtime_error("keyword groups: alias equals primary '" + group.primary + "'");
      if (!seen.insert(folded).second)
        throw std::runtime_error("keyword groups: duplicate alias '" + alias + "'");
      group.aliases.push_back(std::move(alias));
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

namespace {

bool contains_sequence(const text::TokenList& haystack, const text::TokenList& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    bool all = true;
    for (std::size_t k = 0; k < needle.size(); ++k) {
      if (haystack[i + k] != needle[k]) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

}  // namespace

std::vector<int> match_keywords(const std::string& text, std::span<const KeywordGroup> groups) {
  const text::TokenList tokens = text::split_tokens(text);
  std::vector<int> matched;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    bool hit = contains_sequence(tokens, text::split_tokens(groups[g].primary));
    for (std::size_t a = 0; !hit && a < groups[g].aliases.size(); ++a)
      hit = contains_sequence(tokens, text::split_tokens(groups[g].aliases[a]));
    if (hit) matched.push_back(static_cast<int>(g));
  }
  return matched;
}

LinearNoiseModel read_noise_model(std::istream& in) {
  json j = json::parse(in);
  LinearNoiseModel model;
  model.bias = j.at("bias").get<double>();
  model.threshold = j.at("threshold").get<double>();
  for (const auto& [token, weight] : j.at("weights").items()) {
    const double w = weight.get<double>();
    if (!std::isfinite(w)) throw std::runtime_error("noise model: non-finite weight for " + token);
    model.term_weights[token] = w;
  }
  if (!std::isfinite(model.bias) || !std::isfinite(model.threshold))
    throw std::runtime_error("noise model: non-finite bias or threshold");
  return model;
}

bool keep_message(const std::string& text, const LinearNoiseModel* model) {
  if (!model) return true;
  double score = model->bias;
  for (const std::string& token : text::tokenize(text)) {
    auto it = model->term_weights.find(token);
    if (it != model->term_weights.end()) score += it->second;
  }
  return score >= model->threshold;
}

void MessageIndex::add(const Message& m, int region, std::vector<int> groups,
                       const IndexOptions& options) {
  IndexedMessage im;
  im.id = m.id;
  im.user_id = m.user_id;
  if (options.keep_text) im.text = m.text;
  im.date = date_of_instant(m.timestamp);
  im.region = region;
  im.groups = std::move(groups);
  const auto idx = static_cast<std::uint32_t>(messages_.size());
  for (int g : im.groups) {
    by_bucket_[{g, region}].push_back(idx);
    daily_totals_[im.date] += 1.0;
  }
  messages_.push_back(std::move(im));
}

std::vector<const IndexedMessage*> MessageIndex::fetch(int group, int region, Date from,
                                                       Date to) const {
  std::vector<const IndexedMessage*> out;
  auto it = by_bucket_.find({group, region});
  if (it == by_bucket_.end()) return out;
  for (std::uint32_t idx : it->second) {
    const IndexedMessage& m = messages_[idx];
    if (m.date >= from && m.date <= to) out.push_back(&m);
  }
  return out;
}

bool process_message(const Message& m, std::span<const geo::ClusterRegion> regions,
                     std::span<const KeywordGroup> groups, const LinearNoiseModel* model,
                     const IndexOptions& options, MessageIndex& index) {
  if (!keep_message(m.text, model)) return false;
  std::vector<int> matched = match_keywords(m.text, groups);
  if (matched.empty()) return false;
  const int region = geo::assign_region(m.point, regions);
  index.add(m, region, std::move(matched), options);
  return true;
}

CountSeries CountSeriesSet::get(int group, int region) const {
  auto it = series_.find({group, region});
  if (it != series_.end()) return it->second;
  CountSeries zero;
  zero.group = group;
  zero.region = region;
  zero.start = range_.from;
  zero.days.resize(static_cast<std::size_t>(range_.length()));
  return zero;
}

void CountSeriesSet::increment(int group, int region, Date day, const std::string& user_id) {
  if (day < range_.from || day > range_.to) return;
  auto [it, inserted] = series_.try_emplace({group, region});
  if (inserted) {
    it->second.group = group;
    it->second.region = region;
    it->second.start = range_.from;
    it->second.days.resize(static_cast<std::size_t>(range_.length()));
  }
  const int offset = day - range_.from;
  it->second.days[static_cast<std::size_t>(offset)].raw_count += 1;
  users_[{group, region, offset}][user_id] += 1;
}

void CountSeriesSet::finalize() {
  for (const auto& [key, day_users] : users_) {
    const auto& [group, region, offset] = key;
    series_[{group, region}].days[static_cast<std::size_t>(offset)].user_count =
        static_cast<int>(day_users.size());
  }
  users_.clear();
}

CountSeriesSet build_count_series(const MessageIndex& index, DateRange range) {
  if (range.length() < 1) throw std::invalid_argument("build_count_series: empty date range");
  CountSeriesSet set(range);
  for (const IndexedMessage& m : index.messages())
    for (int g : m.groups) set.increment(g, m.region, m.date, m.user_id);
  set.finalize();
  return set;
}

CountSeriesSet build_count_series(std::span<const Message> messages,
                                  std::span<const geo::ClusterRegion> regions,
                                  std::span<const KeywordGroup> groups,
                                  const LinearNoiseModel* model, DateRange range) {
  MessageIndex index;
  IndexOptions options{.keep_text = false};
  for (const Message& m : messages) process_message(m, regions, groups, model, options, index);
  return build_count_series(index, range);
}

}  // namespace eventsum::ingest
