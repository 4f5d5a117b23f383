#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "eventsum/date.hpp"
#include "eventsum/geo.hpp"

namespace eventsum::ingest {

struct Message {
  std::string id;
  std::string user_id;
  std::int64_t timestamp = 0;  // epoch seconds, UTC
  geo::GeoPoint point;
  std::string text;
};

struct RejectedLine {
  std::size_t line_no = 0;
  std::string reason;
};

struct ParseResult {
  std::vector<Message> messages;
  std::vector<RejectedLine> rejects;
};

/// One JSON object per line: {"id", "user_id", "created_at", "lat", "lon",
/// "text", "retweet"}. Retweets and invariant-violating records become
/// rejects with a reason; only an unreadable stream is fatal.
ParseResult parse_messages(std::istream& in);

/// Parses a single record line; returns the reject reason on failure.
std::optional<std::string> parse_message_line(const std::string& line, Message& out);

struct KeywordGroup {
  enum class Class { symptom, emotion };
  Class cls = Class::symptom;
  std::string primary;
  std::vector<std::string> aliases;
};

/// JSON array of {"class": "symptom"|"emotion", "primary", "aliases"}.
/// Throws on invariant violations (empty primary, duplicate aliases, an
/// alias equal to the primary after case folding).
std::vector<KeywordGroup> read_keyword_groups(std::istream& in);

/// Group indices whose primary keyword or any alias occurs in the text as
/// a whole-token sequence (token boundaries are non-alphanumeric runs).
/// Case-insensitive; sorted ascending.
std::vector<int> match_keywords(const std::string& text, std::span<const KeywordGroup> groups);

struct LinearNoiseModel {
  std::unordered_map<std::string, double> term_weights;
  double bias = 0;
  double threshold = 0;
};

/// JSON {"bias": num, "threshold": num, "weights": {token: num}}.
LinearNoiseModel read_noise_model(std::istream& in);

/// keep when no model is supplied; otherwise keep iff
/// bias + sum of weights over the tokenized text >= threshold.
bool keep_message(const std::string& text, const LinearNoiseModel* model);

struct DayEntry {
  int raw_count = 0;
  int user_count = 0;
  double normalized_count = 0;
};

struct CountSeries {
  int group = -1;
  int region = geo::kNoiseRegion;
  Date start;
  std::vector<DayEntry> days;

  Date end() const { return start + static_cast<int>(days.size()) - 1; }
};

/// Message accepted into the index: kept by the noise filter and matched
/// to at least one keyword group. Region may be kNoiseRegion.
struct IndexedMessage {
  std::string id;
  std::string user_id;
  std::string text;  // empty when the index was built without text
  Date date;
  int region = geo::kNoiseRegion;
  std::vector<int> groups;  // sorted group indices
};

struct IndexOptions {
  bool keep_text = true;
};

/// Compact store of processed messages with (group, region, date) lookup.
class MessageIndex {
 public:
  void add(const Message& m, int region, std::vector<int> groups, const IndexOptions& options);

  std::size_t size() const { return messages_.size(); }
  const std::vector<IndexedMessage>& messages() const { return messages_; }

  /// Messages for one group and region with date in [from, to], in
  /// insertion order.
  std::vector<const IndexedMessage*> fetch(int group, int region, Date from, Date to) const;

  /// Sum of raw daily totals across every (group, region) bucket; one
  /// entry per message per matched group.
  const std::map<Date, double>& daily_totals() const { return daily_totals_; }

 private:
  std::vector<IndexedMessage> messages_;
  std::map<std::pair<int, int>, std::vector<std::uint32_t>> by_bucket_;
  std::map<Date, double> daily_totals_;
};

/// Applies the noise filter, keyword matching and region assignment to one
/// parsed message and adds it to the index when it matches any group.
/// Returns true when the message was indexed.
bool process_message(const Message& m, std::span<const geo::ClusterRegion> regions,
                     std::span<const KeywordGroup> groups, const LinearNoiseModel* model,
                     const IndexOptions& options, MessageIndex& index);

struct DateRange {
  Date from;
  Date to;  // inclusive

  int length() const { return to - from + 1; }
};

/// Per-(group, region) daily series over a contiguous date range.
class CountSeriesSet {
 public:
  CountSeriesSet(DateRange range) : range_(range) {}

  DateRange range() const { return range_; }

  /// Series for a (group, region) pair; zero-filled when the pair never
  /// produced a count.
  CountSeries get(int group, int region) const;

  /// Pairs with at least one nonzero day, ordered by (group, region).
  const std::map<std::pair<int, int>, CountSeries>& nonzero() const { return series_; }

  void increment(int group, int region, Date day, const std::string& user_id);
  void finalize();  // resolves per-day distinct user counts

 private:
  DateRange range_;
  std::map<std::pair<int, int>, CountSeries> series_;
  std::map<std::tuple<int, int, int>, std::unordered_map<std::string, int>> users_;
};

/// Daily raw and distinct-user counts per (group, region) over the range;
/// messages outside the range are ignored. Noise-region messages count
/// under region kNoiseRegion so totals are conserved.
CountSeriesSet build_count_series(const MessageIndex& index, DateRange range);

/// Convenience composition over already-parsed messages.
CountSeriesSet build_count_series(std::span<const Message> messages,
                                  std::span<const geo::ClusterRegion> regions,
                                  std::span<const KeywordGroup> groups,
                                  const LinearNoiseModel* model, DateRange range);

}  // namespace eventsum::ingest
