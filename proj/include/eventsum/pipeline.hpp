#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eventsum/ingest.hpp"
#include "eventsum/newsstore.hpp"
#include "eventsum/stemmer.hpp"
#include "eventsum/surveillance.hpp"
#include "eventsum/textvec.hpp"
#include "eventsum/tnt.hpp"

namespace eventsum::pipeline {

struct Paths {
  std::string messages;
  std::string regions;
  std::string groups;
  std::string news;
  std::string noise_model;  // optional
  std::string stopwords = "data/stopwords_en.txt";
  std::string stemmer_rules = "data/lancaster_rules.txt";
};

struct Config {
  Paths paths;
  surveillance::DetectorConfig detector;
  tnt::SummaryConfig summary;
  std::size_t corpus_stopword_top = 200;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Versioned JSON config ({"version": 1, "paths": {...}, ...}); unknown
/// keys and type mismatches are errors.
Config load_config(std::istream& in);

/// Short uppercase event ids in the style "<keyword code><region code>-DD-MM":
/// two letters of the keyword (word initials when multi-word or camel-case)
/// plus the shortest unique prefix of the region label.
std::string keyword_code(const std::string& keyword);
std::vector<std::string> region_codes(std::span<const geo::ClusterRegion> regions);
std::string event_id(const std::string& keyword, const std::string& region_code, Date start);

struct LoadedInputs {
  std::vector<geo::ClusterRegion> regions;
  std::vector<std::string> region_code_by_index;  // aligned with regions
  std::vector<ingest::KeywordGroup> groups;
  std::optional<ingest::LinearNoiseModel> noise_model;
  std::vector<std::string> standard_stopwords;    // loaded only for summarise
  std::optional<text::LancasterStemmer> stemmer;  // loaded only for summarise

  const geo::ClusterRegion* region_by_id(int id) const;
};

LoadedInputs load_inputs(const Config& config, bool need_text_resources);

struct DetectResult {
  ingest::MessageIndex index;
  ingest::DateRange range{Date(0), Date(0)};
  std::vector<surveillance::ClassifiedAlarm> alarms;
  std::size_t parsed = 0;
  std::size_t rejected = 0;
};

/// Streams the messages file through parsing, filtering, matching and
/// region assignment, then runs detection over the derived count series.
DetectResult run_detect(const Config& config, const LoadedInputs& inputs, bool keep_text);

/// One JSON object per line with the alarm fields, derived id and
/// classification.
void write_alarms(std::ostream& out, const DetectResult& result, const LoadedInputs& inputs);
struct AlarmRecord {
  surveillance::Alarm alarm;
  std::string id;
  std::string keyword;
  std::string region_label;
  bool is_event = false;
  std::string reason;
};
std::vector<AlarmRecord> read_alarms(std::istream& in,
                                     std::span<const ingest::KeywordGroup> groups);

struct SummaryRecord {
  AlarmRecord event;
  tnt::EventSummary summary;
};

/// Summarises every record classified as an event. Stopwords for each
/// event are the standard list plus the 200 most frequent tokens of the
/// corpus dated strictly before the event start.
std::vector<SummaryRecord> run_summarise(const Config& config, const LoadedInputs& inputs,
                                         const DetectResult& detect,
                                         const news::NewsStore& store);

void write_summaries(std::ostream& out, std::span<const SummaryRecord> records);

}  // namespace eventsum::pipeline
