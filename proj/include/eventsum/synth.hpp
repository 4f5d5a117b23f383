#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "eventsum/date.hpp"
#include "eventsum/ingest.hpp"

namespace eventsum::synth {

struct SynthRegion {
  std::string label;
  double lat = 0;
  double lon = 0;
  double half_size = 0.05;  // degrees; messages fall in the square around (lat, lon)
};

struct SynthEvent {
  std::string group;   // primary keyword of an existing group
  std::string region;  // label of an existing region
  Date start;
  int days = 1;
  double multiplier = 1.0;  // daily volume relative to baseline; 1 plants nothing
  std::string term;         // token injected into every planted message
  int articles = 0;         // on-topic articles published on the start date
};

struct SynthConfig {
  Date start;
  int days = 0;
  std::vector<SynthRegion> regions;
  std::vector<ingest::KeywordGroup> groups;
  double baseline_rate = 0;  // mean messages per (group, region) per day
  int user_pool = 0;
  int filler_words = 300;       // message vocabulary size
  int words_per_message = 8;
  double noise_rate = 0;        // daily messages placed outside every region
  std::vector<SynthEvent> events;
  int offtopic_articles = 0;
};

/// Parses and validates the generator config; throws std::runtime_error
/// listing every missing or invalid field.
SynthConfig parse_config(std::istream& in);

struct TruthEvent {
  std::string group;
  std::string region;
  Date start;
  Date end;
  std::string term;
  std::vector<std::string> article_ids;
};

struct GeneratedCorpus {
  std::size_t message_count = 0;
  std::size_t article_count = 0;
  std::vector<TruthEvent> truth;
};

/// Writes a messages file, news file, regions file and ground-truth file.
/// Baseline counts are Poisson per (group, region, day); events with
/// multiplier > 1 inject Poisson(rate * (multiplier - 1)) extra messages
/// per day, each containing the planted term. Identical seed and config
/// give byte-identical output.
GeneratedCorpus generate(const SynthConfig& config, std::uint64_t seed, std::ostream& messages,
                         std::ostream& news, std::ostream& regions, std::ostream& truth);

}  // namespace eventsum::synth
