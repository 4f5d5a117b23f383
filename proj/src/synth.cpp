#include "eventsum/synth.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "eventsum/geo.hpp"
#include "eventsum/rng.hpp"

namespace eventsum::synth {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

class FieldErrors {
 public:
  void add(const std::string& problem) { problems_.push_back(problem); }
  bool empty() const { return problems_.empty(); }
  [[noreturn]] void raise() const {
    std::string msg = "invalid generator config:";
    for (const std::string& p : problems_) msg += "\n  - " + p;
    throw std::runtime_error(msg);
  }

 private:
  std::vector<std::string> problems_;
};

std::optional<Date> date_field(const json& j, const char* field, FieldErrors& errors,
                               const std::string& where) {
  if (!j.contains(field) || !j[field].is_string()) {
    errors.add(where + "." + field + " (date string) missing");
    return std::nullopt;
  }
  auto d = Date::parse(j[field].get<std::string>());
  if (!d) errors.add(where + "." + field + " is not a YYYY-MM-DD date");
  return d;
}

}  // namespace

SynthConfig parse_config(std::istream& in) {
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw std::runtime_error("invalid generator config: not a JSON object");

  FieldErrors errors;
  SynthConfig config;

  if (auto d = date_field(j, "start_date", errors, "config")) config.start = *d;
  if (!j.contains("days") || !j["days"].is_number_integer() || j["days"].get<int>() < 1)
    errors.add("config.days (positive integer) missing");
  else
    config.days = j["days"].get<int>();

  if (!j.contains("regions") || !j["regions"].is_array() || j["regions"].empty()) {
    errors.add("config.regions (non-empty array) missing");
  } else {
    std::size_t i = 0;
    for (const auto& r : j["regions"]) {
      const std::string where = "regions[" + std::to_string(i++) + "]";
      SynthRegion region;
      if (!r.contains("label") || !r["label"].is_string() || r["label"].get<std::string>().empty())
        errors.add(where + ".label missing");
      else
        region.label = r["label"].get<std::string>();
      for (const char* f : {"lat", "lon"}) {
        if (!r.contains(f) || !r[f].is_number()) errors.add(where + "." + f + " missing");
      }
      if (errors.empty()) {
        region.lat = r["lat"].get<double>();
        region.lon = r["lon"].get<double>();
        region.half_size = r.value("half_size", 0.05);
        if (region.half_size <= 0) errors.add(where + ".half_size must be positive");
      }
      config.regions.push_back(std::move(region));
    }
  }

  if (!j.contains("groups") || !j["groups"].is_array() || j["groups"].empty()) {
    errors.add("config.groups (non-empty array) missing");
  } else {
    std::size_t i = 0;
    for (const auto& g : j["groups"]) {
      const std::string where = "groups[" + std::to_string(i++) + "]";
      ingest::KeywordGroup group;
      const std::string cls = g.value("class", "symptom");
      group.cls = cls == "emotion" ? ingest::KeywordGroup::Class::emotion
                                   : ingest::KeywordGroup::Class::symptom;
      if (!g.contains("primary") || !g["primary"].is_string() ||
          g["primary"].get<std::string>().empty())
        errors.add(where + ".primary missing");
      else
        group.primary = g["primary"].get<std::string>();
      for (const auto& a : g.value("aliases", json::array()))
        group.aliases.push_back(a.get<std::string>());
      config.groups.push_back(std::move(group));
    }
  }

  if (!j.contains("baseline_rate") || !j["baseline_rate"].is_number() ||
      j["baseline_rate"].get<double>() <= 0)
    errors.add("config.baseline_rate (positive number) missing");
  else
    config.baseline_rate = j["baseline_rate"].get<double>();

  if (!j.contains("user_pool") || !j["user_pool"].is_number_integer() ||
      j["user_pool"].get<int>() < 1)
    errors.add("config.user_pool (positive integer) missing");
  else
    config.user_pool = j["user_pool"].get<int>();

  config.filler_words = j.value("filler_words", 300);
  if (config.filler_words < 1) errors.add("config.filler_words must be positive");
  config.words_per_message = j.value("words_per_message", 8);
  if (config.words_per_message < 1) errors.add("config.words_per_message must be positive");
  config.noise_rate = j.value("noise_rate", 0.0);
  if (config.noise_rate < 0) errors.add("config.noise_rate must be non-negative");
  config.offtopic_articles = j.value("offtopic_articles", 0);
  if (config.offtopic_articles < 0) errors.add("config.offtopic_articles must be non-negative");

  if (j.contains("events")) {
    if (!j["events"].is_array()) {
      errors.add("config.events must be an array");
    } else {
      std::size_t i = 0;
      for (const auto& e : j["events"]) {
        const std::string where = "events[" + std::to_string(i++) + "]";
        SynthEvent event;
        for (const char* f : {"group", "region", "term"}) {
          if (!e.contains(f) || !e[f].is_string() || e[f].get<std::string>().empty())
            errors.add(where + "." + f + " missing");
        }
        if (auto d = date_field(e, "start", errors, where)) event.start = *d;
        event.days = e.value("days", 1);
        if (event.days < 1) errors.add(where + ".days must be positive");
        event.multiplier = e.value("multiplier", 1.0);
        if (event.multiplier < 1) errors.add(where + ".multiplier must be >= 1");
        event.articles = e.value("articles", 0);
        if (event.articles < 0) errors.add(where + ".articles must be non-negative");
        if (errors.empty()) {
          event.group = e["group"].get<std::string>();
          event.region = e["region"].get<std::string>();
          event.term = e["term"].get<std::string>();
          const bool group_known =
              std::any_of(config.groups.begin(), config.groups.end(),
                          [&](const auto& g) { return g.primary == event.group; });
          if (!group_known) errors.add(where + ".group does not name a configured group");
          const bool region_known =
              std::any_of(config.regions.begin(), config.regions.end(),
                          [&](const auto& r) { return r.label == event.region; });
          if (!region_known) errors.add(where + ".region does not name a configured region");
        }
        config.events.push_back(std::move(event));
      }
    }
  }

  if (!errors.empty()) errors.raise();
  return config;
}

namespace {

// Deterministic pseudo-words: consonant-vowel syllable pairs so tokens look
// word-like and never collide across the two vocabularies (message fillers
// are 3 syllables, news words 4).
std::string make_word(Xoshiro256ss& rng, int syllables) {
  static constexpr char consonants[] = "bcdfghjklmnprstvwz";
  static constexpr char vowels[] = "aeiou";
  std::string word;
  for (int s = 0; s < syllables; ++s) {
    word.push_back(consonants[rng.next_below(sizeof consonants - 1)]);
    word.push_back(vowels[rng.next_below(sizeof vowels - 1)]);
  }
  return word;
}

std::vector<std::string> make_vocabulary(Xoshiro256ss& rng, int count, int syllables) {
  std::vector<std::string> words;
  words.reserve(static_cast<std::size_t>(count));
  std::unordered_set<std::string> seen;
  while (static_cast<int>(words.size()) < count) {
    std::string word = make_word(rng, syllables);
    if (seen.insert(word).second) words.push_back(std::move(word));
  }
  return words;
}

std::string iso_instant(Date day, int seconds) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", day.to_string().c_str(), seconds / 3600,
                (seconds / 60) % 60, seconds % 60);
  return buf;
}

struct Emitter {
  std::ostream& out;
  std::size_t count = 0;

  void message(const std::string& id, const std::string& user, Date day, int seconds, double lat,
               double lon, const std::string& text) {
    ordered j;
    j["id"] = id;
    j["user_id"] = user;
    j["created_at"] = iso_instant(day, seconds);
    j["lat"] = lat;
    j["lon"] = lon;
    j["text"] = text;
    j["retweet"] = false;
    out << j.dump() << '\n';
    ++count;
  }
};

}  // namespace

GeneratedCorpus generate(const SynthConfig& config, std::uint64_t seed, std::ostream& messages,
                         std::ostream& news, std::ostream& regions, std::ostream& truth) {
  Xoshiro256ss rng(seed);
  GeneratedCorpus result;

  const auto fillers = make_vocabulary(rng, config.filler_words, 3);
  const auto news_words = make_vocabulary(rng, 120, 4);

  // regions file: axis-aligned squares, CCW hulls
  {
    std::vector<geo::ClusterRegion> region_rows;
    for (std::size_t i = 0; i < config.regions.size(); ++i) {
      const SynthRegion& r = config.regions[i];
      const double h = r.half_size;
      region_rows.push_back({static_cast<int>(i), r.label,
                             {{r.lat - h, r.lon - h},
                              {r.lat - h, r.lon + h},
                              {r.lat + h, r.lon + h},
                              {r.lat + h, r.lon - h}}});
    }
    geo::write_regions(regions, region_rows);
  }

  auto pick_user = [&] { return "u" + std::to_string(rng.next_below(config.user_pool)); };
  auto filler_text = [&](int words) {
    std::string text;
    for (int w = 0; w < words; ++w) {
      if (!text.empty()) text += ' ';
      text += fillers[rng.next_below(fillers.size())];
    }
    return text;
  };

  Emitter emit{messages};
  std::size_t next_id = 0;
  auto message_id = [&] {
    char buf[16];
    std::snprintf(buf, sizeof buf, "m%08zu", next_id++);
    return std::string(buf);
  };

  for (int day = 0; day < config.days; ++day) {
    const Date date = config.start + day;
    for (std::size_t ri = 0; ri < config.regions.size(); ++ri) {
      const SynthRegion& region = config.regions[ri];
      for (const ingest::KeywordGroup& group : config.groups) {
        auto emit_one = [&](const std::string& planted_term) {
          const double lat = region.lat + (rng.next_double() * 2 - 1) * region.half_size;
          const double lon = region.lon + (rng.next_double() * 2 - 1) * region.half_size;
          const std::string& keyword =
              rng.next_below(group.aliases.size() + 1) == 0 || group.aliases.empty()
                  ? group.primary
                  : group.aliases[rng.next_below(group.aliases.size())];
          std::string text = filler_text(config.words_per_message / 2);
          text += ' ';
          text += keyword;
          if (!planted_term.empty()) {
            text += ' ';
            text += planted_term;
          }
          text += ' ';
          text += filler_text(config.words_per_message - config.words_per_message / 2);
          emit.message(message_id(), pick_user(), date,
                       static_cast<int>(rng.next_below(86400)), lat, lon, text);
        };

        const int baseline = rng.poisson(config.baseline_rate);
        for (int n = 0; n < baseline; ++n) emit_one("");
        for (const SynthEvent& event : config.events) {
          if (event.multiplier <= 1) continue;
          if (event.group != group.primary || event.region != region.label) continue;
          if (date < event.start || date > event.start + (event.days - 1)) continue;
          const int extra = rng.poisson(config.baseline_rate * (event.multiplier - 1));
          for (int n = 0; n < extra; ++n) emit_one(event.term);
        }
      }
    }
    const int noise = config.noise_rate > 0 ? rng.poisson(config.noise_rate) : 0;
    for (int n = 0; n < noise; ++n) {
      const ingest::KeywordGroup& group = config.groups[rng.next_below(config.groups.size())];
      emit.message(message_id(), pick_user(), date, static_cast<int>(rng.next_below(86400)),
                   -89.0 + rng.next_double() * 2, 170.0 + rng.next_double() * 2,
                   filler_text(config.words_per_message) + ' ' + group.primary);
    }
  }
  result.message_count = emit.count;

  // news corpus: on-topic articles share the planted term, the group
  // keyword and a news-word template so their bodies and titles cohere
  std::size_t article_count = 0;
  auto news_sentence = [&](int words) {
    std::string s;
    for (int w = 0; w < words; ++w) {
      if (!s.empty()) s += ' ';
      s += news_words[rng.next_below(news_words.size())];
    }
    return s;
  };
  for (std::size_t ei = 0; ei < config.events.size(); ++ei) {
    const SynthEvent& event = config.events[ei];
    if (event.multiplier <= 1) continue;
    TruthEvent t;
    t.group = event.group;
    t.region = event.region;
    t.start = event.start;
    t.end = event.start + (event.days - 1);
    t.term = event.term;
    const std::string shared = news_sentence(6);
    for (int a = 0; a < event.articles; ++a) {
      ordered j;
      const std::string id = "planted-" + std::to_string(ei) + "-" + std::to_string(a);
      j["id"] = id;
      j["title"] = event.term + " " + event.group + " reports " + shared;
      j["body"] = "officials discuss " + event.term + " " + event.group + " in " + event.region +
                  ". " + shared + ". " + news_sentence(10);
      j["published"] = event.start.to_string();
      j["url"] = "https://news.example/" + id;
      news << j.dump() << '\n';
      t.article_ids.push_back(id);
      ++article_count;
    }
    result.truth.push_back(std::move(t));
  }
  for (int a = 0; a < config.offtopic_articles; ++a) {
    ordered j;
    const std::string id = "offtopic-" + std::to_string(a);
    j["id"] = id;
    j["title"] = news_sentence(7);
    j["body"] = news_sentence(40);
    j["published"] = (config.start + static_cast<int>(rng.next_below(config.days))).to_string();
    j["url"] = "https://news.example/" + id;
    news << j.dump() << '\n';
    ++article_count;
  }
  result.article_count = article_count;

  ordered t;
  t["seed"] = seed;
  t["events"] = ordered::array();
  for (const TruthEvent& e : result.truth) {
    ordered row;
    row["group"] = e.group;
    row["region"] = e.region;
    row["start"] = e.start.to_string();
    row["end"] = e.end.to_string();
    row["term"] = e.term;
    row["article_ids"] = e.article_ids;
    t["events"].push_back(std::move(row));
  }
  truth << t.dump(2) << '\n';
  return result;
}

}  // namespace eventsum::synth
