#include "eventsum/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace eventsum::pipeline {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

void check_keys(const json& j, const char* where, std::initializer_list<const char*> known) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(known.begin(), known.end(),
                     [&](const char* k) { return key == k; }) == known.end())
      throw std::runtime_error(std::string("config: unknown key '") + key + "' in " + where);
  }
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

}  // namespace

Config load_config(std::istream& in) {
  json j = json::parse(in);
  check_keys(j, "config",
             {"version", "paths", "detector", "summary", "corpus_stopword_top", "seed", "threads"});
  if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != 1)
    throw std::runtime_error("config: missing or unsupported version (expected 1)");

  Config config;
  if (j.contains("paths")) {
    const json& p = j["paths"];
    check_keys(p, "paths",
               {"messages", "regions", "groups", "news", "noise_model", "stopwords",
                "stemmer_rules"});
    config.paths.messages = p.value("messages", "");
    config.paths.regions = p.value("regions", "");
    config.paths.groups = p.value("groups", "");
    config.paths.news = p.value("news", "");
    config.paths.noise_model = p.value("noise_model", "");
    config.paths.stopwords = p.value("stopwords", config.paths.stopwords);
    config.paths.stemmer_rules = p.value("stemmer_rules", config.paths.stemmer_rules);
  }
  if (j.contains("detector")) {
    const json& d = j["detector"];
    check_keys(d, "detector",
               {"mu_threshold", "ratio_threshold", "c2_window", "c2_guard", "sigma",
                "warmup_days", "c3_includes_current", "mad_floor"});
    auto& det = config.detector;
    det.mu_threshold = d.value("mu_threshold", det.mu_threshold);
    det.ratio_threshold = d.value("ratio_threshold", det.ratio_threshold);
    det.c2_window = d.value("c2_window", det.c2_window);
    det.c2_guard = d.value("c2_guard", det.c2_guard);
    det.sigma = d.value("sigma", det.sigma);
    det.warmup_days = d.value("warmup_days", det.warmup_days);
    det.c3_includes_current = d.value("c3_includes_current", det.c3_includes_current);
    det.mad_floor = d.value("mad_floor", det.mad_floor);
    if (det.c2_window < 2) throw std::runtime_error("config: c2_window must be at least 2");
    if (det.c2_guard < 0) throw std::runtime_error("config: c2_guard must be non-negative");
    if (det.warmup_days < 28) throw std::runtime_error("config: warmup_days must be at least 28");
    if (det.sigma <= 0) throw std::runtime_error("config: sigma must be positive");
  }
  if (j.contains("summary")) {
    const json& s = j["summary"];
    check_keys(s, "summary",
               {"pcss_threshold", "alpha", "df_gate", "min_gist", "baseline_days",
                "articles_per_term", "top_k"});
    auto& sum = config.summary;
    sum.pcss_threshold = s.value("pcss_threshold", sum.pcss_threshold);
    sum.alpha = s.value("alpha", sum.alpha);
    sum.df_gate = s.value("df_gate", sum.df_gate);
    sum.min_gist = s.value("min_gist", sum.min_gist);
    sum.baseline_days = s.value("baseline_days", sum.baseline_days);
    sum.articles_per_term = s.value("articles_per_term", sum.articles_per_term);
    sum.top_k = s.value("top_k", sum.top_k);
    if (sum.alpha <= 0 || sum.alpha > 1) throw std::runtime_error("config: alpha must be in (0, 1]");
    if (sum.df_gate < 0 || sum.df_gate > 1)
      throw std::runtime_error("config: df_gate must be in [0, 1]");
    if (sum.min_gist < 1) throw std::runtime_error("config: min_gist must be positive");
    if (sum.baseline_days < 1) throw std::runtime_error("config: baseline_days must be positive");
  }
  config.corpus_stopword_top = j.value("corpus_stopword_top", config.corpus_stopword_top);
  config.seed = j.value("seed", config.seed);
  config.threads = j.value("threads", config.threads);
  if (config.threads < 1) throw std::runtime_error("config: threads must be positive");
  return config;
}

std::string keyword_code(const std::string& keyword) {
  // word initials for multi-word or camel-case keywords, otherwise the
  // first two letters; always uppercased
  std::vector<std::string> words;
  std::string current;
  for (std::size_t i = 0; i < keyword.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(keyword[i]);
    if (std::isspace(c) || c == '-' || c == '_') {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else if (std::isupper(c) && i > 0 && !current.empty() &&
               std::islower(static_cast<unsigned char>(keyword[i - 1]))) {
      words.push_back(std::move(current));
      current.clear();
      current.push_back(static_cast<char>(c));
    } else {
      current.push_back(static_cast<char>(c));
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  std::string code;
  if (words.size() >= 2) {
    code.push_back(words[0][0]);
    code.push_back(words[1][0]);
  } else if (!words.empty()) {
    code = words[0].substr(0, 2);
  }
  std::transform(code.begin(), code.end(), code.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return code;
}

std::vector<std::string> region_codes(std::span<const geo::ClusterRegion> regions) {
  std::vector<std::string> codes;
  std::set<std::string> taken;
  for (const geo::ClusterRegion& r : regions) {
    std::string label;
    for (unsigned char c : r.label)
      if (std::isalnum(c)) label.push_back(static_cast<char>(std::toupper(c)));
    if (label.empty()) label = "R" + std::to_string(r.id);
    std::string code;
    for (std::size_t len = 1; len <= label.size(); ++len) {
      code = label.substr(0, len);
      if (!taken.count(code)) break;
    }
    while (taken.count(code)) code += std::to_string(r.id);
    taken.insert(code);
    codes.push_back(std::move(code));
  }
  return codes;
}

std::string event_id(const std::string& keyword, const std::string& region_code, Date start) {
  char suffix[16];
  std::snprintf(suffix, sizeof suffix, "-%02d-%02d", start.day(), start.month());
  return keyword_code(keyword) + region_code + suffix;
}

const geo::ClusterRegion* LoadedInputs::region_by_id(int id) const {
  for (const geo::ClusterRegion& r : regions)
    if (r.id == id) return &r;
  return nullptr;
}

LoadedInputs load_inputs(const Config& config, bool need_text_resources) {
  LoadedInputs inputs;
  {
    auto in = open_or_throw(config.paths.regions);
    inputs.regions = geo::read_regions(in);
  }
  inputs.region_code_by_index = region_codes(inputs.regions);
  {
    auto in = open_or_throw(config.paths.groups);
    inputs.groups = ingest::read_keyword_groups(in);
  }
  if (!config.paths.noise_model.empty()) {
    auto in = open_or_throw(config.paths.noise_model);
    inputs.noise_model = ingest::read_noise_model(in);
  }
  if (need_text_resources) {
    inputs.standard_stopwords = text::load_word_list(config.paths.stopwords);
    inputs.stemmer = text::LancasterStemmer::from_file(config.paths.stemmer_rules);
  }
  return inputs;
}

DetectResult run_detect(const Config& config, const LoadedInputs& inputs, bool keep_text) {
  DetectResult result;
  auto in = open_or_throw(config.paths.messages);

  const ingest::LinearNoiseModel* model =
      inputs.noise_model ? &*inputs.noise_model : nullptr;
  const ingest::IndexOptions options{.keep_text = keep_text};

  std::optional<Date> min_date, max_date;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ingest::Message m;
    if (ingest::parse_message_line(line, m)) {
      ++result.rejected;
      continue;
    }
    ++result.parsed;
    const Date date = date_of_instant(m.timestamp);
    if (!min_date || date < *min_date) min_date = date;
    if (!max_date || date > *max_date) max_date = date;
    ingest::process_message(m, inputs.regions, inputs.groups, model, options, result.index);
  }
  if (!min_date) return result;  // nothing parseable, no alarms

  result.range = {*min_date, *max_date};
  const auto counts = ingest::build_count_series(result.index, result.range);
  result.alarms = surveillance::detect(counts, result.index, config.detector);
  return result;
}

namespace {

ordered alarm_to_json(const AlarmRecord& record) {
  ordered j;
  j["id"] = record.id;
  j["group"] = record.keyword;
  j["region"] = record.alarm.region;
  j["region_label"] = record.region_label;
  j["start"] = record.alarm.start.to_string();
  j["end"] = record.alarm.end.to_string();
  j["day_counts"] = record.alarm.day_counts;
  ordered source = ordered::array();
  if (record.alarm.from_c2) source.push_back("C2");
  if (record.alarm.from_c3) source.push_back("C3");
  j["source"] = std::move(source);
  j["mu_max"] = record.alarm.mu_max;
  j["tweet_user_ratio"] = record.alarm.tweet_user_ratio;
  j["outcome"] = record.is_event ? "event" : "rejected";
  j["reason"] = record.reason;
  return j;
}

}  // namespace

void write_alarms(std::ostream& out, const DetectResult& result, const LoadedInputs& inputs) {
  for (const surveillance::ClassifiedAlarm& ca : result.alarms) {
    AlarmRecord record;
    record.alarm = ca.alarm;
    record.keyword = inputs.groups[static_cast<std::size_t>(ca.alarm.group)].primary;
    const geo::ClusterRegion* region = inputs.region_by_id(ca.alarm.region);
    record.region_label = region ? region->label : "noise";
    const std::string code =
        region ? inputs.region_code_by_index[static_cast<std::size_t>(region - inputs.regions.data())]
               : "X";
    record.id = event_id(record.keyword, code, ca.alarm.start);
    record.is_event = ca.classification.is_event;
    record.reason = ca.classification.reason;
    out << alarm_to_json(record).dump() << '\n';
  }
}

std::vector<AlarmRecord> read_alarms(std::istream& in,
                                     std::span<const ingest::KeywordGroup> groups) {
  std::vector<AlarmRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      AlarmRecord r;
      r.id = j.at("id").get<std::string>();
      r.keyword = j.at("group").get<std::string>();
      r.alarm.region = j.at("region").get<int>();
      r.region_label = j.at("region_label").get<std::string>();
      r.alarm.start = *Date::parse(j.at("start").get<std::string>());
      r.alarm.end = *Date::parse(j.at("end").get<std::string>());
      r.alarm.day_counts = j.at("day_counts").get<std::vector<int>>();
      for (const auto& s : j.at("source")) {
        if (s == "C2") r.alarm.from_c2 = true;
        if (s == "C3") r.alarm.from_c3 = true;
      }
      r.alarm.mu_max = j.at("mu_max").get<double>();
      r.alarm.tweet_user_ratio = j.at("tweet_user_ratio").get<double>();
      r.is_event = j.at("outcome").get<std::string>() == "event";
      r.reason = j.value("reason", "");
      const auto group_it =
          std::find_if(groups.begin(), groups.end(),
                       [&](const ingest::KeywordGroup& g) { return g.primary == r.keyword; });
      if (group_it == groups.end())
        throw std::runtime_error("unknown keyword group " + r.keyword);
      r.alarm.group = static_cast<int>(group_it - groups.begin());
      records.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error("alarms file line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::vector<SummaryRecord> run_summarise(const Config& config, const LoadedInputs& inputs,
                                         const DetectResult& detect,
                                         const news::NewsStore& store) {
  std::vector<SummaryRecord> out;

  // Token counts bucketed by date; each event sums the buckets before its
  // start instead of rescanning message text.
  std::map<Date, std::unordered_map<std::string, std::size_t>> counts_by_date;
  for (const ingest::IndexedMessage& m : detect.index.messages())
    for (const std::string& tok : text::tokenize(m.text)) ++counts_by_date[m.date][tok];

  std::vector<AlarmRecord> events;
  for (const surveillance::ClassifiedAlarm& ca : detect.alarms) {
    if (!ca.classification.is_event) continue;
    AlarmRecord record;
    record.alarm = ca.alarm;
    record.keyword = inputs.groups[static_cast<std::size_t>(ca.alarm.group)].primary;
    const geo::ClusterRegion* region = inputs.region_by_id(ca.alarm.region);
    record.region_label = region ? region->label : "noise";
    const std::string code =
        region ? inputs.region_code_by_index[static_cast<std::size_t>(region - inputs.regions.data())]
               : "X";
    record.id = event_id(record.keyword, code, ca.alarm.start);
    record.is_event = true;
    events.push_back(std::move(record));
  }

  for (AlarmRecord& record : events) {
    // stopwords reflect the corpus as collected before the event began
    std::unordered_map<std::string, std::size_t> corpus_counts;
    for (const auto& [date, counts] : counts_by_date) {
      if (date >= record.alarm.start) break;
      for (const auto& [tok, n] : counts) corpus_counts[tok] += n;
    }
    const text::StopwordSet stopwords = text::build_stopwords(
        inputs.standard_stopwords, corpus_counts, config.corpus_stopword_top);
    tnt::EventSummary summary =
        tnt::summarise(record.alarm, record.keyword, detect.index, store, stopwords,
                       *inputs.stemmer, config.summary);
    out.push_back({std::move(record), std::move(summary)});
  }
  return out;
}

void write_summaries(std::ostream& out, std::span<const SummaryRecord> records) {
  for (const SummaryRecord& r : records) {
    ordered j;
    j["event_id"] = r.event.id;
    j["group"] = r.event.keyword;
    j["region"] = r.event.alarm.region;
    j["region_label"] = r.event.region_label;
    j["start"] = r.event.alarm.start.to_string();
    j["end"] = r.event.alarm.end.to_string();
    j["mu_max"] = r.event.alarm.mu_max;
    j["tweet_user_ratio"] = r.event.alarm.tweet_user_ratio;
    j["status"] = tnt::to_string(r.summary.status);
    ordered terms = ordered::array();
    for (const tnt::TermCandidate& c : r.summary.candidates) {
      ordered t;
      t["ngram"] = c.ngram;
      t["gist_df"] = c.gist_df;
      t["baseline_df"] = c.baseline_df;
      t["p_value"] = c.p_value;
      terms.push_back(std::move(t));
    }
    j["terms"] = std::move(terms);
    j["good_terms"] = r.summary.good_terms;
    ordered articles = ordered::array();
    for (const tnt::RankedArticle& a : r.summary.articles) {
      ordered row;
      row["id"] = a.id;
      row["title"] = a.title;
      row["url"] = a.url;
      row["score"] = a.score;
      articles.push_back(std::move(row));
    }
    j["articles"] = std::move(articles);
    auto ranked = [](std::span<const tnt::RankedMessage> messages) {
      ordered arr = ordered::array();
      for (const tnt::RankedMessage& m : messages) {
        ordered row;
        row["id"] = m.id;
        row["score"] = m.score;
        arr.push_back(std::move(row));
      }
      return arr;
    };
    j["stt"] = ranked(r.summary.stt);
    j["gtt"] = ranked(r.summary.gtt);
    out << j.dump() << '\n';
  }
}

}  // namespace eventsum::pipeline
