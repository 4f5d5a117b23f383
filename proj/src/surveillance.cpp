#include "eventsum/surveillance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string_view>

namespace eventsum::surveillance {

WeekdayFactors weekday_factors(const std::map<Date, double>& daily_totals, Date before) {
  std::array<double, 7> sum{};
  std::array<int, 7> count{};
  int days = 0;
  for (const auto& [day, total] : daily_totals) {
    if (day >= before) break;
    sum[static_cast<std::size_t>(day.weekday())] += total;
    count[static_cast<std::size_t>(day.weekday())] += 1;
    ++days;
  }
  if (days < 28) throw std::invalid_argument("weekday_factors: need at least 28 days of history");
  double overall = 0;
  for (double s : sum) overall += s;
  overall /= days;
  WeekdayFactors factors;
  for (std::size_t d = 0; d < 7; ++d) {
    const double weekday_mean = count[d] > 0 ? sum[d] / count[d] : 0.0;
    if (weekday_mean <= 0) {
      factors.factor[d] = 1.0;
    } else {
      factors.factor[d] = std::clamp(overall / weekday_mean, 0.5, 2.0);
    }
  }
  return factors;
}

void normalize_weekday(ingest::CountSeries& series, const WeekdayFactors& factors) {
  for (std::size_t i = 0; i < series.days.size(); ++i) {
    const Date day = series.start + static_cast<int>(i);
    series.days[i].normalized_count =
        series.days[i].raw_count * factors.factor[static_cast<std::size_t>(day.weekday())];
  }
}

C2Result ears_c2(const ingest::CountSeries& series, int t, const DetectorConfig& config) {
  C2Result result;
  const int first = t - config.c2_guard - config.c2_window;
  if (first < 0 || t >= static_cast<int>(series.days.size())) {
    result.insufficient = true;
    return result;
  }
  double mean = 0;
  for (int i = first; i < first + config.c2_window; ++i)
    mean += series.days[static_cast<std::size_t>(i)].normalized_count;
  mean /= config.c2_window;
  double var = 0;
  for (int i = first; i < first + config.c2_window; ++i) {
    const double d = series.days[static_cast<std::size_t>(i)].normalized_count - mean;
    var += d * d;
  }
  var /= config.c2_window;
  const double stddev = std::sqrt(var);
  const double count = series.days[static_cast<std::size_t>(t)].normalized_count;
  if (stddev > 0) {
    result.statistic = (count - mean) / stddev;
    result.alarm = count - mean > config.sigma * stddev;
  } else {
    // flat baseline: any integer increase is an aberration
    result.statistic = count - mean;
    result.alarm = count - mean >= 1.0;
  }
  return result;
}

C3Result ears_c3(const ingest::CountSeries& series, int t, const DetectorConfig& config) {
  C3Result result;
  const int newest = config.c3_includes_current ? t : t - 1;
  int alarms = 0;
  for (int d = newest; d > newest - 3; --d) {
    const C2Result c2 = ears_c2(series, d, config);
    if (c2.insufficient) {
      result.insufficient = true;
      return result;
    }
    if (c2.alarm) ++alarms;
  }
  result.alarm = alarms >= 2;
  return result;
}

std::vector<Alarm> group_alarms(int group, int region, Date first, std::span<const DayFlag> flags,
                                const ingest::CountSeries& raw) {
  std::vector<Alarm> alarms;
  std::size_t i = 0;
  while (i < flags.size()) {
    if (!flags[i].any()) {
      ++i;
      continue;
    }
    Alarm alarm;
    alarm.group = group;
    alarm.region = region;
    alarm.start = first + static_cast<int>(i);
    while (i < flags.size() && flags[i].any()) {
      alarm.from_c2 = alarm.from_c2 || flags[i].c2;
      alarm.from_c3 = alarm.from_c3 || flags[i].c3;
      const Date day = first + static_cast<int>(i);
      const int offset = day - raw.start;
      if (offset < 0 || offset >= static_cast<int>(raw.days.size()))
        throw std::out_of_range("group_alarms: flag outside the raw series");
      alarm.day_counts.push_back(raw.days[static_cast<std::size_t>(offset)].raw_count);
      alarm.end = day;
      ++i;
    }
    alarms.push_back(std::move(alarm));
  }
  return alarms;
}

namespace {

double median_of(std::vector<double>& values) {
  const std::size_t n = values.size();
  auto mid = values.begin() + static_cast<long>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return (lower + upper) / 2;
}

}  // namespace

double mu(double observation, std::span<const int> history, double mad_floor) {
  if (history.size() < 7) throw std::invalid_argument("mu: history shorter than 7 days");
  std::vector<double> values(history.begin(), history.end());
  const double med = median_of(values);
  for (double& v : values) v = std::abs(v - med);
  const double mad = median_of(values);
  return (observation - med) / std::max(mad, mad_floor);
}

double mu_max(const Alarm& alarm, const ingest::CountSeries& raw, double mad_floor) {
  if (alarm.day_counts.empty()) throw std::invalid_argument("mu_max: empty alarm");
  std::vector<int> history;
  history.reserve(raw.days.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < alarm.day_counts.size(); ++d) {
    const Date day = alarm.start + static_cast<int>(d);
    const int end = day - raw.start;  // history is [raw.start, day)
    history.clear();
    for (int i = 0; i < end; ++i)
      history.push_back(raw.days[static_cast<std::size_t>(i)].raw_count);
    best = std::max(best, mu(alarm.day_counts[d], history, mad_floor));
  }
  return best;
}

double tweet_user_ratio(std::span<const ingest::IndexedMessage* const> messages) {
  if (messages.empty()) return 0;
  std::set<std::string_view> users;
  for (const ingest::IndexedMessage* m : messages) users.insert(m->user_id);
  return static_cast<double>(messages.size()) / static_cast<double>(users.size());
}

Classification classify_event(const Alarm& alarm, double mu_threshold, double ratio_threshold) {
  Classification result;
  std::string reason;
  if (!(alarm.mu_max >= mu_threshold)) reason = "mu_max below threshold";
  if (alarm.tweet_user_ratio > ratio_threshold) {
    if (!reason.empty()) reason += "; ";
    reason += "tweet_user_ratio above threshold";
  }
  result.is_event = reason.empty();
  result.reason = std::move(reason);
  return result;
}

std::vector<ClassifiedAlarm> detect(const ingest::CountSeriesSet& counts,
                                    const ingest::MessageIndex& index,
                                    const DetectorConfig& config) {
  std::vector<ClassifiedAlarm> out;
  const ingest::DateRange range = counts.range();
  const Date detect_start = range.from + config.warmup_days;
  if (detect_start + config.c2_window + config.c2_guard > range.to) return out;

  const WeekdayFactors factors = weekday_factors(
      [&] {
        // restrict totals to the warmup window so the factor contract
        // ("history strictly before the series start") holds exactly
        std::map<Date, double> totals;
        for (Date d = range.from; d < detect_start; d = d + 1) totals[d] = 0;
        for (const auto& [day, total] : index.daily_totals())
          if (day >= range.from && day < detect_start) totals[day] = total;
        return totals;
      }(),
      detect_start);

  for (const auto& [key, raw] : counts.nonzero()) {
    const auto& [group, region] = key;
    if (region == geo::kNoiseRegion) continue;

    ingest::CountSeries detection;
    detection.group = group;
    detection.region = region;
    detection.start = detect_start;
    detection.days.assign(raw.days.begin() + (detect_start - range.from), raw.days.end());
    normalize_weekday(detection, factors);

    const int offset = config.c2_window + config.c2_guard;
    std::vector<DayFlag> flags;
    const Date flags_first = detection.start + offset;
    for (int t = offset; t < static_cast<int>(detection.days.size()); ++t) {
      DayFlag flag;
      flag.c2 = ears_c2(detection, t, config).alarm;
      const C3Result c3 = ears_c3(detection, t, config);
      flag.c3 = !c3.insufficient && c3.alarm;
      flags.push_back(flag);
    }

    for (Alarm& alarm : group_alarms(group, region, flags_first, flags, raw)) {
      alarm.mu_max = mu_max(alarm, raw, config.mad_floor);
      const auto gist = index.fetch(group, region, alarm.start, alarm.end);
      alarm.tweet_user_ratio = tweet_user_ratio(gist);
      Classification cls = classify_event(alarm, config.mu_threshold, config.ratio_threshold);
      out.push_back({std::move(alarm), std::move(cls)});
    }
  }
  return out;
}

}  // namespace eventsum::surveillance
