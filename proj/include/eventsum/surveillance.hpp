#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "eventsum/date.hpp"
#include "eventsum/ingest.hpp"

namespace eventsum::surveillance {

struct DetectorConfig {
  int c2_window = 7;      // baseline length in days
  int c2_guard = 0;       // gap between baseline and the evaluated day
  double sigma = 3.0;     // exceedance threshold in baseline standard deviations
  bool c3_includes_current = true;  // C3 counts C2 alarms over {t, t-1, t-2}
  int warmup_days = 28;   // history consumed by weekday normalisation
  double mu_threshold = 4.0;
  double ratio_threshold = 1.5;
  double mad_floor = 1.0;
};

struct WeekdayFactors {
  std::array<double, 7> factor{1, 1, 1, 1, 1, 1, 1};
};

/// factor[d] = (mean daily total) / (mean total on weekday d), both means
/// over totals dated strictly before `before`, clamped to [0.5, 2.0]. A
/// weekday with zero mean gets factor 1. Throws when fewer than 28 days of
/// history are available.
WeekdayFactors weekday_factors(const std::map<Date, double>& daily_totals, Date before);

/// Fills normalized_count = raw_count * factor[weekday of the day].
void normalize_weekday(ingest::CountSeries& series, const WeekdayFactors& factors);

struct C2Result {
  bool alarm = false;
  double statistic = 0;
  bool insufficient = false;
};

/// EARS C2 at day index t of the series, on normalized counts. Baseline is
/// the window of length c2_window ending c2_guard + 1 days before t; alarm
/// when count - mean > sigma * stddev (population). A flat baseline
/// (stddev 0) alarms on any increase >= 1 and reports the raw difference
/// as the statistic.
C2Result ears_c2(const ingest::CountSeries& series, int t, const DetectorConfig& config = {});

struct C3Result {
  bool alarm = false;
  bool insufficient = false;
};

/// True when at least 2 of the 3 most recent days (including t itself when
/// c3_includes_current) raised a C2 alarm.
C3Result ears_c3(const ingest::CountSeries& series, int t, const DetectorConfig& config = {});

struct DayFlag {
  bool c2 = false;
  bool c3 = false;

  bool any() const { return c2 || c3; }
};

struct Alarm {
  int group = -1;
  int region = geo::kNoiseRegion;
  Date start;
  Date end;
  std::vector<int> day_counts;  // raw counts, one per day in [start, end]
  bool from_c2 = false;
  bool from_c3 = false;
  double mu_max = 0;
  double tweet_user_ratio = 0;
};

/// Merges maximal runs of consecutive flagged days into alarms; source is
/// the union of variants that fired on any day of the run. Raw day counts
/// come from `raw`, which must cover [first, first + flags.size()).
std::vector<Alarm> group_alarms(int group, int region, Date first, std::span<const DayFlag> flags,
                                const ingest::CountSeries& raw);

/// Median absolute deviations above the median: (observation - median) /
/// max(MAD, mad_floor), over the raw-count history strictly before the
/// observation. Throws when history has fewer than 7 entries.
double mu(double observation, std::span<const int> history, double mad_floor = 1.0);

/// Maximum mu over the alarm's days; each day's history is the raw series
/// from its start up to the day before.
double mu_max(const Alarm& alarm, const ingest::CountSeries& raw, double mad_floor = 1.0);

/// Messages over distinct authors; 0 for an empty set.
double tweet_user_ratio(std::span<const ingest::IndexedMessage* const> messages);

struct Classification {
  bool is_event = false;
  std::string reason;  // failed filter(s) when rejected
};

/// Event iff mu_max >= mu_threshold and tweet_user_ratio <= ratio_threshold
/// (a ratio of exactly 1.5 is genuine; spam requires strictly greater).
Classification classify_event(const Alarm& alarm, double mu_threshold = 4.0,
                              double ratio_threshold = 1.5);

struct ClassifiedAlarm {
  Alarm alarm;
  Classification classification;
};

/// Full detection pass over every non-noise (group, region) series:
/// weekday normalisation from the warmup window, C2/C3 flags, alarm
/// grouping, mu_max on raw counts, tweet-user ratio from the index.
std::vector<ClassifiedAlarm> detect(const ingest::CountSeriesSet& counts,
                                    const ingest::MessageIndex& index,
                                    const DetectorConfig& config);

}  // namespace eventsum::surveillance
