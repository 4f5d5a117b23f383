#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace eventsum::eval {

struct LabeledAlarm {
  std::string id;
  std::string keyword;
  std::string region;
  double mu_max = 0;
  bool verified = false;
  std::string note;  // annotation for labels like the unconfirmed "NO*"
};

/// CSV with header id,keyword,region,mu_max,verified,note.
std::vector<LabeledAlarm> read_alarm_fixture(std::istream& in);

struct SweepResult {
  double threshold = 0;
  long tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0, recall = 0, f_beta = 0;
};

/// (1 + b^2) P R / (b^2 P + R) with P = tp/(tp+fp), R = tp/(tp+fn);
/// 0 whenever a denominator vanishes.
double f_beta(long tp, long fp, long fn, double beta);

/// Per threshold: tp = verified alarms at or above it, fp = unverified at
/// or above, fn/tn below. Reports precision, recall and F1.
std::vector<SweepResult> sweep_mu_threshold(std::span<const LabeledAlarm> alarms,
                                            std::span<const double> thresholds);

struct PcssLabeledEvent {
  std::string id;
  bool newsworthy = false;
  double pcss = 0;     // the article coherence score the threshold gates on
  bool relevant = false;  // whether returned news would be relevant
};

/// News is returned when pcss > threshold. Outcomes: relevant news for a
/// newsworthy event is tp, any other return is fp, no news for a
/// non-newsworthy event is tn, a missed newsworthy event is fn. Scored
/// with F0.5 (precision weighted over recall).
std::vector<SweepResult> sweep_pcss_threshold(std::span<const PcssLabeledEvent> events,
                                              std::span<const double> thresholds);

/// One JSON object per line: {"id", "newsworthy", "pcss", "relevant"}.
std::vector<PcssLabeledEvent> read_pcss_labels(std::istream& in);

/// CSV columns threshold,tp,fp,tn,fn,precision,recall,f_beta.
void write_sweep_csv(std::ostream& out, std::span<const SweepResult> results);

}  // namespace eventsum::eval
