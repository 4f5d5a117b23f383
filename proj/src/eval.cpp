#include "eventsum/eval.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace eventsum::eval {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace

std::vector<LabeledAlarm> read_alarm_fixture(std::istream& in) {
  std::vector<LabeledAlarm> alarms;
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto fields = split_csv_line(line);
    if (fields.size() != 6)
      throw std::runtime_error("alarm fixture line " + std::to_string(line_no) +
                               ": expected 6 fields");
    LabeledAlarm a;
    a.id = fields[0];
    a.keyword = fields[1];
    a.region = fields[2];
    a.mu_max = std::stod(fields[3]);
    a.verified = fields[4] == "YES";
    a.note = fields[5];
    alarms.push_back(std::move(a));
  }
  return alarms;
}

double f_beta(long tp, long fp, long fn, double beta) {
  if (beta <= 0) throw std::invalid_argument("f_beta: beta must be positive");
  const double precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  const double recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  const double b2 = beta * beta;
  const double denominator = b2 * precision + recall;
  if (denominator == 0) return 0;
  return (1 + b2) * precision * recall / denominator;
}

std::vector<SweepResult> sweep_mu_threshold(std::span<const LabeledAlarm> alarms,
                                            std::span<const double> thresholds) {
  if (alarms.empty()) throw std::invalid_argument("sweep_mu_threshold: no alarms");
  std::vector<SweepResult> results;
  results.reserve(thresholds.size());
  for (double threshold : thresholds) {
    SweepResult r;
    r.threshold = threshold;
    for (const LabeledAlarm& a : alarms) {
      const bool flagged = a.mu_max >= threshold;
      if (flagged && a.verified) ++r.tp;
      else if (flagged && !a.verified) ++r.fp;
      else if (!flagged && a.verified) ++r.fn;
      else ++r.tn;
    }
    r.precision = r.tp + r.fp > 0 ? static_cast<double>(r.tp) / (r.tp + r.fp) : 0.0;
    r.recall = r.tp + r.fn > 0 ? static_cast<double>(r.tp) / (r.tp + r.fn) : 0.0;
    r.f_beta = f_beta(r.tp, r.fp, r.fn, 1.0);
    results.push_back(r);
  }
  return results;
}

std::vector<SweepResult> sweep_pcss_threshold(std::span<const PcssLabeledEvent> events,
                                              std::span<const double> thresholds) {
  std::vector<SweepResult> results;
  results.reserve(thresholds.size());
  for (double threshold : thresholds) {
    SweepResult r;
    r.threshold = threshold;
    for (const PcssLabeledEvent& e : events) {
      const bool returned = e.pcss > threshold;
      if (returned && e.newsworthy && e.relevant) ++r.tp;
      else if (returned) ++r.fp;
      else if (e.newsworthy) ++r.fn;
      else ++r.tn;
    }
    r.precision = r.tp + r.fp > 0 ? static_cast<double>(r.tp) / (r.tp + r.fp) : 0.0;
    r.recall = r.tp + r.fn > 0 ? static_cast<double>(r.tp) / (r.tp + r.fn) : 0.0;
    r.f_beta = f_beta(r.tp, r.fp, r.fn, 0.5);
    results.push_back(r);
  }
  return results;
}

std::vector<PcssLabeledEvent> read_pcss_labels(std::istream& in) {
  std::vector<PcssLabeledEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      PcssLabeledEvent e;
      e.id = j.at("id").get<std::string>();
      e.newsworthy = j.at("newsworthy").get<bool>();
      e.pcss = j.at("pcss").get<double>();
      e.relevant = j.at("relevant").get<bool>();
      events.push_back(std::move(e));
    } catch (const std::exception& ex) {
      throw std::runtime_error("pcss labels line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return events;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepResult> results) {
  out << "threshold,tp,fp,tn,fn,precision,recall,f_beta\n";
  for (const SweepResult& r : results) {
    std::ostringstream row;
    row.precision(6);
    row << r.threshold << ',' << r.tp << ',' << r.fp << ',' << r.tn << ',' << r.fn << ','
        << r.precision << ',' << r.recall << ',' << r.f_beta;
    out << row.str() << '\n';
  }
}

}  // namespace eventsum::eval
