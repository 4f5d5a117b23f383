#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "eventsum/eval.hpp"
#include "eventsum/geo.hpp"
#include "eventsum/pipeline.hpp"
#include "eventsum/synth.hpp"

namespace {

using namespace eventsum;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitBadInput = 2;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

pipeline::Config load_config_file(const std::string& path) {
  auto in = open_input(path);
  return pipeline::load_config(in);
}

struct DetectorFlags {
  std::optional<double> mu_threshold, ratio_threshold, sigma;
  std::optional<int> c2_window, c2_guard;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--mu-threshold", mu_threshold, "event filter on mu_max (default 4)");
    cmd.add_option("--ratio-threshold", ratio_threshold,
                   "spam filter on tweets per distinct user (default 1.5)");
    cmd.add_option("--c2-window", c2_window, "C2 baseline length in days (default 7)");
    cmd.add_option("--c2-guard", c2_guard, "gap between baseline and evaluated day (default 0)");
    cmd.add_option("--sigma", sigma, "C2 exceedance in standard deviations (default 3)");
  }
  void apply(pipeline::Config& config) const {
    if (mu_threshold) config.detector.mu_threshold = *mu_threshold;
    if (ratio_threshold) config.detector.ratio_threshold = *ratio_threshold;
    if (c2_window) config.detector.c2_window = *c2_window;
    if (c2_guard) config.detector.c2_guard = *c2_guard;
    if (sigma) config.detector.sigma = *sigma;
  }
};

struct SummaryFlags {
  std::optional<double> pcss_threshold, alpha, df_gate;
  std::optional<int> min_gist, baseline_days;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--pcss-threshold", pcss_threshold, "news coherence gate (default -0.08)");
    cmd.add_option("--alpha", alpha, "term significance level (default 0.05)");
    cmd.add_option("--min-gist", min_gist, "minimum gist size to summarise (default 30)");
    cmd.add_option("--df-gate", df_gate, "minimum gist document frequency (default 0.05)");
    cmd.add_option("--baseline-days", baseline_days, "baseline lookback in days (default 28)");
  }
  void apply(pipeline::Config& config) const {
    if (pcss_threshold) config.summary.pcss_threshold = *pcss_threshold;
    if (alpha) config.summary.alpha = *alpha;
    if (min_gist) config.summary.min_gist = *min_gist;
    if (df_gate) config.summary.df_gate = *df_gate;
    if (baseline_days) config.summary.baseline_days = *baseline_days;
  }
};

int cmd_cluster(const std::string& input, double eps, int min_pts, const std::string& metric,
                const std::string& label_prefix, const std::string& out_path) {
  auto in = open_input(input);
  auto parsed = ingest::parse_messages(in);
  std::vector<geo::GeoPoint> points;
  points.reserve(parsed.messages.size());
  for (const ingest::Message& m : parsed.messages) points.push_back(m.point);
  if (!parsed.rejects.empty())
    std::cerr << parsed.rejects.size() << " rejected line(s) skipped\n";

  geo::DbscanParams params{eps, min_pts,
                           metric == "haversine" ? geo::DistanceMetric::Haversine
                                                 : geo::DistanceMetric::Euclidean};
  const auto labels = geo::dbscan(points, params);
  const auto regions = geo::build_regions(points, labels, label_prefix);
  if (regions.empty())
    throw std::invalid_argument("no regions could be formed; need more points or wider eps");
  auto out = open_output(out_path);
  geo::write_regions(out, regions);

  std::size_t assigned = 0;
  for (int l : labels)
    if (l >= 0) ++assigned;
  std::cout << regions.size() << " region(s) from " << points.size() << " points ("
            << (points.empty() ? 0.0 : 100.0 * assigned / points.size())
            << "% in clusters)\n";
  return kExitOk;
}

int cmd_ingest(pipeline::Config config, const std::string& counts_out,
               const std::string& rejects_out) {
  const auto inputs = pipeline::load_inputs(config, false);
  // count series written for inspection; rejects reported per line
  auto in = open_input(config.paths.messages);
  auto parsed = ingest::parse_messages(in);
  if (!rejects_out.empty()) {
    auto out = open_output(rejects_out);
    for (const auto& r : parsed.rejects) out << r.line_no << '\t' << r.reason << '\n';
  }
  if (parsed.messages.empty()) {
    std::cerr << "no valid messages\n";
    return kExitBadInput;
  }
  ingest::MessageIndex index;
  const ingest::IndexOptions options{.keep_text = false};
  const ingest::LinearNoiseModel* model = inputs.noise_model ? &*inputs.noise_model : nullptr;
  Date lo = date_of_instant(parsed.messages.front().timestamp);
  Date hi = lo;
  for (const ingest::Message& m : parsed.messages) {
    const Date d = date_of_instant(m.timestamp);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    ingest::process_message(m, inputs.regions, inputs.groups, model, options, index);
  }
  const auto counts = ingest::build_count_series(index, {lo, hi});
  auto out = open_output(counts_out);
  for (const auto& [key, series] : counts.nonzero()) {
    nlohmann::ordered_json j;
    j["group"] = inputs.groups[static_cast<std::size_t>(key.first)].primary;
    j["region"] = key.second;
    j["start"] = series.start.to_string();
    std::vector<int> raw, users;
    for (const auto& day : series.days) {
      raw.push_back(day.raw_count);
      users.push_back(day.user_count);
    }
    j["raw"] = raw;
    j["users"] = users;
    out << j.dump() << '\n';
  }
  std::cout << parsed.messages.size() << " message(s) parsed, " << parsed.rejects.size()
            << " rejected, " << index.size() << " indexed, " << counts.nonzero().size()
            << " count series\n";
  return kExitOk;
}

int cmd_detect(pipeline::Config config, const std::string& out_path) {
  const auto inputs = pipeline::load_inputs(config, false);
  const auto result = pipeline::run_detect(config, inputs, false);
  auto out = open_output(out_path);
  pipeline::write_alarms(out, result, inputs);
  for (const auto& ca : result.alarms) {
    if (!ca.classification.is_event) continue;
    const auto& keyword = inputs.groups[static_cast<std::size_t>(ca.alarm.group)].primary;
    const geo::ClusterRegion* region = inputs.region_by_id(ca.alarm.region);
    const std::string code =
        region
            ? inputs.region_code_by_index[static_cast<std::size_t>(region - inputs.regions.data())]
            : "X";
    std::cout << pipeline::event_id(keyword, code, ca.alarm.start) << ' '
              << ca.alarm.start.to_string() << ".." << ca.alarm.end.to_string()
              << " mu_max=" << ca.alarm.mu_max << " ratio=" << ca.alarm.tweet_user_ratio << '\n';
  }
  return kExitOk;
}

int cmd_summarise(pipeline::Config config, const std::string& events_path,
                  const std::string& out_path) {
  const auto inputs = pipeline::load_inputs(config, true);
  auto result = pipeline::run_detect(config, inputs, true);
  if (!events_path.empty()) {
    // restrict to events listed in the alarms file (reusing its classification)
    auto in = open_input(events_path);
    const auto listed = pipeline::read_alarms(in, inputs.groups);
    std::vector<surveillance::ClassifiedAlarm> kept;
    for (const auto& record : listed)
      if (record.is_event) kept.push_back({record.alarm, {true, ""}});
    result.alarms = std::move(kept);
  }
  news::NewsStore store;
  if (!config.paths.news.empty()) {
    auto in = open_input(config.paths.news);
    const auto stats = store.ingest(in);
    if (!stats.rejects.empty())
      std::cerr << stats.rejects.size() << " news record(s) rejected\n";
  }
  const auto summaries = pipeline::run_summarise(config, inputs, result, store);
  auto out = open_output(out_path);
  pipeline::write_summaries(out, summaries);
  for (const auto& s : summaries)
    std::cout << s.event.id << " status=" << tnt::to_string(s.summary.status) << " terms="
              << s.summary.good_terms.size() << " articles=" << s.summary.articles.size() << '\n';
  return kExitOk;
}

int cmd_evaluate(const std::string& fixture, const std::string& out_path, double lo, double hi,
                 double step, const std::string& pcss_labels) {
  std::vector<double> thresholds;
  for (double t = lo; t <= hi + 1e-9; t += step) thresholds.push_back(t);
  std::vector<eval::SweepResult> results;
  if (!pcss_labels.empty()) {
    auto in = open_input(pcss_labels);
    const auto events = eval::read_pcss_labels(in);
    results = eval::sweep_pcss_threshold(events, thresholds);
  } else {
    auto in = open_input(fixture);
    const auto alarms = eval::read_alarm_fixture(in);
    results = eval::sweep_mu_threshold(alarms, thresholds);
  }
  auto out = open_output(out_path);
  eval::write_sweep_csv(out, results);
  for (const auto& r : results)
    std::cout << "threshold " << r.threshold << ": precision " << r.precision << " recall "
              << r.recall << " f " << r.f_beta << '\n';
  return kExitOk;
}

int cmd_gen_synthetic(const std::string& config_path, std::uint64_t seed,
                      const std::string& out_dir) {
  auto in = open_input(config_path);
  const auto config = synth::parse_config(in);
  std::filesystem::create_directories(out_dir);
  auto messages = open_output(out_dir + "/messages.jsonl");
  auto news = open_output(out_dir + "/news.jsonl");
  auto regions = open_output(out_dir + "/regions.jsonl");
  auto truth = open_output(out_dir + "/truth.json");
  const auto corpus = synth::generate(config, seed, messages, news, regions, truth);
  std::cout << corpus.message_count << " message(s), " << corpus.article_count << " article(s), "
            << corpus.truth.size() << " planted event(s)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geo-temporal event detection and summarisation"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand name

  std::string config_path;
  std::optional<std::uint64_t> seed_flag;
  std::optional<int> threads_flag;
  app.add_option("--config", config_path, "pipeline config JSON")->configurable(false);
  app.add_option("--seed", seed_flag, "seed overriding the config");
  app.add_option("--threads", threads_flag, "worker cap (output is identical at any value)");

  auto load = [&]() {
    pipeline::Config config =
        config_path.empty() ? pipeline::Config{} : load_config_file(config_path);
    if (seed_flag) config.seed = *seed_flag;
    if (threads_flag) config.threads = *threads_flag;
    return config;
  };

  // cluster
  auto* cluster = app.add_subcommand("cluster", "derive hull regions from message coordinates");
  std::string cluster_input, cluster_out, cluster_metric = "euclidean", cluster_prefix = "cluster";
  double cluster_eps = 0;
  int cluster_min_pts = 0;
  cluster->add_option("--input", cluster_input, "messages JSONL")->required();
  cluster->add_option("--eps", cluster_eps, "neighbourhood radius (degrees)")->required();
  cluster->add_option("--min-pts", cluster_min_pts, "core point threshold")->required();
  cluster->add_option("--metric", cluster_metric, "euclidean|haversine");
  cluster->add_option("--label-prefix", cluster_prefix, "region label prefix");
  cluster->add_option("--out", cluster_out, "regions JSONL")->required();

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "parse messages and write count series");
  std::string ingest_counts = "counts.jsonl", ingest_rejects;
  ingest_cmd->add_option("--counts-out", ingest_counts, "count series JSONL");
  ingest_cmd->add_option("--rejects-out", ingest_rejects, "rejected lines TSV");

  // detect
  auto* detect = app.add_subcommand("detect", "run EARS detection and classify alarms");
  std::string detect_out = "alarms.jsonl";
  DetectorFlags detect_flags;
  detect->add_option("--out", detect_out, "alarms/events JSONL");
  detect_flags.add_to(*detect);

  // summarise
  auto* summarise = app.add_subcommand("summarise", "summarise detected events");
  std::string summarise_events, summarise_out = "summaries.jsonl";
  DetectorFlags summarise_det_flags;
  SummaryFlags summarise_flags;
  summarise->add_option("--events", summarise_events, "alarms JSONL from detect (optional)");
  summarise->add_option("--out", summarise_out, "summaries JSONL");
  summarise_det_flags.add_to(*summarise);
  summarise_flags.add_to(*summarise);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "threshold sweep over a labelled fixture");
  std::string eval_fixture, eval_out = "sweep.csv", eval_pcss;
  double eval_lo = 0, eval_hi = 21, eval_step = 1;
  evaluate->add_option("--fixture", eval_fixture, "labelled alarms CSV");
  evaluate->add_option("--pcss-labels", eval_pcss, "news-relevance labels JSONL (F0.5 sweep)");
  evaluate->add_option("--from", eval_lo, "first threshold");
  evaluate->add_option("--to", eval_hi, "last threshold");
  evaluate->add_option("--step", eval_step, "threshold step");
  evaluate->add_option("--out", eval_out, "sweep CSV");

  // gen-synthetic
  auto* gen = app.add_subcommand("gen-synthetic", "generate a seeded synthetic corpus");
  std::string gen_config, gen_out_dir = ".";
  gen->add_option("--config", gen_config, "generator config JSON")->required();
  gen->add_option("--out-dir", gen_out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cluster->parsed())
      return cmd_cluster(cluster_input, cluster_eps, cluster_min_pts, cluster_metric,
                         cluster_prefix, cluster_out);
    if (ingest_cmd->parsed()) return cmd_ingest(load(), ingest_counts, ingest_rejects);
    if (detect->parsed()) {
      auto config = load();
      detect_flags.apply(config);
      return cmd_detect(std::move(config), detect_out);
    }
    if (summarise->parsed()) {
      auto config = load();
      summarise_det_flags.apply(config);
      summarise_flags.apply(config);
      return cmd_summarise(std::move(config), summarise_events, summarise_out);
    }
    if (evaluate->parsed()) {
      if (eval_fixture.empty() && eval_pcss.empty()) {
        std::cerr << "evaluate: --fixture or --pcss-labels required\n";
        return kExitBadInput;
      }
      return cmd_evaluate(eval_fixture, eval_out, eval_lo, eval_hi, eval_step, eval_pcss);
    }
    if (gen->parsed()) {
      const std::uint64_t seed = seed_flag.value_or(0);
      return cmd_gen_synthetic(gen_config, seed, gen_out_dir);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
