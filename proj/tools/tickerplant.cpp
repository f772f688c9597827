#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "tp/benchmark.hpp"
#include "tp/config.hpp"
#include "tp/loadgen.hpp"
#include "tp/simulation.hpp"
#include "tp/wire.hpp"

namespace {

int cmd_gen(const std::string& config_path, const std::string& out_dir,
            const std::string& format, double inject_gaps) {
  tp::SimConfig config = tp::load_sim_config(config_path);
  if (inject_gaps > 0) config.generator.gap_drop_probability = inject_gaps;
  std::filesystem::create_directories(out_dir);

  tp::StreamGenerator generator(config.generator);
  if (format == "text") {
    std::ofstream out(out_dir + "/stream.txt", std::ios::binary);
    while (auto n = generator.next()) out << tp::format_text_record(*n) << '\n';
  } else {
    std::map<std::string, std::ofstream> files;
    std::vector<std::uint8_t> buf;
    while (auto n = generator.next()) {
      auto it = files.find(n->feed_id);
      if (it == files.end()) {
        it = files.emplace(n->feed_id,
                           std::ofstream(out_dir + "/" + n->feed_id + ".vfb",
                                         std::ios::binary))
                 .first;
      }
      buf.clear();
      tp::append_vfb_frame(*n, buf);
      it->second.write(reinterpret_cast<const char*>(buf.data()),
                       static_cast<std::streamsize>(buf.size()));
    }
  }
  std::printf("generated %llu notifications (%llu dropped for gap injection)\n",
              static_cast<unsigned long long>(generator.generated()),
              static_cast<unsigned long long>(generator.gap_dropped()));
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  const tp::SimConfig config = tp::load_sim_config(config_path);
  const tp::SimulationResult result = tp::run_simulation(config);
  tp::emit_metrics(result, config, out_dir);
  const auto overall = result.latency.overall();
  std::printf("generated=%llu delivered=%llu quarantined=%llu p99=%lldus\n",
              static_cast<unsigned long long>(result.counters.generated),
              static_cast<unsigned long long>(result.counters.delivered_rows),
              static_cast<unsigned long long>(result.counters.quarantined),
              static_cast<long long>(overall.p99));
  for (const auto& denied : result.denied_subscriptions)
    std::printf("denied: %s\n", denied.c_str());
  if (!result.ok()) {
    for (const auto& violation : result.invariant_violations)
      std::fprintf(stderr, "invariant violation: %s\n", violation.c_str());
    return 1;
  }
  return 0;
}

int cmd_bench(const std::string& config_path, double rate,
              const std::string& duration, const std::string& out_dir) {
  tp::SimConfig config = tp::load_sim_config(config_path);
  const tp::BenchResult result =
      tp::run_benchmark(config, rate, tp::parse_duration(duration));
  const std::string text = result.summary_text();
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    tp::write_text_file(out_dir + "/bench_summary.txt", text);
  }
  std::fputs(text.c_str(), stdout);
  if (result.backpressure)
    std::fprintf(stderr, "backpressure: generator could not hold %g/sec\n", rate);
  return result.lost == 0 ? 0 : 1;
}

int cmd_report(const std::string& delivery_log, const std::string& out_path) {
  std::ifstream in(delivery_log);
  if (!in) {
    std::fprintf(stderr, "cannot open %s\n", delivery_log.c_str());
    return 1;
  }
  // Rebuild the ledger from the exported rows.
  tp::MeterLedger ledger;
  std::string line;
  std::int64_t max_day = 0;
  std::getline(in, line);  // header
  std::uint64_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::string cur;
    for (char c : line) {
      if (c == '|') {
        cols.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    cols.push_back(cur);
    if (cols.size() != 6) {
      std::fprintf(stderr, "bad delivery row: %s\n", line.c_str());
      return 1;
    }
    const std::int64_t publish_us = std::stoll(cols[4]);
    const std::int64_t day = publish_us / tp::kDay;
    max_day = std::max(max_day, day);
    // The log does not carry the symbol; meter distinct symbols per feed
    // channel instead.
    ledger.record(cols[0], cols[1], day,
                  tp::SymbolRef{"CH" + cols[2], tp::Mic{"XXXX"}});
    ++rows;
  }
  ledger.close_through(max_day + 1);
  const std::string report = ledger.usage_report(0, max_day + 1);
  if (out_path.empty()) {
    std::fputs(report.c_str(), stdout);
  } else {
    tp::write_text_file(out_path, report);
  }
  std::printf("recounted %llu deliveries\n",
              static_cast<unsigned long long>(rows));
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const tp::SimConfig config = tp::load_sim_config(config_path);
  std::printf("config ok: %zu profiles, %zu brokers, %zu subscriptions, "
              "%zu entitlements, %zu instruments\n",
              config.generator.profiles.size(), config.topology.brokers.size(),
              config.subscriptions.size(),
              config.entitlements.entitlements().size(),
              config.symbology.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale ticker plant: workload generation, simulation, "
               "benchmarking and usage reporting"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string format = "vfb";
  std::string duration = "30s";
  std::string delivery_log;
  std::string out_path;
  double rate = 50'000;
  double inject_gaps = 0;

  auto* gen = app.add_subcommand("gen", "generate a stream file");
  gen->add_option("--config", config_path, "config JSON")->required();
  gen->add_option("--out-dir", out_dir, "output directory");
  gen->add_option("--format", format, "vfb | text")
      ->check(CLI::IsMember({"vfb", "text"}));
  gen->add_option("--inject-gaps", inject_gaps,
                  "drop probability per notification, pre-sequencing");

  auto* run = app.add_subcommand("run", "run the deterministic simulation");
  run->add_option("--config", config_path, "config JSON")->required();
  run->add_option("--out-dir", out_dir, "metrics directory");

  auto* bench = app.add_subcommand("bench", "wall-clock benchmark");
  bench->add_option("--config", config_path, "config JSON")->required();
  bench->add_option("--rate", rate, "target notifications/sec");
  bench->add_option("--duration", duration, "wall duration, e.g. 30s");
  bench->add_option("--out-dir", out_dir, "summary directory");

  auto* report = app.add_subcommand("report", "usage report from a delivery log");
  report->add_option("--delivery-log", delivery_log, "delivery_log.txt")->required();
  report->add_option("--out", out_path, "write report here instead of stdout");

  auto* validate = app.add_subcommand("validate", "lint a config");
  validate->add_option("--config", config_path, "config JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(config_path, out_dir, format, inject_gaps);
    if (run->parsed()) return cmd_run(config_path, out_dir);
    if (bench->parsed()) return cmd_bench(config_path, rate, duration, out_dir);
    if (report->parsed()) return cmd_report(delivery_log, out_path);
    if (validate->parsed()) return cmd_validate(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
