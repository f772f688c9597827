#include "tp/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

namespace tp {

using nlohmann::json;

namespace {

std::string dir_of(const std::string& path) {
  const auto slash = path.find_last_of('/');
  if (slash == std::string::npos) return ".";
  return path.substr(0, slash);
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || path[0] == '/') return path;
  return base_dir + "/" + path;
}

DurationUs duration_field(const json& j, const char* key, DurationUs fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_number()) return static_cast<DurationUs>(v.get<double>() * kSecond);
  return parse_duration(v.get<std::string>());
}

// "HH:MM" or "HH:MM:SS" local time of day.
DurationUs time_of_day(const std::string& text) {
  int h = 0, m = 0, s = 0;
  const int got = std::sscanf(text.c_str(), "%d:%d:%d", &h, &m, &s);
  if (got < 2 || h < 0 || h > 24 || m < 0 || m > 59 || s < 0 || s > 59)
    throw ConfigError("bad time of day: " + text);
  return h * kHour + m * kMinute + s * kSecond;
}

ExchangeProfile parse_profile(const json& j) {
  ExchangeProfile p;
  p.mic = Mic::of(j.at("mic").get<std::string>());
  p.feed_id = j.value("feed", "FEED." + p.mic.code);
  p.tz_offset_minutes = j.value("tz_offset_minutes", 0);
  p.open_tod = time_of_day(j.at("open").get<std::string>());
  p.close_tod = time_of_day(j.at("close").get<std::string>());
  if (j.contains("lunch")) {
    const auto& l = j.at("lunch");
    LunchBreak lunch;
    lunch.start_tod = time_of_day(l.at("start").get<std::string>());
    lunch.end_tod = time_of_day(l.at("end").get<std::string>());
    const std::string mode = l.value("mode", "softdip");
    if (mode == "hard") {
      lunch.mode = LunchBreak::Mode::HardClose;
    } else if (mode == "softdip") {
      lunch.mode = LunchBreak::Mode::SoftDip;
      lunch.dip_depth = l.value("depth", 0.4);
    } else {
      throw ConfigError("bad lunch mode: " + mode);
    }
    p.lunch = lunch;
  }
  p.base_rate = j.value("base_rate", 500.0);
  p.offhours_rate = j.value("offhours_rate", 5.0);
  p.open_amp = j.value("open_amp", 4.0);
  p.close_amp = j.value("close_amp", 3.0);
  p.peak_width = duration_field(j, "peak_width", 30 * kMinute);
  p.channels = j.value("channels", 4);
  if (j.contains("symbols") && j.at("symbols").is_array()) {
    for (const auto& s : j.at("symbols")) {
      const std::string text = s.get<std::string>();
      const auto at = text.find('@');
      if (at == std::string::npos)
        throw ConfigError("symbol needs LOCAL@MIC: " + text);
      p.symbols.push_back(SymbolRef::of(text.substr(0, at), text.substr(at + 1)));
    }
  } else {
    const int count = j.value("symbols", 100);
    const std::string prefix = j.value("symbol_prefix", p.mic.code.substr(0, 3));
    for (int i = 0; i < count; ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "%s%04d", prefix.c_str(), i);
      p.symbols.push_back(SymbolRef{name, p.mic});
    }
  }
  p.validate();
  return p;
}

void parse_mix(const json& j, MixSpec& mix) {
  mix.p_tick = j.value("p_tick", mix.p_tick);
  mix.p_reference = j.value("p_reference", mix.p_reference);
  mix.p_statistics = j.value("p_statistics", mix.p_statistics);
  mix.p_news = j.value("p_news", mix.p_news);
  if (j.contains("sizes")) {
    static const char* kKinds[] = {"tick", "reference", "statistics", "news"};
    static const char* kPhases[] = {"morning", "midday", "evening"};
    for (int kind = 0; kind < 4; ++kind) {
      if (!j.at("sizes").contains(kKinds[kind])) continue;
      const auto& by_phase = j.at("sizes").at(kKinds[kind]);
      for (int phase = 0; phase < 3; ++phase) {
        if (!by_phase.contains(kPhases[phase])) continue;
        const auto& m = by_phase.at(kPhases[phase]);
        SizeModel& model = mix.size[kind][phase];
        model.mean = m.value("mean", model.mean);
        model.sd = m.value("sd", model.sd);
        model.lo = m.value("lo", model.lo);
        model.hi = m.value("hi", model.hi);
      }
    }
  }
  mix.validate();
}

}  // namespace

Isin synthetic_isin(const SymbolRef& symbol) {
  // Country "ZZ" plus a 9-char alphanumeric body derived from the symbol.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : to_string(symbol)) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  static const char* kAlphabet = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::string prefix = "ZZ";
  for (int i = 0; i < 9; ++i) {
    prefix.push_back(kAlphabet[h % 36]);
    h /= 36;
    if (h == 0) h = 0x9e3779b97f4a7c15ULL;
  }
  const auto check = isin_check_digit(prefix);
  prefix.push_back(static_cast<char>('0' + *check));
  return Isin{prefix};
}

void auto_register_symbols(SymbologyStore& store,
                           const std::vector<ExchangeProfile>& profiles) {
  for (const auto& profile : profiles) {
    for (const auto& symbol : profile.symbols) {
      if (store.resolve(symbol)) continue;
      InstrumentRecord record;
      record.isin = synthetic_isin(symbol);
      record.listings = {symbol};
      record.display_name = to_string(symbol);
      store.register_instrument(record);
    }
  }
}

SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  const std::string base_dir = dir_of(path);

  SimConfig config;
  try {
    config.generator.seed = j.value("seed", 1ULL);
    if (const char* env_seed = std::getenv("TP_SEED"))
      config.generator.seed = std::strtoull(env_seed, nullptr, 10);

    const std::int64_t start_day = j.value("start_day", 0);
    config.generator.from = VirtualTime{start_day * kDay};
    const double horizon_days = j.value("horizon_days", 1.0);
    if (horizon_days <= 0) throw ConfigError("horizon must be positive");
    config.generator.to =
        config.generator.from +
        static_cast<DurationUs>(horizon_days * static_cast<double>(kDay));
    config.generator.gap_drop_probability = j.value("inject_gaps", 0.0);

    if (!j.contains("profiles") || j.at("profiles").empty())
      throw ConfigError("config needs at least one profile");
    for (const auto& p : j.at("profiles"))
      config.generator.profiles.push_back(parse_profile(p));
    if (j.contains("mix")) parse_mix(j.at("mix"), config.generator.mix);

    if (j.contains("spikes")) {
      for (const auto& s : j.at("spikes")) {
        EventSpike spike;
        spike.start = config.generator.from +
                      duration_field(s, "start_offset", 0);
        spike.duration = duration_field(s, "duration", kHour);
        spike.volume_multiplier = s.value("multiplier", 1.5);
        inject_spike(config.generator, spike);
      }
    }

    const std::string mode = j.value("mode", "deterministic");
    if (mode == "deterministic") {
      config.mode = RunMode::Deterministic;
    } else if (mode == "benchmark") {
      config.mode = RunMode::Benchmark;
    } else {
      throw ConfigError("bad mode: " + mode);
    }
    config.per_broker_cost_us = duration_field(j, "per_broker_cost", 50);
    config.history_capacity = j.value("history_capacity", std::size_t{4'000'000});
    if (j.contains("spread_event_threshold")) {
      const auto p = parse_price4(j.at("spread_event_threshold").get<std::string>());
      if (!p) throw ConfigError("bad spread_event_threshold");
      config.spread_event_threshold = *p;
    }
    config.derived_events = j.value("derived_events", true);
    config.record_delivery_log = j.value("record_delivery_log", true);

    config.topology =
        parse_topology_file(resolve(base_dir, j.at("topology_file").get<std::string>()));
    config.subscriptions = parse_subscriptions_file(
        resolve(base_dir, j.at("subscriptions_file").get<std::string>()));
    load_entitlements_file(
        config.entitlements,
        resolve(base_dir, j.at("entitlements_file").get<std::string>()));
    if (j.contains("refdata_file")) {
      const auto report = load_refdata_file(
          config.symbology, resolve(base_dir, j.at("refdata_file").get<std::string>()));
      if (!report.rejected.empty())
        throw ConfigError("refdata rejected line " +
                          std::to_string(report.rejected.front().first) + ": " +
                          report.rejected.front().second);
    }
    if (j.value("auto_register_symbols", true))
      auto_register_symbols(config.symbology, config.generator.profiles);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  // Cross-checks: topology must cover every feed, and the generator's
  // feeds must map to exchanges for entitlement checks.
  if (!config.topology.connected())
    throw ConfigError("broker topology is not connected");
  for (const auto& profile : config.generator.profiles) {
    if (!config.topology.publisher_attach.count(profile.feed_id))
      throw ConfigError("feed " + profile.feed_id + " has no publisher attachment");
    if (!config.entitlements.feed_exchange(profile.feed_id))
      config.entitlements.map_feed(profile.feed_id, profile.mic);
  }
  for (const auto& sub : config.subscriptions) {
    if (!config.topology.subscriber_attach.count(sub.subscriber_id))
      throw ConfigError("subscriber " + sub.subscriber_id +
                        " has no broker attachment");
  }
  return config;
}

}  // namespace tp
