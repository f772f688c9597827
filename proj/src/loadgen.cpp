#include "tp/loadgen.hpp"

#include <algorithm>
#include <cmath>

namespace tp {

void ExchangeProfile::validate() const {
  if (feed_id.empty()) throw std::invalid_argument("profile needs a feed id");
  if (!(open_tod >= 0 && open_tod < close_tod && close_tod <= kDay))
    throw std::invalid_argument(feed_id + ": open/close out of order");
  if (lunch) {
    if (!(lunch->start_tod >= open_tod && lunch->end_tod <= close_tod &&
          lunch->start_tod < lunch->end_tod))
      throw std::invalid_argument(feed_id + ": lunch outside session");
    if (lunch->mode == LunchBreak::Mode::SoftDip &&
        !(lunch->dip_depth > 0 && lunch->dip_depth < 1))
      throw std::invalid_argument(feed_id + ": dip depth must be in (0,1)");
  }
  if (open_amp < 1 || close_amp < 1)
    throw std::invalid_argument(feed_id + ": peak amplitudes must be >= 1");
  if (base_rate <= 0 || offhours_rate < 0)
    throw std::invalid_argument(feed_id + ": bad rates");
  if (peak_width <= 0) throw std::invalid_argument(feed_id + ": bad peak width");
  if (symbols.empty()) throw std::invalid_argument(feed_id + ": no symbols");
  if (channels < 1 || channels > 256)
    throw std::invalid_argument(feed_id + ": channels out of range");
}

MixSpec MixSpec::defaults() {
  MixSpec mix;
  const auto set = [&](NotificationKind kind, DayPhase phase, double mean,
                       double sd, std::uint32_t lo, std::uint32_t hi) {
    mix.size[static_cast<int>(kind) - 1][static_cast<int>(phase)] =
        SizeModel{mean, sd, lo, hi};
  };
  // Ticks dominate the stream; morning opens carry the wide reset frames.
  set(NotificationKind::Tick, DayPhase::Morning, 112, 26, 66, 250);
  set(NotificationKind::Tick, DayPhase::Midday, 95, 22, 66, 250);
  set(NotificationKind::Tick, DayPhase::Evening, 100, 24, 66, 250);
  set(NotificationKind::Reference, DayPhase::Morning, 140, 35, 40, 250);
  set(NotificationKind::Reference, DayPhase::Midday, 150, 35, 40, 250);
  set(NotificationKind::Reference, DayPhase::Evening, 180, 35, 40, 250);
  set(NotificationKind::Statistics, DayPhase::Morning, 120, 30, 40, 250);
  set(NotificationKind::Statistics, DayPhase::Midday, 130, 30, 40, 250);
  set(NotificationKind::Statistics, DayPhase::Evening, 165, 30, 40, 250);
  set(NotificationKind::News, DayPhase::Morning, 420, 160, 100, 2000);
  set(NotificationKind::News, DayPhase::Midday, 420, 160, 100, 2000);
  set(NotificationKind::News, DayPhase::Evening, 420, 160, 100, 2000);
  return mix;
}

void MixSpec::validate() const {
  const double total = p_tick + p_reference + p_statistics + p_news;
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("mix probabilities must sum to 1");
  if (p_tick < 0 || p_reference < 0 || p_statistics < 0 || p_news < 0)
    throw std::invalid_argument("mix probabilities must be non-negative");
  for (int kind = 0; kind < 4; ++kind) {
    for (int phase = 0; phase < 3; ++phase) {
      const SizeModel& m = size[kind][phase];
      if (m.lo > m.hi || m.sd < 0)
        throw std::invalid_argument("bad size model");
      const bool news = kind == static_cast<int>(NotificationKind::News) - 1;
      if (!news && (m.lo < 20 || m.hi > 250))
        throw std::invalid_argument("non-news sizes must stay in [20,250]");
    }
  }
}

namespace {

double gauss_bump(double x, double center, double width) {
  const double z = (x - center) / width;
  return std::exp(-0.5 * z * z);
}

DurationUs local_tod(const ExchangeProfile& profile, VirtualTime t) {
  std::int64_t local = t.us + std::int64_t(profile.tz_offset_minutes) * kMinute;
  local %= kDay;
  if (local < 0) local += kDay;
  return local;
}

double spike_factor(const std::vector<EventSpike>& spikes, VirtualTime t) {
  double factor = 1.0;
  for (const auto& spike : spikes)
    if (spike.active_at(t)) factor *= spike.volume_multiplier;
  return factor;
}

}  // namespace

double rate_at(const ExchangeProfile& profile,
               const std::vector<EventSpike>& spikes, VirtualTime t) {
  const DurationUs tod = local_tod(profile, t);
  const double spike = spike_factor(spikes, t);
  if (tod < profile.open_tod || tod >= profile.close_tod)
    return profile.offhours_rate * spike;

  const double x = static_cast<double>(tod);
  double rate = profile.base_rate *
                (1.0 +
                 (profile.open_amp - 1.0) *
                     gauss_bump(x, static_cast<double>(profile.open_tod),
                                static_cast<double>(profile.peak_width)) +
                 (profile.close_amp - 1.0) *
                     gauss_bump(x, static_cast<double>(profile.close_tod),
                                static_cast<double>(profile.peak_width)));
  if (profile.lunch) {
    const LunchBreak& lunch = *profile.lunch;
    if (lunch.mode == LunchBreak::Mode::HardClose) {
      if (tod >= lunch.start_tod && tod < lunch.end_tod) return 0.0;
    } else {
      const double mid =
          static_cast<double>(lunch.start_tod + lunch.end_tod) / 2.0;
      const double width =
          static_cast<double>(lunch.end_tod - lunch.start_tod) / 2.0;
      rate *= 1.0 - lunch.dip_depth * gauss_bump(x, mid, width);
    }
  }
  return rate * spike;
}

double expected_count(const ExchangeProfile& profile,
                      const std::vector<EventSpike>& spikes, VirtualTime t0,
                      VirtualTime t1) {
  constexpr DurationUs kStep = 100 * kMillisecond;
  double total = 0;
  VirtualTime t = t0;
  double prev = rate_at(profile, spikes, t);
  while (t < t1) {
    const VirtualTime next = std::min(VirtualTime{t.us + kStep}, t1);
    const double current = rate_at(profile, spikes, next);
    total += 0.5 * (prev + current) * static_cast<double>(next - t) / kSecond;
    prev = current;
    t = next;
  }
  return total;
}

DayPhase day_phase(const ExchangeProfile& profile, VirtualTime t) {
  const DurationUs tod = local_tod(profile, t);
  const DurationUs third = (profile.close_tod - profile.open_tod) / 3;
  if (tod < profile.open_tod + third) return DayPhase::Morning;
  if (tod < profile.open_tod + 2 * third) return DayPhase::Midday;
  return DayPhase::Evening;
}

void inject_spike(GeneratorConfig& config, const EventSpike& spike) {
  if (spike.volume_multiplier < 1.0)
    throw std::invalid_argument("spike multiplier must be >= 1");
  if (spike.start < config.from || spike.start + spike.duration > config.to)
    throw std::invalid_argument("spike window outside the run horizon");
  for (const auto& existing : config.spikes) {
    if (existing.start == spike.start && existing.duration == spike.duration)
      throw std::invalid_argument("duplicate spike window");
  }
  config.spikes.push_back(spike);
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

StreamGenerator::StreamGenerator(const GeneratorConfig& config)
    : config_(config) {
  if (config_.profiles.empty())
    throw std::invalid_argument("generator needs at least one profile");
  if (!(config_.from < config_.to))
    throw std::invalid_argument("empty generation horizon");
  config_.mix.validate();
  for (const auto& spike : config_.spikes)
    if (spike.volume_multiplier < 1.0)
      throw std::invalid_argument("spike multiplier must be >= 1");

  double spike_ceiling = 1.0;
  for (const auto& spike : config_.spikes)
    spike_ceiling *= spike.volume_multiplier;

  for (const auto& profile : config_.profiles) {
    profile.validate();
    ProfileStream stream{
        profile,
        Rng(Rng::derive(config_.seed, profile.feed_id)),
        0.0,
        config_.from,
        -1,
        {},
        std::vector<std::uint32_t>(static_cast<std::size_t>(profile.channels), 1),
        std::nullopt};
    stream.rate_max =
        std::max(profile.base_rate *
                     (1.0 + (profile.open_amp - 1.0) + (profile.close_amp - 1.0)),
                 profile.offhours_rate) *
        spike_ceiling;
    stream.symbols.reserve(profile.symbols.size());
    for (const auto& symbol : profile.symbols) {
      // Base level from the symbol name so every instrument gets a stable,
      // distinct price neighbourhood.
      const std::uint64_t h = fnv1a(to_string(symbol));
      const Price4 base = 5 * kPriceScale +
                          static_cast<Price4>(h % 495) * kPriceScale +
                          static_cast<Price4>(h / 7 % kPriceScale);
      stream.symbols.push_back(
          SymbolState{base, base / 2, base * 2, false});
    }
    streams_.push_back(std::move(stream));
    advance(streams_.back());
  }
}

Notification StreamGenerator::synthesize(ProfileStream& stream, VirtualTime t) {
  const ExchangeProfile& profile = stream.profile;
  Rng& rng = stream.rng;

  // New local trading day resets the open-flag bookkeeping.
  const std::int64_t day =
      (t.us + std::int64_t(profile.tz_offset_minutes) * kMinute) / kDay;
  if (day != stream.current_day) {
    stream.current_day = day;
    for (auto& s : stream.symbols) s.seen_today = false;
  }

  const std::size_t symbol_index = rng.below(stream.symbols.size());
  SymbolState& sym = stream.symbols[symbol_index];
  const SymbolRef& symbol = profile.symbols[symbol_index];

  const double kind_u = rng.uniform();
  NotificationKind kind;
  if (kind_u < config_.mix.p_tick) {
    kind = NotificationKind::Tick;
  } else if (kind_u < config_.mix.p_tick + config_.mix.p_reference) {
    kind = NotificationKind::Reference;
  } else if (kind_u <
             config_.mix.p_tick + config_.mix.p_reference + config_.mix.p_statistics) {
    kind = NotificationKind::Statistics;
  } else {
    kind = NotificationKind::News;
  }

  const DayPhase phase = day_phase(profile, t);
  const SizeModel& size_model = config_.mix.model(kind, phase);
  auto sampled = static_cast<std::int64_t>(
      std::llround(rng.normal(size_model.mean, size_model.sd)));
  sampled = std::clamp<std::int64_t>(sampled, size_model.lo, size_model.hi);

  Notification n;
  n.feed_id = profile.feed_id;
  n.kind = kind;
  n.symbol = symbol;
  n.publish_ts = t;
  const std::size_t channel =
      fnv1a(symbol.local_symbol) % static_cast<std::size_t>(profile.channels);
  n.channel_id = static_cast<std::uint8_t>(channel);
  n.seq_no = stream.next_seq[channel]++;

  if (kind == NotificationKind::Tick) {
    // Reflecting random walk on the mid, up to 20 ticks a step.
    const Price4 step = static_cast<Price4>(rng.below(41)) - 20;
    sym.mid = std::clamp(sym.mid + step, sym.floor, sym.ceiling);
    const Price4 half_spread = static_cast<Price4>(1 + rng.below(5));
    Price4 bid = sym.mid - half_spread;
    Price4 ask = sym.mid + half_spread;
    TickFlags flags;
    if (rng.uniform() < 0.0005) {
      std::swap(bid, ask);  // crossed quote, carried with the flag set
      flags.bits |= TickFlags::kCrossed;
    }
    if (!sym.seen_today) {
      sym.seen_today = true;
      flags.bits |= TickFlags::kOpen;
    }
    n.tick = TickPayload{bid,
                         ask,
                         static_cast<std::uint32_t>(1 + rng.below(1000)),
                         static_cast<std::uint32_t>(1 + rng.below(1000)),
                         VirtualTime{t.us - static_cast<std::int64_t>(rng.below(500))},
                         flags};
    n.wire_size = std::max(static_cast<std::uint32_t>(sampled),
                           minimal_wire_size(n));
  } else {
    const std::uint32_t header =
        24 + static_cast<std::uint32_t>(symbol.local_symbol.size());
    const std::uint32_t body_len =
        static_cast<std::uint32_t>(sampled) > header
            ? static_cast<std::uint32_t>(sampled) - header
            : 0;
    n.body.resize(body_len);
    for (auto& b : n.body) b = static_cast<std::uint8_t>(rng.next() & 0xff);
    n.wire_size = header + body_len;
  }
  return n;
}

void StreamGenerator::advance(ProfileStream& stream) {
  stream.pending.reset();
  while (stream.cursor < config_.to) {
    const double wait = stream.rng.exponential(stream.rate_max);
    stream.cursor = stream.cursor +
                    std::max<DurationUs>(1, std::llround(wait * kSecond));
    if (stream.cursor >= config_.to) break;
    const double rate = rate_at(stream.profile, config_.spikes, stream.cursor);
    if (stream.rng.uniform() * stream.rate_max >= rate) continue;  // thinned
    Notification n = synthesize(stream, stream.cursor);
    if (config_.gap_drop_probability > 0 &&
        stream.rng.uniform() < config_.gap_drop_probability) {
      ++gap_dropped_;
      continue;
    }
    stream.pending = std::move(n);
    return;
  }
}

std::optional<Notification> StreamGenerator::next() {
  ProfileStream* best = nullptr;
  for (auto& stream : streams_) {
    if (!stream.pending) continue;
    if (!best || stream.pending->publish_ts < best->pending->publish_ts ||
        (stream.pending->publish_ts == best->pending->publish_ts &&
         stream.pending->feed_id < best->pending->feed_id))
      best = &stream;
  }
  if (!best) return std::nullopt;
  Notification out = std::move(*best->pending);
  advance(*best);
  ++generated_;
  return out;
}

}  // namespace tp
