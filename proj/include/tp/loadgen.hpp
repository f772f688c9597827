#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tp/notification.hpp"
#include "tp/rng.hpp"
#include "tp/time.hpp"

namespace tp {

// Intraday load-curve parameters for one synthetic exchange. The rate
// shape is the satchel: Gaussian activity bumps at open and close over a
// base level, with a lunch dip (a hard close in Tokyo-style sessions).
struct LunchBreak {
  enum class Mode : std::uint8_t { HardClose, SoftDip };
  DurationUs start_tod{0};  // local time of day, µs
  DurationUs end_tod{0};
  Mode mode{Mode::SoftDip};
  double dip_depth{0.4};  // SoftDip only, in (0,1)
};

struct ExchangeProfile {
  Mic mic;
  std::string feed_id;
  int tz_offset_minutes{0};
  DurationUs open_tod{0};   // local time of day, µs
  DurationUs close_tod{0};  // > open_tod
  std::optional<LunchBreak> lunch;
  double base_rate{500};      // notifications/sec at midday
  double offhours_rate{5};    // outside the session
  double open_amp{4};         // rate multiplier at the open peak
  double close_amp{3};
  DurationUs peak_width{30 * kMinute};  // Gaussian sigma of the bumps
  std::vector<SymbolRef> symbols;
  int channels{4};

  void validate() const;  // throws std::invalid_argument
};

struct EventSpike {
  VirtualTime start{};
  DurationUs duration{0};
  double volume_multiplier{1.0};  // >= 1

  bool active_at(VirtualTime t) const {
    return t >= start && t < start + duration;
  }
};

enum class DayPhase : std::uint8_t { Morning, Midday, Evening };

struct SizeModel {
  double mean{100};
  double sd{25};
  std::uint32_t lo{20};
  std::uint32_t hi{250};
};

struct MixSpec {
  // Kind probabilities; must sum to 1.
  double p_tick{0.98};
  double p_reference{0.0016};
  double p_statistics{0.01839};
  double p_news{0.00001};
  // Wire-size model per kind and day phase.
  SizeModel size[4][3];

  static MixSpec defaults();
  void validate() const;

  const SizeModel& model(NotificationKind kind, DayPhase phase) const {
    return size[static_cast<int>(kind) - 1][static_cast<int>(phase)];
  }
};

// Expected notification rate (per second) at virtual time t.
double rate_at(const ExchangeProfile& profile,
               const std::vector<EventSpike>& spikes, VirtualTime t);

// Trapezoid integral of rate_at over [t0, t1), 100ms steps: the expected
// notification count.
double expected_count(const ExchangeProfile& profile,
                      const std::vector<EventSpike>& spikes, VirtualTime t0,
                      VirtualTime t1);

DayPhase day_phase(const ExchangeProfile& profile, VirtualTime t);

struct GeneratorConfig {
  std::vector<ExchangeProfile> profiles;
  MixSpec mix = MixSpec::defaults();
  std::vector<EventSpike> spikes;
  std::uint64_t seed{1};
  VirtualTime from{};
  VirtualTime to{};
  double gap_drop_probability{0};  // fault injection, pre-sequencing
};

// Registers a spike; identical windows are rejected, overlapping windows
// multiply.
void inject_spike(GeneratorConfig& config, const EventSpike& spike);

// Streaming inhomogeneous-Poisson generator (thinning against rate_at),
// one independent substream per profile, merged in publish-time order.
// Identical config => byte-identical stream.
class StreamGenerator {
 public:
  explicit StreamGenerator(const GeneratorConfig& config);

  std::optional<Notification> next();

  std::uint64_t generated() const { return generated_; }
  std::uint64_t gap_dropped() const { return gap_dropped_; }

 private:
  struct SymbolState {
    Price4 mid{0};
    Price4 floor{0};
    Price4 ceiling{0};
    bool seen_today{false};
  };

  struct ProfileStream {
    ExchangeProfile profile;
    Rng rng;
    double rate_max{0};
    VirtualTime cursor{};
    std::int64_t current_day{-1};
    std::vector<SymbolState> symbols;
    std::vector<std::uint32_t> next_seq;  // per channel
    std::optional<Notification> pending;
  };

  void advance(ProfileStream& stream);
  Notification synthesize(ProfileStream& stream, VirtualTime t);

  GeneratorConfig config_;
  std::vector<ProfileStream> streams_;
  std::uint64_t generated_{0};
  std::uint64_t gap_dropped_{0};
};

}  // namespace tp
