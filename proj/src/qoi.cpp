#include "tp/qoi.hpp"

#include <cstdio>
#include <stdexcept>
#include <vector>

namespace tp {

bool QoISpec::valid() const {
  if (timeliness.mode == Timeliness::Mode::Delayed && timeliness.delay_us <= 0)
    return false;
  if (timeliness.mode != Timeliness::Mode::Delayed && timeliness.delay_us != 0)
    return false;
  if (granularity.mode == Granularity::Mode::Aggregated &&
      granularity.window_us <= 0)
    return false;
  if (granularity.mode == Granularity::Mode::TickLevel &&
      granularity.window_us != 0)
    return false;
  if (completeness.mode == Completeness::Mode::Throttled &&
      !(completeness.max_rate_per_sec > 0))
    return false;
  if (completeness.mode == Completeness::Mode::Full &&
      completeness.max_rate_per_sec != 0)
    return false;
  return true;
}

namespace {

int timeliness_rank(Timeliness::Mode m) {
  switch (m) {
    case Timeliness::Mode::RealTime: return 0;
    case Timeliness::Mode::Delayed: return 1;
    case Timeliness::Mode::IntraDay: return 2;
    case Timeliness::Mode::EndOfDay: return 3;
  }
  return 3;
}

}  // namespace

bool timeliness_within(const Timeliness& requested, const Timeliness& allowed) {
  const int rr = timeliness_rank(requested.mode);
  const int ra = timeliness_rank(allowed.mode);
  if (rr != ra) return rr > ra;
  if (requested.mode == Timeliness::Mode::Delayed)
    return requested.delay_us >= allowed.delay_us;  // longer delay = less permissive
  return true;
}

bool granularity_within(const Granularity& requested, const Granularity& allowed) {
  if (allowed.mode == Granularity::Mode::TickLevel) return true;
  if (requested.mode == Granularity::Mode::TickLevel) return false;
  return requested.window_us >= allowed.window_us;  // coarser = less permissive
}

bool completeness_within(const Completeness& requested, const Completeness& allowed) {
  if (allowed.mode == Completeness::Mode::Full) return true;
  if (requested.mode == Completeness::Mode::Full) return false;
  return requested.max_rate_per_sec <= allowed.max_rate_per_sec;
}

bool qoi_within(const QoISpec& requested, const QoISpec& allowed) {
  return timeliness_within(requested.timeliness, allowed.timeliness) &&
         granularity_within(requested.granularity, allowed.granularity) &&
         completeness_within(requested.completeness, allowed.completeness);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string format_qoi(const QoISpec& q) {
  std::string out;
  switch (q.timeliness.mode) {
    case Timeliness::Mode::RealTime: out = "realtime"; break;
    case Timeliness::Mode::Delayed:
      out = "delayed:" + format_duration(q.timeliness.delay_us);
      break;
    case Timeliness::Mode::IntraDay: out = "intraday"; break;
    case Timeliness::Mode::EndOfDay: out = "endofday"; break;
  }
  out += '|';
  if (q.granularity.mode == Granularity::Mode::TickLevel)
    out += "tick";
  else
    out += "agg:" + format_duration(q.granularity.window_us);
  out += '|';
  if (q.completeness.mode == Completeness::Mode::Full) {
    out += "full";
  } else {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "throttled:%g", q.completeness.max_rate_per_sec);
    out += buf;
  }
  return out;
}

std::optional<QoISpec> parse_qoi(const std::string& text) {
  const auto parts = split(text, '|');
  if (parts.size() != 3) return std::nullopt;
  QoISpec q;
  const std::string& t = parts[0];
  try {
    if (t == "realtime") {
      q.timeliness = Timeliness::real_time();
    } else if (t.rfind("delayed:", 0) == 0) {
      q.timeliness = Timeliness::delayed(parse_duration(t.substr(8)));
    } else if (t == "intraday") {
      q.timeliness = Timeliness::intra_day();
    } else if (t == "endofday") {
      q.timeliness = Timeliness::end_of_day();
    } else {
      return std::nullopt;
    }
    const std::string& g = parts[1];
    if (g == "tick") {
      q.granularity = Granularity::tick_level();
    } else if (g.rfind("agg:", 0) == 0) {
      q.granularity = Granularity::aggregated(parse_duration(g.substr(4)));
    } else {
      return std::nullopt;
    }
    const std::string& c = parts[2];
    if (c == "full") {
      q.completeness = Completeness::full();
    } else if (c.rfind("throttled:", 0) == 0) {
      q.completeness = Completeness::throttled(std::stod(c.substr(10)));
    } else {
      return std::nullopt;
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (!q.valid()) return std::nullopt;
  return q;
}

}  // namespace tp
