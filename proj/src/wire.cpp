#include "tp/wire.hpp"

#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>

#include "tp/prices.hpp"

namespace tp {

namespace {

constexpr std::uint8_t kMagic0 = 0x56;
constexpr std::uint8_t kMagic1 = 0x46;
constexpr std::uint8_t kVersion = 0x01;
constexpr std::size_t kTickPayloadSize = 33;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8)
    out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8)
    out.push_back(static_cast<std::uint8_t>(v >> shift));
}

struct Reader {
  std::span<const std::uint8_t> buf;
  std::size_t pos{0};

  void need(std::size_t n) const {
    if (pos + n > buf.size())
      throw WireError(WireError::Code::TruncatedFrame, "truncated frame");
  }
  std::uint8_t u8() {
    need(1);
    return buf[pos++];
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = (std::uint16_t(buf[pos]) << 8) | buf[pos + 1];
    pos += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | buf[pos + i];
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | buf[pos + i];
    pos += 8;
    return v;
  }
  std::string ascii(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(buf.data() + pos), n);
    pos += n;
    return s;
  }
};

}  // namespace

ParsedFrame parse_vfb_frame(std::span<const std::uint8_t> bytes,
                            const std::string& feed_id) {
  Reader r{bytes};
  r.need(3);
  if (bytes[0] != kMagic0 || bytes[1] != kMagic1)
    throw WireError(WireError::Code::BadMagic, "bad magic");
  r.pos = 2;
  const std::uint8_t version = r.u8();
  if (version != kVersion)
    throw WireError(WireError::Code::UnsupportedVersion,
                    "unsupported version " + std::to_string(version));
  const std::uint8_t kind_code = r.u8();
  if (kind_code < 1 || kind_code > 4)
    throw WireError(WireError::Code::UnknownKindCode,
                    "unknown kind code " + std::to_string(kind_code));
  Notification n;
  n.feed_id = feed_id;
  n.kind = static_cast<NotificationKind>(kind_code);
  n.channel_id = r.u8();
  n.seq_no = r.u32();
  const std::uint8_t symbol_len = r.u8();
  if (symbol_len == 0)
    throw WireError(WireError::Code::TruncatedFrame, "empty symbol");
  const std::string local = r.ascii(symbol_len);
  const std::string mic = r.ascii(4);
  try {
    n.symbol = SymbolRef::of(local, mic);
  } catch (const std::invalid_argument& e) {
    throw WireError(WireError::Code::MalformedRecord, e.what(), "symbol");
  }
  n.publish_ts = VirtualTime{static_cast<std::int64_t>(r.u64())};
  const std::uint16_t payload_len = r.u16();
  r.need(payload_len);
  if (n.kind == NotificationKind::Tick) {
    if (payload_len < kTickPayloadSize)
      throw WireError(WireError::Code::TruncatedFrame, "tick payload too short");
    n.tick.exchange_ts = VirtualTime{static_cast<std::int64_t>(r.u64())};
    n.tick.bid = static_cast<std::int64_t>(r.u64());
    n.tick.ask = static_cast<std::int64_t>(r.u64());
    n.tick.bid_size = r.u32();
    n.tick.ask_size = r.u32();
    n.tick.flags.bits = r.u8();
    r.pos += payload_len - kTickPayloadSize;  // zero padding
  } else {
    n.body.assign(bytes.begin() + r.pos, bytes.begin() + r.pos + payload_len);
    r.pos += payload_len;
  }
  n.wire_size = static_cast<std::uint32_t>(r.pos);
  return ParsedFrame{std::move(n), r.pos};
}

void append_vfb_frame(const Notification& n, std::vector<std::uint8_t>& out) {
  const std::size_t sym_len = n.symbol.local_symbol.size();
  if (sym_len == 0 || sym_len > 255)
    throw std::invalid_argument("symbol length out of range");
  const std::uint32_t head = 24 + static_cast<std::uint32_t>(sym_len);
  std::size_t payload_len = 0;
  if (n.kind == NotificationKind::Tick) {
    if (n.wire_size < head + kTickPayloadSize)
      throw WireError(WireError::Code::UnencodableSize,
                      "wire_size below minimal tick frame");
    payload_len = n.wire_size - head;
  } else {
    payload_len = n.body.size();
    if (n.wire_size != head + payload_len)
      throw std::invalid_argument("wire_size inconsistent with body length");
  }
  if (payload_len > 0xffff)
    throw WireError(WireError::Code::UnencodableSize,
                    "payload exceeds 16-bit length field");
  out.push_back(kMagic0);
  out.push_back(kMagic1);
  out.push_back(kVersion);
  out.push_back(static_cast<std::uint8_t>(n.kind));
  out.push_back(n.channel_id);
  put_u32(out, n.seq_no);
  out.push_back(static_cast<std::uint8_t>(sym_len));
  out.insert(out.end(), n.symbol.local_symbol.begin(), n.symbol.local_symbol.end());
  out.insert(out.end(), n.symbol.mic.code.begin(), n.symbol.mic.code.end());
  put_u64(out, static_cast<std::uint64_t>(n.publish_ts.us));
  put_u16(out, static_cast<std::uint16_t>(payload_len));
  if (n.kind == NotificationKind::Tick) {
    put_u64(out, static_cast<std::uint64_t>(n.tick.exchange_ts.us));
    put_u64(out, static_cast<std::uint64_t>(n.tick.bid));
    put_u64(out, static_cast<std::uint64_t>(n.tick.ask));
    put_u32(out, n.tick.bid_size);
    put_u32(out, n.tick.ask_size);
    out.push_back(n.tick.flags.bits);
    out.insert(out.end(), payload_len - kTickPayloadSize, 0);
  } else {
    out.insert(out.end(), n.body.begin(), n.body.end());
  }
}

std::vector<std::uint8_t> encode_vfb_frame(const Notification& n) {
  std::vector<std::uint8_t> out;
  append_vfb_frame(n, out);
  return out;
}

namespace {

std::string escape_field(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

// Splits on unescaped '|', unescaping as it goes.
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> cols;
  std::string cur;
  bool esc = false;
  for (char c : line) {
    if (esc) {
      cur.push_back(c);
      esc = false;
    } else if (c == '\\') {
      esc = true;
    } else if (c == '|') {
      cols.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cols.push_back(cur);
  return cols;
}

std::string flags_to_text(TickFlags f) {
  std::string out;
  if (f.open()) out.push_back('O');
  if (f.close()) out.push_back('C');
  if (f.day_high_reset()) out.push_back('H');
  if (f.crossed()) out.push_back('X');
  return out;
}

TickFlags flags_from_text(const std::string& s) {
  TickFlags f;
  for (char c : s) {
    switch (c) {
      case 'O': f.bits |= TickFlags::kOpen; break;
      case 'C': f.bits |= TickFlags::kClose; break;
      case 'H': f.bits |= TickFlags::kDayHighReset; break;
      case 'X': f.bits |= TickFlags::kCrossed; break;
      default:
        throw WireError(WireError::Code::MalformedRecord,
                        "unknown flag letter", "flags");
    }
  }
  return f;
}

std::int64_t parse_int(const std::string& s, const char* field, bool allow_negative) {
  if (s.empty())
    throw WireError(WireError::Code::MalformedRecord, "empty field", field);
  std::size_t pos = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw WireError(WireError::Code::MalformedRecord, "not a number: " + s, field);
  }
  if (pos != s.size())
    throw WireError(WireError::Code::MalformedRecord, "trailing junk: " + s, field);
  if (!allow_negative && v < 0)
    throw WireError(WireError::Code::MalformedRecord, "negative: " + s, field);
  return v;
}

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Notification parse_text_record(const std::string& line) {
  const auto cols = split_record(line);
  if (line.empty() || cols.size() < 12 || cols.size() > 13)
    throw WireError(WireError::Code::MalformedRecord,
                    "expected 12 or 13 columns", "record");
  const auto kind = kind_from_name(cols[0]);
  if (!kind)
    throw WireError(WireError::Code::UnknownKindCode, "unknown kind: " + cols[0]);
  Notification n;
  n.kind = *kind;
  n.feed_id = cols[1];
  if (n.feed_id.empty())
    throw WireError(WireError::Code::MalformedRecord, "empty feed", "feed");
  const auto channel = parse_int(cols[2], "channel", false);
  if (channel > 255)
    throw WireError(WireError::Code::MalformedRecord, "channel > 255", "channel");
  n.channel_id = static_cast<std::uint8_t>(channel);
  n.seq_no = static_cast<std::uint32_t>(parse_int(cols[3], "seq", false));
  n.publish_ts = VirtualTime{parse_int(cols[4], "publish_ts", false)};
  try {
    n.symbol = SymbolRef::of(cols[5], cols[6]);
  } catch (const std::invalid_argument& e) {
    throw WireError(WireError::Code::MalformedRecord, e.what(), "symbol");
  }
  if (n.kind == NotificationKind::Tick) {
    const auto bid = parse_price4(cols[7]);
    if (!bid)
      throw WireError(WireError::Code::MalformedRecord, "bad price: " + cols[7], "bid");
    const auto ask = parse_price4(cols[8]);
    if (!ask)
      throw WireError(WireError::Code::MalformedRecord, "bad price: " + cols[8], "ask");
    n.tick.bid = *bid;
    n.tick.ask = *ask;
    const auto bid_size = parse_int(cols[9], "bid_size", false);
    const auto ask_size = parse_int(cols[10], "ask_size", false);
    if (bid_size > 0xffffffffLL)
      throw WireError(WireError::Code::MalformedRecord, "too large", "bid_size");
    if (ask_size > 0xffffffffLL)
      throw WireError(WireError::Code::MalformedRecord, "too large", "ask_size");
    n.tick.bid_size = static_cast<std::uint32_t>(bid_size);
    n.tick.ask_size = static_cast<std::uint32_t>(ask_size);
    n.tick.flags = flags_from_text(cols[11]);
    n.tick.exchange_ts = n.publish_ts;  // not carried by the text format
    if (cols.size() == 13 && !cols[12].empty())
      throw WireError(WireError::Code::MalformedRecord,
                      "tick records carry no body", "body");
  } else {
    for (std::size_t i = 7; i < 12; ++i) {
      if (!cols[i].empty())
        throw WireError(WireError::Code::MalformedRecord,
                        "tick columns must be empty for " + cols[0],
                        "payload");
    }
    if (cols.size() == 13) {
      const std::string& hex = cols[12];
      if (hex.size() % 2 != 0)
        throw WireError(WireError::Code::MalformedRecord, "odd hex length", "body");
      n.body.reserve(hex.size() / 2);
      for (std::size_t i = 0; i < hex.size(); i += 2) {
        const int hi = hex_nibble(hex[i]);
        const int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0)
          throw WireError(WireError::Code::MalformedRecord, "bad hex", "body");
        n.body.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
      }
    }
  }
  n.wire_size = minimal_wire_size(n);
  return n;
}

std::string format_text_record(const Notification& n) {
  std::string out = kind_name(n.kind);
  out += '|';
  out += escape_field(n.feed_id);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "|%u|%u|%lld|", n.channel_id, n.seq_no,
                static_cast<long long>(n.publish_ts.us));
  out += buf;
  out += escape_field(n.symbol.local_symbol);
  out += '|';
  out += n.symbol.mic.code;
  if (n.kind == NotificationKind::Tick) {
    out += '|';
    out += format_price4(n.tick.bid);
    out += '|';
    out += format_price4(n.tick.ask);
    std::snprintf(buf, sizeof(buf), "|%u|%u|", n.tick.bid_size, n.tick.ask_size);
    out += buf;
    out += flags_to_text(n.tick.flags);
  } else {
    out += "||||||";
    static const char* hex = "0123456789abcdef";
    for (std::uint8_t b : n.body) {
      out.push_back(hex[b >> 4]);
      out.push_back(hex[b & 0xf]);
    }
  }
  return out;
}

std::vector<Notification> read_vfb_stream(std::istream& in, const std::string& feed_id) {
  std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  std::vector<Notification> out;
  std::size_t pos = 0;
  while (pos < buf.size()) {
    auto frame = parse_vfb_frame(std::span(buf).subspan(pos), feed_id);
    pos += frame.consumed;
    out.push_back(std::move(frame.notification));
  }
  return out;
}

void write_vfb_stream(std::ostream& out, const std::vector<Notification>& ns) {
  std::vector<std::uint8_t> buf;
  for (const auto& n : ns) {
    buf.clear();
    append_vfb_frame(n, buf);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
  }
}

}  // namespace tp
