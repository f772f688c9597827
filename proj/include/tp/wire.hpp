#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tp/notification.hpp"

namespace tp {

// VFB1 binary frame, big-endian throughout:
//   magic 0x56 0x46 | version 0x01 | kind u8 | channel u8 | seq u32 |
//   symbol_len u8 | symbol | mic 4 | publish_ts u64 | payload_len u16 | payload
// Tick payload: exchange_ts u64 | bid i64 | ask i64 | bid_size u32 |
//   ask_size u32 | flags u8, zero-padded up to payload_len.
// The frame does not carry the feed id; it is supplied by the ingest
// context (one feed per stream).

struct WireError : std::runtime_error {
  enum class Code {
    BadMagic,
    UnsupportedVersion,
    TruncatedFrame,
    UnknownKindCode,
    UnencodableSize,
    MalformedRecord,
  };
  Code code;
  std::string field;  // MalformedRecord: offending field name

  WireError(Code c, const std::string& what, std::string f = {})
      : std::runtime_error(what), code(c), field(std::move(f)) {}
};

struct ParsedFrame {
  Notification notification;
  std::size_t consumed{0};
};

ParsedFrame parse_vfb_frame(std::span<const std::uint8_t> bytes,
                            const std::string& feed_id);

std::vector<std::uint8_t> encode_vfb_frame(const Notification& n);
void append_vfb_frame(const Notification& n, std::vector<std::uint8_t>& out);

// Text record, one per line:
//   kind|feed|channel|seq|publish_ts|symbol|mic|bid|ask|bid_size|ask_size|flags[|body_hex]
// Ticks fill the four numeric columns and flags (subset of "OCHX");
// other kinds leave them empty and carry the payload hex in the trailing
// column. '\' escapes '|' and '\' inside feed and symbol. The text path
// does not carry exchange_ts (publish_ts is used) or padding, so a parsed
// record equals the minimal binary frame for the same logical event.
Notification parse_text_record(const std::string& line);
std::string format_text_record(const Notification& n);

// Whole-stream helpers: a .vfb file is a plain concatenation of frames
// belonging to one feed.
std::vector<Notification> read_vfb_stream(std::istream& in, const std::string& feed_id);
void write_vfb_stream(std::ostream& out, const std::vector<Notification>& ns);

}  // namespace tp
