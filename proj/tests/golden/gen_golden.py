#!/usr/bin/env python3
"""Reference encoder/decoder for the VFB1 frame format and the text record
format. Regenerates the golden files in this directory:

    python3 gen_golden.py

The encoder here is written independently of the C++ codec and is the
authority for the golden bytes the unit tests assert against.
"""
import struct
from pathlib import Path

HERE = Path(__file__).resolve().parent

KINDS = {"tick": 1, "reference": 2, "statistics": 3, "news": 4}
FLAG_LETTERS = [("open", 0x01, "O"), ("close", 0x02, "C"),
                ("day_high_reset", 0x04, "H"), ("crossed", 0x08, "X")]


def encode_frame(kind, channel, seq, symbol, mic, publish_ts, *,
                 exchange_ts=None, bid=None, ask=None, bid_size=None,
                 ask_size=None, flags=0, body=b"", pad_to=None):
    head = struct.pack(">2sBBBI", b"VF", 1, KINDS[kind], channel, seq)
    head += struct.pack(">B", len(symbol)) + symbol.encode("ascii")
    head += mic.encode("ascii")
    head += struct.pack(">Q", publish_ts)
    if kind == "tick":
        payload = struct.pack(">QqqIIB", exchange_ts, bid, ask,
                              bid_size, ask_size, flags)
        if pad_to is not None:
            want = pad_to - (24 + len(symbol)) - len(payload)
            assert want >= 0
            payload += b"\x00" * want
    else:
        payload = body
    return head + struct.pack(">H", len(payload)) + payload


def decode_frame(buf, offset=0):
    magic, version, kind, channel, seq = struct.unpack_from(">2sBBBI", buf, offset)
    assert magic == b"VF" and version == 1
    pos = offset + 9
    sym_len = buf[pos]
    pos += 1
    symbol = buf[pos:pos + sym_len].decode("ascii")
    pos += sym_len
    mic = buf[pos:pos + 4].decode("ascii")
    pos += 4
    publish_ts, payload_len = struct.unpack_from(">QH", buf, pos)
    pos += 10
    payload = buf[pos:pos + payload_len]
    pos += payload_len
    rec = {"kind": kind, "channel": channel, "seq": seq, "symbol": symbol,
           "mic": mic, "publish_ts": publish_ts,
           "wire_size": pos - offset}
    if kind == KINDS["tick"]:
        (rec["exchange_ts"], rec["bid"], rec["ask"], rec["bid_size"],
         rec["ask_size"], rec["flags"]) = struct.unpack_from(">QqqIIB", payload)
    else:
        rec["body"] = payload.hex()
    return rec, pos


def fmt_price(p):
    sign = "-" if p < 0 else ""
    p = abs(p)
    whole, frac = divmod(p, 10000)
    if frac == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:04d}".rstrip("0")


def text_record(kind, feed, channel, seq, publish_ts, symbol, mic, *,
                bid=None, ask=None, bid_size=None, ask_size=None, flags=0,
                body=b""):
    def esc(s):
        return s.replace("\\", "\\\\").replace("|", "\\|")
    cols = [kind, esc(feed), str(channel), str(seq), str(publish_ts),
            esc(symbol), mic]
    if kind == "tick":
        letters = "".join(l for _, bit, l in FLAG_LETTERS if flags & bit)
        cols += [fmt_price(bid), fmt_price(ask), str(bid_size),
                 str(ask_size), letters]
    else:
        cols += ["", "", "", "", "", body.hex()]
    return "|".join(cols)


def main():
    ts = 1_600_000_000_000_000  # µs
    # The canonical single-tick frame the parser tests decode.
    aapl = encode_frame("tick", 1, 42, "AAPL", "XNAS", ts,
                        exchange_ts=ts - 250, bid=1534500, ask=1534600,
                        bid_size=100, ask_size=200, flags=0)
    (HERE / "tick_aapl.vfb").write_bytes(aapl)

    # A small mixed-kind stream, one feed, with a padded tick.
    frames = [
        aapl,
        encode_frame("tick", 1, 43, "AAPL", "XNAS", ts + 1000,
                     exchange_ts=ts + 750, bid=1534600, ask=1534700,
                     bid_size=300, ask_size=150, flags=0x08, pad_to=100),
        encode_frame("tick", 2, 7, "APC", "XFRA", ts + 2000,
                     exchange_ts=ts + 1500, bid=1301000, ask=1301500,
                     bid_size=50, ask_size=75, flags=0x01),
        encode_frame("reference", 1, 44, "AAPL", "XNAS", ts + 3000,
                     body=bytes(range(48))),
        encode_frame("statistics", 2, 8, "APC", "XFRA", ts + 4000,
                     body=b"\xde\xad\xbe\xef"),
        encode_frame("news", 3, 1, "AAPL", "XNAS", ts + 5000,
                     body=b"x" * 300),
    ]
    (HERE / "mixed.vfb").write_bytes(b"".join(frames))

    # Text-format twins of the mixed stream (exchange_ts is not carried by
    # the text format; records are equivalent to minimal frames with
    # exchange_ts == publish_ts).
    lines = [
        text_record("tick", "FEED.XNAS", 1, 42, ts, "AAPL", "XNAS",
                    bid=1534500, ask=1534600, bid_size=100, ask_size=200),
        text_record("tick", "FEED.XNAS", 1, 43, ts + 1000, "AAPL", "XNAS",
                    bid=1534600, ask=1534700, bid_size=300, ask_size=150,
                    flags=0x08),
        text_record("tick", "FEED.XFRA", 2, 7, ts + 2000, "APC", "XFRA",
                    bid=1301000, ask=1301500, bid_size=50, ask_size=75,
                    flags=0x01),
        text_record("reference", "FEED.XNAS", 1, 44, ts + 3000, "AAPL",
                    "XNAS", body=bytes(range(48))),
    ]
    (HERE / "mixed.txt").write_text("\n".join(lines) + "\n")

    # Reference decode of every golden frame, for eyeballing and freezing.
    out = []
    buf = (HERE / "mixed.vfb").read_bytes()
    pos = 0
    while pos < len(buf):
        rec, pos = decode_frame(buf, pos)
        out.append(repr(rec))
    (HERE / "mixed.decoded.txt").write_text("\n".join(out) + "\n")
    print((HERE / "tick_aapl.vfb").read_bytes().hex())


if __name__ == "__main__":
    main()
