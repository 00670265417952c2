#!/usr/bin/env python3
"""Regenerates dissector_100.pcap and dissector_100.expected.json.

Frames are assembled byte by byte here; scapy is used only to dissect them,
so the expectations come from an independent 802.11 implementation.

    pip install scapy
    python3 gen_dissector_fixture.py
"""

import json
import random
import struct
import zlib
from pathlib import Path

from scapy.layers.dot11 import Dot11, Dot11FCS, RadioTap
from scapy.utils import RawPcapReader

HERE = Path(__file__).resolve().parent
PCAP = HERE / "dissector_100.pcap"
EXPECTED = HERE / "dissector_100.expected.json"

rng = random.Random(0x5717)


def mac(first=None, group=False, local=False):
    b = [rng.randrange(256) for _ in range(6)]
    if first is not None:
        b[0] = first
    b[0] &= 0xFC
    if group:
        b[0] |= 0x01
    if local:
        b[0] |= 0x02
    return bytes(b)


BROADCAST = b"\xff" * 6


def fc(ftype, subtype, flags=0):
    return bytes([(subtype << 4) | (ftype << 2), flags])


def seqctl():
    return struct.pack("<H", rng.randrange(4096) << 4)


def ies():
    out = b"\x00\x00"
    out += b"\x01\x04\x82\x84\x8b\x96"
    out += b"\x03\x01" + bytes([rng.randrange(1, 14)])
    if rng.random() < 0.5:
        out += b"\x2d\x1a" + bytes(rng.randrange(256) for _ in range(26))
    if rng.random() < 0.5:
        out += b"\xdd\x07\x00\x50\xf2\x08\x00\x10\x00"
    return out


def probe_request():
    local = rng.random() < 0.5
    return fc(0, 4) + b"\x00\x00" + BROADCAST + mac(local=local) + BROADCAST + seqctl() + ies()


def management(subtype):
    bssid = mac()
    body = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 40)))
    return fc(0, subtype) + b"\x3a\x01" + mac() + bssid + bssid + seqctl() + body


def data(subtype, to_ds, from_ds, group_a1=False):
    flags = (0x01 if to_ds else 0) | (0x02 if from_ds else 0)
    a1 = BROADCAST if group_a1 else mac(group=False)
    hdr = fc(2, subtype, flags) + b"\x2c\x00" + a1 + mac() + mac() + seqctl()
    if to_ds and from_ds:
        hdr += mac()
    if subtype & 0x08:
        hdr += struct.pack("<H", rng.randrange(8))
    payload = b"" if subtype in (4, 12) else b"\xaa\xaa\x03\x00\x00\x00\x08\x00" + bytes(
        rng.randrange(256) for _ in range(rng.randrange(0, 60))
    )
    return hdr + payload


def control(subtype):
    dur = struct.pack("<H", rng.randrange(32768))
    if subtype in (12, 13):  # CTS, ACK
        return fc(1, subtype) + dur + mac()
    if subtype == 11:  # RTS
        return fc(1, subtype) + dur + mac() + mac()
    if subtype == 8:  # BlockAckReq
        return fc(1, subtype) + dur + mac() + mac() + b"\x04\x00" + seqctl()
    if subtype == 9:  # BlockAck
        return fc(1, subtype) + dur + mac() + mac() + b"\x05\x00" + seqctl() + bytes(8)
    if subtype == 10:  # PS-Poll
        return fc(1, subtype) + struct.pack("<H", 0xC000 | rng.randrange(2008)) + mac() + mac()
    raise ValueError(subtype)


def radiotap(frame, with_fcs):
    # present: Flags(1) | Rate(2) | Channel(3) | dBm signal(5), optionally TSFT(0)
    tsft = rng.random() < 0.5
    present = (1 << 1) | (1 << 2) | (1 << 3) | (1 << 5) | (1 if tsft else 0)
    fields = b""
    if tsft:
        # The 8-byte header leaves TSFT naturally aligned.
        fields += struct.pack("<Q", rng.randrange(1 << 40))
    flags = 0x10 if with_fcs else 0x00
    fields += bytes([flags, rng.choice([2, 4, 11, 22, 12, 108])])
    fields += struct.pack("<HH", rng.choice([2412, 2437, 2462, 5180]), 0x00A0)
    fields += struct.pack("<b", -rng.randrange(30, 90))
    header_len = 8 + len(fields)
    hdr = struct.pack("<BBHI", 0, 0, header_len, present) + fields
    body = frame + (struct.pack("<I", zlib.crc32(frame) & 0xFFFFFFFF) if with_fcs else b"")
    return hdr + body


def build_frames():
    makers = []
    makers += [probe_request] * 30
    for sub in (0, 1, 5, 8, 10, 11, 12, 13):
        makers += [lambda s=sub: management(s)] * 2
    for to_ds, from_ds in ((1, 0), (0, 1), (0, 0), (1, 1)):
        for sub in (0, 8, 4):
            makers.append(lambda t=to_ds, f=from_ds, s=sub: data(s, t, f))
            makers.append(lambda t=to_ds, f=from_ds, s=sub: data(s, t, f))
    makers += [lambda: data(0, 0, 1, group_a1=True)] * 2
    for sub in (8, 9, 10, 11, 12, 13):
        makers += [lambda s=sub: control(s)] * 2
    assert len(makers) == 30 + 16 + 24 + 2 + 12, len(makers)
    makers += [probe_request] * (100 - len(makers))
    rng.shuffle(makers)
    return [m() for m in makers]


def write_pcap(packets):
    with open(PCAP, "wb") as f:
        f.write(struct.pack("<IHHiIII", 0xA1B2C3D4, 2, 4, 0, 0, 65535, 127))
        ts = 1_700_000_000
        for i, p in enumerate(packets):
            f.write(struct.pack("<IIII", ts + i, (i * 7919) % 1_000_000, len(p), len(p)))
            f.write(p)


def fmt(addr):
    return None if addr is None else addr.lower()


def expected_entry(index, raw):
    rt = RadioTap(raw)
    dot = rt.getlayer(Dot11FCS) or rt.getlayer(Dot11)
    to_ds = bool(dot.FCfield & 0x1)
    from_ds = bool(dot.FCfield & 0x2)
    if dot.type == 0 and dot.subtype == 4:
        kind = "probe_request"
    elif dot.type == 2:
        kind = "data"
    else:
        kind = "other"
    # Station address of a data frame, from the DS bits of the dissected frame.
    ue = None
    if kind == "data" and to_ds != from_ds:
        ue = fmt(dot.addr2 if to_ds else dot.addr1)
        if int(ue[:2], 16) & 0x01:
            ue = None
    return {
        "index": index,
        "fcs": rt.getlayer(Dot11FCS) is not None,
        "type": int(dot.type),
        "subtype": int(dot.subtype),
        "to_ds": to_ds,
        "from_ds": from_ds,
        "kind": kind,
        "addr1": fmt(dot.addr1),
        "addr2": fmt(dot.addr2),
        "addr3": fmt(dot.addr3),
        "addr4": fmt(dot.addr4),
        "ue": ue,
    }


def main():
    frames = build_frames()
    packets = [radiotap(fr, with_fcs=(i % 3 == 0)) for i, fr in enumerate(frames)]
    write_pcap(packets)
    entries = [expected_entry(i, raw) for i, (raw, _meta) in enumerate(RawPcapReader(str(PCAP)))]
    EXPECTED.write_text(json.dumps({"frames": entries}, indent=1) + "\n")
    print(f"wrote {len(entries)} frames")


if __name__ == "__main__":
    main()
