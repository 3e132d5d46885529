"""JSON records for channel instances and solve results.

Channel record::

    {"N": 2, "h0": [re, im], "h": [[re, im], [re, im]]}

``N`` is optional; when present it must match the length of ``h``.  A
multi-user record is ``{"users": [<channel record>, ...], "noise_dbm": -90}``.
"""
from __future__ import annotations

import json
from pathlib import Path

from .phase import ChannelInstance, PhaseConfig, as_resolution
from .solvers import SolveResult


class RecordFormatError(ValueError):
    pass


def _pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _complex(v, where: str) -> complex:
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise RecordFormatError(f"{where}: expected [re, im], got {v!r}")
    try:
        return complex(float(v[0]), float(v[1]))
    except (TypeError, ValueError) as e:
        raise RecordFormatError(f"{where}: {e}") from None


def _line_of(text: str, key: str) -> int:
    for i, line in enumerate(text.splitlines(), 1):
        if f'"{key}"' in line:
            return i
    return 1


def channel_to_record(ch: ChannelInstance) -> dict:
    return {"N": ch.N, "h0": _pair(ch.h0), "h": [_pair(z) for z in ch.h]}


def channel_from_record(rec: dict, text: str = "", source: str = "<record>") -> ChannelInstance:
    if not isinstance(rec, dict) or "h" not in rec:
        raise RecordFormatError(f"{source}:1: channel record needs an 'h' list")
    h = [_complex(v, f"{source}:{_line_of(text, 'h')}: h[{i}]") for i, v in enumerate(rec["h"])]
    h0 = _complex(rec.get("h0", [0.0, 0.0]), f"{source}:{_line_of(text, 'h0')}: h0")
    if "N" in rec and int(rec["N"]) != len(h):
        raise RecordFormatError(
            f"{source}:{_line_of(text, 'N')}: header declares N={rec['N']} but h has {len(h)} entries")
    return ChannelInstance(h0, h)


def parse_json(text: str, source: str = "<string>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise RecordFormatError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None


def load_channel(path) -> ChannelInstance:
    text = Path(path).read_text()
    return channel_from_record(parse_json(text, str(path)), text, str(path))


def dump_channel(ch: ChannelInstance, path) -> None:
    Path(path).write_text(json.dumps(channel_to_record(ch), indent=1) + "\n")


def load_users(path):
    from .multicast import MulticastInstance

    text = Path(path).read_text()
    rec = parse_json(text, str(path))
    if "users" not in rec:
        raise RecordFormatError(f"{path}:1: multi-user record needs a 'users' list")
    users = [channel_from_record(u, text, str(path)) for u in rec["users"]]
    return MulticastInstance(users, rec.get("noise_dbm", -90.0))


def result_to_record(res: SolveResult) -> dict:
    d = res.to_dict()
    d["g"] = _pair(res.g)
    return d


def result_from_record(d: dict) -> SolveResult:
    cfg = PhaseConfig(d["k"], as_resolution(d["K"]))
    return SolveResult(cfg, float(d["objective"]), d.get("snr_boost"), int(d["steps_executed"]),
                       int(d["best_step"]), float(d["elapsed"]), d.get("solver", ""),
                       _complex(d.get("g", [0.0, 0.0]), "g"))
