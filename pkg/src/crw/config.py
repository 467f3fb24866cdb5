"""JSON cluster configuration and tabular output.

A configuration document looks like::

    {
      "omega": 5.0,
      "hopping": 1.0,
      "topology": {"type": "identical_parallel"},
      "copies": 30,
      "channels": [[{"emitter": {"omega0": 2.0, "g": 1.0}}, {"epsilon": 5.0}]]
    }

Unknown keys are rejected everywhere so that a misspelt parameter never
silently falls back to its default.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from .cluster import ClusterSpec, IdenticalParallel, Parallel, Serial, Violation, errors
from .core import CavitySite, Emitter, LatticeParams

TOPOLOGIES = ("serial", "parallel", "identical_parallel")
_TOP_KEYS = {"omega", "hopping", "topology", "channels", "copies"}
_SITE_KEYS = {"epsilon", "emitter"}
_EMITTER_KEYS = {"omega0", "g"}


class ConfigError(Exception):
    pass


class ParseError(ConfigError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ValidationError(ConfigError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))

    @property
    def paths(self) -> list[str]:
        return [v.path for v in self.violations]


def _check_keys(obj: Any, allowed: set[str], path: str) -> dict:
    if not isinstance(obj, dict):
        raise ParseError(path or "<root>", "expected an object")
    for key in obj:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise ParseError(where, f"unknown key {key!r}")
    return obj


def _number(obj: dict, key: str, path: str, default: Optional[float] = None) -> float:
    where = f"{path}.{key}" if path else key
    if key not in obj:
        if default is None:
            raise ParseError(where, "required key missing")
        return default
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(where, f"expected a number, got {type(value).__name__}")
    return float(value)


def _site(obj: Any, path: str) -> CavitySite:
    _check_keys(obj, _SITE_KEYS, path)
    epsilon = _number(obj, "epsilon", path) if "epsilon" in obj else None
    emitter = None
    if "emitter" in obj:
        epath = f"{path}.emitter"
        em = _check_keys(obj["emitter"], _EMITTER_KEYS, epath)
        emitter = Emitter(_number(em, "omega0", epath), _number(em, "g", epath))
    return CavitySite(epsilon, emitter)


def parse_config(doc: Any) -> ClusterSpec:
    """Turn a decoded JSON document into a validated :class:`ClusterSpec`."""
    _check_keys(doc, _TOP_KEYS, "")
    omega = _number(doc, "omega", "")
    hopping = _number(doc, "hopping", "", default=1.0)

    if "topology" not in doc:
        raise ParseError("topology", "required key missing")
    top = _check_keys(doc["topology"], {"type"}, "topology")
    kind = top.get("type")
    if kind not in TOPOLOGIES:
        raise ParseError("topology.type", f"expected one of {', '.join(TOPOLOGIES)}, got {kind!r}")

    if "channels" not in doc:
        raise ParseError("channels", "required key missing")
    raw = doc["channels"]
    if not isinstance(raw, list):
        raise ParseError("channels", "expected an array of channels")
    channels = []
    for i, ch in enumerate(raw):
        if not isinstance(ch, list):
            raise ParseError(f"channels[{i}]", "expected an array of sites")
        channels.append(tuple(_site(s, f"channels[{i}][{j}]") for j, s in enumerate(ch)))

    if kind == "identical_parallel":
        if "copies" not in doc:
            raise ParseError("copies", "required for identical_parallel")
        copies = doc["copies"]
        if isinstance(copies, bool) or not isinstance(copies, int):
            raise ParseError("copies", "expected an integer")
    elif "copies" in doc:
        raise ParseError("copies", f"only allowed for identical_parallel, not {kind}")

    if kind != "parallel" and len(channels) != 1:
        raise ValidationError([Violation("channels", f"{kind} topology needs exactly one channel, got {len(channels)}")])
    if hopping <= 0 or not math.isfinite(hopping):
        raise ValidationError([Violation("hopping", "must be finite and > 0")])

    params = LatticeParams(omega, hopping)
    if kind == "serial":
        topology = Serial(channels[0])
    elif kind == "identical_parallel":
        topology = IdenticalParallel(copies, channels[0])
    else:
        topology = Parallel(tuple(channels))
    cluster = ClusterSpec(params, topology)
    problems = errors(cluster)
    if problems:
        raise ValidationError(problems)
    return cluster


def load_config(path) -> ClusterSpec:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("", f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_config(doc)


def _site_doc(site: CavitySite) -> dict:
    out: dict[str, Any] = {}
    if site.epsilon is not None:
        if isinstance(site.epsilon, complex):
            if site.epsilon.imag:
                raise ValueError("complex site energies cannot be written to a configuration document")
            out["epsilon"] = site.epsilon.real
        else:
            out["epsilon"] = float(site.epsilon)
    if site.emitter is not None:
        out["emitter"] = {"omega0": float(site.emitter.transition_frequency), "g": float(site.emitter.coupling)}
    return out


def dump_config(cluster: ClusterSpec) -> dict:
    """Inverse of :func:`parse_config`."""
    top = cluster.topology
    doc: dict[str, Any] = {"omega": float(cluster.params.omega), "hopping": float(cluster.params.hopping)}
    if isinstance(top, Serial):
        doc["topology"] = {"type": "serial"}
    elif isinstance(top, IdenticalParallel):
        doc["topology"] = {"type": "identical_parallel"}
        doc["copies"] = top.copies
    else:
        doc["topology"] = {"type": "parallel"}
    doc["channels"] = [[_site_doc(s) for s in ch] for ch in cluster.base_channels]
    return doc


def save_config(cluster: ClusterSpec, path) -> None:
    Path(path).write_text(json.dumps(dump_config(cluster), indent=2) + "\n", encoding="utf-8")


def fmt(x: Optional[float]) -> str:
    """17 significant digits, locale independent; ``None`` becomes an empty field."""
    if x is None:
        return ""
    return format(float(x), ".17g")


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Optional[float]]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def write_json_lines(header: Sequence[str], rows: Iterable[Sequence[Optional[float]]]) -> str:
    lines = []
    for row in rows:
        fields = ", ".join(f'"{h}": {fmt(x) if x is not None else "null"}' for h, x in zip(header, row))
        lines.append("{" + fields + "}")
    return "".join(line + "\n" for line in lines)
