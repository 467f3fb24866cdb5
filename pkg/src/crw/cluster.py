"""Two-terminal cluster topologies and their builders."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from .core import CavitySite, Emitter, LatticeParams

Channel = tuple[CavitySite, ...]


@dataclass(frozen=True)
class Serial:
    channel: Channel


@dataclass(frozen=True)
class Parallel:
    channels: tuple[Channel, ...]


@dataclass(frozen=True)
class IdenticalParallel:
    copies: int
    channel: Channel


Topology = Union[Serial, Parallel, IdenticalParallel]


@dataclass(frozen=True)
class ClusterSpec:
    params: LatticeParams
    topology: Topology

    @property
    def base_channels(self) -> tuple[Channel, ...]:
        """Channels as written, one entry for an identical bundle."""
        top = self.topology
        if isinstance(top, Parallel):
            return top.channels
        return (top.channel,)

    @property
    def channels(self) -> tuple[Channel, ...]:
        """Every physical channel, with identical copies expanded."""
        top = self.topology
        if isinstance(top, IdenticalParallel):
            return (top.channel,) * top.copies
        return self.base_channels

    @property
    def site_count(self) -> int:
        return sum(len(ch) for ch in self.channels)

    @property
    def emitters(self) -> list[Emitter]:
        """Emitters in channel-major order over :attr:`base_channels`."""
        return [s.emitter for ch in self.base_channels for s in ch if s.emitter is not None]

    @property
    def hermitian(self) -> bool:
        return all(s.hermitian for ch in self.base_channels for s in ch)


@dataclass(frozen=True)
class AtomPattern:
    sequence: str
    atom_a: Emitter
    atom_b: Emitter


@dataclass(frozen=True)
class Violation:
    path: str
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


def _channel(sites: Sequence[CavitySite]) -> Channel:
    return tuple(sites)


def build_identical_chain(n: int, emitter: Emitter, params: LatticeParams) -> ClusterSpec:
    if n < 1:
        raise ValueError(f"chain length must be >= 1, got {n}")
    return ClusterSpec(params, Serial((CavitySite(emitter=emitter),) * n))


def build_pattern_chain(pattern: AtomPattern, params: LatticeParams) -> ClusterSpec:
    """Serial chain carrying ``atom_a`` on each ``A`` and ``atom_b`` on each ``B``."""
    seq = pattern.sequence
    if not seq:
        raise ValueError("pattern sequence must be nonempty")
    bad = sorted(set(seq) - {"A", "B"})
    if bad:
        raise ValueError(f"pattern may only contain 'A' and 'B', found {bad}")
    atoms = {"A": pattern.atom_a, "B": pattern.atom_b}
    return ClusterSpec(params, Serial(tuple(CavitySite(emitter=atoms[c]) for c in seq)))


def build_ring(upper: Sequence[CavitySite], lower: Sequence[CavitySite], params: LatticeParams) -> ClusterSpec:
    if not upper or not lower:
        raise ValueError("both ring arms need at least one site")
    return ClusterSpec(params, Parallel((_channel(upper), _channel(lower))))


def build_parallel(channels: Sequence[Sequence[CavitySite]], params: LatticeParams) -> ClusterSpec:
    return ClusterSpec(params, Parallel(tuple(_channel(ch) for ch in channels)))


def build_identical_parallel(copies: int, channel: Sequence[CavitySite], params: LatticeParams) -> ClusterSpec:
    return ClusterSpec(params, IdenticalParallel(copies, _channel(channel)))


def _finite(x) -> bool:
    return math.isfinite(x.real) and math.isfinite(x.imag) if isinstance(x, complex) else math.isfinite(x)


def validate(cluster: ClusterSpec) -> list[Violation]:
    """Everything wrong with ``cluster``; an empty list means it can be evaluated.

    Complex site energies are reported with severity ``"warning"``: they are
    accepted, but flux conservation no longer applies.
    """
    out: list[Violation] = []
    p = cluster.params
    if not _finite(p.omega):
        out.append(Violation("omega", "must be finite"))
    if not (_finite(p.hopping) and p.hopping > 0):
        out.append(Violation("hopping", "must be finite and > 0"))

    top = cluster.topology
    if isinstance(top, IdenticalParallel) and top.copies < 1:
        out.append(Violation("copies", "copies must be ≥ 1"))
    if isinstance(top, Parallel) and not top.channels:
        out.append(Violation("channels", "at least one channel is required"))

    for i, ch in enumerate(cluster.base_channels):
        if not ch:
            out.append(Violation(f"channels[{i}]", "channel must contain at least one site"))
        for j, site in enumerate(ch):
            path = f"channels[{i}][{j}]"
            if site.epsilon is not None:
                if not _finite(site.epsilon):
                    out.append(Violation(f"{path}.epsilon", "must be finite"))
                elif not site.hermitian:
                    out.append(Violation(f"{path}.epsilon", "complex site energy: non-Hermitian", "warning"))
            em = site.emitter
            if em is None:
                continue
            if not _finite(em.transition_frequency):
                out.append(Violation(f"{path}.emitter.omega0", "must be finite"))
            if not _finite(em.coupling):
                out.append(Violation(f"{path}.emitter.g", "must be finite"))
            elif em.coupling < 0:
                out.append(Violation(f"{path}.emitter.g", "coupling must be ≥ 0"))
    return out


def errors(cluster: ClusterSpec) -> list[Violation]:
    return [v for v in validate(cluster) if v.severity == "error"]
