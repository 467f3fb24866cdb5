"""Wavenumber sweeps, perfect-reflection windows and oracle cross-checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cluster import ClusterSpec, IdenticalParallel, Parallel, Serial
from .core import (
    BandEdge,
    DegenerateChannel,
    ModeContext,
    ScatteringError,
    ScatteringResult,
    dispersion,
    identical_parallel_amplitudes,
    parallel_amplitudes,
    ring_amplitudes,
    serial_amplitudes,
)
from .oracle import SingularSystem, solve_network

#: Emitters closer than this (relative) to resonance are evaluated as exact poles in sweeps.
SWEEP_POLE_RTOL = 1e-9
DEFAULT_THRESHOLD = 1 - 1e-6
CLOSED_FORM = "closed-form"
ORACLE = "oracle"


class SweepError(ScatteringError):
    """A grid point failed; ``k`` names it and ``__cause__`` holds the reason."""

    def __init__(self, k: float, cause: Exception):
        self.k = k
        super().__init__(f"evaluation failed at k={k!r}: {cause}")


def _is_ring(cluster: ClusterSpec) -> bool:
    return all(len(ch) == 1 and ch[0].epsilon is None for ch in cluster.base_channels)


def closed_form(cluster: ClusterSpec, mode: ModeContext) -> ScatteringResult:
    """Evaluate the closed form that matches the cluster's topology.

    Raises :class:`~crw.core.DegenerateChannel` when the general parallel form
    cannot be used; :func:`evaluate` catches it and falls back to the oracle.
    """
    top = cluster.topology
    if isinstance(top, Serial):
        return serial_amplitudes(top.channel, mode)
    if isinstance(top, IdenticalParallel):
        return identical_parallel_amplitudes(top.copies, top.channel, mode)
    if isinstance(top, Parallel):
        if _is_ring(cluster):
            return ring_amplitudes([ch[0].emitter for ch in top.channels], mode)
        first = top.channels[0]
        if all(ch == first for ch in top.channels[1:]):
            return identical_parallel_amplitudes(len(top.channels), first, mode)
        return parallel_amplitudes(top.channels, mode)
    raise TypeError(f"unknown topology {type(top).__name__}")


def evaluate(cluster: ClusterSpec, mode: ModeContext) -> tuple[ScatteringResult, str]:
    """Closed-form amplitudes, or the oracle when a channel is degenerate."""
    try:
        return closed_form(cluster, mode), CLOSED_FORM
    except DegenerateChannel:
        sol = solve_network(cluster, mode)
        return ScatteringResult(sol.r, sol.t_N, cluster.hermitian), ORACLE


def oracle_result(cluster: ClusterSpec, mode: ModeContext) -> ScatteringResult:
    sol = solve_network(cluster, mode)
    return ScatteringResult(sol.r, sol.t_N, cluster.hermitian)


@dataclass(frozen=True)
class SweepSpec:
    cluster: ClusterSpec
    k_min: float
    k_max: float
    points: int
    reference_emitter: Optional[int] = None

    def __post_init__(self):
        for k in (self.k_min, self.k_max):
            if not (0.0 < k < math.pi):
                raise BandEdge(k)
        if not self.k_min < self.k_max:
            raise ValueError(f"k_min={self.k_min!r} must be below k_max={self.k_max!r}")
        if self.points < 2:
            raise ValueError(f"points must be >= 2, got {self.points}")
        if self.reference_emitter is not None:
            n = len(self.cluster.emitters)
            if not 0 <= self.reference_emitter < n:
                raise ValueError(f"reference_emitter {self.reference_emitter} out of range; cluster has {n} emitters")

    def grid(self) -> np.ndarray:
        return np.linspace(self.k_min, self.k_max, self.points)


@dataclass(frozen=True)
class SpectrumRow:
    k: float
    energy: float
    detuning: Optional[float]
    R: float
    T: float
    method: str
    r: complex
    t_N: complex


@dataclass(frozen=True)
class SpectrumRecord:
    rows: tuple[SpectrumRow, ...]

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def k(self) -> np.ndarray:
        return np.array([row.k for row in self.rows])

    @property
    def R(self) -> np.ndarray:
        return np.array([row.R for row in self.rows])

    @property
    def T(self) -> np.ndarray:
        return np.array([row.T for row in self.rows])


@dataclass(frozen=True)
class ReflectionWindow:
    k_lo: float
    k_hi: float
    max_R: float
    slope_lo: float
    slope_hi: float

    @property
    def width(self) -> float:
        return self.k_hi - self.k_lo

    def contains(self, k: float) -> bool:
        return self.k_lo <= k <= self.k_hi


def sweep_k(spec: SweepSpec, method: str = CLOSED_FORM) -> SpectrumRecord:
    """Evaluate ``R`` and ``T`` on the uniform grid of ``spec``.

    ``method="oracle"`` solves the full network at every point instead of
    using the closed forms.
    """
    if method not in (CLOSED_FORM, ORACLE):
        raise ValueError(f"unknown method {method!r}")
    cluster = spec.cluster
    ref = None if spec.reference_emitter is None else cluster.emitters[spec.reference_emitter]
    rows = []
    for k in spec.grid():
        k = float(k)
        try:
            mode = dispersion(k, cluster.params, pole_tol=SWEEP_POLE_RTOL)
            if method == ORACLE:
                res, tag = oracle_result(cluster, mode), ORACLE
            else:
                res, tag = evaluate(cluster, mode)
        except (ScatteringError, ZeroDivisionError) as exc:
            raise SweepError(k, exc) from exc
        detuning = None if ref is None else mode.energy - ref.transition_frequency
        rows.append(SpectrumRow(k, mode.energy, detuning, res.R, res.T, tag, res.r, res.t_N))
    return SpectrumRecord(tuple(rows))


def _crossing(k0: float, r0: float, k1: float, r1: float, level: float) -> float:
    if r1 == r0:
        return 0.5 * (k0 + k1)
    return k0 + (level - r0) * (k1 - k0) / (r1 - r0)


def _slope(k: np.ndarray, R: np.ndarray, i: int, j: int) -> float:
    return float((R[j] - R[i]) / (k[j] - k[i]))


def find_windows(record: SpectrumRecord, threshold: float = DEFAULT_THRESHOLD) -> list[ReflectionWindow]:
    """Maximal runs of rows with ``R >= threshold``.

    Edges are placed where the straight line between the bracketing rows
    crosses ``threshold``; a run touching the end of the record keeps the
    end row as its edge.  Edge slopes are forward/backward differences
    across the edge, or inside the run at a record end.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold!r}")
    if not record.rows:
        raise ValueError("record is empty")
    k, R = record.k, record.R
    n = len(k)
    above = R >= threshold
    windows = []
    i = 0
    while i < n:
        if not above[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and above[j + 1]:
            j += 1
        if i > 0:
            k_lo = _crossing(k[i - 1], R[i - 1], k[i], R[i], threshold)
            slope_lo = _slope(k, R, i - 1, i)
        else:
            k_lo = k[i]
            slope_lo = _slope(k, R, i, i + 1) if n > 1 else 0.0
        if j < n - 1:
            k_hi = _crossing(k[j], R[j], k[j + 1], R[j + 1], threshold)
            slope_hi = _slope(k, R, j, j + 1)
        else:
            k_hi = k[j]
            slope_hi = _slope(k, R, j - 1, j) if n > 1 else 0.0
        windows.append(ReflectionWindow(float(k_lo), float(k_hi), float(R[i : j + 1].max()), slope_lo, slope_hi))
        i = j + 1
    return windows


def window_measure(windows: list[ReflectionWindow]) -> float:
    return sum(w.width for w in windows)


@dataclass(frozen=True)
class VerificationReport:
    samples: int
    seed: int
    max_abs_dr: float
    max_abs_dt: float
    worst_k: Optional[float]

    def passed(self, tol: float = 1e-8) -> bool:
        return self.max_abs_dr < tol and self.max_abs_dt < tol


def _near_pole(cluster: ClusterSpec, mode: ModeContext, rtol: float) -> bool:
    scale = max(1.0, abs(mode.energy))
    return any(abs(mode.energy - em.transition_frequency) < rtol * scale for em in cluster.emitters if em.coupling)


def verify_against_oracle(cluster: ClusterSpec, samples: int, seed: int, pole_rtol: float = 1e-6) -> VerificationReport:
    """Compare the closed form with the network oracle at ``samples`` wavenumbers.

    Sample ``s`` is drawn uniformly from the ``s``-th of ``samples`` equal
    slices of (0, pi).  Draws landing within ``pole_rtol`` of an emitter
    resonance, or where the oracle matrix is singular, are redrawn.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    rng = np.random.default_rng(seed)
    width = math.pi / samples
    max_dr = max_dt = 0.0
    worst_k = None
    worst = -1.0
    for s in range(samples):
        for _ in range(100):
            k = (s + rng.uniform(0.0, 1.0)) * width
            if not 1e-9 < k < math.pi - 1e-9:
                continue
            mode = dispersion(k, cluster.params)
            if _near_pole(cluster, mode, pole_rtol):
                continue
            try:
                sol = solve_network(cluster, mode)
            except SingularSystem:
                continue
            res, _ = evaluate(cluster, mode)
            break
        else:
            continue
        dr = abs(res.r - sol.r)
        dt = abs(res.t_N - sol.t_N)
        max_dr = max(max_dr, dr)
        max_dt = max(max_dt, dt)
        if max(dr, dt) > worst:
            worst = max(dr, dt)
            worst_k = k
    return VerificationReport(samples, seed, max_dr, max_dt, worst_k)
