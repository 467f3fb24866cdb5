"""Closed-form single-photon scattering through coupled-resonator clusters.

Every formula here is written for unit hopping.  Site energies, the photon
energy and emitter couplings are divided by the hopping ``J`` before use, so
clusters with any ``J > 0`` go through the same code.

The cluster sits between two semi-infinite leads.  The left junction is lead
site ``-1``, the right junction is lead site ``N``; each channel ``i`` holds
sites ``0 .. n_i - 1`` and attaches to both junctions.  The incoming wave is
``exp(ikj) + r exp(-ikj)`` on the left and the outgoing wave is
``t exp(ikj)`` on the right.  Transmission is reported as
``t_N = t exp(ik(N - 1))``, the amplitude seen on the last cluster site row.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

#: Relative tolerance on ``|E_k - omega0|`` below which an emitter is resonant.
POLE_RTOL = 1e-12
#: A channel with ``|a| < DEGENERATE_RTOL * ||M||`` cannot enter the aggregates.
DEGENERATE_RTOL = 1e-10
#: Denominator threshold of the ring amplitudes.
GAMMA_POLE_TOL = 1e-14
#: Ring branches with ``|alpha| < BRANCH_ZERO_TOL`` make ``gamma`` diverge.
BRANCH_ZERO_TOL = 1e-12


class ScatteringError(Exception):
    """Base class for errors raised while evaluating amplitudes."""


class BandEdge(ScatteringError, ValueError):
    """Wavenumber outside the open interval (0, pi)."""

    def __init__(self, k: float):
        self.k = k
        super().__init__(f"k={k!r} is outside (0, pi); group velocity vanishes")


class NonFinite(ScatteringError, ValueError):
    pass


class ResonantPole(ScatteringError):
    """A site's emitter is exactly on resonance, so its alpha diverges."""

    def __init__(self, site_index: int, channel_index: Optional[int] = None):
        self.site_index = site_index
        self.channel_index = channel_index
        where = f"site {site_index}"
        if channel_index is not None:
            where = f"channel {channel_index}, " + where
        super().__init__(f"resonant emitter at {where}")


class DegenerateChannel(ScatteringError):
    """Channel matrix with a vanishing ``a`` entry; use the network oracle."""

    def __init__(self, channel_index: int):
        self.channel_index = channel_index
        super().__init__(f"channel {channel_index} has a degenerate transfer matrix")


class GammaPole(ScatteringError):
    pass


@dataclass(frozen=True)
class LatticeParams:
    """Cavity frequency ``omega`` and inter-cavity hopping ``hopping``."""

    omega: float
    hopping: float = 1.0

    def __post_init__(self):
        if not self.hopping > 0:
            raise ValueError(f"hopping must be > 0, got {self.hopping!r}")


@dataclass(frozen=True)
class ModeContext:
    """A lead photon mode: wavenumber, energy and the lattice it lives on."""

    k: float
    energy: float
    params: LatticeParams
    pole_tol: float = POLE_RTOL


@dataclass(frozen=True)
class Emitter:
    transition_frequency: float
    coupling: float = 1.0


@dataclass(frozen=True)
class CavitySite:
    """One resonator.  ``epsilon=None`` means the global cavity frequency."""

    epsilon: Optional[complex] = None
    emitter: Optional[Emitter] = None

    def energy(self, params: LatticeParams) -> complex:
        return params.omega if self.epsilon is None else self.epsilon

    @property
    def hermitian(self) -> bool:
        return self.epsilon is None or complex(self.epsilon).imag == 0


@dataclass(frozen=True)
class AlphaTerm:
    alpha: complex
    detuning: Optional[float]
    pole_flag: bool = False


@dataclass(frozen=True)
class TransferMatrix:
    a: complex
    b: complex
    c: complex
    d: complex

    @classmethod
    def identity(cls) -> "TransferMatrix":
        return cls(1, 0, 0, 1)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def norm(self) -> float:
        return math.sqrt(sum(abs(x) ** 2 for x in (self.a, self.b, self.c, self.d)))

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def to_list(self) -> list[list[complex]]:
        return [[self.a, self.b], [self.c, self.d]]


@dataclass(frozen=True)
class ParallelAggregates:
    P: complex
    Q: complex
    Pp: complex
    Qp: complex


@dataclass(frozen=True)
class RingAggregates:
    gamma: complex
    terms: tuple[complex, ...]
    denominators: tuple[complex, ...]
    divergent: bool = False


@dataclass(frozen=True)
class ScatteringResult:
    r: complex
    t_N: complex
    hermitian: bool = True

    @property
    def R(self) -> float:
        return abs(self.r) ** 2

    @property
    def T(self) -> float:
        return abs(self.t_N) ** 2


def dispersion(k: float, params: LatticeParams, pole_tol: float = POLE_RTOL) -> ModeContext:
    """Lead mode of wavenumber ``k``: ``E = omega - 2 J cos k``."""
    if not (0.0 < k < math.pi):
        raise BandEdge(k)
    energy = params.omega - 2.0 * params.hopping * math.cos(k)
    return ModeContext(k=k, energy=energy, params=params, pole_tol=pole_tol)


def effective_alpha(site: CavitySite, mode: ModeContext) -> AlphaTerm:
    """Hopping-normalised site term with the emitter eliminated.

    ``alpha = (eps - E)/J + g**2 / (J (E - omega0))``.  A resonant emitter is
    flagged rather than divided through; its ``alpha`` is infinite.
    """
    J = mode.params.hopping
    alpha = (site.energy(mode.params) - mode.energy) / J
    em = site.emitter
    if em is None:
        return AlphaTerm(complex(alpha), None)
    detuning = mode.energy - em.transition_frequency
    if em.coupling == 0:
        return AlphaTerm(complex(alpha), detuning)
    if abs(detuning) < mode.pole_tol * max(1.0, abs(mode.energy)):
        return AlphaTerm(complex(math.inf), detuning, pole_flag=True)
    return AlphaTerm(complex(alpha + em.coupling**2 / (J * detuning)), detuning)


def elementary_matrix(alpha: complex) -> TransferMatrix:
    if not cmath.isfinite(alpha):
        raise NonFinite(f"alpha={alpha!r} is not finite")
    return TransferMatrix(alpha, -1, 1, 0)


def _accumulate(alphas: Sequence[complex]) -> TransferMatrix:
    # M = E(alpha_{n-1}) ... E(alpha_0); identity for an empty stretch
    if not alphas:
        return TransferMatrix.identity()
    a, b, c, d = alphas[0], -1 + 0j, 1 + 0j, 0j
    for al in alphas[1:]:
        a, b, c, d = al * a - c, al * b - d, a, b
    return TransferMatrix(a, b, c, d)


def _terms(channel: Sequence[CavitySite], mode: ModeContext) -> list[AlphaTerm]:
    if not channel:
        raise ValueError("channel must contain at least one site")
    return [effective_alpha(s, mode) for s in channel]


def channel_matrix(channel: Sequence[CavitySite], mode: ModeContext) -> TransferMatrix:
    """Transfer matrix across a whole channel, ``(psi(n), psi(n-1)) = M (psi(0), psi(-1))``."""
    terms = _terms(channel, mode)
    for j, term in enumerate(terms):
        if term.pole_flag:
            raise ResonantPole(j)
    return _accumulate([t.alpha for t in terms])


def _is_hermitian(channels: Sequence[Sequence[CavitySite]]) -> bool:
    return all(s.hermitian for ch in channels for s in ch)


def _ratio(num: complex, den: complex) -> complex:
    if den == 0:
        raise NonFinite("vanishing amplitude denominator")
    return num / den


def serial_amplitudes(channel: Sequence[CavitySite], mode: ModeContext) -> ScatteringResult:
    """Reflection and transmission of a single chain of resonators.

    A resonant emitter pins the photon amplitude on its site to zero, which
    cuts the chain: the photon is totally reflected by the stretch in front
    of the first resonant site and nothing is transmitted.
    """
    terms = _terms(channel, mode)
    hermitian = _is_hermitian([channel])
    eik = cmath.exp(1j * mode.k)
    poles = [j for j, t in enumerate(terms) if t.pole_flag]
    if poles:
        head = _accumulate([t.alpha for t in terms[: poles[0]]])
        r = -_ratio(head.a + head.b / eik, head.a + head.b * eik)
        return ScatteringResult(r, 0j, hermitian)

    m = _accumulate([t.alpha for t in terms])
    den = m.a + (m.b - m.c) * eik - m.d * eik**2
    r = _ratio(-m.a - m.b / eik + m.c * eik + m.d, den)
    # det M == 1 exactly; computing ad - bc loses digits when the entries are large
    t_N = _ratio(-2j * math.sin(mode.k), den)
    return ScatteringResult(r, t_N, hermitian)


def parallel_aggregates(
    channels: Sequence[Sequence[CavitySite]], mode: ModeContext
) -> ParallelAggregates:
    """Junction sums ``P, Q, P', Q'`` over the channel transfer matrices.

    A channel carrying resonant emitters splits into two dead-end stubs: the
    sites before the first resonance hang off the left junction and the sites
    after the last one hang off the right junction.  Its contribution is the
    exact limit of the regular terms as the resonant alpha diverges.
    """
    if not channels:
        raise ValueError("at least one channel is required")
    P = Q = Pp = Qp = 0j
    for i, channel in enumerate(channels):
        terms = _terms(channel, mode)
        alphas = [t.alpha for t in terms]
        poles = [j for j, t in enumerate(terms) if t.pole_flag]
        if poles:
            head = _accumulate(alphas[: poles[0]])
            tail = _accumulate(alphas[poles[-1] + 1 :])
            if abs(head.a) < DEGENERATE_RTOL * head.norm() or abs(tail.a) < DEGENERATE_RTOL * tail.norm():
                raise DegenerateChannel(i)
            Q -= head.b / head.a
            Pp += tail.c / tail.a
            continue
        m = _accumulate(alphas)
        if abs(m.a) < DEGENERATE_RTOL * m.norm():
            raise DegenerateChannel(i)
        # d - bc/a == det/a == 1/a; the subtraction cancels badly on long channels
        P += 1 / m.a
        Q -= m.b / m.a
        Pp += m.c / m.a
        Qp += 1 / m.a
    return ParallelAggregates(P, Q, Pp, Qp)


def parallel_amplitudes(
    channels: Sequence[Sequence[CavitySite]], mode: ModeContext
) -> ScatteringResult:
    agg = parallel_aggregates(channels, mode)
    eik = cmath.exp(1j * mode.k)
    P, Q, Pp, Qp = agg.P, agg.Q, agg.Pp, agg.Qp
    den = (Q * eik - 1) * (Pp * eik - 1) - P * Qp * eik**2
    r = _ratio((Pp * eik - 1) * (1 - Q / eik) + P * Qp, den)
    t_N = _ratio(-2j * Qp * math.sin(mode.k), den)
    return ScatteringResult(r, t_N, _is_hermitian(channels))


def ring_aggregates(branch_emitters: Sequence[Optional[Emitter]], mode: ModeContext) -> RingAggregates:
    """``gamma = sum_j J / (omega - E + g_j G_j)`` with ``G_j = g_j / (E - omega_j)``.

    A resonant branch has ``G_j`` infinite and drops out of the sum.  A branch
    whose denominator vanishes makes ``gamma`` infinite; ``divergent`` is set
    and ``gamma`` is returned as ``inf``.
    """
    if not branch_emitters:
        raise ValueError("at least one branch is required")
    J = mode.params.hopping
    E = mode.energy
    gamma = 0j
    terms: list[complex] = []
    dens: list[complex] = []
    divergent = False
    for em in branch_emitters:
        if em is None or em.coupling == 0:
            G = 0j
        else:
            detuning = E - em.transition_frequency
            if abs(detuning) < mode.pole_tol * max(1.0, abs(E)):
                terms.append(complex(math.inf))
                dens.append(complex(math.inf))
                continue
            G = complex(em.coupling / detuning)
        den = mode.params.omega - E + (0.0 if em is None else em.coupling) * G
        terms.append(G)
        dens.append(den)
        if abs(den) < BRANCH_ZERO_TOL * J:
            divergent = True
        else:
            gamma += J / den
    if divergent:
        gamma = complex(math.inf)
    return RingAggregates(gamma, tuple(terms), tuple(dens), divergent)


def ring_amplitudes(branch_emitters: Sequence[Optional[Emitter]], mode: ModeContext) -> ScatteringResult:
    """Ring of single-resonator branches joined at both junctions."""
    agg = ring_aggregates(branch_emitters, mode)
    k = mode.k
    eik = cmath.exp(1j * k)
    if agg.divergent:
        # gamma -> infinity limit
        return ScatteringResult(-math.cos(k) / eik, 1j * math.sin(k) / eik)
    gamma = agg.gamma
    den = 1 - 2 * gamma * eik
    if abs(den) < GAMMA_POLE_TOL:
        raise GammaPole(f"|1 - 2 gamma e^ik| = {abs(den):.3e} at k={k!r}")
    return ScatteringResult((2 * gamma * math.cos(k) - 1) / den, -2j * gamma * math.sin(k) / den)


def identical_parallel_amplitudes(
    copies: int, channel: Sequence[CavitySite], mode: ModeContext
) -> ScatteringResult:
    """``copies`` identical channels in parallel, without dividing by ``a``."""
    if copies < 1:
        raise ValueError(f"copies must be >= 1, got {copies!r}")
    terms = _terms(channel, mode)
    hermitian = _is_hermitian([channel])
    eik = cmath.exp(1j * mode.k)
    n0 = copies
    poles = [j for j, t in enumerate(terms) if t.pole_flag]
    if poles:
        head = _accumulate([t.alpha for t in terms[: poles[0]]])
        r = -_ratio(head.a + n0 * head.b / eik, head.a + n0 * head.b * eik)
        return ScatteringResult(r, 0j, hermitian)

    m = _accumulate([t.alpha for t in terms])
    den = m.a + n0 * eik * (m.b - m.c - n0 * m.d * eik)
    r = _ratio(-m.a - n0 * m.b / eik + n0 * m.c * eik + n0 * n0 * m.d, den)
    t_N = _ratio(-2j * n0 * math.sin(mode.k), den)
    return ScatteringResult(r, t_N, hermitian)
