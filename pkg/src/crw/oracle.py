"""Brute-force solution of the full tight-binding scattering network.

Unknowns are ``r``, ``t_N``, every photon amplitude inside the cluster and,
unless eliminated, every emitter amplitude.  The leads are substituted
analytically through the plane-wave ansatz, so there is no truncation.  The
system is assembled in physical units (explicit ``J``) and never uses the
transfer-matrix algebra, which keeps it independent of :mod:`crw.core`.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .cluster import ClusterSpec
from .core import ModeContext, ResonantPole, ScatteringError

#: Reciprocal condition number below which the network matrix is singular.
SINGULAR_RCOND = 1e-14


class SingularSystem(ScatteringError):
    def __init__(self, rcond: float):
        self.rcond = rcond
        super().__init__(f"network matrix is numerically singular (rcond={rcond:.3e})")


@dataclass
class NetworkSolution:
    r: complex
    t_N: complex
    site_amplitudes: dict[tuple[int, int], complex] = field(repr=False)
    emitter_amplitudes: dict[tuple[int, int], complex] = field(repr=False)
    residual: float
    system_norm: float
    rcond: float

    @property
    def R(self) -> float:
        return abs(self.r) ** 2

    @property
    def T(self) -> float:
        return abs(self.t_N) ** 2


def assemble(cluster: ClusterSpec, mode: ModeContext, eliminate_emitters: bool = False):
    """Build the complex system ``A x = b``.

    Returns ``(A, b, site_index, emitter_index)`` where the index maps send
    ``(channel, site)`` to a column of ``A``.  Columns 0 and 1 are ``r`` and
    ``t_N``.
    """
    p = cluster.params
    J = p.hopping
    E = mode.energy
    eik = cmath.exp(1j * mode.k)
    channels = cluster.channels

    site_index: dict[tuple[int, int], int] = {}
    emitter_index: dict[tuple[int, int], int] = {}
    col = 2
    for i, ch in enumerate(channels):
        for j in range(len(ch)):
            site_index[i, j] = col
            col += 1
    if not eliminate_emitters:
        for i, ch in enumerate(channels):
            for j, site in enumerate(ch):
                if site.emitter is not None:
                    emitter_index[i, j] = col
                    col += 1

    n = col
    A = np.zeros((n, n), dtype=complex)
    b = np.zeros(n, dtype=complex)

    # junction rows: (omega - E) psi(x) - J psi(outer lead) - J sum_i psi_i(inner) = 0
    # left:  psi(-1) = e^{-ik} + r e^{ik},  psi(-2) = e^{-2ik} + r e^{2ik}
    # right: psi(N) = t_N e^{ik},           psi(N+1) = t_N e^{2ik}
    lead_coeff = (p.omega - E) * eik - J * eik**2
    A[0, 0] = lead_coeff
    b[0] = -(p.omega - E) / eik + J / eik**2
    A[1, 1] = lead_coeff
    for i, ch in enumerate(channels):
        A[0, site_index[i, 0]] -= J
        A[1, site_index[i, len(ch) - 1]] -= J

    for i, ch in enumerate(channels):
        last = len(ch) - 1
        for j, site in enumerate(ch):
            row = site_index[i, j]
            diag = site.energy(p) - E
            em = site.emitter
            if em is not None:
                if eliminate_emitters:
                    detuning = E - em.transition_frequency
                    if em.coupling != 0:
                        if abs(detuning) < mode.pole_tol * max(1.0, abs(E)):
                            raise ResonantPole(j, i)
                        diag += em.coupling**2 / detuning
                else:
                    e_col = emitter_index[i, j]
                    A[row, e_col] = em.coupling
                    A[e_col, e_col] = em.transition_frequency - E
                    A[e_col, row] = em.coupling
            A[row, row] = diag
            if j == 0:
                A[row, 0] -= J * eik
                b[row] += J / eik
            else:
                A[row, site_index[i, j - 1]] -= J
            if j == last:
                A[row, 1] -= J * eik
            else:
                A[row, site_index[i, j + 1]] -= J
    return A, b, site_index, emitter_index


def _solve(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    # equilibrate rows to unit max-norm, then LU with partial pivoting
    scale = np.abs(A).max(axis=1)
    scale[scale == 0] = 1.0
    As = A / scale[:, None]
    bs = b / scale
    anorm = np.abs(As).sum(axis=0).max()
    lu, piv, info = lapack.zgetrf(As)
    if info > 0:
        raise SingularSystem(0.0)
    rcond, _ = lapack.zgecon(lu, anorm, norm="1")
    if rcond < SINGULAR_RCOND:
        raise SingularSystem(float(rcond))
    x = scipy.linalg.lu_solve((lu, piv), bs)
    return x, float(rcond)


def solve_network(cluster: ClusterSpec, mode: ModeContext, eliminate_emitters: bool = False) -> NetworkSolution:
    """Solve every tight-binding equation of ``cluster`` at the mode ``mode``.

    With ``eliminate_emitters`` each emitter is folded into its cavity's
    energy before solving; resonant emitters then raise
    :class:`~crw.core.ResonantPole`.  The default keeps emitter amplitudes
    as unknowns and handles exact resonance.
    """
    A, b, site_index, emitter_index = assemble(cluster, mode, eliminate_emitters)
    x, rcond = _solve(A, b)
    residual = float(np.abs(A @ x - b).max())
    system_norm = float(max(np.abs(A).sum(axis=1).max() * np.abs(x).max(), np.abs(b).max()))

    psi = {key: complex(x[c]) for key, c in site_index.items()}
    if eliminate_emitters:
        E = mode.energy
        phi = {}
        for (i, j), site in _sites(cluster):
            em = site.emitter
            if em is not None:
                phi[i, j] = 0j if em.coupling == 0 else em.coupling * psi[i, j] / (E - em.transition_frequency)
    else:
        phi = {key: complex(x[c]) for key, c in emitter_index.items()}
    return NetworkSolution(
        r=complex(x[0]),
        t_N=complex(x[1]),
        site_amplitudes=psi,
        emitter_amplitudes=phi,
        residual=residual,
        system_norm=system_norm,
        rcond=rcond,
    )


def _sites(cluster: ClusterSpec):
    for i, ch in enumerate(cluster.channels):
        for j, site in enumerate(ch):
            yield (i, j), site
