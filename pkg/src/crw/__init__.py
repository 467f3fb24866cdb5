"""Single-photon transport through coupled-resonator waveguide clusters."""

from .cluster import (
    AtomPattern,
    ClusterSpec,
    IdenticalParallel,
    Parallel,
    Serial,
    build_identical_chain,
    build_identical_parallel,
    build_parallel,
    build_pattern_chain,
    build_ring,
    validate,
)
from .core import (
    BandEdge,
    CavitySite,
    DegenerateChannel,
    Emitter,
    LatticeParams,
    ResonantPole,
    ScatteringResult,
    channel_matrix,
    dispersion,
    effective_alpha,
    identical_parallel_amplitudes,
    parallel_amplitudes,
    ring_amplitudes,
    serial_amplitudes,
)
from .oracle import SingularSystem, solve_network
from .sweep import SweepSpec, evaluate, find_windows, sweep_k, verify_against_oracle

__version__ = "0.1.0"
