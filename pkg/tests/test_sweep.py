import math

import numpy as np
import pytest

from crw.cluster import AtomPattern, ClusterSpec, Parallel, Serial, build_identical_chain, build_pattern_chain
from crw.core import BandEdge, CavitySite, Emitter, LatticeParams
from crw.sweep import (
    ORACLE,
    SpectrumRecord,
    SpectrumRow,
    SweepSpec,
    evaluate,
    find_windows,
    sweep_k,
    verify_against_oracle,
)

PI = math.pi
FIG2 = LatticeParams(2 * PI)


def record(ks, Rs):
    return SpectrumRecord(tuple(SpectrumRow(k, 0.0, None, R, 1 - R, "closed-form", 0j, 0j) for k, R in zip(ks, Rs)))


def fig2a():
    return build_identical_chain(2, Emitter(2 * PI, 1.0), FIG2)


def test_grid_is_uniform_and_inclusive():
    rec = sweep_k(SweepSpec(fig2a(), 0.1, 3.0, 512))
    assert len(rec) == 512
    assert rec.k[0] == 0.1 and rec.k[-1] == 3.0
    assert np.all(np.diff(rec.k) > 0)
    assert np.allclose(np.diff(rec.k), 2.9 / 511)


def test_resonant_row_is_exact():
    # 512 points with pi/2 on the grid
    h = PI / 600
    spec = SweepSpec(fig2a(), PI / 2 - 255 * h, PI / 2 + 256 * h, 512, reference_emitter=0)
    rec = sweep_k(spec)
    i = int(np.argmin(abs(rec.k - PI / 2)))
    assert abs(rec.k[i] - PI / 2) < 1e-12
    assert rec.rows[i].R == 1.0
    assert abs(rec.rows[i].detuning) < 1e-9


def test_detuning_column():
    rec = sweep_k(SweepSpec(fig2a(), 0.5, 2.5, 5, reference_emitter=0))
    for row in rec.rows:
        assert row.detuning == pytest.approx(row.energy - 2 * PI)
    assert all(row.detuning is None for row in sweep_k(SweepSpec(fig2a(), 0.5, 2.5, 5)).rows)


def test_sweep_spec_validation():
    with pytest.raises(BandEdge):
        SweepSpec(fig2a(), 0.0, 1.0, 10)
    with pytest.raises(BandEdge):
        SweepSpec(fig2a(), 1.0, 3.5, 10)
    with pytest.raises(ValueError):
        SweepSpec(fig2a(), 2.0, 1.0, 10)
    with pytest.raises(ValueError):
        SweepSpec(fig2a(), 1.0, 2.0, 1)
    with pytest.raises(ValueError):
        SweepSpec(fig2a(), 1.0, 2.0, 10, reference_emitter=2)


def test_oracle_and_closed_form_sweeps_agree():
    cl = build_pattern_chain(AtomPattern("ABA", Emitter(5.5, 1.0), Emitter(3.2, 1.0)), LatticeParams(5.0))
    spec = SweepSpec(cl, 0.01, PI - 0.01, 128)
    a, b = sweep_k(spec), sweep_k(spec, method=ORACLE)
    assert all(row.method == ORACLE for row in b.rows)
    assert np.abs(a.R - b.R).max() < 1e-8


def test_degenerate_channel_falls_back_to_oracle():
    # sites with alpha = 1 at k = 1: epsilon - E = 1, two of them give a = 0
    params = LatticeParams(3.0)
    E = 3.0 - 2 * math.cos(1.0)
    chans = ((CavitySite(epsilon=E + 1.0), CavitySite(epsilon=E + 1.0)), (CavitySite(emitter=Emitter(1.0, 1.0)),))
    from crw.core import dispersion

    res, method = evaluate(ClusterSpec(params, Parallel(chans)), dispersion(1.0, params))
    assert method == ORACLE
    assert res.R + res.T == pytest.approx(1, abs=1e-12)


def test_windows_synthetic_block():
    ks = np.linspace(0.5, 1.7, 1201)
    Rs = np.where((ks >= 1.0 - 1e-12) & (ks <= 1.2 + 1e-12), 1.0, 0.0)
    (w,) = find_windows(record(ks, Rs), 0.5)
    h = ks[1] - ks[0]
    assert w.k_lo == pytest.approx(1.0, abs=h)
    assert w.k_hi == pytest.approx(1.2, abs=h)
    assert w.max_R == 1.0
    assert w.slope_lo > 0 > w.slope_hi


def test_windows_empty_and_edges():
    ks = np.linspace(0.1, 3.0, 50)
    assert find_windows(record(ks, np.zeros(50)), 0.5) == []
    Rs = np.zeros(50)
    Rs[:3] = 1
    (w,) = find_windows(record(ks, Rs), 0.5)
    assert w.k_lo == ks[0]
    assert w.k_lo < w.k_hi < ks[3]


def test_windows_reject_bad_threshold():
    for t in (0.0, 1.0, 1.5, -0.2):
        with pytest.raises(ValueError):
            find_windows(record([0.1, 0.2], [0, 0]), t)


def test_windows_around_resonance():
    rec = sweep_k(SweepSpec(fig2a(), 0.01, PI - 0.01, 513))
    windows = find_windows(rec, 1 - 1e-6)
    assert len(windows) == 1 and windows[0].contains(PI / 2)
    assert windows[0].max_R == 1.0


def test_verify_transparent_and_deterministic():
    cl = ClusterSpec(LatticeParams(1.0), Serial((CavitySite(),) * 6))
    rep = verify_against_oracle(cl, 40, seed=1)
    assert rep.max_abs_dr < 1e-12 and rep.max_abs_dt < 1e-12
    cl = build_pattern_chain(AtomPattern("ABBA", Emitter(5.5, 1.0), Emitter(3.2, 0.7)), LatticeParams(5.0))
    assert verify_against_oracle(cl, 30, seed=9) == verify_against_oracle(cl, 30, seed=9)
    with pytest.raises(ValueError):
        verify_against_oracle(cl, 0, seed=9)


def test_verify_random_hermitian():
    from _clusters import random_cluster

    rng = np.random.default_rng(21)
    for _ in range(4):
        rep = verify_against_oracle(random_cluster(rng), 100, seed=5)
        assert rep.passed(1e-8)
