"""Rewrite configs/*.json and tests/golden/* from the current code.

Run after an intentional change in numerics, then review the diff:

    python scripts/regen_golden.py
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from crw.cluster import (
    AtomPattern,
    build_identical_chain,
    build_identical_parallel,
    build_pattern_chain,
    build_ring,
)
from crw.config import save_config, write_csv
from crw.core import CavitySite, Emitter, LatticeParams
from crw.sweep import SweepSpec, find_windows, sweep_k

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"
GOLDEN = ROOT / "tests" / "golden"

K_MIN = math.pi / 1024
K_MAX = math.pi - math.pi / 1024
POINTS = 512
FIG5_THRESHOLD = 0.99
FIG5_COPIES = (1, 5, 30)


def figure_clusters():
    pi = math.pi
    g = 1.0
    out = {}
    fig2 = LatticeParams(2 * pi)
    for tag, w0 in (("2.9pi", 2.9 * pi), ("2pi", 2 * pi), ("1.1pi", 1.1 * pi)):
        out[f"fig2a_n2_w0_{tag}"] = build_identical_chain(2, Emitter(w0, g), fig2)
    for tag, w0 in (("2pi", 2 * pi), ("1.1pi", 1.1 * pi), ("0.75pi", 0.75 * pi), ("0.45pi", 0.45 * pi), ("0.1pi", 0.1 * pi)):
        out[f"fig2c_n50_w0_{tag}"] = build_identical_chain(50, Emitter(w0, g), fig2)

    p5 = LatticeParams(5.0)
    for tag, wa, wb in (("in", 5.5, 3.2), ("out", 8.5, 2.5)):
        for seq in ("ABA", "BAB"):
            pattern = AtomPattern(seq, Emitter(wa, g), Emitter(wb, g))
            out[f"fig3_{seq.lower()}_{tag}"] = build_pattern_chain(pattern, p5)

    def arm(*w0s):
        return [CavitySite(emitter=Emitter(w, g)) for w in w0s]

    out["fig4a_ring_same"] = build_ring(arm(3.1), arm(3.1), p5)
    out["fig4a_ring_diff"] = build_ring(arm(4.0), arm(6.0), p5)
    out["fig4b_ring_ab_ab"] = build_ring(arm(4.0, 2.0), arm(4.0, 2.0), p5)
    out["fig4b_ring_ab_ba"] = build_ring(arm(4.0, 2.0), arm(2.0, 4.0), p5)

    aba = build_pattern_chain(AtomPattern("ABA", Emitter(2.0, g), Emitter(3.0, g)), p5).topology.channel
    for n0 in FIG5_COPIES:
        out[f"fig5_aba_copies{n0}"] = build_identical_parallel(n0, aba, p5)
    eleven = build_pattern_chain(AtomPattern("ABABABABABA", Emitter(2.0, g), Emitter(3.0, g)), p5)
    out["fig5_eleven_atoms"] = eleven
    return out


def sweep_rows(record):
    return [(row.k, row.energy, row.detuning, row.R, row.T) for row in record.rows]


def main() -> None:
    CONFIGS.mkdir(exist_ok=True)
    (GOLDEN / "sweeps").mkdir(parents=True, exist_ok=True)
    (GOLDEN / "windows").mkdir(parents=True, exist_ok=True)
    fractions = {}
    for name, cluster in figure_clusters().items():
        save_config(cluster, CONFIGS / f"{name}.json")
        ref = 0 if cluster.emitters else None
        record = sweep_k(SweepSpec(cluster, K_MIN, K_MAX, POINTS, ref))
        (GOLDEN / "sweeps" / f"{name}.csv").write_text(
            write_csv(("k", "E", "detuning", "R", "T"), sweep_rows(record)), newline="\n"
        )
        windows = find_windows(record)
        (GOLDEN / "windows" / f"{name}.csv").write_text(
            write_csv(
                ("k_lo", "k_hi", "max_R", "slope_lo", "slope_hi"),
                [(w.k_lo, w.k_hi, w.max_R, w.slope_lo, w.slope_hi) for w in windows],
            ),
            newline="\n",
        )
        if name.startswith("fig5_aba"):
            fractions[str(cluster.topology.copies)] = float(np.mean(record.R > FIG5_THRESHOLD))
    doc = {
        "grid": {"k_min": K_MIN, "k_max": K_MAX, "points": POINTS},
        "threshold": FIG5_THRESHOLD,
        "fraction_R_above_threshold": fractions,
    }
    (GOLDEN / "fig5_fractions.json").write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()
