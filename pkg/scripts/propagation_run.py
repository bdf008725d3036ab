"""Cauchy problem in the propagation regime: front speed versus decay of the data.

For each initial decay lambda the measured front speed is compared with
c(lambda) = k(lambda)/lambda for lambda < lambda*, and with c* otherwise.

Usage: python3 scripts/propagation_run.py [outdir]
"""
import os
import sys

from kppfront.cross_section import constant_model
from kppfront.diagnostics import FrontTrack, observe
from kppfront.dispersion import classify_regime
from kppfront.ivp import CylinderGrid, make_initial_profile, run
from kppfront.output import write_csv


def main(outdir="out/propagation"):
    os.makedirs(outdir, exist_ok=True)
    model = constant_model(1.0, 0.25)
    grid = CylinderGrid.for_model(model)
    rows = []
    for decay in (0.3, 0.5, 0.7):
        verdict = classify_regime(model, decay)
        state = make_initial_profile(grid, decay, 1.0, 1.0, 1.0, 1.0, 1.0)
        res = run(state, model, 25.0, 0.5, observer=lambda s: observe(s, model))
        track = FrontTrack([(d["t"], d["front_pos_T"]) for d in res.diagnostics]).fit()
        rows.append((decay, verdict.speed, track.speed, track.r2, res.partial))
        print(f"lambda={decay}: predicted {verdict.speed:.4f}, measured {track.speed:.4f} "
              f"(r2={track.r2:.5f}, partial={res.partial})")
    write_csv(os.path.join(outdir, "speeds.csv"), ["# constant case a=1 q=0.25"],
              ("decay", "predicted", "measured", "r2", "partial"), rows)


if __name__ == "__main__":
    main(*sys.argv[1:])
