"""Sweep mu, k(lambda)/lambda and c* for the shear family u = A cos(2 pi y).

Usage: python3 scripts/dispersion_sweep.py [outdir]
"""
import os
import sys

import numpy as np

from kppfront.cross_section import LossSpec, ProfileSpec, build_model
from kppfront.dispersion import minimal_speed, sup_condition
from kppfront.eigen import mu
from kppfront.output import write_csv


def main(outdir="out/dispersion_sweep"):
    os.makedirs(outdir, exist_ok=True)
    rows = []
    for amp in np.linspace(0.0, 4.0, 9):
        model = build_model(1.0, 33, ProfileSpec("cosine", 0.0, float(amp)),
                            loss_spec=LossSpec("linear", ProfileSpec("cosine", 0.25, 0.25)))
        c_star, lam_star = minimal_speed(model)
        holds, sup, _ = sup_condition(model)
        rows.append((amp, mu(model, 0.0), c_star, lam_star, holds, sup))
        print(f"A={amp:4.1f}  mu0={rows[-1][1]: .6f}  c*={c_star:.6f}  lambda*={lam_star:.6f}")
    write_csv(os.path.join(outdir, "shear_sweep.csv"), ["# shear amplitude sweep"],
              ("amplitude", "mu0", "c_star", "lambda_star", "sup_condition", "sup_value"), rows)


if __name__ == "__main__":
    main(*sys.argv[1:])
