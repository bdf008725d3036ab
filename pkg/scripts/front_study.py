"""Traveling front at c=2 (constant case): Y_inf, decay rates and mass balance
versus the half-length a of the truncated cylinder.

Usage: python3 scripts/front_study.py [outdir]
"""
import os
import sys

from kppfront.cross_section import constant_model
from kppfront.diagnostics import (left_decay_rate, mass_balance_residual,
                                  right_decay_rate, y_inf_bound_a_star,
                                  y_inf_bound_mean_ratio)
from kppfront.front import solve_front
from kppfront.output import write_csv


def main(outdir="out/front_study"):
    os.makedirs(outdir, exist_ok=True)
    model = constant_model(1.0, 0.25)
    rows = []
    for a in (20.0, 40.0, 80.0):
        sol = solve_front(model, 2.0, a)
        nontrivial = sol.T.max() > 1e-6
        rd = right_decay_rate(sol) if nontrivial else float("nan")
        ld = left_decay_rate(sol) if nontrivial else float("nan")
        mb = mass_balance_residual(sol, model) if sol.converged else float("nan")
        rows.append((a, sol.converged, sol.iterations, sol.y_inf, sol.y_inf_strip, rd, ld, mb,
                     y_inf_bound_a_star(model, sol.bounds.beta), y_inf_bound_mean_ratio(model)))
        print(f"a={a}: converged={sol.converged} it={sol.iterations} Y_inf={sol.y_inf:.6f} "
              f"right={rd:.5f} left={ld:.5f} mass={mb:.4f}")
    write_csv(os.path.join(outdir, "front_study.csv"), ["# constant case a=1 q=0.25 c=2"],
              ("a", "converged", "iterations", "y_inf", "y_inf_strip", "right_decay",
               "left_decay", "mass_balance", "bound_a_star", "bound_mean_ratio"), rows)


if __name__ == "__main__":
    main(*sys.argv[1:])
