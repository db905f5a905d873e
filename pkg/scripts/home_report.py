#!/usr/bin/env python3
"""Print the home-pose kinetostatics of both machines side by side.

Quick sanity table: actuator settings, feasible-space projector diagonal,
condition number and the six diagonal stiffness measures.
"""
import sys

import numpy as np

from pkm.geometry import Variant, default_params, home_height, home_pose
from pkm.jacobian import build_jacobian
from pkm.kinematics import inverse_kinematics
from pkm.stiffness import STIFFNESS_FIELDS, assemble_stiffness


def main() -> int:
    rows = {}
    for variant in Variant:
        params = default_params(variant)
        pose = home_pose(params)
        states = inverse_kinematics(params, pose)
        jac = build_jacobian(params, pose, states)
        result = assemble_stiffness(params, pose, states, jac)
        rows[variant.value] = (params, states, jac, result)

    z0 = home_height(rows["z3"][0])
    print(f"home height: {z0:.6f} mm\n")
    print(f"{'quantity':<24}{'z3 (rail)':>18}{'a3 (strut)':>18}")
    print("-" * 60)
    for limb in range(3):
        z3_len = rows["z3"][1][limb].actuated_length
        a3_len = rows["a3"][1][limb].actuated_length
        print(f"{f'actuator {limb + 1} [mm]':<24}{z3_len:>18.6f}{a3_len:>18.6f}")
    z3_jac, a3_jac = rows["z3"][2], rows["a3"][2]
    print(f"{'P diagonal':<24}{np.array2string(np.diag(z3_jac.P), precision=3):>18}")
    print(f"{'kappa':<24}{z3_jac.kappa:>18.12f}{a3_jac.kappa:>18.12f}")
    for name in STIFFNESS_FIELDS:
        z3_val = getattr(rows["z3"][3], name)
        a3_val = getattr(rows["a3"][3], name)
        marker = " (tie)" if z3_val == a3_val else ""
        print(f"{name:<24}{z3_val:>18.6g}{a3_val:>18.6g}{marker}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
