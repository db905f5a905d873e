"""End-to-end acceptance checks for the paired-machine analysis.

Each test prints exactly one `criterion N: PASS/FAIL - detail` line (run
with -s to see them all) and then asserts, so a red test is an honest
statement that the implementation does not reproduce the expected
behaviour rather than a silenced one.
"""
import math
import time

import numpy as np
import pytest

from conftest import SEED, random_compatible_pose
from oracles import rotate_pose_step, stiffness_rank1
from pkm.config import SweepSettings
from pkm.geometry import Pose, Variant, default_params, home_height, home_pose
from pkm.grids import tilt_axes
from pkm.jacobian import build_jacobian
from pkm.kinematics import inverse_kinematics
from pkm.parasitic import integrate_parasitic_path, parasitic_map, solve_loop_closure
from pkm.stiffness import STIFFNESS_FIELDS, assemble_stiffness
from pkm.sweep import CompareSettings, condition_map, run_comparison, workspace_slice

Z3 = default_params(Variant.Z3_PRS)
A3 = default_params(Variant.A3_RPS)
BOTH = ((Z3, "z3"), (A3, "a3"))


def _report(n: int, ok: bool, detail: str):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    assert ok, line


def test_criterion_01_home_projector_pattern():
    expected = np.diag([0.0, 0.0, 1.0, 1.0, 1.0, 0.0])
    start = time.perf_counter()
    worst = 0.0
    for params, _ in BOTH:
        P = build_jacobian(params, home_pose(params)).P
        worst = max(worst, float(np.max(np.abs(P - expected))))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-10 and elapsed < 1.0
    _report(
        1,
        ok,
        f"home projector is diag(0,0,1,1,1,0) to {worst:.3g} (tol 1e-10), {elapsed:.3f}s",
    )


def test_criterion_02_projected_twists_annihilated():
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    worst = 0.0
    for params, _ in BOTH:
        for _ in range(100):
            pose = random_compatible_pose(params, rng).pose
            jac = build_jacobian(params, pose)
            X = rng.standard_normal((6, 1000))
            residual = np.linalg.norm(jac.Gc.T @ (jac.P @ X), axis=0)
            ratio = residual / np.linalg.norm(X, axis=0)
            worst = max(worst, float(ratio.max()))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-9 and elapsed < 10.0
    _report(
        2,
        ok,
        f"|Gc^T P x| <= {worst:.3g} |x| over 2x100 poses x 1000 twists "
        f"(tol 1e-9), {elapsed:.2f}s",
    )


def test_criterion_03_rates_match_finite_differences():
    rng = np.random.default_rng(SEED + 3)
    eps = 1e-6
    worst = 0.0
    for params, _ in BOTH:
        for _ in range(100):
            pose = random_compatible_pose(params, rng).pose
            jac = build_jacobian(params, pose)
            t = jac.P @ rng.standard_normal(6)
            v, w = t[:3], t[3:]
            plus = Pose(p=pose.p + eps * v, R=rotate_pose_step(pose.R, w, eps))
            minus = Pose(p=pose.p - eps * v, R=rotate_pose_step(pose.R, w, -eps))
            lp = np.array([s.actuated_length for s in inverse_kinematics(params, plus)])
            lm = np.array([s.actuated_length for s in inverse_kinematics(params, minus)])
            predicted = jac.Ga.T @ t
            scale = max(1.0, float(np.max(np.abs(predicted))))
            worst = max(worst, float(np.max(np.abs((lp - lm) / (2 * eps) - predicted))) / scale)
    ok = worst < 1e-5
    _report(
        3,
        ok,
        f"actuated rates vs central differences: worst relative {worst:.3g} "
        f"(tol 1e-5) over 100 poses per machine",
    )


def test_criterion_04_parasitic_fields_coincide():
    axes = tilt_axes(41, 40.0)
    fields = {label: parasitic_map(params, *axes) for params, label in BOTH}
    dx = np.max(np.abs(fields["z3"]["x_mm"].values - fields["a3"]["x_mm"].values))
    dy = np.max(np.abs(fields["z3"]["y_mm"].values - fields["a3"]["y_mm"].values))
    dg = np.max(np.abs(fields["z3"]["gamma_rad"].values - fields["a3"]["gamma_rad"].values))
    full = all(fields[label][name].mask.all() for label in ("z3", "a3")
               for name in ("x_mm", "y_mm", "gamma_rad"))
    ok = full and dx < 1e-8 and dy < 1e-8 and dg < 1e-10
    _report(
        4,
        ok,
        f"41x41 +/-40 deg parasitic maps differ by ({dx:.3g}, {dy:.3g}) mm, "
        f"{dg:.3g} rad (tol 1e-8 mm / 1e-10 rad)",
    )


def test_criterion_05_path_integration_consistent():
    psi_axis, theta_axis = tilt_axes(9, 40.0)
    worst_t = worst_g = 0.0
    for psi in psi_axis:
        for theta in theta_axis:
            closed = solve_loop_closure(Z3, psi, theta).parasitic
            tracked = integrate_parasitic_path(Z3, psi, theta).parasitic
            worst_t = max(worst_t, abs(tracked.x - closed.x), abs(tracked.y - closed.y))
            worst_g = max(worst_g, abs(tracked.gamma - closed.gamma))
    ok = worst_t < 1e-6 and worst_g < 1e-8
    _report(
        5,
        ok,
        f"integrated vs solved parasitics on 9x9: {worst_t:.3g} mm, {worst_g:.3g} rad "
        f"(tol 1e-6 mm / 1e-8 rad)",
    )


def test_criterion_06_stiffness_matrix_properties():
    rng = np.random.default_rng(SEED + 6)
    worst_sym = worst_psd = worst_oracle = 0.0
    for params, _ in BOTH:
        for _ in range(500):
            pose = random_compatible_pose(params, rng).pose
            result = assemble_stiffness(params, pose)
            K = result.K
            scale = float(np.max(np.abs(K)))
            worst_sym = max(worst_sym, float(np.max(np.abs(K - K.T))) / scale)
            worst_psd = max(worst_psd, -float(np.linalg.eigvalsh(K).min()) / scale)
            rates = [ls.k_a for ls in result.limb_stiffness] + [
                ls.k_c for ls in result.limb_stiffness
            ]
            K_ref = stiffness_rank1(result.jacobian.G, rates)
            worst_oracle = max(worst_oracle, float(np.max(np.abs(K - K_ref))) / scale)
    ok = worst_sym < 1e-8 and worst_psd < 1e-8 and worst_oracle < 1e-10
    _report(
        6,
        ok,
        f"K over 1000 poses: asymmetry {worst_sym:.3g} (tol 1e-8), "
        f"most negative eigenvalue {worst_psd:.3g} of scale (tol 1e-8), "
        f"rank-one oracle gap {worst_oracle:.3g} (tol 1e-10)",
    )


def test_criterion_07_home_stiffness_strict_dominance():
    z3_home = assemble_stiffness(Z3, home_pose(Z3))
    a3_home = assemble_stiffness(A3, home_pose(A3))
    comparisons = []
    strict = True
    for name in STIFFNESS_FIELDS:
        lhs = getattr(z3_home, name)
        rhs = getattr(a3_home, name)
        strict = strict and lhs > rhs
        comparisons.append(f"{name} {lhs:.6g} vs {rhs:.6g}")
    # the torsional entry ties exactly: both machines share the identical
    # constraint wrench set at home, so strict dominance in all six cannot
    # hold for this geometry
    _report(7, strict, "rail head strictly stiffer in all six at home: " + "; ".join(comparisons))


def test_criterion_08_condition_peak_ordering():
    axes = tilt_axes(41, 40.0)
    peaks = {}
    floor_ok = True
    for params, label in BOTH:
        grid = condition_map(params, *axes)
        values = grid.valid_values()
        floor_ok = floor_ok and bool(np.all(values >= 1.0))
        peaks[label] = float(values.max())
    ok = floor_ok and peaks["z3"] >= peaks["a3"]
    _report(
        8,
        ok,
        f"kappa >= 1 everywhere: {floor_ok}; peak kappa z3 {peaks['z3']:.6g} vs "
        f"a3 {peaks['a3']:.6g} on 41x41 +/-40 deg",
    )


def test_criterion_09_workspace_height_response():
    # the conditioning floor only starts to bite the deep slices beyond a
    # 46 deg half range, so the sweep window is 48 deg here rather than the
    # 40 deg used for the field maps
    axes = tilt_axes(41, 48.0)
    z0 = home_height(Z3)
    z3_top = workspace_slice(Z3, *axes, z=z0)[1]
    z3_low = workspace_slice(Z3, *axes, z=z0 - 100.0)[1]
    a3_areas = [workspace_slice(A3, *axes, z=z0 + dz)[1] for dz in (0.0, -50.0, -100.0)]
    invariant = abs(z3_low - z3_top) <= 0.01 * z3_top
    shrinking = a3_areas[0] > a3_areas[1] > a3_areas[2]
    ok = invariant and shrinking
    _report(
        9,
        ok,
        f"rail areas {z3_top:.6g}/{z3_low:.6g} rad^2 (within 1%: {invariant}); "
        f"strut areas {a3_areas[0]:.6g} > {a3_areas[1]:.6g} > {a3_areas[2]:.6g}: {shrinking}",
    )


def test_criterion_10_comparison_reproducible(tmp_path):
    settings = SweepSettings()  # stock 121x121 over +/-40 deg
    start = time.perf_counter()
    first = tmp_path / "first"
    run_comparison(
        CompareSettings(params_z3=Z3, params_a3=A3, out_dir=first, sweep=settings)
    )
    elapsed = time.perf_counter() - start
    second = tmp_path / "second"
    run_comparison(
        CompareSettings(params_z3=Z3, params_a3=A3, out_dir=second, sweep=settings)
    )
    names = sorted(p.name for p in first.iterdir())
    identical = names == sorted(p.name for p in second.iterdir()) and all(
        (first / name).read_bytes() == (second / name).read_bytes() for name in names
    )
    ok = identical and elapsed < 60.0
    _report(
        10,
        ok,
        f"full comparison bundle: {len(names)} files, rerun byte-identical: "
        f"{identical}, first run {elapsed:.1f}s (budget 60s)",
    )
