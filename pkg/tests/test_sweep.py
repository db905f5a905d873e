import filecmp
import math

import numpy as np
import pytest

from pkm.config import SweepSettings
from pkm.geometry import MechanismParams, Variant, default_params, home_height
from pkm.grids import tilt_axes
from pkm.sweep import (
    CompareSettings,
    DEFAULT_HEAVE_OFFSETS,
    condition_map,
    run_comparison,
    workspace_slice,
)

SMALL = SweepSettings(grid_n=7, tilt_max_deg=40.0)


def test_condition_map_center_and_floor(params):
    psi_axis, theta_axis = tilt_axes(5, 40.0)
    grid = condition_map(params, psi_axis, theta_axis)
    assert grid.mask.all()
    assert grid.values[2, 2] == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert np.all(grid.valid_values() >= 1.0)
    # conditioning worsens towards the sweep corners
    assert grid.values[0, 4] > grid.values[2, 2]


def test_condition_is_heave_invariant_for_rail_machine(z3_params):
    psi_axis, theta_axis = tilt_axes(5, 40.0)
    z0 = home_height(z3_params)
    top = condition_map(z3_params, psi_axis, theta_axis, z=z0)
    low = condition_map(z3_params, psi_axis, theta_axis, z=z0 - 100.0)
    assert np.max(np.abs(top.values - low.values)) < 1e-9


def test_condition_worsens_with_depth_for_strut_machine(a3_params):
    psi_axis, theta_axis = tilt_axes(5, 40.0)
    z0 = home_height(a3_params)
    top = condition_map(a3_params, psi_axis, theta_axis, z=z0)
    low = condition_map(a3_params, psi_axis, theta_axis, z=z0 - 100.0)
    assert low.values[0, 4] > top.values[0, 4]


def test_workspace_area_counts_cells(params):
    psi_axis, theta_axis = tilt_axes(6, 30.0)
    grid, area = workspace_slice(params, psi_axis, theta_axis)
    cell = (psi_axis[1] - psi_axis[0]) * (theta_axis[1] - theta_axis[0])
    assert area == pytest.approx(float(grid.values.sum()) * cell)
    assert set(np.unique(grid.values)) <= {0.0, 1.0}
    assert grid.mask.all()


def test_workspace_threshold_monotonicity(params):
    psi_axis, theta_axis = tilt_axes(7, 45.0)
    _, permissive = workspace_slice(params, psi_axis, theta_axis, kappa_min_inv=1e-6)
    _, moderate = workspace_slice(params, psi_axis, theta_axis, kappa_min_inv=0.2)
    _, strict = workspace_slice(params, psi_axis, theta_axis, kappa_min_inv=0.6)
    assert permissive >= moderate >= strict
    # with the threshold effectively off, every solvable cell is admitted
    cell = (psi_axis[1] - psi_axis[0]) * (theta_axis[1] - theta_axis[0])
    assert permissive == pytest.approx(49 * cell)
    # kappa = sqrt(2) at home caps the achievable floor at 1/sqrt(2)
    _, impossible = workspace_slice(params, psi_axis, theta_axis, kappa_min_inv=0.9)
    assert impossible == 0.0


def test_workspace_respects_stroke_limits():
    tight = MechanismParams(variant=Variant.Z3_PRS, stroke_min=-40.0, stroke_max=40.0)
    open_limits = default_params(Variant.Z3_PRS)
    psi_axis, theta_axis = tilt_axes(7, 40.0)
    _, small = workspace_slice(tight, psi_axis, theta_axis)
    _, full = workspace_slice(open_limits, psi_axis, theta_axis)
    assert small < full


def test_rail_workspace_is_heave_invariant(z3_params):
    psi_axis, theta_axis = tilt_axes(15, 48.0)
    z0 = home_height(z3_params)
    _, top = workspace_slice(z3_params, psi_axis, theta_axis, z=z0)
    _, low = workspace_slice(z3_params, psi_axis, theta_axis, z=z0 - 100.0)
    assert low == top


def test_strut_workspace_shrinks_with_depth(a3_params):
    psi_axis, theta_axis = tilt_axes(15, 48.0)
    z0 = home_height(a3_params)
    areas = [
        workspace_slice(a3_params, psi_axis, theta_axis, z=z0 + dz)[1]
        for dz in DEFAULT_HEAVE_OFFSETS
    ]
    assert areas[0] > areas[1] > areas[2]


def _run(tmp_path, name, workers=1):
    out = tmp_path / name
    settings = CompareSettings(
        params_z3=default_params(Variant.Z3_PRS),
        params_a3=default_params(Variant.A3_RPS),
        out_dir=out,
        sweep=SMALL,
        workers=workers,
    )
    return out, run_comparison(settings)


def test_comparison_bundle_inventory(tmp_path):
    out, report = _run(tmp_path, "bundle")
    for label in ("z3", "a3"):
        assert (out / f"{label}_parasitic.csv").exists()
        for tag in ("x", "y", "gamma"):
            assert (out / f"{label}_parasitic_{tag}.svg").exists()
        assert (out / f"{label}_condition.csv").exists()
        assert (out / f"{label}_condition.svg").exists()
        for dz in ("0", "-50", "-100"):
            assert (out / f"{label}_workspace_dz{dz}.csv").exists()
            assert (out / f"{label}_workspace_dz{dz}.svg").exists()
        assert (out / f"{label}_stiffness_rotational.csv").exists()
        assert (out / f"{label}_stiffness_parasitic.csv").exists()
        for field in ("kpx", "kpy", "kpz", "kax", "kay", "kaz"):
            assert (out / f"{label}_stiffness_{field}.svg").exists()
    report_text = (out / "report.txt").read_text(encoding="utf-8")
    assert report.as_text() == report_text
    assert len(list(out.iterdir())) == 41


def test_comparison_flags_on_shared_constraints(tmp_path):
    _, report = _run(tmp_path, "flags")
    assert report.flags["parasitic_fields_identical"] is True
    assert report.flags["stiffness_home_dominant"] == "z3"
    assert report.flags["condition_peak_machine"] in {"z3", "a3"}
    assert report.flags["workspace_z3_height_invariant"] is True
    assert report.grid_n == 7
    assert report.heave_offsets == DEFAULT_HEAVE_OFFSETS
    text = report.as_text()
    for key in report.flags:
        assert key in text
    assert "kappa" in report.metrics
    assert set(report.metrics["kappa"]) == {"z3", "a3"}


def test_comparison_reruns_byte_identical(tmp_path):
    first, _ = _run(tmp_path, "one")
    second, _ = _run(tmp_path, "two")
    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    match, mismatch, errors = filecmp.cmpfiles(first, second, names, shallow=False)
    assert mismatch == [] and errors == []
    assert len(match) == len(names)


def test_comparison_worker_count_does_not_change_bytes(tmp_path):
    serial, _ = _run(tmp_path, "serial", workers=1)
    forked, _ = _run(tmp_path, "forked", workers=2)
    names = sorted(p.name for p in serial.iterdir())
    match, mismatch, errors = filecmp.cmpfiles(serial, forked, names, shallow=False)
    assert mismatch == [] and errors == []
