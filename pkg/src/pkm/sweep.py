"""Grid sweeps and the full two-machine comparison pipeline.

Every cell is an independent pure evaluation, so sweeps can be chunked
across worker processes; results are assembled by grid index and the
emitted files are byte-identical for any worker count.
"""
from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import SweepSettings
from .errors import (
    ConstraintViolation,
    CouplingSingular,
    NoConvergence,
    RankDeficiency,
    SingularConfiguration,
    SingularLimb,
    UnreachablePose,
)
from .geometry import MechanismParams, home_height, pose_from_tilts
from .grids import SweepGrid, fmt12, grid_from_cells, tilt_axes, write_map_csv
from .jacobian import build_jacobian
from .kinematics import inverse_kinematics
from .parasitic import parasitic_map, solve_loop_closure
from .stiffness import STIFFNESS_FIELDS, assemble_stiffness, stiffness_map_rotational
from .svg import emit_heatmap_svg

DEFAULT_HEAVE_OFFSETS = (0.0, -50.0, -100.0)

_CELL_ERRORS = (
    NoConvergence,
    CouplingSingular,
    ConstraintViolation,
    UnreachablePose,
    SingularLimb,
    SingularConfiguration,
    RankDeficiency,
)

_UNITS_NOTE = (
    "units: angles deg, lengths mm; kpx,kpy,kpz N/mm; kax,kay,kaz N*mm/rad; kappa dimensionless"
)


def condition_map(
    params: MechanismParams,
    psi_axis: np.ndarray,
    theta_axis: np.ndarray,
    z: float | None = None,
) -> SweepGrid:
    """Homogenized condition number at the compatible pose of every cell."""
    if z is None:
        z = home_height(params)
    values = np.full((len(psi_axis), len(theta_axis)), np.nan)
    for i, psi in enumerate(psi_axis):
        for j, theta in enumerate(theta_axis):
            try:
                cp = solve_loop_closure(params, psi, theta, z, validate=False)
                states = inverse_kinematics(params, cp.pose)
                values[i, j] = build_jacobian(params, cp.pose, states).kappa
            except _CELL_ERRORS:
                continue
    return grid_from_cells(psi_axis, theta_axis, values)


def _cell_inside(params: MechanismParams, psi, theta, z, kappa_min_inv) -> bool:
    try:
        cp = solve_loop_closure(params, psi, theta, z, validate=False)
        states = inverse_kinematics(params, cp.pose)
        kappa = build_jacobian(params, cp.pose, states).kappa
    except _CELL_ERRORS:
        return False
    lo, hi = params.stroke_limits()
    if any(not (lo <= st.actuated_length <= hi) for st in states):
        return False
    return 1.0 / kappa >= kappa_min_inv


def workspace_slice(
    params: MechanismParams,
    psi_axis: np.ndarray,
    theta_axis: np.ndarray,
    z: float | None = None,
    kappa_min_inv: float = 0.05,
) -> tuple[SweepGrid, float]:
    """Boolean orientation-workspace slice at heave z and its tilt-space area.

    A cell is inside when the closure solves, the strokes stay within their
    limits and the conditioning clears 1/kappa >= kappa_min_inv.  The area
    is cell count times cell size, in rad^2.
    """
    if z is None:
        z = home_height(params)
    inside = np.zeros((len(psi_axis), len(theta_axis)))
    for i, psi in enumerate(psi_axis):
        for j, theta in enumerate(theta_axis):
            if _cell_inside(params, psi, theta, z, kappa_min_inv):
                inside[i, j] = 1.0
    cell = float(psi_axis[1] - psi_axis[0]) * float(theta_axis[1] - theta_axis[0])
    grid = SweepGrid(
        psi_axis=psi_axis, theta_axis=theta_axis, values=inside, mask=np.ones_like(inside, bool)
    )
    return grid, float(inside.sum()) * cell


# compare bundles everything per cell so the closure is solved only once;
# field order of the flat per-cell record:
_REC_FIELDS = (
    "x_mm",
    "y_mm",
    "gamma_rad",
    "kappa",
    *STIFFNESS_FIELDS,
    "inside_0",
    "inside_1",
    "inside_2",
)
_NREC = len(_REC_FIELDS)


def _compare_row(task) -> np.ndarray:
    params, psi, theta_axis, z0, offsets, kappa_min_inv = task
    out = np.full((len(theta_axis), _NREC), np.nan)
    out[:, -3:] = 0.0
    lo, hi = params.stroke_limits()
    for j, theta in enumerate(theta_axis):
        try:
            cp = solve_loop_closure(params, psi, theta, z0, validate=False)
        except _CELL_ERRORS:
            continue
        shift = cp.parasitic
        out[j, 0:3] = (shift.x, shift.y, shift.gamma)
        for k, dz in enumerate(offsets):
            # the parasitic triple does not depend on heave, reuse it
            pose = pose_from_tilts(psi, theta, z0 + dz, shift.x, shift.y, shift.gamma)
            try:
                states = inverse_kinematics(params, pose)
                jac = build_jacobian(params, pose, states)
            except _CELL_ERRORS:
                continue
            strokes_ok = all(lo <= st.actuated_length <= hi for st in states)
            out[j, _NREC - 3 + k] = float(strokes_ok and 1.0 / jac.kappa >= kappa_min_inv)
            if k == 0:
                out[j, 3] = jac.kappa
                result = assemble_stiffness(params, pose, states, jac)
                for n, name in enumerate(STIFFNESS_FIELDS):
                    out[j, 4 + n] = getattr(result, name)
    return out


def _machine_fields(params, psi_axis, theta_axis, z0, offsets, kappa_min_inv, workers):
    tasks = [
        (params, float(psi), theta_axis, z0, offsets, kappa_min_inv) for psi in psi_axis
    ]
    if workers > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers) as pool:
            rows = pool.map(_compare_row, tasks, chunksize=max(1, len(tasks) // (4 * workers)))
    else:
        rows = [_compare_row(task) for task in tasks]
    stacked = np.stack(rows)
    fields = {}
    for n, name in enumerate(_REC_FIELDS):
        values = stacked[:, :, n]
        if name.startswith("inside_"):
            mask = np.ones_like(values, dtype=bool)
            fields[name] = SweepGrid(
                psi_axis=psi_axis, theta_axis=theta_axis, values=values, mask=mask
            )
        else:
            fields[name] = grid_from_cells(psi_axis, theta_axis, values)
    return fields


@dataclass(frozen=True)
class CompareSettings:
    params_z3: MechanismParams
    params_a3: MechanismParams
    out_dir: str | Path
    sweep: SweepSettings = field(default_factory=SweepSettings)
    heave_offsets: tuple[float, ...] = DEFAULT_HEAVE_OFFSETS
    workers: int = 1


@dataclass(frozen=True)
class ComparisonReport:
    """Aggregates of the paired sweeps plus the qualitative verdict flags."""

    grid_n: int
    tilt_max_deg: float
    z0: float
    heave_offsets: tuple[float, ...]
    metrics: dict
    flags: dict

    def as_text(self) -> str:
        lines = ["two-machine kinetostatic comparison", "=" * 36, ""]
        lines.append(f"grid: {self.grid_n} x {self.grid_n} over +/-{fmt12(self.tilt_max_deg)} deg")
        offsets = ", ".join(fmt12(dz) for dz in self.heave_offsets)
        lines.append(f"heave: z0 = {fmt12(self.z0)} mm, offsets [{offsets}] mm")
        lines.append("")
        lines.append("metric, machine, min, max, mean (over valid cells)")
        for name in sorted(self.metrics):
            per_machine = self.metrics[name]
            for machine in sorted(per_machine):
                stats = per_machine[machine]
                lines.append(
                    f"{name}, {machine}, {fmt12(stats['min'])}, "
                    f"{fmt12(stats['max'])}, {fmt12(stats['mean'])}"
                )
        lines.append("")
        lines.append("flags")
        lines.append("-----")
        for name in sorted(self.flags):
            value = self.flags[name]
            text = str(value).lower() if isinstance(value, bool) else str(value)
            lines.append(f"{name}: {text}")
        lines.append("")
        return "\n".join(lines)


def _stats(grid: SweepGrid) -> dict:
    valid = grid.valid_values()
    if valid.size == 0:
        return {"min": math.nan, "max": math.nan, "mean": math.nan}
    return {"min": float(valid.min()), "max": float(valid.max()), "mean": float(valid.mean())}


def _home_cell(psi_axis, theta_axis) -> tuple[int, int]:
    return int(np.argmin(np.abs(psi_axis))), int(np.argmin(np.abs(theta_axis)))


def _dominant_home_machine(fields_by_machine, psi_axis, theta_axis) -> str:
    i, j = _home_cell(psi_axis, theta_axis)
    winners = set()
    for name in STIFFNESS_FIELDS:
        z3 = fields_by_machine["z3"][name].values[i, j]
        a3 = fields_by_machine["a3"][name].values[i, j]
        if math.isnan(z3) or math.isnan(a3):
            return "undetermined"
        scale = max(abs(z3), abs(a3), 1.0)
        if abs(z3 - a3) <= 1e-9 * scale:
            continue
        winners.add("z3" if z3 > a3 else "a3")
    if len(winners) == 1:
        return winners.pop()
    return "tie" if not winners else "mixed"


def run_comparison(settings: CompareSettings) -> ComparisonReport:
    """Run all paired sweeps, write the CSV/SVG bundle and summarize.

    Output naming is {machine}_{figure_class}[...].csv/.svg inside out_dir.
    Re-running with identical settings reproduces every file byte for byte.
    """
    out_dir = Path(settings.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sweep = settings.sweep
    z3 = settings.params_z3
    a3 = settings.params_a3
    z0 = sweep.z_mm if sweep.z_mm is not None else home_height(z3)
    psi_axis, theta_axis = tilt_axes(sweep.grid_n, sweep.tilt_max_deg)
    cell = float(psi_axis[1] - psi_axis[0]) * float(theta_axis[1] - theta_axis[0])

    fields_by_machine = {}
    for label, params in (("z3", z3), ("a3", a3)):
        fields_by_machine[label] = _machine_fields(
            params,
            psi_axis,
            theta_axis,
            z0,
            settings.heave_offsets,
            sweep.kappa_min_inv,
            settings.workers,
        )

    metrics: dict = {}
    areas: dict = {}
    for label, fields in fields_by_machine.items():
        write_map_csv(
            out_dir / f"{label}_parasitic.csv",
            {name: fields[name] for name in ("x_mm", "y_mm", "gamma_rad")},
            units_note=_UNITS_NOTE,
        )
        for name, tag in (("x_mm", "x"), ("y_mm", "y"), ("gamma_rad", "gamma")):
            emit_heatmap_svg(
                fields[name],
                "coolwarm",
                out_dir / f"{label}_parasitic_{tag}.svg",
                title=f"{label} parasitic {tag}",
                value_label="mm" if tag != "gamma" else "rad",
            )
        write_map_csv(
            out_dir / f"{label}_condition.csv",
            {"kappa": fields["kappa"]},
            units_note=_UNITS_NOTE,
        )
        emit_heatmap_svg(
            fields["kappa"],
            "viridis",
            out_dir / f"{label}_condition.svg",
            title=f"{label} condition number",
            value_label="kappa",
        )
        for k, dz in enumerate(settings.heave_offsets):
            grid = fields[f"inside_{k}"]
            write_map_csv(
                out_dir / f"{label}_workspace_dz{fmt12(dz)}.csv",
                {"inside": grid},
                units_note=_UNITS_NOTE,
            )
            emit_heatmap_svg(
                grid,
                "viridis",
                out_dir / f"{label}_workspace_dz{fmt12(dz)}.svg",
                title=f"{label} workspace at z0{fmt12(dz) if dz < 0 else '+' + fmt12(dz)}",
                value_label="inside",
            )
            areas.setdefault(label, []).append(float(grid.values.sum()) * cell)
        stiffness_fields = {
            "x_par_mm": fields["x_mm"],
            "y_par_mm": fields["y_mm"],
            **{name: fields[name] for name in STIFFNESS_FIELDS},
        }
        write_map_csv(
            out_dir / f"{label}_stiffness_rotational.csv",
            stiffness_fields,
            units_note=_UNITS_NOTE,
        )
        write_map_csv(
            out_dir / f"{label}_stiffness_parasitic.csv",
            stiffness_fields,
            units_note=_UNITS_NOTE + "; rows keyed by (x_par_mm, y_par_mm)",
        )
        for name in STIFFNESS_FIELDS:
            emit_heatmap_svg(
                fields[name],
                "viridis",
                out_dir / f"{label}_stiffness_{name}.svg",
                title=f"{label} {name}",
                value_label="N/mm" if name.startswith("kp") else "N*mm/rad",
            )
        for name in ("x_mm", "y_mm", "gamma_rad", "kappa", *STIFFNESS_FIELDS):
            metrics.setdefault(name, {})[label] = _stats(fields[name])
        for k, dz in enumerate(settings.heave_offsets):
            metrics.setdefault(f"workspace_area_dz{fmt12(dz)}", {})[label] = {
                "min": areas[label][k],
                "max": areas[label][k],
                "mean": areas[label][k],
            }

    flags = _verdict_flags(fields_by_machine, areas, psi_axis, theta_axis)
    report = ComparisonReport(
        grid_n=sweep.grid_n,
        tilt_max_deg=sweep.tilt_max_deg,
        z0=z0,
        heave_offsets=settings.heave_offsets,
        metrics=metrics,
        flags=flags,
    )
    with open(out_dir / "report.txt", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report.as_text())
    return report


def _verdict_flags(fields_by_machine, areas, psi_axis, theta_axis) -> dict:
    z3f = fields_by_machine["z3"]
    a3f = fields_by_machine["a3"]

    both = z3f["x_mm"].mask & a3f["x_mm"].mask
    dx = np.abs(z3f["x_mm"].values - a3f["x_mm"].values)[both]
    dy = np.abs(z3f["y_mm"].values - a3f["y_mm"].values)[both]
    dg = np.abs(z3f["gamma_rad"].values - a3f["gamma_rad"].values)[both]
    parasitic_identical = bool(
        both.any() and dx.max() <= 1e-8 and dy.max() <= 1e-8 and dg.max() <= 1e-10
    )

    kappa_z3 = z3f["kappa"].valid_values()
    kappa_a3 = a3f["kappa"].valid_values()
    if kappa_z3.size and kappa_a3.size:
        condition_peak = "z3" if kappa_z3.max() >= kappa_a3.max() else "a3"
    else:
        condition_peak = "undetermined"

    z3_areas = areas["z3"]
    a3_areas = areas["a3"]
    z3_invariant = bool(
        z3_areas[0] > 0.0
        and abs(z3_areas[-1] - z3_areas[0]) <= 0.01 * z3_areas[0]
    )
    a3_shrinks = bool(all(b < a for a, b in zip(a3_areas, a3_areas[1:])))

    return {
        "parasitic_fields_identical": parasitic_identical,
        "stiffness_home_dominant": _dominant_home_machine(
            fields_by_machine, psi_axis, theta_axis
        ),
        "condition_peak_machine": condition_peak,
        "workspace_z3_height_invariant": z3_invariant,
        "workspace_a3_shrinks_with_height": a3_shrinks,
    }


__all__ = [
    "CompareSettings",
    "ComparisonReport",
    "DEFAULT_HEAVE_OFFSETS",
    "condition_map",
    "parasitic_map",
    "run_comparison",
    "stiffness_map_rotational",
    "workspace_slice",
]
