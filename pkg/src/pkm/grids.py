"""Tilt-space sweep grids and their CSV serialization.

Scalar fields are sampled on a rectangular (psi, theta) grid, row-major
with psi as the outer axis.  Cells whose evaluation failed are masked out
and serialize as empty CSV fields, never as sentinel numbers.  Floats are
written as decimal text with 12 significant digits, which re-parses and
re-emits byte-identically.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np


def fmt12(value: float) -> str:
    return f"{value:.12g}"


@dataclass(frozen=True, eq=False)
class SweepGrid:
    """One scalar field over a tilt grid; mask is True where the cell is valid."""

    psi_axis: np.ndarray
    theta_axis: np.ndarray
    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.psi_axis, dtype=float)
        theta = np.asarray(self.theta_axis, dtype=float)
        values = np.asarray(self.values, dtype=float)
        mask = np.asarray(self.mask, dtype=bool)
        if psi.ndim != 1 or theta.ndim != 1:
            raise ValueError("axes must be one-dimensional")
        if np.any(np.diff(psi) <= 0.0) or np.any(np.diff(theta) <= 0.0):
            raise ValueError("axes must be strictly increasing")
        if values.shape != (psi.size, theta.size) or mask.shape != values.shape:
            raise ValueError("field shape must be (len(psi_axis), len(theta_axis))")
        for a in (psi, theta, values, mask):
            a.setflags(write=False)
        object.__setattr__(self, "psi_axis", psi)
        object.__setattr__(self, "theta_axis", theta)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)

    def valid_values(self) -> np.ndarray:
        return self.values[self.mask]


def grid_from_cells(psi_axis, theta_axis, values, mask=None) -> SweepGrid:
    values = np.asarray(values, dtype=float)
    if mask is None:
        mask = np.isfinite(values)
    return SweepGrid(psi_axis=psi_axis, theta_axis=theta_axis, values=values, mask=mask)


def tilt_axes(n: int, max_deg: float) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric n-point tilt axes in radians over [-max_deg, max_deg]."""
    if n < 2:
        raise ValueError("grid needs at least 2 points per axis")
    axis = np.radians(np.linspace(-max_deg, max_deg, n))
    return axis, axis.copy()


def write_map_csv(path, fields: dict[str, SweepGrid], units_note: str | None = None) -> None:
    """Emit named grid fields side by side, one row per (psi, theta) cell."""
    grids = list(fields.values())
    if not grids:
        raise ValueError("no fields to write")
    first = grids[0]
    for grid in grids[1:]:
        if not (
            np.array_equal(grid.psi_axis, first.psi_axis)
            and np.array_equal(grid.theta_axis, first.theta_axis)
        ):
            raise ValueError("all fields must share the same axes")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if units_note:
            fh.write(f"# {units_note}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["psi_deg", "theta_deg", *fields.keys()])
        for i, psi in enumerate(first.psi_axis):
            for j, theta in enumerate(first.theta_axis):
                row = [fmt12(math.degrees(psi)), fmt12(math.degrees(theta))]
                for grid in grids:
                    row.append(fmt12(grid.values[i, j]) if grid.mask[i, j] else "")
                writer.writerow(row)


def read_map_csv(path) -> tuple[list[str], list[list[float | None]]]:
    """Parse a map CSV back into header names and per-row optional floats."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    rows = []
    for record in reader:
        rows.append([float(cell) if cell != "" else None for cell in record])
    return header, rows
