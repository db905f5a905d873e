"""Parasitic motion: coupling, loop-closure solving and path integration.

Commanding tilts (psi, theta) forces the platform centre sideways and
twists it about z; heave is the one translation the constraints leave
alone.  Both machines share the same three constraint planes, so their
parasitic fields coincide identically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConstraintViolation,
    CouplingSingular,
    IntegrationDiverged,
    NoConvergence,
    UnreachablePose,
)
from .geometry import (
    MechanismParams,
    Pose,
    home_height,
    orientation_from_tilts,
    pose_from_tilts,
)
from .grids import SweepGrid, grid_from_cells
from .kinematics import inverse_kinematics

TILT_LIMIT = math.radians(60.0) + 1e-12


@dataclass(frozen=True, eq=False)
class ParasiticCoupling:
    """C maps independent rates (w_x, w_y) to dependent rates (v_x, v_y, w_z)."""

    C1: np.ndarray
    C2: np.ndarray
    C: np.ndarray


@dataclass(frozen=True, eq=False)
class ParasiticShift:
    x: float
    y: float
    gamma: float


@dataclass(frozen=True, eq=False)
class CompatiblePose:
    """A pose on the constraint manifold, keyed by its commanded coordinates."""

    pose: Pose
    psi: float
    theta: float
    z: float
    parasitic: ParasiticShift


def _attachments(params: MechanismParams, R: np.ndarray) -> np.ndarray:
    body = params.r_platform * np.array(
        [[math.cos(xi), math.sin(xi), 0.0] for xi in params.azimuths]
    )
    return body @ R.T


def _coupling_rows(params: MechanismParams, attachments: np.ndarray):
    C1 = np.empty((3, 3))
    C2 = np.empty((3, 2))
    for i, xi in enumerate(params.azimuths):
        c, s = math.cos(xi), math.sin(xi)
        ax, ay, az = attachments[i]
        C1[i] = (-s, c, ax * c + ay * s)
        C2[i] = (az * c, az * s)
    return C1, C2


def coupling_matrices(params: MechanismParams, pose: Pose) -> ParasiticCoupling:
    """Expand the constraint rows into the dependent/independent rate split."""
    C1, C2 = _coupling_rows(params, _attachments(params, pose.R))
    det = np.linalg.det(C1)
    if abs(det) < 1e-9 * np.linalg.norm(C1, 2) ** 3:
        raise CouplingSingular(f"coupling system determinant {det:.3g} too small")
    C = np.linalg.solve(C1, C2)
    return ParasiticCoupling(C1=C1, C2=C2, C=C)


def _closure_residual(params: MechanismParams, psi: float, theta: float, z: float, u):
    """Tangential offsets g_iy and their Jacobian with respect to (x, y, gamma)."""
    R = orientation_from_tilts(psi, theta, u[2])
    attachments = _attachments(params, R)
    C1, _ = _coupling_rows(params, attachments)
    p = np.array([u[0], u[1], z])
    residual = np.empty(3)
    for i, xi in enumerate(params.azimuths):
        joint = p + attachments[i]
        residual[i] = -math.sin(xi) * joint[0] + math.cos(xi) * joint[1]
    return residual, C1


def _check_tilt_bounds(psi: float, theta: float) -> None:
    if abs(psi) > TILT_LIMIT or abs(theta) > TILT_LIMIT:
        raise ValueError("tilt targets beyond 60 degrees are outside the supported range")


def solve_loop_closure(
    params: MechanismParams,
    psi: float,
    theta: float,
    z: float | None = None,
    tol: float = 1e-10,
    max_iter: int = 100,
    validate: bool = True,
) -> CompatiblePose:
    """Newton solve for the parasitic coordinates (x, y, gamma) at given tilts.

    Steps are damped by halving (at most 8 times) whenever the residual
    norm fails to decrease.  The heave never enters the closure equations,
    so the returned parasitic triple is independent of z.
    """
    _check_tilt_bounds(psi, theta)
    if z is None:
        z = home_height(params)
    u = np.zeros(3)
    residual, jac = _closure_residual(params, psi, theta, z, u)
    norm = np.max(np.abs(residual))
    converged = norm < tol
    for _ in range(max_iter):
        if converged:
            break
        try:
            step = np.linalg.solve(jac, -residual)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"closure Jacobian singular: {exc}", residual=norm)
        scale = 1.0
        for _halving in range(9):
            trial = u + scale * step
            trial_residual, trial_jac = _closure_residual(params, psi, theta, z, trial)
            trial_norm = np.max(np.abs(trial_residual))
            if trial_norm < norm or trial_norm < tol:
                break
            scale *= 0.5
        else:
            raise NoConvergence("damping exhausted without residual decrease", residual=norm)
        u, residual, jac, norm = trial, trial_residual, trial_jac, trial_norm
        converged = norm < tol
    if not converged:
        raise NoConvergence(
            f"no convergence after {max_iter} iterations (residual {norm:.3g} mm)",
            residual=norm,
        )
    return _compatible_pose(params, psi, theta, z, u, validate)


def _compatible_pose(params, psi, theta, z, u, validate) -> CompatiblePose:
    pose = pose_from_tilts(psi, theta, z, x=u[0], y=u[1], gamma=u[2])
    if validate:
        inverse_kinematics(params, pose)
    return CompatiblePose(
        pose=pose,
        psi=psi,
        theta=theta,
        z=z,
        parasitic=ParasiticShift(x=float(u[0]), y=float(u[1]), gamma=float(u[2])),
    )


def _path_rates(params, psi_target, theta_target, s, u):
    """State derivative along the straight tilt path at parameter s."""
    psi = s * psi_target
    theta = s * theta_target
    gamma = u[2]
    cg, sg = math.cos(gamma), math.sin(gamma)
    ct = math.cos(theta)
    # world angular rate of Rz(gamma(s)) Ry(theta(s)) Rx(psi(s)); gamma_dot
    # only enters w_z, so the horizontal components are known a priori.
    wx = -sg * theta_target + cg * ct * psi_target
    wy = cg * theta_target + sg * ct * psi_target
    R = orientation_from_tilts(psi, theta, gamma)
    attachments = _attachments(params, R)
    C1, C2 = _coupling_rows(params, attachments)
    dependent = np.linalg.solve(C1, C2 @ np.array([wx, wy]))
    gamma_dot = dependent[2] + psi_target * math.sin(theta)
    return np.array([dependent[0], dependent[1], gamma_dot])


def integrate_parasitic_path(
    params: MechanismParams,
    psi: float,
    theta: float,
    z: float | None = None,
    steps: int = 200,
) -> CompatiblePose:
    """Track the parasitic motion along the straight path from zero tilt.

    Classical fixed-step fourth-order Runge-Kutta on the path parameter.
    The platform angular rate is the exact one of the time-varying
    orientation, not a small-angle approximation.  Raises
    IntegrationDiverged when the end point drifts off the constraint
    manifold by more than the compatibility tolerance.
    """
    _check_tilt_bounds(psi, theta)
    if z is None:
        z = home_height(params)
    if steps < 1:
        raise ValueError("steps must be positive")
    h = 1.0 / steps
    u = np.zeros(3)
    for k in range(steps):
        s = k * h
        try:
            k1 = _path_rates(params, psi, theta, s, u)
            k2 = _path_rates(params, psi, theta, s + 0.5 * h, u + 0.5 * h * k1)
            k3 = _path_rates(params, psi, theta, s + 0.5 * h, u + 0.5 * h * k2)
            k4 = _path_rates(params, psi, theta, s + h, u + h * k3)
        except np.linalg.LinAlgError as exc:
            raise IntegrationDiverged(f"coupling became singular mid-path: {exc}")
        u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(u)):
            raise IntegrationDiverged(f"state blew up at path parameter {s + h:.4g}")
    residual, _ = _closure_residual(params, psi, theta, z, u)
    drift = float(np.max(np.abs(residual)))
    if drift > 1e-6:
        raise IntegrationDiverged(f"end-point constraint residual {drift:.3g} mm")
    return _compatible_pose(params, psi, theta, z, u, validate=True)


def parasitic_map(
    params: MechanismParams,
    psi_axis: np.ndarray,
    theta_axis: np.ndarray,
    z: float | None = None,
) -> dict[str, SweepGrid]:
    """Parasitic displacement fields over a tilt grid, keyed by CSV column name."""
    if z is None:
        z = home_height(params)
    shape = (len(psi_axis), len(theta_axis))
    x = np.full(shape, np.nan)
    y = np.full(shape, np.nan)
    gamma = np.full(shape, np.nan)
    for i, psi in enumerate(psi_axis):
        for j, theta in enumerate(theta_axis):
            try:
                cp = solve_loop_closure(params, psi, theta, z, validate=False)
            except (NoConvergence, CouplingSingular, ConstraintViolation, UnreachablePose):
                continue
            x[i, j] = cp.parasitic.x
            y[i, j] = cp.parasitic.y
            gamma[i, j] = cp.parasitic.gamma
    return {
        "x_mm": grid_from_cells(psi_axis, theta_axis, x),
        "y_mm": grid_from_cells(psi_axis, theta_axis, y),
        "gamma_rad": grid_from_cells(psi_axis, theta_axis, gamma),
    }
