"""Time integration of the reaction-advection-diffusion system on a truncated cylinder

    T_t + u(y) T_x = Lap T + f(y, T) Y - h(y, T)
    Y_t + u(y) Y_x = Le^{-1} Lap Y - f(y, T) Y

on [x_min, x_max] x [0, L] with homogeneous Neumann conditions on every side.

One step is a Lie splitting reaction -> advection -> diffusion.  Each substep
is monotone and preserves T >= 0 and 0 <= Y <= 1 under the step bound
dt <= min(cfl * dx / max|u|, loss_factor / K), so the bound invariants are
exact properties of the scheme, not just of the PDE.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, List, Optional

import logging

import numpy as np
from scipy.linalg import solve_banded

from .cross_section import CrossSectionModel, trapezoid_weights
from .errors import (BadGrid, BoundInvariantBroken, CflViolation,
                     FrontTouchedBoundary, SandwichInfeasible)

log = logging.getLogger(__name__)

ROUNDING_TOL = 1e-12


@dataclass(frozen=True)
class CylinderGrid:
    x_min: float
    x_max: float
    n_x: int
    y: np.ndarray
    min_length: float = 40.0

    def __post_init__(self):
        if not self.x_max - self.x_min >= self.min_length:
            raise BadGrid("truncated cylinder too short", length=self.x_max - self.x_min,
                          minimum=self.min_length)
        if int(self.n_x) != self.n_x or self.n_x < 3:
            raise BadGrid("n_x must be an integer >= 3", n_x=self.n_x)
        if len(self.y) < 3:
            raise BadGrid("cross-section grid needs >= 3 nodes")

    @classmethod
    def for_model(cls, model: CrossSectionModel, x_min=-20.0, x_max=80.0, n_x=2001, **kw):
        return cls(float(x_min), float(x_max), int(n_x), model.y, **kw)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_x)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_x - 1)

    @property
    def dy(self) -> float:
        return float(self.y[1] - self.y[0])

    @property
    def x_weights(self) -> np.ndarray:
        return trapezoid_weights(self.n_x, self.dx)

    @property
    def y_weights(self) -> np.ndarray:
        return trapezoid_weights(len(self.y), self.dy)

    @property
    def length_y(self) -> float:
        return float(self.y[-1] - self.y[0])

    def y_average(self, field_: np.ndarray) -> np.ndarray:
        return field_ @ self.y_weights / self.length_y


@dataclass(frozen=True)
class FieldState:
    """T and Y with shape (n_x, n_y) at time t."""

    t: float
    T: np.ndarray
    Y: np.ndarray
    grid: CylinderGrid

    def __post_init__(self):
        shape = (self.grid.n_x, len(self.grid.y))
        if self.T.shape != shape or self.Y.shape != shape:
            raise BadGrid("field shape does not match the grid", expected=shape,
                          T=self.T.shape, Y=self.Y.shape)


@dataclass(frozen=True)
class InitialProfile:
    decay: float = 0.5        # lambda of T0
    decay_y: float = 1.0      # lambda' of 1 - Y0
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 1.0
    plateau: float = 1.0


def make_initial_profile(grid: CylinderGrid, decay: float, decay_y: float, c1: float,
                         c2: float, c3: float, plateau: float) -> FieldState:
    """Initial data with C1 e^{-lam x} <= T0 <= C2 e^{-lam x} and 1 - Y0 <= C3 e^{-lam' x} on x >= 0."""
    consts = dict(decay=decay, decay_y=decay_y, c1=c1, c2=c2, c3=c3, plateau=plateau)
    if not all(v > 0 and np.isfinite(v) for v in consts.values()):
        raise SandwichInfeasible("initial-profile constants must be positive", **consts)
    if c1 > c2:
        raise SandwichInfeasible("need C1 <= C2", c1=c1, c2=c2)
    x = grid.x
    ex = np.exp(-decay * np.maximum(x, 0.0))
    T_line = np.where(x <= 0, plateau, np.clip(plateau * ex, c1 * ex, c2 * ex))
    Y_line = np.where(x < 0, max(0.0, 1.0 - c3),
                      1.0 - np.minimum(1.0, c3 * np.exp(-decay_y * np.maximum(x, 0.0))))
    ny = len(grid.y)
    T0 = np.repeat(T_line[:, None], ny, axis=1)
    Y0 = np.repeat(Y_line[:, None], ny, axis=1)
    pos = x >= 0
    if (np.any(T0[pos] < c1 * ex[pos, None] * (1 - 1e-15))
            or np.any(T0[pos] > c2 * ex[pos, None] * (1 + 1e-15))
            or np.any(1 - Y0[pos] > c3 * np.exp(-decay_y * x[pos])[:, None] + 1e-15)):
        raise SandwichInfeasible("initial profile violates its exponential bounds", **consts)
    return FieldState(0.0, T0, Y0, grid)


# --------------------------------------------------------------------------
# substeps

def stable_dt(model: CrossSectionModel, grid: CylinderGrid, *, cfl: float = 0.9,
              loss_factor: float = 0.5) -> float:
    umax = float(np.abs(model.flow).max())
    bound = loss_factor / model.K
    if umax > 0:
        bound = min(bound, cfl * grid.dx / umax)
    return bound


@lru_cache(maxsize=32)
def _neumann_banded(n: int, r: float) -> np.ndarray:
    """Banded form of I - r * (ghost-point Neumann second difference)."""
    ab = np.zeros((3, n))
    ab[0, 1:] = -r
    ab[1, :] = 1 + 2 * r
    ab[2, :-1] = -r
    ab[0, 1] = -2 * r
    ab[2, -2] = -2 * r
    ab.setflags(write=False)
    return ab


def _implicit_diffusion(F: np.ndarray, coef: float, dt: float, grid: CylinderGrid) -> np.ndarray:
    rx = coef * dt / grid.dx ** 2
    ry = coef * dt / grid.dy ** 2
    F = solve_banded((1, 1), _neumann_banded(grid.n_x, rx), F, check_finite=False)
    F = solve_banded((1, 1), _neumann_banded(F.shape[1], ry), F.T, check_finite=False).T
    return F


def _upwind(F: np.ndarray, nu: np.ndarray) -> np.ndarray:
    """One upwind step of F_t + u F_x = 0 with Courant numbers nu = u dt/dx per column."""
    back = np.empty_like(F)
    back[1:] = F[1:] - F[:-1]
    back[0] = 0.0
    fwd = np.empty_like(F)
    fwd[:-1] = F[1:] - F[:-1]
    fwd[-1] = 0.0
    return F - np.maximum(nu, 0.0) * back - np.minimum(nu, 0.0) * fwd


def _check_bounds(T, Y, t, grid):
    """Clamp rounding-level violations, raise on anything larger."""
    tmin = T.min()
    if tmin < 0:
        if tmin < -ROUNDING_TOL:
            i, j = np.unravel_index(np.argmin(T), T.shape)
            raise BoundInvariantBroken("T < 0", t=t, x=float(grid.x[i]), y=float(grid.y[j]),
                                       value=float(tmin))
        log.debug("clamping T rounding violation %.3e at t=%g", tmin, t)
        np.maximum(T, 0.0, out=T)
    ymin, ymax = Y.min(), Y.max()
    if ymin < 0 or ymax > 1:
        if ymin < -ROUNDING_TOL or ymax > 1 + ROUNDING_TOL:
            bad = np.argmin(Y) if ymin < 0 else np.argmax(Y)
            i, j = np.unravel_index(bad, Y.shape)
            raise BoundInvariantBroken("Y outside [0, 1]", t=t, x=float(grid.x[i]),
                                       y=float(grid.y[j]), value=float(Y[i, j]))
        np.clip(Y, 0.0, 1.0, out=Y)


def step(state: FieldState, model: CrossSectionModel, dt: float, *, cfl: float = 0.9,
         loss_factor: float = 0.5, guard_margin: Optional[float] = None) -> FieldState:
    """Advance one Lie-split step: reaction, upwind advection, implicit diffusion."""
    grid = state.grid
    bound = stable_dt(model, grid, cfl=cfl, loss_factor=loss_factor)
    if dt > bound * (1 + 1e-12):
        raise CflViolation("time step above stability bound", dt=dt, bound=bound)
    T, Y = state.T, state.Y

    # reaction: exact integrating factor for Y, explicit Euler for T
    f = model.reaction(T)
    Tn = T + dt * (f * Y - model.loss(T))
    Yn = Y * np.exp(-dt * f)

    # advection
    if np.any(model.flow != 0):
        nu = model.flow * dt / grid.dx
        Tn = _upwind(Tn, nu)
        Yn = _upwind(Yn, nu)

    # diffusion
    Tn = _implicit_diffusion(Tn, 1.0, dt, grid)
    Yn = _implicit_diffusion(Yn, 1.0 / model.lewis, dt, grid)

    t = state.t + dt
    _check_bounds(Tn, Yn, t, grid)
    new = FieldState(t, Tn, Yn, grid)
    if guard_margin is not None:
        check_guard(new, guard_margin)
    return new


def check_guard(state: FieldState, margin: float) -> None:
    """Raise FrontTouchedBoundary if the T-front is within ``margin`` of an x-end."""
    from .diagnostics import front_position
    from .errors import NoCrossing
    grid = state.grid
    try:
        xf = front_position(state, "T")
    except NoCrossing:
        return
    if xf < grid.x_min + margin or xf > grid.x_max - margin:
        raise FrontTouchedBoundary("front within guard margin of the domain end",
                                   t=state.t, front=xf, margin=margin)


# --------------------------------------------------------------------------
# driver

@dataclass
class RunResult:
    diagnostics: List[dict]
    final: FieldState
    dt: float
    partial: bool = False
    stop_reason: str = ""
    snapshots: List[FieldState] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([d[name] for d in self.diagnostics], dtype=float)


def run(state: FieldState, model: CrossSectionModel, t_end: float, observer_cadence: float,
        *, dt: Optional[float] = None, dt_max: float = 0.01, cfl: float = 0.9,
        loss_factor: float = 0.5, guard_margin: float = 5.0,
        observer: Optional[Callable[[FieldState], dict]] = None,
        keep_snapshots: bool = False) -> RunResult:
    """Step to ``t_end`` with a fixed time step, observing every ``observer_cadence``.

    The default step is the stability bound capped by ``dt_max`` and then
    shrunk so that the cadence is an integer number of steps.
    """
    from .diagnostics import observe
    observer = observer or (lambda s: observe(s, model))
    if dt is None:
        dt = min(stable_dt(model, state.grid, cfl=cfl, loss_factor=loss_factor), dt_max)
    per_obs = max(1, int(np.ceil(observer_cadence / dt - 1e-9)))
    dt = observer_cadence / per_obs
    n_obs = int(round(t_end / observer_cadence))

    diags = [observer(state)]
    snaps = [state] if keep_snapshots else []
    partial, reason = False, ""
    for k in range(1, n_obs + 1):
        try:
            for _ in range(per_obs):
                state = step(state, model, dt, cfl=cfl, loss_factor=loss_factor)
            # pin the clock to the observation grid to avoid drift
            state = replace(state, t=k * observer_cadence)
            check_guard(state, guard_margin)
        except FrontTouchedBoundary as exc:
            partial, reason = True, str(exc)
            break
        diags.append(observer(state))
        if keep_snapshots:
            snaps.append(state)
    return RunResult(diags, state, dt, partial, reason, snaps)
