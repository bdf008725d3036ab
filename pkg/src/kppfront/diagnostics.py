"""Front diagnostics: positions, speeds, exponential rates, plateaus and balance checks.

Functions accept any object exposing ``grid`` (a :class:`CylinderGrid`), ``T``
and ``Y`` arrays of shape (n_x, n_y): IVP states and traveling-front
solutions alike.  Fronts are located on y-averaged profiles.  Every rate fit
is a least-squares line through log-values over an explicit window, and the
window is reported with the result.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import eigen
from .cross_section import CrossSectionModel
from .errors import (FrontInStrip, NoCrossing, NotConverged, RegionOutsideGrid,
                     TooFewSamples, UnderflowRegion)

UNDERFLOW = 1e-280


@dataclass(frozen=True)
class RateFit:
    rate: float
    window: Tuple[float, float]
    r2: float


def _linfit(x, y):
    """Slope, intercept and r^2 of a least-squares line."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(slope), float(icpt), r2


def _left_strip(grid, frac=0.1):
    x = grid.x
    return x <= grid.x_min + frac * (grid.x_max - grid.x_min)


# --------------------------------------------------------------------------
# positions and speeds

def front_position(state, field_: str = "T", threshold: Optional[float] = None) -> float:
    """Largest x where the y-averaged field crosses ``threshold``.

    T is tracked where it crosses downward (default threshold: half its
    maximum), Y where it crosses upward (default: midway between its left
    plateau and 1).  Linear interpolation between nodes.
    """
    grid = state.grid
    if field_ == "T":
        F = grid.y_average(state.T)
        if threshold is None:
            threshold = 0.5 * float(F.max())
        if not F.max() > 0 or not threshold > 0:
            raise NoCrossing("T has no positive level to track", threshold=threshold)
        idx = np.nonzero((F[:-1] >= threshold) & (F[1:] < threshold))[0]
    elif field_ == "Y":
        F = grid.y_average(state.Y)
        if threshold is None:
            threshold = 0.5 * (1.0 + float(F[_left_strip(grid)].mean()))
        idx = np.nonzero((F[:-1] <= threshold) & (F[1:] > threshold))[0]
    else:
        raise ValueError("field must be 'T' or 'Y'")
    if idx.size == 0:
        raise NoCrossing(f"{field_} never crosses the threshold", threshold=float(threshold))
    i = int(idx[-1])
    frac = (F[i] - threshold) / (F[i] - F[i + 1])
    return float(grid.x[i] + frac * grid.dx)


@dataclass
class FrontTrack:
    samples: List[Tuple[float, float]] = field(default_factory=list)
    fit_window: float = 0.5
    speed: float = float("nan")
    r2: float = float("nan")
    reliable: bool = False

    def add(self, t: float, x: float) -> None:
        self.samples.append((float(t), float(x)))

    def fit(self, min_r2: float = 0.99) -> "FrontTrack":
        self.speed, self.r2 = speed_estimate(self)
        self.reliable = self.r2 >= min_r2
        return self


def speed_estimate(track, fit_window: Optional[float] = None) -> Tuple[float, float]:
    """Least-squares slope of x_front(t) over the trailing ``fit_window`` fraction."""
    if isinstance(track, FrontTrack):
        samples = track.samples
        fit_window = track.fit_window if fit_window is None else fit_window
    else:
        samples = list(track)
        fit_window = 0.5 if fit_window is None else fit_window
    samples = [s for s in samples if np.isfinite(s[1])]
    n = int(np.ceil(len(samples) * fit_window))
    if n < 10:
        raise TooFewSamples("speed fit needs at least 10 samples in the window", samples=n)
    t, x = np.array(samples[-n:]).T
    slope, _, r2 = _linfit(t, x)
    return slope, r2


# --------------------------------------------------------------------------
# exponential rates

def _decay_fit(grid, Tavg, lo, hi, sign) -> RateFit:
    if lo < grid.x_min or hi > grid.x_max:
        raise RegionOutsideGrid("fit window not inside the grid", window=(lo, hi),
                                grid=(grid.x_min, grid.x_max))
    x = grid.x
    sel = (x >= lo) & (x <= hi)
    if sel.sum() < 3:
        raise RegionOutsideGrid("fit window holds fewer than 3 nodes", window=(lo, hi))
    vals = Tavg[sel]
    if not np.all(vals > UNDERFLOW):
        raise UnderflowRegion("T too small in the fit window", window=(lo, hi),
                              min_value=float(vals.min()))
    slope, _, r2 = _linfit(x[sel], np.log(vals))
    return RateFit(sign * slope, (float(lo), float(hi)), r2)


def right_decay_fit(state, *, offset: float = 10.0, width: float = 10.0,
                    front: Optional[float] = None) -> RateFit:
    """Fit of -d/dx log(mean_y T) over [front + offset, front + offset + width]."""
    grid = state.grid
    if front is None:
        front = front_position(state, "T")
    return _decay_fit(grid, grid.y_average(state.T), front + offset, front + offset + width, -1.0)


def right_decay_rate(state, **kw) -> float:
    return right_decay_fit(state, **kw).rate


def left_decay_fit(state, *, skip: float = 5.0, width: float = 10.0) -> RateFit:
    """Fit of d/dx log(mean_y T) over [x_min + skip, x_min + skip + width]."""
    grid = state.grid
    lo = grid.x_min + skip
    return _decay_fit(grid, grid.y_average(state.T), lo, lo + width, 1.0)


def left_decay_rate(state, **kw) -> float:
    return left_decay_fit(state, **kw).rate


def left_plateau_Y(state, strip: float = 0.1, flatness: float = 0.1) -> float:
    """Average of Y over the left ``strip`` fraction of the domain.

    The strip must be front-free: the y-averaged Y may vary across it by at
    most ``flatness`` times its distance to 1.
    """
    grid = state.grid
    sel = _left_strip(grid, strip)
    Yavg = grid.y_average(state.Y)[sel]
    mean = float(Yavg.mean())
    spread = float(Yavg.max() - Yavg.min())
    if spread > flatness * max(1.0 - mean, 0.0) + 1e-12:
        raise FrontInStrip("Y is not flat on the left strip", spread=spread, mean=mean)
    return mean


def extinction_fit(times: Sequence[float], sup_T: Sequence[float],
                   window: Optional[Tuple[float, float]] = None) -> RateFit:
    """Fit of -d/dt log sup T over ``window`` (default: trailing half of the series)."""
    t = np.asarray(times, dtype=float)
    s = np.asarray(sup_T, dtype=float)
    if window is None:
        n = len(t) - len(t) // 2
        sel = np.zeros(len(t), bool)
        sel[-n:] = True
    else:
        sel = (t >= window[0] - 1e-12) & (t <= window[1] + 1e-12)
    if sel.sum() < 3:
        raise TooFewSamples("decay fit needs at least 3 samples", samples=int(sel.sum()))
    if not np.all(s[sel] > UNDERFLOW):
        raise UnderflowRegion("sup T underflows in the fit window")
    slope, _, r2 = _linfit(t[sel], np.log(s[sel]))
    return RateFit(-slope, (float(t[sel][0]), float(t[sel][-1])), r2)


def extinction_rate(times, sup_T, window=None) -> float:
    return extinction_fit(times, sup_T, window).rate


# --------------------------------------------------------------------------
# traveling-front identities

def left_limit_Y(front, *, skip: float = 5.0, width: float = 10.0, degree: int = 3) -> float:
    """Estimate Y(-inf) from the left tail of a traveling front.

    Behind the front the profile approaches (T, Y) = (0, Y_inf) along a
    one-dimensional slow manifold, on which Y is a smooth function of T.  A
    polynomial fit of mean_y Y against mean_y T over
    [x_min + skip, x_min + skip + width] (beyond the boundary layer at the
    left end) is evaluated at T = 0.  Where T is negligible in the window the
    raw mean of Y is returned.
    """
    grid = front.grid
    x = grid.x
    lo = grid.x_min + skip
    sel = (x >= lo) & (x <= lo + width)
    if sel.sum() < degree + 2:
        raise RegionOutsideGrid("left tail window too small", window=(lo, lo + width))
    Tw = grid.y_average(front.T)[sel]
    Yw = grid.y_average(front.Y)[sel]
    if not Tw.max() - Tw.min() > 1e-14:
        return float(Yw.mean())
    fit = np.polynomial.Polynomial.fit(Tw, Yw, degree)
    return float(fit(0.0))


def mass_balance_residual(front, model: CrossSectionModel) -> float:
    """Relative defect of c L (1 - Y_inf) = integral of f(y, T) Y over the cylinder."""
    if not getattr(front, "converged", False):
        raise NotConverged("mass balance needs a converged front")
    grid = front.grid
    lhs = front.c * grid.length_y * (1.0 - front.y_inf)
    integrand = model.reaction(front.T) * front.Y
    rhs = float(grid.x_weights @ integrand @ grid.y_weights)
    if abs(lhs) < 1e-300 and abs(rhs) < 1e-300:
        return 0.0
    return abs(lhs - rhs) / abs(lhs)


def y_inf_bound_a_star(model: CrossSectionModel, beta: float) -> float:
    """1 + mu(0) / int a phi_{-beta}^2, phi_{-beta} the L2-normalized eigenfunction at -beta."""
    pair = eigen.principal_eigenpair(model, -beta)
    return 1.0 + eigen.mu(model, 0.0) / float(np.dot(pair.weights, model.a * pair.eigenfunction ** 2))


def y_inf_bound_mean_ratio(model: CrossSectionModel) -> float:
    """int q / int a."""
    return float(np.dot(model.weights, model.q) / np.dot(model.weights, model.a))


def left_decay_relation_defect(model: CrossSectionModel, c: float, y_inf: float, beta: float) -> float:
    """Relative defect of mu_{h, Y_inf f}(-beta) = c beta + beta^2."""
    lhs = eigen.mu(model, -beta, scale=y_inf)
    rhs = c * beta + beta * beta
    return abs(lhs - rhs) / max(abs(rhs), 1e-300)


# --------------------------------------------------------------------------
# comparison envelopes for the Cauchy problem
#
# Checks are restricted to x <= x_max - wall_margin: the exponential
# supersolutions carry a nonzero flux through the right end, which the
# truncated problem (homogeneous Neumann there) does not, so the two are only
# comparable away from that wall.

def _profile(model, lam):
    return eigen.principal_eigenpair(model, lam).min_normalized()


def propagation_envelope_constant(state0, model: CrossSectionModel, decay: float) -> float:
    """Smallest C with T0 <= C exp(-decay x) phi_decay(y) on the grid."""
    x = state0.grid.x
    phi = _profile(model, decay)
    return float(np.max(state0.T * np.exp(decay * x)[:, None] / phi[None, :]))


def propagation_envelope(state, model: CrossSectionModel, decay: float, C: float,
                         speed: Optional[float] = None) -> np.ndarray:
    """C exp(-decay (x - c t)) phi_decay(y) with c = k(decay)/decay by default."""
    if speed is None:
        speed = (decay * decay - eigen.mu(model, decay)) / decay
    phi = _profile(model, decay)
    x = state.grid.x
    return C * np.exp(-decay * (x - speed * state.t))[:, None] * phi[None, :]


def extinction_envelope_constant(state0, model: CrossSectionModel) -> float:
    """Smallest C with T0 <= C phi_0(y)."""
    return float(np.max(state0.T / _profile(model, 0.0)[None, :]))


def extinction_envelope(state, model: CrossSectionModel, C: float) -> np.ndarray:
    """C exp(-mu(0) t) phi_0(y), broadcast over x."""
    phi = _profile(model, 0.0)
    return np.broadcast_to(C * np.exp(-eigen.mu(model, 0.0) * state.t) * phi, state.T.shape)


def envelope_violation(state, envelope, *, wall_margin: float = 5.0) -> float:
    """max(T - envelope) over x <= x_max - wall_margin (negative when dominated)."""
    sel = state.grid.x <= state.grid.x_max - wall_margin
    return float(np.max((state.T - envelope)[sel]))


def blowoff_weighted_sup(state, eta: float, *, wall_margin: float = 5.0) -> float:
    """max over 0 <= x <= x_max - wall_margin of T exp(eta x)."""
    x = state.grid.x
    sel = (x >= 0) & (x <= state.grid.x_max - wall_margin)
    if not sel.any():
        raise RegionOutsideGrid("no nodes with x >= 0", grid=(state.grid.x_min, state.grid.x_max))
    return float(np.max(state.T[sel] * np.exp(eta * x[sel])[:, None]))


# --------------------------------------------------------------------------
# per-observation record for the IVP driver

DIAGNOSTIC_COLUMNS = ("t", "front_pos_T", "front_pos_Y", "sup_T", "decay_rate_right",
                      "y_left_plateau")


def _safe(fn):
    try:
        return float(fn())
    except (NoCrossing, RegionOutsideGrid, UnderflowRegion, FrontInStrip):
        return float("nan")


def observe(state, model: Optional[CrossSectionModel] = None, *, right_offset: float = 10.0,
            right_width: float = 10.0) -> dict:
    return {
        "t": float(state.t),
        "front_pos_T": _safe(lambda: front_position(state, "T")),
        "front_pos_Y": _safe(lambda: front_position(state, "Y")),
        "sup_T": float(state.T.max()),
        "decay_rate_right": _safe(lambda: right_decay_rate(state, offset=right_offset,
                                                           width=right_width)),
        "y_left_plateau": _safe(lambda: left_plateau_Y(state)),
    }
