"""Traveling fronts (c, T(x, y), Y(x, y)) of

    Lap T + (c - u) T_x + f(y, T) Y - h(y, T) = 0
    Le^{-1} Lap Y + (c - u) Y_x - f(y, T) Y = 0

with T(+inf) = 0, Y(+inf) = 1, built on the finite cylinder [-a, a] x [0, L]
by a damped Picard iteration of the map

    (T0, Y0) -> (T, Y):  Lap T + (c-u) T_x - K_a T = -f(T0) Y0 + h(T0) - K_a T0,
                         Le^{-1} Lap Y + (c-u) Y_x - f(T0) Y = 0,

with Dirichlet data from the explicit sub/super-solutions at x = +-a and
Neumann conditions in y.  Iterates are clipped into the order interval
[T_lo, T_up] x [Y_lo, 1], which the map leaves invariant.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spl

from . import eigen
from .cross_section import CrossSectionModel
from .diagnostics import front_position, left_limit_Y
from .dispersion import minimal_speed, sup_condition, k_of_lambda
from .errors import (Condition42Fails, LinearSolveFailed, ParameterSearchFailed,
                     PreconditionMu0, SpeedNotAdmissible)
from .ivp import CylinderGrid
from scipy import optimize

log = logging.getLogger(__name__)


def lambda_c(model: CrossSectionModel, c: float, *, star=None) -> float:
    """Smallest positive root of k(lam) = c lam (requires mu(0) < 0 and c > c*)."""
    try:
        c_star, lam_star = star if star is not None else minimal_speed(model)
    except PreconditionMu0 as exc:
        raise SpeedNotAdmissible("no admissible speeds: mu(0) >= 0") from exc
    if not c > max(0.0, c_star):
        raise SpeedNotAdmissible("speed must exceed max(0, c*)", c=c, c_star=c_star)
    lam = optimize.bisect(lambda l: k_of_lambda(model, l) - c * l, 0.0, lam_star,
                          xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    return float(lam)


# --------------------------------------------------------------------------
# sub- and super-solutions

@dataclass(frozen=True)
class SandwichBounds:
    c: float
    lambda_c: float
    beta: float
    gamma: float
    eta: float
    epsilon: float
    delta: float
    M: float
    x0: float
    s0: float
    alpha: float
    nu_margin: float          # nu(beta Le) - beta^2 + c beta Le
    delta_parts: tuple        # the three lower bounds on delta
    psi: np.ndarray           # sup-normalized eigenfunction for Y_lo
    phi_c: np.ndarray         # sup-normalized eigenfunction at lambda_c
    phi_ce: np.ndarray        # sup-normalized eigenfunction at lambda_c + eta
    grid: CylinderGrid
    T_upper: np.ndarray
    T_lower: np.ndarray
    Y_lower: np.ndarray

    @property
    def subsolution_vanishes(self) -> bool:
        """True if T_lo is identically zero on the grid (domain too short)."""
        return not np.any(self.T_lower > 0)


def _tabulate(grid, lam, phi):
    return phi[None, :] * np.exp(-lam * grid.x)[:, None]


def build_sandwich(model: CrossSectionModel, c: float, a: float, *, n_x: Optional[int] = None,
                   dx: float = 0.1, margin: float = 0.1, star=None) -> SandwichBounds:
    """Choose (beta, gamma, eta, delta) and tabulate T_up, T_lo, Y_lo on [-a, a]."""
    if star is None:
        try:
            star = minimal_speed(model)
        except PreconditionMu0 as exc:
            raise SpeedNotAdmissible("no admissible speeds: mu(0) >= 0") from exc
    lc = lambda_c(model, c, star=star)
    Le = model.lewis
    zero = np.zeros(model.n_y)
    amax = float(model.a.max())
    alpha, s0, M = model.reaction.holder_alpha, model.reaction.s0, model.quad_bound

    def G(b):
        return eigen.nu(model, b * Le) - b * b + c * b * Le

    # beta: below lambda_c and below the first positive zero of G (G is concave, G(0) = 0)
    beta_top = lc
    if G(lc) <= 0:
        beta_top = optimize.bisect(G, 1e-12 * lc, lc, xtol=1e-14) if G(1e-12 * lc) > 0 else 0.0
    beta = 0.5 * beta_top
    for _ in range(60):
        if beta > 0 and G(beta) > 0:
            break
        beta *= 0.5
    else:
        raise ParameterSearchFailed("no beta with nu(beta Le) - beta^2 + c beta Le > 0", c=c)
    Gb = G(beta)
    psi = eigen.principal_eigenpair(model, beta * Le, zero).sup_normalized()
    gamma = max(1.0 / psi.min(), (1 + margin) * Le * amax / (Gb * psi.min()))
    x0 = float(np.log(gamma * psi.max()) / beta)

    eta = 0.5 * min(beta, alpha * lc)
    for _ in range(60):
        eps = c * (lc + eta) - k_of_lambda(model, lc + eta)
        if eps > 0:
            break
        eta *= 0.5
    else:
        raise ParameterSearchFailed("no eta with c(lc+eta) - k(lc+eta) > 0", c=c)

    phi_c = eigen.principal_eigenpair(model, lc).sup_normalized()
    phi_ce = eigen.principal_eigenpair(model, lc + eta).sup_normalized()
    # (i) sup_x [A e^{-lc x} - d B e^{-(lc+eta) x}] <= s0 for every y
    A, B = phi_c, phi_ce
    d1 = float(np.max(lc * A / ((lc + eta) * B)
                      * (A * eta / (s0 * (lc + eta))) ** (eta / lc)))
    # (ii) difference <= 0 for x <= x0
    d2 = float(np.max(A / B) * np.exp(eta * x0))
    # (iii) delta eps min B >= gamma max a + 2M
    d3 = (gamma * amax + 2 * M) / (eps * B.min())
    delta = (1 + margin) * max(d1, d2, d3)

    if n_x is None:
        n_x = int(round(2 * a / dx)) + 1
    grid = CylinderGrid(-float(a), float(a), int(n_x), model.y)
    T_up = _tabulate(grid, lc, phi_c)
    T_lo = np.maximum(0.0, T_up - delta * _tabulate(grid, lc + eta, phi_ce))
    Y_lo = np.maximum(0.0, 1.0 - gamma * _tabulate(grid, beta, psi))

    b = SandwichBounds(c, lc, beta, gamma, eta, eps, delta, M, x0, s0, alpha, Gb,
                       (d1, d2, d3), psi, phi_c, phi_ce, grid, T_up, T_lo, Y_lo)
    _verify_sandwich(b, model)
    if b.subsolution_vanishes:
        log.warning("T sub-solution vanishes on [-%g, %g]; the iteration may collapse "
                    "to the trivial state (increase the half-length)", a, a)
    return b


def _verify_sandwich(b: SandwichBounds, model: CrossSectionModel) -> None:
    x = b.grid.x
    checks = {
        "0 < beta < lambda_c": 0 < b.beta < b.lambda_c,
        "nu(beta Le) - beta^2 + c beta Le > 0": b.nu_margin > 0,
        "gamma min psi >= 1": b.gamma * b.psi.min() >= 1 - 1e-14,
        "gamma Le^-1 G min psi > max a":
            b.gamma / model.lewis * b.nu_margin * b.psi.min() > model.a.max(),
        "0 < eta < min(beta, alpha lambda_c)": 0 < b.eta < min(b.beta, b.alpha * b.lambda_c),
        "epsilon > 0": b.epsilon > 0,
        "delta eps min phi >= gamma max a + 2M":
            b.delta * b.epsilon * b.phi_ce.min() >= b.gamma * model.a.max() + 2 * b.M,
        "T_lo <= T_up": bool(np.all(b.T_lower <= b.T_upper)),
        "T_lo <= s0": bool(np.all(b.T_lower <= b.s0)),
        "0 <= Y_lo <= 1": bool(np.all((b.Y_lower >= 0) & (b.Y_lower <= 1))),
        "Y_lo = 0 for x <= 0": bool(np.all(b.Y_lower[x <= 0] == 0)),
        "T_lo = 0 for x <= x0": bool(np.all(b.T_lower[x <= b.x0] == 0)),
        "Y_lo > 0 for x > x0": bool(np.all(b.Y_lower[x > b.x0] > 0)),
    }
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise ParameterSearchFailed("sandwich inequality failed", failed=failed)


# --------------------------------------------------------------------------
# finite-cylinder map

def _d1(n, h):
    """Central first difference (rows 0 and n-1 unused)."""
    return sp.diags([-np.ones(n - 1), np.ones(n - 1)], [-1, 1], shape=(n, n)) / (2 * h)


def _d1_forward(n, h):
    return sp.diags([-np.ones(n), np.ones(n - 1)], [0, 1], shape=(n, n)) / h


def _d2(n, h):
    return sp.diags([np.ones(n - 1), -2 * np.ones(n), np.ones(n - 1)], [-1, 0, 1], shape=(n, n)) / h ** 2


def _d2_neumann(n, h):
    m = _d2(n, h).tolil()
    m[0, 1] = 2 / h ** 2
    m[n - 1, n - 2] = 2 / h ** 2
    return m.tocsr()


class FiniteCylinderMap:
    """Discrete version of the map on [-a, a] x [0, L].

    Unknowns are ordered x-major (index i * n_y + j).  The x-derivative is
    central where the cell Peclet number |c - u| dx / (2 D) is at most 1 and
    one-sided (upwind) otherwise, so the matrices are M-matrices and the
    discrete maximum principle holds.
    """

    def __init__(self, model: CrossSectionModel, bounds: SandwichBounds, *, ka_offset: float = 1.0,
                 solve_tol: float = 1e-10):
        self.model = model
        self.bounds = bounds
        self.grid = g = bounds.grid
        self.c = bounds.c
        self.Ka = model.K + ka_offset
        self.solve_tol = solve_tol
        nx, ny = g.n_x, len(g.y)
        self.shape = (nx, ny)
        b = self.c - model.flow
        Ix, Iy = sp.identity(nx, format="csr"), sp.identity(ny, format="csr")
        lap_x = sp.kron(_d2(nx, g.dx), Iy, format="csr")
        lap_y = sp.kron(Ix, _d2_neumann(ny, g.dy), format="csr")
        Bdiag = sp.diags(np.tile(b, nx))

        def transport(D):
            central = np.abs(b) * g.dx / (2 * D) <= 1.0
            Dx_c = sp.kron(_d1(nx, g.dx), Iy, format="csr")
            if central.all():
                Dx = Dx_c
            else:
                # upwind: b > 0 carries information from +x (forward difference)
                fwd = sp.kron(_d1_forward(nx, g.dx), Iy, format="csr")
                bwd = sp.kron(-_d1_forward(nx, g.dx).T, Iy, format="csr")
                cm = sp.diags(np.tile(central.astype(float), nx))
                pos = sp.diags(np.tile(((~central) & (b > 0)).astype(float), nx))
                neg = sp.diags(np.tile(((~central) & (b <= 0)).astype(float), nx))
                Dx = cm @ Dx_c + pos @ fwd + neg @ bwd
            return D * (lap_x + lap_y) + Bdiag @ Dx

        self.LT = transport(1.0).tocsr()
        self.LY = transport(1.0 / model.lewis).tocsr()
        interior = np.ones((nx, ny), bool)
        interior[0] = interior[-1] = False
        self.interior = interior.ravel()
        self._P = sp.diags(self.interior.astype(float))
        self._Q = sp.diags((~self.interior).astype(float))
        self.T_bc = np.where(interior, 0.0, bounds.T_lower).ravel()
        self.Y_bc = np.where(interior, 0.0, bounds.Y_lower).ravel()
        AT = (self._P @ (self.LT - self.Ka * sp.identity(nx * ny)) + self._Q).tocsc()
        self._AT = AT
        self._luT = spl.splu(AT)

    def _solve(self, A, lu, rhs):
        x = lu.solve(rhs)
        nb = np.abs(rhs).max() or 1.0
        r = rhs - A @ x
        if np.abs(r).max() > self.solve_tol * nb:
            x += lu.solve(r)
            r = rhs - A @ x
            if np.abs(r).max() > self.solve_tol * nb:
                raise LinearSolveFailed("sparse solve residual too large",
                                        residual=float(np.abs(r).max() / nb))
        return x

    def __call__(self, T0: np.ndarray, Y0: np.ndarray):
        m = self.model
        t0, y0 = T0.ravel(), Y0.ravel()
        fT = m.reaction(T0).ravel()
        hT = m.loss(T0).ravel()
        rhs = np.where(self.interior, -fT * y0 + hT - self.Ka * t0, self.T_bc)
        T = self._solve(self._AT, self._luT, rhs)
        AY = (self._P @ (self.LY - sp.diags(fT)) + self._Q).tocsc()
        Y = self._solve(AY, spl.splu(AY), self.Y_bc.copy())
        return T.reshape(self.shape), Y.reshape(self.shape)

    def residual(self, T: np.ndarray, Y: np.ndarray) -> float:
        """Max interior residual of the traveling-front equations."""
        m = self.model
        fY = (m.reaction(T) * Y).ravel()
        rT = self.LT @ T.ravel() + fY - m.loss(T).ravel()
        rY = self.LY @ Y.ravel() - fY
        return float(max(np.abs(rT[self.interior]).max(), np.abs(rY[self.interior]).max()))


def phi_a_map(model: CrossSectionModel, c: float, bounds: SandwichBounds, T0, Y0, **kw):
    """One application of the finite-cylinder map."""
    if abs(bounds.c - c) > 1e-14 * max(1.0, abs(c)):
        raise ValueError("bounds were built for a different speed")
    return FiniteCylinderMap(model, bounds, **kw)(np.asarray(T0, float), np.asarray(Y0, float))


# --------------------------------------------------------------------------
# fixed-point iteration

@dataclass
class FrontSolution:
    c: float
    a: float
    grid: CylinderGrid
    T: np.ndarray
    Y: np.ndarray
    iterations: int
    residual: float
    y_inf: float
    y_inf_strip: float
    converged: bool
    lambda_c: float
    bounds: SandwichBounds
    violation: float = 0.0
    change: float = float("inf")
    boundary_layer: float = 0.0
    history: List[tuple] = field(default_factory=list)
    shift: float = 0.0
    sequence_y_inf: List[float] = field(default_factory=list)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def summary(self) -> dict:
        return {"c": self.c, "lambda_c": self.lambda_c, "y_inf": self.y_inf,
                "residual": self.residual, "iterations": self.iterations,
                "converged": self.converged}


def solve_front(model: CrossSectionModel, c: float, a: float = 40.0, max_iter: int = 2000,
                tol: float = 1e-8, *, theta: float = 0.7, n_x: Optional[int] = None,
                dx: float = 0.1, margin: float = 0.1, ka_offset: float = 1.0,
                t_init: float = 0.1, violation_tol: float = 1e-8,
                tail_skip: float = 5.0, tail_width: float = 10.0,
                bounds: Optional[SandwichBounds] = None, star=None) -> FrontSolution:
    """Damped Picard iteration with clipping into the sandwich set."""
    if bounds is None:
        bounds = build_sandwich(model, c, a, n_x=n_x, dx=dx, margin=margin, star=star)
    phi = FiniteCylinderMap(model, bounds, ka_offset=ka_offset)
    T_lo, T_up, Y_lo = bounds.T_lower, bounds.T_upper, bounds.Y_lower
    T = np.clip(np.minimum(T_up, t_init), T_lo, T_up)
    Y = Y_lo.copy()
    history = []
    converged = False
    viol = ch = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        Tm, Ym = phi(T, Y)
        Tn = (1 - theta) * T + theta * Tm
        Yn = (1 - theta) * Y + theta * Ym
        viol = float(max(0.0, (T_lo - Tn).max(), (Tn - T_up).max(), (Y_lo - Yn).max(),
                         (Yn - 1).max()))
        # stop on the undamped defect |Phi(u) - u| so the returned iterate is a
        # fixed point to within tol (the damped step is only theta times that)
        ch = float(max(np.abs(Tm - T).max(), np.abs(Ym - Y).max()))
        history.append((it, ch, viol))
        if ch <= tol:
            converged = viol <= violation_tol
            break
        T = np.clip(Tn, T_lo, T_up)
        Y = np.clip(Yn, Y_lo, 1.0)
    res = phi.residual(T, Y)
    sol = FrontSolution(c, float(a), bounds.grid, T, Y, it, res, float("nan"), float("nan"),
                        converged, bounds.lambda_c, bounds, viol, ch,
                        boundary_layer=1.0 / (c * min(1.0, model.lewis)), history=history)
    skip = max(tail_skip, 10 * sol.boundary_layer)
    sol.y_inf = left_limit_Y(sol, skip=skip, width=tail_width)
    x = sol.grid.x
    strip = (x >= -a / 2) & (x <= -a / 4)
    sol.y_inf_strip = float(sol.grid.y_average(Y)[strip].mean())
    if not converged:
        log.warning("front iteration stopped after %d iterations (change %.2e, violation %.2e)",
                    it, ch, viol)
    return sol


def recenter(front: FrontSolution) -> FrontSolution:
    """Shift the x-coordinates so the Y-front sits at x = 0."""
    xf = front_position(front, "Y")
    g = front.grid
    grid = CylinderGrid(g.x_min - xf, g.x_max - xf, g.n_x, g.y, g.min_length)
    return replace(front, grid=grid, shift=front.shift + xf)


def minimal_speed_front(model: CrossSectionModel, a: float = 40.0, *, levels: int = 6,
                        **kw) -> FrontSolution:
    """Fronts at c_n = c* (1 + 2^-n), n = 1..levels, each recentered; returns the last."""
    holds, sup_val, _ = sup_condition(model)
    if not holds:
        raise Condition42Fails("sup (mu - lam^2) must be negative", sup=sup_val)
    star = minimal_speed(model)
    seq = []
    sol = None
    for n in range(1, levels + 1):
        cn = star[0] * (1 + 2.0 ** -n)
        sol = recenter(solve_front(model, cn, a, star=star, **kw))
        seq.append(sol.y_inf)
        log.info("c_%d = %.6f: converged=%s, Y_inf=%.6f", n, cn, sol.converged, sol.y_inf)
    sol.sequence_y_inf = seq
    return sol
