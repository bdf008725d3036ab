"""Principal eigenpairs of the cross-sectional operator

    -phi'' - lam * u(y) phi + V(y) phi = value * phi  on [0, L],  phi'(0) = phi'(L) = 0.

With V = q - s*a this gives mu(lam) (s = 1) and its rescaled variants; V = 0
gives nu(lam).

Discretization: second-order ghost-point Neumann stencil on the uniform grid.
The resulting matrix A is not symmetric, but W A is, where W holds the
trapezoid weights; we work with S = W^{1/2} A W^{-1/2}, which is symmetric
tridiagonal.  Because phi^T W A phi equals sum (phi_{j+1} - phi_j)^2 / h
exactly, the discrete Rayleigh quotient and the derivative identity
mu'(lam) = -int u phi^2 hold exactly on the grid.

The eigenvalue comes from Sturm-sequence bisection (LAPACK ``stebz``); the
eigenvector from shifted inverse iteration.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal, solve_banded

from .cross_section import CrossSectionModel
from .errors import BadGrid, EigenNoConvergence, SignAmbiguity

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class PrincipalEigenpair:
    lambda_param: float
    value: float
    eigenfunction: np.ndarray  # L2-normalized with trapezoid weights
    weights: np.ndarray
    residual: float = 0.0

    def sup_normalized(self) -> np.ndarray:
        return self.eigenfunction / self.eigenfunction.max()

    def min_normalized(self) -> np.ndarray:
        return self.eigenfunction / self.eigenfunction.min()

    @property
    def norm_error(self) -> float:
        return abs(float(np.dot(self.weights, self.eigenfunction ** 2)) - 1.0)


def symmetric_tridiagonal(model: CrossSectionModel, lam: float, potential):
    """Diagonal and off-diagonal of S = W^{1/2} A W^{-1/2}."""
    n, h = model.n_y, model.h
    p = -lam * model.flow + potential
    d = 2.0 / h ** 2 + p
    e = np.full(n - 1, -1.0 / h ** 2)
    e[0] = e[-1] = -np.sqrt(2.0) / h ** 2
    return d, e, p


def operator_apply(model: CrossSectionModel, lam: float, potential, phi: np.ndarray) -> np.ndarray:
    """Apply the (nonsymmetric) discrete operator A to node values phi."""
    h2 = model.h ** 2
    out = np.empty_like(phi)
    out[0] = 2.0 * (phi[0] - phi[1]) / h2
    out[-1] = 2.0 * (phi[-1] - phi[-2]) / h2
    out[1:-1] = (2.0 * phi[1:-1] - phi[:-2] - phi[2:]) / h2
    return out + (-lam * model.flow + potential) * phi


def _check_potential(model, potential):
    if potential is None:
        return np.asarray(model.potential(), dtype=float)
    v = np.asarray(potential, dtype=float)
    if v.ndim == 0:
        v = np.full(model.n_y, float(v))
    if v.shape != (model.n_y,):
        raise BadGrid("potential length does not match the grid",
                      expected=model.n_y, got=v.size)
    if not np.all(np.isfinite(v)):
        raise BadGrid("potential has non-finite entries")
    return v


def principal_eigenpair(model: CrossSectionModel, lam: float,
                        potential=None, *, max_refine: int = 6) -> PrincipalEigenpair:
    """Smallest eigenvalue and positive L2-normalized eigenfunction.

    ``potential`` defaults to q - a (so the value is mu(lam)); pass zeros for nu.
    """
    lam = float(lam)
    v = _check_potential(model, potential)
    d, e, p = symmetric_tridiagonal(model, lam, v)
    w = model.weights
    sw = np.sqrt(w)

    # The smallest eigenvalue lies in [min p, mean_W p]: the Laplacian part is
    # positive semidefinite, and constants are admissible trial vectors.
    lo = float(p.min())
    hi = float(min(np.dot(w, p) / w.sum(), p.max()))
    if hi - lo <= model.eig_tol:
        value = lo if hi == lo else 0.5 * (lo + hi)
    else:
        try:
            value = float(eigh_tridiagonal(d, e, eigvals_only=True, select="i",
                                           select_range=(0, 0), lapack_driver="stebz",
                                           tol=model.eig_tol)[0])
        except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
            raise EigenNoConvergence(str(exc), lam=lam) from exc
        value = min(max(value, lo), hi)

    # inverse iteration on S - sigma I
    sigma = value - model.eig_shift
    ab = np.zeros((3, model.n_y))
    ab[0, 1:] = e
    ab[1] = d - sigma
    ab[2, :-1] = e
    x = sw.copy()
    x /= np.linalg.norm(x)
    scale = np.abs(d).max() + 2 * np.abs(e).max()
    # Rounding floor of the residual: eps * ||S|| relative to the largest
    # entry of a unit vector.  Below the 1e-10 target on default grids; it
    # only takes over for very fine grids, where ||S|| ~ 4 / h^2.
    res_tol = max(1e-10 * (1 + abs(value)),
                  16 * EPS * scale * np.sqrt(model.n_y))
    res = np.inf
    for it in range(max_refine):
        x = solve_banded((1, 1), ab, x, check_finite=False)
        nrm = np.linalg.norm(x)
        if not np.isfinite(nrm) or nrm == 0:
            raise EigenNoConvergence("inverse iteration broke down", lam=lam)
        x /= nrm
        if x[np.argmax(np.abs(x))] < 0:
            x = -x
        phi = x / sw
        res = float(np.abs(operator_apply(model, lam, v, phi) - value * phi).max()
                    / np.abs(phi).max())
        if res <= res_tol and np.all(x > 0) and it >= 1:
            break
    else:
        if not np.all(x > 0):
            raise SignAmbiguity("principal eigenvector has non-positive entries",
                                lam=lam, min_entry=float(x.min()))
        raise EigenNoConvergence("eigen residual above tolerance",
                                 lam=lam, residual=res, tol=res_tol)

    # Rayleigh refinement of the value.  The energy form (sum of squared
    # differences plus potential term) avoids the O(eps/h^2) cancellation of
    # x^T S x, so the value is accurate far below the bisection tolerance on
    # fine grids.  It is kept inside the certified bracket.
    phi = x / sw
    rq = (np.sum(np.diff(phi) ** 2) / model.h + np.dot(w, p * phi ** 2)) / np.dot(w, phi ** 2)
    if hi > lo and abs(rq - value) <= 10 * model.eig_tol + 64 * EPS * scale:
        value = min(max(float(rq), lo), hi)
    return PrincipalEigenpair(lam, value, phi, w, res)


def reaction_potential(model: CrossSectionModel, scale: float = 1.0) -> np.ndarray:
    """q - scale * a (scale = 1: mu; scale = Y_inf: rescaled reaction)."""
    return model.potential(scale)


def mu(model: CrossSectionModel, lam: float, scale: float = 1.0) -> float:
    return principal_eigenpair(model, lam, model.potential(scale)).value


def nu(model: CrossSectionModel, lam: float) -> float:
    return principal_eigenpair(model, lam, np.zeros(model.n_y)).value


def mu_derivative(model: CrossSectionModel, lam: float, scale: float = 1.0,
                  pair: Optional[PrincipalEigenpair] = None) -> float:
    """d mu / d lam = -int u phi^2 (phi L2-normalized)."""
    if pair is None:
        pair = principal_eigenpair(model, lam, model.potential(scale))
    return -float(np.dot(pair.weights, model.flow * pair.eigenfunction ** 2))


def nu_derivative(model: CrossSectionModel, lam: float) -> float:
    pair = principal_eigenpair(model, lam, np.zeros(model.n_y))
    return mu_derivative(model, lam, pair=pair)


def rayleigh_quotient(model: CrossSectionModel, lam: float, phi, potential=None) -> float:
    """(int phi'^2 - lam int u phi^2 + int V phi^2) / int phi^2 on the grid."""
    v = _check_potential(model, potential)
    phi = np.asarray(phi, dtype=float)
    w = model.weights
    grad = np.sum(np.diff(phi) ** 2) / model.h
    num = grad + np.dot(w, (-lam * model.flow + v) * phi ** 2)
    return float(num / np.dot(w, phi ** 2))


def eigen_sweep(model: CrossSectionModel, lambdas: Iterable[float]):
    """Rows (lambda, mu, mu', nu) for a lambda sweep."""
    rows = []
    zero = np.zeros(model.n_y)
    for lam in lambdas:
        pm = principal_eigenpair(model, lam)
        pn = principal_eigenpair(model, lam, zero)
        rows.append((float(lam), pm.value, mu_derivative(model, lam, pair=pm), pn.value))
    return rows
