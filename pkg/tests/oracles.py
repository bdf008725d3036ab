"""Independent reference computations used by the tests.

Nothing here calls into the eigen or dispersion modules: the oracle eigenvalue
is the smallest eigenvalue of the dense generalized symmetric problem
(W A) phi = value W phi, assembled from scratch on a refined grid and handed to
LAPACK's dense ``eigh``.
"""
import numpy as np
from scipy.linalg import eigh

from kppfront.cross_section import ProfileSpec


def _trap(n, h):
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    return w


def dense_principal(lam, *, flow=ProfileSpec("constant", 0.0), react=ProfileSpec("constant", 1.0),
                    loss=ProfileSpec("constant", 0.25), scale=1.0, zero_potential=False,
                    L=1.0, n_y=33, refine=4):
    """Principal eigenvalue of -phi'' - lam u phi + (q - scale a) phi on a grid refined
    ``refine`` times (n = refine (n_y - 1) + 1 nodes), Neumann ends via ghost points."""
    n = refine * (n_y - 1) + 1
    h = L / (n - 1)
    y = np.linspace(0.0, L, n)
    w = _trap(n, h)
    u = flow.sample(y, L)
    u = u - np.dot(w, u) / w.sum()
    V = np.zeros(n) if zero_potential else loss.sample(y, L) - scale * react.sample(y, L)
    A = np.zeros((n, n))
    for j in range(n):
        A[j, j] = 2.0 / h ** 2
        if j > 0:
            A[j, j - 1] = -1.0 / h ** 2
        if j < n - 1:
            A[j, j + 1] = -1.0 / h ** 2
    A[0, 1] = A[-1, -2] = -2.0 / h ** 2   # ghost points phi_{-1} = phi_1
    A += np.diag(V - lam * u)
    Wm = np.diag(w)
    B = Wm @ A
    B = 0.5 * (B + B.T)                   # symmetric up to rounding
    vals = eigh(B, Wm, eigvals_only=True, subset_by_index=[0, 0])
    return float(vals[0])


def constant_mu(a, q):
    """mu(lam) = q - a for constant coefficients and zero flow (phi = const)."""
    return q - a


def constant_speed(a, q):
    """(c*, lambda*) for k(lam) = lam^2 + a - q: c* = 2 sqrt(a - q), lambda* = sqrt(a - q)."""
    r = np.sqrt(a - q)
    return 2 * r, r


def constant_roots(a, q, c):
    """Roots of lam^2 - c lam + (a - q) = 0."""
    d = np.sqrt(c * c - 4 * (a - q))
    return (c - d) / 2, (c + d) / 2


def linear_symbol(a, q, kx, ky):
    """Growth rate of the mode e^{i kx x} cos(ky y) for T_t = Lap T + (a - q) T."""
    return a - q - kx ** 2 - ky ** 2
