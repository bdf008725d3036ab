"""Cross-section model: the interval [0, L], the shear flow and the reaction/loss laws.

Coefficients are stored as node samples on a uniform grid of ``n_y`` points.
All integrals over the cross-section use the trapezoid rule, whose weights are
``h * (1/2, 1, ..., 1, 1/2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import BadGrid, HypothesisViolation, NegativeTemperature

REACTION_KINDS = ("linear", "logkpp")
LOSS_KINDS = ("linear", "saturating")
PROFILE_SHAPES = ("constant", "cosine", "two_bump")


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.setflags(write=False)
    return out


def trapezoid_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return w


@dataclass(frozen=True)
class ProfileSpec:
    """Named coefficient profile over [0, L].

    constant:  mean
    cosine:    mean + amplitude * cos(2 pi y / L)
    two_bump:  mean + amplitude * (g(y - L/4) + g(y - 3L/4)),  g Gaussian of width 0.08 L
    """

    shape: str = "constant"
    mean: float = 0.0
    amplitude: float = 0.0

    def __post_init__(self):
        if self.shape not in PROFILE_SHAPES:
            raise HypothesisViolation(f"unknown profile shape {self.shape!r}",
                                      allowed=PROFILE_SHAPES)

    def sample(self, y: np.ndarray, L: float) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.shape == "constant":
            return np.full_like(y, self.mean)
        if self.shape == "cosine":
            return self.mean + self.amplitude * np.cos(2 * np.pi * y / L)
        w = 0.08 * L
        bumps = np.exp(-((y - 0.25 * L) / w) ** 2) + np.exp(-((y - 0.75 * L) / w) ** 2)
        return self.mean + self.amplitude * bumps


Profile = Union[ProfileSpec, float, np.ndarray, Callable[[np.ndarray], np.ndarray]]


def sample_profile(spec: Profile, y: np.ndarray, L: float) -> np.ndarray:
    if isinstance(spec, ProfileSpec):
        return spec.sample(y, L)
    if callable(spec):
        return np.asarray(spec(y), dtype=float) * np.ones_like(y)
    arr = np.asarray(spec, dtype=float)
    if arr.ndim == 0:
        return np.full_like(y, float(arr))
    if arr.shape != y.shape:
        raise BadGrid("profile length does not match the grid",
                      expected=y.size, got=arr.size)
    return arr.copy()


@dataclass(frozen=True)
class ReactionSpec:
    kind: str = "linear"
    profile: Profile = field(default_factory=lambda: ProfileSpec("constant", 1.0))
    holder_alpha: float = 1.0
    s0: float = 1.0


@dataclass(frozen=True)
class LossSpec:
    kind: str = "linear"
    profile: Profile = field(default_factory=lambda: ProfileSpec("constant", 0.25))


@dataclass(frozen=True)
class ReactionModel:
    """f(y, T) = a(y) T  (linear)  or  a(y) ln(1 + T)  (logkpp)."""

    kind: str
    amplitude: np.ndarray
    holder_alpha: float = 1.0
    s0: float = 1.0
    quad_bound: float = 0.0

    def __call__(self, T):
        a = self.amplitude
        if self.kind == "linear":
            return a * T
        return a * np.log1p(T)


@dataclass(frozen=True)
class LossModel:
    """h(y, T) = q(y) T  (linear)  or  q(y) T (2 - 1/(1 + T))  (saturating)."""

    kind: str
    rate: np.ndarray
    global_bound: float
    holder_alpha: float = 1.0
    s0: float = 1.0
    quad_bound: float = 0.0

    def __call__(self, T):
        q = self.rate
        if self.kind == "linear":
            return q * T
        return q * T * (2.0 - 1.0 / (1.0 + T))


@dataclass(frozen=True)
class CrossSectionModel:
    """Discrete cross-section with flow, reaction and loss.

    Arrays are read-only, so a model can be shared freely.  ``eig_tol`` and
    ``eig_shift`` are the bisection tolerance and inverse-iteration shift used
    by :mod:`kppfront.eigen`.
    """

    length: float
    n_y: int
    flow: np.ndarray
    lewis: float
    reaction: ReactionModel
    loss: LossModel
    eig_tol: float = 1e-12
    eig_shift: float = 1e-10

    @property
    def h(self) -> float:
        return self.length / (self.n_y - 1)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.n_y)

    @property
    def weights(self) -> np.ndarray:
        return trapezoid_weights(self.n_y, self.h)

    @property
    def a(self) -> np.ndarray:
        return self.reaction.amplitude

    @property
    def q(self) -> np.ndarray:
        return self.loss.rate

    @property
    def K(self) -> float:
        return self.loss.global_bound

    @property
    def quad_bound(self) -> float:
        """Common constant M in f >= a s - M s^(1+alpha), h <= q s + M s^(1+alpha)."""
        return max(self.reaction.quad_bound, self.loss.quad_bound)

    def potential(self, scale: float = 1.0) -> np.ndarray:
        """Zeroth-order coefficient q - scale * a of the cross-sectional operator."""
        return self.q - scale * self.a

    def mean(self, values) -> float:
        return float(np.dot(self.weights, values) / self.length)

    def with_numerics(self, **kw) -> "CrossSectionModel":
        from dataclasses import replace
        return replace(self, **kw)


def project_zero_mean(u: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Subtract the trapezoid mean."""
    u = np.asarray(u, dtype=float)
    return u - np.dot(weights, u) / weights.sum()


def _reaction_quad_bound(kind, a, s0, alpha):
    """Smallest M with a s - f(s) <= M s^(1+alpha) on (0, s0], by dense sampling."""
    if kind == "linear":
        return 0.0
    s = np.geomspace(1e-6, s0, 4001)
    ratio = (s - np.log1p(s)) / s ** (1 + alpha)
    return float(a.max() * ratio.max() * (1 + 1e-6))


def _loss_quad_bound(kind, q, s0, alpha):
    if kind == "linear":
        return 0.0
    s = np.geomspace(1e-6, s0, 4001)
    ratio = (s * s / (1 + s)) / s ** (1 + alpha)
    return float(q.max() * ratio.max() * (1 + 1e-6))


def _check_hypotheses(model: CrossSectionModel) -> None:
    """Sampled check of the KPP and loss hypotheses; raises on the first failure."""
    r, ls = model.reaction, model.loss
    a, q = r.amplitude, ls.rate
    s0 = r.s0
    T = np.geomspace(1e-6, 10 * s0, 97)[:, None]
    f = r(T)
    hT = ls(T)
    tol = 1e-13
    bad = np.argwhere(~(f > 0))
    if bad.size:
        i, j = bad[0]
        raise HypothesisViolation("f(y,T) must be positive for T > 0", y=float(model.y[j]), T=float(T[i, 0]))
    bad = np.argwhere(f > a * T * (1 + tol))
    if bad.size:
        i, j = bad[0]
        raise HypothesisViolation("f(y,T) <= a(y) T violated", y=float(model.y[j]), T=float(T[i, 0]))
    if np.any(np.diff(f, axis=0) < 0):
        i, j = np.argwhere(np.diff(f, axis=0) < 0)[0]
        raise HypothesisViolation("f must be nondecreasing in T", y=float(model.y[j]), T=float(T[i, 0]))
    lo = hT < q * T * (1 - tol)
    hi = hT > model.K * T * (1 + tol)
    for mask, what in ((lo, "q(y) T <= h(y,T)"), (hi, "h(y,T) <= K T")):
        if mask.any():
            i, j = np.argwhere(mask)[0]
            raise HypothesisViolation(what + " violated", y=float(model.y[j]), T=float(T[i, 0]))
    # quadratic bounds on [0, s0]
    s = T[T[:, 0] <= s0]
    M = model.quad_bound
    alpha = r.holder_alpha
    if np.any(r(s) < a * s - M * s ** (1 + alpha) - tol * s):
        raise HypothesisViolation("f >= a s - M s^(1+alpha) violated on [0, s0]", M=M)
    if np.any(ls(s) > q * s + M * s ** (1 + alpha) + tol * s):
        raise HypothesisViolation("h <= q s + M s^(1+alpha) violated on [0, s0]", M=M)


def build_model(L: float = 1.0, n_y: int = 33, flow_spec: Profile = 0.0,
                reaction_spec: ReactionSpec | None = None,
                loss_spec: LossSpec | None = None, Le: float = 1.0,
                *, eig_tol: float = 1e-12, eig_shift: float = 1e-10) -> CrossSectionModel:
    """Sample the coefficient profiles, project the flow to zero mean and
    validate the standing hypotheses."""
    reaction_spec = reaction_spec or ReactionSpec()
    loss_spec = loss_spec or LossSpec()
    if not (np.isfinite(L) and L > 0):
        raise BadGrid("L must be positive", L=L)
    if int(n_y) != n_y or n_y < 3:
        raise BadGrid("n_y must be an integer >= 3", n_y=n_y)
    if not (np.isfinite(Le) and Le > 0):
        raise HypothesisViolation("Lewis number must be positive", Le=Le)
    n_y = int(n_y)
    y = np.linspace(0.0, L, n_y)
    w = trapezoid_weights(n_y, L / (n_y - 1))

    u = project_zero_mean(sample_profile(flow_spec, y, L), w)
    if not np.all(np.isfinite(u)):
        raise HypothesisViolation("flow has non-finite values")

    if reaction_spec.kind not in REACTION_KINDS:
        raise HypothesisViolation(f"unknown reaction kind {reaction_spec.kind!r}")
    if loss_spec.kind not in LOSS_KINDS:
        raise HypothesisViolation(f"unknown loss kind {loss_spec.kind!r}")
    alpha, s0 = float(reaction_spec.holder_alpha), float(reaction_spec.s0)
    if not (0 < alpha <= 1):
        raise HypothesisViolation("holder_alpha must lie in (0, 1]", alpha=alpha)
    if not s0 > 0:
        raise HypothesisViolation("s0 must be positive", s0=s0)

    a = sample_profile(reaction_spec.profile, y, L)
    if not np.all(np.isfinite(a)) or np.any(a <= 0):
        j = int(np.argmin(np.where(np.isfinite(a), a, -np.inf)))
        raise HypothesisViolation("reaction amplitude a(y) must be positive everywhere",
                                  y=float(y[j]), a=float(a[j]))
    q = sample_profile(loss_spec.profile, y, L)
    if not np.all(np.isfinite(q)) or np.any(q < 0):
        j = int(np.argmin(np.where(np.isfinite(q), q, -np.inf)))
        raise HypothesisViolation("loss rate q(y) must be nonnegative", y=float(y[j]), q=float(q[j]))
    if not np.dot(w, q) > 0:
        raise HypothesisViolation("the cross-sectional integral of q must be positive",
                                  integral=float(np.dot(w, q)))

    K = float(q.max()) if loss_spec.kind == "linear" else 2.0 * float(q.max())
    reaction = ReactionModel(reaction_spec.kind, _frozen(a), alpha, s0,
                             _reaction_quad_bound(reaction_spec.kind, a, s0, alpha))
    loss = LossModel(loss_spec.kind, _frozen(q), K, alpha, s0,
                     _loss_quad_bound(loss_spec.kind, q, s0, alpha))
    model = CrossSectionModel(float(L), n_y, _frozen(u), float(Le), reaction, loss,
                              float(eig_tol), float(eig_shift))
    _check_hypotheses(model)
    return model


def constant_model(a: float = 1.0, q: float = 0.25, *, n_y: int = 33, L: float = 1.0,
                   Le: float = 1.0, flow: Profile = 0.0, **kw) -> CrossSectionModel:
    """Linear reaction and loss with constant coefficients."""
    return build_model(L, n_y, flow, ReactionSpec("linear", ProfileSpec("constant", a)),
                       LossSpec("linear", ProfileSpec("constant", q)), Le, **kw)


def _select(arr, y_index):
    return arr if y_index is None else arr[y_index]


def eval_reaction(model: CrossSectionModel, y_index, T):
    """f(y_j, T).  ``y_index=None`` broadcasts T against the whole grid (last axis)."""
    T = np.asarray(T, dtype=float)
    if np.any(T < 0):
        raise NegativeTemperature("reaction evaluated at negative temperature",
                                  T=float(T.min()))
    a = _select(model.reaction.amplitude, y_index)
    out = ReactionModel(model.reaction.kind, a)(T)
    return float(out) if np.ndim(out) == 0 else out


def eval_loss(model: CrossSectionModel, y_index, T):
    """h(y_j, T).  ``y_index=None`` broadcasts T against the whole grid (last axis)."""
    T = np.asarray(T, dtype=float)
    if np.any(T < 0):
        raise NegativeTemperature("loss evaluated at negative temperature",
                                  T=float(T.min()))
    q = _select(model.loss.rate, y_index)
    out = LossModel(model.loss.kind, q, model.K)(T)
    return float(out) if np.ndim(out) == 0 else out
