"""Dispersion relation k(lam) = lam^2 - mu(lam), minimal speed and regime classification.

For mu(0) < 0 the function g(lam) = k(lam)/lam tends to +inf at both ends of
(0, inf), and its minimum c* is attained at lam*.  For c > c* the equation
k(lam) = c lam has exactly two positive roots lam1 < lam* < lam2 (k is
strictly convex).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from . import eigen
from .cross_section import CrossSectionModel
from .errors import (BracketNotFound, DegenerateMuZero, PreconditionMu0,
                     SpeedBelowMinimal, UpperBracketNotFound)

MU0_TOL = 1e-10


def k_of_lambda(model: CrossSectionModel, lam: float) -> float:
    return lam * lam - eigen.mu(model, lam)


def _k_and_slope(model, lam):
    """k(lam) and k'(lam) = 2 lam - mu'(lam) from one eigen solve."""
    pair = eigen.principal_eigenpair(model, lam)
    return lam * lam - pair.value, 2 * lam - eigen.mu_derivative(model, lam, pair=pair)


def minimal_speed(model: CrossSectionModel, *, search_factor: float = 50.0,
                  lam_floor: float = 1e-6) -> Tuple[float, float]:
    """(c*, lam*) = min over lam > 0 of k(lam)/lam.

    A bracket is found by doubling/halving from sqrt(-mu(0)), refined by
    golden-section search, then polished by bisection on the optimality
    condition k'(lam) lam - k(lam) = 0.
    """
    mu0 = eigen.mu(model, 0.0)
    if mu0 >= -MU0_TOL:
        raise PreconditionMu0("minimal speed needs mu(0) < 0", mu0=mu0)

    def g(lam):
        return k_of_lambda(model, lam) / lam

    guess = np.sqrt(-mu0)
    lam_max = search_factor * max(1.0, guess)
    b = guess
    gb = g(b)
    c = 2 * b
    gc = g(c)
    while gc <= gb:
        b, gb = c, gc
        c *= 2
        if c > lam_max:
            raise BracketNotFound("k/lambda decreasing on the search range",
                                  range=(lam_floor, lam_max))
        gc = g(c)
    a = b / 2
    ga = g(a)
    while ga <= gb:
        c, gc = b, gb
        b, gb = a, ga
        a /= 2
        if a < lam_floor:
            raise BracketNotFound("k/lambda increasing on the search range",
                                  range=(lam_floor, lam_max))
        ga = g(a)

    res = optimize.minimize_scalar(g, bracket=(a, b, c), method="golden",
                                   options={"xtol": 1e-10})
    lam = float(res.x)

    def F(x):
        k, dk = _k_and_slope(model, x)
        return dk * x - k

    # F is nondecreasing (F' = k'' lam >= 0); widen a small bracket around lam
    lo, hi = lam * (1 - 1e-6), lam * (1 + 1e-6)
    while F(lo) > 0:
        lo = max(0.5 * lo, lam_floor)
        if lo == lam_floor and F(lo) > 0:
            break
    while F(hi) < 0 and hi < lam_max:
        hi *= 1.5
    if F(lo) <= 0 <= F(hi):
        lam = optimize.bisect(F, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps,
                              maxiter=200)
    return g(lam), float(lam)


def roots_for_speed(model: CrossSectionModel, c: float, *, search_factor: float = 50.0,
                    star: Optional[Tuple[float, float]] = None) -> Tuple[float, float]:
    """The two positive roots lam1 < lam* < lam2 of k(lam) = c lam."""
    c_star, lam_star = star if star is not None else minimal_speed(model, search_factor=search_factor)
    if c < c_star - 1e-9:
        raise SpeedBelowMinimal("speed below the minimal speed", c=c, c_star=c_star)
    if abs(c - c_star) <= 1e-9:
        return lam_star, lam_star  # degenerate (tangent) pair

    def psi(lam):
        return k_of_lambda(model, lam) - c * lam

    lam1 = optimize.bisect(psi, 0.0, lam_star, xtol=1e-14, maxiter=200)
    lam_max = search_factor * max(1.0, lam_star)
    hi = 2 * lam_star
    while psi(hi) <= 0:
        hi *= 2
        if hi > lam_max:
            raise UpperBracketNotFound("no sign change above lambda*", c=c, range=(lam_star, lam_max))
    lam2 = optimize.bisect(psi, lam_star, hi, xtol=1e-14, maxiter=200)
    return float(lam1), float(lam2)


def sup_condition(model: CrossSectionModel) -> Tuple[bool, float, float]:
    """Check sup_lam (mu(lam) - lam^2) < 0.

    The function is concave, so its maximizer is the root of mu' - 2 lam,
    which lies in [-B, B] with B = max|u|/2 + 1 because |mu'| <= max|u|.
    Returns (holds, sup value, maximizer).
    """
    B = 0.5 * float(np.abs(model.flow).max()) + 1.0

    def dG(lam):
        return eigen.mu_derivative(model, lam) - 2 * lam

    lam = optimize.bisect(dG, -B, B, xtol=1e-13, maxiter=200)
    val = eigen.mu(model, lam) - lam * lam
    return bool(val < 0), float(val), float(lam)


@dataclass(frozen=True)
class SpeedAnalysis:
    mu0: float
    c_star: Optional[float]
    lambda_star: Optional[float]
    sup_condition_holds: bool
    sup_value: float
    k_samples: List[Tuple[float, float]] = field(default_factory=list)


def analyze_speed(model: CrossSectionModel, lambdas: Sequence[float] = (), *,
                  search_factor: float = 50.0) -> SpeedAnalysis:
    mu0 = eigen.mu(model, 0.0)
    c_star = lam_star = None
    if mu0 < -MU0_TOL:
        c_star, lam_star = minimal_speed(model, search_factor=search_factor)
    holds, sup_val, _ = sup_condition(model)
    samples = [(float(l), k_of_lambda(model, l)) for l in lambdas]
    return SpeedAnalysis(mu0, c_star, lam_star, holds, sup_val, samples)


@dataclass(frozen=True)
class BlowOffCertificate:
    """eta with mu(eta) - eta^2 > 0; drift = margin/eta is the certified leftward speed."""

    eta: float
    margin: float

    @property
    def drift(self) -> float:
        return self.margin / self.eta


def blowoff_margin(model: CrossSectionModel, eta: float) -> float:
    return eigen.mu(model, eta) - eta * eta


def blowoff_certificate(model: CrossSectionModel, decay: float, *,
                        samples: int = 200) -> Optional[BlowOffCertificate]:
    """Find eta in (0, decay] with mu(eta) - eta^2 > 0, or None.

    eta = decay itself is preferred when admissible (the tightest spatial
    localization compatible with the initial data).  Otherwise a log-spaced
    scan of (decay*1e-3, decay] is refined around the best margin.
    """
    m = blowoff_margin(model, decay)
    if m > 0:
        return BlowOffCertificate(float(decay), float(m))
    etas = np.geomspace(decay * 1e-3, decay, samples)
    margins = np.array([blowoff_margin(model, e) for e in etas])
    i = int(np.argmax(margins))
    lo = etas[max(i - 1, 0)]
    hi = etas[min(i + 1, samples - 1)]
    res = optimize.minimize_scalar(lambda e: -blowoff_margin(model, e),
                                   bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-10 * decay})
    eta, best = (float(res.x), -float(res.fun))
    if best < margins[i]:
        eta, best = float(etas[i]), float(margins[i])
    if best > 0:
        return BlowOffCertificate(eta, best)
    return None


@dataclass(frozen=True)
class RegimeVerdict:
    kind: str  # Extinction | BlowOff | Propagation | OpenConjectured
    decay: float
    rate: Optional[float] = None
    speed: Optional[float] = None
    c_star: Optional[float] = None
    lambda_star: Optional[float] = None
    blowoff: Optional[BlowOffCertificate] = None

    def fields(self):
        """Ordered key/value pairs of the record line."""
        out = []
        if self.kind == "Extinction":
            out.append(("rate", self.rate))
        elif self.kind == "Propagation":
            out.append(("speed", self.speed))
        elif self.kind == "OpenConjectured":
            out.append(("c_star", self.c_star))
        if self.blowoff is not None:
            prefix = "" if self.kind == "BlowOff" else "blowoff_"
            out += [(prefix + "eta", self.blowoff.eta), (prefix + "margin", self.blowoff.margin),
                    (prefix + "drift", self.blowoff.drift)]
        return out


def classify_regime(model: CrossSectionModel, decay: float, *, eta_samples: int = 200,
                    search_factor: float = 50.0) -> RegimeVerdict:
    """Classify initial data decaying like exp(-decay x)."""
    if not decay > 0:
        raise ValueError("decay rate must be positive")
    decay = float(decay)
    mu0 = eigen.mu(model, 0.0)
    if abs(mu0) <= MU0_TOL:
        raise DegenerateMuZero("mu(0) = 0: regime not classified", mu0=mu0)
    cert = blowoff_certificate(model, decay, samples=eta_samples)
    if mu0 > 0:
        return RegimeVerdict("Extinction", decay, rate=mu0, blowoff=cert)
    if cert is not None:
        return RegimeVerdict("BlowOff", decay, blowoff=cert)
    c_star, lam_star = minimal_speed(model, search_factor=search_factor)
    if decay < lam_star and blowoff_margin(model, decay) < 0:
        return RegimeVerdict("Propagation", decay, speed=k_of_lambda(model, decay) / decay,
                             c_star=c_star, lambda_star=lam_star)
    return RegimeVerdict("OpenConjectured", decay, c_star=c_star, lambda_star=lam_star)
