import numpy as np
import pytest

from conftest import shear_model
from oracles import constant_roots, constant_speed
from kppfront.cross_section import constant_model
from kppfront.dispersion import (analyze_speed, blowoff_certificate, classify_regime,
                                 k_of_lambda, minimal_speed, roots_for_speed, sup_condition)
from kppfront.eigen import mu, mu_derivative
from kppfront.errors import DegenerateMuZero, PreconditionMu0, SpeedBelowMinimal


def test_constant_k():
    m = constant_model()
    for lam in (0.0, 0.5, 2.0):
        assert k_of_lambda(m, lam) == pytest.approx(lam * lam + 0.75, abs=1e-15)
    assert k_of_lambda(m, 0.0) == -mu(m, 0.0)


@pytest.mark.parametrize("q", [0.25, 1e-3, 0.9])
def test_constant_minimal_speed(q):
    c, l = minimal_speed(constant_model(1.0, q))
    cs, ls = constant_speed(1.0, q)
    assert c == pytest.approx(cs, abs=1e-8)
    assert l == pytest.approx(ls, abs=1e-8)


def test_shear_minimal_speed_grid_search():
    m = shear_model()
    c, l = minimal_speed(m)
    lams = np.arange(l - 0.05, l + 0.05, 1e-4)
    brute = min(k_of_lambda(m, x) / x for x in lams)
    assert c == pytest.approx(brute, abs=1e-3)
    assert c <= brute + 1e-12
    # optimality: k(l*) = c* l*, k'(l*) = c*
    assert k_of_lambda(m, l) == pytest.approx(c * l, abs=1e-9)
    assert 2 * l - mu_derivative(m, l) == pytest.approx(c, abs=1e-6)


def test_minimal_speed_needs_negative_mu0():
    with pytest.raises(PreconditionMu0):
        minimal_speed(constant_model(1.0, 1.5))


def test_constant_roots():
    l1, l2 = roots_for_speed(constant_model(), 2.0)
    r1, r2 = constant_roots(1.0, 0.25, 2.0)
    assert l1 == pytest.approx(r1, abs=1e-9) and l2 == pytest.approx(r2, abs=1e-9)


def test_roots_at_and_below_minimal_speed():
    m = constant_model()
    c, l = minimal_speed(m)
    l1, l2 = roots_for_speed(m, c)
    assert abs(l1 - l) <= 1e-4 and abs(l2 - l) <= 1e-4
    with pytest.raises(SpeedBelowMinimal):
        roots_for_speed(m, c - 1e-3)


def test_shear_roots_sign_change():
    m = shear_model()
    c, l = minimal_speed(m)
    l1, l2 = roots_for_speed(m, c + 0.5)
    assert l1 < l < l2
    for r in (l1, l2):
        assert abs(k_of_lambda(m, r) - (c + 0.5) * r) <= 1e-9
        lo, hi = r - 1e-3, r + 1e-3
        assert np.sign(k_of_lambda(m, lo) - (c + 0.5) * lo) != np.sign(k_of_lambda(m, hi) - (c + 0.5) * hi)


def test_root_collapse_speed():
    m = shear_model()
    c_star, _ = minimal_speed(m)
    lo, hi = c_star - 0.5, c_star + 1.0  # gap(c) = l2 - l1, zero below c*
    def gap(c):
        try:
            l1, l2 = roots_for_speed(m, c)
        except SpeedBelowMinimal:
            return -1.0
        return l2 - l1
    while True:
        mid = 0.5 * (lo + hi)
        g = gap(mid)
        if 0 <= g <= 1e-4:
            break
        if g < 0:
            lo = mid
        else:
            hi = mid
    assert mid == pytest.approx(c_star, abs=1e-6)


def test_k_convex_on_samples():
    m = shear_model()
    lams = np.linspace(-2, 3, 51)
    k = np.array([k_of_lambda(m, x) for x in lams])
    assert np.all(k[:-2] - 2 * k[1:-1] + k[2:] >= -1e-8)


def test_sup_condition():
    holds, val, lam = sup_condition(constant_model())
    assert holds and val == pytest.approx(-0.75) and abs(lam) < 1e-10
    s = analyze_speed(shear_model(), [0.5, 1.0])
    assert s.sup_condition_holds and s.c_star > 0
    assert len(s.k_samples) == 2
    holds, val, _ = sup_condition(constant_model(1.0, 1.5))
    assert not holds and val == pytest.approx(0.5)


def test_classify_examples():
    v = classify_regime(constant_model(), 0.5)
    assert v.kind == "Propagation" and v.speed == pytest.approx(2.0, abs=1e-12)
    v = classify_regime(constant_model(1.0, 1.5), 0.5)
    assert v.kind == "Extinction" and v.rate == pytest.approx(0.5)
    assert v.blowoff.eta == 0.5 and v.blowoff.margin == pytest.approx(0.25)
    v = classify_regime(constant_model(), 1.2)
    assert v.kind == "OpenConjectured"
    assert v.c_star == pytest.approx(2 * np.sqrt(0.75), abs=1e-8)


def test_classify_blowoff_and_degenerate():
    # shear case with mu(0) < 0 but strong flow: mu(eta) - eta^2 can be positive only
    # for mu(0) > 0 in the constant case, so construct the BlowOff case via the
    # certificate directly
    cert = blowoff_certificate(constant_model(1.0, 1.2), 0.3)
    assert cert is not None and cert.margin == pytest.approx(0.2 - 0.09)
    assert cert.drift == pytest.approx(cert.margin / cert.eta)
    with pytest.raises(DegenerateMuZero):
        classify_regime(constant_model(1.0, 1.0), 0.5)
    assert blowoff_certificate(constant_model(), 0.5) is None


def test_classify_blowoff_with_flow():
    """Reaction peaked at y = 0 (mod L), where the flow runs leftward: the ground
    state sits in the counter-flow, mu'(0) > 0, and mu(eta) - eta^2 turns
    positive for small eta although mu(0) < 0."""
    from kppfront.cross_section import LossSpec, ProfileSpec, ReactionSpec, build_model

    def model(q):
        return build_model(5.0, 129, ProfileSpec("cosine", 0.0, -1.0),
                           ReactionSpec("linear", ProfileSpec("cosine", 1.0, 0.8)),
                           LossSpec("linear", ProfileSpec("constant", q)))

    m = model(1.0 - mu(model(1.0), 0.0) - 0.02)  # shifts mu(0) to -0.02
    assert mu(m, 0.0) == pytest.approx(-0.02, abs=1e-12)
    v = classify_regime(m, 0.5)
    assert v.kind == "BlowOff"
    eta = v.blowoff.eta
    assert 0 < eta < 0.5 and v.blowoff.margin == pytest.approx(mu(m, eta) - eta ** 2, abs=1e-14)
    # the refined eta is at least as good as every scan sample
    grid = np.geomspace(5e-4, 0.5, 200)
    assert v.blowoff.margin >= max(mu(m, e) - e * e for e in grid) - 1e-14
    assert dict(v.fields())["drift"] == pytest.approx(v.blowoff.margin / eta)
