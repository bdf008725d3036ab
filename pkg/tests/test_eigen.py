import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import SHEAR_LOSS, shear_model
from oracles import dense_principal
from kppfront.cross_section import LossSpec, ProfileSpec, ReactionSpec, build_model, constant_model
from kppfront.eigen import (eigen_sweep, mu, mu_derivative, nu, nu_derivative, principal_eigenpair,
                            rayleigh_quotient)
from kppfront.errors import BadGrid

COS = ProfileSpec("cosine", 0.0, 1.0)


def test_constant_potential_exact():
    m = constant_model(1.0, 0.25)
    p = principal_eigenpair(m, 0.7)
    assert p.value == -0.75
    np.testing.assert_allclose(p.eigenfunction, 1 / np.sqrt(m.length), rtol=1e-12)
    assert p.norm_error <= 1e-12


def test_nu_zero_at_origin_exactly():
    m = build_model(1.0, 33, ProfileSpec("cosine", 0.0, 2.0))
    p = principal_eigenpair(m, 0.0, np.zeros(m.n_y))
    assert p.value == 0.0
    np.testing.assert_allclose(p.eigenfunction, p.eigenfunction[0], rtol=1e-12)
    assert nu_derivative(m, 0.0) == pytest.approx(0.0, abs=1e-14)


def test_nu_matches_dense_oracle():
    m = build_model(1.0, 513, COS)
    assert nu(m, 1.0) == pytest.approx(dense_principal(1.0, flow=COS, zero_potential=True, n_y=513),
                                       abs=1e-6)


def test_mu_shear_matches_dense_oracle():
    m = shear_model(257)
    ref = dense_principal(2.0, flow=ProfileSpec("cosine", 0.0, 2.0), loss=SHEAR_LOSS, n_y=257)
    assert mu(m, 2.0) == pytest.approx(ref, abs=2e-5)
    # the same discretization on the same grid: agreement to rounding
    same = dense_principal(2.0, flow=ProfileSpec("cosine", 0.0, 2.0), loss=SHEAR_LOSS, n_y=257,
                           refine=1)
    assert mu(m, 2.0) == pytest.approx(same, abs=1e-10)


def test_invariants_of_pair():
    m = shear_model()
    for lam in (-2.0, -0.3, 0.0, 1.0, 2.5):
        p = principal_eigenpair(m, lam)
        assert np.all(p.eigenfunction > 0)
        assert p.norm_error <= 1e-12
        assert p.residual <= 1e-10 * (1 + abs(p.value))
        assert rayleigh_quotient(m, lam, p.eigenfunction) == pytest.approx(p.value, abs=1e-9)


def test_remark2_identity():
    m = build_model(1.0, 33, ProfileSpec("cosine", 0.0, 2.0))
    for lam in np.linspace(-2, 2, 9):
        assert abs(mu(m, lam) - (nu(m, lam) + 0.25 - 1.0)) <= 1e-9


def test_derivative_vs_central_difference():
    m = shear_model()
    eps = 1e-5
    for lam in (-1.5, 0.0, 1.0, 2.0):
        fd = (mu(m, lam + eps) - mu(m, lam - eps)) / (2 * eps)
        assert mu_derivative(m, lam) == pytest.approx(fd, abs=1e-6)


def test_derivative_zero_without_flow():
    m = constant_model()
    assert all(mu_derivative(m, l) == 0.0 for l in (-1, 0, 2))


def test_variational_upper_bound():
    m = shear_model()
    mean_v = m.mean(m.q - m.a)
    trial = np.full(m.n_y, 1 / np.sqrt(m.length))
    for lam in np.linspace(-3, 3, 13):
        value = mu(m, lam)
        assert value <= rayleigh_quotient(m, lam, trial) + 1e-12
        assert value <= mean_v + 1e-12


@settings(max_examples=25, deadline=None)
@given(amp=st.floats(0.0, 5.0), qamp=st.floats(0.0, 0.25),
       shape=st.sampled_from(["cosine", "two_bump"]), lam0=st.floats(-3, 3))
def test_concavity_and_nonpositive_nu(amp, qamp, shape, lam0):
    m = build_model(1.0, 33, ProfileSpec(shape, 0.0, amp),
                    loss_spec=LossSpec("linear", ProfileSpec("cosine", 0.25, qamp)))
    d = 0.1
    vals = [mu(m, lam0 + k * d) for k in (-1, 0, 1)]
    assert vals[0] - 2 * vals[1] + vals[2] <= 1e-8
    assert nu(m, lam0) <= 1e-10


def test_second_order_convergence():
    lam = 1.3
    errs = []
    ref = mu(shear_model(1025), lam)
    for n in (33, 65, 129):
        errs.append(abs(mu(shear_model(n), lam) - ref))
    ratios = [errs[i] / errs[i + 1] for i in range(2)]
    assert all(3.5 < r < 4.6 for r in ratios), ratios


def test_potential_length_checked():
    m = constant_model()
    with pytest.raises(BadGrid):
        principal_eigenpair(m, 0.0, np.zeros(m.n_y + 1))


def test_sweep_rows():
    m = shear_model()
    rows = eigen_sweep(m, [-1.0, 0.0, 1.0])
    assert len(rows) == 3 and rows[1][3] == 0.0
    for lam, v, dv, n in rows:
        assert v == mu(m, lam) and n == nu(m, lam)


def test_scaled_potential():
    m = constant_model(1.0, 0.25)
    assert mu(m, 0.3, scale=0.0) == 0.25
    assert mu(m, 0.3, scale=0.5) == pytest.approx(-0.25, abs=1e-15)
