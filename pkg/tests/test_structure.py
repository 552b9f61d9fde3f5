import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import unit_model
from hrl import catalog
from hrl.division import ratio_field
from hrl.errors import CapabilityError, InputError, ResolutionError
from hrl.harmonic import Polynomial
from hrl.structure import (AnalyticPair, annulus_samples, cauchy_riemann_residual, conjugate, fit_g,
                           ratio_series_eval)

RNG = np.random.default_rng(19)
PTS = RNG.uniform(-0.7, 0.7, size=(100, 2))


def test_conjugate_of_quadratic():
    w = conjugate(Polynomial(2, {(1, 1): 2.0}))
    assert w.terms == {(0, 2): -1.0, (2, 0): 1.0}


def test_conjugate_of_exp_sin():
    w = conjugate(catalog.exp_sin())
    assert w.eval([0.0, 0.0]) == 0.0
    np.testing.assert_allclose(w.eval(PTS), np.exp(PTS[:, 0]) * np.cos(PTS[:, 1]) - 1, atol=1e-14)


def test_conjugate_of_catalog_power():
    w = conjugate(catalog.im_zk(3))
    z = PTS[:, 0] + 1j * PTS[:, 1]
    np.testing.assert_allclose(w.eval(PTS), (z**3).real, atol=1e-14)


@pytest.mark.parametrize("spec", list(catalog.SPECS.values()) + [Polynomial(2, {(3, 0): 1.0, (1, 2): -3.0})],
                         ids=list(catalog.SPECS) + ["re_z3_poly"])
def test_cauchy_riemann_residual(spec):
    pair = AnalyticPair.from_imaginary(spec)
    assert cauchy_riemann_residual(pair, PTS) <= 1e-10


def test_conjugate_requires_2d():
    with pytest.raises(CapabilityError):
        conjugate(catalog.exp_sin(3))


def test_exponential_series():
    U = AnalyticPair.from_imaginary(catalog.exp_sin())
    V = AnalyticPair.from_imaginary(catalog.im_zk(1))
    fit = fit_g(U, V, degree=10)
    want = [0.0] + [1.0 / math.factorial(j) for j in range(1, 11)]
    assert np.max(np.abs(fit.g_coeffs - want)) <= 1e-9
    assert fit.max_imag <= 1e-10


def test_exp_cosh_default_degree():
    U = AnalyticPair.from_imaginary(catalog.exp_sin())
    V = AnalyticPair.from_imaginary(catalog.cosh_sin())
    fit = fit_g(U, V)
    assert fit.fit_residual <= 1e-5
    assert fit.max_imag <= 1e-8
    assert fit.n_samples == 512


def test_negative_control():
    V = AnalyticPair.from_imaginary(catalog.im_zk(1))
    U = AnalyticPair(-1.0 * catalog.im_zk(1), conjugate(catalog.im_zk(1)))  # U = i z
    fit = fit_g(U, V, degree=10)
    assert fit.max_imag == pytest.approx(1.0, abs=1e-6)


def test_annulus_samples_symmetric():
    V = AnalyticPair.from_imaginary(catalog.cosh_sin())
    z = annulus_samples(V)
    assert len(z) == 512
    np.testing.assert_array_equal(z[256:], np.conj(z[:256]))
    assert np.all((np.abs(V(z)) > 0.3) & (np.abs(V(z)) < 0.6))


def test_resampling_invariance():
    U = AnalyticPair.from_imaginary(catalog.exp_sin())
    V = AnalyticPair.from_imaginary(catalog.cosh_sin())
    z = annulus_samples(V, count=2048)
    top = z[:1024]
    a = fit_g(U, V, np.concatenate([top[0::2], np.conj(top[0::2])]), degree=30)
    b = fit_g(U, V, np.concatenate([top[1::2], np.conj(top[1::2])]), degree=30)
    # compare in the basis the fit is solved in: a_j rho^j with rho the sampled |V| radius
    w = a.r_out ** np.arange(len(a.g_coeffs))
    sa, sb = a.g_coeffs * w, b.g_coeffs * w
    assert np.max(np.abs(sa - sb)) <= 1e-6 * np.max(np.abs(sa))


def test_fit_errors():
    U = AnalyticPair.from_imaginary(catalog.exp_sin())
    V = AnalyticPair.from_imaginary(catalog.cosh_sin())
    with pytest.raises(ResolutionError):
        fit_g(U, V, degree=16, gate=2.0)
    with pytest.raises(InputError):
        fit_g(U, V, samples=annulus_samples(V, count=32), degree=16)


def test_ratio_series_small_cases():
    assert ratio_series_eval([0.0, 1.0], 0.3, 0.2) == 1.0
    assert ratio_series_eval([0.0, 0.0, 1.0], 0.3, 0.2) == pytest.approx(0.6)


@settings(max_examples=60, deadline=None)
@given(coeffs=st.lists(st.floats(min_value=-2, max_value=2), min_size=2, max_size=12),
       w=st.floats(min_value=-0.6, max_value=0.6), v=st.floats(min_value=1e-3, max_value=0.6))
def test_ratio_series_identity(coeffs, w, v):
    z = complex(w, v)
    g = sum(c * z**j for j, c in enumerate(coeffs))
    assert ratio_series_eval(coeffs, w, v) * v == pytest.approx(g.imag, abs=1e-10)


def test_pipeline_matches_ratio_field():
    U = AnalyticPair.from_imaginary(catalog.exp_sin())
    V = AnalyticPair.from_imaginary(catalog.cosh_sin())
    fit = fit_g(U, V, degree=30)
    z = annulus_samples(V)
    w = V(z)
    series = ratio_series_eval(fit.g_coeffs, w.real, w.imag)
    pts = np.stack([z.real, z.imag], axis=-1)
    f, _ = ratio_field(catalog.exp_sin(), catalog.cosh_sin(), unit_model("cosh_sin"), pts)
    assert np.max(np.abs(series - f)) <= 1e-6
