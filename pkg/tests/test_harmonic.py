import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hrl import catalog
from hrl.errors import CapabilityError, DegenerateInputError, InputError
from hrl.harmonic import (ClassicalConstants, ClosedForm, Polynomial, SumSpec, evaluate, from_dict, gradient,
                          laplacian_fd, loads, taylor_jet)
from hrl.jets import leading_part, poly_laplacian
from hrl.sphere import mean_rule

RNG = np.random.default_rng(7)
TWO_XY = Polynomial(2, {(1, 1): 2.0})


def disc_points(count, radius=0.9, rng=RNG):
    r = radius * np.sqrt(rng.random(count))
    t = 2 * np.pi * rng.random(count)
    return np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)


def test_eval_examples():
    assert evaluate(TWO_XY, [1.0, 1.0]) == 2.0
    assert evaluate(catalog.exp_sin(), [0.0, 0.0]) == 0.0
    want = math.cosh(0.5) * math.sin(0.5)
    assert evaluate(catalog.cosh_sin(), [0.5, 0.5]) == pytest.approx(want, rel=1e-14)
    assert want == pytest.approx(0.54062, abs=1e-5)


def test_eval_dimension_mismatch():
    with pytest.raises(InputError):
        evaluate(TWO_XY, [1.0, 2.0, 3.0])
    with pytest.raises(InputError):
        gradient(catalog.exp_sin(), [1.0])


def test_gradient_examples():
    assert np.array_equal(gradient(TWO_XY, [1.0, 1.0]), [2.0, 2.0])
    np.testing.assert_allclose(gradient(catalog.exp_sin(), [0.0, 0.0]), [0.0, 1.0], atol=1e-15)


@pytest.mark.parametrize("spec_id", sorted(catalog.SPECS))
def test_gradient_matches_central_differences(spec_id):
    spec = catalog.SPECS[spec_id]
    pts = disc_points(100)
    h = 1e-5
    fd = np.stack([(spec.eval(pts + h * e) - spec.eval(pts - h * e)) / (2 * h) for e in np.eye(2)], axis=-1)
    g = spec.gradient(pts)
    scale = np.maximum(np.linalg.norm(g, axis=-1, keepdims=True), 1.0)
    assert np.max(np.abs(fd - g) / scale) <= 1e-7


@pytest.mark.parametrize("spec_id", sorted(catalog.SPECS))
def test_closed_form_laplacian_fd(spec_id):
    spec = catalog.SPECS[spec_id]
    assert np.max(np.abs(laplacian_fd(spec, disc_points(100)))) <= 1e-6


def test_polynomial_laplacian_exactly_zero():
    for k in range(1, 7):
        poly = catalog.im_zk(k).taylor_jet([0.0, 0.0], k)
        assert poly.laplacian_residual() == 0.0
    xyz = Polynomial(3, {(1, 1, 1): 1.0})
    assert poly_laplacian(xyz.terms, 3) == {}
    with pytest.raises(InputError):
        Polynomial(2, {(2, 0): 1.0})


@pytest.mark.parametrize("spec_id", sorted(catalog.SPECS))
def test_mean_value_property(spec_id):
    spec = catalog.SPECS[spec_id]
    rng = np.random.default_rng(11)
    nodes, w = mean_rule(2)
    for x in disc_points(20, 0.8, rng):
        rho = 0.1 * rng.random() + 1e-3
        mean = spec.eval(x + rho * nodes) @ w
        val = spec.eval(x)
        scale = max(abs(val), np.max(np.abs(spec.eval(x + rho * nodes))))
        assert abs(mean - val) <= 1e-6 * scale


def test_mean_value_property_3d():
    spec = Polynomial(3, {(1, 1, 1): 1.0}) + catalog.exp_sin(3)
    nodes, w = mean_rule(3)
    x = np.array([0.2, -0.1, 0.3])
    assert spec.eval(x + 0.1 * nodes) @ w == pytest.approx(spec.eval(x), rel=1e-12)


def test_taylor_jet_examples():
    jet = taylor_jet(TWO_XY, [1.0, 0.0], 2)
    assert {a: c for a, c in jet.coeffs.items() if c != 0} == {(0, 1): 2.0, (1, 1): 2.0}
    jet = taylor_jet(catalog.exp_sin(), [0.0, 0.0], 3)
    assert jet.coeff((0, 1)) == pytest.approx(1.0, abs=1e-15)
    assert jet.coeff((1, 1)) == pytest.approx(1.0, abs=1e-15)
    assert jet.coeff((2, 1)) == pytest.approx(0.5, abs=1e-15)
    assert jet.coeff((0, 3)) == pytest.approx(-1 / 6, abs=1e-15)
    assert jet.coeff((1, 0)) == 0.0


def test_taylor_jet_of_sum_is_sum_of_jets():
    s = catalog.exp_sin() + 2.0 * catalog.im_zk(3)
    c = [0.2, -0.4]
    a = s.taylor_jet(c, 6)
    b = catalog.exp_sin().taylor_jet(c, 6) + catalog.im_zk(3).taylor_jet(c, 6).scaled(2.0)
    for alpha in set(a.coeffs) | set(b.coeffs):
        assert a.coeff(alpha) == pytest.approx(b.coeff(alpha), abs=1e-14)


@pytest.mark.parametrize("spec_id", sorted(catalog.SPECS))
def test_taylor_truncation_order(spec_id):
    spec = catalog.SPECS[spec_id]
    center = np.array([0.1, 0.2])
    K = 4
    jet = spec.taylor_jet(center, K)
    dirs = disc_points(8, 1.0, np.random.default_rng(3))
    dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)

    def err(h):
        pts = center + h * dirs
        return np.max(np.abs(spec.eval(pts) - jet.evaluate(pts)))

    C = err(0.2) / 0.2 ** (K + 1)
    for h in (0.1, 0.05, 0.025):
        assert err(h) <= 2.0 * C * h ** (K + 1) + 1e-14


def test_leading_part_examples():
    k, c, p = leading_part(TWO_XY.taylor_jet([0.0, 0.0], 4))
    assert (k, c, p) == (2, 2.0, {(1, 1): 1.0})
    k, c, p = leading_part(catalog.exp_sin().taylor_jet([0.0, 0.0], 4))
    assert (k, p) == (1, {(0, 1): 1.0})
    assert c == pytest.approx(1.0, abs=1e-15)
    u = catalog.im_zk(2) + catalog.im_zk(4)
    k, c, p = leading_part(u.taylor_jet([0.0, 0.0], 6))
    assert k == 2 and c == pytest.approx(2.0) and p == {(1, 1): 1.0}


def test_leading_part_degenerate():
    with pytest.raises(DegenerateInputError):
        leading_part(Polynomial(2, {}).taylor_jet([0.0, 0.0], 3))


@settings(max_examples=40, deadline=None)
@given(lam=st.floats(min_value=1e-3, max_value=1e3) | st.floats(min_value=-1e3, max_value=-1e-3),
       spec_id=st.sampled_from(sorted(catalog.SPECS)))
def test_leading_part_scale_equivariant(lam, spec_id):
    spec = catalog.SPECS[spec_id]
    k, c, p = leading_part(spec.taylor_jet([0.0, 0.0], 8))
    k2, c2, p2 = leading_part((lam * spec).taylor_jet([0.0, 0.0], 8))
    assert k2 == k
    assert c2 == pytest.approx(lam * c, rel=1e-12)
    assert p2.keys() == p.keys()
    for a in p:
        assert p2[a] == pytest.approx(p[a], rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("spec_id", sorted(catalog.SPECS))
def test_serialization_round_trip(spec_id):
    spec = catalog.SPECS[spec_id]
    back = loads(spec.dumps())
    pts = disc_points(50)
    assert np.array_equal(back.eval(pts), spec.eval(pts))
    assert back.dumps() == spec.dumps()


@settings(max_examples=50, deadline=None)
@given(coeffs=st.lists(st.floats(allow_nan=False, allow_infinity=False, min_value=-1e6, max_value=1e6),
                       min_size=3, max_size=3))
def test_polynomial_round_trip_bit_exact(coeffs):
    terms = {(1, 1): coeffs[0], (3, 0): coeffs[1], (1, 2): -3 * coeffs[1], (0, 1): coeffs[2]}
    spec = SumSpec([(1.0, Polynomial(2, terms)), (0.5, catalog.exp_sin())])
    back = from_dict(spec.to_dict())
    assert back.to_dict() == spec.to_dict()
    pts = disc_points(10)
    assert np.array_equal(back.eval(pts), spec.eval(pts))


def test_unknown_closed_form_rejected():
    with pytest.raises(InputError):
        ClosedForm("not_a_form", ())
    with pytest.raises(InputError):
        catalog.get_spec("nope")


def test_catalog_forms_in_higher_dimension():
    spec = catalog.im_zk(2, dimension=4)
    x = np.array([0.3, 0.2, 0.9, -0.5])
    assert spec.eval(x) == pytest.approx(2 * 0.3 * 0.2)
    assert np.max(np.abs(laplacian_fd(spec, x[None, :]))) <= 1e-6
    jet = spec.taylor_jet(x, 3)
    assert jet.coeff((1, 1, 0, 0)) == pytest.approx(2.0)


@pytest.mark.parametrize("n", [2, 3, 5])
@pytest.mark.parametrize("r", [0.25, 0.5, 0.75])
def test_classical_constants(n, r):
    c = ClassicalConstants.for_ball(n, r)
    assert c.h_r > 0 and c.a_r > 0 and c.b_r > 0
    assert c.h_r <= 1
    with pytest.raises(InputError):
        ClassicalConstants.for_ball(n, 1.0)
