import numpy as np
import pytest

from conftest import unit_model
from hrl import catalog
from hrl.errors import DegenerateInputError, InputError
from hrl.frequency import (doubling, doubling_profiles, frequency_profile, generalized_doubling, geometric_radii,
                           h_norm, norm_equivalence_check)
from hrl.harmonic import Polynomial, constant
from hrl.jets import leading_part
from hrl.region import Region
from hrl.sphere import mean_rule


@pytest.mark.parametrize("rho", [0.01, 0.1, 0.5])
def test_h_of_linear_function(rho):
    assert h_norm(catalog.im_zk(1), [0.0, 0.0], rho) == pytest.approx(rho**2 / 2, rel=1e-14)


@pytest.mark.parametrize("n,rel", [(3, 1e-13), (4, 2e-3)])
def test_h_of_linear_function_higher_dimensions(n, rel):
    spec = catalog.im_zk(1, dimension=n)
    assert h_norm(spec, np.zeros(n), 0.2) == pytest.approx(0.04 / n, rel=rel)


def test_mean_rules_normalized():
    for n in (2, 3, 4):
        nodes, w = mean_rule(n)
        assert np.sum(w) == pytest.approx(1.0, abs=1e-14)
        np.testing.assert_allclose(np.linalg.norm(nodes, axis=-1), 1.0, atol=1e-14)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("rho", [0.01, 0.05, 0.1, 0.2, 0.25])
def test_homogeneous_doubling_exact(k, rho):
    assert doubling(catalog.im_zk(k), [0.0, 0.0], rho) == pytest.approx(4.0**k, rel=1e-3)


def test_exp_sin_doubling_nondecreasing():
    N = [doubling(catalog.exp_sin(), [0.0, 0.0], r) for r in (0.05, 0.1, 0.2)]
    assert N == sorted(N)
    rep = frequency_profile(catalog.exp_sin(), [0.0, 0.0], [0.05, 0.1, 0.2])
    assert rep.monotone and rep.worst_violation == 0.0
    assert len(rep.H) == len(rep.radii) == len(rep.N)


def test_h_bounded_below_by_min_square():
    spec = catalog.cosh_sin()
    x, rho = np.array([0.0, 0.5]), 0.2
    nodes, _ = mean_rule(2)
    assert h_norm(spec, x, rho) >= np.min(spec.eval(x + rho * nodes)) ** 2


def test_degenerate_and_invalid_inputs():
    zero = Polynomial(2, {})
    with pytest.raises(DegenerateInputError):
        doubling(zero, [0.0, 0.0], 0.1)
    with pytest.raises(InputError):
        h_norm(catalog.exp_sin(), [0.0, 0.0], -0.1)
    with pytest.raises(InputError):
        h_norm(catalog.exp_sin(), [0.2, 0.0], 0.9, domain=Region((0.0, 0.0), 1.0, 16))
    with pytest.raises(InputError):
        frequency_profile(catalog.exp_sin(), [0.0, 0.0], [0.2, 0.1])


def test_geometric_radii():
    r = geometric_radii()
    assert r == sorted(r) and r[-1] == 0.25 and r[0] == 2.0**-8


@pytest.mark.parametrize("spec_id", sorted(catalog.SPECS))
def test_monotone_at_zero_set_points(spec_id):
    zs = unit_model(spec_id)
    pts = zs.crossings[np.linalg.norm(zs.crossings, axis=-1) < 0.5]
    pts = pts[np.linspace(0, len(pts) - 1, 10).round().astype(int)]
    N = doubling_profiles(catalog.SPECS[spec_id], pts, geometric_radii())
    drops = (N[:, :-1] - N[:, 1:]) / N[:, :-1]
    assert np.max(drops) <= 1e-3


@pytest.mark.parametrize("spec_id,x", [("im_z3", (0.0, 0.0)), ("im_z2", (0.0, 0.0)), ("exp_sin", (0.3, 0.0)),
                                        ("im_z2_pert", (0.0, 0.0)), ("im_z1", (-0.4, 0.0))])
def test_order_detection_small_radius(spec_id, x):
    spec = catalog.SPECS[spec_id]
    k = leading_part(spec.taylor_jet(x, 8)).k
    assert doubling(spec, x, 1e-2) == pytest.approx(4.0**k, rel=0.05)


def test_generalized_doubling_linear():
    g = generalized_doubling(catalog.im_zk(1))
    assert g.N1 == pytest.approx(4.0, rel=5e-3)
    assert g.N1 <= g.bound


def test_generalized_doubling_quadratic():
    g = generalized_doubling(catalog.im_zk(2))
    assert 16.0 * (1 - 1e-9) <= g.N1 < np.inf
    assert g.argmax_x == (0.0, 0.0)


@pytest.mark.parametrize("lam", [2.0, -4.0, 0.5])
def test_generalized_doubling_scale_invariant(lam):
    v = catalog.exp_sin()
    assert generalized_doubling(lam * v).N1 == generalized_doubling(v).N1
    assert generalized_doubling(3.0 * v).N1 == pytest.approx(generalized_doubling(v).N1, rel=1e-13)


def test_generalized_doubling_constant_rejected():
    with pytest.raises(DegenerateInputError):
        generalized_doubling(constant(2.0))


@pytest.mark.parametrize("spec_id", sorted(catalog.SPECS))
def test_norm_equivalence_never_violated(spec_id):
    sup, bound = norm_equivalence_check(catalog.SPECS[spec_id])
    assert sup <= bound
