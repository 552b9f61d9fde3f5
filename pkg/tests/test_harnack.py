import math

import numpy as np
import pytest

from hrl import catalog
from hrl.errors import InputError, ZeroSetMismatchError
from hrl.harnack import family_sweep_2d, harnack_constants, leading_coeff_comparability, pointwise_comparability
from hrl.jets import factorial
from hrl.region import Region

K_HALF = Region((0.0, 0.0), 0.5, 64)


def f_exact(x):
    return math.exp(x) / math.cosh(x)


def test_exp_cosh_constants_coarse():
    rep = harnack_constants(catalog.exp_sin(), catalog.cosh_sin(), K_HALF, pair_id="exp_cosh")
    assert rep.C1 == pytest.approx(math.e, abs=1e-4)
    assert rep.C2 == pytest.approx(1.0 / f_exact(-0.5), abs=1e-3)
    assert rep.derivative_table[(0, 0)] == rep.C1
    assert rep.shape_bound_holds()


@pytest.mark.parametrize("lam", [2.0, -0.75])
def test_constant_ratio(lam):
    v = catalog.exp_sin()
    rep = harnack_constants(lam * v, v, K_HALF)
    assert rep.C1 == pytest.approx(1.0, abs=1e-12)
    assert rep.C2 == pytest.approx(0.0, abs=1e-9)


def test_constant_ratio_exact_for_identity():
    v = catalog.im_zk(2)
    rep = harnack_constants(v, v, K_HALF)
    assert rep.C1 == 1.0
    assert rep.C2 == 0.0


@pytest.mark.parametrize("pair_id", sorted(catalog.PAIRS))
def test_symmetry(pair_id):
    rec = catalog.PAIRS[pair_id]
    a = harnack_constants(rec.u, rec.v, K_HALF)
    b = harnack_constants(rec.v, rec.u, K_HALF)
    assert a.C1 >= 1.0
    assert b.C1 == pytest.approx(a.C1, rel=1e-9)


def test_scale_invariance():
    u, v = catalog.exp_sin(), catalog.cosh_sin()
    a = harnack_constants(u, v, K_HALF)
    b = harnack_constants(2.0 * u, 4.0 * v, K_HALF)
    c = harnack_constants(-3.0 * u, -0.7 * v, K_HALF)
    for other in (b, c):
        assert other.C1 == pytest.approx(a.C1, rel=1e-10)
        assert other.C2 == pytest.approx(a.C2, rel=1e-8)
        for alpha, val in a.derivative_table.items():
            assert other.derivative_table[alpha] == pytest.approx(val, rel=1e-5, abs=1e-8)


def test_monotone_in_K():
    u, v = catalog.im_zk_perturbed(2, 0.3), catalog.im_zk(2)
    small = harnack_constants(u, v, Region((0.0, 0.0), 0.25, 64))
    big = harnack_constants(u, v, K_HALF)
    assert small.C1 <= big.C1 + 1e-9


def test_dimension_mismatch():
    with pytest.raises(InputError):
        harnack_constants(catalog.exp_sin(3), catalog.cosh_sin(3), K_HALF)


def test_report_json():
    doc = harnack_constants(catalog.im_zk_perturbed(1, 0.3), catalog.im_zk(1), K_HALF, pair_id="p").to_dict()
    assert set(doc) >= {"pair_id", "K", "C1", "C2", "derivative_table", "A", "R"}
    orders = {sum(a) for a, _ in doc["derivative_table"]}
    assert orders == {0, 1, 2, 3, 4}


def test_shape_bound_entries():
    rep = harnack_constants(catalog.im_zk_perturbed(1, 0.3), catalog.im_zk(1), K_HALF)
    for alpha, val in rep.derivative_table.items():
        assert val <= factorial(alpha) * rep.A * rep.R ** sum(alpha)


def test_pointwise_scale_family():
    v = catalog.exp_sin()
    rep = pointwise_comparability([v, 2.0 * v, -3.0 * v], [0.0, 0.5], resolution=64)
    assert max(rep.per_member) == pytest.approx(min(rep.per_member), rel=1e-13)
    assert not rep.flagged


def test_pointwise_mixed_family_stable():
    fam = [catalog.exp_sin(), catalog.cosh_sin(), catalog.exp_sin() + catalog.cosh_sin()]
    a = pointwise_comparability(fam, [0.0, 0.5], resolution=64)
    b = pointwise_comparability(fam, [0.0, 0.5], resolution=128)
    assert np.isfinite(a.C)
    assert b.C == pytest.approx(a.C, rel=0.02)


def test_pointwise_degenerate_point():
    v = catalog.exp_sin()
    far = pointwise_comparability([v], [0.0, 0.5], resolution=64, check=False)
    near = pointwise_comparability([v], [0.0, 0.01], resolution=64, check=False)
    assert near.flagged
    assert near.C > 10 * far.C
    with pytest.raises(InputError):
        pointwise_comparability([v], [0.3, 0.0], resolution=64, check=False)


def test_pointwise_rejects_mismatched_family():
    with pytest.raises(ZeroSetMismatchError):
        pointwise_comparability([catalog.im_zk(1), catalog.im_zk(2)], [0.3, 0.3], resolution=64)


def test_leading_coefficients_scale_family():
    v = catalog.cosh_sin()
    rep = leading_coeff_comparability([v, 5.0 * v], [0.2, 0.0], resolution=64)
    assert rep.upper == pytest.approx(rep.lower, rel=1e-13)


def test_leading_coefficients_exp_cosh():
    rep = leading_coeff_comparability([catalog.exp_sin(), catalog.cosh_sin()], [0.3, 0.0], resolution=64)
    assert rep.k == 1 and rep.p == {(0, 1): 1.0}
    assert rep.c_values[0] / rep.c_values[1] == pytest.approx(f_exact(0.3), abs=1e-6)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_leading_coefficients_homogeneous(k):
    rep = leading_coeff_comparability([catalog.im_zk(k), catalog.im_zk_perturbed(k, 0.3)], [0.0, 0.0],
                                      resolution=64)
    assert rep.k == k
    p = np.array(list(rep.p.values()))
    assert np.linalg.norm(p) == pytest.approx(1.0)


def test_leading_coefficients_errors():
    with pytest.raises(ZeroSetMismatchError):
        leading_coeff_comparability([catalog.im_zk(2), catalog.im_zk(1)], [0.0, 0.0], resolution=64)
    with pytest.raises(InputError):
        leading_coeff_comparability([catalog.exp_sin()], [0.0, 0.3], resolution=64)


def test_family_sweep():
    params = [-0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3]
    table = family_sweep_2d(lambda a: (catalog.im_zk(2), catalog.im_zk_perturbed(2, a)), params,
                            Region((0.0, 0.0), 0.5, 64))
    assert [r.param for r in table.rows] == params and not table.skipped
    assert all(r.nodal_domains == 4 for r in table.rows)
    zero = table.rows[3]
    assert zero.C1 == 1.0 and zero.C2 == 0.0
    assert table.bounded
    assert table.max_C1 == max(r.C1 for r in table.rows) < 2.0


def test_family_sweep_skips_mismatched_member():
    table = family_sweep_2d(lambda a: (catalog.im_zk(1), catalog.im_zk_perturbed(1, a)), [0.3, 1.5],
                            Region((0.0, 0.0), 0.5, 32))
    assert [r.param for r in table.rows] == [0.3]
    assert table.skipped[0][0] == 1.5


def test_family_sweep_requires_2d():
    with pytest.raises(InputError):
        family_sweep_2d(lambda a: (catalog.im_zk(1, 3), catalog.im_zk(1, 3)), [0.0],
                        Region((0.0, 0.0, 0.0), 0.5, 16))
