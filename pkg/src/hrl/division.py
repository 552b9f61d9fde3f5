"""Order-by-order division of Taylor jets across a common zero set.

If ``v = c_v p + (higher)`` at a zero ``x0`` and ``u`` shares the nodal set,
then ``u = f v`` with ``f`` analytic, and the homogeneous pieces of ``f``
solve the triangular system

    f_m * (c_v p) = u_{k+m} - sum_{j<m} f_j v_{k+m-j},   m = 0, 1, ...

each a small least-squares problem in the monomial basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import IllConditionedDivisionError, InputError, ZeroSetMismatchError
from .harmonic import HarmonicSpec
from .jets import (LeadingPart, Poly, TaylorJet, leading_part, monomials, poly_mul, slice_vector,
                   vector_to_poly)
from .region import Region
from .zero_set import ZeroSetModel

TOL_DIV = 1e-8
TOL_LEAD = 1e-9
EPS_REL = 1e-8
DEFAULT_ORDER = 8


def _mul_matrix(p: Poly, n: int, m: int, k: int) -> np.ndarray:
    """Matrix of ``q -> q * p`` from degree-m to degree-(k+m) coefficients."""
    rows = {a: i for i, a in enumerate(monomials(n, k + m))}
    cols = monomials(n, m)
    mat = np.zeros((len(rows), len(cols)))
    for j, b in enumerate(cols):
        for a, c in p.items():
            mat[rows[tuple(x + y for x, y in zip(a, b))], j] += c
    return mat


@dataclass
class JetBound:
    """``|coeff_a| <= A R^|a|``, i.e. ``|D^a g(x0)| <= A R^|a| a!``."""

    A: float
    R: float

    def holds(self, jet: TaylorJet) -> bool:
        return all(abs(c) <= self.A * self.R ** sum(a) for a, c in jet.coeffs.items())

    def to_dict(self):
        return {"A": self.A, "R": self.R}


@dataclass
class RatioJet:
    jet: TaylorJet
    residuals: List[float]
    eps_used: float
    leading: Optional[LeadingPart] = None
    tol_div: float = TOL_DIV

    @property
    def center(self):
        return self.jet.center

    @property
    def order(self):
        return self.jet.order

    def evaluate(self, x):
        return self.jet.evaluate(x)

    def gradient(self, x):
        return self.jet.gradient(x)

    def to_dict(self):
        bound = certify_bounds(self.jet)
        return {
            "center": list(self.jet.center),
            "order": self.jet.order,
            "coefficients": [[list(a), c] for a, c in sorted(self.jet.coeffs.items())],
            "residuals": self.residuals,
            "eps_used": self.eps_used,
            "A": bound.A,
            "R": bound.R,
        }


def divide_jets(u_jet: TaylorJet, v_jet: TaylorJet, order: int = DEFAULT_ORDER,
                eps: Optional[float] = None, tol_div: float = TOL_DIV,
                tol_lead: float = TOL_LEAD) -> RatioJet:
    """Jet of ``f = u / v`` at the common center, truncated at ``order``.

    ``order`` is capped by what the inputs support: ``min(u.order, v.order) - k``.
    """
    if tuple(u_jet.center) != tuple(v_jet.center):
        raise InputError("jets must share a center")
    n = v_jet.dimension
    lead = leading_part(v_jet, tol_lead)
    k, c_v, p = lead
    eps = EPS_REL * v_jet.scale() if eps is None else eps
    if abs(c_v) < eps:
        raise IllConditionedDivisionError(f"|c_v| = {abs(c_v):.3g} below eps = {eps:.3g}")
    order = min(order, u_jet.order - k, v_jet.order - k)
    if order < 0:
        raise InputError(f"jets of order {min(u_jet.order, v_jet.order)} cannot resolve vanishing order {k}")

    u_scale = u_jet.scale()
    u_tol = tol_lead * u_scale
    for d in range(k):
        if np.max(np.abs(slice_vector(u_jet.coeffs, n, d)), initial=0.0) > u_tol:
            raise ZeroSetMismatchError(f"u has a nonzero degree-{d} term below the vanishing order {k} of v",
                                       payload={"degree": d, "vanishing_order": k, "residuals": []})

    v_slices = [slice_vector(v_jet.coeffs, n, k + j) for j in range(order + 1)]
    v_polys = [vector_to_poly(s, n, k + j) for j, s in enumerate(v_slices)]
    v_polys[0] = {a: c_v * c for a, c in p.items()}
    floor = 1e-6 * max(u_scale, 1e-300)
    f_parts: List[Poly] = []
    residuals: List[float] = []
    for m in range(order + 1):
        rhs = dict(vector_to_poly(slice_vector(u_jet.coeffs, n, k + m), n, k + m))
        for j, fj in enumerate(f_parts):
            for a, c in poly_mul(fj, v_polys[m - j]).items():
                rhs[a] = rhs.get(a, 0.0) - c
        b = slice_vector(rhs, n, k + m)
        mat = _mul_matrix(v_polys[0], n, m, k)
        sol, *_ = np.linalg.lstsq(mat, b, rcond=None)
        res = float(np.linalg.norm(mat @ sol - b)) / max(float(np.linalg.norm(b)), floor)
        residuals.append(res)
        if res > tol_div:
            raise ZeroSetMismatchError(
                f"division residual {res:.3g} at order {m} exceeds {tol_div:g}",
                payload={"order": m, "residuals": residuals},
            )
        f_parts.append(vector_to_poly(sol, n, m))
    coeffs: Poly = {}
    for part in f_parts:
        coeffs.update(part)
    return RatioJet(TaylorJet(tuple(v_jet.center), order, coeffs), residuals, eps, lead, tol_div)


def certify_bounds(jet: TaylorJet, max_power: int = 30) -> JetBound:
    """Smallest ``R`` in {1, 2, 4, ...} whose bound is not saturated at the top order.

    For each ``R``, ``A = max |coeff| R^-|a|`` always satisfies the bound; the
    ladder stops at the first ``R`` for which that maximum is reached strictly
    below the truncation order, i.e. the stored coefficients already decay
    like ``R^-|a|``.
    """
    A = 0.0
    R = 1.0
    if not jet.coeffs:
        return JetBound(0.0, 1.0)
    for e in range(max_power + 1):
        R = 2.0**e
        top = 0.0
        A = 0.0
        for a, c in jet.coeffs.items():
            w = abs(c) / R ** sum(a)
            A = max(A, w)
            if sum(a) == jet.order:
                top = max(top, w)
        if jet.order == 0 or top < A:
            break
    while not all(abs(c) <= A * R ** sum(a) for a, c in jet.coeffs.items()):
        A = float(np.nextafter(A, np.inf))
    return JetBound(float(A), R)


def ratio_jet_at(u: HarmonicSpec, v: HarmonicSpec, y, order: int = DEFAULT_ORDER) -> RatioJet:
    """Division jet of ``u/v`` centred at ``y``, with enough input orders for any ``k <= order``."""
    y = np.asarray(y, dtype=float)
    v_jet = v.taylor_jet(y, 2 * order + 2)
    k = leading_part(v_jet, TOL_LEAD).k
    depth = k + order
    return divide_jets(u.taylor_jet(y, depth), v_jet.truncate(depth), order)


def default_r_switch(zs: ZeroSetModel) -> float:
    return 4.0 * zs.region.cell_size


def ratio_at(u: HarmonicSpec, v: HarmonicSpec, zs: ZeroSetModel, x, r_switch: Optional[float] = None,
             order: int = DEFAULT_ORDER) -> float:
    """Value of the analytic continuation of ``u/v`` at a single point."""
    x = np.asarray(x, dtype=float)
    r_switch = default_r_switch(zs) if r_switch is None else r_switch
    d, foot = zs.nearest(x)
    if d > r_switch:
        return float(u.eval(x) / v.eval(x))
    return float(ratio_jet_at(u, v, foot, order).evaluate(x))


def ratio_field(u: HarmonicSpec, v: HarmonicSpec, zs: ZeroSetModel, points, r_switch: Optional[float] = None,
                order: int = DEFAULT_ORDER, with_gradient: bool = False):
    """Vectorised :func:`ratio_at` over ``points`` of shape (m, n).

    Near-zero points reuse the division jet of their nearest crossing, so
    each crossing is expanded at most once.  Returns ``(f, near_mask)`` and,
    with ``with_gradient``, the jet gradients for the near points
    (``nan`` elsewhere).
    """
    pts = np.asarray(points, dtype=float)
    r_switch = default_r_switch(zs) if r_switch is None else r_switch
    f = np.empty(len(pts))
    grad = np.full(pts.shape, np.nan)
    if zs.empty:
        near = np.zeros(len(pts), dtype=bool)
    else:
        dist, idx = zs._tree.query(pts)
        near = dist <= r_switch
    far = ~near
    f[far] = u._eval(pts[far]) / v._eval(pts[far])
    if np.any(near):
        for j in np.unique(idx[near]):
            sel = near & (idx == j)
            rj = ratio_jet_at(u, v, zs.crossings[j], order)
            f[sel] = rj.evaluate(pts[sel])
            if with_gradient:
                grad[sel] = rj.gradient(pts[sel])
    if with_gradient:
        return f, near, grad
    return f, near


def comparability_radius(u: HarmonicSpec, v: HarmonicSpec, zs: ZeroSetModel, x0, c: float = 2.0,
                         ladder=tuple(2.0**-j for j in range(1, 8)), resolution: int = 32) -> Optional[float]:
    """Largest ``rho`` on ``ladder`` with ``sup_{B_rho(x0)}|f| <= c inf_{B_rho(x0)}|f|``.

    ``f = u/v`` is sampled with :func:`ratio_field` on a grid of each ball;
    ``None`` when no ladder radius passes.
    """
    if not c >= 1:
        raise InputError("c must be at least 1")
    x0 = np.asarray(x0, dtype=float)
    for rho in sorted(ladder, reverse=True):
        ball = Region(tuple(x0), rho, resolution)
        pts = ball.ball_nodes()
        pts = pts[zs.region.inside(pts)]
        f, _ = ratio_field(u, v, zs, pts)
        absf = np.abs(f)
        if np.max(absf) <= c * np.min(absf):
            return float(rho)
    return None
