"""Empirical Harnack, gradient and derivative constants for ratios ``f = u/v``."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .division import certify_bounds, default_r_switch, divide_jets, ratio_field, ratio_jet_at
from .errors import InputError, ZeroSetMismatchError, HrlError
from .harmonic import HarmonicSpec
from .jets import TaylorJet, factorial, leading_part, monomials, poly_derivative, poly_eval, slice_vector
from .region import Region
from .zero_set import ZeroSetModel, build_zero_set, nodal_domains, same_zero_set

MAX_DERIVATIVE_ORDER = 4
FD_STEP = 1e-5
BLOWUP_RATIO = 50.0


@dataclass
class HarnackReport:
    pair_id: str
    K: Region
    C1: float
    C2: float
    sup_f: float
    inf_f: float
    derivative_table: Dict[Tuple[int, ...], float]
    A: float
    R: float
    n_points: int
    n_near: int
    r_switch: float

    def by_order(self) -> Dict[int, float]:
        out: Dict[int, float] = {}
        for a, val in self.derivative_table.items():
            out[sum(a)] = max(out.get(sum(a), 0.0), val)
        return out

    def shape_bound_holds(self) -> bool:
        return all(val <= factorial(a) * self.A * self.R ** sum(a) for a, val in self.derivative_table.items())

    def to_dict(self):
        return {
            "pair_id": self.pair_id, "K": self.K.to_dict(), "C1": self.C1, "C2": self.C2,
            "sup_f": self.sup_f, "inf_f": self.inf_f,
            "derivative_table": [[list(a), v] for a, v in sorted(self.derivative_table.items())],
            "derivative_by_order": {str(k): v for k, v in sorted(self.by_order().items())},
            "A": self.A, "R": self.R, "n_points": self.n_points, "n_near": self.n_near,
            "r_switch": self.r_switch,
        }


def _fd_gradient(u: HarmonicSpec, v: HarmonicSpec, pts: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    n = pts.shape[-1]
    out = np.empty(pts.shape)
    for i in range(n):
        e = np.zeros(n)
        e[i] = step
        fp = u._eval(pts + e) / v._eval(pts + e)
        fm = u._eval(pts - e) / v._eval(pts - e)
        out[:, i] = (fp - fm) / (2 * step)
    return out


def _derivatives_from_jet(jet: TaylorJet, x: np.ndarray, alphas) -> np.ndarray:
    """``D^a`` of the jet polynomial at points ``x``, one column per multi-index."""
    cols = []
    for a in alphas:
        poly = dict(jet.coeffs)
        for axis, times in enumerate(a):
            for _ in range(times):
                poly = poly_derivative(poly, axis)
        cols.append(poly_eval(poly, x - np.asarray(jet.center)))
    return np.stack(cols, axis=-1)


def derivative_samples(u: HarmonicSpec, v: HarmonicSpec, zs: ZeroSetModel, pts: np.ndarray,
                       r_switch: float, max_order: int = MAX_DERIVATIVE_ORDER):
    """``|D^a f|`` at ``pts`` for all ``1 <= |a| <= max_order``.

    Near the zero set the division jet of the nearest crossing is
    differentiated; elsewhere the jet of ``u/v`` is divided at the point
    itself (vanishing order 0).
    """
    n = pts.shape[-1]
    alphas = [a for m in range(1, max_order + 1) for a in monomials(n, m)]
    out = np.empty((len(pts), len(alphas)))
    dist, idx = zs._tree.query(pts) if not zs.empty else (np.full(len(pts), np.inf), None)
    order = max_order + 4
    cache: Dict[int, TaylorJet] = {}
    for i, x in enumerate(pts):
        if dist[i] <= r_switch:
            j = int(idx[i])
            if j not in cache:
                cache[j] = ratio_jet_at(u, v, zs.crossings[j], order).jet
            jet = cache[j]
        else:
            jet = divide_jets(u.taylor_jet(x, max_order), v.taylor_jet(x, max_order), max_order).jet
        out[i] = np.abs(_derivatives_from_jet(jet, x[None, :], alphas)[0])
    return alphas, out


def harnack_constants(u: HarmonicSpec, v: HarmonicSpec, K: Region, zs: Optional[ZeroSetModel] = None,
                      pair_id: str = "", derivative_resolution: int = 32) -> HarnackReport:
    """Sample ``f = u/v`` on the grid of ``K`` and measure its constants.

    ``C1 = max|f| / min|f|``; ``C2 = max|grad f| / min|f|``, with central
    differences away from the zero set and jet gradients within
    ``r_switch`` of it.  The derivative table holds ``max |D^a f| / min|f|``
    for ``|a| <= 4`` on a coarser grid; ``(A, R)`` is fitted so that every
    entry is at most ``a! A R^|a|``.
    """
    if u.dimension != v.dimension or u.dimension != K.dimension:
        raise InputError("dimension mismatch between u, v and K")
    zs = zs or build_zero_set(v, K)
    r_switch = default_r_switch(zs)
    pts = K.ball_nodes()
    f, near, jgrad = ratio_field(u, v, zs, pts, r_switch, with_gradient=True)
    absf = np.abs(f)
    sup_f, inf_f = float(np.max(absf)), float(np.min(absf))
    grad = np.where(near[:, None], jgrad, 0.0)
    far = ~near
    if np.any(far):
        grad[far] = _fd_gradient(u, v, pts[far])
    C1 = sup_f / inf_f
    C2 = float(np.max(np.linalg.norm(grad, axis=-1))) / inf_f

    coarse = K.with_resolution(derivative_resolution).ball_nodes()
    alphas, samples = derivative_samples(u, v, zs, coarse, r_switch)
    table: Dict[Tuple[int, ...], float] = {(0,) * K.dimension: C1}
    for j, a in enumerate(alphas):
        table[a] = float(np.max(samples[:, j])) / inf_f
    pseudo = TaylorJet(tuple(K.center), MAX_DERIVATIVE_ORDER, {a: val / factorial(a) for a, val in table.items()})
    bound = certify_bounds(pseudo)
    A = bound.A
    while not all(val <= factorial(a) * A * bound.R ** sum(a) for a, val in table.items()):
        A = float(np.nextafter(A, np.inf))
    return HarnackReport(pair_id, K, C1, C2, sup_f, inf_f, table, A, bound.R, len(pts), int(np.sum(near)), r_switch)


def _grid_sup(spec: HarmonicSpec, center, radius: float, resolution: int) -> float:
    pts = Region(tuple(center), radius, resolution).ball_nodes()
    return float(np.max(np.abs(spec._eval(pts))))


def _check_family(family: Sequence[HarmonicSpec], region: Region):
    models = [build_zero_set(s, region) for s in family]
    for i in range(len(family)):
        for j in range(i + 1, len(family)):
            rep = same_zero_set(family[i], family[j], region, models[i], models[j])
            if not rep:
                raise ZeroSetMismatchError(f"family members {i} and {j} do not share a zero set",
                                           payload=rep.to_dict())
    return models


@dataclass
class PointwiseComparability:
    C: float
    per_member: List[float]
    delta_y0: float
    flagged: bool

    def to_dict(self):
        return {"C": self.C, "per_member": self.per_member, "delta_y0": self.delta_y0, "flagged": self.flagged}


def pointwise_comparability(family: Sequence[HarmonicSpec], y0, region: Optional[Region] = None,
                            resolution: int = 128, check: bool = True) -> PointwiseComparability:
    """``max_u sup_{B_1/2}|u| / |u(y0)|`` over a family sharing one zero set.

    ``flagged`` marks ``y0`` within four grid cells of the zero set, where the
    constant grows like ``1/|u(y0)|``.
    """
    n = family[0].dimension
    region = region or Region((0.0,) * n, 1.0, resolution)
    models = _check_family(family, region) if check else [build_zero_set(family[0], region)]
    y0 = np.asarray(y0, dtype=float)
    d = float(models[0].delta(y0))
    if d < 1e-9:
        raise InputError("y0 lies on the zero set")
    per = []
    for s in family:
        per.append(_grid_sup(s, (0.0,) * n, 0.5, resolution) / abs(float(s.eval(y0))))
    return PointwiseComparability(max(per), per, d, d < 4 * region.cell_size)


@dataclass
class LeadingComparability:
    lower: float
    upper: float
    k: int
    p: Dict
    c_values: List[float]
    ratios: List[float]

    def __iter__(self):
        return iter((self.lower, self.upper))

    def to_dict(self):
        return {"lower": self.lower, "upper": self.upper, "k": self.k,
                "p": [[list(a), c] for a, c in sorted(self.p.items())],
                "c_values": self.c_values, "ratios": self.ratios}


def leading_coeff_comparability(family: Sequence[HarmonicSpec], x0, order: int = 8, resolution: int = 128,
                                tol: float = 1e-6) -> LeadingComparability:
    """Bracket ``sup_{B_1/2}|u| / |c_u|`` over the family at a common zero ``x0``.

    ``c_u`` is the coefficient of ``u``'s leading slice against the canonical
    polynomial ``p`` taken from the first member.
    """
    n = family[0].dimension
    x0 = np.asarray(x0, dtype=float)
    jets = [s.taylor_jet(x0, order) for s in family]
    for s, jet in zip(family, jets):
        sup = _grid_sup(s, (0.0,) * n, 0.5, resolution)
        if abs(jet.coeff((0,) * n)) > 1e-10 * sup:
            raise InputError("x0 is not on the zero set")
    k, _, p = leading_part(jets[0])
    pvec = slice_vector(p, n, k)
    cs, ratios = [], []
    for s, jet in zip(family, jets):
        lead = leading_part(jet)
        sl = slice_vector(jet.coeffs, n, k)
        c = float(sl @ pvec)
        if lead.k != k or np.linalg.norm(sl - c * pvec) > tol * np.linalg.norm(sl):
            raise ZeroSetMismatchError("leading slice is not proportional to the common polynomial p")
        cs.append(c)
        ratios.append(_grid_sup(s, (0.0,) * n, 0.5, resolution) / abs(c))
    return LeadingComparability(min(ratios), max(ratios), k, dict(p), cs, ratios)


@dataclass
class SweepRow:
    param: float
    C1: float
    C2: float
    grad_log_r: float
    nodal_domains: int

    def to_dict(self):
        return dict(self.__dict__)


@dataclass
class SweepTable:
    rows: List[SweepRow]
    skipped: List[Tuple[float, str]]
    max_C1: float
    max_C2: float
    bounded: bool
    nodal_counts: List[int] = field(default_factory=list)
    blowup_ratio: float = BLOWUP_RATIO

    def to_dict(self):
        return {"rows": [r.to_dict() for r in self.rows], "skipped": [list(s) for s in self.skipped],
                "max_C1": self.max_C1, "max_C2": self.max_C2, "bounded": self.bounded,
                "blowup_ratio": self.blowup_ratio}


def _suspicious(values: List[float]) -> bool:
    med = statistics.median(values)
    return max(values) > BLOWUP_RATIO * med if med > 0 else max(values) > 0


def family_sweep_2d(generator: Callable[[float], Tuple[HarmonicSpec, HarmonicSpec]], params: Sequence[float],
                    K: Region, domain: Optional[Region] = None) -> SweepTable:
    """Harnack constants across a one-parameter family of 2D pairs.

    ``grad_log_r`` is ``|grad log f|`` at the centre of ``K`` times its radius.
    A sweep is flagged unbounded when ``max > 50 * median`` for C1 or C2.
    """
    if K.dimension != 2:
        raise InputError("family sweeps are two-dimensional")
    domain = domain or Region(K.center, max(1.0, 2 * K.radius), K.resolution)
    rows, skipped = [], []
    for a in params:
        u, v = generator(a)
        try:
            zu, zv = build_zero_set(u, domain), build_zero_set(v, domain)
            rep = same_zero_set(u, v, domain, zu, zv)
            if not rep:
                skipped.append((float(a), "zero sets differ"))
                continue
            h = harnack_constants(u, v, K, derivative_resolution=16)
            jet = ratio_jet_at(u, v, np.asarray(K.center), 4)
            f0 = jet.jet.coeff((0, 0))
            g0 = np.array([jet.jet.coeff((1, 0)), jet.jet.coeff((0, 1))])
            rows.append(SweepRow(float(a), h.C1, h.C2, float(np.linalg.norm(g0) / abs(f0)) * K.radius,
                                 nodal_domains(zv)))
        except HrlError as exc:
            skipped.append((float(a), str(exc)))
    c1 = [r.C1 for r in rows]
    c2 = [r.C2 for r in rows]
    bounded = bool(rows) and not _suspicious(c1) and not _suspicious(c2)
    return SweepTable(rows, skipped, max(c1, default=math.nan), max(c2, default=math.nan), bounded,
                      [r.nodal_domains for r in rows])
