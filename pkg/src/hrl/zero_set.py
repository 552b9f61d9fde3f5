"""Nodal-set geometry on a sign grid.

The function is sampled on the nodes of the cube bounding a :class:`Region`.
Every grid edge whose endpoints have strictly opposite signs is bisected
(50 steps); nodes that are numerically zero are crossings themselves.
Distances to the nodal set come from a KD-tree over the crossings, refined
by projecting onto ``{u = 0}`` along the gradient.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .errors import InputError
from .harmonic import HarmonicSpec
from .region import Region

BISECTION_STEPS = 50
REFINE_STEPS = 20
TOL_ZERO_REL = 1e-10


def _bisect(spec: HarmonicSpec, a: np.ndarray, b: np.ndarray, fa: np.ndarray) -> np.ndarray:
    sa = np.sign(fa)
    for _ in range(BISECTION_STEPS):
        m = 0.5 * (a + b)
        fm = spec._eval(m)
        left = np.sign(fm) == sa
        a = np.where(left[:, None], m, a)
        b = np.where(left[:, None], b, m)
    return 0.5 * (a + b)


@dataclass(frozen=True, eq=False)
class ZeroSetModel:
    region: Region
    sign_grid: np.ndarray = field(repr=False)
    crossings: np.ndarray = field(repr=False)
    source: HarmonicSpec = field(repr=False)
    tol_zero: float = 0.0
    grid_max: float = 0.0

    def __post_init__(self):
        tree = cKDTree(self.crossings) if len(self.crossings) else None
        object.__setattr__(self, "_tree", tree)

    @property
    def empty(self) -> bool:
        return len(self.crossings) == 0

    def nearest(self, x, *, refine: bool = True, candidates: int = 4) -> Tuple[np.ndarray, np.ndarray]:
        """Distance to the zero set and a foot point on it, for points ``x`` of shape (..., n)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.region.dimension:
            raise InputError(f"expected points of dimension {self.region.dimension}")
        if not np.all(self.region.inside(x, slack=1e-9)):
            raise InputError("query point lies outside the zero-set region")
        batch = x.shape[:-1]
        flat = x.reshape(-1, x.shape[-1])
        if self._tree is None:
            return np.full(batch, np.inf), np.full(x.shape, np.nan)
        kk = min(candidates, len(self.crossings))
        dist, idx = self._tree.query(flat, k=kk)
        dist = dist.reshape(len(flat), kk)
        idx = idx.reshape(len(flat), kk)
        best_d = dist[:, 0].copy()
        best_y = self.crossings[idx[:, 0]].copy()
        if refine:
            starts = self.crossings[idx.ravel()]
            targets = np.repeat(flat, kk, axis=0)
            y, ok = self._refine(targets, starts)
            d = np.linalg.norm(targets - y, axis=-1)
            d = np.where(ok, d, np.inf).reshape(len(flat), kk)
            y = y.reshape(len(flat), kk, -1)
            j = np.argmin(d, axis=1)
            dj = d[np.arange(len(flat)), j]
            better = dj < best_d
            best_d = np.where(better, dj, best_d)
            best_y = np.where(better[:, None], y[np.arange(len(flat)), j], best_y)
        return best_d.reshape(batch), best_y.reshape(x.shape)

    def delta(self, x):
        """``dist(x, Z)``; ``inf`` when no zeros were found."""
        d, _ = self.nearest(x)
        return float(d) if np.ndim(d) == 0 else d

    def _refine(self, x: np.ndarray, y: np.ndarray):
        """Slide ``y`` along ``{u=0}`` towards the foot point of ``x``."""
        spec = self.source
        frozen = np.zeros(len(y), dtype=bool)
        for _ in range(REFINE_STEPS):
            val = spec._eval(y)
            g = spec._grad(y)
            gg = np.sum(g * g, axis=-1)
            frozen |= gg < (1e-8 * max(self.grid_max, 1e-300) / self.region.radius) ** 2
            safe = np.where(frozen, 1.0, gg)
            y_proj = y - (val / safe)[:, None] * g
            g_proj = spec._grad(y_proj)
            gn = np.linalg.norm(g_proj, axis=-1)
            unit = g_proj / np.where(gn > 0, gn, 1.0)[:, None]
            d = x - y_proj
            tangent = d - np.sum(d * unit, axis=-1)[:, None] * unit
            y = np.where(frozen[:, None], y, y_proj + tangent)
        for _ in range(3):
            val = spec._eval(y)
            g = spec._grad(y)
            gg = np.sum(g * g, axis=-1)
            safe = np.where(frozen | (gg == 0), 1.0, gg)
            y = np.where(frozen[:, None], y, y - (val / safe)[:, None] * g)
        ok = (~frozen) & (np.abs(spec._eval(y)) <= self.tol_zero) & np.all(np.isfinite(y), axis=-1)
        return y, ok

    def nodal_labels(self) -> Tuple[np.ndarray, int]:
        """Connected components (face adjacency) of same-sign nodes in the ball."""
        pts = self.region.nodes()
        inside = self.region.inside(pts)
        labels = np.zeros(self.sign_grid.shape, dtype=int)
        total = 0
        for s in (1, -1):
            lab, count = ndimage.label((self.sign_grid == s) & inside)
            labels = np.where(lab > 0, lab + total, labels)
            total += count
        return labels, total

    def to_dict(self) -> dict:
        chars = np.array(["-", "0", "+"])[self.sign_grid.ravel() + 1]
        return {
            "region": self.region.to_dict(),
            "sign_grid": "".join(chars.tolist()),
            "crossings": self.crossings.tolist(),
            "tol_zero": self.tol_zero,
        }


def build_zero_set(spec: HarmonicSpec, region: Region) -> ZeroSetModel:
    if spec.dimension != region.dimension:
        raise InputError("spec and region dimensions differ")
    pts = region.nodes()
    vals = spec._eval(pts)
    grid_max = float(np.max(np.abs(vals)))
    tol = TOL_ZERO_REL * grid_max
    sign = np.where(np.abs(vals) <= tol, 0, np.sign(vals)).astype(int)
    found: List[np.ndarray] = [pts[sign == 0]]
    n = region.dimension
    for axis in range(n):
        lo = [slice(None)] * n
        hi = [slice(None)] * n
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        lo, hi = tuple(lo), tuple(hi)
        change = sign[lo] * sign[hi] < 0
        if np.any(change):
            a = pts[lo][change]
            b = pts[hi][change]
            found.append(_bisect(spec, a, b, vals[lo][change]))
    crossings = np.concatenate(found, axis=0) if found else np.zeros((0, n))
    return ZeroSetModel(region, sign, crossings, spec, tol, grid_max)


def delta(zs: ZeroSetModel, x):
    return zs.delta(x)


def nodal_domains(zs: ZeroSetModel) -> int:
    return zs.nodal_labels()[1]


@dataclass
class SameZeroSetReport:
    same: bool
    max_u_to_v: float
    max_v_to_u: float
    threshold: float
    domain_signs: Dict[int, int]
    mixed_domains: List[int]

    def __bool__(self):
        return self.same

    def to_dict(self):
        return {
            "same": self.same,
            "max_u_to_v": self.max_u_to_v,
            "max_v_to_u": self.max_v_to_u,
            "threshold": self.threshold,
            "domain_signs": {str(k): v for k, v in self.domain_signs.items()},
            "mixed_domains": self.mixed_domains,
        }


def _crossing_gap(a: ZeroSetModel, b: ZeroSetModel) -> float:
    # only crossings inside the ball count; the grid square's corners lie outside it
    pts = a.crossings[a.region.inside(a.crossings)] if not a.empty else a.crossings
    if len(pts) == 0:
        return 0.0
    if b.empty:
        return np.inf
    d, _ = b._tree.query(pts)
    return float(np.max(d))


def same_zero_set(u: HarmonicSpec, v: HarmonicSpec, region: Region,
                  zu: Optional[ZeroSetModel] = None, zv: Optional[ZeroSetModel] = None) -> SameZeroSetReport:
    """Compare nodal sets of ``u`` and ``v`` on ``region``.

    Passes when every crossing of either function lies within two cell
    diagonals of the other's crossings and ``sign(u) sign(v)`` is constant
    on each nodal domain of ``u``.
    """
    zu = zu or build_zero_set(u, region)
    zv = zv or build_zero_set(v, region)
    thr = 2.0 * region.cell_diagonal
    uv, vu = _crossing_gap(zu, zv), _crossing_gap(zv, zu)
    labels, count = zu.nodal_labels()
    prod = zu.sign_grid * zv.sign_grid
    signs: Dict[int, int] = {}
    mixed: List[int] = []
    for lab in range(1, count + 1):
        vals = prod[(labels == lab) & (prod != 0)]
        if vals.size == 0:
            continue
        if np.all(vals == vals[0]):
            signs[lab] = int(vals[0])
        else:
            mixed.append(lab)
            signs[lab] = 0
    same = uv <= thr and vu <= thr and not mixed
    return SameZeroSetReport(bool(same), uv, vu, thr, signs, mixed)
