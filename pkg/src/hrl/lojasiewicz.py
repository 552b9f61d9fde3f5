"""Empirical Lojasiewicz constants ``L delta >= |v| >= l delta**gamma``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NotApplicableError
from .harmonic import HarmonicSpec
from .region import Region
from .zero_set import ZeroSetModel

GAMMA_LADDER = tuple(1.0 + 0.25 * i for i in range(45))  # 1, 1.25, ..., 12
NEAR_ZERO_BAND = 1e-6
DUST = 1e-12


@dataclass
class LojFit:
    L: float
    l: float
    gamma: float
    deltas: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    region: Region = None
    band: float = NEAR_ZERO_BAND

    @property
    def n_samples(self) -> int:
        return len(self.deltas)

    def feasible(self) -> bool:
        """Both inequalities hold on every stored sample, in floating point as stored."""
        upper = np.all(self.L * self.deltas >= self.values)
        lower = np.all(self.values >= self.l * self.deltas**self.gamma)
        return bool(upper and lower)

    def lower_constant(self, gamma: float) -> float:
        """Best ``l`` for a given exponent on the stored samples."""
        return float(np.min(self.values / self.deltas**gamma))

    def to_dict(self):
        return {"L": self.L, "l": self.l, "gamma": self.gamma, "n_samples": self.n_samples,
                "region": self.region.to_dict() if self.region else None, "band": self.band}


def _nudge_up(c, lhs_fn, rhs):
    while not np.all(lhs_fn(c) >= rhs):
        c = np.nextafter(c, np.inf)
    return float(c)


def fit(spec: HarmonicSpec, zs: ZeroSetModel, region: Region) -> LojFit:
    """Fit ``(L, l, gamma)`` on the grid nodes of ``region``.

    ``L`` is the largest ``|v|/delta``; ``gamma`` is the first ladder value
    whose minimum of ``|v|/delta**gamma`` exceeds ``1e-12`` times the
    largest sampled ``|v|``; ``l`` is that minimum.  Nodes with
    ``delta < 1e-6`` are dropped.  Constants are rounded outward by ulps so
    that both inequalities hold exactly on the stored samples.
    """
    if zs.empty:
        raise NotApplicableError("zero set is empty on this region")
    if spec.dimension != region.dimension:
        raise InputError("spec and region dimensions differ")
    pts = region.ball_nodes()
    d = np.asarray(zs.delta(pts))
    keep = d >= NEAR_ZERO_BAND
    d = d[keep]
    vals = np.abs(spec._eval(pts[keep]))
    if d.size == 0:
        raise NotApplicableError("no samples outside the near-zero band")
    scale = float(np.max(vals))
    L = float(np.max(vals / d))
    L = _nudge_up(L, lambda c: c * d, vals)
    chosen = None
    for g in GAMMA_LADDER:
        low = float(np.min(vals / d**g))
        if low >= DUST * scale:
            chosen = g
            break
    if chosen is None:
        chosen = GAMMA_LADDER[-1]
        low = float(np.min(vals / d**chosen))
    power = d**chosen
    while not np.all(vals >= low * power):
        low = float(np.nextafter(low, -np.inf))
    return LojFit(L, low, chosen, d, vals, region)
