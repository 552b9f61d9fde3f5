"""Point chains that climb |v| away from the nodal set.

Everything here works in the normalized unit ball centred at the origin:
the radii 1/16, 1/8, 1/4 and 1/2 are absolute.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import InputError, NumericalFailure, NonTerminationError, SearchFailure
from .harmonic import ClassicalConstants, HarmonicSpec
from .lojasiewicz import LojFit
from .region import Region
from .sphere import directions
from .zero_set import ZeroSetModel

# radius rule inside chains: (3/4) delta, capped so the next point stays in B_{1/2}
CHAIN_THRESHOLD = 1.0 / 3.0
CHAIN_FALLBACK = 0.25


@dataclass(frozen=True)
class WalkConfig:
    K: float = 8.0
    K_max: float = 64.0
    C_target: float = 1.05
    max_steps: int = 200
    sphere_samples: int = 4096

    def __post_init__(self):
        if not self.K > 1:
            raise InputError("K must exceed 1")
        if self.max_steps < 1:
            raise InputError("max_steps must be >= 1")
        if not self.C_target > 1:
            raise InputError("C_target must exceed 1")

    def to_dict(self):
        return {"K": self.K, "K_max": self.K_max, "C_target": self.C_target,
                "max_steps": self.max_steps, "sphere_samples": self.sphere_samples}


def _norm(x) -> float:
    return float(np.linalg.norm(x))


def _value(spec: HarmonicSpec, x) -> float:
    return float(spec._eval(np.asarray(x, dtype=float)))


@dataclass
class DoubleStep:
    point: np.ndarray
    ratio: float
    K: float
    delta: float
    foot: np.ndarray
    sign_flipped: bool


def double_step(u: HarmonicSpec, zs: ZeroSetModel, x, cfg: WalkConfig = WalkConfig()) -> DoubleStep:
    """Find ``x~`` with ``|x~ - x| <= K delta(x)`` and ``|u(x~)| >= 2 |u(x)|``.

    Searches the sphere of radius ``(K-1) delta(x)`` about the nearest zero
    (the maximum of ``|u|`` over that ball sits on its boundary).  On failure
    ``K`` is doubled up to ``cfg.K_max``.
    """
    x = np.asarray(x, dtype=float)
    ux = _value(u, x)
    if ux == 0.0:
        raise InputError("u(x) must be nonzero")
    if _norm(x) >= 0.25:
        raise InputError("x must lie in B_{1/4}")
    d, foot = zs.nearest(x)
    d = float(d)
    if not d < 1.0 / (4.0 * cfg.K):
        raise InputError(f"delta(x) = {d:.4g} is not below 1/(4K) = {1 / (4 * cfg.K):.4g}")
    dirs = directions(u.dimension, cfg.sphere_samples)
    K, best = cfg.K, 0.0
    while K <= cfg.K_max:
        pts = foot + (K - 1.0) * d * dirs
        vals = np.abs(u._eval(pts))
        j = int(np.argmax(vals))
        ratio = float(vals[j]) / abs(ux)
        best = max(best, ratio)
        if ratio >= 2.0:
            p = pts[j]
            return DoubleStep(p, ratio, K, d, foot, bool(np.sign(_value(u, p)) != np.sign(ux)))
        K *= 2.0
    raise SearchFailure(f"no doubling point found with K <= {cfg.K_max:g}", best)


@dataclass
class AmplifyStep:
    point: np.ndarray
    ratio: float
    radius: float
    delta: float


def amplify_step(v: HarmonicSpec, zs: ZeroSetModel, x, samples: int = 4096,
                 threshold: float = 1.0 / 8.0, fallback_radius: float = 1.0 / 16.0) -> AmplifyStep:
    """Move to the maximum of ``|v|`` on the sphere of radius ``(3/4) delta(x)``.

    When ``delta(x) >= threshold`` the sphere of radius ``fallback_radius`` is
    used instead.  Ties go to the smallest sample index.
    """
    x = np.asarray(x, dtype=float)
    vx = _value(v, x)
    if vx == 0.0:
        raise InputError("v(x) must be nonzero")
    d = float(zs.delta(x))
    radius = fallback_radius if d >= threshold else 0.75 * d
    pts = x + radius * directions(v.dimension, samples)
    vals = np.abs(v._eval(pts))
    j = int(np.argmax(vals))
    ratio = float(vals[j]) / abs(vx)
    if ratio < 1.0 - 1e-12:
        raise NumericalFailure(f"sphere maximum below the centre value (ratio {ratio:.16g})")
    return AmplifyStep(pts[j], ratio, radius, d)


@dataclass
class WalkTrace:
    points: List[np.ndarray] = field(default_factory=list)
    values: List[float] = field(default_factory=list)
    deltas: List[float] = field(default_factory=list)
    ratios: List[float] = field(default_factory=list)
    exited: bool = False

    @property
    def steps(self) -> int:
        return len(self.points) - 1

    @property
    def terminal_clearance(self) -> float:
        return self.deltas[-1]

    def step_lengths(self) -> np.ndarray:
        p = np.asarray(self.points)
        return np.linalg.norm(np.diff(p, axis=0), axis=-1)

    def geometry_ok(self, slack: float = 1e-6) -> bool:
        return bool(np.all(self.step_lengths() <= 0.75 * np.asarray(self.deltas[:-1]) + slack))

    def records(self):
        out = []
        for i, (p, val, d) in enumerate(zip(self.points, self.values, self.deltas)):
            out.append({"i": i, "x": [float(c) for c in p], "abs_v": val, "delta": d,
                        "ratio": self.ratios[i - 1] if i else None})
        return out

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records())

    def to_dict(self):
        return {"steps": self.steps, "exited": self.exited, "terminal_clearance": self.terminal_clearance,
                "records": self.records()}


def escape_chain(v: HarmonicSpec, zs: ZeroSetModel, x0, cfg: WalkConfig = WalkConfig()) -> WalkTrace:
    """Iterate :func:`amplify_step` from ``x0`` until the chain leaves ``B_{1/4}``."""
    x = np.asarray(x0, dtype=float)
    if _norm(x) > 0.125 * (1 + 1e-12):
        raise InputError("x0 must lie in B_{1/8}")
    if _value(v, x) == 0.0:
        raise InputError("v(x0) must be nonzero")
    trace = WalkTrace([x], [abs(_value(v, x))], [float(zs.delta(x))], [])
    while _norm(x) < 0.25:
        if trace.steps >= cfg.max_steps:
            raise NonTerminationError(f"chain did not leave B_1/4 within {cfg.max_steps} steps", trace)
        step = amplify_step(v, zs, x, cfg.sphere_samples, CHAIN_THRESHOLD, CHAIN_FALLBACK)
        x = step.point
        trace.points.append(x)
        trace.values.append(abs(_value(v, x)))
        trace.deltas.append(float(zs.delta(x)))
        trace.ratios.append(step.ratio)
    trace.exited = True
    return trace


def random_starts(v: HarmonicSpec, count: int, seed: int = 0, radius: float = 0.125) -> np.ndarray:
    """Uniform points in ``B_radius`` where ``v`` does not vanish."""
    rng = np.random.default_rng(seed)
    n = v.dimension
    out = []
    while len(out) < count:
        g = rng.standard_normal(n)
        p = radius * rng.random() ** (1.0 / n) * g / np.linalg.norm(g)
        if _value(v, p) != 0.0:
            out.append(p)
    return np.array(out)


@dataclass
class Al3Report:
    beta: float
    betas: List[float]
    c: float
    M: float
    sup_inner: float
    sup_clear: float
    harnack_h: float
    harnack_violations: int
    min_amplification: float
    chain_lengths: List[int]
    loj_consistent: Optional[float] = None

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def empirical_M(u: HarmonicSpec, zs: ZeroSetModel, c: float, resolution: int = 128) -> tuple:
    """``sup_{B_1/16}|u| / sup{|u(y)| : y in B_1/2, delta(y) >= c}`` on grid nodes."""
    n = u.dimension
    inner = Region((0.0,) * n, 1.0 / 16.0, resolution).ball_nodes()
    outer = Region((0.0,) * n, 0.5, resolution).ball_nodes()
    clear = outer[np.asarray(zs.delta(outer)) >= c]
    if len(clear) == 0:
        raise InputError(f"no grid point of B_1/2 has delta >= {c}")
    s_in = float(np.max(np.abs(u._eval(inner))))
    s_out = float(np.max(np.abs(u._eval(clear))))
    return s_in / s_out, s_in, s_out


def verify_al3(u: HarmonicSpec, v: HarmonicSpec, zs: ZeroSetModel, starts: Sequence, loj: Optional[LojFit] = None,
               cfg: WalkConfig = WalkConfig(), c: Optional[float] = None, resolution: int = 128,
               traces: Optional[List[WalkTrace]] = None) -> Al3Report:
    """Check the growth of ``u`` along escape chains of ``v`` and the sup bound.

    ``beta`` is the smallest exponent with ``|u(x_m)| >= |u(x_0)| delta(x_0)**beta``
    over all chains.  ``M`` is measured with ``c`` (default: the smallest
    terminal clearance of the chains).
    """
    starts = np.atleast_2d(np.asarray(starts, dtype=float))
    if traces is None:
        traces = [escape_chain(v, zs, x, cfg) for x in starts]
    h = ClassicalConstants.for_ball(u.dimension, 0.75).h_r
    betas, violations, min_amp = [], 0, math.inf
    consistent = []
    for tr in traces:
        pts = np.asarray(tr.points)
        uu = np.abs(u._eval(pts))
        u0, um, d0 = uu[0], uu[-1], tr.deltas[0]
        if um >= u0:
            b = 0.0
        elif d0 < 1.0:
            b = math.log(um / u0) / math.log(d0)
        else:
            b = math.inf
        betas.append(b)
        violations += int(np.sum(uu[1:] < h * uu[:-1] * (1 - 1e-9)))
        if tr.ratios:
            min_amp = min(min_amp, min(tr.ratios))
        if loj is not None and tr.ratios and min(tr.ratios) > 1.0:
            C = min(tr.ratios)
            bound = math.log(loj.L / (loj.l * d0**loj.gamma)) / math.log(C)
            consistent.append(tr.steps <= bound + 1e-9)
    if c is None:
        c = min(tr.terminal_clearance for tr in traces)
    M, s_in, s_out = empirical_M(u, zs, c, resolution)
    return Al3Report(
        beta=max(betas), betas=betas, c=c, M=M, sup_inner=s_in, sup_clear=s_out,
        harnack_h=h, harnack_violations=violations, min_amplification=min_amp,
        chain_lengths=[tr.steps for tr in traces],
        loj_consistent=(sum(consistent) / len(consistent)) if consistent else None,
    )
