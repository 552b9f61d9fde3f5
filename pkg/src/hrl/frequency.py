"""Spherical L2 means, the doubling index and the generalized doubling constant."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import DegenerateInputError, InputError
from .harmonic import ClassicalConstants, HarmonicSpec
from .region import Region
from .sphere import mean_rule

H_FLOOR = 1e-300


def _check_ball(x, rho, domain: Optional[Region]):
    if not rho > 0:
        raise InputError(f"radius must be positive, got {rho}")
    if domain is not None:
        d = np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(domain.center), axis=-1)
        if np.any(d + rho > domain.radius * (1 + 1e-12)):
            raise InputError("sphere leaves the domain")


def sphere_mean(values_fn, x: np.ndarray, rho: float, n: int) -> np.ndarray:
    nodes, w = mean_rule(n)
    pts = x[..., None, :] + rho * nodes
    return values_fn(pts) @ w


def h_norm(spec: HarmonicSpec, x, rho: float, domain: Optional[Region] = None):
    """Normalized mean of ``u**2`` over the sphere of radius ``rho`` about ``x``.

    ``x`` may be a batch of points, shape (..., n).
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != spec.dimension:
        raise InputError("point dimension does not match the spec")
    _check_ball(x, rho, domain)
    out = sphere_mean(lambda p: spec._eval(p) ** 2, x, rho, spec.dimension)
    return float(out) if out.ndim == 0 else out


def doubling(spec: HarmonicSpec, x, rho: float, domain: Optional[Region] = None):
    """``H(x, 2 rho) / H(x, rho)``."""
    _check_ball(x, 2 * rho, domain)
    lo = np.asarray(h_norm(spec, x, rho))
    if np.any(lo < H_FLOOR):
        raise DegenerateInputError("spherical mean vanishes to machine precision")
    out = np.asarray(h_norm(spec, x, 2 * rho)) / lo
    return float(out) if out.ndim == 0 else out


def geometric_radii(j_min: int = 2, j_max: int = 8) -> List[float]:
    """Increasing ladder ``2**-j_max, ..., 2**-j_min``."""
    return [2.0 ** -j for j in range(j_max, j_min - 1, -1)]


@dataclass
class FrequencyReport:
    x: tuple
    radii: List[float]
    H: List[float]
    N: List[float]
    monotone: bool
    worst_violation: float
    tolerance: float = 1e-3
    quadrature: str = ""

    def rows(self):
        return [
            {"x": list(self.x), "rho": r, "H": h, "N": n}
            for r, h, n in zip(self.radii, self.H, self.N)
        ]

    def to_dict(self):
        return {
            "x": list(self.x), "radii": self.radii, "H": self.H, "N": self.N,
            "monotone": self.monotone, "worst_violation": self.worst_violation,
            "tolerance": self.tolerance, "quadrature": self.quadrature,
        }


def quadrature_label(n: int) -> str:
    if n == 2:
        return "trapezoid-512"
    if n == 3:
        return "gauss-legendre-64 x trapezoid-128"
    return "sobol-65536"


def frequency_profile(spec: HarmonicSpec, x, radii: Optional[Sequence[float]] = None,
                      tol: float = 1e-3) -> FrequencyReport:
    """H and N along an increasing radius ladder, with a monotonicity verdict.

    A violation is a relative drop ``(N_i - N_{i+1}) / N_i``; the profile is
    monotone when no drop exceeds ``tol``.
    """
    radii = list(geometric_radii() if radii is None else radii)
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise InputError("radii must be strictly increasing")
    x = np.asarray(x, dtype=float)
    H = [h_norm(spec, x, r) for r in radii]
    N = [doubling(spec, x, r) for r in radii]
    drops = [(a - b) / a for a, b in zip(N, N[1:])]
    worst = max([0.0] + drops)
    return FrequencyReport(tuple(x.tolist()), radii, H, N, worst <= tol, worst, tol,
                           quadrature_label(spec.dimension))


def doubling_profiles(spec: HarmonicSpec, xs, radii: Sequence[float]) -> np.ndarray:
    """N(x, rho) for a batch of points, shape (len(xs), len(radii))."""
    xs = np.asarray(xs, dtype=float)
    cols = []
    for r in radii:
        lo = h_norm(spec, xs, r)
        if np.any(lo < H_FLOOR):
            raise DegenerateInputError("spherical mean vanishes to machine precision")
        cols.append(h_norm(spec, xs, 2 * r) / lo)
    return np.stack(cols, axis=-1)


@dataclass
class GeneralizedDoubling:
    N1: float
    argmax_x: tuple
    argmax_r: float
    M: float
    m: float
    n_points: int
    radii: List[float] = field(default_factory=list)

    @property
    def bound(self) -> float:
        """The ``M/m`` upper bound for the recentred doubling index."""
        return self.M / self.m

    def to_dict(self):
        return {"N1": self.N1, "argmax_x": list(self.argmax_x), "argmax_r": self.argmax_r,
                "M": self.M, "m": self.m, "M_over_m": self.bound, "n_points": self.n_points,
                "radii": self.radii}


def _recentred_h(spec: HarmonicSpec, xs: np.ndarray, rho: float) -> np.ndarray:
    v0 = spec._eval(xs)
    return sphere_mean(lambda p: (spec._eval(p) - v0[:, None]) ** 2, xs, rho, spec.dimension)


def generalized_doubling(spec: HarmonicSpec, points=None, radii: Optional[Sequence[float]] = None,
                         center=None, resolution: int = 16) -> GeneralizedDoubling:
    """Grid maximum of ``N_{v - v(x)}(x, r)`` over ``x`` in ``B_{1/4}`` and ``r < 1/4``.

    The working ball is the unit ball about ``center`` (origin by default).
    Alongside the grid maximum, returns ``M`` and ``m``: the largest mean of
    ``(v-a)^2`` over spheres of radius 1/2 and the smallest over spheres of
    radius 1/4, with ``|a| <= max_{B_{1/4}} |v|``.
    """
    n = spec.dimension
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    if points is None:
        points = Region(tuple(center), 0.25, resolution).ball_nodes()
    xs = np.asarray(points, dtype=float)
    if np.any(np.linalg.norm(xs - center, axis=-1) > 0.25 * (1 + 1e-12)):
        raise InputError("sample points must lie in B_{1/4}")
    radii = list(geometric_radii(3, 7) if radii is None else radii)
    if any(not 0 < r < 0.25 for r in radii):
        raise InputError("radii must lie in (0, 1/4)")

    v0 = spec._eval(xs)
    A = float(np.max(np.abs(v0)))
    nodes, w = mean_rule(n)
    q = lambda rho: spec._eval(xs[:, None, :] + rho * nodes)
    vals_q, vals_h = q(0.25), q(0.5)
    sq_q, mean_q = vals_q**2 @ w, vals_q @ w
    sq_h, mean_h = vals_h**2 @ w, vals_h @ w
    a_star = np.clip(mean_q, -A, A)
    m = float(np.min(sq_q - 2 * a_star * mean_q + a_star**2))
    M = float(np.max(np.maximum(sq_h - 2 * A * mean_h + A**2, sq_h + 2 * A * mean_h + A**2)))
    if not m > 1e-14 * max(M, H_FLOOR):
        raise DegenerateInputError("function is constant on the working ball")

    best, bx, br = -np.inf, None, None
    for r in radii:
        lo = _recentred_h(spec, xs, r)
        hi = _recentred_h(spec, xs, 2 * r)
        ok = lo > H_FLOOR
        N = np.where(ok, hi / np.where(ok, lo, 1.0), -np.inf)
        i = int(np.argmax(N))
        if N[i] > best:
            best, bx, br = float(N[i]), tuple(xs[i].tolist()), r
    return GeneralizedDoubling(best, bx, br, M, m, len(xs), radii)


def norm_equivalence_check(spec: HarmonicSpec, r: float = 0.5, eps: float = 1e-3,
                           resolution: int = 64, center=None):
    """Return ``(sup_{B_r}|u|, b * sqrt(H(center, 1-eps)))`` for the configured constant ``b``.

    The constant is the one for the ball of radius ``1-eps``, i.e. for the
    ratio ``r / (1-eps)``.
    """
    n = spec.dimension
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    R = 1.0 - eps
    const = ClassicalConstants.for_ball(n, r / R)
    pts = Region(tuple(center), r, resolution).ball_nodes()
    sup = float(np.max(np.abs(spec._eval(pts))))
    return sup, const.b_r * float(np.sqrt(h_norm(spec, center, R)))
