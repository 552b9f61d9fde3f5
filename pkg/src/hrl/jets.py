"""Multi-indices, sparse polynomial arithmetic and truncated Taylor jets.

A polynomial is a plain ``dict`` mapping exponent tuples to float
coefficients.  A :class:`TaylorJet` is such a dict in the offset variable
``h = x - center`` together with the center and the truncation order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Mapping, Tuple

import numpy as np

from .errors import DegenerateInputError, InputError

MultiIndex = Tuple[int, ...]
Poly = Dict[MultiIndex, float]


@lru_cache(maxsize=None)
def monomials(n: int, degree: int) -> Tuple[MultiIndex, ...]:
    """All exponent tuples of length ``n`` and total degree ``degree``.

    Ordered lexicographically descending, so ``x0**degree`` comes first.
    """
    out = []
    for cuts in itertools.combinations(range(degree + n - 1), n - 1):
        parts = []
        prev = -1
        for c in cuts:
            parts.append(c - prev - 1)
            prev = c
        parts.append(degree + n - 1 - prev - 1)
        out.append(tuple(parts))
    out.sort(reverse=True)
    return tuple(out)


def order(alpha: MultiIndex) -> int:
    return sum(alpha)


def factorial(alpha: MultiIndex) -> int:
    return math.prod(math.factorial(a) for a in alpha)


def poly_eval(poly: Mapping[MultiIndex, float], h: np.ndarray) -> np.ndarray:
    """Evaluate at points ``h`` of shape (..., n)."""
    h = np.asarray(h, dtype=float)
    out = np.zeros(h.shape[:-1])
    for alpha, c in poly.items():
        term = np.full(h.shape[:-1], float(c))
        for i, a in enumerate(alpha):
            if a:
                term = term * h[..., i] ** a
        out = out + term
    return out


def poly_derivative(poly: Mapping[MultiIndex, float], axis: int) -> Poly:
    out: Poly = {}
    for alpha, c in poly.items():
        a = alpha[axis]
        if a == 0:
            continue
        beta = alpha[:axis] + (a - 1,) + alpha[axis + 1:]
        out[beta] = out.get(beta, 0.0) + c * a
    return out


def poly_laplacian(poly: Mapping[MultiIndex, float], n: int) -> Poly:
    out: Poly = {}
    for axis in range(n):
        first = poly_derivative(poly, axis)
        for beta, c in poly_derivative(first, axis).items():
            out[beta] = out.get(beta, 0.0) + c
    return out


def poly_shift(poly: Mapping[MultiIndex, float], center) -> Poly:
    """Re-expand ``p(x)`` in powers of ``h = x - center`` (exact binomial shift)."""
    center = [float(c) for c in center]
    out: Poly = {}
    for alpha, c in poly.items():
        factors = []
        for ci, a in zip(center, alpha):
            factors.append([(b, math.comb(a, b) * ci ** (a - b)) for b in range(a + 1)])
        for combo in itertools.product(*factors):
            beta = tuple(b for b, _ in combo)
            val = c * math.prod(w for _, w in combo)
            if val != 0.0:
                out[beta] = out.get(beta, 0.0) + val
    return out


def poly_mul(p: Mapping[MultiIndex, float], q: Mapping[MultiIndex, float]) -> Poly:
    out: Poly = {}
    for a, ca in p.items():
        for b, cb in q.items():
            key = tuple(i + j for i, j in zip(a, b))
            out[key] = out.get(key, 0.0) + ca * cb
    return out


def homogeneous_slice(poly: Mapping[MultiIndex, float], degree: int) -> Poly:
    return {a: c for a, c in poly.items() if sum(a) == degree}


def slice_vector(poly: Mapping[MultiIndex, float], n: int, degree: int) -> np.ndarray:
    """Coefficients of the degree-``degree`` slice in :func:`monomials` order."""
    return np.array([poly.get(a, 0.0) for a in monomials(n, degree)], dtype=float)


def vector_to_poly(vec, n: int, degree: int) -> Poly:
    return {a: float(c) for a, c in zip(monomials(n, degree), vec) if c != 0.0}


@dataclass(frozen=True)
class TaylorJet:
    """Truncated Taylor expansion ``sum_{|a|<=order} coeffs[a] (x-center)^a``.

    ``coeffs[a]`` is ``D^a g(center) / a!``.
    """

    center: Tuple[float, ...]
    order: int
    coeffs: Mapping[MultiIndex, float] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.center)
        for alpha in self.coeffs:
            if len(alpha) != n or sum(alpha) > self.order or min(alpha) < 0:
                raise InputError(f"multi-index {alpha} invalid for jet of dim {n}, order {self.order}")

    @property
    def dimension(self) -> int:
        return len(self.center)

    def coeff(self, alpha: MultiIndex) -> float:
        return self.coeffs.get(tuple(alpha), 0.0)

    def derivative(self, alpha: MultiIndex) -> float:
        """``D^alpha g(center)``."""
        return self.coeff(alpha) * factorial(tuple(alpha))

    def slice(self, degree: int) -> Poly:
        return homogeneous_slice(self.coeffs, degree)

    def scale(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return poly_eval(self.coeffs, x - np.asarray(self.center))

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        h = x - np.asarray(self.center)
        return np.stack([poly_eval(poly_derivative(self.coeffs, i), h) for i in range(self.dimension)], axis=-1)

    def truncate(self, order: int) -> "TaylorJet":
        order = min(order, self.order)
        return TaylorJet(self.center, order, {a: c for a, c in self.coeffs.items() if sum(a) <= order})

    def scaled(self, lam: float) -> "TaylorJet":
        return TaylorJet(self.center, self.order, {a: lam * c for a, c in self.coeffs.items()})

    def __add__(self, other: "TaylorJet") -> "TaylorJet":
        if not isinstance(other, TaylorJet):
            return NotImplemented
        if not np.allclose(self.center, other.center, rtol=0, atol=0):
            raise InputError("jets must share a center")
        k = min(self.order, other.order)
        out: Poly = {}
        for jet in (self, other):
            for a, c in jet.coeffs.items():
                if sum(a) <= k:
                    out[a] = out.get(a, 0.0) + c
        return TaylorJet(self.center, k, out)

    def laplacian_residual(self) -> float:
        """Largest |coefficient| of the Laplacian, over orders whose image is fully known."""
        lap = poly_laplacian(self.coeffs, self.dimension)
        return max((abs(c) for a, c in lap.items() if sum(a) <= self.order - 2), default=0.0)


@dataclass(frozen=True)
class LeadingPart:
    k: int
    c: float
    p: Mapping[MultiIndex, float]

    def __iter__(self):
        return iter((self.k, self.c, self.p))


def canonical_direction(vec: np.ndarray) -> Tuple[np.ndarray, float]:
    """Unit-norm representative with the first nonzero entry positive, plus its scale."""
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise DegenerateInputError("zero vector has no direction")
    nz = np.flatnonzero(vec)
    sign = 1.0 if vec[nz[0]] > 0 else -1.0
    return sign * vec / norm, sign * norm


def leading_part(jet: TaylorJet, rel_tol: float = 1e-9) -> LeadingPart:
    """Lowest non-vanishing homogeneous slice ``c * p`` of ``jet``.

    ``p`` has unit Euclidean coefficient norm and its first nonzero
    coefficient (in :func:`monomials` order) is positive.  Slices whose
    coefficients are all at most ``rel_tol * jet.scale()`` count as zero.
    """
    scale = jet.scale()
    if scale == 0.0:
        raise DegenerateInputError("jet vanishes identically up to its order")
    tol = rel_tol * scale
    n = jet.dimension
    for k in range(jet.order + 1):
        vec = slice_vector(jet.coeffs, n, k)
        if np.max(np.abs(vec)) > tol:
            vec = np.where(np.abs(vec) > tol, vec, 0.0)
            unit, c = canonical_direction(vec)
            return LeadingPart(k, c, vector_to_poly(unit, n, k))
    raise DegenerateInputError("jet vanishes identically up to its order")
