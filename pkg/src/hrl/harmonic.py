"""Harmonic function specifications: evaluation, gradients and Taylor jets.

Three kinds of body are supported:

* :class:`Polynomial` -- sparse harmonic polynomial in ``n`` variables,
* :class:`ClosedForm` -- a fixed catalog entry ``Re F(z)`` or ``Im F(z)`` with
  ``z = x0 + i x1`` and ``F`` entire,
* :class:`SumSpec` -- a real linear combination of specs.

All evaluation routines are vectorised over a leading batch shape: ``x`` has
shape ``(..., n)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Sequence, Tuple

import numpy as np

from .errors import CapabilityError, InputError
from .jets import Poly, TaylorJet, poly_derivative, poly_eval, poly_laplacian, poly_shift


def _as_points(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (n,):
        raise InputError(f"expected points of dimension {n}, got shape {x.shape}")
    return x


class HarmonicSpec:
    """Base class.  Subclasses implement ``_eval``, ``_grad`` and ``_jet``."""

    dimension: int

    def eval(self, x) -> np.ndarray:
        x = _as_points(x, self.dimension)
        out = self._eval(x)
        return float(out) if out.ndim == 0 else out

    __call__ = eval

    def gradient(self, x) -> np.ndarray:
        return self._grad(_as_points(x, self.dimension))

    def taylor_jet(self, center, order: int) -> TaylorJet:
        center = _as_points(center, self.dimension)
        if center.ndim != 1:
            raise InputError("jet center must be a single point")
        if order < 0:
            raise InputError("jet order must be non-negative")
        coeffs = {a: c for a, c in self._jet(center, order).items() if c != 0.0}
        return TaylorJet(tuple(float(c) for c in center), order, coeffs)

    def __add__(self, other):
        if not isinstance(other, HarmonicSpec):
            return NotImplemented
        return SumSpec(((1.0, self), (1.0, other)))

    def __sub__(self, other):
        if not isinstance(other, HarmonicSpec):
            return NotImplemented
        return SumSpec(((1.0, self), (-1.0, other)))

    def __rmul__(self, lam):
        return SumSpec(((float(lam), self),))

    def __neg__(self):
        return SumSpec(((-1.0, self),))

    def to_dict(self) -> dict:
        raise NotImplementedError

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class Polynomial(HarmonicSpec):
    """Sparse polynomial ``sum c_a x^a``; harmonicity is checked on construction."""

    def __init__(self, dimension: int, terms: Mapping[Sequence[int], float], *, rel_tol: float = 0.0):
        if dimension < 2:
            raise InputError("dimension must be >= 2")
        self.dimension = int(dimension)
        clean: Poly = {}
        for alpha, c in terms.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.dimension or min(alpha) < 0:
                raise InputError(f"bad exponent {alpha} for dimension {dimension}")
            c = float(c)
            if c != 0.0:
                clean[alpha] = clean.get(alpha, 0.0) + c
        self.terms = dict(sorted(clean.items()))
        scale = max((abs(c) for c in clean.values()), default=0.0)
        residual = max((abs(c) for c in poly_laplacian(clean, self.dimension).values()), default=0.0)
        if residual > rel_tol * scale:
            raise InputError(f"polynomial is not harmonic (Laplacian coefficient {residual:g})")
        self._grads = [poly_derivative(clean, i) for i in range(self.dimension)]

    def _eval(self, x):
        return poly_eval(self.terms, x)

    def _grad(self, x):
        return np.stack([poly_eval(g, x) for g in self._grads], axis=-1)

    def _jet(self, center, order):
        return {a: c for a, c in poly_shift(self.terms, center).items() if sum(a) <= order}

    def to_dict(self):
        terms = [[list(a), repr(c)] for a, c in sorted(self.terms.items())]
        return {"dimension": self.dimension, "body": {"kind": "polynomial", "terms": terms}}

    def __repr__(self):
        return f"Polynomial({self.dimension}, {self.terms!r})"


# -- closed forms -----------------------------------------------------------
#
# Each entry is Re or Im of an entire F.  ``series(z0, order)`` returns the
# Taylor coefficients F^(m)(z0)/m!, m = 0..order.


@dataclass(frozen=True)
class _Entire:
    value: Callable
    deriv: Callable
    series: Callable


def _zpow(k: int) -> _Entire:
    def series(z0, order):
        return np.array([math.comb(k, m) * z0 ** (k - m) if m <= k else 0.0 for m in range(order + 1)], dtype=complex)

    return _Entire(lambda z: z**k, lambda z: k * z ** (k - 1), series)


def _zpow_pert(k: int, a: float) -> _Entire:
    lo, hi = _zpow(k), _zpow(2 * k)
    return _Entire(
        lambda z: lo.value(z) + a * hi.value(z),
        lambda z: lo.deriv(z) + a * hi.deriv(z),
        lambda z0, order: lo.series(z0, order) + a * hi.series(z0, order),
    )


def _exp_series(z0, order):
    e = np.exp(z0)
    return np.array([e / math.factorial(m) for m in range(order + 1)], dtype=complex)


def _sinh_series(z0, order):
    s, c = np.sinh(z0), np.cosh(z0)
    return np.array([(s if m % 2 == 0 else c) / math.factorial(m) for m in range(order + 1)], dtype=complex)


_EXP = _Entire(np.exp, np.exp, _exp_series)
_SINH = _Entire(np.sinh, np.cosh, _sinh_series)


def _int_param(p) -> int:
    k = int(float(p))
    if k != float(p) or k < 1:
        raise InputError(f"power must be a positive integer, got {p}")
    return k


# name -> (parameter types, builder, part)
CLOSED_FORMS: Dict[str, Tuple[Tuple[Callable, ...], Callable, str]] = {
    "im_zk": ((_int_param,), _zpow, "im"),
    "exp_sin": ((), lambda: _EXP, "im"),
    "cosh_sin": ((), lambda: _SINH, "im"),
    "im_zk_perturbed": ((_int_param, float), _zpow_pert, "im"),
    # harmonic conjugates of the entries above
    "re_zk": ((_int_param,), _zpow, "re"),
    "exp_cos": ((), lambda: _EXP, "re"),
    "sinh_cos": ((), lambda: _SINH, "re"),
    "re_zk_perturbed": ((_int_param, float), _zpow_pert, "re"),
}

CONJUGATE_NAME = {"im_zk": "re_zk", "exp_sin": "exp_cos", "cosh_sin": "sinh_cos", "im_zk_perturbed": "re_zk_perturbed"}


class ClosedForm(HarmonicSpec):
    """Catalog function acting on the first two coordinates."""

    def __init__(self, name: str, params: Sequence[float] = (), dimension: int = 2):
        if name not in CLOSED_FORMS:
            raise InputError(f"unknown closed form {name!r}; valid: {sorted(CLOSED_FORMS)}")
        kinds, builder, part = CLOSED_FORMS[name]
        if len(params) != len(kinds):
            raise InputError(f"{name} takes {len(kinds)} parameter(s), got {len(params)}")
        if dimension < 2:
            raise InputError("dimension must be >= 2")
        self.name = name
        try:
            self.params = tuple(kind(p) for kind, p in zip(kinds, params))
        except (TypeError, ValueError):
            raise InputError(f"bad parameters {params!r} for {name}") from None
        self.dimension = int(dimension)
        self.part = part
        self._f = builder(*self.params)

    def _z(self, x):
        return x[..., 0] + 1j * x[..., 1]

    def _take(self, w):
        return np.imag(w) if self.part == "im" else np.real(w)

    def _eval(self, x):
        return np.asarray(self._take(self._f.value(self._z(x))), dtype=float)

    def _grad(self, x):
        d = self._f.deriv(self._z(x))
        out = np.zeros(x.shape)
        if self.part == "im":
            out[..., 0], out[..., 1] = np.imag(d), np.real(d)
        else:
            out[..., 0], out[..., 1] = np.real(d), -np.imag(d)
        return out

    def _jet(self, center, order):
        c = self._f.series(complex(center[0], center[1]), order)
        pad = (0,) * (self.dimension - 2)
        out = {}
        for m in range(order + 1):
            if c[m] == 0:
                continue
            for b in range(m + 1):
                w = c[m] * math.comb(m, b) * (1j**b)
                val = float(self._take(w))
                if val != 0.0:
                    out[(m - b, b) + pad] = val
        return out

    def to_dict(self):
        return {
            "dimension": self.dimension,
            "body": {"kind": "closed_form", "name": self.name, "params": [repr(p) for p in self.params]},
        }

    def __repr__(self):
        args = ", ".join(repr(p) for p in self.params)
        return f"{self.name}({args})" if self.dimension == 2 else f"{self.name}({args})[n={self.dimension}]"


class SumSpec(HarmonicSpec):
    """Real linear combination ``sum s_i * spec_i``."""

    def __init__(self, terms: Sequence[Tuple[float, HarmonicSpec]]):
        terms = tuple((float(s), spec) for s, spec in terms)
        if not terms:
            raise InputError("empty sum")
        dims = {spec.dimension for _, spec in terms}
        if len(dims) != 1:
            raise InputError(f"sum terms have mixed dimensions {sorted(dims)}")
        self.dimension = dims.pop()
        self.terms = terms

    def _eval(self, x):
        return sum(s * spec._eval(x) for s, spec in self.terms)

    def _grad(self, x):
        return sum(s * spec._grad(x) for s, spec in self.terms)

    def _jet(self, center, order):
        out: Poly = {}
        for s, spec in self.terms:
            for a, c in spec._jet(center, order).items():
                out[a] = out.get(a, 0.0) + s * c
        return out

    def to_dict(self):
        return {
            "dimension": self.dimension,
            "body": {"kind": "sum", "terms": [[repr(s), spec.to_dict()] for s, spec in self.terms]},
        }

    def __repr__(self):
        return " + ".join(f"{s!r}*{spec!r}" for s, spec in self.terms)


def constant(value: float, dimension: int = 2) -> Polynomial:
    return Polynomial(dimension, {(0,) * dimension: value})


def from_dict(doc: Mapping) -> HarmonicSpec:
    try:
        dim = int(doc["dimension"])
        body = doc["body"]
        kind = body["kind"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed spec document: {exc}") from exc
    if kind == "polynomial":
        return Polynomial(dim, {tuple(a): float(c) for a, c in body["terms"]})
    if kind == "closed_form":
        return ClosedForm(body["name"], body.get("params", []), dim)
    if kind == "sum":
        spec = SumSpec([(float(s), from_dict(t)) for s, t in body["terms"]])
        if spec.dimension != dim:
            raise InputError("sum dimension does not match its terms")
        return spec
    raise InputError(f"unknown spec kind {kind!r}")


def loads(text: str) -> HarmonicSpec:
    return from_dict(json.loads(text))


# module-level spellings of the core operations

def evaluate(spec: HarmonicSpec, x):
    return spec.eval(x)


def gradient(spec: HarmonicSpec, x):
    return spec.gradient(x)


def taylor_jet(spec: HarmonicSpec, center, order: int) -> TaylorJet:
    return spec.taylor_jet(center, order)


def laplacian_fd(spec: HarmonicSpec, x, step: float = 1e-4) -> np.ndarray:
    """Five-point (2n+1 point) finite-difference Laplacian."""
    x = _as_points(x, spec.dimension)
    center = spec._eval(x)
    acc = np.zeros_like(center)
    for i in range(spec.dimension):
        e = np.zeros(spec.dimension)
        e[i] = step
        acc = acc + spec._eval(x + e) + spec._eval(x - e) - 2.0 * center
    return acc / step**2


def require_2d(spec: HarmonicSpec, what: str = "operation"):
    if spec.dimension != 2:
        raise CapabilityError(f"{what} is only available in dimension 2")


@dataclass(frozen=True)
class ClassicalConstants:
    """Poisson-kernel constants for the unit ball in dimension ``n`` and radius ``r``.

    ``h_r``: Harnack, ``inf_{B_r} u >= h_r sup_{B_r} u`` for positive ``u``;
    ``a_r``: Cauchy, ``sup_{B_r}|D^a u| <= a! a_r^|a| sup_{B_1}|u|``;
    ``b_r``: ``sup_{B_r}|u| <= b_r (mean_{dB_1} u^2)^(1/2)``.
    """

    n: int
    r: float
    h_r: float
    a_r: float
    b_r: float

    @classmethod
    def for_ball(cls, n: int, r: float) -> "ClassicalConstants":
        if not 0 < r < 1:
            raise InputError("r must lie in (0, 1)")
        h = ((1 - r) / (1 + r)) ** n
        # Evans' interior estimate with k^k <= e^k k! and k! <= n^k a!
        a = math.e * n * n * 2 ** (n + 1) / (1 - r)
        # Cauchy-Schwarz against the Poisson kernel: mean(P^2) <= sup P
        b = math.sqrt((1 + r) / (1 - r) ** (n - 1))
        return cls(n, r, h, a, b)

    def to_dict(self):
        return {"n": self.n, "r": self.r, "h_r": self.h_r, "a_r": self.a_r, "b_r": self.b_r}
