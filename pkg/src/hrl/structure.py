"""Two-dimensional structure: harmonic conjugates and ``U = g o V`` fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import CapabilityError, InputError, ResolutionError
from .harmonic import CONJUGATE_NAME, ClosedForm, HarmonicSpec, Polynomial, SumSpec, constant, require_2d
from .jets import poly_derivative

COND_GATE = 1e12


def _poly_conjugate(spec: Polynomial) -> Polynomial:
    # w_x = u_y, w_y = -u_x; integrate along (0,0) -> (x,0) -> (x,y)
    u_x = poly_derivative(spec.terms, 0)
    u_y = poly_derivative(spec.terms, 1)
    out = {}
    for (a, b), c in u_y.items():
        if b == 0:
            key = (a + 1, 0)
            out[key] = out.get(key, 0.0) + c / (a + 1)
    for (a, b), c in u_x.items():
        key = (a, b + 1)
        out[key] = out.get(key, 0.0) - c / (b + 1)
    return Polynomial(2, out)


def conjugate(spec: HarmonicSpec) -> HarmonicSpec:
    """Harmonic conjugate ``w`` with ``w + i*spec`` analytic and ``w(0) = 0``."""
    require_2d(spec, "harmonic conjugation")
    if isinstance(spec, Polynomial):
        return _poly_conjugate(spec)
    if isinstance(spec, ClosedForm):
        if spec.name not in CONJUGATE_NAME:
            raise CapabilityError(f"no conjugate registered for {spec.name}")
        w = ClosedForm(CONJUGATE_NAME[spec.name], spec.params, 2)
        w0 = float(w.eval(np.zeros(2)))
        return w if w0 == 0.0 else SumSpec(((1.0, w), (-w0, constant(1.0))))
    if isinstance(spec, SumSpec):
        return SumSpec([(s, conjugate(t)) for s, t in spec.terms])
    raise CapabilityError(f"cannot conjugate {type(spec).__name__}")


@dataclass(frozen=True)
class AnalyticPair:
    """``F = re + i im``."""

    re: HarmonicSpec
    im: HarmonicSpec

    @classmethod
    def from_imaginary(cls, im: HarmonicSpec) -> "AnalyticPair":
        return cls(conjugate(im), im)

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        pts = np.stack([z.real, z.imag], axis=-1)
        return self.re._eval(pts) + 1j * self.im._eval(pts)


def cauchy_riemann_residual(pair: AnalyticPair, pts, step: float = 1e-3) -> float:
    """Largest ``|w_x - v_y| + |w_y + v_x|`` by fourth-order central differences."""
    pts = np.asarray(pts, dtype=float)
    ex, ey = np.array([step, 0.0]), np.array([0.0, step])

    def d(spec, e):
        f = spec._eval
        return (8 * (f(pts + e) - f(pts - e)) - (f(pts + 2 * e) - f(pts - 2 * e))) / (12 * step)

    res = np.abs(d(pair.re, ex) - d(pair.im, ey)) + np.abs(d(pair.re, ey) + d(pair.im, ex))
    return float(np.max(res))


def annulus_samples(V: AnalyticPair, r_in: float = 0.3, r_out: float = 0.6, count: int = 512,
                    domain_radius: float = 1.0, resolution: int = 256) -> np.ndarray:
    """Points ``z`` of the disc whose images ``V(z)`` fall in ``r_in < |w| < r_out``.

    Candidates come from a grid in the open upper half-disc; ``count // 2``
    of them are kept at evenly spaced ranks of ``arg V(z)`` and mirrored, so
    the sample set is closed under conjugation.
    """
    t = domain_radius * np.linspace(-1.0, 1.0, resolution + 1)
    X, Y = np.meshgrid(t, t, indexing="ij")
    z = (X + 1j * Y).ravel()
    z = z[(np.abs(z) < domain_radius) & (z.imag > 0)]
    w = V(z)
    keep = (np.abs(w) > r_in) & (np.abs(w) < r_out)
    z, w = z[keep], w[keep]
    half = count // 2
    if len(z) < half:
        raise ResolutionError(f"only {len(z)} candidate samples in the annulus; raise resolution")
    order = np.lexsort((np.abs(w), np.angle(w)))
    pick = np.unique(np.linspace(0, len(z) - 1, half).round().astype(int))
    top = z[order[pick]]
    return np.concatenate([top, np.conj(top)])


@dataclass
class AnalyticFit:
    g_coeffs: np.ndarray
    max_imag: float
    fit_residual: float
    condition: float
    n_samples: int
    r_out: float = 0.0

    def g(self, w) -> np.ndarray:
        return np.polynomial.polynomial.polyval(np.asarray(w, dtype=complex), self.g_coeffs)

    def to_dict(self):
        return {
            "coefficients": [[repr(float(c.real)), repr(float(c.imag))] for c in self.g_coeffs],
            "max_imag": self.max_imag, "fit_residual": self.fit_residual,
            "condition": self.condition, "n_samples": self.n_samples,
        }


def fit_g(U: AnalyticPair, V: AnalyticPair, samples: Optional[Sequence[complex]] = None, degree: int = 16,
          r_in: float = 0.3, r_out: float = 0.6, gate: float = COND_GATE) -> AnalyticFit:
    """Least-squares ``a_j`` in ``U(z) ~ sum_{j<=degree} a_j V(z)**j``.

    Columns are scaled by ``r_out**j`` (the sampled ``|V|`` radius) so that the
    conditioning reflects the geometry, not the monomial scale.
    """
    z = annulus_samples(V, r_in, r_out) if samples is None else np.asarray(samples, dtype=complex)
    if len(z) < 4 * degree:
        raise InputError(f"need at least {4 * degree} samples for degree {degree}, got {len(z)}")
    w = V(z)
    rho = float(np.max(np.abs(w)))
    target = U(z)
    mat = np.vander(w / rho, degree + 1, increasing=True)
    cond = float(np.linalg.cond(mat))
    if cond > gate:
        raise ResolutionError(f"Vandermonde condition {cond:.3g} exceeds {gate:g}; lower the degree or widen the annulus")
    sol, *_ = np.linalg.lstsq(mat, target, rcond=None)
    coeffs = sol / rho ** np.arange(degree + 1)
    resid = float(np.max(np.abs(mat @ sol - target)))
    return AnalyticFit(coeffs, float(np.max(np.abs(coeffs.imag))), resid, cond, len(z), rho)


def ratio_series_eval(g_coeffs: Sequence[complex], w_re, v_im):
    """``sum_j a_j sum_k (-1)^k C(j, 2k+1) w^(j-2k-1) v^(2k)`` with real ``a_j``.

    Equals ``Im g(w + i v) / v`` for real-coefficient ``g``; the imaginary
    parts of the coefficients are ignored.
    """
    w = np.asarray(w_re, dtype=float)
    v = np.asarray(v_im, dtype=float)
    total = np.zeros(np.broadcast(w, v).shape)
    for j, a in enumerate(g_coeffs):
        a = float(np.real(a))
        if j == 0 or a == 0.0:
            continue
        inner = np.zeros_like(total)
        for k in range((j - 1) // 2 + 1):
            inner = inner + (-1) ** k * math.comb(j, 2 * k + 1) * w ** (j - 2 * k - 1) * v ** (2 * k)
        total = total + a * inner
    return float(total) if total.ndim == 0 else total
