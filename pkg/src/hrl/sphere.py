"""Fixed quadrature rules and deterministic point sets on the unit sphere."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.stats import norm, qmc

QMC_SEED = 20240531


@lru_cache(maxsize=None)
def mean_rule(n: int):
    """Nodes and weights (summing to 1) for the normalized mean over S^{n-1}.

    2D: 512-point trapezoid.  3D: 64-point Gauss-Legendre in cos(theta) times a
    128-point trapezoid in phi.  n >= 4: 2**16 scrambled Sobol points pushed
    to the sphere through the Gaussian inverse CDF, equal weights.
    """
    if n == 2:
        t = 2.0 * np.pi * np.arange(512) / 512
        nodes = np.stack([np.cos(t), np.sin(t)], axis=-1)
        weights = np.full(512, 1.0 / 512)
    elif n == 3:
        c, wc = np.polynomial.legendre.leggauss(64)
        phi = 2.0 * np.pi * np.arange(128) / 128
        s = np.sqrt(1.0 - c**2)
        cc, pp = np.meshgrid(c, phi, indexing="ij")
        ss = np.meshgrid(s, phi, indexing="ij")[0]
        nodes = np.stack([ss * np.cos(pp), ss * np.sin(pp), cc], axis=-1).reshape(-1, 3)
        weights = (np.repeat(wc, 128) / 2.0) / 128
    else:
        nodes = directions(n, 2**16)
        weights = np.full(len(nodes), 1.0 / len(nodes))
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=None)
def directions(n: int, count: int, seed: int = QMC_SEED) -> np.ndarray:
    """Deterministic, well-spread unit vectors.

    In 2D these are equally spaced angles starting at angle 0, so ``count``
    divisible by 4 contains the four axis directions.
    """
    if n == 2:
        t = 2.0 * np.pi * np.arange(count) / count
        out = np.stack([np.cos(t), np.sin(t)], axis=-1)
    else:
        sampler = qmc.Sobol(n, scramble=True, seed=seed)
        m = int(np.ceil(np.log2(max(count, 2))))
        u = sampler.random_base2(m)[:count]
        g = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
        out = g / np.linalg.norm(g, axis=-1, keepdims=True)
    out.setflags(write=False)
    return out
