"""Balls and the tensor grids that cover them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class Region:
    """Closed ball ``B_radius(center)`` sampled by ``resolution`` cells per axis."""

    center: Tuple[float, ...]
    radius: float
    resolution: int = 128

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not self.radius > 0:
            raise InputError(f"radius must be positive, got {self.radius}")
        if int(self.resolution) < 16:
            raise InputError(f"resolution must be >= 16, got {self.resolution}")
        if len(self.center) < 2:
            raise InputError("regions live in dimension >= 2")

    @property
    def dimension(self) -> int:
        return len(self.center)

    @property
    def cell_size(self) -> float:
        return 2.0 * self.radius / self.resolution

    @property
    def cell_diagonal(self) -> float:
        return self.cell_size * np.sqrt(self.dimension)

    def axes(self):
        return [c + self.radius * np.linspace(-1.0, 1.0, self.resolution + 1) for c in self.center]

    def nodes(self) -> np.ndarray:
        """Grid nodes of the bounding cube, shape ``(res+1,)*n + (n,)``."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def inside(self, x, slack: float = 1e-12) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        d = np.linalg.norm(x - np.asarray(self.center), axis=-1)
        return d <= self.radius * (1.0 + slack) + slack

    def ball_nodes(self) -> np.ndarray:
        """Grid nodes inside the closed ball, flattened to ``(m, n)``."""
        pts = self.nodes().reshape(-1, self.dimension)
        return pts[self.inside(pts)]

    def with_resolution(self, resolution: int) -> "Region":
        return Region(self.center, self.radius, resolution)

    def to_dict(self):
        return {"center": list(self.center), "radius": self.radius, "resolution": self.resolution}


def unit_ball(dimension: int = 2, resolution: int = 128) -> Region:
    return Region((0.0,) * dimension, 1.0, resolution)
