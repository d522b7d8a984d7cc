"""Built-in synthetic inputs, generated at any resolution."""

from __future__ import annotations

import numpy as np

from .analytic import SmoothPair
from .family import LinearFamily
from .mesh import Grid, build_line_grid, structured_triangle_grid

__all__ = [
    "helicoid",
    "parabola_sine",
    "parabola_sine_pair",
    "gaussian_bumps",
    "two_mode_ensemble",
    "random_family",
]


def helicoid(n: int = 601, x_max: float = 6 * np.pi) -> tuple[Grid, LinearFamily]:
    """``f_a(x) = a1 cos x + a2 sin x`` sampled on ``n`` points of ``[0, x_max]``."""
    x = np.linspace(0.0, x_max, n)
    return build_line_grid(x), LinearFamily(np.vstack([np.zeros(n), np.cos(x), np.sin(x)]), "helicoid")


def parabola_sine(n: int = 281, x_range=(-7.0, 7.0)) -> tuple[Grid, LinearFamily]:
    """``f_a(x) = x**2 / 10 + a sin x``."""
    x = np.linspace(*x_range, n)
    return build_line_grid(x), LinearFamily(np.vstack([x**2 / 10, np.sin(x)]), "parabola-sine")


def parabola_sine_pair(x_range=(-7.0, 7.0)) -> SmoothPair:
    return SmoothPair(
        g0=(lambda x: x**2 / 10, lambda x: x / 5, lambda x: np.full_like(np.asarray(x, dtype=float), 0.2)),
        g1=(np.sin, np.cos, lambda x: -np.sin(x)),
        domain=tuple(x_range),
    )


def gaussian_bumps(nx: int = 21, ny: int = 21, shift: float = 0.25, width: float = 0.35) -> tuple[Grid, LinearFamily]:
    """Linearized moving Gaussian bump: the maximum wanders with ``a``.

    ``g0`` is a bump at the origin of ``[-1, 1]^2``; ``g1``/``g2`` are its x/y
    derivatives scaled by ``shift``, so ``f_a`` approximates a bump centered
    at ``shift * a``.
    """
    grid = structured_triangle_grid(nx, ny, (-1.0, 1.0), (-1.0, 1.0))
    x, y = grid.vertices[:, 0], grid.vertices[:, 1]
    g0 = np.exp(-(x**2 + y**2) / (2 * width**2))
    g1 = shift * x / width**2 * g0
    g2 = shift * y / width**2 * g0
    return grid, LinearFamily(np.vstack([g0, g1, g2]), "gaussian-bumps")


def two_mode_ensemble(grid: Grid, members: int = 200, noise: float = 1e-3, seed: int = 7) -> np.ndarray:
    """Ensemble ``mean + c1 u1 + c2 u2 + noise`` over the grid vertices."""
    rng = np.random.default_rng(seed)
    P = grid.vertices
    x = P[:, 0]
    y = P[:, 1] if P.shape[1] > 1 else np.zeros_like(x)
    mean = np.exp(-(x**2 + y**2) / 0.3)
    u1 = np.sin(np.pi * x) * np.cos(0.5 * np.pi * y)
    u2 = np.cos(np.pi * x) * np.sin(np.pi * y)
    c = rng.standard_normal((members, 2)) * np.array([0.4, 0.2])
    return mean + c[:, :1] * u1 + c[:, 1:] * u2 + noise * rng.standard_normal((members, len(x)))


def random_family(grid: Grid, m: int, rng: np.random.Generator, smooth: bool = True) -> LinearFamily:
    """Random family: low-frequency fields so critical points are not pure noise."""
    n = grid.n
    if not smooth:
        return LinearFamily(rng.standard_normal((m + 1, n)))
    P = grid.vertices
    rows = []
    for _ in range(m + 1):
        field = np.zeros(n)
        for _ in range(4):
            k = rng.normal(scale=3.0, size=P.shape[1])
            field += rng.normal() * np.cos(P @ k + rng.uniform(0, 2 * np.pi))
        rows.append(field + 1e-3 * rng.standard_normal(n))
    return LinearFamily(np.array(rows))
