"""Banchoff classification of PL vertices from link sign vectors.

Signs are +1 when a link neighbor is above the center and -1 when below.
Exact ties are resolved by a fixed symbolic perturbation: the parameter vector
is nudged by ``(eps**m, ..., eps)`` so the highest parameter decides first,
and identical affine values fall back to vertex index order.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .mesh import Link

__all__ = [
    "Tag",
    "CriticalType",
    "REGULAR",
    "MINIMUM",
    "MAXIMUM",
    "tie_sign",
    "tie_break_sign",
    "lower_link_components",
    "upper_link_components",
    "classify",
    "classify_values",
]


class Tag(str, Enum):
    REGULAR = "regular"
    MINIMUM = "minimum"
    MAXIMUM = "maximum"
    SADDLE = "saddle"


@dataclass(frozen=True)
class CriticalType:
    tag: Tag
    multiplicity: int = 1

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")
        if self.tag is not Tag.SADDLE and self.multiplicity != 1:
            raise ValueError("only saddles carry a multiplicity")

    @property
    def singular(self) -> bool:
        return self.tag is not Tag.REGULAR


REGULAR = CriticalType(Tag.REGULAR)
MINIMUM = CriticalType(Tag.MINIMUM)
MAXIMUM = CriticalType(Tag.MAXIMUM)


def tie_sign(i: int, j: int, c0: float, c) -> int:
    """Sign assigned to ``delta = f_j - f_i`` when ``delta(a) == 0`` exactly.

    Independent of ``a``: first nonzero of ``(c_m, ..., c_1, c0)``, then ``j - i``.
    """
    for coef in reversed(np.atleast_1d(np.asarray(c, dtype=float))):
        if coef != 0:
            return 1 if coef > 0 else -1
    if c0 != 0:
        return 1 if c0 > 0 else -1
    return 1 if j > i else -1


def tie_break_sign(i: int, j: int, c0: float, c, a) -> int:
    val = c0 + float(np.dot(c, a))
    if val > 0:
        return 1
    if val < 0:
        return -1
    return tie_sign(i, j, c0, c)


def _runs(mask: np.ndarray, closed: bool) -> int:
    k = mask.size
    if k == 0:
        return 0
    if mask.all():
        return 1
    starts = mask & ~np.roll(mask, 1)
    if not closed:
        starts[0] = mask[0]
    return int(starts.sum())


def lower_link_components(link: Link, signs) -> int:
    """Maximal runs of -1 around the ring (cyclic iff the link is closed)."""
    s = np.asarray(signs)
    return _runs(s < 0, link.closed and len(link.ring_edges) > 0)


def upper_link_components(link: Link, signs) -> int:
    s = np.asarray(signs)
    return _runs(s > 0, link.closed and len(link.ring_edges) > 0)


def classify(link: Link, signs) -> CriticalType:
    s = np.asarray(signs)
    if s.shape != (len(link.ring),):
        raise ValueError(f"sign vector of length {s.size} for a link of {len(link.ring)} vertices")
    if np.any((s != 1) & (s != -1)):
        raise ValueError("signs must be +1/-1")
    if np.all(s > 0):
        return MINIMUM
    if np.all(s < 0):
        return MAXIMUM
    # 1D links have no edges: two neighbors with mixed signs is a regular point
    if not link.ring_edges:
        return REGULAR
    lo = lower_link_components(link, s)
    up = upper_link_components(link, s)
    if lo == 1 and up == 1:
        return REGULAR
    # closed rings have lo == up; open boundary paths may differ by one
    return CriticalType(Tag.SADDLE, max(lo, up) - 1)


def classify_values(link: Link, values: np.ndarray) -> CriticalType:
    """Direct classification of one realized field (vertex values ``values``).

    Ties are broken by index, which matches :func:`tie_sign` only for constant
    differences; realizations from continuous parameter draws have no ties.
    """
    v = link.center
    ring = np.asarray(link.ring)
    d = values[ring] - values[v]
    s = np.where(d > 0, 1, np.where(d < 0, -1, np.where(ring > v, 1, -1)))
    return classify(link, s)
