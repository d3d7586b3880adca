"""Dimension formulas and simplex-spline bases of the smooth spline spaces.

On the 3-split, splines of degree 3r admit smoothness at most 2r-1
before the space collapses to polynomials; the non-polynomial part is
spanned by three splines carrying one barycenter knot. On the 6-split
the analogous space has degree 2r and six extra splines carrying one
edge-midpoint knot each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .geometry import SplitConfig, SplitKind
from .scalars import Scalar
from .simplex import KnotVector


@dataclass(frozen=True)
class SpaceDescriptor:
    """A spline space: split kind, global smoothness, and degree."""

    kind: SplitKind
    smoothness: int
    degree: int
    r: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SplitKind(self.kind))
        if not 0 <= self.smoothness < self.degree:
            raise ValueError(
                f"need 0 <= smoothness < degree, got rho={self.smoothness}, d={self.degree}"
            )

    @property
    def label(self) -> str:
        return f"S^{self.smoothness}_{self.degree}({self.kind.value})"


@dataclass(frozen=True)
class SplineSpaceBasis:
    """Ordered basis: Bernstein elements first, then the added splines."""

    descriptor: SpaceDescriptor
    split: SplitConfig
    elements: Tuple[KnotVector, ...]
    poly_count: int

    @property
    def added_elements(self) -> Tuple[KnotVector, ...]:
        return self.elements[self.poly_count:]


def dimension(descriptor: SpaceDescriptor) -> int:
    """Dimension of the space of C^rho splines of degree d on the split."""
    rho, d = descriptor.smoothness, descriptor.degree
    n = 3 if descriptor.kind is SplitKind.CT else 6
    interior = sum(max(rho + 1 - 2 * j, 0) for j in range(1, d - rho + 1))
    return math.comb(rho + 2, 2) + n * math.comb(d - rho + 1, 2) + interior


def bernstein_indices(degree: int):
    """Lexicographic (i, j, k) with i + j + k = degree + 3 and all >= 1."""
    total = degree + 3
    return [
        (i, j, total - i - j)
        for i in range(1, total - 1)
        for j in range(1, total - i)
        if total - i - j >= 1
    ]


def ct_basis(split: SplitConfig, r: int) -> SplineSpaceBasis:
    """Basis of the C^{2r-1} degree-3r space on the 3-split.

    All Bernstein multiplicity vectors except the central one, plus the
    three splines obtained from it by barycenter knot insertion.
    """
    if split.kind is not SplitKind.CT:
        raise ValueError("ct_basis needs a 3-split configuration")
    if r < 1:
        raise ValueError("r must be a positive integer")
    d = 3 * r
    central = (r + 1, r + 1, r + 1)
    elements = [
        KnotVector(split, (i, j, k, 0))
        for (i, j, k) in bernstein_indices(d)
        if (i, j, k) != central
    ]
    poly_count = len(elements)
    for mult in ((r, r + 1, r + 1, 1), (r + 1, r, r + 1, 1), (r + 1, r + 1, r, 1)):
        elements.append(KnotVector(split, mult))
    desc = SpaceDescriptor(SplitKind.CT, 2 * r - 1, d, r=r)
    return SplineSpaceBasis(desc, split, tuple(elements), poly_count)


def ps_basis(split: SplitConfig, r: int) -> SplineSpaceBasis:
    """Basis of the C^{2r-1} degree-2r space on the uniform 6-split.

    The three Bernstein vectors with a lone corner knot opposite a long
    edge are replaced by the six splines carrying one midpoint knot.
    """
    if split.kind is not SplitKind.PS:
        raise ValueError("ps_basis needs a 6-split configuration")
    if r < 1:
        raise ValueError("r must be a positive integer")
    d = 2 * r
    excluded = {
        (1, r + 1, r + 1),
        (r + 1, 1, r + 1),
        (r + 1, r + 1, 1),
    }
    elements = [
        KnotVector(split, (i, j, k, 0, 0, 0))
        for (i, j, k) in bernstein_indices(d)
        if (i, j, k) not in excluded
    ]
    poly_count = len(elements)
    added = (
        (1, r, r + 1, 0, 1, 0),
        (1, r + 1, r, 0, 1, 0),
        (r + 1, 1, r, 0, 0, 1),
        (r, 1, r + 1, 0, 0, 1),
        (r, r + 1, 1, 1, 0, 0),
        (r + 1, r, 1, 1, 0, 0),
    )
    for mult in added:
        elements.append(KnotVector(split, mult))
    desc = SpaceDescriptor(SplitKind.PS, 2 * r - 1, d, r=r)
    return SplineSpaceBasis(desc, split, tuple(elements), poly_count)


def basis_for(split: SplitConfig, r: int) -> SplineSpaceBasis:
    return ct_basis(split, r) if split.kind is SplitKind.CT else ps_basis(split, r)


def bernstein_eval(i: int, j: int, k: int, coords) -> Scalar:
    """Closed-form Bernstein value; independent cross-check for spline
    evaluation of knot vectors without split points."""
    if min(i, j, k) < 1:
        raise ValueError(f"Bernstein indices must be positive, got {(i, j, k)}")
    if isinstance(coords, (tuple, list)):
        a1, a2, a3 = coords
    else:
        a1, a2, a3 = coords.as_tuple()
    coef = math.factorial(i + j + k - 3) // (
        math.factorial(i - 1) * math.factorial(j - 1) * math.factorial(k - 1)
    )
    return coef * a1 ** (i - 1) * a2 ** (j - 1) * a3 ** (k - 1)
