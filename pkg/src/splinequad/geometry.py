"""Triangles, barycentric coordinates, and the two uniform splits.

The Clough-Tocher 3-split connects the vertices of a triangle to its
barycenter; the uniform Powell-Sabin 6-split additionally connects each
edge midpoint to the opposite vertex. A :class:`SplitConfig` freezes the
resulting point configuration together with the micro-triangles and the
interior micro-edges.

All types are immutable after construction and all operations are pure,
so everything here can be shared freely across threads. A SplitConfig
lazily caches derived data; the cached values are deterministic, which
makes concurrent cache fills idempotent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

from .scalars import HALF, THIRD, Scalar, check_finite, is_exact, rational


class DegenerateTriangleError(ValueError):
    """Raised when three vertices do not span a proper triangle."""


@dataclass(frozen=True)
class Point2:
    """A point (or displacement vector) in the plane."""

    x: Scalar
    y: Scalar

    def __post_init__(self):
        check_finite(self.x)
        check_finite(self.y)

    def __add__(self, other: "Point2") -> "Point2":
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x - other.x, self.y - other.y)

    def __rmul__(self, scale) -> "Point2":
        return Point2(scale * self.x, scale * self.y)

    def __neg__(self) -> "Point2":
        return Point2(-self.x, -self.y)

    def as_tuple(self) -> Tuple[Scalar, Scalar]:
        return (self.x, self.y)


def signed_area(a: Point2, b: Point2, c: Point2) -> Scalar:
    """Signed area of triangle (a, b, c); positive when counterclockwise."""
    twice = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
    return HALF * twice


@dataclass(frozen=True)
class Triangle:
    """Non-degenerate triangle; clockwise input is reordered counterclockwise."""

    v1: Point2
    v2: Point2
    v3: Point2
    area: Scalar = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        a = signed_area(self.v1, self.v2, self.v3)
        if a == 0:
            raise DegenerateTriangleError(
                f"collinear vertices {self.v1}, {self.v2}, {self.v3}"
            )
        if a < 0:
            v2, v3 = self.v3, self.v2
            object.__setattr__(self, "v2", v2)
            object.__setattr__(self, "v3", v3)
            a = -a
        object.__setattr__(self, "area", a)

    @classmethod
    def from_coords(cls, coords: Sequence) -> "Triangle":
        x1, y1, x2, y2, x3, y3 = coords
        return cls(Point2(x1, y1), Point2(x2, y2), Point2(x3, y3))

    @property
    def vertices(self) -> Tuple[Point2, Point2, Point2]:
        return (self.v1, self.v2, self.v3)

    @property
    def barycenter(self) -> Point2:
        s = self.v1 + self.v2 + self.v3
        return Point2(THIRD * s.x, THIRD * s.y)

    def is_exact(self) -> bool:
        return all(is_exact(c) for v in self.vertices for c in v.as_tuple())


@dataclass(frozen=True)
class BarycentricCoords:
    """Affine coordinates with respect to a triangle; components sum to one."""

    a1: Scalar
    a2: Scalar
    a3: Scalar

    def __post_init__(self):
        s = self.a1 + self.a2 + self.a3
        if is_exact(s):
            if s != 1:
                raise ValueError(f"barycentric coordinates sum to {s}, not 1")
        elif abs(s - 1.0) > 1e-14:
            raise ValueError(f"barycentric coordinates sum to {s!r}, not 1")

    def as_tuple(self) -> Tuple[Scalar, Scalar, Scalar]:
        return (self.a1, self.a2, self.a3)


def barycentric(triangle: Triangle, x: Point2) -> BarycentricCoords:
    """Barycentric coordinates of ``x``; inverse of :func:`point_from_barycentric`."""
    a = triangle.area
    a1 = signed_area(x, triangle.v2, triangle.v3) / a
    a2 = signed_area(triangle.v1, x, triangle.v3) / a
    a3 = 1 - a1 - a2
    return BarycentricCoords(a1, a2, a3)


def point_from_barycentric(triangle: Triangle, coords) -> Point2:
    """Affine combination of the vertices; coordinates may be negative."""
    a1, a2, a3 = _triple(coords)
    v1, v2, v3 = triangle.vertices
    return Point2(
        a1 * v1.x + a2 * v2.x + a3 * v3.x,
        a1 * v1.y + a2 * v2.y + a3 * v3.y,
    )


def barycentric_direction(triangle: Triangle, u: Point2) -> Tuple[Scalar, Scalar, Scalar]:
    """Barycentric components of a displacement vector; they sum to zero."""
    a = triangle.area
    origin = triangle.v1
    moved = origin + u
    d1 = (signed_area(moved, triangle.v2, triangle.v3) - signed_area(origin, triangle.v2, triangle.v3)) / a
    d2 = (signed_area(triangle.v1, moved, triangle.v3) - signed_area(triangle.v1, origin, triangle.v3)) / a
    return (d1, d2, -d1 - d2)


def _triple(coords) -> Tuple[Scalar, Scalar, Scalar]:
    if isinstance(coords, BarycentricCoords):
        return coords.as_tuple()
    t = tuple(coords)
    if len(t) != 3:
        raise ValueError(f"expected three barycentric components, got {coords!r}")
    return t


class SplitKind(str, Enum):
    CT = "ct"
    PS = "ps"


@dataclass(frozen=True)
class MicroEdge:
    """Interior edge of a split with its two adjacent micro-triangles."""

    name: str
    ends: Tuple[int, int]  # indices into SplitConfig.points
    adjacent: Tuple[int, int]  # indices into SplitConfig.micro_triangles


# Structural barycentric coordinates of the configuration points. These are
# exact rationals regardless of the backend of the underlying triangle.
_E1 = (rational(1), rational(0), rational(0))
_E2 = (rational(0), rational(1), rational(0))
_E3 = (rational(0), rational(0), rational(1))
_PC = (rational(THIRD),) * 3
_M12 = (rational(HALF), rational(HALF), rational(0))
_M23 = (rational(0), rational(HALF), rational(HALF))
_M31 = (rational(HALF), rational(0), rational(HALF))


@dataclass(frozen=True, eq=False)
class SplitConfig:
    """One macro-triangle with its fixed point configuration.

    ``points`` are ordered (p1, p2, p3, pc) for the 3-split and
    (p1, p2, p3, p12, p23, p31, pc) for the 6-split. Knot multiplicity
    vectors index into this ordering.
    """

    kind: SplitKind
    triangle: Triangle
    points: Tuple[Point2, ...]
    labels: Tuple[str, ...]
    point_bary: Tuple[Tuple[Scalar, Scalar, Scalar], ...]
    micro_triangles: Tuple[Tuple[int, int, int], ...]
    micro_edges: Tuple[MicroEdge, ...]
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @property
    def barycenter_index(self) -> int:
        return len(self.points) - 1

    def micro_area(self, index: int) -> Scalar:
        i, j, k = self.micro_triangles[index]
        return abs(signed_area(self.points[i], self.points[j], self.points[k]))

    @property
    def knot_segment_pairs(self) -> Tuple[Tuple[int, int], ...]:
        """All index pairs of configuration points; a spline over this
        configuration can only be non-smooth along these segments."""
        pairs = self._cache.get("pairs")
        if pairs is None:
            pairs = tuple(itertools.combinations(range(len(self.points)), 2))
            self._cache["pairs"] = pairs
        return pairs

    def on_knot_line(self, coords) -> bool:
        """True when the point lies on a segment joining two configuration
        points. The test is exact for rational coordinates and best-effort
        for floats."""
        a = _triple(coords)
        for i, j in self.knot_segment_pairs:
            if _on_segment(self.point_bary[i], self.point_bary[j], a):
                return True
        return False

    def pattern_pivot(self, mask: int):
        """Pivot data for the set of active configuration points in ``mask``.

        Returns ``(triple, inv_rows, inv_absdet)`` where ``triple`` holds the
        indices of the affinely independent triple with maximal area and
        ``inv_rows`` are the rows of the inverse of the matrix whose columns
        are the triple's barycentric coordinates. Degenerate patterns (fewer
        than three affinely independent points) yield ``(None, None, None)``.
        """
        data = self._cache.get(mask)
        if data is None:
            active = [i for i in range(len(self.points)) if mask >> i & 1]
            best_det = 0
            best = None
            for tri in itertools.combinations(active, 3):
                det = _det3(*(self.point_bary[i] for i in tri))
                if abs(det) > abs(best_det):
                    best_det = det
                    best = tri
            if best is None or best_det == 0:
                data = (None, None, None)
            else:
                c1, c2, c3 = (self.point_bary[i] for i in best)
                rows = (
                    _scale3(_cross3(c2, c3), 1 / best_det),
                    _scale3(_cross3(c3, c1), 1 / best_det),
                    _scale3(_cross3(c1, c2), 1 / best_det),
                )
                data = (best, rows, 1 / abs(best_det))
            self._cache[mask] = data
        return data

    @property
    def generic_direction(self) -> Tuple[Scalar, Scalar, Scalar]:
        """A fixed barycentric direction not parallel to any knot line."""
        d = self._cache.get("generic")
        if d is None:
            dirs = [
                _sub3(self.point_bary[i], self.point_bary[j])
                for i, j in self.knot_segment_pairs
            ]
            k = 1
            while True:
                q = rational(Fraction(k, 97))
                cand = (rational(1), q, rational(-1) - q)
                if all(cand[0] * v[1] - cand[1] * v[0] != 0 for v in dirs):
                    d = cand
                    break
                k += 1
            self._cache["generic"] = d
        return d

    @property
    def integration_cells(self) -> Tuple[Tuple[Tuple[Scalar, ...], ...], ...]:
        """Triangular cells on whose interiors every spline over this
        configuration restricts to a single polynomial. For the 3-split these
        are the micro-triangles; the 6-split needs each micro-triangle cut
        along the crossing mid-edge segment, giving twelve cells."""
        cells = self._cache.get("cells")
        if cells is None:
            b = self.point_bary
            if self.kind is SplitKind.CT:
                cells = tuple(
                    (b[i], b[j], b[k]) for i, j, k in self.micro_triangles
                )
            else:
                mA = _avg3(b[5], b[3])  # midpoint of <p31, p12>, lies on <p1, pc>
                mB = _avg3(b[3], b[4])  # midpoint of <p12, p23>, lies on <p2, pc>
                mC = _avg3(b[4], b[5])  # midpoint of <p23, p31>, lies on <p3, pc>
                cells = (
                    (b[0], b[3], mA), (b[3], b[6], mA),
                    (b[3], b[1], mB), (b[3], mB, b[6]),
                    (b[1], b[4], mB), (b[4], mB, b[6]),
                    (b[4], b[2], mC), (b[4], mC, b[6]),
                    (b[2], b[5], mC), (b[5], mC, b[6]),
                    (b[5], b[0], mA), (b[5], mA, b[6]),
                )
            self._cache["cells"] = cells
        return cells

    def interior_points(self, count: int, *, off_knot_lines: bool = True):
        """Deterministic rational sample points inside the macro-triangle,
        spread round-robin over the micro-triangles via a low-discrepancy
        sequence and (by default) filtered off every knot segment."""
        out = []
        m = 0
        n_micro = len(self.micro_triangles)
        while len(out) < count:
            m += 1
            u = _van_der_corput(m, 2)
            v = _van_der_corput(m, 3)
            if u == 0 or v == 0:
                continue
            corners = [self.point_bary[i] for i in self.micro_triangles[m % n_micro]]
            w1 = (1 - u) * (1 - v)
            w2 = u
            w3 = v * (1 - u)
            alpha = tuple(
                w1 * corners[0][c] + w2 * corners[1][c] + w3 * corners[2][c]
                for c in range(3)
            )
            if off_knot_lines and self.on_knot_line(alpha):
                continue
            out.append(alpha)
        return out


def make_split(triangle: Triangle, kind: Union[SplitKind, str]) -> SplitConfig:
    """Build the 3-split (``"ct"``) or uniform 6-split (``"ps"``) of a triangle."""
    kind = SplitKind(kind)
    v1, v2, v3 = triangle.vertices
    pc = triangle.barycenter
    if kind is SplitKind.CT:
        points = (v1, v2, v3, pc)
        labels = ("p1", "p2", "p3", "pc")
        bary = (_E1, _E2, _E3, _PC)
        micros = ((0, 1, 3), (1, 2, 3), (2, 0, 3))
        edge_ends = ((0, 3), (1, 3), (2, 3))
    else:
        m12 = Point2(HALF * (v1.x + v2.x), HALF * (v1.y + v2.y))
        m23 = Point2(HALF * (v2.x + v3.x), HALF * (v2.y + v3.y))
        m31 = Point2(HALF * (v3.x + v1.x), HALF * (v3.y + v1.y))
        points = (v1, v2, v3, m12, m23, m31, pc)
        labels = ("p1", "p2", "p3", "p12", "p23", "p31", "pc")
        bary = (_E1, _E2, _E3, _M12, _M23, _M31, _PC)
        micros = ((0, 3, 6), (3, 1, 6), (1, 4, 6), (4, 2, 6), (2, 5, 6), (5, 0, 6))
        edge_ends = ((0, 6), (1, 6), (2, 6), (3, 6), (4, 6), (5, 6))
    edges = []
    for i, j in edge_ends:
        adj = tuple(
            t for t, tri in enumerate(micros) if i in tri and j in tri
        )
        edges.append(MicroEdge(f"{labels[i]}-{labels[j]}", (i, j), adj))
    return SplitConfig(
        kind=kind,
        triangle=triangle,
        points=points,
        labels=labels,
        point_bary=bary,
        micro_triangles=micros,
        micro_edges=tuple(edges),
    )


def orbit_barycentric_triples(otype: int, theta=None, eta=None):
    """Barycentric node coordinates of a symmetry orbit.

    Type 0 is the barycenter; type 1 the three permutations of
    (theta, theta, 1-2*theta) with theta != 1/3; type 2 the six
    permutations of (theta, eta, 1-theta-eta) with pairwise distinct
    entries. Coordinates may be negative (nodes outside the triangle).
    """
    if otype == 0:
        return [_PC]
    if otype == 1:
        if theta is None:
            raise ValueError("type-1 orbit needs theta")
        rest = 1 - 2 * theta
        if theta == rest:
            raise ValueError("type-1 orbit with theta = 1/3 collapses to the barycenter")
        return [(theta, theta, rest), (theta, rest, theta), (rest, theta, theta)]
    if otype == 2:
        if theta is None or eta is None:
            raise ValueError("type-2 orbit needs theta and eta")
        rest = 1 - theta - eta
        if theta == eta or theta == rest or eta == rest:
            raise ValueError("type-2 orbit with repeated coordinates degenerates to a smaller type")
        return list(itertools.permutations((theta, eta, rest)))
    raise ValueError(f"unknown orbit type {otype!r}")


def expand_orbit(triangle: Triangle, orbit):
    """Expand an orbit to explicit ``(point, weight)`` pairs on ``triangle``."""
    triples = orbit_barycentric_triples(orbit.otype, orbit.theta, orbit.eta)
    return [(point_from_barycentric(triangle, t), orbit.weight) for t in triples]


# small exact helpers on barycentric triples


def _cross3(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _det3(c1, c2, c3):
    return c1[0] * (c2[1] * c3[2] - c2[2] * c3[1]) \
        - c2[0] * (c1[1] * c3[2] - c1[2] * c3[1]) \
        + c3[0] * (c1[1] * c2[2] - c1[2] * c2[1])


def _sub3(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _scale3(a, s):
    return (a[0] * s, a[1] * s, a[2] * s)


def _avg3(a, b):
    return tuple(HALF * (a[c] + b[c]) for c in range(3))


def _on_segment(p, q, x) -> bool:
    if _det3(p, q, x) != 0:
        return False
    for c in range(3):
        if p[c] != q[c]:
            t = (x[c] - p[c]) / (q[c] - p[c])
            return 0 <= t <= 1
    return False


def _van_der_corput(n: int, base: int) -> Scalar:
    num, denom = 0, 1
    while n:
        n, digit = divmod(n, base)
        num = num * base + digit
        denom *= base
    return rational(Fraction(num, denom))
