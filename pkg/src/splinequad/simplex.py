"""Normalized simplex splines over a split configuration.

A spline of degree d is identified by knot multiplicities over the
configuration points (d + 3 knots counting multiplicity). Evaluation runs
the degree-lowering recurrence down to piecewise-constant base cases,
memoizing sub-spline values per query point; the normalization makes
every spline integrate to area(T) / C(d+2, 2).

Values at points on knot lines are one-sided limits along the probe
curve  x + t*(barycenter - x) + t^2*w,  where w is a fixed direction
generic for the configuration. The recurrence itself runs in plain
scalars; only the inside/outside decisions at the piecewise-constant
base cases inspect the probe to second order, so a limit costs the same
as an ordinary evaluation and is exact in the rational backend.

Everything here is immutable or confined to a single evaluation, hence
safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

from .geometry import (
    BarycentricCoords,
    MicroEdge,
    Point2,
    SplitConfig,
    SplitKind,
    _on_segment,
    barycentric,
    barycentric_direction,
)
from .scalars import Scalar, is_exact

Query = Union[Point2, BarycentricCoords, Sequence]


@dataclass(frozen=True)
class KnotVector:
    """Multiplicity vector over the configuration points of a split.

    For the 6-split a six-entry vector is padded with an empty barycenter
    slot, so ``(4, 0, 1, 1, 0, 0)`` and ``(4, 0, 1, 1, 0, 0, 0)`` name the
    same spline.
    """

    split: SplitConfig
    mult: Tuple[int, ...]

    def __post_init__(self):
        mult = tuple(int(m) for m in self.mult)
        n = len(self.split.points)
        if self.split.kind is SplitKind.PS and len(mult) == n - 1:
            mult = mult + (0,)
        if len(mult) != n:
            raise ValueError(
                f"expected {n} multiplicities for the {self.split.kind.value} split, got {mult}"
            )
        if any(m < 0 for m in mult):
            raise ValueError(f"negative multiplicity in {mult}")
        if sum(mult) < 3:
            raise ValueError(f"need at least three knots, got {mult}")
        object.__setattr__(self, "mult", mult)

    @property
    def total(self) -> int:
        return sum(self.mult)

    @property
    def degree(self) -> int:
        return self.total - 3

    @property
    def support_mask(self) -> int:
        return _mask(self.mult)

    @property
    def is_degenerate(self) -> bool:
        """True when the knots with positive multiplicity are affinely dependent."""
        triple, _, _ = self.split.pattern_pivot(self.support_mask)
        return triple is None

    def spline(self) -> "SimplexSpline":
        d = self.degree
        norm = self.split.triangle.area * Fraction(2, (d + 2) * (d + 1))
        return SimplexSpline(self, d, norm)


@dataclass(frozen=True)
class SimplexSpline:
    """A normalized simplex spline: knots, degree, and its exact integral."""

    knots: KnotVector
    degree: int
    normalization: Scalar

    @classmethod
    def from_mult(cls, split: SplitConfig, mult) -> "SimplexSpline":
        return KnotVector(split, tuple(mult)).spline()

    def __call__(self, query: Query) -> Scalar:
        return evaluate(self, query)


@dataclass(frozen=True)
class SplineCombination:
    """A formal linear combination of splines over one configuration."""

    terms: Tuple[Tuple[Scalar, KnotVector], ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        splits = {kv.split for _, kv in self.terms}
        if len(splits) > 1:
            raise ValueError("combination terms must share one split configuration")

    @property
    def split(self) -> Optional[SplitConfig]:
        return self.terms[0][1].split if self.terms else None

    @property
    def degree(self) -> int:
        return max((kv.degree for _, kv in self.terms), default=0)

    def __call__(self, query: Query) -> Scalar:
        if not self.terms:
            return 0
        session = _session_for(self.split, _query_alpha(self.split, query))
        return session.combination(self.terms)


def _mask(mult) -> int:
    m = 0
    for i, v in enumerate(mult):
        if v:
            m |= 1 << i
    return m


def _query_alpha(split: SplitConfig, query: Query):
    if isinstance(query, Point2):
        return barycentric(split.triangle, query).as_tuple()
    if isinstance(query, BarycentricCoords):
        return query.as_tuple()
    t = tuple(query)
    if len(t) == 2:
        return barycentric(split.triangle, Point2(*t)).as_tuple()
    if len(t) == 3:
        return t
    raise ValueError(f"cannot interpret query {query!r}")


def _probe_sign(c0, c1, c2) -> int:
    """Sign of c0 + c1*t + c2*t^2 for small t > 0 (None terms are absent)."""
    if c0 != 0:
        return 1 if c0 > 0 else -1
    if c1 is not None and c1 != 0:
        return 1 if c1 > 0 else -1
    if c2 is not None and c2 != 0:
        return 1 if c2 > 0 else -1
    return 0


class _Session:
    """Evaluates multiplicity vectors at one probe point, sharing a memo."""

    __slots__ = ("split", "alpha", "dv", "dw", "memo", "_pat")

    def __init__(self, split, alpha, dv=None, dw=None):
        self.split = split
        self.alpha = alpha
        self.dv = dv
        self.dw = dw
        self.memo: Dict[tuple, Scalar] = {}
        self._pat: Dict[int, tuple] = {}

    def _pattern(self, mask):
        data = self._pat.get(mask)
        if data is None:
            triple, rows, invdet = self.split.pattern_pivot(mask)
            if triple is None:
                data = (None, None, None, None, None)
            else:
                beta0 = tuple(_dot3(r, self.alpha) for r in rows)
                betav = tuple(_dot3(r, self.dv) for r in rows) if self.dv is not None else None
                betaw = tuple(_dot3(r, self.dw) for r in rows) if self.dw is not None else None
                data = (triple, beta0, betav, betaw, invdet)
            self._pat[mask] = data
        return data

    def value(self, mult) -> Scalar:
        v = self.memo.get(mult)
        if v is not None:
            return v
        triple, beta0, betav, betaw, invdet = self._pattern(_mask(mult))
        if triple is None:
            v = 0
        elif sum(mult) == 3:
            inside = all(
                _probe_sign(
                    beta0[i],
                    betav[i] if betav is not None else None,
                    betaw[i] if betaw is not None else None,
                ) > 0
                for i in range(3)
            )
            v = invdet if inside else 0
        else:
            v = 0
            for i in range(3):
                b = beta0[i]
                if b == 0:
                    continue  # sub-splines are bounded, so a zero factor kills the term
                ci = triple[i]
                child = mult[:ci] + (mult[ci] - 1,) + mult[ci + 1:]
                v = v + b * self.value(child)
        self.memo[mult] = v
        return v

    def combination(self, terms) -> Scalar:
        total = 0
        for coef, kv in terms:
            total = total + coef * self.value(kv.mult)
        return total


def _session_for(split: SplitConfig, alpha, side=None) -> _Session:
    if side is not None:
        return _Session(split, alpha, dv=side, dw=split.generic_direction)
    if split.on_knot_line(alpha):
        pc = split.point_bary[split.barycenter_index]
        dv = (pc[0] - alpha[0], pc[1] - alpha[1], pc[2] - alpha[2])
        return _Session(split, alpha, dv=dv, dw=split.generic_direction)
    return _Session(split, alpha)


def _knots_of(s) -> KnotVector:
    if isinstance(s, SimplexSpline):
        return s.knots
    if isinstance(s, KnotVector):
        return s
    raise TypeError(f"expected a SimplexSpline or KnotVector, got {type(s).__name__}")


def evaluate(s, query: Query) -> Scalar:
    """Value of the spline at ``query``.

    ``query`` may be a Point2, barycentric coordinates, or a bare
    coordinate pair/triple. Points on knot lines evaluate to the
    deterministic one-sided limit described in the module docstring;
    splines with affinely dependent knots evaluate to zero everywhere.
    """
    kv = _knots_of(s)
    alpha = _query_alpha(kv.split, query)
    return _session_for(kv.split, alpha).value(kv.mult)


def evaluate_all(split: SplitConfig, knot_vectors: Iterable[KnotVector], query: Query):
    """Values of several splines at one point, sharing the recursion memo."""
    alpha = _query_alpha(split, query)
    session = _session_for(split, alpha)
    return [session.value(kv.mult) for kv in knot_vectors]


def _direction_triple(split: SplitConfig, direction):
    if isinstance(direction, Point2):
        du = barycentric_direction(split.triangle, direction)
    else:
        du = tuple(direction)
        if len(du) == 2:
            du = barycentric_direction(split.triangle, Point2(*du))
        elif len(du) != 3:
            raise ValueError(f"cannot interpret direction {direction!r}")
    if all(c == 0 for c in du):
        raise ValueError("direction vector must be nonzero")
    return du


def _derivative_step(split: SplitConfig, terms: Dict[tuple, Scalar], du) -> Dict[tuple, Scalar]:
    """One directional-derivative application to a mult -> coefficient map."""
    out: Dict[tuple, Scalar] = {}
    for mult, coef in terms.items():
        d = sum(mult) - 3
        if d == 0:
            continue  # piecewise constants differentiate to zero off knot lines
        triple, rows, _ = split.pattern_pivot(_mask(mult))
        if triple is None:
            continue  # degenerate support contributes nothing
        for i in range(3):
            g = _dot3(rows[i], du)
            if g == 0:
                continue
            ci = triple[i]
            child = mult[:ci] + (mult[ci] - 1,) + mult[ci + 1:]
            out[child] = out.get(child, 0) + coef * d * g
    return {m: c for m, c in out.items() if c != 0}


def derivative(s, direction, order: int = 1) -> SplineCombination:
    """Directional derivative as a combination of lower-degree splines.

    ``direction`` is a Point2 displacement or a barycentric direction
    (three components summing to zero). Applying more derivatives than
    the degree yields the empty (zero) combination.
    """
    if order < 1:
        raise ValueError("derivative order must be at least 1")
    kv = _knots_of(s)
    split = kv.split
    du = _direction_triple(split, direction)
    terms: Dict[tuple, Scalar] = {kv.mult: 1}
    for _ in range(order):
        terms = _derivative_step(split, terms, du)
    return SplineCombination(
        tuple((c, KnotVector(split, m)) for m, c in sorted(terms.items()))
    )


def knot_insert(s, y) -> SplineCombination:
    """Rewrite a spline with one extra knot at a configuration point.

    ``y`` may be a configuration-point index, its label (such as ``"pc"``),
    a Point2 coinciding with a configuration point, or its barycentric
    triple. Inserting a knot that is already present returns the identity
    combination. The coefficients sum to one and the combination equals
    the original spline pointwise.
    """
    kv = _knots_of(s)
    split = kv.split
    j = _config_index(split, y)
    if kv.mult[j] > 0:
        return SplineCombination(((1, kv),))
    triple, rows, _ = split.pattern_pivot(kv.support_mask)
    if triple is None:
        raise ValueError("cannot insert a knot into a degenerate spline")
    target = split.point_bary[j]
    terms = []
    for i in range(3):
        g = _dot3(rows[i], target)
        if g == 0:
            continue
        ci = triple[i]
        mult = list(kv.mult)
        mult[j] += 1
        mult[ci] -= 1
        terms.append((g, KnotVector(split, tuple(mult))))
    return SplineCombination(tuple(terms))


def integral(s) -> Scalar:
    """Integral over the plane, in closed form (no quadrature)."""
    kv = _knots_of(s)
    if kv.is_degenerate:
        return 0
    return kv.spline().normalization


def resolve_micro_edge(split: SplitConfig, edge) -> MicroEdge:
    """Accept a MicroEdge, its name, or its configuration-index pair."""
    if isinstance(edge, MicroEdge):
        if edge in split.micro_edges:
            return edge
        raise ValueError(f"{edge.name} is not a micro-edge of this split")
    for e in split.micro_edges:
        if edge == e.name or tuple(edge) in (e.ends, e.ends[::-1]):
            return e
    raise ValueError(f"no interior micro-edge matching {edge!r}")


def _edge_normal_direction(split: SplitConfig, edge: MicroEdge):
    """Barycentric direction normal to the edge, pointing into the first
    adjacent micro-triangle (the jump's plus side)."""
    i, j = edge.ends
    pi, pj = split.points[i], split.points[j]
    ev = pj - pi
    n = Point2(-ev.y, ev.x)
    t1, t2, t3 = (split.points[k] for k in split.micro_triangles[edge.adjacent[0]])
    # 6 * (micro centroid - edge midpoint); only the sign matters
    toward = Point2(
        2 * (t1.x + t2.x + t3.x) - 3 * (pi.x + pj.x),
        2 * (t1.y + t2.y + t3.y) - 3 * (pi.y + pj.y),
    )
    if n.x * toward.x + n.y * toward.y < 0:
        n = -n
    return barycentric_direction(split.triangle, n)


def edge_sample_coords(split: SplitConfig, edge: MicroEdge, count: int):
    """Rational points in the open edge, avoiding every other knot segment."""
    pi = split.point_bary[edge.ends[0]]
    pj = split.point_bary[edge.ends[1]]
    collinear_pairs = [
        (a, b)
        for a, b in split.knot_segment_pairs
        if _contains_both(split.point_bary[a], split.point_bary[b], pi, pj)
    ]
    crossing_pairs = [p for p in split.knot_segment_pairs if p not in collinear_pairs]
    out = []
    seen = set()
    denom = count + 1
    while len(out) < count:
        for k in range(1, denom):
            t = Fraction(k, denom)
            if t in seen:
                continue
            alpha = tuple((1 - t) * pi[c] + t * pj[c] for c in range(3))
            if any(
                _on_segment(split.point_bary[a], split.point_bary[b], alpha)
                for a, b in crossing_pairs
            ):
                continue
            seen.add(t)
            out.append(alpha)
            if len(out) == count:
                break
        denom += 1
    return out


def jump_sessions(split: SplitConfig, edge: MicroEdge, count: int):
    """Paired plus/minus side-limit sessions at ``count`` edge samples."""
    n_bary = _edge_normal_direction(split, edge)
    neg = tuple(-c for c in n_bary)
    samples = edge_sample_coords(split, edge, count)
    plus = [_session_for(split, a, side=n_bary) for a in samples]
    minus = [_session_for(split, a, side=neg) for a in samples]
    return n_bary, samples, plus, minus


def jump_order(s, edge, *, sample_count: Optional[int] = None) -> int:
    """Smoothness order of the spline across an interior micro-edge.

    Returns the largest k such that the spline is C^k across the edge:
    jumps of the normal derivatives are checked order by order at
    2*degree + 1 points of the open edge, and the first nonzero jump at
    order k gives k - 1. A spline with no jump through order ``degree``
    continues polynomially across the edge; the sentinel ``degree`` is
    returned. Discontinuous splines yield -1.
    """
    kv = _knots_of(s)
    split = kv.split
    edge = resolve_micro_edge(split, edge)
    d = kv.degree
    count = sample_count if sample_count is not None else 2 * d + 1
    n_bary, _, plus, minus = jump_sessions(split, edge, count)
    terms: Dict[tuple, Scalar] = {kv.mult: 1}
    for k in range(d + 1):
        term_items = tuple((c, KnotVector(split, m)) for m, c in terms.items())
        for sp, sm in zip(plus, minus):
            if not _jump_is_zero(sp.combination(term_items), sm.combination(term_items)):
                return k - 1
        terms = _derivative_step(split, terms, n_bary)
    return d


def _jump_is_zero(vplus, vminus) -> bool:
    diff = vplus - vminus
    if is_exact(diff):
        return diff == 0
    scale = max(abs(vplus), abs(vminus), 1.0)
    return abs(diff) <= 1e-8 * scale


def _config_index(split: SplitConfig, y) -> int:
    if isinstance(y, int) and not isinstance(y, bool):
        if 0 <= y < len(split.points):
            return y
        raise ValueError(f"configuration index {y} out of range")
    if isinstance(y, str):
        try:
            return split.labels.index(y)
        except ValueError:
            raise ValueError(f"no configuration point labelled {y!r}") from None
    if isinstance(y, Point2):
        alpha = barycentric(split.triangle, y).as_tuple()
    else:
        alpha = _query_alpha(split, y)
    for idx, b in enumerate(split.point_bary):
        if all(b[c] == alpha[c] for c in range(3)):
            return idx
    raise ValueError(
        "knot insertion is only supported at the configuration points of the split"
    )


def _dot3(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _contains_both(a, b, p, q) -> bool:
    return _on_segment(a, b, p) and _on_segment(a, b, q)
