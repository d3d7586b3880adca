"""Ground-truth integration oracles and the exactness engine.

Two independent integration routes exist for every spline: the closed
form (the normalization) and micro-cell quadrature with a certified
polynomial rule (:func:`oracle_integrate`). Exactness checks compare a
quadrature rule against the polynomial moments or against a whole
spline-space basis, reporting per-element deviations.

Per-element checks are independent; reports are always assembled in
basis order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .geometry import (
    MicroEdge,
    Point2,
    SplitConfig,
    SplitKind,
    Triangle,
    make_split,
    _det3,
)
from .quadrature import QuadratureRule, default_node_template, fit_weights, hammer_stroud
from .scalars import Scalar, is_exact, rational
from .simplex import (
    KnotVector,
    SimplexSpline,
    SplineCombination,
    _derivative_step,
    _jump_is_zero,
    evaluate_all,
    integral,
    jump_sessions,
    resolve_micro_edge,
)
from .spaces import SplineSpaceBasis

#: Float-backend thresholds, relative to the triangle area. Deviations in
#: the band between them are reported as inconclusive: rerun exactly.
EXACT_REL_TOL = 1e-12
INCONCLUSIVE_REL_TOL = 1e-8


class NodeOnKnotLineError(ValueError):
    """Rule nodes coincide with knot lines of the split.

    Spline values there follow the deterministic one-sided limit
    convention; pass ``allow_nodes_on_knot_lines=True`` to acknowledge it.
    """


@dataclass(frozen=True)
class ExactnessRecord:
    """One compared integral: a knot vector or a monomial exponent triple."""

    subject: Union[KnotVector, Tuple[int, int, int]]
    rule_value: Scalar
    true_value: Scalar
    deviation: Scalar


@dataclass(frozen=True)
class ExactnessReport:
    rule_id: str
    target: str
    records: Tuple[ExactnessRecord, ...]
    max_abs_deviation: Scalar
    verdict: str  # 'exact' | 'not-exact' | 'inconclusive'

    @property
    def is_exact(self) -> bool:
        return self.verdict == "exact"


def _verdict(max_dev, area, exact_backend: bool) -> str:
    if exact_backend:
        return "exact" if max_dev == 0 else "not-exact"
    scale = abs(float(area))
    dev = abs(float(max_dev))
    if dev <= EXACT_REL_TOL * scale:
        return "exact"
    if dev <= INCONCLUSIVE_REL_TOL * scale:
        return "inconclusive"
    return "not-exact"


def _make_report(rule_id, target, records, area) -> ExactnessReport:
    max_dev = 0
    exact_backend = True
    for rec in records:
        if abs(rec.deviation) > abs(max_dev):
            max_dev = abs(rec.deviation)
        if not is_exact(rec.deviation):
            exact_backend = False
    return ExactnessReport(
        rule_id=rule_id,
        target=target,
        records=tuple(records),
        max_abs_deviation=max_dev,
        verdict=_verdict(max_dev, area, exact_backend),
    )


def poly_moment_unit(a: int, b: int, c: int) -> Fraction:
    """Integral of a1^a a2^b a3^c over a triangle, divided by its area."""
    num = 2 * math.factorial(a) * math.factorial(b) * math.factorial(c)
    return rational(Fraction(num, math.factorial(a + b + c + 2)))


def poly_moment(a: int, b: int, c: int, triangle: Triangle) -> Scalar:
    """Closed-form barycentric monomial moment over the triangle."""
    return triangle.area * poly_moment_unit(a, b, c)


def monomials_up_to(degree: int):
    """Exponent triples of total degree <= degree, graded lexicographic."""
    out = []
    for total in range(degree + 1):
        for a in range(total, -1, -1):
            for b in range(total - a, -1, -1):
                out.append((a, b, total - a - b))
    return out


def check_poly_exactness(rule: QuadratureRule, degree: int, triangle: Triangle) -> ExactnessReport:
    """Compare the rule against every monomial moment up to ``degree``."""
    nodes = rule.barycentric_nodes()
    records = []
    area = triangle.area
    for (a, b, c) in monomials_up_to(degree):
        acc = 0
        for trip, w in nodes:
            acc = acc + w * trip[0] ** a * trip[1] ** b * trip[2] ** c
        rule_value = area * acc
        true_value = poly_moment(a, b, c, triangle)
        records.append(
            ExactnessRecord((a, b, c), rule_value, true_value, rule_value - true_value)
        )
    return _make_report(rule.id_string, f"P_{degree}", records, area)


def certify(rule: QuadratureRule, triangle: Optional[Triangle] = None) -> QuadratureRule:
    """Stamp the rule as certified after a polynomial exactness check.

    Polynomial exactness is affine invariant, so the reference triangle
    suffices when none is given. Raises ValueError when the check fails.
    """
    t = triangle if triangle is not None else _reference_triangle()
    report = check_poly_exactness(rule, rule.degree, t)
    if report.verdict != "exact":
        raise ValueError(
            f"rule {rule.id_string} is not exact on P_{rule.degree}: "
            f"max deviation {report.max_abs_deviation}"
        )
    return replace(rule, certified=True)


def _reference_triangle() -> Triangle:
    z, o = rational(0), rational(1)
    return Triangle(Point2(z, z), Point2(o, z), Point2(z, o))


_ORACLE_RULES: Dict[int, QuadratureRule] = {}


def _oracle_rule(degree: int) -> QuadratureRule:
    rule = _ORACLE_RULES.get(degree)
    if rule is None:
        rule = certify(fit_weights(default_node_template(degree), degree))
        _ORACLE_RULES[degree] = rule
    return rule


def _combination_terms(s):
    if isinstance(s, SplineCombination):
        return s.split, tuple(s.terms), s.degree
    kv = s.knots if isinstance(s, SimplexSpline) else s
    return kv.split, ((1, kv),), kv.degree


def oracle_integrate(s) -> Scalar:
    """Integrate a spline (or combination) by micro-cell quadrature.

    Every spline over a split restricts to a single polynomial on each
    integration cell, so a certified rule of the spline's degree is exact
    cell by cell. This route never consults the closed-form integral.
    """
    split, terms, degree = _combination_terms(s)
    if not terms:
        return 0
    kvs = [kv for _, kv in terms]
    sums = _oracle_sums(split, kvs, degree)
    acc = 0
    for (coef, _), v in zip(terms, sums):
        acc = acc + coef * v
    return acc


def oracle_integrate_elements(split: SplitConfig, elements: Sequence[KnotVector]) -> List[Scalar]:
    """Oracle integrals of several splines, sharing node evaluations."""
    if not elements:
        return []
    degree = max(kv.degree for kv in elements)
    return _oracle_sums(split, list(elements), degree)


def _oracle_sums(split, kvs, degree):
    rule = _oracle_rule(degree)
    ref_nodes = rule.barycentric_nodes()
    acc = [0] * len(kvs)
    for cell in split.integration_cells:
        scale = abs(_det3(*cell))  # cell area / triangle area
        for trip, w in ref_nodes:
            point = tuple(
                trip[0] * cell[0][c] + trip[1] * cell[1][c] + trip[2] * cell[2][c]
                for c in range(3)
            )
            ws = w * scale
            values = evaluate_all(split, kvs, point)
            for i, v in enumerate(values):
                if v:
                    acc[i] = acc[i] + ws * v
    area = split.triangle.area
    return [area * a for a in acc]


def _nodes_for_split(rule: QuadratureRule, split: SplitConfig, allow: bool):
    nodes = rule.barycentric_nodes()
    if not allow:
        hits = sum(1 for trip, _ in nodes if split.on_knot_line(trip))
        if hits:
            raise NodeOnKnotLineError(
                f"{hits} of {len(nodes)} rule nodes lie on knot lines of the "
                f"{split.kind.value} split; pass allow_nodes_on_knot_lines=True "
                "to evaluate them as one-sided limits"
            )
    return nodes


def check_space_exactness(
    rule: QuadratureRule,
    basis: SplineSpaceBasis,
    triangle: Optional[Triangle] = None,
    *,
    allow_nodes_on_knot_lines: bool = False,
) -> ExactnessReport:
    """Rule value versus true integral for every basis element."""
    split = basis.split
    if triangle is not None and triangle is not split.triangle:
        raise ValueError("basis was built over a different triangle")
    nodes = _nodes_for_split(rule, split, allow_nodes_on_knot_lines)
    area = split.triangle.area
    sums = [0] * len(basis.elements)
    for trip, w in nodes:
        values = evaluate_all(split, basis.elements, trip)
        for i, v in enumerate(values):
            if v:
                sums[i] = sums[i] + w * v
    records = []
    for kv, s in zip(basis.elements, sums):
        rule_value = area * s
        true_value = integral(kv)
        records.append(ExactnessRecord(kv, rule_value, true_value, rule_value - true_value))
    return _make_report(rule.id_string, basis.descriptor.label, records, area)


def check_element_exactness(
    rule: QuadratureRule,
    element: KnotVector,
    *,
    allow_nodes_on_knot_lines: bool = False,
    target: Optional[str] = None,
) -> ExactnessReport:
    """Rule value versus true integral for a single spline."""
    split = element.split
    nodes = _nodes_for_split(rule, split, allow_nodes_on_knot_lines)
    area = split.triangle.area
    acc = 0
    for trip, w in nodes:
        (v,) = evaluate_all(split, [element], trip)
        if v:
            acc = acc + w * v
    rule_value = area * acc
    true_value = integral(element)
    record = ExactnessRecord(element, rule_value, true_value, rule_value - true_value)
    label = target if target is not None else f"single element, degree {element.degree}"
    return _make_report(rule.id_string, label, [record], area)


def counterexample_suite(triangle: Triangle) -> List[ExactnessReport]:
    """The three negative controls: low-smoothness splines on which the
    classical rules miss the true integral.

    (i)  the cubic rule on the 3-split spline (3,2,0,1), which vanishes on
         all micro-edges, so the rule returns zero;
    (ii) the quadratic rule on the 6-split spline (2,0,1,2,0,0);
    (iii) the cubic rule on the 6-split spline (4,0,1,1,0,0), the odd-degree
         obstruction.
    """
    ct = make_split(triangle, SplitKind.CT)
    ps = make_split(triangle, SplitKind.PS)
    cases = [
        (hammer_stroud("cubic"), KnotVector(ct, (3, 2, 0, 1)), "S^0_3(ct)"),
        (hammer_stroud("quadratic"), KnotVector(ps, (2, 0, 1, 2, 0, 0)), "S^0_2(ps)"),
        (hammer_stroud("cubic"), KnotVector(ps, (4, 0, 1, 1, 0, 0)), "S^2_3(ps)"),
    ]
    return [
        check_element_exactness(rule, kv, allow_nodes_on_knot_lines=True, target=target)
        for rule, kv, target in cases
    ]


@dataclass(frozen=True)
class SmoothnessRow:
    element: KnotVector
    edge: MicroEdge
    order: int
    ok: bool


@dataclass(frozen=True)
class SmoothnessReport:
    target: str
    required_order: int
    rows: Tuple[SmoothnessRow, ...]

    @property
    def flagged(self) -> Tuple[SmoothnessRow, ...]:
        return tuple(r for r in self.rows if not r.ok)


def smoothness_report(basis: SplineSpaceBasis) -> SmoothnessReport:
    """Jump order of every basis element across every interior micro-edge.

    Elements below the space's required smoothness are flagged. Side
    limits for one edge share their evaluation memo across all elements
    and derivative orders.
    """
    split = basis.split
    d = basis.descriptor.degree
    required = basis.descriptor.smoothness
    orders: Dict[Tuple[int, int], int] = {}
    for ei, edge in enumerate(split.micro_edges):
        n_bary, _, plus, minus = jump_sessions(split, edge, 2 * d + 1)
        for ki, kv in enumerate(basis.elements):
            orders[(ki, ei)] = _jump_order_shared(split, kv.mult, d, n_bary, plus, minus)
    rows = []
    for ki, kv in enumerate(basis.elements):
        for ei, edge in enumerate(split.micro_edges):
            order = orders[(ki, ei)]
            rows.append(SmoothnessRow(kv, edge, order, order >= required))
    return SmoothnessReport(basis.descriptor.label, required, tuple(rows))


def _jump_order_shared(split, mult, degree, n_bary, plus, minus) -> int:
    terms = {mult: 1}
    for k in range(degree + 1):
        items = tuple(terms.items())
        for sp, sm in zip(plus, minus):
            jp = 0
            jm = 0
            for m, c in items:
                jp = jp + c * sp.value(m)
                jm = jm + c * sm.value(m)
            if not _jump_is_zero(jp, jm):
                return k - 1
        terms = _derivative_step(split, terms, n_bary)
    return degree
