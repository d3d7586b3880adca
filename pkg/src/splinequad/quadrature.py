"""Symmetric quadrature rules on a triangle, stored as permutation orbits.

A rule keeps its nodes as orbit parameters (type 0: barycenter, type 1:
permutations of (theta, theta, 1-2*theta), type 2: permutations of
(theta, eta, 1-theta-eta)), so permutation symmetry holds by
construction. Weights are relative to the triangle area:

    rule value = area(T) * sum_i w_i * f(t_i).

Rules are immutable after construction and application is pure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .exactlinalg import InconsistentSystemError, RankTracker, solve_linear
from .geometry import Point2, Triangle, expand_orbit, orbit_barycentric_triples
from .scalars import Scalar, rational


class RuleInfeasibleError(ValueError):
    """No weights make the requested nodes exact for the target degree."""


@dataclass(frozen=True)
class Orbit:
    """One symmetry orbit of quadrature nodes with a shared weight."""

    otype: int
    weight: Scalar
    theta: Optional[Scalar] = None
    eta: Optional[Scalar] = None

    def __post_init__(self):
        orbit_barycentric_triples(self.otype, self.theta, self.eta)  # validates parameters

    @property
    def size(self) -> int:
        return (1, 3, 6)[self.otype]

    def barycentric_nodes(self):
        return orbit_barycentric_triples(self.otype, self.theta, self.eta)


@dataclass(frozen=True)
class QuadratureRule:
    """A symmetric rule with a claimed polynomial exactness degree.

    ``certified`` is stamped by ``verify.certify`` once a polynomial
    exactness check has passed.
    """

    degree: int
    orbits: Tuple[Orbit, ...]
    name: Optional[str] = None
    certified: bool = False

    def __post_init__(self):
        object.__setattr__(self, "orbits", tuple(self.orbits))
        if sum(1 for o in self.orbits if o.otype == 0) > 1:
            raise ValueError("a symmetric rule admits at most one barycenter orbit")

    @property
    def orbit_signature(self) -> Tuple[int, int, int]:
        sig = [0, 0, 0]
        for o in self.orbits:
            sig[o.otype] += 1
        return tuple(sig)

    @property
    def node_count(self) -> int:
        return sum(o.size for o in self.orbits)

    def barycentric_nodes(self) -> List[Tuple[tuple, Scalar]]:
        out = []
        for o in self.orbits:
            w = o.weight
            out.extend((trip, w) for trip in o.barycentric_nodes())
        return out

    def nodes(self, triangle: Triangle) -> List[Tuple[Point2, Scalar]]:
        out = []
        for o in self.orbits:
            out.extend(expand_orbit(triangle, o))
        return out

    @property
    def has_exterior_nodes(self) -> bool:
        return any(
            c < 0 for trip, _ in self.barycentric_nodes() for c in trip
        )

    @property
    def has_negative_weights(self) -> bool:
        return any(o.weight < 0 for o in self.orbits)

    @property
    def id_string(self) -> str:
        n0, n1, n2 = self.orbit_signature
        base = f"[{n0},{n1},{n2}] degree {self.degree}"
        return f"{self.name} ({base})" if self.name else base


def apply(rule: QuadratureRule, triangle: Triangle, f) -> Scalar:
    """Apply the rule to a function of Point2 on the given triangle."""
    acc = 0
    for point, weight in rule.nodes(triangle):
        acc = acc + weight * f(point)
    return triangle.area * acc


def hammer_stroud(kind: str) -> QuadratureRule:
    """The classical 3-node quadratic and 4-node cubic triangle rules."""
    if kind == "quadratic":
        return QuadratureRule(
            degree=2,
            orbits=(Orbit(1, rational("1/3"), theta=rational("1/6")),),
            name="hs-quadratic",
        )
    if kind == "cubic":
        return QuadratureRule(
            degree=3,
            orbits=(
                Orbit(0, rational("-9/16")),
                Orbit(1, rational("25/48"), theta=rational("1/5")),
            ),
            name="hs-cubic",
        )
    raise ValueError(f"unknown Hammer-Stroud rule {kind!r}; use 'quadratic' or 'cubic'")


def builtin_rule(name: str) -> QuadratureRule:
    if name in ("hs-quadratic", "hs-cubic"):
        return hammer_stroud(name.split("-", 1)[1])
    raise ValueError(f"unknown builtin rule {name!r}")


def partitions_into_three(total: int) -> List[Tuple[int, int, int]]:
    """Partitions of ``total`` into at most three parts, descending."""
    out = []
    for a in range(total, -1, -1):
        for b in range(min(a, total - a), -1, -1):
            c = total - a - b
            if c <= b:
                out.append((a, b, c))
    return out


def _symmetrized_monomial(partition, alpha) -> Scalar:
    """Sum of alpha^mu over the distinct permutations mu of the partition."""
    acc = 0
    for mu in set(itertools.permutations(partition)):
        acc = acc + alpha[0] ** mu[0] * alpha[1] ** mu[1] * alpha[2] ** mu[2]
    return acc


def _orbit_spec(entry) -> Tuple[int, Optional[Scalar], Optional[Scalar]]:
    if isinstance(entry, Orbit):
        return (entry.otype, entry.theta, entry.eta)
    t = tuple(entry)
    otype = t[0]
    theta = t[1] if len(t) > 1 else None
    eta = t[2] if len(t) > 2 else None
    return (otype, theta, eta)


def fit_weights(node_specs: Iterable, degree: int) -> QuadratureRule:
    """Solve for orbit weights matching every moment of P_degree.

    ``node_specs`` holds orbits without meaningful weights: Orbit objects
    or ``(otype[, theta[, eta]])`` tuples. Exactness on all polynomials up
    to ``degree`` for a symmetric rule reduces to one constraint per
    partition of ``degree`` into at most three parts, over the
    homogeneous symmetrized monomials of that degree. The exact solution
    has free weights set to zero; inconsistent systems raise
    :class:`RuleInfeasibleError` with the rank defect.
    """
    specs = [_orbit_spec(e) for e in node_specs]
    node_sets = [orbit_barycentric_triples(*s) for s in specs]
    seen = set()
    for nodes in node_sets:
        key = tuple(sorted(nodes[0]))
        if key in seen:
            raise ValueError(f"duplicate orbit with coordinates {key}")
        seen.add(key)
    parts = partitions_into_three(degree)
    matrix = [
        [sum(_symmetrized_monomial(p, trip) for trip in nodes) for nodes in node_sets]
        for p in parts
    ]
    rhs = [
        len(set(itertools.permutations(p))) * _unit_moment(*p)
        for p in parts
    ]
    try:
        weights, rank = solve_linear(matrix, rhs)
    except InconsistentSystemError as exc:
        from .exactlinalg import matrix_rank

        rank = matrix_rank(matrix)
        raise RuleInfeasibleError(
            f"no symmetric rule of degree {degree} on these {len(specs)} orbits: "
            f"moment system has rank {rank} of {len(parts)} constraints, "
            f"first unsatisfied residual {exc.residual}"
        ) from exc
    orbits = tuple(
        Orbit(otype, rational(w), theta=theta, eta=eta)
        for (otype, theta, eta), w in zip(specs, weights)
    )
    return QuadratureRule(degree=degree, orbits=orbits, name=f"fit-p{degree}")


def _unit_moment(a: int, b: int, c: int):
    # integral of a1^a a2^b a3^c over the triangle, divided by its area
    from .verify import poly_moment_unit

    return poly_moment_unit(a, b, c)


def _odd_prime_denominators():
    n = 5
    while True:
        if n % 3 != 0 and all(n % p for p in range(2, int(n ** 0.5) + 1)):
            yield n
        n += 2


def _type2_candidates():
    # interior nodes with pairwise distinct coordinates, never exactly 1/2,
    # canonical under permutation of the coordinate set
    for den in _odd_prime_denominators():
        for p in range(1, den):
            for q in range(p + 1, den - p):
                rest = den - p - q
                if rest <= q:
                    continue
                yield (2, rational(Fraction(p, den)), rational(Fraction(q, den)))


def _type1_candidates():
    for den in _odd_prime_denominators():
        for p in range(1, (den - 1) // 2 + 1):
            yield (1, rational(Fraction(p, den)), None)


def default_node_template(degree: int, variant: int = 0) -> Tuple[tuple, ...]:
    """Deterministic node families whose moment systems are nonsingular.

    Variant 0 uses type-2 orbits only, keeping every node strictly inside
    the micro-triangles of both splits (off all knot lines). Variant 1
    mixes in the barycenter and type-1 orbits, whose nodes sit on the
    medians. Candidates are accepted greedily while they enlarge the rank
    of the moment system, so the final square system is invertible.
    """
    if variant not in (0, 1):
        raise ValueError(f"unknown template variant {variant}")
    parts = partitions_into_three(degree)
    needed = len(parts)
    if variant == 0:
        candidates = _type2_candidates()
    else:
        candidates = itertools.chain(
            [(0, None, None)],
            itertools.islice(_type1_candidates(), 3),
            _type2_candidates(),
        )
    tracker = RankTracker()
    chosen = []
    for spec in candidates:
        nodes = orbit_barycentric_triples(*spec)
        column = [sum(_symmetrized_monomial(p, trip) for trip in nodes) for p in parts]
        if tracker.try_add(column):
            chosen.append(spec)
            if len(chosen) == needed:
                return tuple(chosen)
    raise RuleInfeasibleError(
        f"could not assemble a rank-{needed} node template for degree {degree}"
    )
