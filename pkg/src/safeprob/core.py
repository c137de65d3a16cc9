"""Exact finite probability substrate.

Outcome spaces, random variables, probability mass functions, credal sets
(finite vertex lists or constraint polytopes) and conditioning, all in
exact rational arithmetic. Every object is immutable after construction
and every operation is a pure function, so concurrent readers are safe.

Probabilities are `fractions.Fraction` throughout; nothing in this module
ever rounds.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Union

from ._linalg import UNIQUE, matrix_rank, solve_linear
from .errors import (
    InfeasibleCredalSet,
    NonNumericTarget,
    SizeLimit,
    ValidationError,
    ZeroProbabilityConditioning,
)

Rational = Fraction

# A random variable value is either a numeric vector (tuple of rationals)
# or an opaque symbol. Derived generalized variables may carry other
# hashable values (pairs, encoded distributions); see Rv.generalized.
NumericValue = tuple[Fraction, ...]
Value = Union[NumericValue, str]

DEFAULT_SIZE_LIMIT = 16
_SIZE_LIMIT_ENV = "SAFEPROB_SIZE_LIMIT"


def size_limit() -> int:
    """Atom cap for exact enumeration; overridable via SAFEPROB_SIZE_LIMIT."""
    raw = os.environ.get(_SIZE_LIMIT_ENV)
    if raw is None:
        return DEFAULT_SIZE_LIMIT
    try:
        return int(raw)
    except ValueError as exc:
        raise ValidationError(f"{_SIZE_LIMIT_ENV} must be an integer, got {raw!r}") from exc


def as_rational(x) -> Fraction:
    """Exact conversion of ints, Fractions and 'p/q'/decimal strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ValidationError(f"boolean is not a rational value: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"not a rational literal: {x!r}") from exc
    raise ValidationError(f"not an exact rational: {x!r} (floats are rejected)")


def as_value(x) -> Value:
    """Coerce a python object to a random-variable value.

    Ints, Fractions and numeric strings become 1-dimensional numeric
    values; sequences of those become numeric vectors; any other string
    is an opaque symbol.
    """
    if isinstance(x, str):
        try:
            return (Fraction(x),)
        except (ValueError, ZeroDivisionError):
            return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return (Fraction(x),)
    if isinstance(x, (tuple, list)):
        return tuple(as_rational(c) for c in x)
    raise ValidationError(f"cannot interpret {x!r} as a random-variable value")


def value_sort_key(value):
    """Total order usable across the value kinds produced in this package."""
    if isinstance(value, str):
        return (1, value)
    if isinstance(value, tuple):
        return (0, tuple(value_sort_key(c) for c in value))
    return (2, value)


def format_value(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, tuple) and all(isinstance(c, Fraction) for c in value):
        if len(value) == 1:
            return str(value[0])
        return "(" + ",".join(str(c) for c in value) + ")"
    return repr(value)


@dataclass(frozen=True)
class OutcomeSpace:
    """Finite ordered set of atomic outcomes.

    The atom order is fixed and used for tie-breaking and for the
    deterministic ordering of enumerated vertices.
    """

    atoms: tuple[str, ...]

    def __init__(self, atoms: Iterable[str]):
        atoms = tuple(atoms)
        if not atoms:
            raise ValidationError("outcome space must be non-empty")
        if len(set(atoms)) != len(atoms):
            raise ValidationError("atom identifiers must be unique")
        object.__setattr__(self, "atoms", atoms)

    def index(self, atom: str) -> int:
        return self.atoms.index(atom)

    def __len__(self) -> int:
        return len(self.atoms)


@dataclass(frozen=True)
class Rv:
    """A total labelling of atoms with values.

    Numeric variables carry rational vectors and support expectations;
    generalized variables (built with :meth:`generalized`) may carry any
    hashable values and support everything else.
    """

    space: OutcomeSpace
    name: str
    table: Mapping[str, Value]

    def __init__(self, space: OutcomeSpace, name: str, table: Mapping):
        coerced = {atom: as_value(v) for atom, v in table.items()}
        self._init_checked(space, name, coerced)

    def _init_checked(self, space, name, table):
        missing = set(space.atoms) - set(table)
        extra = set(table) - set(space.atoms)
        if missing or extra:
            raise ValidationError(
                f"rv {name!r} must be total over the outcome space "
                f"(missing {sorted(missing)}, extra {sorted(extra)})"
            )
        kinds = {isinstance(v, str) for v in table.values()}
        if kinds == {True, False}:
            raise ValidationError(f"rv {name!r} mixes numeric and symbol values")
        arities = {len(v) for v in table.values() if isinstance(v, tuple)}
        if len(arities) > 1:
            raise ValidationError(f"rv {name!r} mixes numeric arities {sorted(arities)}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "table", MappingProxyType(dict(table)))

    @classmethod
    def generalized(cls, space: OutcomeSpace, name: str, table: Mapping) -> "Rv":
        """Build a generalized variable without value coercion checks."""
        rv = object.__new__(cls)
        missing = set(space.atoms) - set(table)
        if missing:
            raise ValidationError(f"rv {name!r} missing atoms {sorted(missing)}")
        object.__setattr__(rv, "space", space)
        object.__setattr__(rv, "name", name)
        object.__setattr__(rv, "table", MappingProxyType(dict(table)))
        return rv

    @classmethod
    def constant(cls, space: OutcomeSpace, name: str = "0", value=0) -> "Rv":
        return cls(space, name, {z: value for z in space.atoms})

    @classmethod
    def indicator(cls, space: OutcomeSpace, name: str, event: Iterable[str]) -> "Rv":
        event = set(event)
        return cls(space, name, {z: 1 if z in event else 0 for z in space.atoms})

    def __call__(self, atom: str):
        return self.table[atom]

    @property
    def is_numeric(self) -> bool:
        return all(isinstance(v, tuple) and all(isinstance(c, Fraction) for c in v)
                   for v in self.table.values())

    def range(self) -> list:
        """Distinct values in canonical order."""
        return sorted(set(self.table.values()), key=value_sort_key)

    def range_given(self, other: "Rv", other_value) -> list:
        """Values of self on atoms where ``other`` takes ``other_value``."""
        vals = {self.table[z] for z in self.space.atoms if other.table[z] == other_value}
        return sorted(vals, key=value_sort_key)

    def compose(self, name: str, func) -> "Rv":
        """The coarsening obtained by applying ``func`` to every value."""
        return Rv.generalized(self.space, name, {z: func(v) for z, v in self.table.items()})

    def __repr__(self) -> str:
        return f"Rv({self.name!r})"


def joint_rv(*rvs: Rv, name: Optional[str] = None) -> Rv:
    """Pair (tuple) of variables as one generalized variable."""
    space = rvs[0].space
    label = name or "(" + ",".join(r.name for r in rvs) + ")"
    table = {z: tuple(r.table[z] for r in rvs) for z in space.atoms}
    return Rv.generalized(space, label, table)


@dataclass(frozen=True)
class Pmf:
    """Exact probability mass function over the atoms of a space."""

    space: OutcomeSpace
    weights: Mapping[str, Fraction]

    def __init__(self, space: OutcomeSpace, weights: Mapping[str, Fraction]):
        filled = {}
        for atom in space.atoms:
            w = as_rational(weights.get(atom, 0))
            if w < 0:
                raise ValidationError(f"negative weight {w} at atom {atom!r}")
            filled[atom] = w
        extra = set(weights) - set(space.atoms)
        if extra:
            raise ValidationError(f"weights mention unknown atoms {sorted(extra)}")
        total = sum(filled.values())
        if total != 1:
            raise ValidationError(f"weights sum to {total}, expected exactly 1")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "weights", MappingProxyType(filled))

    @classmethod
    def point_mass(cls, space: OutcomeSpace, atom: str) -> "Pmf":
        return cls(space, {atom: Fraction(1)})

    @classmethod
    def uniform(cls, space: OutcomeSpace) -> "Pmf":
        n = len(space.atoms)
        return cls(space, {z: Fraction(1, n) for z in space.atoms})

    @classmethod
    def normalized(cls, space: OutcomeSpace, weights: Mapping) -> "Pmf":
        """Build from nonnegative weights, rescaling to total mass one."""
        ws = {z: as_rational(w) for z, w in weights.items()}
        total = sum(ws.values())
        if total <= 0:
            raise ValidationError("total weight must be positive")
        return cls(space, {z: w / total for z, w in ws.items()})

    def __call__(self, atom: str) -> Fraction:
        return self.weights[atom]

    def as_tuple(self) -> tuple[Fraction, ...]:
        return tuple(self.weights[z] for z in self.space.atoms)

    def prob(self, rv: Rv, value) -> Fraction:
        """P(rv = value)."""
        return sum(
            (self.weights[z] for z in self.space.atoms if rv.table[z] == value),
            start=Fraction(0),
        )

    def prob_event(self, atoms: Iterable[str]) -> Fraction:
        return sum((self.weights[z] for z in atoms), start=Fraction(0))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Pmf)
            and self.space.atoms == other.space.atoms
            and self.as_tuple() == other.as_tuple()
        )

    def __hash__(self) -> int:
        return hash((self.space.atoms, self.as_tuple()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{z}: {w}" for z, w in self.weights.items() if w)
        return f"Pmf({inner})"


def mix(p: Pmf, q: Pmf, weight: Fraction) -> Pmf:
    """Convex combination ``weight * p + (1 - weight) * q``."""
    w = as_rational(weight)
    return Pmf(p.space, {z: w * p.weights[z] + (1 - w) * q.weights[z] for z in p.space.atoms})


@dataclass(frozen=True)
class LinearConstraint:
    """Linear (in)equality over atom probabilities: sum coeffs[z]*P(z) rel rhs."""

    coeffs: Mapping[str, Fraction]
    relation: str
    rhs: Fraction

    def __init__(self, coeffs: Mapping, relation: str, rhs):
        coeffs = {z: as_rational(c) for z, c in coeffs.items()}
        if not any(coeffs.values()):
            raise ValidationError("constraint needs at least one nonzero coefficient")
        if relation not in ("=", "<=", ">="):
            raise ValidationError(f"relation must be '=', '<=' or '>=', got {relation!r}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "relation", relation)
        object.__setattr__(self, "rhs", as_rational(rhs))

    def satisfied_by(self, p: Pmf) -> bool:
        lhs = sum(
            (c * p.weights[z] for z, c in self.coeffs.items()),
            start=Fraction(0),
        )
        if self.relation == "=":
            return lhs == self.rhs
        if self.relation == "<=":
            return lhs <= self.rhs
        return lhs >= self.rhs


@dataclass(frozen=True)
class CredalSet:
    """Set of candidate truths: explicit vertices or a constraint polytope.

    Polytope form implicitly includes the simplex constraints
    (nonnegativity and total mass one).
    """

    space: OutcomeSpace
    vertices: Optional[tuple[Pmf, ...]] = None
    constraints: Optional[tuple[LinearConstraint, ...]] = None

    def __post_init__(self):
        if (self.vertices is None) == (self.constraints is None):
            raise ValidationError("credal set needs either vertices or constraints")
        if self.vertices is not None:
            if not self.vertices:
                raise ValidationError("vertex form must be non-empty")
            if len(set(self.vertices)) != len(self.vertices):
                raise ValidationError("vertex form must list distinct vertices")

    @classmethod
    def from_vertices(cls, vertices: Iterable[Pmf]) -> "CredalSet":
        vertices = tuple(vertices)
        return cls(vertices[0].space, vertices=vertices)

    @classmethod
    def from_constraints(
        cls, space: OutcomeSpace, constraints: Iterable[LinearConstraint]
    ) -> "CredalSet":
        return cls(space, constraints=tuple(constraints))

    def vertex_list(self) -> tuple[Pmf, ...]:
        """Extreme points, in deterministic order; enumerates once and
        caches for constraint form."""
        if self.vertices is not None:
            return self.vertices
        cached = getattr(self, "_vertex_cache", None)
        if cached is None:
            cached = tuple(enumerate_vertices(list(self.constraints), self.space))
            object.__setattr__(self, "_vertex_cache", cached)
        return cached


def enumerate_vertices(
    constraints: list[LinearConstraint], space: OutcomeSpace
) -> list[Pmf]:
    """Exact extreme points of the constrained probability simplex.

    Enumerates constraint bases: the simplex equality and every user
    equality are always tight; the remaining tight rows are chosen among
    nonnegativity facets and user inequalities. Each rational linear
    system with a unique solution that satisfies every constraint yields
    a candidate vertex; candidates are deduplicated and returned in
    descending lexicographic order of their weight vectors (atom order).

    Raises InfeasibleCredalSet when the polytope is empty and SizeLimit
    when the space exceeds the configured atom cap.
    """
    n = len(space.atoms)
    cap = size_limit()
    if n > cap:
        raise SizeLimit(f"{n} atoms exceeds the cap of {cap} (set {_SIZE_LIMIT_ENV})")
    index = {z: i for i, z in enumerate(space.atoms)}

    def row_of(c: LinearConstraint) -> list[Fraction]:
        row = [Fraction(0)] * n
        for z, coef in c.coeffs.items():
            if z not in index:
                raise ValidationError(f"constraint mentions unknown atom {z!r}")
            row[index[z]] = coef
        return row

    eq_rows = [[Fraction(1)] * n]
    eq_rhs = [Fraction(1)]
    tight_candidates: list[tuple[list[Fraction], Fraction]] = []
    for c in constraints:
        if c.relation == "=":
            eq_rows.append(row_of(c))
            eq_rhs.append(c.rhs)
        else:
            tight_candidates.append((row_of(c), c.rhs))
    for i in range(n):
        facet = [Fraction(0)] * n
        facet[i] = Fraction(1)
        tight_candidates.append((facet, Fraction(0)))

    r = matrix_rank(eq_rows)
    k = n - r
    found: set[tuple[Fraction, ...]] = set()
    for chosen in itertools.combinations(range(len(tight_candidates)), k):
        rows = eq_rows + [tight_candidates[i][0] for i in chosen]
        rhs = eq_rhs + [tight_candidates[i][1] for i in chosen]
        status, x = solve_linear(rows, rhs)
        if status != UNIQUE:
            continue
        if any(v < 0 for v in x) or sum(x) != 1:
            continue
        p = Pmf(space, dict(zip(space.atoms, x)))
        if all(c.satisfied_by(p) for c in constraints):
            found.add(x)
    if not found:
        raise InfeasibleCredalSet("no distribution satisfies the constraints")
    ordered = sorted(found, reverse=True)
    return [Pmf(space, dict(zip(space.atoms, x))) for x in ordered]


def support(p: Pmf, x: Rv) -> set:
    """Values of ``x`` receiving positive probability under ``p``."""
    return {x.table[z] for z in p.space.atoms if p.weights[z] > 0}


def determines(
    x: Rv, y: Rv, p: Optional[Pmf] = None
) -> Optional[dict]:
    """Witness function f with y = f(x), if one exists.

    With ``p`` given, the identity only needs to hold on atoms of
    positive probability. Returns the witness as a map from x-values to
    y-values, or None.
    """
    atoms = x.space.atoms if p is None else [z for z in x.space.atoms if p.weights[z] > 0]
    witness: dict = {}
    for z in atoms:
        xv, yv = x.table[z], y.table[z]
        if witness.setdefault(xv, yv) != yv:
            return None
    return witness


def condition(p: Pmf, w: Rv, value) -> Pmf:
    """Exact conditional distribution of ``p`` given ``w = value``."""
    mass = p.prob(w, value)
    if mass == 0:
        raise ZeroProbabilityConditioning(
            f"P({w.name} = {format_value(value)}) = 0"
        )
    return Pmf(
        p.space,
        {z: (p.weights[z] / mass if w.table[z] == value else Fraction(0))
         for z in p.space.atoms},
    )


def value_pmf(p: Pmf, x: Rv) -> dict:
    """Distribution of ``x`` under ``p`` as a map over the full range."""
    out = {v: Fraction(0) for v in x.range()}
    for z in p.space.atoms:
        out[x.table[z]] += p.weights[z]
    return out


def expectation(p: Pmf, u: Rv) -> NumericValue:
    """Exact vector expectation of a numeric variable."""
    if not u.is_numeric:
        raise NonNumericTarget(f"rv {u.name!r} is not numeric")
    arity = len(next(iter(u.table.values())))
    acc = [Fraction(0)] * arity
    for z in p.space.atoms:
        w = p.weights[z]
        if w:
            for j, c in enumerate(u.table[z]):
                acc[j] += w * c
    return tuple(acc)


@dataclass(frozen=True)
class ConditionalTable:
    """Conditional distribution of a target given a conditioner, one row
    (a pmf over the target's range) per conditioner value.

    Rows at unsupported conditioner values cannot be inferred from the
    joint; they are filled uniformly and listed in ``arbitrary_rows`` so
    reports can flag them.
    """

    given: Rv
    target: Rv
    rows: Mapping
    arbitrary_rows: frozenset = field(default_factory=frozenset)

    def row(self, v) -> dict:
        return dict(self.rows[v])


def conditional_table(p: Pmf, u: Rv, v: Rv) -> ConditionalTable:
    """P(u | v) as a table over range(v), exact where supported."""
    u_range = u.range()
    rows = {}
    arbitrary = set()
    for val in v.range():
        mass = p.prob(v, val)
        if mass > 0:
            row = {uv: Fraction(0) for uv in u_range}
            for z in p.space.atoms:
                if v.table[z] == val and p.weights[z] > 0:
                    row[u.table[z]] += p.weights[z] / mass
            rows[val] = row
        else:
            uniform = Fraction(1, len(u_range))
            rows[val] = {uv: uniform for uv in u_range}
            arbitrary.add(val)
    return ConditionalTable(given=v, target=u, rows=rows, arbitrary_rows=frozenset(arbitrary))


def essentially_unique(ptilde: Pmf, v: Rv, credal: CredalSet) -> bool:
    """True when every vertex-supported conditioning value is also
    supported by the pragmatic distribution, so its conditionals are
    pinned down wherever a candidate truth can land."""
    covered = support(ptilde, v)
    return all(support(vertex, v) <= covered for vertex in credal.vertex_list())
