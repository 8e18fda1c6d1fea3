"""Divisor-class calculus on towers of point blowups of a surface.

A surface together with all its iterated point blowups has a limit
intersection lattice: classes of the base surface plus one generator per
exceptional prime (an exceptional curve identified across all models
where it appears).  Writing ``alpha_E`` for the class of the total
transform of the prime ``E`` on the minimal model where it is a curve,
the lattice splits orthogonally as

    (base classes)  (+)  sum of Q * alpha_E,

the base part carrying the base intersection form and the ``alpha_E``
being orthonormal for the *negative* of the form:

    <a, b> = gram(a_base, b_base) - sum_E a_E * b_E.

A *model* is described purely combinatorially as a parent-closed finite
set of primes (a lower set of the tree: blowing up a point on E requires
E to exist first).  The *incarnation* of a class in a model truncates
its exceptional support to that model's primes.

Everything here is exact rational arithmetic; no floats.

Sign convention
---------------
Coordinates ``c_E`` are coefficients of the total-transform classes, so
``c_E = +1`` for the class of an exceptional curve and ``<alpha_E,
alpha_E> = -1``.  The convention is pinned by the toric oracle tests
(the blowup of the plane has exceptional square -1, and the canonical
class picks up coefficient +1 on each new prime).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from . import linalg
from .errors import (
    AmbientMismatchError,
    ConfigurationError,
    InvalidModelError,
)

F0 = Fraction(0)
F1 = Fraction(1)


# ---------------------------------------------------------------------------
# parents and primes


@dataclass(frozen=True)
class BasePoint:
    """A blown-up point on the base surface, named by a label."""

    label: str


@dataclass(frozen=True)
class PrimeParent:
    """A blown-up point lying on (the strict/total transform of) a prime."""

    prime_id: str


Parent = BasePoint | PrimeParent


@dataclass(frozen=True)
class ExcPrime:
    """One exceptional prime over the base surface.

    ``level`` counts the blowups strictly below it: 0 for primes over a
    base point, parent level + 1 for primes over another prime.
    """

    id: str
    parent: Parent
    level: int

    def __post_init__(self):
        if self.level < 0:
            raise ValueError(f"negative level for prime {self.id!r}")
        if isinstance(self.parent, BasePoint) and self.level != 0:
            raise ValueError(
                f"prime {self.id!r} sits over a base point but has level "
                f"{self.level}"
            )


@dataclass(frozen=True)
class BaseLattice:
    """The intersection lattice of the base surface.

    ``gram`` must be symmetric of signature (1, rank-1); this is checked
    exactly.  ``canonical`` optionally registers the base canonical
    class in the same coordinates (for the plane with the line class H:
    canonical = (-3,)).
    """

    rank: int
    gram: tuple[tuple[Fraction, ...], ...]
    labels: tuple[str, ...]
    canonical: tuple[Fraction, ...] | None = None

    @staticmethod
    def create(gram: Sequence[Sequence], labels: Sequence[str],
               canonical: Sequence | None = None) -> "BaseLattice":
        g = linalg.frac_mat(gram)
        rank = len(g)
        if any(len(row) != rank for row in g):
            raise ValueError("gram matrix must be square")
        for i in range(rank):
            for j in range(rank):
                if g[i][j] != g[j][i]:
                    raise ValueError("gram matrix must be symmetric")
        if linalg.signature(g) != (1, rank - 1, 0):
            raise ValueError("gram matrix must have signature (1, rank-1)")
        if len(labels) != rank:
            raise ValueError("need one label per basis class")
        can = tuple(linalg.frac_vec(canonical)) if canonical is not None else None
        if can is not None and len(can) != rank:
            raise ValueError("canonical class has wrong length")
        return BaseLattice(rank=rank,
                           gram=tuple(tuple(row) for row in g),
                           labels=tuple(labels),
                           canonical=can)

    def pair_base(self, u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
        total = F0
        for i in range(self.rank):
            if u[i]:
                for j in range(self.rank):
                    if v[j]:
                        total += u[i] * self.gram[i][j] * v[j]
        return total


def p2_lattice() -> BaseLattice:
    """Base lattice of the projective plane: Z*H with H^2 = 1, K = -3H."""
    return BaseLattice.create([[1]], ["H"], canonical=[-3])


@dataclass(frozen=True)
class PrimeTree:
    """A finite, parent-closed, ordered collection of exceptional primes."""

    base: BaseLattice
    primes: tuple[ExcPrime, ...]
    _by_id: Mapping[str, ExcPrime] = field(repr=False, compare=False, default=None)

    @staticmethod
    def create(base: BaseLattice, primes: Iterable[ExcPrime]) -> "PrimeTree":
        plist = tuple(primes)
        by_id: dict[str, ExcPrime] = {}
        for p in plist:
            if p.id in by_id:
                raise ValueError(f"duplicate prime id {p.id!r}")
            by_id[p.id] = p
        for p in plist:
            if isinstance(p.parent, PrimeParent):
                q = by_id.get(p.parent.prime_id)
                if q is None:
                    raise ValueError(
                        f"prime {p.id!r} has parent {p.parent.prime_id!r} "
                        "outside the tree"
                    )
                if p.level != q.level + 1:
                    raise ValueError(
                        f"prime {p.id!r}: level {p.level} != parent level "
                        f"{q.level} + 1"
                    )
        return PrimeTree(base=base, primes=plist, _by_id=by_id)

    def prime(self, pid: str) -> ExcPrime:
        return self._by_id[pid]

    def ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.primes)

    def has(self, pid: str) -> bool:
        return pid in self._by_id

    def is_parent_closed(self, prime_set: Iterable[str]) -> bool:
        s = set(prime_set)
        for pid in s:
            if pid not in self._by_id:
                return False
            p = self._by_id[pid]
            if isinstance(p.parent, PrimeParent) and p.parent.prime_id not in s:
                return False
        return True

    def check_model(self, prime_set: Iterable[str]) -> frozenset[str]:
        s = frozenset(prime_set)
        if not self.is_parent_closed(s):
            raise InvalidModelError(
                f"prime set {sorted(s)} is not a parent-closed subset of the tree"
            )
        return s


# ---------------------------------------------------------------------------
# class vectors


@dataclass(frozen=True)
class ClassVector:
    """A class with exact base coordinates and finite exceptional support."""

    tree: PrimeTree
    base_part: tuple[Fraction, ...]
    exc_part: Mapping[str, Fraction]

    @staticmethod
    def create(tree: PrimeTree, base_part: Sequence,
               exc_part: Mapping[str, object] | None = None) -> "ClassVector":
        bp = tuple(linalg.frac_vec(base_part))
        if len(bp) != tree.base.rank:
            raise ValueError("base part has wrong length")
        ep: dict[str, Fraction] = {}
        for pid, c in (exc_part or {}).items():
            if not tree.has(pid):
                raise ValueError(f"unknown prime id {pid!r}")
            c = Fraction(c)
            if c:
                ep[pid] = c
        return ClassVector(tree=tree, base_part=bp, exc_part=ep)

    def coefficient(self, pid: str) -> Fraction:
        return self.exc_part.get(pid, F0)

    def support(self) -> frozenset[str]:
        return frozenset(self.exc_part)

    def __add__(self, other: "ClassVector") -> "ClassVector":
        _check_ambient(self, other)
        bp = tuple(a + b for a, b in zip(self.base_part, other.base_part))
        ep = dict(self.exc_part)
        for pid, c in other.exc_part.items():
            ep[pid] = ep.get(pid, F0) + c
        return ClassVector.create(self.tree, bp, ep)

    def __sub__(self, other: "ClassVector") -> "ClassVector":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "ClassVector":
        s = Fraction(scalar)
        bp = tuple(s * x for x in self.base_part)
        ep = {pid: s * c for pid, c in self.exc_part.items()}
        return ClassVector.create(self.tree, bp, ep)

    def is_zero(self) -> bool:
        return not self.exc_part and all(x == 0 for x in self.base_part)


def _check_ambient(a: ClassVector, b: ClassVector) -> None:
    if a.tree is not b.tree and a.tree != b.tree:
        raise AmbientMismatchError("classes live over different prime trees")


def pair(a: ClassVector, b: ClassVector) -> Fraction:
    """Intersection pairing: base gram minus the exceptional dot product."""
    _check_ambient(a, b)
    total = a.tree.base.pair_base(a.base_part, b.base_part)
    small, big = a.exc_part, b.exc_part
    if len(big) < len(small):
        small, big = big, small
    for pid, c in small.items():
        d = big.get(pid)
        if d:
            total -= c * d
    return total


def incarnation(a: ClassVector, prime_set: Iterable[str]) -> ClassVector:
    """Truncate the exceptional support of ``a`` to a model's prime set.

    ``prime_set`` must be parent-closed (a valid model).  The base part
    is untouched; this is the orthogonal projection onto the sublattice
    spanned by the base and the retained primes.
    """
    s = a.tree.check_model(prime_set)
    ep = {pid: c for pid, c in a.exc_part.items() if pid in s}
    return ClassVector(tree=a.tree, base_part=a.base_part, exc_part=ep)


def defect_sequence(a: ClassVector,
                    chain: Sequence[Iterable[str]]) -> list[Fraction]:
    """Self-intersections of the incarnations of ``a`` along a chain.

    The chain must be an increasing sequence of parent-closed prime
    sets.  The values are nonincreasing: passing to a bigger model
    subtracts further squares of exceptional coordinates.
    """
    sets = [a.tree.check_model(s) for s in chain]
    for prev, cur in zip(sets, sets[1:]):
        if not prev <= cur:
            raise InvalidModelError("chain of prime sets is not increasing")
    out = []
    for s in sets:
        inc = incarnation(a, s)
        out.append(pair(inc, inc))
    return out


def canonical_class(tree: PrimeTree, prime_set: Iterable[str]) -> ClassVector:
    """Canonical class of the model given by ``prime_set``.

    Base canonical part plus coefficient 1 on every prime of the model:
    each blowup adds its exceptional class to the pullback of the
    canonical class below.
    """
    if tree.base.canonical is None:
        raise ConfigurationError("base lattice has no canonical class configured")
    s = tree.check_model(prime_set)
    return ClassVector.create(tree, tree.base.canonical, {pid: F1 for pid in s})


def canonical_pairing(a: ClassVector, prime_set: Iterable[str]) -> Fraction:
    """Pair the incarnation of ``a`` in a model with that model's
    canonical class.

    For nef ``a`` the value is monotone in the model, so a supremum over
    a chain of models is attained at the last (largest) one.
    """
    s = a.tree.check_model(prime_set)
    k = canonical_class(a.tree, s)
    return pair(incarnation(a, s), k)


def weil_incarnation(tree: PrimeTree, base_part: Sequence,
                     coeff: Callable[[str], object],
                     prime_set: Iterable[str]) -> ClassVector:
    """Finite incarnation of a class given by a coefficient generator.

    Classes with infinite exceptional support are never materialized;
    the caller supplies ``coeff`` (prime id -> rational) and gets the
    truncation to one model at a time.
    """
    s = tree.check_model(prime_set)
    return ClassVector.create(tree, base_part, {pid: coeff(pid) for pid in s})


# ---------------------------------------------------------------------------
# truncated Hodge index


def restricted_gram(tree: PrimeTree, vectors: Sequence[ClassVector]) -> linalg.Mat:
    return [[pair(u, v) for v in vectors] for u in vectors]


def _model_basis(tree: PrimeTree, prime_set: frozenset[str]) -> list[ClassVector]:
    vecs = []
    rank = tree.base.rank
    for i in range(rank):
        e = [F0] * rank
        e[i] = F1
        vecs.append(ClassVector.create(tree, e))
    zero = [F0] * rank
    for pid in sorted(prime_set):
        vecs.append(ClassVector.create(tree, zero, {pid: F1}))
    return vecs


def hodge_orthogonal_gram(a: ClassVector,
                          prime_set: Iterable[str]) -> linalg.Mat:
    """Gram matrix of the pairing on {x in the model lattice : <a,x>=0}.

    The model lattice is spanned by the base classes and the primes of
    ``prime_set``.  When <a,a> > 0 (computed on the incarnation), the
    Hodge index theorem makes this gram negative definite; ``a`` itself
    may have support outside the model, only its incarnation matters.
    """
    s = a.tree.check_model(prime_set)
    basis = _model_basis(a.tree, s)
    a_inc = incarnation(a, s)
    row = [[pair(a_inc, v) for v in basis]]
    kernel = linalg.nullspace(row)
    ortho = []
    for coeffs in kernel:
        vec = None
        for c, b in zip(coeffs, basis):
            if c:
                term = c * b
                vec = term if vec is None else vec + term
        if vec is not None:
            ortho.append(vec)
    return restricted_gram(a.tree, ortho)


def hodge_index_holds(a: ClassVector, prime_set: Iterable[str]) -> bool:
    """True when the pairing is negative definite on the orthogonal
    complement of ``a`` inside the model lattice.  Only meaningful when
    the incarnation of ``a`` has positive self-intersection."""
    gram = hodge_orthogonal_gram(a, prime_set)
    return linalg.is_negative_definite(gram)


# ---------------------------------------------------------------------------
# JSON serialization


def _frac_str(x: Fraction) -> str:
    return str(x)


def parent_to_json(p: Parent) -> dict:
    if isinstance(p, BasePoint):
        return {"type": "base-point", "label": p.label}
    return {"type": "prime", "id": p.prime_id}


def parent_from_json(obj: dict) -> Parent:
    if obj["type"] == "base-point":
        return BasePoint(obj["label"])
    if obj["type"] == "prime":
        return PrimeParent(obj["id"])
    raise ValueError(f"unknown parent type {obj['type']!r}")


def tree_to_json(tree: PrimeTree) -> dict:
    return {
        "base": {
            "rank": tree.base.rank,
            "gram": [[_frac_str(x) for x in row] for row in tree.base.gram],
            "labels": list(tree.base.labels),
            "canonical": ([_frac_str(x) for x in tree.base.canonical]
                          if tree.base.canonical is not None else None),
        },
        "primes": [
            {"id": p.id, "parent": parent_to_json(p.parent), "level": p.level}
            for p in tree.primes
        ],
    }


def tree_from_json(obj: dict) -> PrimeTree:
    b = obj["base"]
    base = BaseLattice.create(
        [[Fraction(x) for x in row] for row in b["gram"]],
        b["labels"],
        canonical=[Fraction(x) for x in b["canonical"]]
        if b.get("canonical") is not None else None,
    )
    primes = [
        ExcPrime(id=p["id"], parent=parent_from_json(p["parent"]),
                 level=p["level"])
        for p in obj["primes"]
    ]
    return PrimeTree.create(base, primes)


def class_to_json(a: ClassVector) -> dict:
    return {
        "base": [_frac_str(x) for x in a.base_part],
        "exc": {pid: _frac_str(c) for pid, c in sorted(a.exc_part.items())},
    }


def class_from_json(tree: PrimeTree, obj: dict) -> ClassVector:
    return ClassVector.create(
        tree,
        [Fraction(x) for x in obj["base"]],
        {pid: Fraction(c) for pid, c in obj.get("exc", {}).items()},
    )
