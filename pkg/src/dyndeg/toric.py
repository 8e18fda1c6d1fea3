"""Smooth complete toric surfaces and monomial maps, exactly.

A smooth complete fan in the rank-2 lattice is a cyclically ordered
list of primitive integer rays with unit determinant between cyclic
neighbours.  Star subdivision of a wall realizes a point blowup, and a
monomial map ``(x, y) -> (x^a11 y^a12, x^a21 y^a22)`` acts on the ray
lattice by its exponent matrix: the induced map of toric surfaces is
holomorphic when every cone of the source maps into a cone of the
target, which can always be arranged by refining the source.

Divisor classes are ray-coefficient vectors modulo the two relations of
linear equivalence; a fixed echelon reduction (zeroing the first two
ray coefficients) pins the coordinates.  All arithmetic is exact.

Sign conventions are anchored by two facts checked in the test suite:
every boundary line on the plane has self-intersection +1, and the
exceptional curve of a point blowup has self-intersection -1.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import linalg
from .errors import CapacityError, DominanceError, NotHolomorphicError

Ray = tuple[int, int]

F0 = Fraction(0)
F1 = Fraction(1)


def _det(u: Ray, v: Ray) -> int:
    return u[0] * v[1] - u[1] * v[0]


def _primitive(v: Sequence[int]) -> Ray:
    x, y = int(v[0]), int(v[1])
    if x == 0 and y == 0:
        raise ValueError("zero vector has no direction")
    g = math.gcd(abs(x), abs(y))
    return (x // g, y // g)


def _angular_cmp(u: Ray, v: Ray) -> int:
    """Order directions counterclockwise starting at (1, 0)."""
    def half(w: Ray) -> int:
        return 0 if (w[1] > 0 or (w[1] == 0 and w[0] > 0)) else 1

    hu, hv = half(u), half(v)
    if hu != hv:
        return -1 if hu < hv else 1
    d = _det(u, v)
    if d == 0:
        return 0
    return -1 if d > 0 else 1


def _sort_rays(rays: Iterable[Ray]) -> list[Ray]:
    return sorted(set(rays), key=functools.cmp_to_key(_angular_cmp))


@dataclass(frozen=True)
class Fan:
    """A smooth complete fan, rays in canonical counterclockwise order."""

    rays: tuple[Ray, ...]

    @staticmethod
    def create(rays: Iterable[Sequence[int]]) -> "Fan":
        rs = [(int(r[0]), int(r[1])) for r in rays]
        for r in rs:
            if r != _primitive(r):
                raise ValueError(f"ray {r} is not primitive")
        ordered = _sort_rays(rs)
        if len(ordered) != len(rs):
            raise ValueError("duplicate rays")
        n = len(ordered)
        if n < 3:
            raise ValueError("a complete fan needs at least 3 rays")
        for i in range(n):
            d = _det(ordered[i], ordered[(i + 1) % n])
            if d != 1:
                raise ValueError(
                    f"consecutive rays {ordered[i]}, {ordered[(i + 1) % n]} "
                    f"span a cone of determinant {d}; fan is not smooth"
                )
        return Fan(rays=tuple(ordered))

    @property
    def size(self) -> int:
        return len(self.rays)

    @property
    def class_rank(self) -> int:
        return len(self.rays) - 2

    def ray_index(self, r: Ray) -> int:
        return self.rays.index(r)


def is_smooth_complete(rays: Iterable[Sequence[int]]) -> bool:
    try:
        Fan.create(rays)
    except ValueError:
        return False
    return True


def p2_fan() -> Fan:
    """Fan of the projective plane."""
    return Fan.create([(1, 0), (0, 1), (-1, -1)])


def star_subdivide(fan: Fan, wall: int) -> Fan:
    """Blow up the torus-fixed point on the wall between rays
    ``wall`` and ``wall + 1`` (cyclically): insert their sum."""
    n = fan.size
    if not 0 <= wall < n:
        raise IndexError(f"wall index {wall} out of range for {n} rays")
    u, v = fan.rays[wall], fan.rays[(wall + 1) % n]
    return Fan.create(fan.rays + ((u[0] + v[0], u[1] + v[1]),))


# ---------------------------------------------------------------------------
# intersection numbers and class coordinates


@functools.lru_cache(maxsize=None)
def intersection_matrix(fan: Fan) -> tuple[tuple[Fraction, ...], ...]:
    """Intersection numbers of the boundary divisors.

    Adjacent divisors meet transversely in one point; self-intersections
    come from the wall relation v_{i-1} + v_{i+1} = -(D_i^2) v_i.
    """
    n = fan.size
    q = linalg.zeros(n, n)
    for i in range(n):
        q[i][(i + 1) % n] = F1
        q[i][(i - 1) % n] = F1
        q[i][i] = Fraction(-_det(fan.rays[(i - 1) % n], fan.rays[(i + 1) % n]))
    if n == 3:
        # each pair of rays is adjacent exactly once
        for i in range(3):
            for j in range(3):
                if i != j:
                    q[i][j] = F1
    return tuple(tuple(row) for row in q)


def _reduce_full(fan: Fan, full: Sequence[Fraction]) -> linalg.Vec:
    """Canonical representative with the first two ray coefficients zero."""
    v0, v1 = fan.rays[0], fan.rays[1]
    # solve <v0,u> = -full[0], <v1,u> = -full[1]; det(v0,v1) = 1
    b0, b1 = -Fraction(full[0]), -Fraction(full[1])
    d = Fraction(_det(v0, v1))
    u0 = (b0 * v1[1] - b1 * v0[1]) / d
    u1 = (b1 * v0[0] - b0 * v1[0]) / d
    return [Fraction(full[i]) + v[0] * u0 + v[1] * u1
            for i, v in enumerate(fan.rays)]


def class_of_divisor_vector(fan: Fan, full: Sequence) -> linalg.Vec:
    """Class coordinates of a ray-coefficient divisor vector."""
    reduced = _reduce_full(fan, linalg.frac_vec(full))
    return reduced[2:]


def divisor_vector_of_class(fan: Fan, cls: Sequence) -> linalg.Vec:
    if len(cls) != fan.class_rank:
        raise ValueError("class vector has wrong length")
    return [F0, F0] + linalg.frac_vec(cls)


@functools.lru_cache(maxsize=None)
def _class_gram(fan: Fan) -> tuple[tuple[Fraction, ...], ...]:
    q = intersection_matrix(fan)
    n = fan.size
    rank = fan.class_rank
    g = linalg.zeros(rank, rank)
    for i in range(rank):
        for j in range(rank):
            g[i][j] = q[i + 2][j + 2]
    return tuple(tuple(row) for row in g)


def pair_classes(fan: Fan, x: Sequence, y: Sequence) -> Fraction:
    """Intersection number of two divisor classes."""
    g = _class_gram(fan)
    xv, yv = linalg.frac_vec(x), linalg.frac_vec(y)
    total = F0
    for i, xi in enumerate(xv):
        if xi:
            row = g[i]
            for j, yj in enumerate(yv):
                if yj:
                    total += xi * row[j] * yj
    return total


def divisor_class(fan: Fan, i: int) -> linalg.Vec:
    full = [F0] * fan.size
    full[i] = F1
    return class_of_divisor_vector(fan, full)


def hyperplane_class(fan: Fan) -> linalg.Vec:
    """Class of a line on the plane fan (only meaningful for p2_fan)."""
    return divisor_class(fan, 0)


def canonical_class_vector(fan: Fan) -> linalg.Vec:
    """Canonical class: minus the sum of the boundary divisors."""
    return class_of_divisor_vector(fan, [-1] * fan.size)


def class_signature(fan: Fan) -> tuple[int, int, int]:
    return linalg.signature([list(r) for r in _class_gram(fan)])


# ---------------------------------------------------------------------------
# positivity


def wall_values(fan: Fan, cls: Sequence) -> list[Fraction]:
    """One value per wall; the class is nef iff all are >= 0.

    The value at the wall spanned by ray m compares the linear
    extension of the support function from one adjacent cone with its
    value on the far ray of the other: bending of the support function,
    which also equals the intersection with the wall divisor.
    """
    a = _reduce_full(fan, divisor_vector_of_class(fan, cls)) \
        if len(cls) == fan.class_rank else _reduce_full(fan, linalg.frac_vec(cls))
    n = fan.size
    out = []
    for m in range(n):
        i, k = (m - 1) % n, (m + 1) % n
        c = Fraction(_det(fan.rays[i], fan.rays[k]))
        out.append(a[i] - c * a[m] + a[k])
    return out


def nef_check(fan: Fan, cls: Sequence) -> bool:
    """Convexity of the support function across every wall."""
    return all(v >= 0 for v in wall_values(fan, cls))


def psef_check(fan: Fan, cls: Sequence) -> bool:
    """Membership in the cone spanned by the boundary divisor classes.

    Exact rational Fourier-Motzkin after eliminating the equality
    constraints; the free part is always 2-dimensional.
    """
    n = fan.size
    cols = [divisor_class(fan, i) for i in range(n)]
    rank = fan.class_rank
    d = [[cols[j][i] for j in range(n)] for i in range(rank)]
    target = linalg.frac_vec(cls)
    t0 = linalg.solve(d, target)
    if t0 is None:
        return False
    null = linalg.nullspace(d)
    # feasibility of t0 + s . null >= 0 in the free variables s
    constraints = [(tuple(nv[i] for nv in null), t0[i]) for i in range(n)]
    return _fm_feasible(constraints)


def _fm_feasible(constraints: list[tuple[tuple[Fraction, ...], Fraction]]) -> bool:
    """Feasibility of c . s + c0 >= 0, eliminating variables one by one."""
    if not constraints:
        return True
    nvars = len(constraints[0][0])
    if nvars == 0:
        return all(c0 >= 0 for _, c0 in constraints)
    lowers, uppers, rest = [], [], []
    for coeffs, c0 in constraints:
        lead, tail = coeffs[0], coeffs[1:]
        if lead > 0:
            lowers.append(tuple(-t / lead for t in tail) + (-c0 / lead,))
        elif lead < 0:
            uppers.append(tuple(-t / lead for t in tail) + (-c0 / lead,))
        else:
            rest.append((tail, c0))
    new = list(rest)
    for lo in lowers:
        for up in uppers:
            # up - lo >= 0
            coeffs = tuple(u - l for u, l in zip(up[:-1], lo[:-1]))
            new.append((coeffs, up[-1] - lo[-1]))
    return _fm_feasible(new)


def cone_contains(generators: list[linalg.Vec], x: Sequence) -> bool:
    """Does x lie in the cone of nonnegative combinations of the
    generators?  Exact; intended for the small ranks arising here."""
    if not generators:
        return all(Fraction(v) == 0 for v in x)
    dim = len(generators[0])
    m = len(generators)
    d = [[generators[j][i] for j in range(m)] for i in range(dim)]
    t0 = linalg.solve(d, linalg.frac_vec(x))
    if t0 is None:
        return False
    null = linalg.nullspace(d)
    if len(null) > 3:
        raise CapacityError(
            f"cone membership with {len(null)} free variables exceeds the "
            "Fourier-Motzkin budget"
        )
    constraints = [(tuple(nv[i] for nv in null), t0[i]) for i in range(m)]
    return _fm_feasible(constraints)


# ---------------------------------------------------------------------------
# monomial maps


@dataclass(frozen=True)
class MonomialMatrix:
    """Exponent matrix of the monomial map
    (x, y) -> (x^a11 y^a12, x^a21 y^a22); must be nondegenerate."""

    rows: tuple[tuple[int, int], tuple[int, int]]

    @staticmethod
    def create(rows: Sequence[Sequence[int]]) -> "MonomialMatrix":
        r = ((int(rows[0][0]), int(rows[0][1])),
             (int(rows[1][0]), int(rows[1][1])))
        m = MonomialMatrix(rows=r)
        if m.det() == 0:
            raise DominanceError(f"exponent matrix {r} has determinant 0")
        return m

    def det(self) -> int:
        (a, b), (c, d) = self.rows
        return a * d - b * c

    def topological_degree(self) -> int:
        return abs(self.det())

    def apply(self, v: Ray) -> tuple[int, int]:
        """Action on the ray lattice (dual to the action on exponents)."""
        (a, b), (c, d) = self.rows
        return (a * v[0] + b * v[1], c * v[0] + d * v[1])

    def __matmul__(self, other: "MonomialMatrix") -> "MonomialMatrix":
        (a, b), (c, d) = self.rows
        (e, f), (g, h) = other.rows
        return MonomialMatrix.create(
            [[a * e + b * g, a * f + b * h], [c * e + d * g, c * f + d * h]])

    def power(self, n: int) -> "MonomialMatrix":
        if n < 0:
            raise ValueError("negative power of an exponent matrix")
        if n == 0:
            return MonomialMatrix.create([[1, 0], [0, 1]])
        result = self
        for _ in range(n - 1):
            result = result @ self
        return result

    def preimage_ray(self, r: Ray) -> Ray:
        """Primitive generator of the preimage direction of a ray."""
        (a, b), (c, d) = self.rows
        det = self.det()
        w = (d * r[0] - b * r[1], -c * r[0] + a * r[1])  # adjugate on r
        if det < 0:
            w = (-w[0], -w[1])
        return _primitive(w)

    def spectral_radius(self) -> float:
        (a, b), (c, d) = self.rows
        tr, det = a + d, self.det()
        disc = tr * tr - 4 * det
        if disc >= 0:
            s = math.sqrt(disc)
            return max(abs((tr + s) / 2), abs((tr - s) / 2))
        return math.sqrt(det)  # complex pair, |eigenvalue| = sqrt(det)

    def spectral_radius_exact(self) -> str:
        (a, b), (c, d) = self.rows
        tr, det = a + d, self.det()
        disc = tr * tr - 4 * det
        if disc >= 0:
            return f"max|(({tr}) +- sqrt({disc}))/2|"
        return f"sqrt({det})"

    def identity_p(self) -> bool:
        return self.rows == ((1, 0), (0, 1))


def identity_matrix() -> MonomialMatrix:
    return MonomialMatrix.create([[1, 0], [0, 1]])


# ---------------------------------------------------------------------------
# fan refinement for a matrix


def _hj_intermediates(u: Ray, w: Ray) -> list[Ray]:
    """Primitive rays whose insertion makes cone(u, w) smooth.

    Continued-fraction subdivision: repeatedly insert the unique
    primitive v in the cone with det(u, v) = 1, shrinking det(v, w).
    """
    out: list[Ray] = []
    while _det(u, w) > 1:
        d = _det(u, w)
        g, x, y = _egcd(u[0], u[1])
        assert g == 1
        t = (-y, x)  # det(u, t) = 1
        alpha = _det(w, t)
        k = -((-(alpha + 1)) // d)  # ceil((alpha + 1) / d)
        v = (t[0] + k * u[0], t[1] + k * u[1])
        assert 1 <= _det(v, w) < d
        out.append(v)
        u = v
    return out


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def refine_for_matrix(matrix: MonomialMatrix, source: Fan, target: Fan,
                      max_rays: int | None = None) -> Fan:
    """Smooth refinement of ``source`` on which the matrix maps every
    cone into a single cone of ``target``.

    Adds the primitive preimages of the target rays, then resolves to a
    smooth fan by continued-fraction subdivision.  Deterministic; not
    minimal.
    """
    candidates = set(source.rays)
    for r in target.rays:
        candidates.add(matrix.preimage_ray(r))
    ordered = _sort_rays(candidates)
    rays: list[Ray] = []
    n = len(ordered)
    for i in range(n):
        u, w = ordered[i], ordered[(i + 1) % n]
        rays.append(u)
        rays.extend(_hj_intermediates(u, w))
        if max_rays is not None and len(rays) > max_rays:
            raise CapacityError(
                f"refinement exceeded the cap of {max_rays} rays")
    return Fan.create(rays)


def cone_mapping_holds(matrix: MonomialMatrix, source: Fan,
                       target: Fan) -> bool:
    """Exhaustive check: every source cone maps into some target cone."""
    n, m = source.size, target.size

    def containing(v: Ray) -> set[int]:
        w = matrix.apply(v)
        cones = set()
        for j in range(m):
            r1, r2 = target.rays[j], target.rays[(j + 1) % m]
            if _det(r1, w) >= 0 and _det(w, r2) >= 0:
                cones.add(j)
        return cones

    for i in range(n):
        c1 = containing(source.rays[i])
        c2 = containing(source.rays[(i + 1) % n])
        if not c1 & c2:
            return False
    return True


def _support_coeff(fan: Fan, a_full: Sequence[Fraction], w: Ray) -> Fraction:
    """-h(w) for the support function with h(ray_j) = -a_j."""
    n = fan.size
    for j in range(n):
        r1, r2 = fan.rays[j], fan.rays[(j + 1) % n]
        c2, c1 = _det(r1, w), _det(w, r2)
        if c1 >= 0 and c2 >= 0:
            return c1 * a_full[j] + c2 * a_full[(j + 1) % n]
    raise ValueError(f"point {w} not located in the fan")  # pragma: no cover


def pullback_matrix(matrix: MonomialMatrix, source: Fan,
                    target: Fan) -> linalg.Mat:
    """Divisor-class pullback along the map source -> target given by
    the matrix.  The pullback of the divisor with support function h
    has support function h o matrix.
    """
    if not cone_mapping_holds(matrix, source, target):
        raise NotHolomorphicError(
            "matrix does not map every source cone into a target cone; "
            "refine the source first"
        )
    rank_t = target.class_rank
    images: list[linalg.Vec] = []
    for k in range(rank_t):
        cls = [F0] * rank_t
        cls[k] = F1
        a_full = divisor_vector_of_class(target, cls)
        pulled = [_support_coeff(target, a_full, matrix.apply(v))
                  for v in source.rays]
        images.append(class_of_divisor_vector(source, pulled))
    return [[images[k][i] for k in range(rank_t)]
            for i in range(source.class_rank)]


def pushforward_matrix(matrix: MonomialMatrix, source: Fan,
                       target: Fan) -> linalg.Mat:
    """Divisor-class pushforward (proper cycle image).

    A source boundary curve maps onto the target boundary curve of the
    image ray, with multiplicity the lattice index, or is contracted
    when its ray lands inside a 2-dimensional cone.
    """
    rank_s, rank_t = source.class_rank, target.class_rank
    cols: list[linalg.Vec] = []
    target_rays = {r: i for i, r in enumerate(target.rays)}
    for v in source.rays:
        w = matrix.apply(v)
        p = _primitive(w)
        if p in target_rays:
            mult = Fraction(w[0] // p[0] if p[0] else w[1] // p[1])
            cols.append([mult * c for c in divisor_class(target, target_rays[p])])
        else:
            cols.append([F0] * rank_t)
    full_cols = []
    for k in range(rank_s):
        cls = [F0] * rank_s
        cls[k] = F1
        full = divisor_vector_of_class(source, cls)
        img = [F0] * rank_t
        for i, coeff in enumerate(full):
            if coeff:
                img = [x + coeff * y for x, y in zip(img, cols[i])]
        full_cols.append(img)
    return [[full_cols[k][i] for k in range(rank_s)] for i in range(rank_t)]


# ---------------------------------------------------------------------------
# degree sequences


def toric_degree(matrix: MonomialMatrix, max_rays: int | None = None) -> int:
    """Degree of the monomial map on the plane: pull the line class
    back along a holomorphic lift and pair with the line class."""
    p2 = p2_fan()
    lift = refine_for_matrix(matrix, p2, p2, max_rays=max_rays)
    h = hyperplane_class(p2)
    pulled_f = linalg.mat_vec(pullback_matrix(matrix, lift, p2), h)
    pulled_blowdown = linalg.mat_vec(pullback_matrix(identity_matrix(), lift, p2), h)
    deg = pair_classes(lift, pulled_f, pulled_blowdown)
    if deg.denominator != 1:
        raise ArithmeticError(f"nonintegral degree {deg}")  # pragma: no cover
    return int(deg)


def toric_degree_sequence(matrix: MonomialMatrix, n_max: int,
                          max_rays: int = 4096) -> list[int]:
    """Degrees of the iterates, n = 1 .. n_max, exact integers.

    Raises CapacityError carrying the partial list when the refinement
    for some iterate exceeds ``max_rays`` rays.
    """
    degs: list[int] = []
    for n in range(1, n_max + 1):
        power = matrix.power(n)
        try:
            degs.append(toric_degree(power, max_rays=max_rays))
        except CapacityError as exc:
            raise CapacityError(
                f"iterate {n}: {exc}", partial=degs) from exc
    return degs


# ---------------------------------------------------------------------------
# ample classes on refinements


def subdivision_steps(coarse: Fan, fine: Fan) -> list[tuple[Fan, Ray, Ray, Ray]]:
    """Factor a smooth refinement into star subdivisions.

    Returns one entry per inserted ray, in insertion order:
    (fan before insertion, new ray, left neighbour, right neighbour).
    Greedy: scan walls cyclically for one whose ray sum is missing.
    """
    if not set(coarse.rays) <= set(fine.rays):
        raise ValueError("second fan does not refine the first")
    steps = []
    current = coarse
    missing = set(fine.rays) - set(coarse.rays)
    while missing:
        for i in range(current.size):
            u = current.rays[i]
            w = current.rays[(i + 1) % current.size]
            s = (u[0] + w[0], u[1] + w[1])
            if s in missing:
                steps.append((current, s, u, w))
                current = star_subdivide(current, i)
                missing.discard(s)
                break
        else:  # pragma: no cover
            raise ValueError("refinement is not a composition of star "
                             "subdivisions")
    return steps


def pullback_one_step(new_ray: Ray, left: Ray, right: Ray,
                      coeffs: dict[Ray, Fraction]) -> dict[Ray, Fraction]:
    """Pull a ray-coefficient divisor through one star subdivision."""
    out = dict(coeffs)
    out[new_ray] = coeffs.get(left, F0) + coeffs.get(right, F0)
    return out


def ample_class(coarse: Fan, fine: Fan, coarse_ample: Sequence) -> linalg.Vec:
    """Thread an ample class up a refinement.

    At each star subdivision, m * (pullback of the ample below) minus
    the exceptional class is ample for the minimal integer m making all
    wall values strictly positive.
    """
    steps = subdivision_steps(coarse, fine)
    coeffs = {r: c for r, c in
              zip(coarse.rays,
                  _reduce_full(coarse, divisor_vector_of_class(coarse, coarse_ample)))}
    for before, new_ray, left, right in steps:
        after = Fan.create(before.rays + (new_ray,))
        pulled = pullback_one_step(new_ray, left, right, coeffs)
        for m in range(1, 1 << 20):
            cand = {r: m * pulled.get(r, F0) for r in after.rays}
            cand[new_ray] -= F1
            vec = [cand[r] for r in after.rays]
            if all(v > 0 for v in wall_values(after, vec)):
                coeffs = cand
                break
        else:  # pragma: no cover
            raise ArithmeticError("no ample multiple found")
    full = [coeffs[r] for r in fine.rays]
    return class_of_divisor_vector(fine, full)


# ---------------------------------------------------------------------------
# JSON


def fan_to_json(fan: Fan) -> dict:
    return {"rays": [[r[0], r[1]] for r in fan.rays]}


def fan_from_json(obj: dict) -> Fan:
    return Fan.create(obj["rays"])


def matrix_to_json(m: linalg.Mat) -> dict:
    return {"rows": len(m), "cols": len(m[0]) if m else 0,
            "entries": [str(x) for row in m for x in row]}


def matrix_from_json(obj: dict) -> linalg.Mat:
    rows, cols = obj["rows"], obj["cols"]
    entries = [Fraction(x) for x in obj["entries"]]
    return [entries[i * cols:(i + 1) * cols] for i in range(rows)]
