"""Permutation machinery for branched covers.

Covers are encoded by permutation monodromy.  This module owns the
composition convention for the whole package: products read left to
right, (a * b)(x) = b(a(x)).

The two central constructions are the pair of involutions whose product
is a full cycle (used to extend circle covers over a disc with at most
two interior branch points) and the triple of involutions whose product
has a prescribed cycle type with the extremal transposition budget
n + k - 2 (used for the sphere cover with four branch values).  Both
come with exhaustive brute-force oracles for small degrees.

The n + k - 2 budget is not achievable for every cycle type: three
involutions in S_n carry at most 3*floor(n/2) transpositions, and types
such as (1,1,1) admit no transitive solution at all.  Constructors raise
InfeasibleCycleTypeError in those cases, and the oracle certifies the
emptiness exhaustively.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

ORACLE_DEGREE_BOUND = 7


class DegreeBoundExceededError(ValueError):
    """Exhaustive search requested beyond the configured degree bound."""


class InfeasibleCycleTypeError(ValueError):
    """No involution triple with the requested type and budget exists."""


@dataclass(frozen=True, order=True)
class Permutation:
    """Bijection on {1..n}, stored as the tuple of images of 1..n."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError("images must be a bijection on 1..n")

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        # left to right: (self * other)(x) = other(self(x))
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        return Permutation(tuple(other.images[i - 1] for i in self.images))

    def inverse(self) -> "Permutation":
        out = [0] * self.degree
        for i, img in enumerate(self.images, start=1):
            out[img - 1] = i
        return Permutation(tuple(out))

    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """Cycle decomposition; each cycle starts at its least element."""
        seen = [False] * self.degree
        out = []
        for start in range(1, self.degree + 1):
            if seen[start - 1]:
                continue
            cyc = [start]
            seen[start - 1] = True
            x = self(start)
            while x != start:
                cyc.append(x)
                seen[x - 1] = True
                x = self(x)
            out.append(tuple(cyc))
        return tuple(out)

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def deficiency(self) -> int:
        """degree minus number of cycles; for an involution, its transposition count."""
        return self.degree - len(self.cycles())

    def is_identity(self) -> bool:
        return all(img == i for i, img in enumerate(self.images, start=1))

    def is_involution(self) -> bool:
        return all(self.images[img - 1] == i for i, img in enumerate(self.images, start=1))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, n: int, *cycles: Sequence[int]) -> "Permutation":
        imgs = list(range(1, n + 1))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                imgs[a - 1] = b
        return cls(tuple(imgs))

    @classmethod
    def from_zero_based(cls, row: Iterable[int]) -> "Permutation":
        return cls(tuple(int(v) + 1 for v in row))


def is_transitive(perms: Sequence[Permutation]) -> bool:
    """True iff the generated subgroup has a single orbit on {1..n}."""
    if not perms:
        return False
    n = perms[0].degree
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for p in perms:
        if p.degree != n:
            raise ValueError("degree mismatch")
        for x in range(n):
            ra, rb = find(x), find(p.images[x] - 1)
            if ra != rb:
                parent[ra] = rb
    return all(find(x) == find(0) for x in range(n))


def compose_cycle_type(ps: Sequence[Permutation]) -> tuple[Permutation, tuple[int, ...]]:
    """Product under the left-to-right convention, plus its sorted cycle type."""
    if not ps:
        raise ValueError("empty composition")
    prod = ps[0]
    for p in ps[1:]:
        prod = prod * p
    return prod, prod.cycle_type()


# ------------------------------------------------------------ constructors


def two_involutions_for_cycle(n: int) -> tuple[Permutation, Permutation]:
    """Involutions with product a full n-cycle and n-1 transpositions total.

    Dihedral scheme on residues 0..n-1: the first reflection is
    x -> 1 - x, the second x -> -x, so the product is the rotation
    x -> x - 1.  For n = 1, 2, 3 this reproduces the reference outputs
    (id, id), ((1 2), id), ((1 2), (2 3)).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    s1 = Permutation(tuple(((1 - x) % n) + 1 for x in range(n)))
    s2 = Permutation(tuple(((-x) % n) + 1 for x in range(n)))
    assert s1.is_involution() and s2.is_involution()
    assert s1.deficiency() + s2.deficiency() == n - 1
    assert (s1 * s2).cycle_type() == (n,)
    return s1, s2


def _nest_chords(start: int, betweens: Sequence[int], innermost: int) -> tuple[list[tuple[int, int]], int]:
    """Nested chords realizing face sizes [*betweens, innermost] from `start`.

    Every between-face needs size >= 2 (one position from each chord
    endpoint).  Returns the chords and the first free position after the
    gadget; the outermost right endpoint joins the outer face.
    """
    lefts = [start]
    for f in betweens:
        lefts.append(lefts[-1] + (f - 1))
    inner_left = lefts[-1]
    inner_right = inner_left + innermost
    chords = [(inner_left, inner_right)]
    right = inner_right
    for left in reversed(lefts[:-1]):
        right += 1
        chords.append((left, right))
    return chords, right + 1


def _noncrossing_chords(parts_desc: tuple[int, ...]) -> list[tuple[int, int]] | None:
    """Disjoint chords on the n-cycle x -> x+1 cutting it into faces `parts_desc`.

    The largest part is the outer face.  One nested gadget carries all
    parts >= 2 (innermost slot may hold a 1); every further part equal
    to 1 costs its own two-position gadget, and each gadget donates one
    position to the outer face, so the scheme needs outer >= gadgets.
    Returns None when that fails (a few types are still realizable by
    non-planar solutions; the exhaustive oracle covers those).
    """
    outer, rest = parts_desc[0], list(parts_desc[1:])
    ones = [p for p in rest if p == 1]
    bigs = [p for p in rest if p >= 2]
    gadget_count = max(1, len(ones))
    if outer < gadget_count:
        return None
    chords: list[tuple[int, int]] = []
    pos = 0
    if ones:
        nest_faces = (bigs, 1)
        ones = ones[1:]
    else:
        nest_faces = (bigs[:-1], bigs[-1])
    nest, pos = _nest_chords(pos, *nest_faces)
    chords.extend(nest)
    for _ in ones:
        chords.append((pos, pos + 1))
        pos += 2
    return chords


def three_involutions_for_type(r: Sequence[int]) -> tuple[Permutation, Permutation, Permutation]:
    """Involutions with n+k-2 transpositions, transitive, product of type sorted(r).

    The first two are the dihedral pair with product the rotation
    c: x -> x-1; the third is a disjoint union of chords chosen so that
    c composed with it splits into cycles of the prescribed sizes.  The
    chord scheme is built for the rotation x -> x+1 and mirrored through
    x -> -x.  Types the planar scheme cannot reach fall back to the
    exhaustive oracle (degree <= ORACLE_DEGREE_BOUND); provably empty
    types raise InfeasibleCycleTypeError.

    Output depends only on the multiset of r.
    """
    parts = tuple(sorted((int(p) for p in r), reverse=True))
    if not parts or parts[-1] < 1:
        raise ValueError("r must be a nonempty list of positive integers")
    n, k = sum(parts), len(parts)
    required = n + k - 2
    s1, s2 = two_involutions_for_cycle(n)
    if k == 1:
        s3 = Permutation.identity(n)
    else:
        chords = _noncrossing_chords(parts)
        if chords is not None:
            imgs = list(range(n))
            for a, b in chords:
                # mirror through x -> -x: the scheme is stated for x -> x+1
                a2, b2 = (-a) % n, (-b) % n
                imgs[a2], imgs[b2] = b2, a2
            s3 = Permutation.from_zero_based(imgs)
        else:
            if n > ORACLE_DEGREE_BOUND:
                raise InfeasibleCycleTypeError(
                    f"type {parts}: no planar chord scheme and degree {n} exceeds "
                    f"the exhaustive bound {ORACLE_DEGREE_BOUND}"
                )
            cert = triple_certificates(n)[parts]
            if cert.lexmin_at_required is None:
                raise InfeasibleCycleTypeError(
                    f"type {parts}: exhaustive search proves no transitive involution "
                    f"triple with {required} transpositions exists"
                )
            return cert.lexmin_at_required
    total = s1.deficiency() + s2.deficiency() + s3.deficiency()
    prod = s1 * s2 * s3
    assert s3.is_involution()
    assert total == required, (parts, total, required)
    assert prod.cycle_type() == parts, (parts, prod.cycle_type())
    assert is_transitive([s1, s2, s3])
    return s1, s2, s3


# ------------------------------------------------------------ disc and sphere covers


@dataclass(frozen=True)
class BranchedDiscCover:
    """Cover of a disc branched at up to two interior marked points.

    The base disc carries a CW structure: one boundary vertex, the
    boundary loop b, loops l1 and l2 around the marked points, a
    pair-of-pants cell with word l1 l2 b^-1 and one small disc cell
    around each marked point.
    """

    degree: int
    branch_monodromies: tuple[Permutation, ...]
    boundary_monodromy: Permutation

    def __post_init__(self) -> None:
        if len(self.branch_monodromies) > 2:
            raise ValueError("at most two branch monodromies")
        prod = Permutation.identity(self.degree)
        for m in self.branch_monodromies:
            if m.degree != self.degree:
                raise ValueError("degree mismatch")
            if not m.is_involution():
                raise ValueError("branch monodromies must be involutions")
            prod = prod * m
        if prod != self.boundary_monodromy:
            raise ValueError("branch monodromies must compose to the boundary monodromy")

    def euler_characteristic(self) -> int:
        """Cell count of the covering complex: n - 3n + (n + c1 + c2)."""
        cells = self.degree  # lifts of the simply connected pants cell
        for m in self.branch_monodromies:
            cells += len(m.cycles())
        if len(self.branch_monodromies) < 2:
            cells += self.degree * (2 - len(self.branch_monodromies))
        return cells - 2 * self.degree

    def is_connected(self) -> bool:
        if not self.branch_monodromies:
            return self.degree == 1
        return is_transitive(self.branch_monodromies)

    def boundary_circles(self) -> tuple[int, ...]:
        """Degrees with which the boundary preimages wrap the base circle."""
        return self.boundary_monodromy.cycle_type()

    def branch_points_upstairs(self) -> int:
        return sum(m.deficiency() for m in self.branch_monodromies)

    def is_disc(self) -> bool:
        return (
            self.is_connected()
            and self.euler_characteristic() == 1
            and len(self.boundary_circles()) == 1
        )


def extend_disc_cover(n: int) -> BranchedDiscCover:
    """Extend the connected degree-n circle cover over the disc.

    Branching happens at the two interior marked points with order 2,
    via the dihedral involution pair; the total space is again a disc.
    """
    s1, s2 = two_involutions_for_cycle(n)
    cover = BranchedDiscCover(n, (s1, s2), s1 * s2)
    assert cover.is_disc()
    return cover


@dataclass(frozen=True)
class SphereCover:
    """Branched self-cover of the sphere with four branch values.

    monodromies = (m0, m1, m2, m3) around the branch values; m1..m3 are
    involutions, the ordered product is the identity, and the action is
    transitive.
    """

    degree: int
    monodromies: tuple[Permutation, Permutation, Permutation, Permutation]

    def __post_init__(self) -> None:
        for m in self.monodromies:
            if m.degree != self.degree:
                raise ValueError("degree mismatch")
        for m in self.monodromies[1:]:
            if not m.is_involution():
                raise ValueError("monodromies over x1, x2, x3 must be involutions")
        prod, _ = compose_cycle_type(self.monodromies)
        if not prod.is_identity():
            raise ValueError("monodromies must compose to the identity")
        if not is_transitive(list(self.monodromies)):
            raise ValueError("cover must be connected")

    def euler_characteristic(self) -> int:
        return 2 * self.degree - sum(m.deficiency() for m in self.monodromies)


def sphere_cover_for_type(r: Sequence[int]) -> SphereCover:
    """Sphere cover with cycle type r over x0 and involutions over x1..x3."""
    parts = tuple(sorted((int(p) for p in r), reverse=True))
    s1, s2, s3 = three_involutions_for_type(parts)
    m0 = (s1 * s2 * s3).inverse()
    cover = SphereCover(sum(parts), (m0, s1, s2, s3))
    assert m0.cycle_type() == parts
    assert cover.euler_characteristic() == 2
    return cover


def riemann_hurwitz(base_chi: int, degree: int, ramification_orders: Iterable[int]) -> int:
    """chi(total) = degree * chi(base) - sum of (e - 1) over ramification orders e."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    return degree * base_chi - sum(e - 1 for e in ramification_orders)


# ------------------------------------------------------------ exhaustive oracles


@functools.lru_cache(maxsize=None)
def _involution_table(n: int) -> np.ndarray:
    """All involutions of S_n as 0-based image rows, lexicographically sorted."""
    rows: list[tuple[int, ...]] = []

    def rec(points: tuple[int, ...], imgs: dict[int, int]) -> None:
        if not points:
            rows.append(tuple(imgs[i] for i in range(n)))
            return
        p = points[0]
        imgs[p] = p
        rec(points[1:], imgs)
        for idx in range(1, len(points)):
            q = points[idx]
            imgs[p], imgs[q] = q, p
            rec(points[1:idx] + points[idx + 1 :], imgs)
            del imgs[q]
        del imgs[p]

    rec(tuple(range(n)), {})
    rows.sort()
    return np.array(rows, dtype=np.int8)


def _partitions(n: int, cap: int | None = None) -> list[tuple[int, ...]]:
    if n == 0:
        return [()]
    cap = n if cap is None else min(cap, n)
    out = []
    for head in range(cap, 0, -1):
        for tail in _partitions(n - head, head):
            out.append((head,) + tail)
    return out


def _fix_signature(parts: tuple[int, ...], n: int) -> np.ndarray:
    """fix(p^m) for m = 1..n determines the cycle type uniquely."""
    sig = np.zeros(n, dtype=np.int16)
    for m in range(1, n + 1):
        sig[m - 1] = sum(d for d in parts if m % d == 0)
    return sig


def _transitive_rows(table: np.ndarray, cols: list[np.ndarray]) -> np.ndarray:
    """Vectorized orbit check: one row per candidate tuple of involutions."""
    perms = [table[c] for c in cols]
    m, n = perms[0].shape if perms[0].size else (0, table.shape[1])
    if m == 0:
        return np.zeros(0, dtype=bool)
    labels = np.tile(np.arange(n, dtype=np.int8), (m, 1))
    for _ in range(n):
        for p in perms:
            np.minimum(labels, np.take_along_axis(labels, p, axis=1), out=labels)
    return (labels == 0).all(axis=1)


@dataclass(frozen=True)
class TypeCertificate:
    """Exhaustive search result for one cycle type at one degree.

    Covers all involution triples with transposition total at most
    required_total (= n + k - 2); min_transitive_total below that bound
    would disprove minimality, None means no transitive solution exists
    in the searched range at all.
    """

    degree: int
    product_type: tuple[int, ...]
    required_total: int
    min_transitive_total: int | None
    solutions_at_required: int
    lexmin_at_required: tuple[Permutation, Permutation, Permutation] | None


@functools.lru_cache(maxsize=None)
def triple_certificates(n: int) -> dict[tuple[int, ...], "TypeCertificate"]:
    """One exhaustive sweep over all involution triples of S_n.

    For every partition p of n, collects the triples whose product has
    cycle type p and whose transposition total is at most n + len(p) - 2,
    then filters by transitivity.  Degrees above ORACLE_DEGREE_BOUND are
    refused.
    """
    if n > ORACLE_DEGREE_BOUND:
        raise DegreeBoundExceededError(f"degree {n} exceeds bound {ORACLE_DEGREE_BOUND}")
    table = _involution_table(n)
    K = table.shape[0]
    tcounts = np.array([n - len(Permutation.from_zero_based(row).cycles()) for row in table], dtype=np.int16)
    parts_list = _partitions(n)
    sigs = {p: _fix_signature(p, n) for p in parts_list}
    bounds = {p: n + len(p) - 2 for p in parts_list}
    ar = np.arange(n, dtype=np.int8)
    found: dict[tuple[int, ...], list[np.ndarray]] = {p: [] for p in parts_list}
    pair_tot = tcounts[None, :] + tcounts[:, None]  # axis 0 = third involution
    for i in range(K):
        first = table[:, table[i]]  # row j = table[j] after table[i]
        q = table[:, first]  # [l, j, x] = (s_i s_j s_l)(x)
        fixes = np.empty((n, K, K), dtype=np.int16)
        power = q
        fixes[0] = (q == ar).sum(axis=2)
        for m in range(1, n):
            power = np.take_along_axis(q, power, axis=2)
            fixes[m] = (power == ar).sum(axis=2)
        totals = pair_tot + int(tcounts[i])
        for p in parts_list:
            sig = sigs[p]
            match = (fixes == sig[:, None, None]).all(axis=0)
            match &= totals <= bounds[p]
            if match.any():
                ls, js = np.nonzero(match)
                rows = np.empty((ls.size, 4), dtype=np.int32)
                rows[:, 0] = i
                rows[:, 1] = js
                rows[:, 2] = ls
                rows[:, 3] = totals[ls, js]
                found[p].append(rows)
    out: dict[tuple[int, ...], TypeCertificate] = {}
    for p in parts_list:
        required = bounds[p]
        if found[p]:
            rows = np.concatenate(found[p])
            ok = _transitive_rows(table, [rows[:, 0], rows[:, 1], rows[:, 2]])
            rows = rows[ok]
        else:
            rows = np.empty((0, 4), dtype=np.int32)
        min_total = int(rows[:, 3].min()) if rows.size else None
        at_req = rows[rows[:, 3] == required]
        lexmin = None
        if at_req.size:
            order = np.lexsort((at_req[:, 2], at_req[:, 1], at_req[:, 0]))
            i0, j0, l0, _ = at_req[order[0]]
            lexmin = tuple(Permutation.from_zero_based(table[idx]) for idx in (i0, j0, l0))
        out[p] = TypeCertificate(n, p, required, min_total, int(at_req.shape[0]), lexmin)
    return out


@dataclass(frozen=True)
class OracleQuery:
    """Constraint set for the exhaustive involution search.

    product_type is a partition of degree (any order); transitivity is
    always required, matching both lemmas.  total_transpositions = None
    enumerates every achievable total.
    """

    degree: int
    involution_count: int
    product_type: tuple[int, ...]
    total_transpositions: int | None = None
    max_degree: int = ORACLE_DEGREE_BOUND


def brute_force_oracle(constraints: OracleQuery) -> list[tuple[Permutation, ...]]:
    """All involution tuples meeting the constraints, in lexicographic order.

    Exhaustive over the full involution table of S_n; intended for desk
    degrees (the certificates cover bulk certification at 6 and 7).
    """
    q = constraints
    if q.degree > q.max_degree:
        raise DegreeBoundExceededError(f"degree {q.degree} exceeds bound {q.max_degree}")
    if q.involution_count not in (2, 3):
        raise ValueError("involution_count must be 2 or 3")
    parts = tuple(sorted(q.product_type, reverse=True))
    if sum(parts) != q.degree:
        raise ValueError("product_type must partition the degree")
    n = q.degree
    table = _involution_table(n)
    K = table.shape[0]
    tcounts = np.array([n - len(Permutation.from_zero_based(r).cycles()) for r in table], dtype=np.int16)
    sig = _fix_signature(parts, n)
    ar = np.arange(n, dtype=np.int8)
    out: list[tuple[Permutation, ...]] = []

    def emit(idxs: tuple[int, ...]) -> None:
        perms = tuple(Permutation.from_zero_based(table[i]) for i in idxs)
        if is_transitive(list(perms)):
            out.append(perms)

    if q.involution_count == 2:
        for i in range(K):
            prods = table[:, table[i]]  # row j = s_i s_j
            fixes_ok = np.ones(K, dtype=bool)
            power = prods
            fixes_ok &= (prods == ar).sum(axis=1) == sig[0]
            for m in range(1, n):
                power = np.take_along_axis(prods, power, axis=1)
                fixes_ok &= (power == ar).sum(axis=1) == sig[m]
            if q.total_transpositions is not None:
                fixes_ok &= (tcounts + int(tcounts[i])) == q.total_transpositions
            for j in np.nonzero(fixes_ok)[0]:
                emit((i, int(j)))
    else:
        for i in range(K):
            first = table[:, table[i]]
            for j in range(K):
                prods = table[:, first[j]]  # row l = s_i s_j s_l
                fixes_ok = np.ones(K, dtype=bool)
                power = prods
                fixes_ok &= (prods == ar).sum(axis=1) == sig[0]
                for m in range(1, n):
                    power = np.take_along_axis(prods, power, axis=1)
                    fixes_ok &= (power == ar).sum(axis=1) == sig[m]
                if q.total_transpositions is not None:
                    fixes_ok &= (tcounts + int(tcounts[i]) + int(tcounts[j])) == q.total_transpositions
                for l in np.nonzero(fixes_ok)[0]:
                    emit((i, j, int(l)))
    return out
