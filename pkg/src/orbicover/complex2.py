"""Combinatorial 2-complexes with corner-angle metrics.

A complex stores undirected edges plus attaching words over signed
1-based edge identifiers (+e traverses tail to head, -e the reverse),
so the reversal pairing is implicit.  Metrics decompose each face into
right-angled pentagon cells; every angle is recorded as an integer
number of quarter turns (units of pi/2), which keeps all angle
arithmetic exact.

The fixed base orbihedron lives in build_Y: one vertex, two loops, four
faces each glued from two right-angled pentagons along four of their
five sides.  The three glued-corner pairs inside a face become cone
points of angle pi, twelve in total, and those are the only points
where covers may branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .presentation import GroupPresentation, Word, normalize


@dataclass(frozen=True)
class Complex2:
    """2-complex: vertices 0..n-1, edges as (tail, head), faces as closed words."""

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    faces: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.vertex_count < 0:
            raise ValueError("vertex_count must be nonnegative")
        for tail, head in self.edges:
            if not (0 <= tail < self.vertex_count and 0 <= head < self.vertex_count):
                raise ValueError("edge endpoint out of range")
        for fi, word in enumerate(self.faces):
            if not word:
                raise ValueError(f"face {fi}: attaching word must be nonempty")
            for letter in word:
                if letter == 0 or abs(letter) > len(self.edges):
                    raise ValueError(f"face {fi}: unknown edge {letter}")
            for a, b in zip(word, word[1:] + word[:1]):
                if self.head_of(a) != self.tail_of(b):
                    raise ValueError(f"face {fi}: attaching word is not a closed path")

    def tail_of(self, letter: int) -> int:
        tail, head = self.edges[abs(letter) - 1]
        return tail if letter > 0 else head

    def head_of(self, letter: int) -> int:
        tail, head = self.edges[abs(letter) - 1]
        return head if letter > 0 else tail

    def is_connected(self) -> bool:
        if self.vertex_count == 0:
            return True
        parent = list(range(self.vertex_count))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for tail, head in self.edges:
            parent[find(tail)] = find(head)
        return len({find(v) for v in range(self.vertex_count)}) == 1


@dataclass(frozen=True)
class MarkedPoint:
    """Cone point addressed by (face, interior vertex index)."""

    face: int
    index: int
    branching_allowed: bool = True


@dataclass(frozen=True)
class FaceMetric:
    """Right-angled pentagon decomposition of one face.

    Angles are quarter turns.  interior_angles lists the metric vertices
    in the open face, boundary_angles those in the interior of boundary
    edges, corner_angles the visit angles at the attaching word's
    corners (one per letter).  Every pentagon corner lands at exactly
    one metric vertex, so the quarters add up to 5 per pentagon.
    """

    pentagon_count: int
    interior_angles: tuple[int, ...]
    boundary_angles: tuple[int, ...]
    corner_angles: tuple[int, ...]
    marked_interior: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.pentagon_count < 1:
            raise ValueError("a face needs at least one pentagon")
        for q in self.interior_angles + self.boundary_angles + self.corner_angles:
            if q < 1:
                raise ValueError("angles must be positive multiples of pi/2")
        budget = 5 * self.pentagon_count
        total = sum(self.interior_angles) + sum(self.boundary_angles) + sum(self.corner_angles)
        if total != budget:
            raise ValueError(f"angle quarters {total} != 5 * pentagon_count {budget}")
        for i in self.marked_interior:
            if not (0 <= i < len(self.interior_angles)):
                raise ValueError("marked interior index out of range")

    def area(self) -> float:
        return self.pentagon_count * math.pi / 2


@dataclass(frozen=True)
class CornerMetric:
    faces: tuple[FaceMetric, ...]

    def total_area(self) -> float:
        return sum(f.area() for f in self.faces)


def euler_characteristic(c: Complex2) -> int:
    return c.vertex_count - len(c.edges) + len(c.faces)


def fundamental_group(c: Complex2, basepoint: int = 0) -> GroupPresentation:
    """Spanning-tree presentation: generators are the non-tree edges.

    The tree is grown breadth first from the basepoint, scanning edges
    in identifier order, so the presentation is deterministic.
    """
    if c.vertex_count == 0:
        raise ValueError("empty complex")
    if not (0 <= basepoint < c.vertex_count):
        raise ValueError("basepoint out of range")
    if not c.is_connected():
        raise ValueError("complex is not connected")
    in_tree = [False] * len(c.edges)
    reached = [False] * c.vertex_count
    reached[basepoint] = True
    queue = [basepoint]
    while queue:
        v = queue.pop(0)
        for eid, (tail, head) in enumerate(c.edges):
            if in_tree[eid]:
                continue
            if tail == v and not reached[head]:
                in_tree[eid] = True
                reached[head] = True
                queue.append(head)
            elif head == v and not reached[tail]:
                in_tree[eid] = True
                reached[tail] = True
                queue.append(tail)
    gen_of_edge: dict[int, int] = {}
    for eid in range(len(c.edges)):
        if not in_tree[eid]:
            gen_of_edge[eid] = len(gen_of_edge) + 1
    relators: list[Word] = []
    for word in c.faces:
        letters = []
        for letter in word:
            eid = abs(letter) - 1
            if eid in gen_of_edge:
                letters.append(gen_of_edge[eid] if letter > 0 else -gen_of_edge[eid])
        relators.append(tuple(letters))
    return normalize(GroupPresentation(len(gen_of_edge), tuple(relators)))


# ------------------------------------------------------------ links and curvature


@dataclass(frozen=True)
class LinkGraph:
    """Link of a complex vertex: nodes are edge ends, arcs are face corners.

    A node ("end", e, 0) is the tail end of edge e at the vertex, 1 the
    head end.  Each arc carries its corner angle in quarter turns plus
    the (face, position) it came from.
    """

    nodes: tuple[tuple[int, int], ...]
    arcs: tuple[tuple[tuple[int, int], tuple[int, int], int, int, int], ...]

    def min_cycle_quarters(self) -> int | None:
        """Weight of the lightest embedded cycle, None if the link is a forest."""
        best: int | None = None
        for k, (a, b, w, _, _) in enumerate(self.arcs):
            if a == b:
                best = w if best is None else min(best, w)
                continue
            # lightest a..b path avoiding arc k, Dijkstra on the rest
            dist = {a: 0}
            todo = {a}
            while todo:
                u = min(todo, key=lambda x: dist[x])
                todo.discard(u)
                for k2, (p, q, w2, _, _) in enumerate(self.arcs):
                    if k2 == k or p == q:
                        continue
                    for s, t in ((p, q), (q, p)):
                        if s == u and dist[u] + w2 < dist.get(t, 1 << 30):
                            dist[t] = dist[u] + w2
                            todo.add(t)
            if b in dist:
                cyc = dist[b] + w
                best = cyc if best is None else min(best, cyc)
        return best


def _corner_nodes(c: Complex2, word: tuple[int, ...], pos: int) -> tuple[tuple[int, int], tuple[int, int], int]:
    """Arrive end, depart end, and the vertex of the corner after letter pos."""
    a = word[pos]
    b = word[(pos + 1) % len(word)]
    arrive = (abs(a) - 1, 1 if a > 0 else 0)
    depart = (abs(b) - 1, 0 if b > 0 else 1)
    return arrive, depart, c.head_of(a)


def vertex_link(c: Complex2, m: CornerMetric, v: int) -> LinkGraph:
    if not (0 <= v < c.vertex_count):
        raise ValueError("vertex out of range")
    if len(m.faces) != len(c.faces):
        raise ValueError("metric does not match the complex")
    nodes = []
    for eid, (tail, head) in enumerate(c.edges):
        if tail == v:
            nodes.append((eid, 0))
        if head == v:
            nodes.append((eid, 1))
    arcs = []
    for fi, word in enumerate(c.faces):
        fm = m.faces[fi]
        if len(fm.corner_angles) != len(word):
            raise ValueError(f"face {fi}: corner angles do not match the attaching word")
        for pos in range(len(word)):
            arrive, depart, corner_vertex = _corner_nodes(c, word, pos)
            if corner_vertex == v:
                arcs.append((arrive, depart, fm.corner_angles[pos], fi, pos))
    return LinkGraph(tuple(nodes), tuple(arcs))


@dataclass(frozen=True)
class LinkReport:
    passed: bool
    violations: tuple[str, ...]


def cat_link_check(c: Complex2, m: CornerMetric) -> LinkReport:
    """Negative-curvature link condition with cone points of angle pi.

    Every embedded cycle in every vertex link must have angular length
    at least 2 pi; interior metric vertices need total angle 2 pi unless
    marked, in which case exactly pi; metric vertices on edge interiors
    need at least pi so that cross-edge link cycles stay long enough.
    """
    violations: list[str] = []
    if len(m.faces) != len(c.faces):
        return LinkReport(False, ("metric face count does not match the complex",))
    for v in range(c.vertex_count):
        link = vertex_link(c, m, v)
        worst = link.min_cycle_quarters()
        if worst is not None and worst < 4:
            violations.append(f"vertex {v}: link cycle of angle {worst} quarters < 2 pi")
    for fi, fm in enumerate(m.faces):
        marked = set(fm.marked_interior)
        for i, q in enumerate(fm.interior_angles):
            if i in marked:
                if q != 2:
                    violations.append(f"face {fi} cone point {i}: angle {q} quarters != pi")
            elif q < 4:
                violations.append(f"face {fi} interior vertex {i}: angle {q} quarters < 2 pi")
        for i, q in enumerate(fm.boundary_angles):
            if q < 2:
                violations.append(f"face {fi} edge vertex {i}: angle {q} quarters < pi")
    return LinkReport(not violations, tuple(violations))


# ------------------------------------------------------------ the base orbihedron


def pentagon_constants() -> tuple[float, float]:
    """Side length and area of the regular right-angled hyperbolic pentagon.

    All five angles pi/2 force cosh l = sinh^2 l on the side length, so
    cosh l is the positive root of x^2 - x - 1 (the golden ratio), and
    Gauss-Bonnet gives area 3 pi - 5 pi/2 = pi/2.
    """
    side = math.acosh((1 + math.sqrt(5)) / 2)
    area = math.pi / 2
    assert abs(math.cosh(side) - math.sinh(side) ** 2) < 1e-12
    return side, area


def build_Y() -> tuple[Complex2, CornerMetric, list[MarkedPoint]]:
    """The base orbihedron: figure eight plus four pentagon-pair discs.

    One vertex, loops g and r, faces attached along g r^-1, g r, g, r.
    Each face is two right-angled pentagons glued along four of their
    five sides; the four glued corner pairs yield three interior cone
    points of angle pi and the free-side endpoints land on the boundary
    with angle pi, so the boundary is locally geodesic.
    """
    g, r = 1, 2
    complex2 = Complex2(
        vertex_count=1,
        edges=((0, 0), (0, 0)),
        faces=((g, -r), (g, r), (g,), (r,)),
    )
    two_corner = FaceMetric(
        pentagon_count=2,
        interior_angles=(2, 2, 2),
        boundary_angles=(),
        corner_angles=(2, 2),
        marked_interior=(0, 1, 2),
    )
    one_corner = FaceMetric(
        pentagon_count=2,
        interior_angles=(2, 2, 2),
        boundary_angles=(2,),
        corner_angles=(2,),
        marked_interior=(0, 1, 2),
    )
    metric = CornerMetric((two_corner, two_corner, one_corner, one_corner))
    marked = [MarkedPoint(face, index, True) for face in range(4) for index in range(3)]
    return complex2, metric, marked
