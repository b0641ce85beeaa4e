"""Curve systems on closed surfaces, encoded as rotation maps.

The pipeline in this module starts from a group presentation, lays out
red curves on an oriented genus-k surface, doubles and deforms them so
that every intersection is a triple point, trades each triple point for
a crosscap whose core is a green curve, picks the checkerboard coloring
and curve orientations, and finally assembles the blueprint 2-complex
whose fundamental group matches the input group.

Surfaces are stored as rotation systems with side flags: darts are
integers, `edge_pairing` is a fixed-point-free involution, `rotation`
gives the counterclockwise dart order at each vertex, and a flagged
edge glues its two vertex neighbourhoods with a reflection.  Faces are
traced with signed darts so flags are handled uniformly; the trace rule
and its mirror pairing are exercised against the classical surfaces in
the tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .complex2 import Complex2, CornerMetric, FaceMetric, MarkedPoint
from .presentation import GroupPresentation, normalize

Blade = tuple[int, int]


class NetError(ValueError):
    """A curve-net operation received input it cannot handle."""


class ColoringError(NetError):
    """The complement of the curves admits no checkerboard coloring."""


class OrientationError(NetError):
    """No curve orientations satisfy the alternation and disc rules."""


# --------------------------------------------------------------- surfaces


class RotationSurface:
    """Closed surface as a rotation system with orientation flags."""

    def __init__(
        self,
        edge_pairing: tuple[int, ...],
        rotation: tuple[int, ...],
        side_flag: tuple[bool, ...],
    ) -> None:
        n = len(edge_pairing)
        if len(rotation) != n or len(side_flag) != n:
            raise ValueError("dart tables must have equal length")
        for d in range(n):
            p = edge_pairing[d]
            if not 0 <= p < n or p == d or edge_pairing[p] != d:
                raise ValueError(f"edge_pairing is not a free involution at dart {d}")
            if side_flag[d] != side_flag[p]:
                raise ValueError(f"side flag differs across edge at dart {d}")
        if sorted(rotation) != list(range(n)):
            raise ValueError("rotation is not a permutation")
        self.edge_pairing = tuple(edge_pairing)
        self.rotation = tuple(rotation)
        self.side_flag = tuple(side_flag)
        self.n_darts = n
        inv = [0] * n
        for d in range(n):
            inv[rotation[d]] = d
        self.rotation_inverse = tuple(inv)
        self._cache: dict[str, object] = {}

    @property
    def darts(self) -> range:
        return range(self.n_darts)

    def sign(self, dart: int) -> int:
        return -1 if self.side_flag[dart] else 1

    def vertices(self) -> tuple[tuple[int, ...], ...]:
        got = self._cache.get("vertices")
        if got is None:
            seen = [False] * self.n_darts
            cycles = []
            for d0 in range(self.n_darts):
                if seen[d0]:
                    continue
                cyc = []
                d = d0
                while not seen[d]:
                    seen[d] = True
                    cyc.append(d)
                    d = self.rotation[d]
                cycles.append(tuple(cyc))
            got = tuple(cycles)
            self._cache["vertices"] = got
        return got

    def vertex_of(self, dart: int) -> int:
        got = self._cache.get("vertex_of")
        if got is None:
            got = {}
            for vi, cyc in enumerate(self.vertices()):
                for d in cyc:
                    got[d] = vi
            self._cache["vertex_of"] = got
        return got[dart]

    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(
            (d, self.edge_pairing[d]) for d in range(self.n_darts) if d < self.edge_pairing[d]
        )

    # face tracing: blade (d, s) walks along dart d on side s; crossing an
    # edge multiplies the side by the edge sign, then turns by rotation
    # (counterclockwise on side +1, clockwise on side -1).
    def blade_next(self, blade: Blade) -> Blade:
        d, s = blade
        s2 = s * self.sign(d)
        d2 = self.edge_pairing[d]
        return (self.rotation[d2] if s2 > 0 else self.rotation_inverse[d2], s2)

    def blade_reverse(self, blade: Blade) -> Blade:
        d, s = blade
        return (self.edge_pairing[d], -s * self.sign(d))

    def face_orbits(self) -> tuple[tuple[Blade, ...], ...]:
        got = self._cache.get("face_orbits")
        if got is None:
            seen: set[Blade] = set()
            orbits = []
            for d0 in range(self.n_darts):
                for s0 in (1, -1):
                    if (d0, s0) in seen:
                        continue
                    orbit = []
                    b = (d0, s0)
                    while b not in seen:
                        seen.add(b)
                        orbit.append(b)
                        b = self.blade_next(b)
                    orbits.append(tuple(orbit))
            got = tuple(orbits)
            self._cache["face_orbits"] = got
        return got

    def blade_face(self) -> dict[Blade, int]:
        """Map each blade to its geometric face index.

        Orbits pair up under walk reversal; each pair is one face.  Faces
        are numbered by their smallest blade, sign +1 sorting first.
        """
        got = self._cache.get("blade_face")
        if got is None:
            orbits = self.face_orbits()
            owner: dict[Blade, int] = {}
            for i, orb in enumerate(orbits):
                for b in orb:
                    owner[b] = i
            key = lambda b: (b[0], 0 if b[1] > 0 else 1)
            pair_min: dict[int, Blade] = {}
            mate = {}
            for i, orb in enumerate(orbits):
                j = owner[self.blade_reverse(orb[0])]
                if j == i:
                    raise ValueError("face orbit equals its own reversal")
                mate[i] = j
                pair_min[i] = min(orb, key=key)
            reps = []
            for i in range(len(orbits)):
                if i < mate[i]:
                    reps.append(min(pair_min[i], pair_min[mate[i]], key=key))
            reps.sort(key=key)
            face_id = {rep: fi for fi, rep in enumerate(reps)}
            got = {}
            for i, orb in enumerate(orbits):
                rep = min(pair_min[i], pair_min[mate[i]], key=key)
                for b in orb:
                    got[b] = face_id[rep]
            self._cache["blade_face"] = got
        return got

    def face_count(self) -> int:
        return len(self.face_orbits()) // 2

    def euler_characteristic(self) -> int:
        return len(self.vertices()) - self.n_darts // 2 + self.face_count()

    def is_connected(self) -> bool:
        if self.n_darts == 0:
            return True
        seen = {0}
        todo = [0]
        while todo:
            d = todo.pop()
            for d2 in (self.rotation[d], self.edge_pairing[d]):
                if d2 not in seen:
                    seen.add(d2)
                    todo.append(d2)
        return len(seen) == self.n_darts

    def is_orientable(self) -> bool:
        """Balance test: local orientations exist iff every cycle of the
        vertex graph carries an even number of flagged edges."""
        nv = len(self.vertices())
        eps = [0] * nv
        for root in range(nv):
            if eps[root]:
                continue
            eps[root] = 1
            todo = [root]
            while todo:
                u = todo.pop()
                for d in self.vertices()[u]:
                    v = self.vertex_of(self.edge_pairing[d])
                    want = eps[u] * self.sign(d)
                    if eps[v] == 0:
                        eps[v] = want
                        todo.append(v)
                    elif eps[v] != want:
                        return False
        return True


# ----------------------------------------------------------------- curves


def _lex_min_rotation(cycle: tuple[int, ...]) -> tuple[int, ...]:
    if not cycle:
        return cycle
    best = cycle
    for i in range(1, len(cycle)):
        cand = cycle[i:] + cycle[:i]
        if cand < best:
            best = cand
    return best


@dataclass(frozen=True)
class Curve:
    """Closed transversal curve: one dart per edge, in travel order.

    `forward` is the orientation mark: +1 travels along the stored dart
    cycle, -1 against it, None before orientations are assigned.  The
    cycle is stored in its lexicographically minimal rotation.
    """

    color: str
    darts: tuple[int, ...]
    forward: int | None = None

    def __post_init__(self) -> None:
        if self.color not in ("red", "green"):
            raise ValueError(f"unknown curve color {self.color!r}")
        if not self.darts:
            raise ValueError("a curve needs at least one dart")
        if self.forward not in (None, 1, -1):
            raise ValueError("orientation mark must be +1, -1 or None")
        object.__setattr__(self, "darts", _lex_min_rotation(tuple(self.darts)))


@dataclass(frozen=True)
class Region:
    """One complementary region of the pure curve net."""

    faces: tuple[int, ...]
    euler_characteristic: int
    interior_vertices: int
    color: str | None = None

    @property
    def is_disc(self) -> bool:
        return self.euler_characteristic == 1


class CurveNet:
    """A surface together with its curves and derived intersection data.

    Treated as an immutable value: pipeline stages build new nets.
    `region_colors` aligns with the canonical region order and is set by
    `checkerboard_and_orient`.
    """

    def __init__(
        self,
        surface: RotationSurface,
        curves: tuple[Curve, ...],
        region_colors: tuple[str, ...] | None = None,
    ) -> None:
        self.surface = surface
        self.curves = tuple(curves)
        self.region_colors = None if region_colors is None else tuple(region_colors)
        self._cache: dict[str, object] = {}
        self._check_curves()

    def _check_curves(self) -> None:
        owner: dict[int, tuple[int, int]] = {}
        for ci, c in enumerate(self.curves):
            for p, d in enumerate(c.darts):
                if not 0 <= d < self.surface.n_darts:
                    raise ValueError(f"curve {ci}: dart {d} out of range")
                for dd in (d, self.surface.edge_pairing[d]):
                    if dd in owner:
                        raise ValueError(f"curve {ci}: dart {dd} used twice")
                    owner[dd] = (ci, p)
        for ci, c in enumerate(self.curves):
            n = len(c.darts)
            for p, d in enumerate(c.darts):
                arrive = self.surface.edge_pairing[d]
                depart = c.darts[(p + 1) % n]
                v = self.surface.vertex_of(arrive)
                if self.surface.vertex_of(depart) != v:
                    raise ValueError(f"curve {ci}: dart cycle breaks at position {p}")
                cyc = self.surface.vertices()[v]
                half = len(cyc) // 2
                if len(cyc) % 2 or cyc[(cyc.index(arrive) + half) % len(cyc)] != depart:
                    raise ValueError(
                        f"curve {ci}: passage through vertex {v} is not transversal"
                    )

    def curve_darts(self) -> frozenset[int]:
        got = self._cache.get("curve_darts")
        if got is None:
            ds = set()
            for c in self.curves:
                for d in c.darts:
                    ds.add(d)
                    ds.add(self.surface.edge_pairing[d])
            got = frozenset(ds)
            self._cache["curve_darts"] = got
        return got

    def dart_owner(self) -> dict[int, tuple[int, int]]:
        """Map curve-edge darts to (curve index, position of travel dart)."""
        got = self._cache.get("dart_owner")
        if got is None:
            got = {}
            for ci, c in enumerate(self.curves):
                for p, d in enumerate(c.darts):
                    got[d] = (ci, p)
                    got[self.surface.edge_pairing[d]] = (ci, p)
            self._cache["dart_owner"] = got
        return got

    def vertex_passages(self) -> dict[int, list[tuple[int, int]]]:
        """Curve passages by vertex: (curve, position of the out-dart)."""
        got = self._cache.get("vertex_passages")
        if got is None:
            got = {}
            for ci, c in enumerate(self.curves):
                for p, d in enumerate(c.darts):
                    got.setdefault(self.surface.vertex_of(d), []).append((ci, p))
            self._cache["vertex_passages"] = got
        return got

    @property
    def crossings(self) -> tuple[tuple[int, int, int, int], ...]:
        """Transversal double points as (curve, pos, curve, pos)."""
        out = []
        for v, passages in sorted(self.vertex_passages().items()):
            if len(passages) == 2 and len(self.surface.vertices()[v]) == 4:
                (ci, pi), (cj, pj) = sorted(passages)
                out.append((ci, pi, cj, pj))
        return tuple(out)

    @property
    def triple_points(self) -> tuple[int, ...]:
        return tuple(
            v
            for v, passages in sorted(self.vertex_passages().items())
            if len(passages) == 3
        )

    def crossing_vertices(self) -> tuple[int, ...]:
        return tuple(
            v
            for v, passages in sorted(self.vertex_passages().items())
            if len(passages) >= 2
        )

    # ------------------------------------------------------------ regions

    def region_next(self, blade: Blade) -> Blade:
        """Boundary step of the pure net: skeleton edges are transparent."""
        surf = self.surface
        curve = self.curve_darts()
        b = surf.blade_next(blade)
        while b[0] not in curve:
            d, s = b
            b = surf.blade_next((surf.edge_pairing[d], s * surf.sign(d)))
        return b

    def regions(self) -> tuple[Region, ...]:
        got = self._cache.get("regions")
        if got is None:
            got = self._compute_regions()
            self._cache["regions"] = got
        return got

    def region_of_face(self) -> dict[int, int]:
        self.regions()
        return self._cache["region_of_face"]  # type: ignore[return-value]

    def _compute_regions(self) -> tuple[Region, ...]:
        surf = self.surface
        bf = surf.blade_face()
        curve = self.curve_darts()
        parent = list(range(surf.face_count()))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        skeleton_edges = [
            (d, p) for d, p in surf.edges() if d not in curve
        ]
        for d, _ in skeleton_edges:
            ra, rb = find(bf[(d, 1)]), find(bf[(d, -1)])
            if ra != rb:
                parent[ra] = rb
        groups: dict[int, list[int]] = {}
        for f in range(surf.face_count()):
            groups.setdefault(find(f), []).append(f)
        reps = sorted(groups, key=lambda r: min(groups[r]))
        region_of_face = {}
        for ri, r in enumerate(reps):
            for f in groups[r]:
                region_of_face[f] = ri
        skel_count = [0] * len(reps)
        for d, _ in skeleton_edges:
            skel_count[region_of_face[bf[(d, 1)]]] += 1
        interior = [0] * len(reps)
        for cyc in surf.vertices():
            if all(d not in curve for d in cyc):
                interior[region_of_face[bf[(cyc[0], 1)]]] += 1
        colors = self.region_colors
        regions = []
        for ri, r in enumerate(reps):
            faces = tuple(sorted(groups[r]))
            chi = interior[ri] - skel_count[ri] + len(faces)
            color = colors[ri] if colors is not None else None
            regions.append(Region(faces, chi, interior[ri], color))
        self._cache["region_of_face"] = region_of_face
        return tuple(regions)

    @property
    def complementary_regions(self) -> tuple[Region, ...]:
        return self.regions()

    def blade_region(self, blade: Blade) -> int:
        return self.region_of_face()[self.surface.blade_face()[blade]]

    def boundary_circles(self) -> tuple[tuple[Blade, ...], ...]:
        """Region boundary walks over curve blades, one walk per side.

        Each geometric boundary circle appears twice (once per walk
        direction); consumers pick the direction they need.
        """
        got = self._cache.get("boundary_circles")
        if got is None:
            curve = self.curve_darts()
            seen: set[Blade] = set()
            circles = []
            for d in sorted(curve):
                for s in (1, -1):
                    if (d, s) in seen:
                        continue
                    walk = []
                    b = (d, s)
                    while b not in seen:
                        seen.add(b)
                        walk.append(b)
                        b = self.region_next(b)
                    circles.append(tuple(walk))
            got = tuple(circles)
            self._cache["boundary_circles"] = got
        return got

    def with_colors(self, region_colors: tuple[str, ...], curves: tuple[Curve, ...]) -> "CurveNet":
        return CurveNet(self.surface, curves, region_colors)


# ------------------------------------------------------------- map builder


class _MapBuilder:
    """Mutable dart allocator used while constructing rotation surfaces."""

    def __init__(self) -> None:
        self.pairing: dict[int, int] = {}
        self.cycles: list[tuple[int, ...]] = []
        self.flagged: set[int] = set()
        self._next = 0

    def dart(self) -> int:
        d = self._next
        self._next += 1
        return d

    def edge(self) -> tuple[int, int]:
        d1, d2 = self.dart(), self.dart()
        self.pairing[d1] = d2
        self.pairing[d2] = d1
        return d1, d2

    def flag_edge(self, dart: int) -> None:
        self.flagged.add(dart)
        self.flagged.add(self.pairing[dart])

    def vertex(self, darts_ccw: list[int] | tuple[int, ...]) -> None:
        self.cycles.append(tuple(darts_ccw))

    def build(self) -> RotationSurface:
        n = self._next
        pairing = [self.pairing[d] for d in range(n)]
        rotation = [-1] * n
        for cyc in self.cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                if rotation[a] != -1:
                    raise ValueError(f"dart {a} appears in two vertex cycles")
                rotation[a] = b
        if -1 in rotation:
            raise ValueError("some dart is missing from the vertex cycles")
        flags = [d in self.flagged for d in range(n)]
        return RotationSurface(tuple(pairing), tuple(rotation), tuple(flags))


# -------------------------------------------------- step 1: curves on sigma0


def _occurrence_sides(k: int) -> dict[int, tuple[int, int]]:
    """Polygon side occurrence -> (edge index, +1 forward / -1 backward).

    Sides 4i..4i+3 spell a_i b_i a_i^-1 b_i^-1; edges 2i and 2i+1 are the
    glued a_i and b_i loops.
    """
    table = {}
    for i in range(k):
        table[4 * i] = (2 * i, 1)
        table[4 * i + 1] = (2 * i + 1, 1)
        table[4 * i + 2] = (2 * i, -1)
        table[4 * i + 3] = (2 * i + 1, -1)
    return table


def _occurrence_partner(side: int) -> int:
    return side + 2 if side % 4 < 2 else side - 2


@dataclass(frozen=True)
class _Arc:
    """One hop of a curve, drawn as a semicircle over the unrolled boundary."""

    curve: int
    hop: int
    x_in: Fraction
    x_out: Fraction

    @property
    def center(self) -> Fraction:
        return (self.x_in + self.x_out) / 2

    @property
    def radius(self) -> Fraction:
        return abs(self.x_out - self.x_in) / 2

    @property
    def span(self) -> tuple[Fraction, Fraction]:
        return (min(self.x_in, self.x_out), max(self.x_in, self.x_out))


def _arc_crossing(a: _Arc, b: _Arc) -> tuple[Fraction, Fraction] | None:
    """Upper intersection (x, y^2) of two interleaved semicircles."""
    la, ra = a.span
    lb, rb = b.span
    if not (la < lb < ra < rb or lb < la < rb < ra):
        return None
    x = ((a.center**2 - a.radius**2) - (b.center**2 - b.radius**2)) / (
        2 * (a.center - b.center)
    )
    y2 = a.radius**2 - (x - a.center) ** 2
    if y2 <= 0:
        raise AssertionError("interleaved arcs must cross above the axis")
    return (x, y2)


def _plan_curves(g: GroupPresentation) -> list[list[int]]:
    """Out-occurrence word of every curve: handle killers then relators."""
    plans = [[4 * i + 1] for i in range(g.generator_count)]
    for rel in g.relators:
        plans.append(
            [4 * (abs(x) - 1) + (0 if x > 0 else 2) for x in rel]
        )
    return plans


def build_sigma0(g: GroupPresentation) -> tuple[RotationSurface, list[Curve]]:
    """Lay out the red curve system for `g` on the oriented genus-k surface.

    One handle-killing curve per generator, one curve per relator (read
    off the polygon sides), then null-homotopic helper circles until
    every curve meets another curve and the complement is all discs.
    """
    g = normalize(g)
    if g.generator_count == 0:
        g = GroupPresentation(1, ((1,),))
    net = _phase_a(g)
    net = _phase_b(net)
    return net.surface, list(net.curves)


def _phase_a(g: GroupPresentation) -> CurveNet:
    k = g.generator_count
    sides = _occurrence_sides(k)
    plans = _plan_curves(g)

    # one seam point per hop transition, collected along its glued edge
    edge_seams: dict[int, list[tuple[int, int]]] = {e: [] for e in range(2 * k)}
    for ci, word in enumerate(plans):
        for t, occ in enumerate(word):
            edge, _ = sides[occ]
            edge_seams[edge].append((ci, t))

    # edge parameters, slightly jittered so no two semicircles coincide
    params: dict[tuple[int, int], Fraction] = {}
    salt = 0
    for edge in range(2 * k):
        n = len(edge_seams[edge])
        for idx, key in enumerate(edge_seams[edge]):
            salt += 1
            params[key] = Fraction(idx + 1, n + 1) + Fraction(1, 10**7 + 7919 * salt)

    def display(occ: int, key: tuple[int, int]) -> Fraction:
        edge, direction = sides[occ]
        u = params[key]
        return occ + (u if direction > 0 else 1 - u)

    arcs: list[_Arc] = []
    for ci, word in enumerate(plans):
        m = len(word)
        for t in range(m):
            occ_in = _occurrence_partner(word[(t - 1) % m])
            arcs.append(
                _Arc(
                    ci,
                    t,
                    display(occ_in, (ci, (t - 1) % m)),
                    display(word[t], (ci, t)),
                )
            )

    crossings: dict[tuple[int, int], tuple[Fraction, Fraction]] = {}
    for ia, ib in itertools.combinations(range(len(arcs)), 2):
        hit = _arc_crossing(arcs[ia], arcs[ib])
        if hit is not None:
            crossings[(ia, ib)] = hit
    points = list(crossings.values())
    if len(set(points)) != len(points):
        raise AssertionError("degenerate arc configuration: concurrent crossings")

    b = _MapBuilder()

    # skeleton sub-edges: every glued edge is cut at its seam points
    sub: dict[int, list[tuple[int, int]]] = {}
    for edge in range(2 * k):
        order = sorted(edge_seams[edge], key=lambda key: params[key])
        sub[edge] = [b.edge() for _ in range(len(order) + 1)]
        edge_seams[edge] = order

    # arc pieces: cut each semicircle at its crossing points
    arc_events: dict[int, list[tuple[Fraction, tuple[int, int]]]] = {
        i: [] for i in range(len(arcs))
    }
    for (ia, ib), (x, _) in crossings.items():
        arc_events[ia].append((x, (ia, ib)))
        arc_events[ib].append((x, (ia, ib)))
    arc_pieces: dict[int, list[tuple[int, int]]] = {}
    arc_stops: dict[int, list[tuple[int, int]]] = {}
    for i, arc in enumerate(arcs):
        stops = sorted(arc_events[i], key=lambda ev: ev[0], reverse=arc.x_in > arc.x_out)
        arc_stops[i] = [ev[1] for ev in stops]
        arc_pieces[i] = [b.edge() for _ in range(len(stops) + 1)]

    # crossing vertices: counterclockwise dart order from exact tangents
    for (ia, ib), (x, y2) in crossings.items():
        a1, a2 = arcs[ia], arcs[ib]
        p1 = arc_pieces[ia][arc_stops[ia].index((ia, ib))]
        n1 = arc_pieces[ia][arc_stops[ia].index((ia, ib)) + 1]
        p2 = arc_pieces[ib][arc_stops[ib].index((ia, ib))]
        n2 = arc_pieces[ib][arc_stops[ib].index((ia, ib)) + 1]
        dir1 = 1 if a1.x_in < a1.x_out else -1
        dir2 = 1 if a2.x_in < a2.x_out else -1
        # travel tangents (y, c - x) * dir; cross product sign is exact
        cross_sign = dir1 * dir2 * (a2.center - a1.center)
        if cross_sign > 0:
            b.vertex([n1[0], n2[0], p1[1], p2[1]])
        else:
            b.vertex([n1[0], p2[1], p1[1], n2[0]])

    # seam vertices: (edge forward, arc on forward side, edge back, arc
    # on backward side); the polygon pictures glue with matching frames
    for edge in range(2 * k):
        order = edge_seams[edge]
        pieces = sub[edge]
        for idx, key in enumerate(order):
            ci, t = key
            word = plans[ci]
            occ_out = word[t]
            # the arc of hop t ends here, the arc of hop t+1 starts here
            out_arc = _arc_id(plans, ci, t)
            in_arc = _arc_id(plans, ci, (t + 1) % len(word))
            end_dart = arc_pieces[out_arc][-1][1]
            start_dart = arc_pieces[in_arc][0][0]
            if sides[occ_out][1] > 0:
                prim, part = end_dart, start_dart
            else:
                prim, part = start_dart, end_dart
            b.vertex([pieces[idx + 1][0], prim, pieces[idx][1], part])

    # the polygon corner vertex: the counterclockwise link leaves the
    # wedge at corner j through the end of side j-1 and resurfaces at the
    # corner sitting at the partner side's start
    star = []
    j = 0
    for _ in range(4 * k):
        side = (j - 1) % (4 * k)
        edge, direction = sides[side]
        if direction > 0:
            star.append(sub[edge][-1][1])
        else:
            star.append(sub[edge][0][0])
        j = _occurrence_partner(side)
    if len(set(star)) != 4 * k:
        raise AssertionError("polygon corner walk failed to close up")
    b.vertex(star)

    surface = b.build()
    curves = []
    for ci, word in enumerate(plans):
        cycle: list[int] = []
        for t in range(len(word)):
            cycle.extend(d for d, _ in arc_pieces[_arc_id(plans, ci, t)])
        color = "red"
        curves.append(Curve(color, tuple(cycle)))
    net = CurveNet(surface, tuple(curves))
    _assert_surface(net, 2 - 2 * k, orientable=True)
    return net


def _arc_id(plans: list[list[int]], ci: int, hop: int) -> int:
    return sum(len(w) for w in plans[:ci]) + hop


def _assert_surface(net: CurveNet, chi: int, orientable: bool | None = None) -> None:
    surf = net.surface
    if surf.euler_characteristic() != chi:
        raise AssertionError(
            f"euler characteristic {surf.euler_characteristic()} != expected {chi}"
        )
    if not surf.is_connected():
        raise AssertionError("surface came out disconnected")
    if orientable is not None and surf.is_orientable() != orientable:
        raise AssertionError("unexpected orientability")


# -------------------------------------------------------------- map editing


class _Editor:
    """Unpacks a net into mutable tables for local surgery.

    Edge cutting keeps the two original end darts, so vertex cycles that
    mention them stay valid; curve cycles are plain dart lists and are
    re-canonicalized by `finish`.
    """

    def __init__(self, net: CurveNet) -> None:
        surf = net.surface
        self.pair: dict[int, int] = {d: surf.edge_pairing[d] for d in surf.darts}
        self.cycles: list[list[int]] = [list(c) for c in surf.vertices()]
        self.flagged: set[int] = {d for d in surf.darts if surf.side_flag[d]}
        self.curve_cycles: list[list[int]] = [list(c.darts) for c in net.curves]
        self.colors: list[str] = [c.color for c in net.curves]
        self.marks: list[int | None] = [c.forward for c in net.curves]
        self._next = surf.n_darts

    def new_edge(self) -> tuple[int, int]:
        d1, d2 = self._next, self._next + 1
        self._next += 2
        self.pair[d1] = d2
        self.pair[d2] = d1
        return d1, d2

    def cut_edge(self, dart: int, cuts: int) -> list[tuple[int, int]]:
        """Replace the edge through `dart` by a chain of cuts+1 edges.

        Piece i runs from the dart end toward the partner end; the outer
        darts keep their ids.  The new interior vertices are NOT created
        here: the caller owns their rotations.
        """
        if dart in self.flagged:
            raise AssertionError("cutting flagged edges is not supported")
        far = self.pair[dart]
        pieces = [(dart, 0)] * (cuts + 1)
        prev_tail = dart
        for i in range(cuts):
            head, tail = self.new_edge()
            self.pair[prev_tail] = head
            self.pair[head] = prev_tail
            pieces[i] = (prev_tail, head)
            prev_tail = tail
        self.pair[prev_tail] = far
        self.pair[far] = prev_tail
        pieces[cuts] = (prev_tail, far)
        return pieces

    def vertex(self, darts_ccw: list[int]) -> None:
        self.cycles.append(list(darts_ccw))

    def replace_in_curve(self, ci: int, old_dart: int, new_darts: list[int]) -> None:
        cyc = self.curve_cycles[ci]
        at = cyc.index(old_dart)
        self.curve_cycles[ci] = cyc[:at] + new_darts + cyc[at + 1 :]

    def add_curve(self, color: str, cycle: list[int]) -> None:
        self.curve_cycles.append(cycle)
        self.colors.append(color)
        self.marks.append(None)

    def finish(self) -> CurveNet:
        n = self._next
        pairing = tuple(self.pair[d] for d in range(n))
        rotation = [-1] * n
        for cyc in self.cycles:
            for a, b2 in zip(cyc, cyc[1:] + cyc[:1]):
                if rotation[a] != -1:
                    raise AssertionError(f"dart {a} in two vertex cycles")
                rotation[a] = b2
        if -1 in rotation:
            raise AssertionError("dart missing from vertex cycles")
        flags = tuple(d in self.flagged for d in range(n))
        surf = RotationSurface(pairing, tuple(rotation), flags)
        curves = tuple(
            Curve(col, tuple(cyc), fw)
            for col, cyc, fw in zip(self.colors, self.curve_cycles, self.marks)
        )
        return CurveNet(surf, curves)


def _travel_substitution(ed: _Editor, net: CurveNet, host_dart: int, pieces) -> None:
    """Reroute the host curve through a freshly cut chain."""
    owner = net.dart_owner()
    ci, p = owner[host_dart]
    travel = net.curves[ci].darts[p]
    if travel == host_dart:
        ed.replace_in_curve(ci, travel, [t for t, _ in pieces])
    else:
        ed.replace_in_curve(ci, travel, [h for _, h in reversed(pieces)])


def _insert_small_oval(net: CurveNet, host_dart: int) -> CurveNet:
    """Null-homotopic circle crossing the host curve edge twice."""
    ed = _Editor(net)
    p0, p1, p2 = ed.cut_edge(host_dart, 2)
    u = ed.new_edge()  # A -> B on the left of host_dart
    w = ed.new_edge()  # B -> A on the right
    a_fwd, a_bwd = p1[0], p0[1]
    b_fwd, b_bwd = p2[0], p1[1]
    ed.vertex([a_fwd, u[0], a_bwd, w[1]])
    ed.vertex([b_fwd, u[1], b_bwd, w[0]])
    _travel_substitution(ed, net, host_dart, [p0, p1, p2])
    ed.add_curve("red", [u[0], w[0]])
    return ed.finish()


def _insert_fig8(net: CurveNet, host_dart: int) -> CurveNet:
    """Null-homotopic helper with one self-crossing and two crossings
    with the host curve; flips the doubling parity budget by one."""
    ed = _Editor(net)
    p0, p1, p2 = ed.cut_edge(host_dart, 2)
    e_as = ed.new_edge()  # A -> S, left side
    e_loop = ed.new_edge()  # small loop at S
    e_sb = ed.new_edge()  # S -> B, left side
    e_ba = ed.new_edge()  # B -> A, right side
    ed.vertex([p1[0], e_as[0], p0[1], e_ba[1]])  # A
    ed.vertex([p2[0], e_sb[1], p1[1], e_ba[0]])  # B
    ed.vertex([e_as[1], e_loop[1], e_loop[0], e_sb[0]])  # S, transversal twice
    _travel_substitution(ed, net, host_dart, [p0, p1, p2])
    ed.add_curve("red", [e_as[0], e_loop[0], e_sb[0], e_ba[0]])
    return ed.finish()


def _insert_racetrack(
    net: CurveNet,
    blade0: Blade,
    blade1: Blade,
    path: list[Blade],
) -> CurveNet:
    """Boundary of a strip neighbourhood of an arc between two curve
    edges.  `blade0`/`blade1` pick the curve edges and the sides the
    strip leaves from; `path` lists the skeleton edges the arc crosses,
    each as the blade facing the face being left.

    Travel order of the new circle: A -> P_1 .. P_m -> C (outbound),
    cap beyond `blade1`, D -> Q_m .. Q_1 -> B (return), cap beyond
    `blade0`.  The return rail runs on the right of outbound travel;
    that fixes which cut point comes first along every crossed edge and
    keeps the strip untwisted.
    """
    ed = _Editor(net)
    d0, s0 = blade0
    d1, s1 = blade1
    if d1 in (d0, net.surface.edge_pairing[d0]):
        raise AssertionError("racetrack endpoints need distinct edges")
    h0 = ed.cut_edge(d0, 2)
    h1 = ed.cut_edge(d1, 2)
    seams = [ed.cut_edge(bd, 2) for bd, _ in path]

    m = len(path)
    run = [ed.new_edge() for _ in range(m + 1)]  # A -> P1 -> ... -> C
    back = [ed.new_edge() for _ in range(m + 1)]  # D -> Qm -> ... -> B
    cap1 = ed.new_edge()  # C -> D beyond e1
    cap0 = ed.new_edge()  # B -> A beyond e0

    # The + blade of a dart faces the region on the travel RIGHT, so
    # side +1 means the strip lies on the right of the cut edge's dart.
    if s0 > 0:  # outbound leaves rightward: B before A along d0
        ed.vertex([h0[1][0], cap0[0], h0[0][1], back[m][1]])  # B
        ed.vertex([h0[2][0], cap0[1], h0[1][1], run[0][0]])  # A
    else:  # leaves leftward: A before B
        ed.vertex([h0[1][0], run[0][0], h0[0][1], cap0[1]])  # A
        ed.vertex([h0[2][0], back[m][1], h0[1][1], cap0[0]])  # B
    if s1 > 0:  # outbound arrives from the right side: C before D along d1
        ed.vertex([h1[1][0], cap1[0], h1[0][1], run[m][1]])  # C
        ed.vertex([h1[2][0], cap1[1], h1[1][1], back[0][0]])  # D
    else:
        ed.vertex([h1[1][0], back[0][0], h1[0][1], cap1[1]])  # D
        ed.vertex([h1[2][0], run[m][1], h1[1][1], cap1[0]])  # C
    for i, (bd, side) in enumerate(path):
        w0, w1, w2 = seams[i]
        r_in, r_out = run[i][1], run[i + 1][0]
        b_in, b_out = back[m - 1 - i][1], back[m - i][0]
        if side > 0:  # crossing away from the right side: P before Q
            ed.vertex([w1[0], r_out, w0[1], r_in])  # P_i
            ed.vertex([w2[0], b_in, w1[1], b_out])  # Q_i
        else:
            ed.vertex([w1[0], b_out, w0[1], b_in])  # Q_i
            ed.vertex([w2[0], r_in, w1[1], r_out])  # P_i
    _travel_substitution(ed, net, d0, h0)
    _travel_substitution(ed, net, d1, h1)
    cycle = [e[0] for e in run] + [cap1[0]] + [e[0] for e in back] + [cap0[0]]
    ed.add_curve("red", cycle)
    return ed.finish()


def _deficiency(net: CurveNet) -> int:
    return sum(1 - r.euler_characteristic for r in net.regions() if not r.is_disc)


def _lonely_curves(net: CurveNet) -> list[int]:
    crossed = set()
    for ci, _, cj, _ in net.crossings:
        if ci != cj:
            crossed.add(ci)
            crossed.add(cj)
    for v in net.triple_points:
        for ci, _ in net.vertex_passages()[v]:
            crossed.add(ci)
    return [i for i in range(len(net.curves)) if i not in crossed]


def _region_face_paths(net: CurveNet, region_faces: set[int]):
    """BFS tree over the faces of one region, crossing skeleton edges."""
    surf = net.surface
    bf = surf.blade_face()
    curve = net.curve_darts()
    adj: dict[int, list[tuple[int, Blade]]] = {f: [] for f in region_faces}
    for d, _ in surf.edges():
        if d in curve:
            continue
        fa, fb = bf[(d, 1)], bf[(d, -1)]
        if fa in region_faces and fb in region_faces:
            adj[fa].append((fb, (d, 1)))
            adj[fb].append((fa, (d, -1)))
    return adj


def _fix_region(net: CurveNet, region: Region) -> CurveNet | None:
    """Try strip helpers across `region` until one lowers the deficiency."""
    faces = set(region.faces)
    bf = net.surface.blade_face()
    circles = [
        circ
        for circ in net.boundary_circles()
        if bf[circ[0]] in faces
    ]
    # candidate endpoints: one blade per circle visit of each edge
    circle_of: dict[Blade, int] = {}
    for idx, circ in enumerate(circles):
        for b in circ:
            circle_of[b] = idx
    blades = sorted(circle_of, key=lambda b: (b[0], -b[1]))
    adj = _region_face_paths(net, faces)
    base = _deficiency(net)

    def bfs(src: int) -> dict[int, list[Blade]]:
        paths = {src: []}
        todo = [src]
        while todo:
            f = todo.pop(0)
            for f2, blade in adj[f]:
                if f2 not in paths:
                    paths[f2] = paths[f] + [blade]
                    todo.append(f2)
        return paths

    candidates = []
    for b0 in blades:
        paths = bfs(bf[b0])
        for b1 in blades:
            if b1[0] in (b0[0], net.surface.edge_pairing[b0[0]]):
                continue
            if bf[b1] not in paths:
                continue
            different = circle_of[b0] != circle_of[b1]
            candidates.append((0 if different else 1, len(paths[bf[b1]]), b0, b1, paths[bf[b1]]))
    candidates.sort(key=lambda c: (c[0], c[1], c[2], c[3]))
    for _, _, b0, b1, path in candidates:
        trial = _insert_racetrack(net, b0, b1, path)
        if _deficiency(trial) < base:
            return trial
    return None


def _phase_b(net: CurveNet) -> CurveNet:
    """Add null-homotopic helper circles until every curve crosses
    another curve and every complementary region is a disc."""
    chi = net.surface.euler_characteristic()
    for _ in range(400):
        lonely = _lonely_curves(net)
        if lonely:
            host = net.curves[lonely[0]].darts[0]
            net = _insert_small_oval(net, host)
        else:
            bad = [r for r in net.regions() if not r.is_disc]
            if not bad:
                return net
            fixed = _fix_region(net, max(bad, key=lambda r: 1 - r.euler_characteristic))
            if fixed is None:
                raise AssertionError("no helper strip lowers the region deficiency")
            net = fixed
        assert net.surface.euler_characteristic() == chi
        assert net.surface.is_orientable()
    raise AssertionError("helper insertion failed to terminate")


# ----------------------------------------------------------------- doubling


def _crossing_roles(net: CurveNet) -> dict[int, tuple[int, int]]:
    """Pick the single-pass strand at every double crossing.

    At each crossing one strand will pass one new triple point and the
    other strand two, so each curve's triple-point count stays even.
    Self-crossings force three passages on their curve regardless; the
    assignment only has to balance the crossings between distinct
    curves, which is a parity T-join on the curve graph.
    """
    vp = net.vertex_passages()
    crossings = {v: ps for v, ps in vp.items() if len(ps) == 2}
    self_par = [0] * len(net.curves)
    inter = []
    for v, ((ci, pi), (cj, pj)) in sorted(crossings.items()):
        if ci == cj:
            self_par[ci] ^= 1
        else:
            inter.append((v, ci, cj))
    # spanning forest over curves through inter-crossings
    adj: dict[int, list[tuple[int, int]]] = {i: [] for i in range(len(net.curves))}
    for v, ci, cj in inter:
        adj[ci].append((cj, v))
        adj[cj].append((ci, v))
    parent: dict[int, tuple[int, int] | None] = {}
    order = []
    for root in range(len(net.curves)):
        if root in parent:
            continue
        parent[root] = None
        queue = [root]
        while queue:
            c = queue.pop(0)
            order.append(c)
            for c2, v in adj[c]:
                if c2 not in parent:
                    parent[c2] = (c, v)
                    queue.append(c2)
    tree_vertices = {v for p in parent.values() if p for _, v in [p]}
    need = list(self_par)
    role1: dict[int, int] = {}
    for v, ci, cj in inter:
        if v not in tree_vertices:
            role1[v] = min(ci, cj)
            need[role1[v]] ^= 1
    for c in reversed(order):
        if parent[c] is None:
            if need[c]:
                raise NetError("crossing parity cannot be balanced; add a helper")
            continue
        p, v = parent[c]
        role1[v] = c if need[c] else p
        need[role1[v]] ^= 1
    assert not any(need)
    out: dict[int, tuple[int, int]] = {}
    for v, ps in crossings.items():
        (ci, pi), (cj, pj) = ps
        if ci == cj:
            u = (ci, pi) if net.curves[ci].darts[pi] < net.curves[cj].darts[pj] else (cj, pj)
        else:
            u = (ci, pi) if role1[v] == ci else (cj, pj)
        out[v] = u
    return out


def _doubling_parity_ok(net: CurveNet) -> list[int]:
    """Curve components whose self/inter crossing parity disagrees."""
    vp = net.vertex_passages()
    n = len(net.curves)
    par = list(range(n))

    def find(a: int) -> int:
        while par[a] != a:
            par[a] = par[par[a]]
            a = par[a]
        return a

    self_par = [0] * n
    inter_par: dict[int, int] = {}
    for v, ps in vp.items():
        if len(ps) != 2:
            continue
        (ci, _), (cj, _) = ps
        if ci == cj:
            self_par[ci] ^= 1
        else:
            par[find(ci)] = find(cj)
    for v, ps in vp.items():
        if len(ps) == 2 and ps[0][0] != ps[1][0]:
            r = find(ps[0][0])
            inter_par[r] = inter_par.get(r, 0) ^ 1
    bad = []
    acc: dict[int, int] = {}
    for c in range(n):
        r = find(c)
        acc[r] = acc.get(r, 0) ^ self_par[c]
    for r, s in sorted(acc.items()):
        if s != inter_par.get(r, 0):
            bad.append(r)
    return bad


def double_and_deform(net: CurveNet) -> CurveNet:
    """Push each curve off itself and deform every crossing of the
    doubled family into triple points.

    Each old crossing becomes two 6-valent vertices joined by the two
    middle strands; every curve ends up meeting an even number of the
    new triple points.  Raises NetError when the net has no crossings
    at all.
    """
    if not net.crossings:
        raise NetError("net has no crossings; curves must intersect before doubling")
    for _ in range(len(net.curves) + 1):
        bad = _doubling_parity_ok(net)
        if not bad:
            break
        net = _insert_fig8(net, net.curves[bad[0]].darts[0])
    else:
        raise AssertionError("figure-eight insertion failed to balance parity")

    surf = net.surface
    roles = _crossing_roles(net)
    vp = net.vertex_passages()
    b = _MapBuilder()

    # one edge and one copy edge per curve edge, keyed by travel dart
    orig: dict[int, tuple[int, int]] = {}
    copy: dict[int, tuple[int, int]] = {}
    for c in net.curves:
        for d in c.darts:
            orig[d] = b.edge()
            copy[d] = b.edge()

    # copy seams cut the skeleton piece on the left of each old seam
    cycles = surf.vertices()
    vofd = surf.vertex_of
    requests: dict[int, dict[int, tuple[int, int]]] = {}
    seam_info: dict[int, tuple[int, int]] = {}
    for v, ps in vp.items():
        if len(ps) != 1:
            continue
        ci, pi = ps[0]
        d_out = net.curves[ci].darts[pi]
        left = surf.rotation[d_out]
        seam_info[v] = (ci, pi)
        requests.setdefault(min(left, surf.edge_pairing[left]), {})[left] = (ci, pi)

    newend: dict[int, int] = {}
    cutdarts: dict[int, tuple[int, int]] = {}  # left dart -> (toward seam, away)
    curve_darts = net.curve_darts()
    for d, dbar in surf.edges():
        if d in curve_darts:
            continue
        reqs = requests.get(d, {})
        chain = [b.edge() for _ in range(1 + len(reqs))]
        newend[d] = chain[0][0]
        newend[dbar] = chain[-1][1]
        if d in reqs:
            cutdarts[d] = (chain[0][1], chain[1][0])
        if dbar in reqs:
            cutdarts[dbar] = (chain[-1][0], chain[-2][1])

    # substitution for star and seam rotations
    sub: dict[int, int] = dict(newend)
    for c in net.curves:
        for d in c.darts:
            sub[d] = orig[d][0]
            sub[surf.edge_pairing[d]] = orig[d][1]

    internal: dict[int, tuple[int, int]] = {}  # vertex -> (I travel, I' travel)
    w_pos: dict[int, tuple[int, int]] = {}  # vertex -> role-2 passage
    for cyc in cycles:
        v = vofd(cyc[0])
        ps = vp.get(v, [])
        if len(ps) == 0:
            b.vertex([sub[d] for d in cyc])
        elif len(ps) == 1:
            ci, pi = ps[0]
            cur = net.curves[ci]
            d_out = cur.darts[pi]
            d_in = cur.darts[pi - 1]
            left = surf.rotation[d_out]
            b.vertex([sub[d] for d in cyc])
            alpha, beta = cutdarts[left]
            b.vertex([copy[d_out][0], beta, copy[d_in][1], alpha])
        elif len(ps) == 2:
            u_ci, u_pi = roles[v]
            (ci, pi), (cj, pj) = ps
            w_ci, w_pi = (cj, pj) if (ci, pi) == (u_ci, u_pi) else (ci, pi)
            u_out = net.curves[u_ci].darts[u_pi]
            u_in = net.curves[u_ci].darts[u_pi - 1]
            w_out = net.curves[w_ci].darts[w_pi]
            w_in = net.curves[w_ci].darts[w_pi - 1]
            mid = b.edge()
            mid2 = b.edge()
            if surf.rotation[u_out] == w_out:
                b.vertex([orig[u_out][0], mid2[0], mid[0], orig[u_in][1],
                          copy[w_in][1], orig[w_in][1]])
                b.vertex([copy[u_out][0], orig[w_out][0], copy[w_out][0],
                          copy[u_in][1], mid[1], mid2[1]])
                internal[v] = (mid[0], mid2[0])
            else:
                assert surf.rotation[u_out] == surf.edge_pairing[w_in]
                b.vertex([orig[u_out][0], mid[0], mid2[0], orig[u_in][1],
                          orig[w_out][0], copy[w_out][0]])
                b.vertex([copy[u_out][0], copy[w_in][1], orig[w_in][1],
                          copy[u_in][1], mid2[1], mid[1]])
                internal[v] = (mid[1], mid2[1])
            w_pos[v] = (w_ci, w_pi)
        else:
            raise AssertionError("unexpected valence while doubling")

    new_curves: list[Curve] = []
    copies: list[Curve] = []
    for ci, c in enumerate(net.curves):
        run: list[int] = []
        run2: list[int] = []
        for pi, d in enumerate(c.darts):
            v = vofd(d)
            if v in w_pos and w_pos[v] == (ci, pi):
                run.append(internal[v][0])
                run2.append(internal[v][1])
            run.append(orig[d][0])
            run2.append(copy[d][0])
        new_curves.append(Curve(c.color, tuple(run)))
        copies.append(Curve(c.color, tuple(run2)))

    out = CurveNet(b.build(), tuple(new_curves + copies))
    assert out.surface.euler_characteristic() == surf.euler_characteristic()
    assert out.surface.is_orientable() == surf.is_orientable()
    assert not out.crossings, "double crossings must all be deformed away"
    triples = out.triple_points
    assert len(triples) == 2 * len(roles)
    opp = out.vertex_passages()
    for ci in range(len(out.curves)):
        hits = sum(1 for v in triples for tci, _ in opp[v] if tci == ci)
        assert hits % 2 == 0, "curve meets an odd number of triple points"
    return out


# ------------------------------------------------------------------ surgery


def moebius_surgery(net: CurveNet) -> CurveNet:
    """Replace every triple point by a crosscap spanning its three
    strands, with a new one-sided green core curve.

    Each band turns one 6-valent vertex into three crossings between
    the old strands and the green core, drops the surface Euler
    characteristic by one, and makes the surface non-orientable.  A net
    without triple points is returned unchanged.
    """
    triples = net.triple_points
    if not triples:
        return net
    surf = net.surface
    chi = surf.euler_characteristic()
    passages = net.vertex_passages()
    ed = _Editor(net)
    vofd = surf.vertex_of
    keep = []
    doomed = {}
    for cyc in surf.vertices():
        v = vofd(cyc[0])
        if v in triples:
            doomed[v] = cyc
        else:
            keep.append(list(cyc))
    ed.cycles = keep
    for v in sorted(doomed):
        cyc = doomed[v]
        assert len(cyc) == 6
        # each strand must run straight through: its two stubs antipodal
        stubs = set()
        for ci, p in passages[v]:
            ds = net.curves[ci].darts
            stubs.add(frozenset((ed.pair[ds[p - 1]], ds[p])))
        assert stubs == {frozenset((cyc[j], cyc[j + 3])) for j in range(3)}
        cores = [ed.new_edge() for _ in range(3)]
        # the third core runs through the crosscap seam
        ed.flagged.update(cores[2])
        for j in range(3):
            ed.vertex([cores[j][0], cyc[j], cores[j - 1][1], cyc[j + 3]])
            # chart mismatch across the band seam: toggle the edge at the
            # stub that sits between the two core ends
            for d in (cyc[j], ed.pair[cyc[j]]):
                if d in ed.flagged:
                    ed.flagged.discard(d)
                else:
                    ed.flagged.add(d)
        ed.add_curve("green", [c[0] for c in cores])
    out = ed.finish()
    assert out.surface.euler_characteristic() == chi - len(triples)
    assert not out.surface.is_orientable()
    assert not out.triple_points
    greens = [ci for ci, c in enumerate(out.curves) if c.color == "green"]
    assert len(greens) == len(triples)
    hits = {ci: 0 for ci in greens}
    for v, ps in out.vertex_passages().items():
        if len(ps) == 2:
            cols = sorted(out.curves[ci].color for ci, _ in ps)
            assert cols == ["green", "red"], "crossings must mix colors after surgery"
            for ci, _ in ps:
                if ci in hits:
                    hits[ci] += 1
    assert all(n == 3 for n in hits.values()), "each green core crosses three strands"
    return out


# ------------------------------------------------- coloring and orientation


class _ParityUF:
    """Union-find over GF(2): tracks x ⊕ root for every element."""

    def __init__(self) -> None:
        self.parent: dict = {}
        self.offset: dict = {}

    def find(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.offset[x] = 0
            return x, 0
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        par = 0
        for y in reversed(path):
            par ^= self.offset[y]
            self.parent[y] = x
            self.offset[y] = par
        return x, self.offset[path[0]] if path else 0

    def union(self, x, y, rel: int) -> bool:
        """Impose x ⊕ y = rel; False on contradiction."""
        rx, px = self.find(x)
        ry, py = self.find(y)
        if rx == ry:
            return (px ^ py) == rel
        self.parent[rx] = ry
        self.offset[rx] = px ^ py ^ rel
        return True

    def value(self, x) -> int:
        _, p = self.find(x)
        return p


def _crossing_positions(net: CurveNet) -> dict[int, list[int]]:
    """Positions along each curve whose vertex is a double crossing."""
    vp = net.vertex_passages()
    doubles = {v for v, ps in vp.items() if len(ps) == 2}
    out: dict[int, list[int]] = {}
    for ci, c in enumerate(net.curves):
        out[ci] = [
            p
            for p, d in enumerate(c.darts)
            if net.surface.vertex_of(d) in doubles
        ]
    return out


def _crossing_side0(net: CurveNet, ci: int, p: int) -> tuple[int, int]:
    """Partner curve and raw crossing side at passage (ci, p).

    Side 0 means the partner passes left to right across this curve in
    the vertex chart, both taken with their stored dart directions.
    """
    surf = net.surface
    beta = net.curves[ci].darts[p]
    v = surf.vertex_of(beta)
    (ca, pa), (cb, pb) = net.vertex_passages()[v]
    cj, pj = (cb, pb) if (ca, pa) == (ci, p) else (ca, pa)
    other = net.curves[cj].darts
    gamma = surf.edge_pairing[other[pj - 1]]
    side0 = 0 if surf.rotation[beta] == gamma else 1
    return cj, side0


def _segment_reversal(net: CurveNet, d: int) -> tuple[int, int]:
    """Curve owning dart d and whether d runs against the stored cycle."""
    ci, p = net.dart_owner()[d]
    return ci, 0 if net.curves[ci].darts[p] == d else 1


def checkerboard_and_orient(net: CurveNet) -> CurveNet:
    """Assign the checkerboard coloring and curve orientations.

    The two sides of every curve edge must land in different color
    classes; orientations must make crossings alternate sides along
    every curve and make each boundary circle read coherently: around
    white discs all segments run forward, around black discs the red
    segments run against the green ones.
    """
    regions = net.regions()
    if not net.curves:
        return net.with_colors(tuple("white" for _ in regions), net.curves)
    # parity BFS for the two-coloring
    graph: dict[int, list[int]] = {}
    for c in net.curves:
        for d in c.darts:
            r1 = net.blade_region((d, 1))
            r2 = net.blade_region((d, -1))
            if r1 == r2:
                raise ColoringError(
                    f"no valid coloring: region {r1} touches both sides of a curve"
                )
            graph.setdefault(r1, []).append(r2)
            graph.setdefault(r2, []).append(r1)
    parity = [-1] * len(regions)
    for r0 in range(len(regions)):
        if parity[r0] != -1:
            continue
        parity[r0] = 0
        todo = [r0]
        while todo:
            a = todo.pop()
            for b in graph.get(a, ()):
                want = parity[a] ^ 1
                if parity[b] == -1:
                    parity[b] = want
                    todo.append(b)
                elif parity[b] != want:
                    raise ColoringError(
                        f"no valid coloring: odd cycle through regions {a} and {b}"
                    )
    owner = net.dart_owner()
    circles = net.boundary_circles()
    xs_pos = _crossing_positions(net)

    def try_orient(colors: tuple[str, ...]):
        uf = _ParityUF()
        for wi, walk in enumerate(circles):
            col = colors[net.blade_region(walk[0])]
            for d, _s in walk:
                ci, rev = _segment_reversal(net, d)
                rel = rev
                if col == "black" and net.curves[ci].color == "red":
                    rel ^= 1
                if not uf.union(("c", ci), ("o", wi), rel):
                    return None
        for ci, c in enumerate(net.curves):
            ps = xs_pos[ci]
            if not ps:
                continue
            n = len(c.darts)
            flags = net.surface.side_flag
            for a, b in zip(ps, ps[1:] + [ps[0] + n]):
                cj_a, s0a = _crossing_side0(net, ci, a)
                cj_b, s0b = _crossing_side0(net, ci, b % n)
                pi = 0
                for i in range(a, b):
                    if flags[c.darts[i % n]]:
                        pi ^= 1
                rel = 1 ^ pi ^ s0a ^ s0b
                if not uf.union(("c", cj_a), ("c", cj_b), rel):
                    return None
        return tuple(uf.value(("c", ci)) for ci in range(len(net.curves)))

    for swap in (0, 1):
        colors = tuple(
            "white" if parity[r] ^ swap == 0 else "black" for r in range(len(regions))
        )
        eps = try_orient(colors)
        if eps is not None:
            curves = tuple(
                Curve(c.color, c.darts, 1 if e == 0 else -1)
                for c, e in zip(net.curves, eps)
            )
            return net.with_colors(colors, curves)
    raise OrientationError("no valid orientation")


# ----------------------------------------------------------------- validator


@dataclass(frozen=True)
class ConditionReport:
    index: int
    name: str
    passed: bool
    witnesses: tuple[str, ...] = ()


@dataclass(frozen=True)
class NetReport:
    conditions: tuple[ConditionReport, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def condition(self, index: int) -> ConditionReport:
        return self.conditions[index - 1]


def _effective_forward(curve: Curve) -> int:
    return 1 if curve.forward in (None, 1) else -1


def _effective_out_stubs(net: CurveNet, v: int) -> set[int]:
    """Stubs at v where some curve departs under effective orientation."""
    surf = net.surface
    out = set()
    for ci, p in net.vertex_passages()[v]:
        c = net.curves[ci]
        if _effective_forward(c) > 0:
            out.add(c.darts[p])
        else:
            out.add(surf.edge_pairing[c.darts[p - 1]])
    return out


def validate_net(net: CurveNet, relaxed: bool = False) -> NetReport:
    """Check the four curve-net conditions; failures become witnesses.

    Transversality of every passage is structural (the net constructor
    rejects non-transversal curves), so condition 1 reduces to the
    color and meeting rules.  Unoriented curves are read as traveling
    forward along the stored cycle.  With `relaxed` the complement may
    be discs with holes: condition 3 then checks only the coloring.
    """
    surf = net.surface
    vp = net.vertex_passages()
    # condition 1: crossings pair distinct colors; every curve meets another
    w1: list[str] = []
    meets = [0] * len(net.curves)
    for v, ps in sorted(vp.items()):
        if len(ps) < 2:
            continue
        for (ca, _), (cb, _) in itertools.combinations(sorted(ps), 2):
            if ca == cb:
                w1.append(f"vertex {v}: curve {ca} crosses itself")
            elif net.curves[ca].color == net.curves[cb].color:
                w1.append(
                    f"vertex {v}: {net.curves[ca].color} curves {ca} and {cb} cross"
                )
            else:
                meets[ca] += 1
                meets[cb] += 1
    for ci, n in enumerate(meets):
        if n == 0:
            w1.append(f"curve {ci} crosses no other curve")
    # condition 2: crossing sides alternate along every curve
    w2: list[str] = []
    xs_pos = _crossing_positions(net)
    for ci, c in enumerate(net.curves):
        ps = xs_pos[ci]
        if not ps:
            continue
        n = len(c.darts)
        eps_i = 0 if _effective_forward(c) > 0 else 1
        for a, b in zip(ps, ps[1:] + [ps[0] + n]):
            cj_a, s0a = _crossing_side0(net, ci, a)
            cj_b, s0b = _crossing_side0(net, ci, b % n)
            side_a = s0a ^ eps_i ^ (0 if _effective_forward(net.curves[cj_a]) > 0 else 1)
            side_b = s0b ^ eps_i ^ (0 if _effective_forward(net.curves[cj_b]) > 0 else 1)
            pi = 0
            for i in range(a, b):
                if surf.side_flag[c.darts[i % n]]:
                    pi ^= 1
            if side_a ^ side_b ^ pi != 1:
                w2.append(
                    f"curve {ci}: crossings at positions {a} and {b % n} "
                    f"approach from the same side"
                )
    # condition 3: disc complement, checkerboard coloring, coherent circles
    w3: list[str] = []
    regions = net.regions()
    colors = net.region_colors
    if not relaxed:
        for ri, r in enumerate(regions):
            if not r.is_disc:
                w3.append(
                    f"region {ri} is not a disc (Euler characteristic "
                    f"{r.euler_characteristic})"
                )
    if colors is None:
        w3.append("no coloring assigned")
    else:
        for c in net.curves:
            for d in c.darts:
                r1 = net.blade_region((d, 1))
                r2 = net.blade_region((d, -1))
                if colors[r1] == colors[r2]:
                    w3.append(f"edge through dart {d}: same color on both sides")
        for walk in net.boundary_circles():
            col = colors[net.blade_region(walk[0])]
            bits = set()
            for d, _s in walk:
                ci, rev = _segment_reversal(net, d)
                bit = rev ^ (0 if _effective_forward(net.curves[ci]) > 0 else 1)
                if col == "black" and net.curves[ci].color == "red":
                    bit ^= 1
                bits.add(bit)
            if len(bits) > 1:
                ri = net.blade_region(walk[0])
                w3.append(f"region {ri}: boundary segments break the {col} rule")
    # condition 4: crossing corners mixed on white, uniform on black
    w4: list[str] = []
    if colors is None:
        w4.append("no coloring assigned")
    else:
        for v, ps in sorted(vp.items()):
            if len(ps) != 2 or len(surf.vertices()[v]) != 4:
                continue
            outs = _effective_out_stubs(net, v)
            cyc = surf.vertices()[v]
            for i in range(4):
                a, b = cyc[i], cyc[(i + 1) % 4]
                col = colors[net.blade_region((a, -1))]
                mixed = (a in outs) != (b in outs)
                if col == "white" and not mixed:
                    w4.append(f"crossing {v}: white corner {i} not alternating")
                if col == "black" and mixed:
                    w4.append(f"crossing {v}: black corner {i} not uniform")
    return NetReport(
        (
            ConditionReport(1, "intersections", not w1, tuple(w1)),
            ConditionReport(2, "alternation", not w2, tuple(w2)),
            ConditionReport(3, "checkerboard", not w3, tuple(w3)),
            ConditionReport(4, "corners", not w4, tuple(w4)),
        )
    )


# ------------------------------------------------------------------ assembly


@dataclass(frozen=True)
class CellLabels:
    """Colors and curve provenance for the cells of an assembled complex."""

    edge_colors: tuple[str, ...]
    edge_curve: tuple[int, ...]
    face_colors: tuple[str, ...]
    face_curve: tuple[int | None, ...]


def assemble_Yprime(net: CurveNet) -> tuple[Complex2, CellLabels]:
    """Build the attached-disc complex of a validated net.

    Vertices are the crossings, edges the curve segments between
    consecutive crossings (oriented along the stored dart cycle), and
    faces the complementary regions plus one disc per curve.  Region
    words follow the boundary walk whose direction makes the coloring
    rule read forward.
    """
    rep = validate_net(net)
    if not rep.passed:
        first = next(w for c in rep.conditions for w in c.witnesses)
        raise NetError(f"net does not satisfy the curve conditions: {first}")
    surf = net.surface
    xverts = [v for v, ps in sorted(net.vertex_passages().items()) if len(ps) == 2]
    for v in xverts:
        if len(surf.vertices()[v]) != 4:
            raise NetError(f"crossing {v} has stray skeleton stubs")
    vid = {v: i for i, v in enumerate(xverts)}

    edges: list[tuple[int, int]] = []
    edge_colors: list[str] = []
    edge_curve: list[int] = []
    seg_of: dict[int, tuple[int, int]] = {}
    xs_pos = _crossing_positions(net)
    for ci, c in enumerate(net.curves):
        ps = xs_pos[ci]
        n = len(c.darts)
        for j, a in enumerate(ps):
            b = ps[(j + 1) % len(ps)]
            eidx = len(edges) + 1
            edges.append((vid[surf.vertex_of(c.darts[a])], vid[surf.vertex_of(c.darts[b])]))
            edge_colors.append(c.color)
            edge_curve.append(ci)
            span = (b - a) % n or n
            for t in range(span):
                d = c.darts[(a + t) % n]
                seg_of[d] = (eidx, 0)
                seg_of[surf.edge_pairing[d]] = (eidx, 1)

    colors = net.region_colors
    assert colors is not None
    walks_by_region: dict[int, list[tuple[Blade, ...]]] = {}
    for walk in net.boundary_circles():
        walks_by_region.setdefault(net.blade_region(walk[0]), []).append(walk)

    def walk_bit(walk: tuple[Blade, ...], col: str) -> int:
        d = walk[0][0]
        ci, rev = _segment_reversal(net, d)
        bit = rev ^ (0 if _effective_forward(net.curves[ci]) > 0 else 1)
        if col == "black" and net.curves[ci].color == "red":
            bit ^= 1
        return bit

    faces: list[tuple[int, ...]] = []
    face_colors: list[str] = []
    face_curve: list[int | None] = []
    for ri in range(len(net.regions())):
        walks = walks_by_region[ri]
        col = colors[ri]
        chosen = next(w for w in walks if walk_bit(w, col) == 0)
        word = []
        for d, _s in chosen:
            if surf.vertex_of(d) in vid:
                e, rev = seg_of[d]
                word.append(e if rev == 0 else -e)
        faces.append(tuple(word))
        face_colors.append(col)
        face_curve.append(None)
    for ci, c in enumerate(net.curves):
        segs = [seg_of[c.darts[p]][0] for p in xs_pos[ci]]
        if _effective_forward(c) > 0:
            word = tuple(segs)
        else:
            word = tuple(-e for e in reversed(segs))
        faces.append(word)
        face_colors.append(c.color)
        face_curve.append(ci)

    complex2 = Complex2(len(xverts), tuple(edges), tuple(faces))
    labels = CellLabels(
        tuple(edge_colors), tuple(edge_curve), tuple(face_colors), tuple(face_curve)
    )
    return complex2, labels


def blueprint_corner_metric(
    c: Complex2, labels: CellLabels
) -> tuple[CornerMetric, list[MarkedPoint]]:
    """Pentagon-pair metric for an assembled complex.

    Every face is a fan of two-pentagon blocks around a center: one
    block per pair of boundary letters on a region, one per letter on a
    curve disc.  Each block carries two simple cone points of angle pi,
    the shared center collects one right angle per pentagon, and disc
    blocks keep their free-side midpoint on the boundary.  Centers of
    one-block faces are cone points themselves.
    """
    metrics = []
    for fi, word in enumerate(c.faces):
        size = len(word)
        if labels.face_curve[fi] is None:
            if size % 2:
                raise ValueError(f"region face {fi} has odd boundary length")
            fm = FaceMetric(
                pentagon_count=size,
                interior_angles=(2,) * size + (size,),
                boundary_angles=(),
                corner_angles=(2,) * size,
            )
        else:
            fm = FaceMetric(
                pentagon_count=2 * size,
                interior_angles=(2,) * (2 * size) + (2 * size,),
                boundary_angles=(2,) * size,
                corner_angles=(2,) * size,
            )
        marked = tuple(i for i, q in enumerate(fm.interior_angles) if q == 2)
        metrics.append(
            FaceMetric(
                fm.pentagon_count,
                fm.interior_angles,
                fm.boundary_angles,
                fm.corner_angles,
                marked,
            )
        )
    marks = [
        MarkedPoint(fi, i, True)
        for fi, fm in enumerate(metrics)
        for i in fm.marked_interior
    ]
    return CornerMetric(tuple(metrics)), marks
