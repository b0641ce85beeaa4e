"""Branched covering maps onto the fixed base orbihedron.

The base is the one-vertex complex with two loops and four discs from
`complex2.build_Y`, carrying twelve order-2 points.  This module turns
an assembled curve-net complex into an explicit covering map, checks
the covering axioms cell by cell, and translates back and forth between
covers and permutation representations of the base's orbifold group.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complex2 import Complex2, CornerMetric, FaceMetric, MarkedPoint, build_Y
from .complex2 import euler_characteristic
from .curvenet import CellLabels
from .monodromy import BranchedDiscCover, Permutation, extend_disc_cover, is_transitive
from .presentation import GroupPresentation, invert_word


class CoverError(ValueError):
    """A covering-map operation received input it cannot handle."""


# ------------------------------------------------------------------ the base


def base_target() -> tuple[Complex2, tuple[MarkedPoint, ...]]:
    y, _, marks = build_Y()
    return y, tuple(marks)


def _check_base_shape(target: Complex2, marks: tuple[MarkedPoint, ...]) -> None:
    y, ymarks = base_target()
    if target.faces != y.faces or target.edges != y.edges:
        raise CoverError("target must be the standard base complex")
    if tuple(marks) != ymarks:
        raise CoverError("target marks must be the standard twelve points")


def orb_presentation() -> GroupPresentation:
    """Orbifold group of the base: loops plus one order-2 generator per point.

    Generators 1 and 2 are the green and red loops; generator 2 + i is
    the loop around the i-th marked point.  Each disc relation equates
    the attaching word with the ordered product of its three points.
    """
    y, marks = base_target()
    gens = 2 + len(marks)
    relators = [(2 + i, 2 + i) for i in range(1, len(marks) + 1)]
    for f, word in enumerate(y.faces):
        mu = tuple(3 + 3 * f + j for j in range(3))
        relators.append(invert_word(word) + mu)
    return GroupPresentation(gens, tuple(relators))


# --------------------------------------------------------------- cover maps


@dataclass(frozen=True)
class FaceExtension:
    """How one source face covers its target face.

    `marks` lists the target-face cone points carrying the disc cover's
    branch monodromies, in order; identity entries mean the point is
    hit but not branched.
    """

    target_face: int
    boundary_degree: int
    disc_cover: BranchedDiscCover
    marks: tuple[int, ...]

    @property
    def branched_marks(self) -> tuple[int, ...]:
        return tuple(
            mk
            for mk, mono in zip(self.marks, self.disc_cover.branch_monodromies)
            if not mono.is_identity()
        )


@dataclass(frozen=True)
class BranchedCoverMap:
    source: Complex2
    target: Complex2
    target_marks: tuple[MarkedPoint, ...]
    vertex_map: tuple[int, ...]
    edge_map: tuple[int, ...]
    face_map: tuple[FaceExtension, ...]
    labels: CellLabels

    @property
    def degree(self) -> int:
        return sum(1 for v in self.vertex_map if v == 0)

    def image_word(self, face: int) -> tuple[int, ...]:
        out = []
        for letter in self.source.faces[face]:
            t = self.edge_map[abs(letter) - 1]
            out.append(t if letter > 0 else -t)
        return tuple(out)

    def branch_points_upstairs(self) -> int:
        return sum(ext.disc_cover.branch_points_upstairs() for ext in self.face_map)


_EDGE_TARGET = {"green": 1, "red": 2}
_FACE_TARGET = {"black": 0, "white": 1, "green": 2, "red": 3}


def build_cover_map(
    source: Complex2,
    labels: CellLabels,
    target: Complex2 | None = None,
    target_marks: tuple[MarkedPoint, ...] | None = None,
) -> BranchedCoverMap:
    """Cover a labeled net complex over the base.

    Crossings go to the base vertex, each segment wraps its loop once
    in the direction its curve travels, and every face extends over the
    same-color disc with branching at the disc's first two points.
    """
    if target is None or target_marks is None:
        target, target_marks = base_target()
    _check_base_shape(target, target_marks)
    vertex_map = (0,) * source.vertex_count

    # a segment wraps forward iff its letter in its own curve disc is positive
    edge_sign = [0] * len(source.edges)
    for fi, word in enumerate(source.faces):
        if labels.face_curve[fi] is None:
            continue
        for letter in word:
            edge_sign[abs(letter) - 1] = 1 if letter > 0 else -1
    if any(s == 0 for s in edge_sign):
        raise CoverError("every edge must appear in a curve disc")
    edge_map = tuple(
        s * _EDGE_TARGET[color] for s, color in zip(edge_sign, labels.edge_colors)
    )

    face_map = []
    for fi, word in enumerate(source.faces):
        tf = _FACE_TARGET[labels.face_colors[fi]]
        period = len(target.faces[tf])
        n, rem = divmod(len(word), period)
        if rem:
            raise CoverError(
                f"face {fi}: boundary length {len(word)} does not cover "
                f"a length-{period} word"
            )
        face_map.append(FaceExtension(tf, n, extend_disc_cover(n), (0, 1)))
    return BranchedCoverMap(
        source,
        target,
        tuple(target_marks),
        vertex_map,
        edge_map,
        tuple(face_map),
        labels,
    )


# --------------------------------------------------------------- validation


@dataclass(frozen=True)
class CoverReport:
    passed: bool
    violations: tuple[str, ...]


def _word_shift(image: tuple[int, ...], base: tuple[int, ...]) -> int | None:
    """Shift s with image[t] == base[(t+s) % len(base)], or None."""
    period = len(base)
    for s in range(period):
        if all(image[t] == base[(t + s) % period] for t in range(len(image))):
            return s
    return None


def _corners(c: Complex2) -> dict[int, list[tuple[int, int]]]:
    """Face corners by vertex, as (incoming letter, outgoing letter)."""
    out: dict[int, list[tuple[int, int]]] = {v: [] for v in range(c.vertex_count)}
    for word in c.faces:
        for prev, cur in zip(word[-1:] + word[:-1], word):
            out[c.tail_of(cur)].append((prev, cur))
    return out


def _edge_traversals(c: Complex2) -> list[int]:
    count = [0] * len(c.edges)
    for word in c.faces:
        for letter in word:
            count[abs(letter) - 1] += 1
    return count


def validate_cover(f: BranchedCoverMap) -> CoverReport:
    """Check the covering axioms cell by cell; violations become a report."""
    src, tgt = f.source, f.target
    bad: list[str] = []
    d = f.degree

    # fibers over the cells all have the same cardinality
    for v in range(tgt.vertex_count):
        fiber = sum(1 for img in f.vertex_map if img == v)
        if fiber != d:
            bad.append(f"fiber over vertex {v} has {fiber} points, degree is {d}")
    for e in range(len(tgt.edges)):
        fiber = sum(1 for t in f.edge_map if abs(t) == e + 1)
        if fiber != d:
            bad.append(f"fiber over edge {e} has {fiber} segments, degree is {d}")
    face_fiber = [0] * len(tgt.faces)
    for ext in f.face_map:
        face_fiber[ext.target_face] += ext.boundary_degree
    for tf, fiber in enumerate(face_fiber):
        if fiber != d:
            bad.append(f"fiber over face {tf} has total degree {fiber}, degree is {d}")

    # edge endpoints commute with the maps
    for e, (tail, head) in enumerate(src.edges):
        letter = f.edge_map[e]
        if (f.vertex_map[tail], f.vertex_map[head]) != (
            tgt.tail_of(letter),
            tgt.head_of(letter),
        ):
            bad.append(f"edge {e} endpoints do not match its image")

    # color preservation for labeled cells
    for e, color in enumerate(f.labels.edge_colors):
        if abs(f.edge_map[e]) != _EDGE_TARGET[color]:
            bad.append(f"edge {e} is {color} but covers edge {abs(f.edge_map[e])}")
    for fi, color in enumerate(f.labels.face_colors):
        if f.face_map[fi].target_face != _FACE_TARGET[color]:
            bad.append(f"face {fi} is {color} but covers face {f.face_map[fi].target_face}")

    # attaching words commute: the image reads the target word n times
    for fi, word in enumerate(src.faces):
        ext = f.face_map[fi]
        base = tgt.faces[ext.target_face]
        if len(word) != ext.boundary_degree * len(base):
            bad.append(f"face {fi}: boundary length disagrees with its degree")
            continue
        if _word_shift(f.image_word(fi), base) is None:
            bad.append(f"face {fi}: image word is not a power of its target word")

    # local homeomorphism at vertices: corner sets map bijectively
    tgt_corners = _corners(tgt)
    src_corners = _corners(src)
    for v in range(src.vertex_count):
        image = sorted(
            (
                f.edge_map[abs(a) - 1] * (1 if a > 0 else -1),
                f.edge_map[abs(b) - 1] * (1 if b > 0 else -1),
            )
            for a, b in src_corners[v]
        )
        if image != sorted(tgt_corners[f.vertex_map[v]]):
            bad.append(f"vertex {v}: link does not match the target link")

    # local homeomorphism along edges: traversal counts match
    src_trav = _edge_traversals(src)
    tgt_trav = _edge_traversals(tgt)
    for e in range(len(src.edges)):
        if src_trav[e] != tgt_trav[abs(f.edge_map[e]) - 1]:
            bad.append(f"edge {e}: traversed {src_trav[e]} times, target expects "
                       f"{tgt_trav[abs(f.edge_map[e]) - 1]}")

    # branching restricted to allowed points, order at most two, discs upstairs
    marks_by_face: dict[int, list[MarkedPoint]] = {}
    for mark in f.target_marks:
        marks_by_face.setdefault(mark.face, []).append(mark)
    for fi, ext in enumerate(f.face_map):
        cov = ext.disc_cover
        if cov.degree != ext.boundary_degree:
            bad.append(f"face {fi}: disc cover degree {cov.degree} != {ext.boundary_degree}")
        if not cov.is_disc():
            bad.append(f"face {fi}: extension is not a disc")
        if len(ext.marks) != len(cov.branch_monodromies):
            bad.append(f"face {fi}: mark list does not match monodromy list")
            continue
        if len(set(ext.marks)) != len(ext.marks):
            bad.append(f"face {fi}: repeated branch mark")
        if list(ext.marks) != sorted(ext.marks):
            bad.append(f"face {fi}: branch marks out of face order")
        allowed = marks_by_face.get(ext.target_face, [])
        for mk, mono in zip(ext.marks, cov.branch_monodromies):
            if not 0 <= mk < len(allowed):
                bad.append(f"face {fi}: mark {mk} out of range")
                continue
            if not mono.is_involution():
                bad.append(f"face {fi}: branching of order above two at mark {mk}")
            if not mono.is_identity() and not allowed[mk].branching_allowed:
                bad.append(f"face {fi}: branch point at a protected point (mark {mk})")
    return CoverReport(not bad, tuple(bad))


def euler_relation_check(f: BranchedCoverMap) -> bool:
    """Euler characteristic bookkeeping for a branched cover."""
    upstairs = euler_characteristic(f.source)
    downstairs = euler_characteristic(f.target)
    return upstairs == f.degree * downstairs - f.branch_points_upstairs()


# ----------------------------------------------------------- representations


@dataclass(frozen=True)
class MonodromyRep:
    """Permutation images of the base orbifold group on the vertex fiber."""

    degree: int
    green: Permutation
    red: Permutation
    cone: tuple[Permutation, ...]

    def __post_init__(self) -> None:
        perms = (self.green, self.red) + self.cone
        for p in perms:
            if p.degree != self.degree:
                raise ValueError("all images must share the rep degree")

    def letter_image(self, letter: int) -> Permutation:
        base = self.green if abs(letter) == 1 else self.red
        return base if letter > 0 else base.inverse()

    def word_image(self, word: tuple[int, ...]) -> Permutation:
        out = Permutation.identity(self.degree)
        for letter in word:
            out = out * self.letter_image(letter)
        return out

    def is_transitive(self) -> bool:
        return is_transitive([self.green, self.red, *self.cone])


def rep_violations(m: MonodromyRep, target: Complex2 | None = None) -> tuple[str, ...]:
    """Relation failures of a candidate representation."""
    if target is None:
        target, _ = base_target()
    bad = []
    if len(m.cone) != 3 * len(target.faces):
        return (f"expected {3 * len(target.faces)} cone images, got {len(m.cone)}",)
    for i, mu in enumerate(m.cone):
        if not mu.is_involution():
            bad.append(f"cone image {i} is not an involution")
    for fi, word in enumerate(target.faces):
        lhs = m.word_image(word)
        rhs = Permutation.identity(m.degree)
        for j in range(3):
            rhs = rhs * m.cone[3 * fi + j]
        if lhs != rhs:
            bad.append(f"face {fi}: attaching word and cone product disagree")
    return tuple(bad)


def _anchor_sheets(f: BranchedCoverMap, fi: int) -> list[int]:
    """Source vertices of face fi's base corners, in boundary-visit order.

    Visit q of the extension corresponds to disc sheet b^q(1) where b is
    the disc cover's boundary monodromy; this fixes the transport
    convention between the vertex fiber and the disc sheets.
    """
    src, tgt = f.source, f.target
    ext = f.face_map[fi]
    word = src.faces[fi]
    base = tgt.faces[ext.target_face]
    period = len(base)
    s = _word_shift(f.image_word(fi), base)
    if s is None:
        raise CoverError(f"face {fi}: image word is not a power of its target word")
    t0 = (period - s) % period
    return [
        src.tail_of(word[(t0 + q * period) % len(word)])
        for q in range(ext.boundary_degree)
    ]


def monodromy_of_cover(f: BranchedCoverMap) -> MonodromyRep:
    """Permutation action of the base loops on the fiber over the vertex."""
    rep = validate_cover(f)
    if not rep.passed:
        raise CoverError(f"cover does not validate: {rep.violations[0]}")
    if not f.source.is_connected():
        raise CoverError("cover is disconnected")
    src = f.source
    d = f.degree
    sheet = {v: v + 1 for v in range(src.vertex_count)}

    images = {}
    for target_letter in (1, 2):
        img = [0] * d
        for e, (tail, head) in enumerate(src.edges):
            if f.edge_map[e] == target_letter:
                img[sheet[tail] - 1] = sheet[head]
            elif f.edge_map[e] == -target_letter:
                img[sheet[head] - 1] = sheet[tail]
        try:
            images[target_letter] = Permutation(tuple(img))
        except ValueError:
            raise CoverError(
                f"loop {target_letter} does not act on the fiber by a bijection"
            ) from None

    cone = []
    for mi, mark in enumerate(f.target_marks):
        img = [0] * d
        for fi, ext in enumerate(f.face_map):
            if ext.target_face != mark.face:
                continue
            sigma = Permutation.identity(ext.boundary_degree)
            for mk, mono in zip(ext.marks, ext.disc_cover.branch_monodromies):
                if mk == mark.index:
                    sigma = mono
            anchors = _anchor_sheets(f, fi)
            beta = ext.disc_cover.boundary_monodromy
            # visit q of the boundary sits on disc sheet beta^q(1)
            sheet_at = []
            s = 1
            for _ in range(ext.boundary_degree):
                sheet_at.append(s)
                s = beta(s)
            visit_of = {s: q for q, s in enumerate(sheet_at)}
            for q in range(ext.boundary_degree):
                q2 = visit_of[sigma(sheet_at[q])]
                img[sheet[anchors[q]] - 1] = sheet[anchors[q2]]
        if 0 in img:
            raise CoverError(f"fiber transport incomplete at point {mi}")
        cone.append(Permutation(tuple(img)))
    return MonodromyRep(d, images[1], images[2], tuple(cone))


def cover_of_monodromy(
    m: MonodromyRep,
    target: Complex2 | None = None,
    target_marks: tuple[MarkedPoint, ...] | None = None,
) -> BranchedCoverMap:
    """Rebuild the covering complex from a permutation representation.

    Sheets become vertices, one green and one red edge leave every
    sheet, and each orbit of a face's three cone images spans one face,
    which must be a disc for the result to be a complex.
    """
    if target is None or target_marks is None:
        target, target_marks = base_target()
    _check_base_shape(target, target_marks)
    bad = rep_violations(m, target)
    if bad:
        raise CoverError(f"representation violates the base relations: {bad[0]}")
    if not m.is_transitive():
        raise CoverError("representation acts intransitively: cover would disconnect")
    d = m.degree

    # curves upstairs are the loop preimages: one per cycle of each image
    curve_of = {}
    for perm, offset in ((m.green, 0), (m.red, len(m.green.cycles()))):
        for ci, cyc in enumerate(perm.cycles()):
            for x in cyc:
                curve_of[(offset > 0, x)] = offset + ci

    edges = []
    edge_colors = []
    edge_curve = []
    for perm, color in ((m.green, "green"), (m.red, "red")):
        for x in range(1, d + 1):
            edges.append((x - 1, perm(x) - 1))
            edge_colors.append(color)
            edge_curve.append(curve_of[(color == "red", x)])

    def source_letter(letter: int, x: int) -> tuple[int, int]:
        """Source edge letter lifting `letter` from sheet x, and the next sheet."""
        if letter == 1:
            return x, m.green(x)
        if letter == -1:
            y = m.green.inverse()(x)
            return -y, y
        if letter == 2:
            return d + x, m.red(x)
        y = m.red.inverse()(x)
        return -(d + y), y

    faces = []
    face_colors = []
    face_curve = []
    face_map = []
    color_of_face = {0: "black", 1: "white", 2: "green", 3: "red"}
    for tf, base in enumerate(target.faces):
        locals_ = [m.cone[3 * tf + j] for j in range(3)]
        boundary = m.word_image(base)
        seen = [False] * (d + 1)
        for v0 in range(1, d + 1):
            if seen[v0]:
                continue
            orbit = {v0}
            frontier = [v0]
            while frontier:
                x = frontier.pop()
                for p in locals_ + [boundary]:
                    for y in (p(x), p.inverse()(x)):
                        if y not in orbit:
                            orbit.add(y)
                            frontier.append(y)
            for x in orbit:
                seen[x] = True
            n = len(orbit)
            order = sorted(orbit)
            label = {x: i + 1 for i, x in enumerate(order)}
            restricted = []
            marks = []
            for j, p in enumerate(locals_):
                imgs = tuple(label[p(x)] for x in order)
                q = Permutation(imgs)
                if not q.is_identity():
                    restricted.append(q)
                    marks.append(j)
            if len(restricted) > 2:
                raise CoverError(
                    f"face over {tf}: a component branches at three points"
                )
            bperm = Permutation(tuple(label[boundary(x)] for x in order))
            disc = BranchedDiscCover(n, tuple(restricted), bperm)
            if not disc.is_disc():
                raise CoverError(f"face over {tf}: a component is not a disc")
            word = []
            x = v0
            for _ in range(n):
                for letter in base:
                    lt, x = source_letter(letter, x)
                    word.append(lt)
            if x != v0:
                raise CoverError(f"face over {tf}: boundary walk does not close")
            faces.append(tuple(word))
            face_colors.append(color_of_face[tf])
            face_curve.append(None if tf < 2 else curve_of[(tf == 3, v0)])
            face_map.append(FaceExtension(tf, n, disc, tuple(marks)))

    src = Complex2(d, tuple(edges), tuple(faces))
    labels = CellLabels(
        tuple(edge_colors), tuple(edge_curve), tuple(face_colors), tuple(face_curve)
    )
    return BranchedCoverMap(
        src,
        target,
        tuple(target_marks),
        (0,) * d,
        tuple([1] * d + [2] * d),
        tuple(face_map),
        labels,
    )


def canonical_monodromy(m: MonodromyRep) -> MonodromyRep:
    """Relabel sheets canonically: breadth-first over the generator images.

    Two representations of connected covers differ by a relabeling iff
    their canonical forms are equal.
    """
    if not m.is_transitive():
        raise CoverError("canonical form needs a transitive representation")
    gens = [m.green, m.red, *m.cone]
    best = None
    for start in range(1, m.degree + 1):
        order = [start]
        pos = {start: 1}
        i = 0
        while i < len(order):
            x = order[i]
            i += 1
            for p in gens:
                y = p(x)
                if y not in pos:
                    pos[y] = len(order) + 1
                    order.append(y)
        relabeled = [
            Permutation(tuple(pos[p(x)] for x in order)) for p in gens
        ]
        key = tuple(p.images for p in relabeled)
        if best is None or key < best[0]:
            best = (key, relabeled)
    assert best is not None
    g, r, *cone = best[1]
    return MonodromyRep(m.degree, g, r, tuple(cone))


# ------------------------------------------------------------ pulled-back metric


def pullback_metric(
    f: BranchedCoverMap, base_metric: CornerMetric | None = None
) -> tuple[CornerMetric, list[MarkedPoint]]:
    """Lift the base pentagon metric through the cover.

    Interior cone points lift cycle by cycle: a fixed point keeps angle
    pi and stays marked, a 2-cycle opens up to 2 pi and becomes
    regular.  Everything else just repeats once per sheet.
    """
    if base_metric is None:
        _, base_metric, _ = build_Y()
    marks_by_face: dict[int, set[int]] = {}
    for mark in f.target_marks:
        marks_by_face.setdefault(mark.face, set()).add(mark.index)
    metrics = []
    for fi, ext in enumerate(f.face_map):
        fm = base_metric.faces[ext.target_face]
        n = ext.boundary_degree
        mono_at = dict(zip(ext.marks, ext.disc_cover.branch_monodromies))
        interior: list[int] = []
        marked: list[int] = []
        face_marks = marks_by_face.get(ext.target_face, set())
        for i, q in enumerate(fm.interior_angles):
            if i in face_marks:
                sigma = mono_at.get(i, Permutation.identity(n))
                for cyc in sigma.cycles():
                    angle = q * len(cyc)
                    if angle == 2:
                        marked.append(len(interior))
                    interior.append(angle)
            else:
                interior.extend([q] * n)
        metrics.append(
            FaceMetric(
                pentagon_count=fm.pentagon_count * n,
                interior_angles=tuple(interior),
                boundary_angles=fm.boundary_angles * n,
                corner_angles=fm.corner_angles * n,
                marked_interior=tuple(marked),
            )
        )
    out_marks = [
        MarkedPoint(fi, i, True)
        for fi, fm in enumerate(metrics)
        for i in fm.marked_interior
    ]
    return CornerMetric(tuple(metrics)), out_marks
