import itertools
import random
from dataclasses import replace

import pytest

from orbicover.complex2 import Complex2, build_Y, cat_link_check, euler_characteristic
from orbicover.cover import (
    BranchedCoverMap,
    CoverError,
    FaceExtension,
    MonodromyRep,
    build_cover_map,
    canonical_monodromy,
    cover_of_monodromy,
    euler_relation_check,
    monodromy_of_cover,
    orb_presentation,
    pullback_metric,
    rep_violations,
    validate_cover,
)
from orbicover.curvenet import CellLabels, CurveNet, assemble_Yprime, build_sigma0
from orbicover.curvenet import checkerboard_and_orient, double_and_deform, moebius_surgery
from orbicover.monodromy import BranchedDiscCover, Permutation, extend_disc_cover
from orbicover.presentation import normalize, parse_presentation


def pipeline_cover(text):
    p = normalize(parse_presentation(text))
    surf, curves = build_sigma0(p)
    net = checkerboard_and_orient(
        moebius_surgery(double_and_deform(CurveNet(surf, tuple(curves))))
    )
    c2, labels = assemble_Yprime(net)
    return net, build_cover_map(c2, labels)


# degree, Euler characteristic, branch points, pullback cone points; the
# last two follow from the face count F via b = 4d - F and marks = 4d + 2F
COVER_STATS = {
    "a | a": (24, 6, 66, 156),
    "a |": (36, 6, 102, 228),
    "a,b | aba'b'": (60, 6, 174, 372),
    "a | aa": (36, 6, 102, 228),
    "a,b | abab'": (36, 4, 104, 224),
    "a,b | aa,bbb,abab": (216, 10, 638, 1316),
}

iden2 = Permutation.identity(2)
swap = Permutation((2, 1))


def degree2_rep():
    # branch once over the green disc and once over the red one
    cone = [iden2] * 12
    cone[6] = swap
    cone[9] = swap
    return MonodromyRep(2, swap, swap, tuple(cone))


class TestOrbPresentation:
    def test_shape(self):
        p = orb_presentation()
        assert p.generator_count == 14
        assert len(p.relators) == 16

    def test_square_relators_come_first(self):
        p = orb_presentation()
        assert p.relators[:12] == tuple((i, i) for i in range(3, 15))

    def test_disc_relators_tie_loops_to_points(self):
        p = orb_presentation()
        assert p.relators[12] == (2, -1, 3, 4, 5)
        assert p.relators[13] == (-2, -1, 6, 7, 8)
        assert p.relators[14] == (-1, 9, 10, 11)
        assert p.relators[15] == (-2, 12, 13, 14)


class TestBuildCoverMap:
    @pytest.mark.parametrize("text", sorted(COVER_STATS))
    def test_pipeline_covers_validate(self, text):
        net, f = pipeline_cover(text)
        report = validate_cover(f)
        assert report.passed, report.violations[:3]
        d, chi, branch, _ = COVER_STATS[text]
        assert f.degree == d == len(net.crossings)
        assert euler_characteristic(f.source) == chi
        assert f.branch_points_upstairs() == branch
        assert chi == 3 * d - branch
        assert euler_relation_check(f)

    def test_fibers_are_constant(self):
        _, f = pipeline_cover("a | aa")
        d = f.degree
        assert sum(1 for v in f.vertex_map if v == 0) == d
        for letter in (1, 2):
            assert sum(1 for t in f.edge_map if abs(t) == letter) == d
        by_face = [0, 0, 0, 0]
        for ext in f.face_map:
            by_face[ext.target_face] += ext.boundary_degree
        assert by_face == [d, d, d, d]

    def test_region_faces_alternate_loops(self):
        _, f = pipeline_cover("a | a")
        for fi, ext in enumerate(f.face_map):
            word = f.image_word(fi)
            if ext.target_face == 0:
                assert word == (1, -2) * ext.boundary_degree or \
                    word == (-2, 1) * ext.boundary_degree
            elif ext.target_face == 1:
                assert word == (1, 2) * ext.boundary_degree or \
                    word == (2, 1) * ext.boundary_degree


class TestValidateCover:
    def test_flipped_segment_breaks_the_link(self):
        _, f = pipeline_cover("a | a")
        edge_map = list(f.edge_map)
        edge_map[0] = -edge_map[0]
        bad = validate_cover(replace(f, edge_map=tuple(edge_map)))
        assert not bad.passed
        assert any("link" in v or "power" in v for v in bad.violations)

    def test_wrong_color_is_reported(self):
        _, f = pipeline_cover("a | a")
        colors = list(f.labels.edge_colors)
        colors[0] = "red" if colors[0] == "green" else "green"
        bad = validate_cover(replace(f, labels=replace(f.labels, edge_colors=tuple(colors))))
        assert any("covers edge" in v for v in bad.violations)

    def test_degree_mismatch_in_extension(self):
        _, f = pipeline_cover("a | a")
        ext = f.face_map[0]
        wrong = replace(ext, disc_cover=extend_disc_cover(ext.boundary_degree + 1))
        fm = list(f.face_map)
        fm[0] = wrong
        bad = validate_cover(replace(f, face_map=tuple(fm)))
        assert any("disc cover degree" in v for v in bad.violations)

    def test_mark_bookkeeping(self):
        _, f = pipeline_cover("a | a")
        ext = f.face_map[0]
        fm = list(f.face_map)
        fm[0] = replace(ext, marks=(0, 0))
        assert any(
            "repeated" in v
            for v in validate_cover(replace(f, face_map=tuple(fm))).violations
        )
        fm[0] = replace(ext, marks=(1, 0))
        assert any(
            "face order" in v
            for v in validate_cover(replace(f, face_map=tuple(fm))).violations
        )
        fm[0] = replace(ext, marks=(0, 5))
        assert any(
            "out of range" in v
            for v in validate_cover(replace(f, face_map=tuple(fm))).violations
        )


class TestMonodromyExtraction:
    def test_pipeline_rep_satisfies_relations(self):
        _, f = pipeline_cover("a | aa")
        m = monodromy_of_cover(f)
        assert rep_violations(m) == ()
        assert m.is_transitive()
        assert m.degree == f.degree

    def test_loop_cycles_count_curves(self):
        net, f = pipeline_cover("a | a")
        m = monodromy_of_cover(f)
        greens = sum(1 for c in net.curves if c.color == "green")
        reds = len(net.curves) - greens
        assert len(m.green.cycles()) == greens
        assert len(m.red.cycles()) == reds

    def test_disconnected_cover_is_refused(self):
        # two disjoint copies of the base validate fine as a degree-2 cover
        # but carry no representation on a single fiber orbit
        y, _, marks = build_Y()
        src = Complex2(
            2,
            ((0, 0), (1, 1), (0, 0), (1, 1)),
            ((1, -3), (2, -4), (1, 3), (2, 4), (1,), (2,), (3,), (4,)),
        )
        labels = CellLabels(
            ("green", "green", "red", "red"),
            (0, 1, 2, 3),
            ("black", "black", "white", "white", "green", "green", "red", "red"),
            (None, None, None, None, 0, 1, 2, 3),
        )
        f = BranchedCoverMap(
            src,
            y,
            tuple(marks),
            (0, 0),
            (1, 1, 2, 2),
            tuple(
                FaceExtension(tf, 1, extend_disc_cover(1), (0, 1))
                for tf in (0, 0, 1, 1, 2, 2, 3, 3)
            ),
            labels,
        )
        assert validate_cover(f).passed, validate_cover(f).violations[:3]
        with pytest.raises(CoverError, match="disconnected"):
            monodromy_of_cover(f)


class TestCoverOfMonodromy:
    def test_identity_rep_rebuilds_the_base(self):
        y, metric, marks = build_Y()
        one = Permutation.identity(1)
        m = MonodromyRep(1, one, one, tuple([one] * 12))
        f = cover_of_monodromy(m)
        assert f.source.edges == y.edges
        assert f.source.faces == y.faces
        assert validate_cover(f).passed
        met, lifted = pullback_metric(f)
        assert met == metric
        assert len(lifted) == 12

    def test_degree_two_example(self):
        m = degree2_rep()
        assert rep_violations(m) == ()
        f = cover_of_monodromy(m)
        assert validate_cover(f).passed
        assert euler_characteristic(f.source) == 4
        assert f.branch_points_upstairs() == 2
        assert euler_relation_check(f)
        assert monodromy_of_cover(f) == m

    def test_relation_violation_is_refused(self):
        cone = [iden2] * 12
        cone[6] = swap
        bad = MonodromyRep(2, iden2, swap, tuple(cone))
        assert rep_violations(bad) != ()
        with pytest.raises(CoverError, match="relations"):
            cover_of_monodromy(bad)

    def test_intransitive_rep_is_refused(self):
        m = MonodromyRep(2, iden2, iden2, tuple([iden2] * 12))
        assert rep_violations(m) == ()
        with pytest.raises(CoverError, match="intransitively"):
            cover_of_monodromy(m)

    def test_annular_component_is_refused(self):
        # both points of the green disc branched: the preimage closes up
        # into an annulus, which no disc attachment represents
        cone = [iden2] * 12
        cone[6] = swap
        cone[7] = swap
        m = MonodromyRep(2, iden2, iden2, tuple(cone))
        assert rep_violations(m) == ()
        with pytest.raises(CoverError, match="not a disc"):
            cover_of_monodromy(m)

    def test_triple_branching_is_refused(self):
        cone = [iden2] * 12
        cone[6] = swap
        cone[7] = swap
        cone[8] = swap
        cone[9] = swap
        m = MonodromyRep(2, swap, swap, tuple(cone))
        assert rep_violations(m) == ()
        with pytest.raises(CoverError, match="three points"):
            cover_of_monodromy(m)


BASE_WORDS = [(1, -2), (1, 2), (1,), (2,)]


def _involutions(n):
    out = []
    for imgs in itertools.permutations(range(1, n + 1)):
        p = Permutation(imgs)
        if p.is_involution():
            out.append(p)
    return out


def _cycle_triples(k):
    """Involution triples multiplying to the shift cycle, at most two nontrivial."""
    cyc = Permutation(tuple(list(range(2, k + 1)) + [1]))
    iden = Permutation.identity(k)
    seen = set()
    for x in _involutions(k):
        y = x.inverse() * cyc
        if not y.is_involution():
            continue
        if x.deficiency() + y.deficiency() != k - 1:
            continue
        for triple in ((iden, x, y), (x, iden, y), (x, y, iden)):
            a, b, c = triple
            if a * b * c == cyc:
                seen.add(triple)
    return sorted(seen, key=lambda t: tuple(p.images for p in t))


_TRIPLES = {k: _cycle_triples(k) for k in range(1, 7)}


def _spread(p, cyc):
    # transfer a permutation of {1..k} onto the fiber points listed in cyc
    return {x: cyc[p(i + 1) - 1] for i, x in enumerate(cyc)}


def random_valid_rep(rng, degree):
    """Uniform over valid representations with the given loop images.

    Every disc component of a valid cover sits over a single boundary
    cycle and carries a dihedral involution pair plus one trivial slot,
    so sampling those choices uniformly reaches the whole valid set.
    """
    xs = list(range(1, degree + 1))
    rng.shuffle(xs)
    green = Permutation(tuple(xs))
    rng.shuffle(xs)
    red = Permutation(tuple(xs))
    probe = MonodromyRep(degree, green, red, tuple([Permutation.identity(degree)] * 12))
    cone = []
    for word in BASE_WORDS:
        boundary = probe.word_image(word)
        images = [dict(), dict(), dict()]
        for cyc in boundary.cycles():
            choice = rng.choice(_TRIPLES[len(cyc)])
            for j in range(3):
                images[j].update(_spread(choice[j], cyc))
        for j in range(3):
            cone.append(Permutation(tuple(images[j][x] for x in range(1, degree + 1))))
    return MonodromyRep(degree, green, red, tuple(cone))


class TestGaloisRoundTrip:
    def test_dihedral_triple_counts(self):
        # one trivial slot (3 places) times the k reflection pairs
        assert {k: len(v) for k, v in _TRIPLES.items()} == {
            1: 1, 2: 3, 3: 9, 4: 12, 5: 15, 6: 18,
        }

    def test_hundred_random_reps(self):
        rng = random.Random(2026)
        kept = 0
        while kept < 100:
            m = random_valid_rep(rng, rng.randint(1, 6))
            assert rep_violations(m) == ()
            if not m.is_transitive():
                continue
            f = cover_of_monodromy(m)
            assert validate_cover(f).passed
            assert euler_relation_check(f)
            assert monodromy_of_cover(f) == m
            kept += 1

    def test_canonical_form_ignores_relabeling(self):
        rng = random.Random(5)
        checked = 0
        while checked < 25:
            m = random_valid_rep(rng, rng.randint(2, 6))
            if not m.is_transitive():
                continue
            xs = list(range(1, m.degree + 1))
            rng.shuffle(xs)
            t = Permutation(tuple(xs))
            relabel = lambda p: t.inverse() * p * t
            shuffled = MonodromyRep(
                m.degree,
                relabel(m.green),
                relabel(m.red),
                tuple(relabel(c) for c in m.cone),
            )
            assert canonical_monodromy(shuffled) == canonical_monodromy(m)
            checked += 1

    def test_canonical_form_is_idempotent(self):
        m = canonical_monodromy(degree2_rep())
        assert canonical_monodromy(m) == m

    def test_pipeline_covers_round_trip(self):
        for text in ("a | a", "a,b | abab'"):
            _, f = pipeline_cover(text)
            m = monodromy_of_cover(f)
            f2 = cover_of_monodromy(m)
            assert monodromy_of_cover(f2) == m
            assert euler_characteristic(f2.source) == euler_characteristic(f.source)
            assert len(f2.source.faces) == len(f.source.faces)


class TestPullbackMetric:
    @pytest.mark.parametrize("text", sorted(COVER_STATS))
    def test_pipeline_metrics_stay_locally_cat(self, text):
        _, f = pipeline_cover(text)
        metric, marks = pullback_metric(f)
        assert len(marks) == COVER_STATS[text][3]
        report = cat_link_check(f.source, metric)
        assert report.passed, report.violations[:3]

    def test_area_scales_with_degree(self):
        _, base_metric, _ = build_Y()
        _, f = pipeline_cover("a | a")
        metric, _ = pullback_metric(f)
        assert metric.total_area() == pytest.approx(f.degree * base_metric.total_area())

    def test_unbranched_points_stay_conical(self):
        f = cover_of_monodromy(degree2_rep())
        metric, marks = pullback_metric(f)
        # 12 points with 2 preimages each, except the branched pair merge
        # into regular points: 24 - 2 * 2
        assert len(marks) == 20
        for mark in marks:
            assert metric.faces[mark.face].interior_angles[mark.index] == 2
        report = cat_link_check(f.source, metric)
        assert report.passed, report.violations
