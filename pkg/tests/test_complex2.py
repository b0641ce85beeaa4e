import math

import pytest

from orbicover.complex2 import (
    Complex2,
    CornerMetric,
    FaceMetric,
    MarkedPoint,
    build_Y,
    cat_link_check,
    euler_characteristic,
    fundamental_group,
    pentagon_constants,
    vertex_link,
)
from orbicover.presentation import GroupPresentation, tietze_simplify


def disjoint_union(a: Complex2, b: Complex2) -> Complex2:
    shift_v, shift_e = a.vertex_count, len(a.edges)
    edges = a.edges + tuple((t + shift_v, h + shift_v) for t, h in b.edges)
    faces = a.faces + tuple(
        tuple(l + shift_e if l > 0 else l - shift_e for l in w) for w in b.faces
    )
    return Complex2(a.vertex_count + b.vertex_count, edges, faces)


def flip_edge(c: Complex2, eid: int) -> Complex2:
    edges = list(c.edges)
    t, h = edges[eid]
    edges[eid] = (h, t)
    fid = eid + 1
    faces = tuple(
        tuple(-l if abs(l) == fid else l for l in w) for w in c.faces
    )
    return Complex2(c.vertex_count, tuple(edges), faces)


FIG8 = Complex2(1, ((0, 0), (0, 0)), ())
TORUS = Complex2(1, ((0, 0), (0, 0)), ((1, 2, -1, -2),))


class TestComplex2Validation:
    def test_edge_endpoint_range(self):
        with pytest.raises(ValueError):
            Complex2(1, ((0, 1),), ())

    def test_unknown_edge_in_word(self):
        with pytest.raises(ValueError):
            Complex2(1, ((0, 0),), ((2,),))

    def test_word_must_close(self):
        # path edge 0->1 traversed once does not close up
        with pytest.raises(ValueError):
            Complex2(2, ((0, 1),), ((1,),))

    def test_empty_word_rejected(self):
        with pytest.raises(ValueError):
            Complex2(1, ((0, 0),), ((),))

    def test_directions(self):
        c = Complex2(2, ((0, 1),), ())
        assert c.tail_of(1) == 0 and c.head_of(1) == 1
        assert c.tail_of(-1) == 1 and c.head_of(-1) == 0

    def test_connectivity(self):
        assert FIG8.is_connected()
        assert not Complex2(2, (), ()).is_connected()


class TestEulerCharacteristic:
    def test_basic_counts(self):
        assert euler_characteristic(FIG8) == -1
        assert euler_characteristic(TORUS) == 0
        assert euler_characteristic(build_Y()[0]) == 3

    def test_additive_under_disjoint_union(self):
        both = disjoint_union(TORUS, FIG8)
        assert euler_characteristic(both) == euler_characteristic(TORUS) + euler_characteristic(FIG8)

    def test_invariant_under_edge_reversal(self):
        flipped = flip_edge(TORUS, 0)
        assert euler_characteristic(flipped) == euler_characteristic(TORUS)
        # reversal keeps attaching words closed
        assert flipped.faces[0] == (-1, 2, 1, -2)


class TestFundamentalGroup:
    def test_figure_eight_is_free(self):
        p = fundamental_group(FIG8)
        assert p == GroupPresentation(2, ())

    def test_torus_relator(self):
        p = fundamental_group(TORUS)
        assert p.generator_count == 2
        assert p.relators == ((1, 2, -1, -2),)

    def test_theta_graph(self):
        theta = Complex2(2, ((0, 1), (0, 1), (0, 1)), ())
        p = fundamental_group(theta)
        assert p == GroupPresentation(2, ())

    def test_base_orbihedron_simply_connected(self):
        y, _, _ = build_Y()
        simp = tietze_simplify(fundamental_group(y))
        assert simp.generator_count == 0 and simp.relators == ()

    def test_disconnected_rejected(self):
        with pytest.raises(ValueError):
            fundamental_group(Complex2(2, (), ()))

    def test_deterministic(self):
        y, _, _ = build_Y()
        assert fundamental_group(y) == fundamental_group(y)


class TestPentagonConstants:
    def test_against_bisection_oracle(self):
        # independent root of cosh^2 x - cosh x - 1 on [0.5, 2]
        lo, hi = 0.5, 2.0
        f = lambda x: math.cosh(x) ** 2 - math.cosh(x) - 1
        assert f(lo) < 0 < f(hi)
        for _ in range(200):
            mid = (lo + hi) / 2
            if f(mid) < 0:
                lo = mid
            else:
                hi = mid
        side, _ = pentagon_constants()
        assert abs(side - lo) < 1e-13

    def test_golden_ratio_and_area(self):
        side, area = pentagon_constants()
        assert abs(math.cosh(side) - (1 + math.sqrt(5)) / 2) < 1e-12
        assert area == math.pi / 2
        assert abs(math.cosh(side) - math.sinh(side) ** 2) < 1e-12


class TestFaceMetric:
    def test_quarter_budget_enforced(self):
        with pytest.raises(ValueError):
            FaceMetric(1, (2,), (), (2,))  # 4 quarters for one pentagon

    def test_positive_angles(self):
        with pytest.raises(ValueError):
            FaceMetric(1, (0, 3), (), (2,))

    def test_marked_index_range(self):
        with pytest.raises(ValueError):
            FaceMetric(2, (2, 2, 2), (), (2, 2), marked_interior=(5,))

    def test_area(self):
        assert FaceMetric(2, (2, 2, 2), (), (2, 2)).area() == math.pi


class TestBuildY:
    def test_cell_structure(self):
        y, m, marked = build_Y()
        assert y.vertex_count == 1
        assert len(y.edges) == 2
        assert y.faces == ((1, -2), (1, 2), (1,), (2,))

    def test_twelve_cone_points(self):
        _, m, marked = build_Y()
        assert len(marked) == 12
        assert all(p.branching_allowed for p in marked)
        assert [(p.face, p.index) for p in marked] == [
            (f, i) for f in range(4) for i in range(3)
        ]
        for fm in m.faces:
            assert fm.marked_interior == (0, 1, 2)
            assert fm.interior_angles == (2, 2, 2)

    def test_total_area_and_pentagon_count(self):
        _, m, _ = build_Y()
        assert sum(fm.pentagon_count for fm in m.faces) == 8
        assert abs(m.total_area() - 4 * math.pi) < 1e-12

    def test_boundary_is_geodesic(self):
        # every metric vertex on a boundary edge has angle exactly pi
        _, m, _ = build_Y()
        for fm in m.faces:
            assert all(q == 2 for q in fm.boundary_angles)
            assert all(q == 2 for q in fm.corner_angles)

    def test_star_link_is_k4(self):
        y, m, _ = build_Y()
        link = vertex_link(y, m, 0)
        assert len(link.nodes) == 4
        assert len(link.arcs) == 6
        assert {frozenset((a, b)) for a, b, _, _, _ in link.arcs} == {
            frozenset(pair)
            for pair in (
                ((0, 0), (0, 1)),
                ((0, 0), (1, 0)),
                ((0, 0), (1, 1)),
                ((0, 1), (1, 0)),
                ((0, 1), (1, 1)),
                ((1, 0), (1, 1)),
            )
        }
        # shortest link cycle is a triangle of angle 3 pi
        assert link.min_cycle_quarters() == 6

    def test_cat_check_passes(self):
        y, m, _ = build_Y()
        report = cat_link_check(y, m)
        assert report.passed and report.violations == ()


class TestCatLinkCheck:
    def test_unmarked_pi_interior_vertex_fails(self):
        c = Complex2(1, ((0, 0),), ((1,),))
        bad = CornerMetric((FaceMetric(2, (2, 4), (2,), (2,)),))
        report = cat_link_check(c, bad)
        assert not report.passed
        assert any("interior vertex 0" in v for v in report.violations)

    def test_marked_point_needs_angle_exactly_pi(self):
        c = Complex2(1, ((0, 0),), ((1,),))
        bad = CornerMetric((FaceMetric(2, (3, 3), (2,), (2,), marked_interior=(0, 1)),))
        report = cat_link_check(c, bad)
        assert not report.passed
        assert sum("cone point" in v for v in report.violations) == 2

    def test_five_corner_chain_passes(self):
        # one pentagon, all five corners at the lone vertex; the link is
        # an open chain of five pi/2 corners, total 5 pi / 2, no cycle
        c = Complex2(1, ((0, 0), (0, 0), (0, 0)), ((1, 2, -1, -2, 3),))
        m = CornerMetric((FaceMetric(1, (), (), (1, 1, 1, 1, 1)),))
        link = vertex_link(c, m, 0)
        assert link.min_cycle_quarters() is None
        assert sum(w for _, _, w, _, _ in link.arcs) == 5
        assert cat_link_check(c, m).passed

    def test_wrapped_disc_fails(self):
        # disc wrapped five times around a loop: parallel link arcs make
        # cycles of angle pi
        c = Complex2(1, ((0, 0),), ((1, 1, 1, 1, 1),))
        m = CornerMetric((FaceMetric(1, (), (), (1, 1, 1, 1, 1)),))
        report = cat_link_check(c, m)
        assert not report.passed
        assert any("link cycle" in v for v in report.violations)

    def test_self_loop_corner_detected(self):
        # word e e^-1 creates self-loops in the link
        c = Complex2(1, ((0, 0),), ((1, -1),))
        m = CornerMetric((FaceMetric(1, (), (), (2, 3)),))
        link = vertex_link(c, m, 0)
        assert link.min_cycle_quarters() == 2
        assert not cat_link_check(c, m).passed

    def test_thin_edge_vertex_fails(self):
        c = Complex2(1, ((0, 0),), ((1,),))
        bad = CornerMetric((FaceMetric(2, (4, 2), (1,), (3,), marked_interior=(1,)),))
        report = cat_link_check(c, bad)
        assert not report.passed
        assert any("edge vertex" in v for v in report.violations)

    def test_metric_complex_mismatch(self):
        y, m, _ = build_Y()
        assert not cat_link_check(y, CornerMetric(m.faces[:2])).passed
        with pytest.raises(ValueError):
            vertex_link(y, CornerMetric(m.faces[:2]), 0)


class TestVertexLink:
    def test_vertex_range(self):
        y, m, _ = build_Y()
        with pytest.raises(ValueError):
            vertex_link(y, m, 5)

    def test_corner_count_must_match_word(self):
        c = Complex2(1, ((0, 0),), ((1, 1, 1, 1, 1),))
        m = CornerMetric((FaceMetric(1, (), (), (5,)),))
        with pytest.raises(ValueError):
            vertex_link(c, m, 0)
