"""
Tests for Newton diagrams, the cone partition and the vertex constants.
"""
import math
from fractions import Fraction

import pytest

from newton_maximal.diagram import (
    axis_index,
    beta_constant,
    build_diagram,
    decompose_axis_index,
    decompose_index,
    gamma_constant,
    reconstruct,
    scaling_constants,
    slot_index,
    verify_partition,
)
from newton_maximal.errors import DiagramError
from newton_maximal.polynomial import parse_polynomial
from tests.helpers.oracles import brute_force_vertices


def _diagram(text, n, **options):
    return build_diagram(parse_polynomial(text, n), **options)


class TestBuildDiagram:
    def test_single_monomial(self):
        diagram = _diagram("t1*t2", 2)
        assert [v.vertex for v in diagram.vertices] == [(1, 1)]
        data = diagram.vertex(0)
        assert data.normals == ((1, 0), (0, 1))
        assert data.denominator == 1
        assert data.beta == math.inf

    def test_two_vertices(self, two_vertex_diagram):
        assert [v.vertex for v in two_vertex_diagram.vertices] == [(1, 3), (2, 1)]
        first, second = two_vertex_diagram.vertices
        assert first.normals == ((1, 0), (2, 1))
        assert second.normals == ((2, 1), (0, 1))
        assert (first.denominator, second.denominator) == (1, 2)

    def test_axis_vertices(self, axis_poly):
        diagram = build_diagram(axis_poly)
        assert [v.vertex for v in diagram.vertices] == [(0, 3), (2, 0)]
        assert diagram.vertex(0).normals == ((1, 0), (3, 2))
        assert diagram.vertex(1).normals == ((3, 2), (0, 1))

    def test_interior_points_are_not_vertices(self):
        diagram = _diagram("t1^4 + t1*t2 + t2^4 + t1^3*t2^3 + t1^2*t2^2", 2)
        assert diagram.corner_points == ((0, 4), (1, 1), (4, 0))

    @pytest.mark.parametrize("text", [
        "t1^2*t2 + t1*t2^3",
        "t1^3 + t1*t2 + t2^3",
        "t1^4 + t1^2*t2 + t2^3",
        "t1^5 + t1^2*t2^2 + t2^5 + t1*t2^4",
    ])
    def test_planar_fast_path_agrees_with_enumeration(self, text):
        fast = _diagram(text, 2)
        general = _diagram(text, 2, planar_fast_path=False)
        assert [(v.vertex, v.normals) for v in fast.vertices] == [(v.vertex, v.normals) for v in general.vertices]

    @pytest.mark.parametrize("text,n", [
        ("t1^2*t2 + t1*t2^3 + t1^3 + t2^4", 2),
        ("t1^2 + t2^2 + t3^2", 3),
        ("t1*t2*t3 + t1^3 + t2^2*t3", 3),
        ("t1 + t2*t3", 3),
    ])
    def test_vertices_match_brute_force(self, text, n):
        p = parse_polynomial(text, n)
        assert set(build_diagram(p).corner_points) == brute_force_vertices(p.support)

    def test_witness_separates(self, corpus_diagram):
        for data in corpus_diagram.vertices:
            assert all(w > 0 for w in data.witness)
            for v in corpus_diagram.support:
                if v != data.vertex:
                    assert sum(w * (a - b) for w, a, b in zip(data.witness, v, data.vertex)) > 0

    def test_normal_inequality_exact(self, corpus_diagram):
        for data in corpus_diagram.vertices:
            for normal in data.normals:
                for v in corpus_diagram.support:
                    assert sum(a * (b - c) for a, b, c in zip(normal, v, data.vertex)) >= 0

    def test_degenerate_vertex_is_subdivided(self, caplog):
        diagram = _diagram("t1*t2 + t2*t3 + t1*t3", 3)
        assert set(diagram.corner_points) == {(0, 1, 1), (1, 0, 1), (1, 1, 0)}
        assert len(diagram.vertices) == 6
        assert all(v.degenerate and len(v.normals) == 3 and v.denominator > 0 for v in diagram.vertices)
        assert "subdivided" in caplog.text
        assert not verify_partition(diagram, 6).has_errors()

    def test_to_dict(self, two_vertex_diagram):
        dump = two_vertex_diagram.to_dict()
        assert dump["n"] == 2
        assert dump["vertices"][0]["vertex"] == [1, 3]
        assert dump["vertices"][0]["beta"] == "1"
        assert dump["vertices"][0]["c_exponent"] == "6"
        assert dump["vertices"][1]["denominator"] == 2

    def test_vertex_index_out_of_range(self, two_vertex_diagram):
        with pytest.raises(IndexError):
            two_vertex_diagram.vertex(2)


class TestDecomposeIndex:
    def test_origin(self, two_vertex_diagram):
        decomposition = decompose_index(two_vertex_diagram, (0, 0))
        assert (decomposition.vertex_index, decomposition.level, decomposition.offsets) == (0, 0, (0,))

    def test_first_cone(self, two_vertex_diagram):
        decomposition = decompose_index(two_vertex_diagram, (5, 1))
        assert decomposition.vertex_index == 0
        assert decomposition.cone_coefficients == (3, 1)
        assert (decomposition.slot, decomposition.level, decomposition.offsets) == (1, 1, (2,))

    def test_half_integral_coordinates(self, two_vertex_diagram):
        decomposition = decompose_index(two_vertex_diagram, (1, 4))
        assert decomposition.vertex_index == 1
        assert decomposition.coordinates == (1, 7)
        assert decomposition.cone_coefficients == (Fraction(1, 2), Fraction(7, 2))
        assert (decomposition.slot, decomposition.level, decomposition.offsets) == (0, 1, (6,))

    def test_first_cone_rejects(self, two_vertex_diagram):
        assert not two_vertex_diagram.contains(0, (1, 4))
        assert two_vertex_diagram.cone_coordinates(0, (1, 4)) == (-7, 4)

    def test_reconstruction(self, corpus_diagram):
        for q in [(0,) * corpus_diagram.n, (1,) * corpus_diagram.n, tuple(range(2, 2 + corpus_diagram.n)), (7,) + (3,) * (corpus_diagram.n - 1)]:
            assert reconstruct(corpus_diagram, decompose_index(corpus_diagram, q)) == q

    def test_slot_index_inverse(self, two_vertex_diagram):
        assert slot_index(two_vertex_diagram, 0, 1, 1, (2,)) == (5, 1)
        assert slot_index(two_vertex_diagram, 1, 0, 1, (6,)) == (1, 4)

    def test_slot_index_non_integral(self, two_vertex_diagram):
        with pytest.raises(DiagramError):
            slot_index(two_vertex_diagram, 1, 0, 1, (1,))

    def test_negative_index(self, two_vertex_diagram):
        with pytest.raises(ValueError):
            decompose_index(two_vertex_diagram, (-1, 2))

    def test_strict_region(self, two_vertex_diagram):
        assert two_vertex_diagram.in_t_region(0, (5, 1))
        assert not two_vertex_diagram.in_t_region(0, (2, 1))
        assert not two_vertex_diagram.in_t_region(1, (2, 1))


class TestAxisIndex:
    def test_split_and_inverse(self, axis_poly):
        diagram = build_diagram(axis_poly)
        data = diagram.vertex(0)
        q = (5, 2)
        split = decompose_axis_index(diagram, 0, q)
        assert data.axis_slots == (0,)
        assert (split.axis_offsets, split.b_offsets) == ((4,), (2,))
        assert axis_index(diagram, 0, split.axis_offsets, split.b_offsets) == q

    def test_requires_zero_coordinates(self, two_vertex_diagram):
        with pytest.raises(ValueError):
            decompose_axis_index(two_vertex_diagram, 0, (1, 1))


class TestConstants:
    def test_beta_two_vertex(self, two_vertex_diagram):
        assert [v.beta for v in two_vertex_diagram.vertices] == [1, 1]

    def test_beta_axis_vertex_uses_determinant(self, axis_poly):
        diagram = build_diagram(axis_poly)
        data = diagram.vertex(0)
        assert data.denominator == 2
        assert beta_constant(data, diagram.support) == 1

    def test_beta_single_monomial(self):
        diagram = _diagram("t1^3*t2", 2)
        assert beta_constant(diagram.vertex(0), diagram.support) == math.inf

    def test_gamma(self):
        diagram = _diagram("t1^2 + t1*t2", 2)
        data = diagram.vertex(1)
        assert data.vertex == (2, 0)
        assert gamma_constant(data, diagram.support) == (1,)
        assert data.gamma == (1,)

    def test_gamma_takes_minimum(self):
        diagram = _diagram("t1^2 + t1*t2 + t1*t2^2", 2)
        data = next(v for v in diagram.vertices if v.vertex == (2, 0))
        assert data.gamma == (1,)

    def test_gamma_without_outside_terms(self):
        diagram = _diagram("t1^2", 2)
        assert diagram.vertex(0).gamma == (math.inf,)

    def test_gamma_requires_zero_coordinates(self, two_vertex_diagram):
        with pytest.raises(ValueError):
            gamma_constant(two_vertex_diagram.vertex(0), two_vertex_diagram.support)

    def test_scaling_constants(self, two_vertex_diagram):
        constants = scaling_constants(two_vertex_diagram.vertex(0))
        assert constants.c_exponent == 6
        assert two_vertex_diagram.vertex(0).level_scale(1) == 2.0 ** -6

    def test_constant_term_vertex(self):
        data = _diagram("1 + t1*t2", 2).vertex(0)
        assert data.vertex == (0, 0)
        assert data.c_exponent == 0
        assert data.level_scale(5) == 1.0

    def test_sigma(self):
        diagram = _diagram("t1^2 + t1*t2", 2)
        assert diagram.vertex(1).sigma == (2,)


class TestVerifyPartition:
    @pytest.mark.parametrize("text", ["t1^2*t2 + t1*t2^3", "t1*t2", "t1^2 + t2^3"])
    def test_named_examples(self, text):
        report = verify_partition(_diagram(text, 2), 20)
        assert not report.violations
        assert report.measurements["partition"]

    def test_corpus(self, corpus_diagram):
        q_max = 24 if corpus_diagram.n == 2 else 8
        report = verify_partition(corpus_diagram, q_max)
        assert not report.has_errors()

    def test_counts_recorded(self, two_vertex_diagram):
        report = verify_partition(two_vertex_diagram, 5)
        (counts,) = report.measurements["partition"].values()
        assert counts["indices"] == 36
        assert counts["uncovered"] == 0

    def test_invalid_q_max(self, two_vertex_diagram):
        with pytest.raises(ValueError):
            verify_partition(two_vertex_diagram, 0)
