"""
Property-based tests over random supports, indices and step functions.
"""
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from newton_maximal.cz import cz_decompose, cz_verify
from newton_maximal.diagram import build_diagram, decompose_index, reconstruct, verify_partition
from newton_maximal.grid import GridSpec
from newton_maximal.polynomial import Polynomial, lambda0_split, tilde_rescale, zero_coordinates
from newton_maximal.weak_type import distribution_function
from tests.helpers.oracles import brute_force_vertices

exponents = st.tuples(st.integers(0, 5), st.integers(0, 5))
coefficients = st.sampled_from([-3.0, -1.0, 0.5, 1.0, 2.0, 7.0])


@st.composite
def planar_polynomials(draw):
    mapping = draw(st.dictionaries(exponents, coefficients, min_size=1, max_size=6))
    return Polynomial.from_mapping(2, mapping)


@st.composite
def step_functions(draw):
    grid = GridSpec(-256.0, 256.0, 2)
    steps = []
    for _ in range(draw(st.integers(1, 4))):
        left = draw(st.integers(-48, 40)) * grid.dx
        width = draw(st.integers(1, 16)) * grid.dx
        height = draw(st.sampled_from([0.25, 0.5, 1.0, 3.0]))
        steps.append((left, left + width, height))
    return grid.steps(steps)


@settings(max_examples=40, deadline=None)
@given(planar_polynomials())
def test_vertices_match_brute_force(p):
    assert set(build_diagram(p).corner_points) == brute_force_vertices(p.support)


@settings(max_examples=25, deadline=None)
@given(planar_polynomials())
def test_cones_partition_the_orthant(p):
    assert not verify_partition(build_diagram(p), 10).has_errors()


@settings(max_examples=60, deadline=None)
@given(planar_polynomials(), st.tuples(st.integers(0, 40), st.integers(0, 40)))
def test_decomposition_reconstructs(p, q):
    diagram = build_diagram(p)
    decomposition = decompose_index(diagram, q)
    assert diagram.contains(decomposition.vertex_index, q)
    assert reconstruct(diagram, decomposition) == q


@settings(max_examples=60, deadline=None)
@given(planar_polynomials(), st.data())
def test_rescale_identity(p, data):
    vertex = data.draw(st.sampled_from(p.support))
    q = data.draw(st.tuples(st.integers(0, 6), st.integers(0, 6)))
    t = np.random.default_rng(0).uniform(0.5, 4.0, size=(16, 2))
    scaled = tilde_rescale(p, vertex, q)
    lhs = p.evaluate(t * 2.0 ** -np.array(q, dtype=float))
    rhs = 2.0 ** -scaled.scale_exponent * scaled.evaluate(t)
    assert np.allclose(lhs, rhs, rtol=1e-9, atol=0)


@settings(max_examples=60, deadline=None)
@given(planar_polynomials(), st.data())
def test_lambda0_split_partitions_terms(p, data):
    vertex = data.draw(st.sampled_from(p.support))
    inside, outside = lambda0_split(p, vertex, zero_coordinates(vertex))
    assert sorted(inside.terms + outside.terms) == list(p.terms)
    assert vertex in inside.coefficients


@settings(max_examples=40, deadline=None)
@given(step_functions(), st.sampled_from([0.2, 1.0, 4.0]), st.sampled_from([0.0, 1.0]))
def test_cz_invariants(f, level, amplification):
    result = cz_decompose(f, level, amplification)
    assert not cz_verify(result, f).violations


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.0, 10.0), min_size=1, max_size=50))
def test_distribution_is_nonincreasing(values):
    alphas = np.geomspace(1e-3, 12.0, 20)
    measures = distribution_function(np.array(values), alphas, dx=0.5)
    assert np.all(np.diff(measures) <= 0)
    assert measures[0] <= 0.5 * len(values)
