import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conevol import DegenerateSample, GeneratorSpec, check_u_inequality, generate, is_parallelotope
from conevol.generators import perturbed, random_product_spec, suite_specs


def test_named_cube():
    P = generate("named:cube:dim=3")
    assert np.allclose(np.abs(P.vertices), 1.0) and len(P.vertices) == 8
    assert P.volume == pytest.approx(8.0, rel=1e-14)


def test_triangle_is_the_reference_triangle():
    P = generate("named:triangle")
    ref = np.array([[-0.5, -np.sqrt(3) / 2], [-0.5, np.sqrt(3) / 2], [1.0, 0.0]])
    assert np.allclose(P.vertices, ref, atol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_regular_simplex(n):
    P = generate(f"named:simplex:dim={n}")
    assert len(P.vertices) == n + 1
    assert np.allclose(np.linalg.norm(P.vertices, axis=1), 1.0)


def test_cross_polytope():
    P = generate("named:cross-polytope:dim=4")
    assert len(P.vertices) == 8 and len(P.facets) == 16


def test_parallelotope_seed_7():
    P = generate("parallelotope:dim=3:seed=7")
    assert is_parallelotope(P)
    rep = check_u_inequality(P)
    assert rep.equality and rep.parallelotope


def test_product_prism():
    P = generate("named:triangle*named:segment")
    assert len(P.facets) == 5 and P.dim == 3


def test_named_prism_matches_product():
    a, b = generate("named:prism:dim=3"), generate("named:triangle*named:segment")
    assert np.allclose(a.vertices, b.vertices)


@given(st.sampled_from(["sphere", "halfspaces", "parallelotope"]), st.sampled_from([2, 3, 4]),
       st.integers(0, 10**6), st.booleans())
def test_seed_determines_output(kind, n, seed, sym):
    spec = GeneratorSpec(kind, dim=n, seed=seed, symmetric=sym and kind != "parallelotope")
    a, b = generate(spec), generate(spec)
    assert np.array_equal(a.vertices, b.vertices)
    assert np.linalg.norm(a.centroid) <= 1e-10


@given(st.sampled_from(["sphere", "halfspaces"]), st.sampled_from([2, 3]), st.integers(0, 10**6))
def test_symmetric_is_origin_symmetric(kind, n, seed):
    P = generate(GeneratorSpec(kind, dim=n, seed=seed, symmetric=True))
    for v in P.vertices:
        assert np.min(np.linalg.norm(P.vertices + v, axis=1)) <= 1e-9


def test_uncentered_option():
    P = generate("halfspaces:dim=3:seed=4:center=0")
    assert np.linalg.norm(P.centroid) > 1e-6


@pytest.mark.parametrize("text", [
    "named:cube:dim=4", "sphere:dim=3:size=8:seed=2:symmetric=1", "halfspaces:dim=4:size=9:seed=5",
    "parallelotope:dim=3:seed=7", "named:triangle:dim=2*named:segment:dim=1",
])
def test_spec_round_trip(text):
    assert str(GeneratorSpec.parse(text)) == text


@pytest.mark.parametrize("bad", ["blob:dim=3", "named:dodecahedron", "sphere:dim", "sphere:colour=3"])
def test_bad_specs(bad):
    with pytest.raises(ValueError):
        GeneratorSpec.parse(bad)


def test_degenerate_sample():
    # two points cannot span R^3, on any draw
    with pytest.raises(DegenerateSample):
        generate("sphere:dim=3:size=2:seed=0")


def test_suite_specs_deterministic_and_small():
    a, b = suite_specs(15, seed=3), suite_specs(15, seed=3)
    assert [str(s) for s in a] == [str(s) for s in b]
    assert all(len(generate(s).facets) <= 12 for s in a)
    assert {s.dim for s in a} == {2, 3, 4}


def test_product_spec_dims():
    for n in (2, 3, 4, 5):
        assert generate(random_product_spec(n, n)).dim == n


def test_perturbed_breaks_product():
    P = generate("named:triangle*named:segment")
    Q = perturbed(P, seed=1)
    assert len(Q.facets) > len(P.facets)
    assert np.linalg.norm(Q.centroid) <= 1e-10
