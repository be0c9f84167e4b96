import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import SQRT3
from conevol import (
    ConeVolumeMeasure,
    NotCentered,
    Subspace,
    build_from_vertices,
    check_scc,
    check_scc_measure,
    complementary_witness,
    cone_volume_measure,
    detect_direct_sum_split,
    enumerate_normal_spans,
    generate,
    is_parallelotope,
    linear_image,
    measure_of_subspace,
)
from conevol.generators import perturbed, random_product_spec
from conevol.scc import EQUALITY, STRICT

random_specs = st.builds(
    lambda kind, n, seed: f"{kind}:dim={n}:seed={seed}",
    st.sampled_from(["sphere", "halfspaces"]), st.sampled_from([2, 3, 4]), st.integers(0, 10**6),
)


def _spans(P):
    return enumerate_normal_spans(cone_volume_measure(P))


class TestSpans:
    def test_square(self, square):
        S = _spans(square)
        assert [s.dim for s in S] == [1, 1]

    def test_cube(self, cube):
        assert sorted(s.dim for s in _spans(cube)) == [1, 1, 1, 2, 2, 2]

    def test_triangle(self, triangle):
        assert [s.dim for s in _spans(triangle)] == [1, 1, 1]

    def test_members_closed(self):
        mu = cone_volume_measure(generate("sphere:dim=4:size=7:seed=3"))
        for L in enumerate_normal_spans(mu):
            assert set(L.members) == set(np.nonzero(mu.mask(L))[0].tolist())

    @given(random_specs)
    def test_span_of_atoms_has_same_mass(self, spec):
        mu = cone_volume_measure(generate(spec))
        for L in enumerate_normal_spans(mu):
            inner = Subspace.span(mu.normals[list(L.members)])
            assert measure_of_subspace(mu, inner) == measure_of_subspace(mu, L)

    def test_random_subspaces_never_beat_spans(self):
        # mu(L) for a random L equals mu of the span of the atoms it holds
        mu = cone_volume_measure(generate("halfspaces:dim=3:size=8:seed=2"))
        rng = np.random.default_rng(0)
        for _ in range(50):
            L = Subspace.span(np.vstack([mu.normals[rng.integers(len(mu))], rng.normal(size=3)]))
            assert measure_of_subspace(mu, L) <= 2 / 3 * mu.total + 1e-12


class TestCheck:
    def test_prism_equality(self, prism):
        rep = check_scc(prism)
        row = next(r for r in rep.rows if r.k == 1 and np.allclose(np.abs(r.subspace.basis[:, 0]), [0, 0, 1]))
        V = 3 * SQRT3 / 2
        assert row.mass == pytest.approx(V / 3, rel=1e-12)
        assert row.mass == pytest.approx(2 * (1 / 3) * (3 * SQRT3 / 4), rel=1e-12)
        assert row.status == EQUALITY
        assert row.witness is not None and row.witness.dim == 2
        assert rep.passed

    def test_cube_all_equal(self, cube):
        rep = check_scc(cube)
        assert rep.passed and all(r.status == EQUALITY and r.witness is not None for r in rep.rows)

    def test_triangle_strict(self, triangle):
        rep = check_scc(triangle)
        assert rep.passed and all(r.status == STRICT and r.witness is None for r in rep.rows)
        assert rep.rows[0].mass == pytest.approx(SQRT3 / 4)
        assert rep.rows[0].bound == pytest.approx(3 * SQRT3 / 8)

    def test_not_centered(self):
        P = build_from_vertices([[0, 0], [3, 0], [0, 3]])
        with pytest.raises(NotCentered):
            check_scc(P)
        assert check_scc(P, auto_center=True).passed

    def test_violation_and_inconsistency_detected(self):
        # a measure that is not the cone-volume measure of a centered body
        mu = ConeVolumeMeasure(2, [[1, 0], [-1, 0], [0, 1], [0, -1]], [3, 3, 1, 1])
        rep = check_scc_measure(mu)
        assert len(rep.violations) == 1 and not rep.passed
        nu = ConeVolumeMeasure(2, [[1, 0], [-1, 0], [0.6, 0.8], [0, -1]], [1, 1, 1, 1])
        rep = check_scc_measure(nu)
        assert any(r.status == EQUALITY and r.witness is None for r in rep.rows)
        assert rep.inconsistencies and not rep.passed

    @given(random_specs)
    def test_random_centered_pass(self, spec):
        rep = check_scc(generate(spec))
        assert rep.passed and not rep.violations

    @given(random_specs, st.integers(0, 1000))
    def test_permutation_invariance(self, spec, seed):
        mu = cone_volume_measure(generate(spec))
        p = np.random.default_rng(seed).permutation(len(mu))
        nu = ConeVolumeMeasure(mu.dim, mu.normals[p], mu.weights[p])
        a = sorted(round(r.ratio, 12) for r in check_scc_measure(mu).rows)
        b = sorted(round(r.ratio, 12) for r in check_scc_measure(nu).rows)
        assert a == b

    @given(random_specs, st.integers(0, 1000))
    def test_orthogonal_invariance(self, spec, seed):
        P = generate(spec)
        Q = np.linalg.qr(np.random.default_rng(seed).normal(size=(P.dim, P.dim)))[0]
        a = sorted(r.ratio for r in check_scc(P).rows)
        b = sorted(r.ratio for r in check_scc(linear_image(P, Q)).rows)
        assert np.allclose(a, b, atol=1e-9)

    def test_report_json(self, prism):
        d = check_scc(prism).to_dict()
        assert d["passed"] and d["equalities"] == 2 and d["equalities_without_witness"] == 0


class TestWitness:
    def test_cube(self, cube):
        mu = cone_volume_measure(cube)
        W = complementary_witness(mu, Subspace.coordinate(3, [0]))
        assert W.dim == 2 and np.allclose(np.abs(W.basis[0]), 0, atol=1e-12)

    def test_prism(self, prism):
        W = complementary_witness(cone_volume_measure(prism), Subspace.coordinate(3, [2]))
        assert W.dim == 2 and np.allclose(W.basis[2], 0, atol=1e-12)

    def test_triangle(self, triangle):
        mu = cone_volume_measure(triangle)
        assert complementary_witness(mu, Subspace.span(mu.normals[:1])) is None


class TestSplit:
    def test_prism(self, prism):
        s = detect_direct_sum_split(prism, Subspace.coordinate(3, [2]))
        assert s is not None
        # segment along e_3 and the triangle in the e_1 e_2 plane
        assert len(s.section_L_perp) == 3 and np.allclose(s.section_L_perp[:, 2], 0)
        assert len(s.section_Lbar_perp) == 2 and np.allclose(s.section_Lbar_perp[:, :2], 0, atol=1e-12)

    def test_square(self, square):
        s = detect_direct_sum_split(square, Subspace.coordinate(2, [0]))
        assert s is not None and len(s.section_L_perp) == 2 and len(s.section_Lbar_perp) == 2

    def test_triangle(self, triangle):
        for a in triangle.normals:
            assert detect_direct_sum_split(triangle, Subspace.span([a])) is None
        assert detect_direct_sum_split(triangle, Subspace.coordinate(2, [1])) is None

    @pytest.mark.parametrize("n,seed", [(3, 1), (4, 2), (4, 3)])
    def test_random_products_split_and_perturbations_do_not(self, n, seed):
        P = generate(random_product_spec(n, seed))
        mu = cone_volume_measure(P)
        eq = [r for r in check_scc_measure(mu).rows if r.status == EQUALITY]
        assert len(eq) == 2
        for r in eq:
            assert detect_direct_sum_split(P, r.subspace) is not None
        Q = perturbed(P, seed)
        assert not [r for r in check_scc(Q).rows if r.status == EQUALITY]


class TestParallelotope:
    def test_cube(self, cube):
        assert is_parallelotope(cube)

    def test_sheared(self, cube):
        assert is_parallelotope(linear_image(cube, [[1, 0.7, 0], [0, 1, 0], [0, 0.2, 1]]))

    def test_triangle(self, triangle):
        assert not is_parallelotope(triangle)

    def test_octahedron(self):
        assert not is_parallelotope(generate("named:cross-polytope:dim=3"))

    def test_hexagon(self):
        t = np.linspace(0, 2 * np.pi, 7)[:-1]
        assert not is_parallelotope(build_from_vertices(np.c_[np.cos(t), np.sin(t)]))
