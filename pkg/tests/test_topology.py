import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from serene.complex import SimpComplex, link, simplicize
from serene.constructions import alternating_product, builtin
from serene.fixtures import boundary_simplex, disjoint_union, fixture, single_simplex
from serene.topology import (
    NON_SPHERE_LIKE,
    SPHERE_LIKE,
    ClassificationError,
    components,
    euler_characteristic,
    face_counts,
    gf2_rank,
    serenation_report,
    surface_genus,
    z2_homology,
)
from strategies import product_inputs


def dense_rank_mod2(matrix):
    """Row reduction of a 0/1 numpy matrix, kept independent of the bitmask code."""
    m = np.array(matrix, dtype=np.uint8) % 2
    rank = 0
    rows, cols = m.shape if m.size else (0, 0)
    for col in range(cols):
        pivot = next((r for r in range(rank, rows) if m[r, col]), None)
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(rows):
            if r != rank and m[r, col]:
                m[r] ^= m[rank]
        rank += 1
    return rank


def betti_oracle(facets):
    all_faces = set()
    for f in facets:
        for k in range(1, len(f) + 1):
            all_faces.update(itertools.combinations(sorted(f), k))
    top = max(len(f) for f in all_faces)
    levels = [sorted(f for f in all_faces if len(f) == k + 1) for k in range(top)]
    ranks = [0] * (top + 1)
    for k in range(1, top):
        idx = {f: i for i, f in enumerate(levels[k - 1])}
        mat = np.zeros((len(levels[k]), len(levels[k - 1])), dtype=np.uint8)
        for i, f in enumerate(levels[k]):
            for j in range(len(f)):
                mat[i, idx[f[:j] + f[j + 1 :]]] = 1
        ranks[k] = dense_rank_mod2(mat)
    return [len(levels[k]) - ranks[k] - ranks[k + 1] for k in range(top)]


@st.composite
def pure_complexes(draw):
    dim = draw(st.integers(1, 3))
    nv = draw(st.integers(dim + 1, 7))
    pool = list(itertools.combinations(range(nv), dim + 1))
    chosen = draw(st.lists(st.sampled_from(pool), min_size=1, max_size=12, unique=True))
    return SimpComplex.from_facets(chosen, dim=dim)


def component_summaries(name):
    return serenation_report(simplicize(builtin(name))).components


class TestComponents:
    def test_q8(self):
        parts = components(simplicize(builtin("q8")))
        assert sorted(len(p) for p in parts) == [8, 8, 8]

    def test_order5(self):
        assert [len(p) for p in components(simplicize(builtin("a5")))] == [20]

    def test_two_spheres(self):
        assert len(components(disjoint_union(boundary_simplex(3), boundary_simplex(3)))) == 2

    @settings(max_examples=60)
    @given(pure_complexes())
    def test_partition_and_ridge_sanity(self, c):
        parts = components(c)
        assert sorted(i for p in parts for i in p) == list(range(len(c.facets)))
        where = {i: k for k, p in enumerate(parts) for i in p}
        for owners in c.ridge_map.values():
            assert len({where[i] for i in owners}) == 1


class TestHomology:
    def test_q8_component(self):
        for s in component_summaries("q8"):
            assert s.z2_betti == (1, 0, 1) and s.euler_characteristic == 2

    def test_order5(self):
        (s,) = component_summaries("a5")
        assert s.z2_betti == (1, 0, 0, 1) and s.euler_characteristic == 0

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_simplex_is_acyclic(self, n):
        assert z2_homology(single_simplex(n)) == [1] + [0] * n

    @pytest.mark.parametrize("name,betti", [("torus7", [1, 2, 1]), ("torus9", [1, 2, 1]), ("klein8", [1, 2, 1]), ("genus2", [1, 4, 1])])
    def test_surfaces(self, name, betti):
        c = fixture(name)
        assert z2_homology(getattr(c, "base", c)) == betti

    def test_gf2_rank_small(self):
        assert gf2_rank([0b110, 0b011, 0b101]) == 2
        assert gf2_rank([]) == 0

    @settings(max_examples=80)
    @given(pure_complexes())
    def test_matches_dense_oracle(self, c):
        assert z2_homology(c) == betti_oracle(c.facets)

    @settings(max_examples=80)
    @given(pure_complexes())
    def test_euler_from_betti(self, c):
        betti = z2_homology(c)
        assert euler_characteristic(c) == sum((-1) ** k * b for k, b in enumerate(betti))
        assert euler_characteristic(c) == sum((-1) ** k * n for k, n in enumerate(face_counts(c)))

    @settings(max_examples=80)
    @given(st.lists(st.integers(0, 2**12 - 1), max_size=14))
    def test_gf2_rank_matches_dense(self, rows):
        dense = [[(r >> b) & 1 for b in range(12)] for r in rows]
        assert gf2_rank(rows) == dense_rank_mod2(np.array(dense, dtype=np.uint8).reshape(len(rows), 12))


class TestSerenationReport:
    def test_order6(self):
        (s,) = component_summaries("a6")
        assert s.euler_characteristic == 0 and s.z2_betti == (1, 0, 0, 1)
        assert s.all_sphere_like and s.orientable

    def test_order5_links(self):
        (s,) = component_summaries("a5")
        assert s.all_sphere_like

    @pytest.mark.parametrize("k,chi", [(3, 2), (4, 0), (5, 2)])
    def test_boundary_simplex(self, k, chi):
        (s,) = serenation_report(boundary_simplex(k)).components
        assert s.all_sphere_like and s.euler_characteristic == chi

    @pytest.mark.parametrize("name", ["torus7", "torus9", "genus2"])
    def test_closed_surfaces_are_sphere_like(self, name):
        (s,) = serenation_report(fixture(name)).components
        assert s.all_sphere_like and s.orientable

    def test_cone_apex(self):
        c = fixture("cone-torus9")
        (s,) = serenation_report(c).components
        (apex,) = set.intersection(*(set(f) for f in c.facets))
        assert s.link_flags[apex] == NON_SPHERE_LIKE
        assert z2_homology(link(c, [apex])) == [1, 2, 1]

    def test_klein_not_orientable(self):
        (s,) = serenation_report(fixture("klein8")).components
        assert not s.orientable and s.all_sphere_like

    @settings(max_examples=20, deadline=None)
    @given(product_inputs())
    def test_simplicizations_are_orientable(self, inputs):
        c = simplicize(alternating_product(*inputs))
        for s in serenation_report(c).components:
            assert s.orientable and s.pseudomanifold

    def test_json(self):
        c = simplicize(builtin("q8"))
        doc = serenation_report(c).to_json(c)
        assert doc["component_count"] == 3
        assert set(doc["components"][0]["link_flags"].values()) == {SPHERE_LIKE}


class TestGenus:
    def test_q8_sphere(self):
        assert all(surface_genus(s) == 0 for s in component_summaries("q8"))

    @pytest.mark.parametrize("name,g", [("torus7", 1), ("torus9", 1), ("genus2", 2)])
    def test_fixtures(self, name, g):
        (s,) = serenation_report(fixture(name)).components
        assert surface_genus(s) == g

    def test_klein_rejected(self):
        (s,) = serenation_report(fixture("klein8")).components
        with pytest.raises(ClassificationError):
            surface_genus(s)

    def test_dimension_three_rejected(self):
        with pytest.raises(ClassificationError):
            surface_genus(component_summaries("a5")[0])
