import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from serene.complex import OrientedComplex
from serene.fixtures import boundary_simplex, disjoint_union, fixture, single_simplex
from serene.freecomplete import (
    BASE,
    DIV,
    FCT,
    PROD,
    CapExceeded,
    OrientationConflict,
    check_equations,
    check_state,
    complete_levels,
    evaluate,
    level0_entries,
    level_size_estimate,
    sample_later_levels,
    seed,
    solve,
    step,
    subdivision,
    verify_serene,
)
from serene.latincomplete import PartialCube, check_partial
from serene.qcore import PreconditionError, even_permutations


def census_oracle(state):
    """Level-1 product and quotient counts from integer tuples over A_0.

    Elements of A_0 are numbered 0..m-1; the level-0 table is expanded to
    every ordered tuple and each count is taken by brute enumeration.
    """
    n = state.arity
    elems = state.levels[0]
    index = {x: i for i, x in enumerate(elems)}
    table = {}
    for t, y in state.level0.items():
        for p in even_permutations(n):
            table[tuple(index[t[i]] for i in p)] = index[y]
    m = len(elems)
    orbits = {frozenset(tuple(t[i] for i in p) for p in even_permutations(n)) for t in itertools.product(range(m), repeat=n)}
    defined = {o for o in orbits if next(iter(o)) in table}
    products = len(orbits) - len(defined)
    unsolved = 0
    slots = range(n) if n == 2 else [0]  # for n >= 3 every slot is moved to the first by alt_n
    for pos in slots:
        patterns = set()
        for rest in itertools.product(range(m), repeat=n - 1):
            for target in range(m):
                if not any(table.get(rest[:pos] + (x,) + rest[pos:]) == target for x in range(m)):
                    patterns.add((rest, target))
        if n >= 3:
            # rest tuples are identified under the stabilizer of the first slot, alt_{n-1}
            perms = even_permutations(n - 1)
            patterns = {(min(tuple(r[i] for i in p) for p in perms), t) for r, t in patterns}
        unsolved += len(patterns)
    return products, unsolved


def random_walk_element(state, rng, depth):
    """An element reached by ``depth`` random products and quotients from A_0."""
    x = rng.choice(state.levels[0])
    for _ in range(depth):
        others = [rng.choice(state.elements) for _ in range(state.arity - 1)]
        pos = rng.randrange(state.arity)
        if rng.random() < 0.5:
            x = evaluate(state, others[:pos] + [x] + others[pos:])
        else:
            x = solve(state, pos, others, x)
    return x


@pytest.fixture(scope="module")
def sphere3():
    return seed(boundary_simplex(4))


@pytest.fixture(scope="module")
def sphere3_level1(sphere3):
    return step(sphere3)


@pytest.fixture(scope="module")
def torus_level1():
    return step(seed(fixture("torus7")))


@pytest.fixture(scope="module")
def sphere2_level2():
    state, exc = complete_levels(boundary_simplex(3), 2)
    assert exc is None
    return state


class TestSeed:
    def test_boundary_4_simplex(self, sphere3):
        assert len(sphere3.levels[0]) == 10
        assert len(sphere3.level0) == 60
        assert len(sphere3.op) == 20
        check_state(sphere3)

    def test_torus(self):
        s = seed(fixture("torus7"))
        assert len(s.levels[0]) == 21 and len(s.level0) == 42

    def test_level0_is_partial_latin_and_alternating(self, sphere3):
        order, rows = level0_entries(sphere3)
        report = check_partial(PartialCube(3, order, frozenset(rows)))
        assert report.ok and not report.violations

    def test_repeated_vertices_never_defined(self, sphere3):
        assert all(len(set(t)) == len(t) for t in sphere3.level0)

    def test_single_simplex_rejected(self):
        with pytest.raises(PreconditionError):
            seed(single_simplex(3))

    def test_klein_rejected(self):
        with pytest.raises(PreconditionError):
            seed(fixture("klein8"))

    def test_disconnected_rejected(self):
        with pytest.raises(PreconditionError):
            seed(disjoint_union(boundary_simplex(3), boundary_simplex(3)))

    def test_curve_rejected(self):
        with pytest.raises(PreconditionError):
            seed(boundary_simplex(2))

    def test_incoherent_orientation_names_ridge(self):
        good = fixture("torus7")
        bad = OrientedComplex(good.base, (-good.orientation[0],) + good.orientation[1:])
        with pytest.raises(OrientationConflict) as info:
            seed(bad)
        assert len(info.value.ridge) == 2


class TestStep:
    def test_boundary_4_simplex_census(self, sphere3, sphere3_level1):
        products, quotients = census_oracle(sphere3)
        counts = sphere3_level1.counts()
        assert counts["per_level"] == [10, products + quotients] == [10, 1260]
        assert counts["by_kind"][PROD] == products == 320
        assert counts["by_kind"][DIV] == quotients == 940
        est = level_size_estimate(sphere3)
        assert (est["products"], est["quotients"], est["total"]) == (products, quotients, 1270)

    def test_torus_census(self, torus_level1):
        products, quotients = census_oracle(seed(fixture("torus7")))
        assert len(torus_level1.elements) == 21 + products + quotients == 1218

    def test_sphere2_census(self):
        s = seed(boundary_simplex(3))
        products, quotients = census_oracle(s)
        assert len(step(s).elements) == len(s.elements) + products + quotients == 164

    def test_extension_and_invariants(self, sphere3, sphere3_level1):
        for rep, y in sphere3.op.items():
            assert sphere3_level1.op[rep] == y
        assert all(sphere3_level1.birth[rep] == 0 for rep in sphere3.op)
        check_state(sphere3_level1, previous=sphere3)

    def test_every_level0_equation_solved_once(self, sphere3_level1, torus_level1):
        assert check_equations(sphere3_level1, 0) == 3 * 10**3
        assert check_equations(torus_level1, 0) == 2 * 21**2

    def test_two_levels_exhaustive(self, sphere2_level2):
        assert [len(lv) for lv in sphere2_level2.levels] == [8, 156, 80184]
        assert check_equations(sphere2_level2, 1) == 2 * 164**2

    def test_level2_estimate_and_cap(self, sphere3_level1):
        est = level_size_estimate(sphere3_level1)
        assert est["total"] > 10**9
        with pytest.raises(CapExceeded):
            step(sphere3_level1)

    def test_cap_reported_by_complete_levels(self):
        state, exc = complete_levels(boundary_simplex(4), 3, cap=5000)
        assert state.level == 1 and exc.level == 2

    def test_later_level_spot_checks(self, sphere3_level1):
        assert sample_later_levels(sphere3_level1, samples=300, seed_value=1)["samples"] == 300

    def test_kinds_stay_distinct(self, sphere3_level1):
        kinds = {x.kind for x in sphere3_level1.levels[0]}
        assert kinds == {BASE, FCT}
        assert all(x.kind in (PROD, DIV) for x in sphere3_level1.levels[1])
        assert len(set(sphere3_level1.elements)) == len(sphere3_level1.elements)


class TestStructuralOperation:
    @pytest.mark.parametrize("which", ["sphere3_level1", "torus_level1"])
    def test_random_equations(self, which, request):
        state = request.getfixturevalue(which)

        @settings(max_examples=150, deadline=None)
        @given(st.integers(0, 2**32 - 1), st.integers(0, 3))
        def check(seed_value, depth):
            rng = random.Random(seed_value)
            n = state.arity
            a = [random_walk_element(state, rng, depth) for _ in range(n)]
            y = evaluate(state, a)
            for p in even_permutations(n):
                assert evaluate(state, [a[i] for i in p]) == y
            for pos in range(n):
                rest = a[:pos] + a[pos + 1 :]
                assert solve(state, pos, rest, y) == a[pos]
            pos = rng.randrange(n)
            target = random_walk_element(state, rng, depth)
            x = solve(state, pos, a[:pos] + a[pos + 1 :], target)
            assert evaluate(state, a[:pos] + [x] + a[pos + 1 :]) == target

        check()

    def test_both_quotient_kinds_for_binary(self, torus_level1):
        v0, v1 = torus_level1.levels[0][:2]
        left = solve(torus_level1, 0, [v1], v0)
        right = solve(torus_level1, 1, [v1], v0)
        assert left.kind == right.kind == DIV
        assert left != right
        assert evaluate(torus_level1, [left, v1]) == v0
        assert evaluate(torus_level1, [v1, right]) == v0

    def test_levels(self, sphere3):
        v = sphere3.levels[0][:3]
        x = evaluate(sphere3, [v[0], v[0], v[1]])
        assert x.kind == PROD and x.level == 1
        assert evaluate(sphere3, [x, v[0], v[2]]).level == 2


class TestVerifySerene:
    def test_boundary_4_simplex(self, sphere3):
        report = verify_serene(boundary_simplex(4), sphere3)
        assert report.ok and report.facets == 20 and report.vertices == 10
        assert report.invariants_subdivision["euler_characteristic"] == 0
        assert report.invariants_subdivision["z2_betti"] == [1, 0, 0, 1]
        assert report.invariants_gamma["z2_betti"] == [1, 0, 0, 1]

    @pytest.mark.parametrize("name,facets,genus", [("torus7", 42, 1), ("torus9", 54, 1), ("genus2", 78, 2)])
    def test_surfaces(self, name, facets, genus):
        g = fixture(name)
        report = verify_serene(g, seed(g))
        assert report.ok and report.facets == facets and report.genus == genus

    def test_sphere2(self):
        g = boundary_simplex(3)
        report = verify_serene(g, seed(g))
        assert report.ok and report.genus == 0
        assert report.invariants_subdivision["euler_characteristic"] == 2

    def test_subdivision_shape(self):
        sub = subdivision(fixture("torus7"))
        assert len(sub.facets) == 42 and len(sub.vertices) == 21
