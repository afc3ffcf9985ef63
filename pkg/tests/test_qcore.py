import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from serene.constructions import builtin, construct_order5, construct_order6, cyclic_group, sum_quasigroup
from serene.qcore import (
    OperationTable,
    PreconditionError,
    StructureError,
    alt_orbit,
    canonical,
    check_homomorphism,
    divide,
    even_permutations,
    inp,
    is_commutative,
    is_nary_associative,
    nct,
    out,
    permutation_parity,
    validate,
)


def relabel(table, perm):
    """Isomorphic copy of ``table`` under the symbol permutation ``perm``."""
    inv = np.argsort(perm)
    vals = [perm[table(*(inv[x] for x in t))] for t in table.tuples()]
    return OperationTable(table.arity, table.order, np.array(vals))


@st.composite
def latin_squares(draw, max_order=6):
    m = draw(st.integers(1, max_order))
    rows = draw(st.permutations(range(m)))
    cols = draw(st.permutations(range(m)))
    syms = draw(st.permutations(range(m)))
    vals = [syms[(rows[i] + cols[j]) % m] for i in range(m) for j in range(m)]
    return OperationTable(2, m, np.array(vals))


@st.composite
def random_tables(draw, max_order=4, max_arity=3):
    n = draw(st.integers(1, max_arity))
    m = draw(st.integers(1, max_order))
    vals = draw(st.lists(st.integers(0, m - 1), min_size=m**n, max_size=m**n))
    return OperationTable(n, m, np.array(vals))


def latin_by_faces(table):
    """Independent Latin test: every axis-parallel line holds each symbol once."""
    cube = table.cube
    m = table.order
    for axis in range(table.arity):
        moved = np.moveaxis(cube, axis, -1).reshape(-1, m)
        for line in moved:
            if sorted(line.tolist()) != list(range(m)):
                return False
    return True


class TestOperationTable:
    def test_length_mismatch_is_structural(self):
        with pytest.raises(StructureError, match="length"):
            OperationTable(2, 3, np.zeros(8, dtype=int))

    def test_out_of_range_names_index(self):
        with pytest.raises(StructureError, match="index 2"):
            OperationTable(2, 2, np.array([0, 1, 5, 0]))

    def test_labels_must_be_distinct(self):
        with pytest.raises(StructureError):
            OperationTable(2, 2, np.array([0, 1, 1, 0]), labels=["a", "a"])

    def test_values_are_read_only(self):
        t = cyclic_group(3)
        with pytest.raises(ValueError):
            t.values[0] = 1

    def test_mixed_radix_first_argument_most_significant(self):
        t = OperationTable.from_function(2, 3, lambda x, y: (2 * x + y) % 3)
        assert t.index((1, 2)) == 5
        assert t(1, 2) == t.values[5] == 1


class TestValidate:
    def test_q8(self):
        cert = validate(builtin("q8"))
        assert cert.latin and cert.alternating

    def test_order5_group_size(self):
        cert = validate(construct_order5())
        assert cert.latin and cert.alternating
        assert cert.permutomorphism_group_size == 3
        assert cert.group_size_exact

    def test_constant_table_is_not_latin(self):
        assert not validate(OperationTable(2, 2, np.zeros(4, dtype=int))).latin

    def test_commutative_table_has_full_group(self):
        assert validate(sum_quasigroup(3, 3)).permutomorphism_group_size == 6

    @given(latin_squares())
    def test_isotopes_of_cyclic_groups_are_latin(self, t):
        assert validate(t).latin
        assert latin_by_faces(t)

    @settings(max_examples=200)
    @given(random_tables())
    def test_latin_flag_matches_face_test(self, t):
        assert validate(t).latin == latin_by_faces(t)

    @pytest.mark.parametrize("name", ["a5", "a6", "q8", "field:3,2"])
    def test_alternating_means_invariant_under_every_even_permutation(self, name):
        t = builtin(name)
        assert t.cert.alternating
        for a in t.tuples():
            for p in even_permutations(t.arity):
                assert t(*(a[i] for i in p)) == t(*a)


class TestPermutations:
    def test_parity(self):
        assert permutation_parity((0, 1, 2)) == 1
        assert permutation_parity((1, 0, 2)) == -1
        assert permutation_parity((1, 2, 0)) == 1

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_even_permutation_count(self, n):
        perms = even_permutations(n)
        assert len(perms) == max(1, len(list(itertools.permutations(range(n)))) // 2)
        assert all(permutation_parity(p) == 1 for p in perms)

    def test_orbit_of_distinct_triple(self):
        assert alt_orbit((0, 1, 2)) == {(0, 1, 2), (1, 2, 0), (2, 0, 1)}

    @given(st.lists(st.integers(0, 4), min_size=2, max_size=4))
    def test_canonical_is_least_in_orbit(self, t):
        t = tuple(t)
        rep = canonical(t)
        orbit = alt_orbit(t)
        assert rep == min(orbit)
        assert all(canonical(s) == rep for s in orbit)


class TestDivide:
    def test_q8_left_division(self):
        t = builtin("q8")
        i, j, k = (t.element(s) for s in "ijk")
        assert divide(t, 1, [j], k) == i

    def test_order5_middle(self):
        t = construct_order5()
        b = divide(t, 2, (0, 2), 3)
        assert t(0, b, 2) == 3
        assert [x for x in range(5) if t(0, x, 2) == 3] == [b]

    @pytest.mark.parametrize("name", ["q8", "a5", "a6", "d4"])
    def test_round_trip(self, name):
        t = builtin(name)
        for x in t.tuples():
            y = t(*x)
            for i in range(1, t.arity + 1):
                assert divide(t, i, x[: i - 1] + x[i:], y) == x[i - 1]

    def test_needs_latin(self):
        with pytest.raises(PreconditionError):
            divide(OperationTable(2, 2, np.zeros(4, dtype=int)), 1, [0], 0)


class TestNoncommuting:
    def test_q8(self):
        t = builtin("q8")
        assert len(nct(t)) == 24
        units = {t.element(s) for s in ("i", "-i", "j", "-j", "k", "-k")}
        assert inp(t) == units
        assert out(t) == units

    def test_commutative_table_has_empty_nct(self):
        t = sum_quasigroup(4, 2)
        assert nct(t) == [] and inp(t) == set() and out(t) == set()
        assert is_commutative(t)

    def test_order6_outputs(self):
        t = construct_order6()
        assert {t.label(y) for y in out(t)} == {"0|0", "0|1"}

    @pytest.mark.parametrize("name", ["q8", "a5", "a6", "d3"])
    def test_closed_under_all_permutations(self, name):
        t = builtin(name)
        s = set(nct(t))
        for a in s:
            for p in itertools.permutations(range(t.arity)):
                assert tuple(a[i] for i in p) in s

    @pytest.mark.parametrize("name", ["q8", "a5", "a6", "z5", "trivial", "sum:3,3"])
    def test_empty_iff_commutative(self, name):
        t = builtin(name)
        assert (nct(t) == []) == is_commutative(t)

    def test_requires_alternating(self):
        t = OperationTable.from_function(3, 3, lambda x, y, z: (x + 2 * y + z) % 3)
        with pytest.raises(PreconditionError):
            nct(t)


class TestAssociativity:
    def test_q8(self):
        t = builtin("q8")
        assert is_nary_associative(t).holds
        assert not is_commutative(t)

    def test_order5(self):
        t = construct_order5()
        assert not is_commutative(t)
        assert not is_nary_associative(t).holds

    def test_trivial(self):
        t = builtin("trivial")
        assert is_commutative(t) and is_nary_associative(t).holds

    def test_sampling_is_flagged(self):
        check = is_nary_associative(builtin("q8"), exhaustive_limit=10, samples=500)
        assert check.holds and check.sampled


class TestHomomorphism:
    def test_identity(self):
        t = builtin("q8")
        r = check_homomorphism(t, t, range(8))
        assert r.hom and r.nc_hom

    def test_constant_to_trivial(self):
        r = check_homomorphism(builtin("q8"), builtin("trivial"), [0] * 8)
        assert r.hom and not r.nc_hom

    def test_negation_is_not_a_homomorphism(self):
        t = builtin("q8")
        neg = [t.element(s[1:] if s.startswith("-") else "-" + s) for s in t.labels]
        r = check_homomorphism(t, t, neg)
        assert not r.hom
        a, b = r.witness
        assert neg[t(a, b)] != t(neg[a], neg[b])

    def test_size_mismatch(self):
        with pytest.raises(StructureError):
            check_homomorphism(builtin("q8"), builtin("q8"), [0] * 7)

    @given(st.permutations(range(5)))
    def test_relabelling_is_an_isomorphism(self, perm):
        t = construct_order5()
        u = relabel(t, perm)
        assert check_homomorphism(t, u, perm).nc_hom
