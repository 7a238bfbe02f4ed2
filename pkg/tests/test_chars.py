"""Tests for finite-group character tables and orbit-class counting bounds.

The hardcoded group tables are checked against oracles computed directly
from the multiplication tables: brute-force conjugacy classes, class-sum
structure constants (central characters must be an exact eigensystem of
the class algebra), and both orthogonality relations.
"""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from procong.chars import (
    CYCLIC_LIMIT,
    FiniteGroupTable,
    NielsenBound,
    OrbitProjectionTable,
    all_class_indicators,
    builtin_group,
    class_indicator_L,
    nielsen_bound,
    twisted_L_from_orbits,
)
from procong.kernel import Cyclotomic

BUILTIN_NAMES = ("cyclic(1)", "cyclic(2)", "cyclic(3)", "cyclic(6)",
                 "cyclic(12)", "S3", "D4", "Q8")


# ---------------------------------------------------------------------------
# oracles computed straight from the multiplication table
# ---------------------------------------------------------------------------

def brute_conjugacy_classes(mult):
    """Partition into conjugacy classes using only the multiplication table."""
    n = len(mult)
    inverse = [row.index(0) for row in mult]
    seen = set()
    classes = []
    for g in range(n):
        if g in seen:
            continue
        orbit = {mult[mult[h][g]][inverse[h]] for h in range(n)}
        classes.append(tuple(sorted(orbit)))
        seen |= orbit
    return tuple(sorted(classes, key=lambda c: c[0]))


def structure_constants(group):
    """a[c1][c2][c3] counts pairs in C1 x C2 multiplying to a fixed
    representative of C3."""
    reps = [members[0] for members in group.classes]
    k = group.class_count
    a = [[[0] * k for _ in range(k)] for _ in range(k)]
    for c1, m1 in enumerate(group.classes):
        for c2, m2 in enumerate(group.classes):
            for g1 in m1:
                for g2 in m2:
                    product = group.multiplication[g1][g2]
                    for c3, rep in enumerate(reps):
                        if product == rep:
                            a[c1][c2][c3] += 1
    return a


def conj(value):
    return value.conjugate() if isinstance(value, Cyclotomic) else value


# ---------------------------------------------------------------------------
# group table verification against the oracles
# ---------------------------------------------------------------------------

class TestBuiltinGroups:
    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_classes_match_brute_force(self, name):
        g = builtin_group(name)
        expected = brute_conjugacy_classes(g.multiplication)
        assert tuple(sorted(g.classes, key=lambda c: c[0])) == expected

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_multiplication_is_a_group(self, name):
        g = builtin_group(name)
        n = g.order
        rng = random.Random(7)
        triples = ([(x, y, z) for x in range(n) for y in range(n)
                    for z in range(n)] if n <= 8 else
                   [(rng.randrange(n), rng.randrange(n), rng.randrange(n))
                    for _ in range(500)])
        for x, y, z in triples:
            left = g.multiplication[g.multiplication[x][y]][z]
            right = g.multiplication[x][g.multiplication[y][z]]
            assert left == right
        for x in range(n):
            assert g.multiplication[x][g.inverse(x)] == 0
            assert g.multiplication[g.inverse(x)][x] == 0

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_class_sums_certify_characters(self, name):
        # central characters w(c) = |C| chi(c) / chi(1) must reproduce the
        # class-algebra structure constants exactly; together with row
        # orthogonality this pins the irreducible character table
        g = builtin_group(name)
        a = structure_constants(g)
        for chi in g.characters:
            degree = chi[0]
            omega = [Fraction(g.class_size(c)) * chi[c] / degree
                     for c in range(g.class_count)]
            for c1 in range(g.class_count):
                for c2 in range(g.class_count):
                    combo = 0
                    for c3 in range(g.class_count):
                        combo = combo + a[c1][c2][c3] * omega[c3]
                    assert omega[c1] * omega[c2] == combo

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_row_orthogonality(self, name):
        g = builtin_group(name)
        for r, chi in enumerate(g.characters):
            for s, psi in enumerate(g.characters):
                total = 0
                for c in range(g.class_count):
                    total = total + g.class_size(c) * chi[c] * conj(psi[c])
                assert total == (g.order if r == s else 0)

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_column_orthogonality(self, name):
        g = builtin_group(name)
        for c1 in range(g.class_count):
            for c2 in range(g.class_count):
                total = 0
                for chi in g.characters:
                    total = total + chi[c1] * conj(chi[c2])
                expected = (Fraction(g.order, g.class_size(c1))
                            if c1 == c2 else 0)
                assert total == expected

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_degree_squares_sum_to_order(self, name):
        g = builtin_group(name)
        assert sum(d * d for d in g.degrees()) == g.order

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_verify_is_idempotent(self, name):
        g = builtin_group(name)
        assert g.verify() is g

    def test_tables_are_cached(self):
        assert builtin_group("S3") is builtin_group("S3")
        assert builtin_group("cyclic(6)") is builtin_group("cyclic(6)")


class TestSpecificTables:
    def test_trivial_group(self):
        g = builtin_group("cyclic(1)")
        assert g.order == 1
        assert g.characters == ((1,),)

    def test_order_two_characters(self):
        g = builtin_group("cyclic(2)")
        assert g.characters == ((1, 1), (1, -1))

    def test_cyclic_characters_are_root_powers(self):
        g = builtin_group("cyclic(4)")
        i = Cyclotomic.root(4, 1)
        assert g.characters[1][1] == i
        assert g.characters[1][2] == -1
        assert g.characters[1][3] == conj(i)
        assert g.characters[3] == tuple(conj(v) for v in g.characters[1])

    def test_symmetric_group_shape(self):
        g = builtin_group("S3")
        assert [g.class_size(c) for c in range(3)] == [1, 3, 2]
        assert g.degrees() == (1, 1, 2)
        assert g.characters[2] == (2, 0, -1)

    def test_dihedral_and_quaternion_are_not_isomorphic_tables(self):
        d4, q8 = builtin_group("D4"), builtin_group("Q8")
        # same character tables, different multiplication: count involutions
        def involutions(g):
            return sum(1 for x in range(g.order)
                       if x != 0 and g.multiplication[x][x] == 0)
        assert involutions(d4) == 5
        assert involutions(q8) == 1

    def test_unknown_group_rejected(self):
        with pytest.raises(ValueError, match="unknown group"):
            builtin_group("A5")

    @pytest.mark.parametrize("n", [0, CYCLIC_LIMIT + 1, 500])
    def test_cyclic_order_cap(self, n):
        with pytest.raises(ValueError, match="cyclic order"):
            builtin_group(f"cyclic({n})")

    def test_largest_cyclic_loads(self):
        g = builtin_group(f"cyclic({CYCLIC_LIMIT})")
        assert g.order == CYCLIC_LIMIT
        assert g.conductor == CYCLIC_LIMIT

    def test_broken_table_fails_verification(self):
        s3 = builtin_group("S3")
        broken = FiniteGroupTable("broken", s3.elements, s3.multiplication,
                                  s3.classes, 1,
                                  ((1, 1, 1), (1, -1, 1), (2, 0, 1)))
        with pytest.raises(ValueError, match="orthogonality"):
            broken.verify()

    def test_misassigned_classes_fail_verification(self):
        s3 = builtin_group("S3")
        broken = FiniteGroupTable("broken", s3.elements, s3.multiplication,
                                  ((0,), (1, 2, 4), (3, 5)), 1, s3.characters)
        with pytest.raises(ValueError, match="closed under conjugation"):
            broken.verify()


# ---------------------------------------------------------------------------
# orbit projection tables
# ---------------------------------------------------------------------------

class TestOrbitProjectionTable:
    def test_round_trips_through_json(self):
        table = OrbitProjectionTable((("o1", -1, 0), ("o2", 3, 2)))
        data = table.to_json()
        assert data == [["o1", -1, 0], ["o2", 3, 2]]
        assert OrbitProjectionTable.from_json(data) == table

    def test_duplicate_orbit_ids_rejected(self):
        with pytest.raises(ValueError, match="twice"):
            OrbitProjectionTable((("o", 1, 0), ("o", 2, 1)))

    def test_zero_index_rejected(self):
        with pytest.raises(ValueError, match="nonzero"):
            OrbitProjectionTable((("o", 0, 0),))

    def test_negative_class_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            OrbitProjectionTable((("o", 1, -1),))

    def test_class_ids_are_sorted_and_unique(self):
        table = OrbitProjectionTable((("a", 1, 3), ("b", 1, 0), ("c", 1, 3)))
        assert table.class_ids() == (0, 3)
        assert table.orbit_count == 3


# ---------------------------------------------------------------------------
# twisted Lefschetz numbers against class functions
# ---------------------------------------------------------------------------

class TestTwistedL:
    def test_trivial_character_totals_the_indices(self):
        c2 = builtin_group("cyclic(2)")
        table = OrbitProjectionTable((("o1", -1, 0), ("o2", -1, 1)))
        assert twisted_L_from_orbits(table, c2.characters[0]) == -2

    def test_sign_character_cancels_opposite_classes(self):
        c2 = builtin_group("cyclic(2)")
        table = OrbitProjectionTable((("o1", -1, 0), ("o2", -1, 1)))
        assert twisted_L_from_orbits(table, c2.characters[1]) == 0

    def test_empty_table_gives_zero(self):
        c2 = builtin_group("cyclic(2)")
        assert twisted_L_from_orbits(OrbitProjectionTable(()),
                                     c2.characters[0]) == 0

    def test_accepts_mapping_class_functions(self):
        table = OrbitProjectionTable((("o", 2, 5),))
        assert twisted_L_from_orbits(table, {5: Fraction(1, 2)}) == 1

    def test_missing_class_in_mapping_rejected(self):
        table = OrbitProjectionTable((("o", 1, 3),))
        with pytest.raises(ValueError, match="missing from the class function"):
            twisted_L_from_orbits(table, {0: 1, 1: 1})

    def test_short_sequence_rejected(self):
        table = OrbitProjectionTable((("o", 1, 3),))
        with pytest.raises(ValueError, match="missing from the class function"):
            twisted_L_from_orbits(table, (1, 1))

    def test_cyclotomic_values_stay_exact(self):
        c4 = builtin_group("cyclic(4)")
        table = OrbitProjectionTable((("o", 1, 1), ("p", 1, 3)))
        value = twisted_L_from_orbits(table, c4.characters[1])
        assert value == 0  # zeta + conj(zeta) = i - i

    @given(st.data())
    @settings(max_examples=60, deadline=None)
    def test_linear_in_the_class_function(self, data):
        k = data.draw(st.integers(min_value=1, max_value=5))
        rows = data.draw(st.lists(
            st.tuples(st.integers(min_value=-5, max_value=5).filter(bool),
                      st.integers(min_value=0, max_value=k - 1)),
            max_size=6))
        table = OrbitProjectionTable(
            tuple((f"o{j}", idx, cls) for j, (idx, cls) in enumerate(rows)))
        fractions = st.fractions(min_value=-4, max_value=4,
                                 max_denominator=6)
        chi = data.draw(st.tuples(*[fractions] * k))
        psi = data.draw(st.tuples(*[fractions] * k))
        a = data.draw(fractions)
        b = data.draw(fractions)
        combo = tuple(a * x + b * y for x, y in zip(chi, psi))
        left = twisted_L_from_orbits(table, combo)
        right = (a * twisted_L_from_orbits(table, chi)
                 + b * twisted_L_from_orbits(table, psi))
        assert left == right


# ---------------------------------------------------------------------------
# class indicators: two routes must agree
# ---------------------------------------------------------------------------

class TestClassIndicator:
    def test_order_two_indicator(self):
        c2 = builtin_group("cyclic(2)")
        table = OrbitProjectionTable((("o1", -1, 0), ("o2", -1, 1)))
        assert class_indicator_L(table, c2, 1) == -1
        assert class_indicator_L(table, c2, 0) == -1

    def test_identity_class_of_empty_table(self):
        c2 = builtin_group("cyclic(2)")
        assert class_indicator_L(OrbitProjectionTable(()), c2, 0) == 0

    def test_transposition_class_collects_its_orbit(self):
        s3 = builtin_group("S3")
        table = OrbitProjectionTable((("w", 2, 1),))
        assert class_indicator_L(table, s3, 1) == 2
        assert all_class_indicators(table, s3) == (0, 2, 0)

    def test_unknown_class_rejected(self):
        s3 = builtin_group("S3")
        with pytest.raises(ValueError, match="unknown conjugacy class"):
            class_indicator_L(OrbitProjectionTable(()), s3, 3)

    def test_table_outside_group_rejected(self):
        c2 = builtin_group("cyclic(2)")
        table = OrbitProjectionTable((("o", 1, 5),))
        with pytest.raises(ValueError, match="outside"):
            class_indicator_L(table, c2, 0)

    def test_broken_character_table_raises_disagreement(self):
        s3 = builtin_group("S3")
        broken = FiniteGroupTable("broken", s3.elements, s3.multiplication,
                                  s3.classes, 1,
                                  ((1, 1, 1), (1, -1, 1), (2, 0, 1)))
        # the tampered column stays self-consistent, so the mismatch needs a
        # row in a class whose cross-column orthogonality with it is broken
        table = OrbitProjectionTable((("w", 1, 0), ("v", 1, 2)))
        with pytest.raises(ArithmeticError, match="disagrees"):
            class_indicator_L(table, broken, 2)

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_two_routes_agree_on_random_tables(self, name):
        group = builtin_group(name)
        rng = random.Random(hash(name) & 0xFFFF)
        for _ in range(200):
            rows = []
            for j in range(rng.randrange(0, 9)):
                index = rng.choice([i for i in range(-5, 6) if i])
                rows.append((f"o{j}", index,
                             rng.randrange(group.class_count)))
            table = OrbitProjectionTable(tuple(rows))
            # class_indicator_L asserts route agreement internally
            values = all_class_indicators(table, group)
            assert sum(values) == sum(index for _, index, _ in table.rows)


# ---------------------------------------------------------------------------
# Nielsen-number bounds
# ---------------------------------------------------------------------------

class TestNielsenBound:
    def test_two_essential_classes(self):
        c2 = builtin_group("cyclic(2)")
        table = OrbitProjectionTable((("o1", -1, 0), ("o2", -1, 1)))
        result = nielsen_bound(table, c2)
        assert result == NielsenBound(2)
        assert result.indexed_counts is None

    def test_attained_flag_reports_indexed_counts(self):
        c2 = builtin_group("cyclic(2)")
        table = OrbitProjectionTable((("o1", -1, 0), ("o2", -1, 1)))
        result = nielsen_bound(table, c2, attained=True)
        assert result.bound == 2
        assert result.counts() == {-1: 2}

    def test_cancellation_inside_one_class(self):
        c2 = builtin_group("cyclic(2)")
        table = OrbitProjectionTable((("a", 1, 1), ("b", -1, 1)))
        assert nielsen_bound(table, c2).bound == 0

    def test_empty_table_bound_is_zero(self):
        s3 = builtin_group("S3")
        result = nielsen_bound(OrbitProjectionTable(()), s3, attained=True)
        assert result.bound == 0
        assert result.counts() == {}

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_bound_never_exceeds_orbit_class_count(self, name):
        group = builtin_group(name)
        rng = random.Random(len(name))
        for _ in range(100):
            rows = []
            for j in range(rng.randrange(0, 7)):
                index = rng.choice([i for i in range(-4, 5) if i])
                rows.append((f"o{j}", index,
                             rng.randrange(group.class_count)))
            table = OrbitProjectionTable(tuple(rows))
            assert nielsen_bound(table, group).bound <= table.orbit_count

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_distinct_classes_attain_the_orbit_count(self, name):
        group = builtin_group(name)
        rng = random.Random(2 * len(name) + 1)
        for _ in range(50):
            k = rng.randrange(0, group.class_count + 1)
            chosen = rng.sample(range(group.class_count), k)
            rows = tuple((f"o{j}", rng.choice([-3, -2, -1, 1, 2, 3]), c)
                         for j, c in enumerate(chosen))
            table = OrbitProjectionTable(rows)
            result = nielsen_bound(table, group, attained=True)
            assert result.bound == table.orbit_count
            assert sum(result.counts().values()) == table.orbit_count
