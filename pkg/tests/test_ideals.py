from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hlbench.errors import ParseError, RangeError
from hlbench.ideals import (
    GridSet,
    NatSet,
    NodeSet,
    column_profile,
    density_profile,
    gridset_from_text,
    gridset_to_text,
    interval_count,
    max_antichain_weight,
    minimal_elements,
    natset_from_text,
    natset_to_text,
    nodeset_from_text,
    nodeset_to_text,
    phi,
    phi_bar_profile,
    summable_weight,
)
from hlbench.treecore import level_nodes

natsets = st.builds(
    lambda members: NatSet.of(members, 64),
    st.sets(st.integers(min_value=0, max_value=63)),
)
nodesets = st.builds(
    lambda picks: NodeSet.of(
        [s for i, s in enumerate(x for n in range(5) for x in level_nodes(n)) if i in picks], 5
    ),
    st.sets(st.integers(min_value=0, max_value=30)),
)


class TestCarriers:
    def test_natset_validation(self):
        with pytest.raises(RangeError):
            NatSet.of([5], 5)
        with pytest.raises(RangeError):
            NatSet.of([-1], 5)
        with pytest.raises(RangeError):
            NatSet.of([], 0)

    def test_complement(self):
        a = NatSet.of([0, 2], 4)
        assert sorted(a.complement().members) == [1, 3]
        assert a.complement().complement() == a

    def test_gridset_validation(self):
        with pytest.raises(RangeError):
            GridSet.of([(4, 0)], 4)
        with pytest.raises(RangeError):
            GridSet.of([(0, -1)], 4)
        assert GridSet.of([(1, 2)], 4).column(1) == frozenset({2})

    def test_nodeset_validation(self):
        with pytest.raises(RangeError):
            NodeSet.of(["000"], 3)
        with pytest.raises(RangeError):
            NodeSet.of([""], 0)
        with pytest.raises(ValueError):
            NodeSet.of(["2"], 3)

    def test_sorted_accessors(self):
        assert NatSet.of([3, 1], 8).sorted_members() == [1, 3]
        assert NodeSet.of(["1", "00", "0"], 3).sorted_nodes() == ["0", "1", "00"]


class TestDensity:
    def test_dyadic_frozen(self):
        k = NatSet.of([1, 2, 4, 8, 16], 64)
        assert density_profile(k, "dyadic") == (
            Fraction(1),
            Fraction(1, 2),
            Fraction(1, 4),
            Fraction(1, 8),
            Fraction(1, 16),
            Fraction(0),
        )

    def test_natural_frozen(self):
        assert density_profile(NatSet.of([0, 1], 4), "natural") == (
            Fraction(1),
            Fraction(1),
            Fraction(2, 3),
            Fraction(1, 2),
        )

    def test_mode_and_bound_validation(self):
        with pytest.raises(ValueError):
            density_profile(NatSet.of([], 8), "harmonic")
        with pytest.raises(RangeError):
            density_profile(NatSet.of([], 1), "dyadic")

    @given(natsets)
    @settings(max_examples=50)
    def test_complement_sums_to_one(self, a):
        for mode in ("dyadic", "natural"):
            mine = density_profile(a, mode)
            other = density_profile(a.complement(), mode)
            assert all(x + y == 1 for x, y in zip(mine, other))

    @given(natsets)
    @settings(max_examples=50)
    def test_density_bounds(self, a):
        for mode in ("dyadic", "natural"):
            assert all(0 <= d <= 1 for d in density_profile(a, mode))


class TestSummable:
    def test_harmonic_frozen(self):
        assert summable_weight(NatSet.of(range(10), 10)) == Fraction(7381, 2520)

    def test_empty(self):
        assert summable_weight(NatSet.of([], 4)) == 0

    @given(natsets)
    @settings(max_examples=50)
    def test_additive_on_split(self, a):
        evens = NatSet.of([m for m in a.members if m % 2 == 0], 64)
        odds = NatSet.of([m for m in a.members if m % 2 == 1], 64)
        assert summable_weight(evens) + summable_weight(odds) == summable_weight(a)


class TestIntervalCount:
    def test_multiples_of_four_frozen(self):
        mult4 = NatSet.of(range(0, 64, 4), 64)
        assert interval_count(mult4, 4, 2, "ge") == 0
        assert interval_count(mult4, 4, 1, "ge") == 61
        assert interval_count(mult4, 8, 2, "ge") == 57

    def test_validation(self):
        a = NatSet.of([1], 8)
        with pytest.raises(RangeError):
            interval_count(a, 0, 1)
        with pytest.raises(RangeError):
            interval_count(a, 9, 1)
        with pytest.raises(RangeError):
            interval_count(a, 2, -1)
        with pytest.raises(ValueError):
            interval_count(a, 2, 1, "le")

    @given(natsets, st.integers(min_value=1, max_value=16), st.integers(min_value=0, max_value=8))
    @settings(max_examples=50)
    def test_monotone_and_gt_shift(self, a, ell, threshold):
        assert interval_count(a, ell, threshold + 1, "ge") <= interval_count(a, ell, threshold, "ge")
        assert interval_count(a, ell, threshold, "gt") == interval_count(a, ell, threshold + 1, "ge")

    @given(natsets, st.integers(min_value=1, max_value=16))
    @settings(max_examples=30)
    def test_matches_naive(self, a, ell):
        naive = sum(
            1
            for m in range(a.bound - ell + 1)
            if sum(1 for x in a.members if m <= x < m + ell) >= 2
        )
        assert interval_count(a, ell, 2, "ge") == naive


class TestColumns:
    def test_profile(self):
        grid = GridSet.of([(0, 0), (0, 3), (2, 1)], 4)
        assert column_profile(grid) == (2, 0, 1, 0)

    @given(st.sets(st.tuples(st.integers(0, 7), st.integers(0, 7))))
    @settings(max_examples=40)
    def test_profile_totals(self, cells):
        grid = GridSet.of(cells, 8)
        assert sum(column_profile(grid)) == len(grid.cells)


class TestAntichains:
    def test_minimal_elements(self):
        a = NodeSet.of(["0", "00", "01", "11"], 4)
        assert minimal_elements(a).sorted_nodes() == ["0", "11"]

    def test_phi_frozen(self):
        a = NodeSet.of(["0", "00", "01", "11"], 4)
        assert phi(a) == Fraction(3, 4)
        assert max_antichain_weight(a) == Fraction(3, 4)
        assert phi(NodeSet.of([], 4)) == 0
        assert max_antichain_weight(NodeSet.of([], 4)) == 0

    def test_full_levels_profile(self):
        import itertools

        nodes = frozenset(
            "".join(bits) for n in (2, 4, 6) for bits in itertools.product("01", repeat=n)
        )
        a = NodeSet(nodes, 8)
        assert phi(a) == 1
        assert phi_bar_profile(a, 8) == tuple([Fraction(1)] * 7 + [Fraction(0)])

    @given(nodesets)
    @settings(max_examples=60)
    def test_phi_equals_antichain_weight(self, a):
        assert phi(a) == max_antichain_weight(a)

    @given(nodesets)
    @settings(max_examples=40)
    def test_phi_bar_non_increasing(self, a):
        profile = phi_bar_profile(a)
        assert all(profile[i] >= profile[i + 1] for i in range(len(profile) - 1))
        assert profile[0] == phi(a)

    @given(nodesets, st.integers(min_value=0, max_value=2**31))
    @settings(max_examples=40)
    def test_phi_monotone_under_subset(self, b, mask_seed):
        keep = [s for i, s in enumerate(b.sorted_nodes()) if (mask_seed >> (i % 31)) & 1]
        a = NodeSet.of(keep, b.depth)
        assert phi(a) <= phi(b)

    def test_phi_bar_depth_validation(self):
        a = NodeSet.of(["0"], 4)
        with pytest.raises(RangeError):
            phi_bar_profile(a, 0)
        with pytest.raises(RangeError):
            phi_bar_profile(a, 5)


class TestTextFormats:
    def test_round_trips(self):
        nat = NatSet.of([0, 5, 9], 12)
        assert natset_from_text(natset_to_text(nat)) == nat
        grid = GridSet.of([(0, 1), (3, 2)], 6)
        assert gridset_from_text(gridset_to_text(grid)) == grid
        nodes = NodeSet.of(["", "01", "110"], 5)
        assert nodeset_from_text(nodeset_to_text(nodes)) == nodes

    def test_comments_and_blanks_skipped(self):
        assert natset_from_text("natset v1 bound=4\n\n# hi\n2\n") == NatSet.of([2], 4)

    def test_natset_errors(self):
        with pytest.raises(ParseError, match="line 1"):
            natset_from_text("gridset v1 bound=4\n")
        with pytest.raises(ParseError, match="line 2"):
            natset_from_text("natset v1 bound=4\nx\n")
        with pytest.raises(ParseError, match="line 3"):
            natset_from_text("natset v1 bound=4\n1\n4\n")
        with pytest.raises(ParseError, match="line 3"):
            natset_from_text("natset v1 bound=4\n1\n1\n")

    def test_gridset_errors(self):
        with pytest.raises(ParseError, match="line 2"):
            gridset_from_text("gridset v1 bound=4\n1\n")
        with pytest.raises(ParseError, match="line 2"):
            gridset_from_text("gridset v1 bound=4\n1 9\n")
        with pytest.raises(ParseError, match="line 3"):
            gridset_from_text("gridset v1 bound=4\n1 2\n1 2\n")

    def test_nodeset_errors(self):
        with pytest.raises(ParseError, match="line 2"):
            nodeset_from_text("nodeset v1 depth=3\n012\n")
        with pytest.raises(ParseError, match="too long"):
            nodeset_from_text("nodeset v1 depth=2\n00\n")
        with pytest.raises(ParseError, match="line 1"):
            nodeset_from_text("nodeset v1 depth=0\n")

    @given(natsets)
    @settings(max_examples=25)
    def test_natset_round_trip_random(self, a):
        assert natset_from_text(natset_to_text(a)) == a
