"""Node colorings of finite binary trees and the named constructions on them.

A coloring assigns 0 or 1 to every node of 2^{<D}.  Three storage backends
cover the range of instances: dense per-level byte tables for small depths,
a sparse override map with a constant default for deep but thin assignments,
and a pure function for colorings with a closed form.  All three expose the
same `value` interface, so the level-set operations never care which one
they are given.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping

from ._rng import SplitMix64, _GAMMA, _MASK, _MIX1, _MIX2
from .errors import ConstructionError, ParseError, RangeError, ShapeError
from .treecore import (
    D_MAX,
    LevelSet,
    LevelTree,
    check_depth,
    extensions,
    format_node,
    is_node,
    lenlex_key,
    level_nodes,
    node_index,
    parse_node,
)

# Dense tables and full serialisation are capped well below D_MAX: a table
# for depth D holds 2^D - 1 entries.
MATERIALIZE_MAX = 20
SERIALIZE_MAX = 16


class Coloring:
    """Total {0,1}-coloring of the nodes of 2^{<depth}."""

    __slots__ = ("depth", "_tables", "_overrides", "_default", "_fn")

    def __init__(
        self,
        depth: int,
        *,
        tables: tuple[bytes, ...] | None = None,
        overrides: dict[str, int] | None = None,
        default: int = 0,
        fn: Callable[[str], int] | None = None,
    ):
        check_depth(depth)
        self.depth = depth
        self._tables = tables
        self._overrides = overrides
        self._default = default
        self._fn = fn
        assert (tables is not None) + (overrides is not None) + (fn is not None) == 1

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_function(cls, depth: int, fn: Callable[[str], int]) -> "Coloring":
        """Materialise `fn` into dense per-level tables."""
        if depth > MATERIALIZE_MAX:
            raise RangeError(f"depth {depth} too large to materialise (cap {MATERIALIZE_MAX})")
        tables = []
        for n in range(depth):
            row = bytearray(1 << n)
            for i, s in enumerate(level_nodes(n)):
                row[i] = _check_bit(fn(s))
            tables.append(bytes(row))
        return cls(depth, tables=tuple(tables))

    @classmethod
    def computed(cls, depth: int, fn: Callable[[str], int]) -> "Coloring":
        return cls(depth, fn=fn)

    @classmethod
    def sparse(cls, depth: int, overrides: Mapping[str, int], default: int = 0) -> "Coloring":
        _check_bit(default)
        checked: dict[str, int] = {}
        for s, v in overrides.items():
            if not is_node(s) or len(s) >= depth:
                raise RangeError(f"override node {s!r} outside 2^<{depth}")
            checked[s] = _check_bit(v)
        return cls(depth, overrides=checked, default=default)

    @classmethod
    def constant(cls, depth: int, bit: int) -> "Coloring":
        return cls.sparse(depth, {}, default=_check_bit(bit))

    # -- queries -------------------------------------------------------------

    def value(self, s: str) -> int:
        n = len(s)
        if n >= self.depth:
            raise RangeError(f"node of length {n} outside 2^<{self.depth}")
        if self._tables is not None:
            return self._tables[n][node_index(s)]
        if self._overrides is not None:
            return self._overrides.get(s, self._default)
        return self._fn(s)

    @property
    def is_dense(self) -> bool:
        return self._tables is not None

    def level_table(self, n: int) -> bytes:
        """Dense row for level n (dense backend only)."""
        if self._tables is None:
            raise RangeError("coloring is not materialised")
        return self._tables[n]

    def count_extensions(self, s: str, level: int, color: int, cap: int | None = None) -> int:
        """Number of extensions of `s` at `level` with the given color.

        With `cap`, counting stops early once `cap` hits are seen; dense and
        sparse backends return exact counts regardless since they are cheap.
        """
        _check_bit(color)
        if not len(s) <= level < self.depth:
            raise RangeError(f"level {level} outside [{len(s)}, {self.depth})")
        total = 1 << (level - len(s))
        if self._tables is not None:
            lo = node_index(s) << (level - len(s))
            return self._tables[level][lo : lo + total].count(color)
        if self._overrides is not None:
            hits = 0
            listed = 0
            for node, v in self._overrides.items():
                if len(node) == level and node.startswith(s):
                    listed += 1
                    if v == color:
                        hits += 1
            if self._default == color:
                hits += total - listed
            return hits
        hits = 0
        for t in extensions(s, level):
            if self._fn(t) == color:
                hits += 1
                if cap is not None and hits >= cap:
                    return hits
        return hits

    def materialized(self) -> "Coloring":
        """Dense copy; rejects depths past the materialisation cap."""
        if self._tables is not None:
            return self
        return Coloring.from_function(self.depth, self.value)


def _check_bit(v: int) -> int:
    if v not in (0, 1):
        raise ValueError(f"color must be 0 or 1, got {v!r}")
    return v


# ---------------------------------------------------------------------------
# basic colorings
# ---------------------------------------------------------------------------


def _splitmix_output(seed: int, k: int) -> int:
    # k-th output of the splitmix64 stream, computed by direct state jump.
    z = (seed + (k + 1) * _GAMMA) & _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def random_coloring(depth: int, seed: int) -> Coloring:
    """Seeded coloring: node s gets the low bit of stream output rank(s).

    rank is the position of s in length-lex order, so the coloring agrees
    with drawing one splitmix64 output per node in that order.  Same (depth,
    seed) always yields the same coloring; the backend is computed, so any
    depth up to D_MAX works without materialising 2^depth - 1 entries.
    """
    check_depth(depth)
    seed = seed & _MASK

    def fn(s: str) -> int:
        rank = (1 << len(s)) - 1 + node_index(s)
        return _splitmix_output(seed, rank) & 1

    return Coloring.computed(depth, fn)


def constant_coloring(depth: int, bit: int) -> Coloring:
    return Coloring.constant(depth, bit)


def last_bit_coloring(depth: int) -> Coloring:
    """c(s) = last bit of s, 0 at the root."""
    return Coloring.computed(depth, lambda s: int(s[-1]) if s else 0)


# ---------------------------------------------------------------------------
# level-set operations
# ---------------------------------------------------------------------------


def h_set(c: Coloring, p: LevelTree) -> LevelSet:
    """Levels of p on which c is constant.

    Single-branch trees give the full level set [0, depth); adding branches
    can only remove levels.
    """
    if c.depth != p.depth:
        raise ShapeError(f"coloring depth {c.depth} != tree depth {p.depth}")
    mono: list[int] = []
    for n, level in enumerate(p.levels):
        seen = -1
        ok = True
        for s in level:
            v = c.value(s)
            if seen < 0:
                seen = v
            elif v != seen:
                ok = False
                break
        if ok:
            mono.append(n)
    return LevelSet.of(mono)


def i_set(c: Coloring, s: str) -> LevelSet:
    """Levels n >= |s|+2 at which s has at most one 0-colored extension."""
    if len(s) >= c.depth:
        raise RangeError(f"node of length {len(s)} outside 2^<{c.depth}")
    out = []
    for n in range(len(s) + 2, c.depth):
        if c.count_extensions(s, n, 0, cap=2) <= 1:
            out.append(n)
    return LevelSet.of(out)


def color_trace(c: Coloring, x: str) -> tuple[LevelSet, LevelSet]:
    """Per-color partition (K_0, K_1) of the levels along the branch through x."""
    if len(x) >= c.depth:
        raise RangeError(f"node of length {len(x)} outside 2^<{c.depth}")
    parts: tuple[list[int], list[int]] = ([], [])
    for n in range(len(x) + 1):
        parts[c.value(x[:n])].append(n)
    return LevelSet.of(parts[0]), LevelSet.of(parts[1])


# ---------------------------------------------------------------------------
# slowly branching density instance
# ---------------------------------------------------------------------------


def band_range(n: int) -> range:
    """Dyadic level band B_n = (2^n, 2^(n+1)]."""
    if n < 0:
        raise RangeError(f"band index {n} negative")
    return range((1 << n) + 1, (1 << (n + 1)) + 1)


@dataclass(frozen=True)
class ZDensityInstance:
    """Slowly branching host tree with its bandwise counting coloring.

    The host has exactly n branches inside band B_n: a single split at level
    2^n (at the lex-least node) raises the width from n-1 to n.  Within band
    n the branches s_0 < ... < s_{n-1} (lex order at the band top 2^(n+1))
    are colored by a binary counter: at band level 2^n + 1 + m the prefix of
    s_j carries bit j of m.  Constancy of k selected counter bits happens on
    exactly 2^(n-k+1) of the 2^n band levels, which drives the band checks.
    """

    n_max: int
    depth: int
    coloring: Coloring
    host: LevelTree
    band_branches: dict[int, tuple[str, ...]]
    band_tables: dict[int, dict[int, tuple[int, ...]]]


def zdensity_coloring(n_max: int) -> ZDensityInstance:
    if n_max < 1:
        raise RangeError(f"n_max {n_max} must be at least 1")
    depth = (1 << (n_max + 1)) + 1
    check_depth(depth)  # caps n_max at 4

    split_levels = {1 << n for n in range(2, n_max + 1)}
    levels: list[frozenset[str]] = [frozenset({""})]
    for m in range(depth - 1):
        current = levels[m]
        nxt = {s + "0" for s in current}
        if m in split_levels:
            nxt.add(min(current) + "1")
        levels.append(frozenset(nxt))
    host = LevelTree(depth, tuple(levels))

    overrides: dict[str, int] = {}
    band_branches: dict[int, tuple[str, ...]] = {}
    band_tables: dict[int, dict[int, tuple[int, ...]]] = {}
    for n in range(1, n_max + 1):
        branch_list = tuple(sorted(host.levels[1 << (n + 1)]))
        assert len(branch_list) == n
        band_branches[n] = branch_list
        table: dict[int, tuple[int, ...]] = {}
        for m in range(1 << n):
            lvl = (1 << n) + 1 + m
            bits = tuple((m >> j) & 1 for j in range(n))
            table[lvl] = bits
            for j, s in enumerate(branch_list):
                overrides[s[:lvl]] = bits[j]
        band_tables[n] = table

    coloring = Coloring.sparse(depth, overrides, default=0)
    return ZDensityInstance(n_max, depth, coloring, host, band_branches, band_tables)


# ---------------------------------------------------------------------------
# pairing construction
# ---------------------------------------------------------------------------

Pair = tuple[str, str]
Matching = tuple[Pair, ...]


def perfect_matchings(strings: Iterable[str]) -> Iterator[Matching]:
    """All perfect matchings of an even-sized string set, canonically ordered.

    The lex-least unmatched string is paired with each possible partner in
    lex order, recursing on the remainder; pairs within a matching are listed
    with ascending first components.
    """
    pool = sorted(strings)
    if len(pool) % 2:
        raise ConstructionError(f"cannot match an odd number of strings ({len(pool)})")

    def rec(rest: tuple[str, ...]) -> Iterator[Matching]:
        if not rest:
            yield ()
            return
        first = rest[0]
        for i in range(1, len(rest)):
            partner = rest[i]
            sub = rest[1:i] + rest[i + 1 :]
            for tail in rec(sub):
                yield ((first, partner),) + tail

    return rec(tuple(pool))


@dataclass(frozen=True)
class PairingSystem:
    """Enumerated matchings x_0..x_{T-1} with their disjoint level sets A_{x_i}."""

    base_levels: tuple[int, ...]
    per_level_cap: int
    depth: int
    matchings: tuple[Matching, ...]
    matching_levels: tuple[int, ...]
    level_sets: tuple[frozenset[int], ...]


def pairing_coloring(base_levels: Iterable[int], per_level_cap: int, depth: int) -> tuple[Coloring, PairingSystem]:
    """Coloring that splits every matched pair on that matching's own levels.

    Matchings of {0,1}^n for each base level n are enumerated canonically
    (capped per level), then matching x_i receives the residue-class level
    set A_i = {k < depth : k = i mod T, k >= n}.  On a level in A_i each node
    is colored by the side its length-n prefix takes in x_i, so every pair's
    two-branch subtrees are bichromatic on all of A_i.
    """
    check_depth(depth)
    lvls = sorted(set(base_levels))
    if not lvls:
        raise ConstructionError("no base levels given")
    for n in lvls:
        if n < 1 or n >= depth:
            raise RangeError(f"base level {n} outside [1, {depth})")
    if per_level_cap < 1:
        raise ConstructionError(f"per-level cap {per_level_cap} admits no matchings")

    matchings: list[Matching] = []
    matching_levels: list[int] = []
    for n in lvls:
        for matching in itertools.islice(perfect_matchings(level_nodes(n)), per_level_cap):
            matchings.append(matching)
            matching_levels.append(n)
    total = len(matchings)
    if total == 0:
        raise ConstructionError("no matchings enumerated")

    level_sets = tuple(
        frozenset(k for k in range(depth) if k % total == i and k >= matching_levels[i])
        for i in range(total)
    )

    level_to_idx: dict[int, int] = {}
    for i, ks in enumerate(level_sets):
        for k in ks:
            level_to_idx[k] = i
    side: list[dict[str, int]] = []
    for matching in matchings:
        table: dict[str, int] = {}
        for a, b in matching:
            table[a] = 0
            table[b] = 1
        side.append(table)

    def fn(s: str) -> int:
        i = level_to_idx.get(len(s))
        if i is None:
            return 0
        return side[i][s[: matching_levels[i]]]

    system = PairingSystem(tuple(lvls), per_level_cap, depth, tuple(matchings), tuple(matching_levels), level_sets)
    return Coloring.computed(depth, fn), system


def spanning_trees_for_pair(pair: Pair, depth: int) -> Iterator[LevelTree]:
    """All two-branch spanning trees through a matched pair, in lex order."""
    u, v = pair
    for top_u in extensions(u, depth - 1):
        for top_v in extensions(v, depth - 1):
            yield LevelTree.from_branch_set(depth, (top_u, top_v))


@dataclass(frozen=True)
class MatchingCheck:
    index: int
    base_level: int
    trees_checked: int
    violations: tuple[tuple[str, str, int], ...]  # (branch, branch, offending level)

    @property
    def passed(self) -> bool:
        return not self.violations


def check_pairing_disjointness(c: Coloring, system: PairingSystem) -> list[MatchingCheck]:
    """Exhaustively verify A_{x_i} misses H_c(p) for every pair-spanning tree p."""
    if c.depth != system.depth:
        raise ShapeError(f"coloring depth {c.depth} != system depth {system.depth}")
    out: list[MatchingCheck] = []
    for i, matching in enumerate(system.matchings):
        level_set = system.level_sets[i]
        trees = 0
        bad: list[tuple[str, str, int]] = []
        for pair in matching:
            for p in spanning_trees_for_pair(pair, system.depth):
                trees += 1
                hs = h_set(c, p)
                overlap = hs.intersection(level_set)
                if len(overlap):
                    tops = sorted(p.levels[-1])
                    bad.append((tops[0], tops[1], min(overlap)))
        out.append(MatchingCheck(i, system.matching_levels[i], trees, tuple(bad)))
    return out


# ---------------------------------------------------------------------------
# splitting-level assignments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplittingAssignment:
    """Strings t_i with pairwise disjoint level sets S_i, each level past t_i's child."""

    domain: tuple[str, ...]
    sets: tuple[frozenset[int], ...]


def residue_splitting(max_len: int, depth: int) -> SplittingAssignment:
    """Canonical assignment: domain = all strings of length <= max_len in
    length-lex order, S_i = levels congruent to i modulo the domain size that
    clear the floor |t_i| + 1."""
    check_depth(depth)
    if max_len < 0 or max_len >= depth:
        raise RangeError(f"max_len {max_len} outside [0, {depth})")
    domain = tuple(s for n in range(max_len + 1) for s in level_nodes(n))
    size = len(domain)
    sets = tuple(
        frozenset(k for k in range(depth) if k % size == i and k >= len(domain[i]) + 1)
        for i in range(size)
    )
    return SplittingAssignment(domain, sets)


def levels_coloring(assignment: SplittingAssignment, depth: int) -> Coloring:
    """Coloring that marks, on each level of S_i, which side of t_i a node took.

    On a level k in S_i, a node extending t_i gets the bit it chose just
    above t_i; everything else on the level gets 0.  Above any t_i the slice
    at each assigned level is therefore bichromatic.
    """
    check_depth(depth)
    if len(assignment.domain) != len(assignment.sets):
        raise ConstructionError("domain and level-set counts differ")
    if len(set(assignment.domain)) != len(assignment.domain):
        raise ConstructionError("domain strings not distinct")
    level_to_idx: dict[int, int] = {}
    for i, ks in enumerate(assignment.sets):
        floor = len(assignment.domain[i]) + 1
        for k in ks:
            if k < floor:
                raise ConstructionError(f"level {k} assigned to {assignment.domain[i]!r} is below its floor {floor}")
            if k >= depth:
                raise ConstructionError(f"assigned level {k} outside [0, {depth})")
            if k in level_to_idx:
                raise ConstructionError(f"level {k} assigned to two strings")
            level_to_idx[k] = i

    domain = assignment.domain

    def fn(s: str) -> int:
        i = level_to_idx.get(len(s))
        if i is None:
            return 0
        t = domain[i]
        if s.startswith(t):
            return int(s[len(t)])
        return 0

    return Coloring.computed(depth, fn)


@dataclass(frozen=True)
class SliceCheck:
    node: str
    level: int
    zero_side_bad: int
    one_side_bad: int

    @property
    def passed(self) -> bool:
        return self.zero_side_bad == 0 and self.one_side_bad == 0


def check_levels_bichromatic(c: Coloring, assignment: SplittingAssignment) -> list[SliceCheck]:
    """For every string with a nonempty set, verify its slices split by side.

    At each assigned level the extensions through t+0 must all be colored 0
    and those through t+1 all colored 1; both sides are checked exhaustively.
    """
    out: list[SliceCheck] = []
    for i, t in enumerate(assignment.domain):
        for k in sorted(assignment.sets[i]):
            zero_bad = sum(1 for s in extensions(t + "0", k) if c.value(s) != 0)
            one_bad = sum(1 for s in extensions(t + "1", k) if c.value(s) != 1)
            out.append(SliceCheck(t, k, zero_bad, one_bad))
    return out


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


def coloring_to_text(c: Coloring) -> str:
    """Serialise a coloring; nodes omitted from the body are 0-colored.

    Dense colorings list every node.  Sparse default-0 colorings list just
    their 1-colored overrides, which keeps deep thin instances writable.
    """
    lines = [f"coloring v1 depth={c.depth}"]
    if c._overrides is not None and c._default == 0:
        ones = sorted((s for s, v in c._overrides.items() if v == 1), key=lenlex_key)
        lines.extend(f"{format_node(s)} 1" for s in ones)
        return "\n".join(lines) + "\n"
    if c.depth > SERIALIZE_MAX:
        raise RangeError(f"depth {c.depth} too large to serialise in full (cap {SERIALIZE_MAX})")
    dense = c.materialized()
    for n in range(dense.depth):
        for s in level_nodes(n):
            lines.append(f"{format_node(s)} {dense.value(s)}")
    return "\n".join(lines) + "\n"


def coloring_from_text(text: str) -> Coloring:
    """Parse a coloring; unlisted nodes default to 0, duplicates are rejected."""
    from .treecore import _parse_header

    lines = text.splitlines()
    if not lines:
        raise ParseError("empty input", 1)
    depth = _parse_header(lines[0], "coloring", "depth")
    if not 1 <= depth <= D_MAX:
        raise ParseError(f"depth {depth} outside [1, {D_MAX}]", 1)
    overrides: dict[str, int] = {}
    for i, raw in enumerate(lines[1:], start=2):
        stripped = raw.strip()
        if not stripped:
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise ParseError(f"expected '<node> <bit>', got {stripped!r}", i)
        try:
            node = parse_node(parts[0])
        except ValueError:
            raise ParseError(f"not a node: {parts[0]!r}", i) from None
        if len(node) >= depth:
            raise ParseError(f"node {parts[0]!r} too long for depth {depth}", i)
        if parts[1] not in ("0", "1"):
            raise ParseError(f"color must be 0 or 1, got {parts[1]!r}", i)
        if node in overrides:
            raise ParseError(f"duplicate node {parts[0]!r}", i)
        overrides[node] = int(parts[1])
    return Coloring.sparse(depth, overrides, default=0)
