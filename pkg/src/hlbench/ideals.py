"""Finite statistics of subsets of [0, N), of [0, N)^2, and of tree nodes.

All densities and weights are exact `Fraction` values; no floats appear
anywhere in this module.  The three carrier types are immutable and
validate their members on construction, so every downstream statistic can
assume in-range, duplicate-free data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import ParseError, RangeError
from .treecore import D_MAX, _parse_header, check_node, format_node, lenlex_key, parse_node

DENSITY_MODES = ("dyadic", "natural")
CMP_OPS = ("ge", "gt")


# ---------------------------------------------------------------------------
# carriers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NatSet:
    """A subset of [0, bound)."""

    members: frozenset[int]
    bound: int

    def __post_init__(self):
        if self.bound < 1:
            raise RangeError(f"bound {self.bound} must be >= 1")
        for m in self.members:
            if not isinstance(m, int) or isinstance(m, bool) or not 0 <= m < self.bound:
                raise RangeError(f"member {m!r} outside [0, {self.bound})")

    @classmethod
    def of(cls, members: Iterable[int], bound: int) -> "NatSet":
        return cls(frozenset(members), bound)

    def complement(self) -> "NatSet":
        return NatSet(frozenset(range(self.bound)) - self.members, self.bound)

    def __contains__(self, m: int) -> bool:
        return m in self.members

    def __len__(self) -> int:
        return len(self.members)

    def sorted_members(self) -> list[int]:
        return sorted(self.members)


@dataclass(frozen=True)
class GridSet:
    """A set of (column, row) cells inside [0, bound)^2."""

    cells: frozenset[tuple[int, int]]
    bound: int

    def __post_init__(self):
        if self.bound < 1:
            raise RangeError(f"bound {self.bound} must be >= 1")
        for cell in self.cells:
            if (
                not isinstance(cell, tuple)
                or len(cell) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in cell)
                or not all(0 <= v < self.bound for v in cell)
            ):
                raise RangeError(f"cell {cell!r} outside [0, {self.bound})^2")

    @classmethod
    def of(cls, cells: Iterable[tuple[int, int]], bound: int) -> "GridSet":
        return cls(frozenset(tuple(c) for c in cells), bound)

    def column(self, c: int) -> frozenset[int]:
        if not 0 <= c < self.bound:
            raise RangeError(f"column {c} outside [0, {self.bound})")
        return frozenset(row for col, row in self.cells if col == c)

    def __len__(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class NodeSet:
    """A set of binary strings below a depth bound (lengths in [0, depth))."""

    nodes: frozenset[str]
    depth: int

    def __post_init__(self):
        if not 1 <= self.depth <= D_MAX:
            raise RangeError(f"depth {self.depth} outside [1, {D_MAX}]")
        for s in self.nodes:
            check_node(s)
            if len(s) >= self.depth:
                raise RangeError(f"node {format_node(s)!r} too long for depth {self.depth}")

    @classmethod
    def of(cls, nodes: Iterable[str], depth: int) -> "NodeSet":
        return cls(frozenset(nodes), depth)

    def __contains__(self, s: str) -> bool:
        return s in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def sorted_nodes(self) -> list[str]:
        return sorted(self.nodes, key=lenlex_key)


# ---------------------------------------------------------------------------
# density and weight statistics on NatSet
# ---------------------------------------------------------------------------


def density_profile(a: NatSet, mode: str) -> tuple[Fraction, ...]:
    """Relative density of `a` over a sweep of windows.

    "dyadic": windows [2^n, 2^(n+1)) for every n with 2^(n+1) <= bound,
    each divided by its width 2^n.  "natural": initial segments [0, n) for
    n in [1, bound], divided by n.
    """
    if mode not in DENSITY_MODES:
        raise ValueError(f"mode {mode!r} not in {DENSITY_MODES}")
    if a.bound < 2:
        raise RangeError(f"bound {a.bound} must be >= 2 for a density profile")
    if mode == "dyadic":
        out = []
        n = 0
        while (2 << n) <= a.bound:
            width = 1 << n
            hits = sum(1 for m in a.members if width <= m < 2 * width)
            out.append(Fraction(hits, width))
            n += 1
        return tuple(out)
    profile = []
    hits = 0
    for n in range(1, a.bound + 1):
        if (n - 1) in a.members:
            hits += 1
        profile.append(Fraction(hits, n))
    return tuple(profile)


def summable_weight(a: NatSet) -> Fraction:
    """Sum of 1/(n+1) over the members, exactly."""
    return sum((Fraction(1, m + 1) for m in a.members), Fraction(0))


def interval_count(a: NatSet, ell: int, threshold: int, cmp: str = "ge") -> int:
    """How many length-ell windows inside [0, bound) meet the hit threshold.

    Windows are [m, m + ell) for m in [0, bound - ell]; "ge" counts windows
    with at least `threshold` members, "gt" with strictly more.
    """
    if not 1 <= ell <= a.bound:
        raise RangeError(f"ell {ell} outside [1, {a.bound}]")
    if threshold < 0:
        raise RangeError(f"threshold {threshold} must be >= 0")
    if cmp not in CMP_OPS:
        raise ValueError(f"cmp {cmp!r} not in {CMP_OPS}")
    # Sliding count: O(bound) instead of O(bound * ell).
    inside = sum(1 for m in a.members if m < ell)
    count = 0
    for m in range(a.bound - ell + 1):
        if m > 0:
            inside += ((m + ell - 1) in a.members) - ((m - 1) in a.members)
        hits_ok = inside >= threshold if cmp == "ge" else inside > threshold
        count += hits_ok
    return count


# ---------------------------------------------------------------------------
# column statistics on GridSet
# ---------------------------------------------------------------------------


def column_profile(e: GridSet) -> tuple[int, ...]:
    """Cells per column, one entry for each column in [0, bound)."""
    counts = [0] * e.bound
    for col, _row in e.cells:
        counts[col] += 1
    return tuple(counts)


# ---------------------------------------------------------------------------
# antichain statistics on NodeSet
# ---------------------------------------------------------------------------


def minimal_elements(a: NodeSet) -> NodeSet:
    """Nodes of `a` with no proper prefix in `a`."""
    mins = frozenset(
        s for s in a.nodes if not any(s[:k] in a.nodes for k in range(len(s)))
    )
    return NodeSet(mins, a.depth)


def phi(a: NodeSet) -> Fraction:
    """Sum of 2^-|s| over the minimal elements of `a`."""
    return sum((Fraction(1, 1 << len(s)) for s in minimal_elements(a).nodes), Fraction(0))


def max_antichain_weight(a: NodeSet) -> Fraction:
    """Largest sum of 2^-|s| over an antichain inside `a`.

    Dynamic programme over the prefix closure of `a`: a subtree either
    contributes its root (when the root is in `a`) or the best of its two
    child subtrees, whichever weighs more.  Always equals phi(a), which the
    tests pin down; keeping both gives an independent oracle.
    """
    if not a.nodes:
        return Fraction(0)
    closure: set[str] = set()
    for s in a.nodes:
        for k in range(len(s) + 1):
            closure.add(s[:k])
    best: dict[str, Fraction] = {}
    for s in sorted(closure, key=lenlex_key, reverse=True):
        kids = best.get(s + "0", Fraction(0)) + best.get(s + "1", Fraction(0))
        own = Fraction(1, 1 << len(s)) if s in a.nodes else Fraction(0)
        best[s] = max(own, kids)
    return best[""]


def phi_bar_profile(a: NodeSet, depth: int | None = None) -> tuple[Fraction, ...]:
    """phi of `a` restricted to lengths >= n, for n in [0, depth).

    Non-increasing: every antichain that survives the cut at n + 1 already
    existed at n.
    """
    if depth is None:
        depth = a.depth
    if not 1 <= depth <= a.depth:
        raise RangeError(f"profile depth {depth} outside [1, {a.depth}]")
    out = []
    for n in range(depth):
        tail = NodeSet(frozenset(s for s in a.nodes if len(s) >= n), a.depth)
        out.append(phi(tail))
    return tuple(out)


# ---------------------------------------------------------------------------
# text formats
# ---------------------------------------------------------------------------


def _parse_lines(text: str, kind: str, field: str) -> tuple[int, list[tuple[int, str]]]:
    # Shared body reader: header value plus (line number, payload) pairs.
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty input", 1)
    value = _parse_header(lines[0], kind, field)
    body = []
    for i, raw in enumerate(lines[1:], start=2):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        body.append((i, stripped))
    return value, body


def natset_from_text(text: str) -> NatSet:
    """Parse `natset v1 bound=<N>` followed by one integer per line."""
    bound, body = _parse_lines(text, "natset", "bound")
    if bound < 1:
        raise ParseError(f"bound {bound} must be >= 1", 1)
    members: set[int] = set()
    for i, token in body:
        try:
            m = int(token)
        except ValueError:
            raise ParseError(f"not an integer: {token!r}", i) from None
        if not 0 <= m < bound:
            raise ParseError(f"member {m} outside [0, {bound})", i)
        if m in members:
            raise ParseError(f"duplicate member {m}", i)
        members.add(m)
    return NatSet(frozenset(members), bound)


def natset_to_text(a: NatSet) -> str:
    lines = [f"natset v1 bound={a.bound}"]
    lines.extend(str(m) for m in a.sorted_members())
    return "\n".join(lines) + "\n"


def gridset_from_text(text: str) -> GridSet:
    """Parse `gridset v1 bound=<N>` followed by `<col> <row>` lines."""
    bound, body = _parse_lines(text, "gridset", "bound")
    if bound < 1:
        raise ParseError(f"bound {bound} must be >= 1", 1)
    cells: set[tuple[int, int]] = set()
    for i, token in body:
        parts = token.split()
        if len(parts) != 2:
            raise ParseError(f"expected '<col> <row>', got {token!r}", i)
        try:
            col, row = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"expected '<col> <row>', got {token!r}", i) from None
        if not (0 <= col < bound and 0 <= row < bound):
            raise ParseError(f"cell ({col}, {row}) outside [0, {bound})^2", i)
        if (col, row) in cells:
            raise ParseError(f"duplicate cell ({col}, {row})", i)
        cells.add((col, row))
    return GridSet(frozenset(cells), bound)


def gridset_to_text(e: GridSet) -> str:
    lines = [f"gridset v1 bound={e.bound}"]
    lines.extend(f"{col} {row}" for col, row in sorted(e.cells))
    return "\n".join(lines) + "\n"


def nodeset_from_text(text: str) -> NodeSet:
    """Parse `nodeset v1 depth=<D>` followed by one node per line ('-' = root)."""
    depth, body = _parse_lines(text, "nodeset", "depth")
    if not 1 <= depth <= D_MAX:
        raise ParseError(f"depth {depth} outside [1, {D_MAX}]", 1)
    nodes: set[str] = set()
    for i, token in body:
        try:
            s = parse_node(token)
        except ValueError:
            raise ParseError(f"not a node: {token!r}", i) from None
        if len(s) >= depth:
            raise ParseError(f"node {token!r} too long for depth {depth}", i)
        if s in nodes:
            raise ParseError(f"duplicate node {token!r}", i)
        nodes.add(s)
    return NodeSet(frozenset(nodes), depth)


def nodeset_to_text(a: NodeSet) -> str:
    lines = [f"nodeset v1 depth={a.depth}"]
    lines.extend(format_node(s) for s in a.sorted_nodes())
    return "\n".join(lines) + "\n"
