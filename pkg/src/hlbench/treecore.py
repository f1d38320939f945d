"""Finite binary strings, pruned level trees, and strong subtree embeddings.

Nodes are plain Python strings over the alphabet {'0', '1'}; the empty
string is the root.  A tree of depth D is stored level by level, so all
structural checks are set operations on slices.  Depth is capped at
D_MAX = 64: level indices stay well inside native integers and every
construction in the package is intended for desk-scale instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import (
    EmbeddingInvalidError,
    NotFoundError,
    ParseError,
    RangeError,
    ShapeError,
    TreeInvalidError,
)

D_MAX = 64

ROOT = ""

# ---------------------------------------------------------------------------
# node helpers
# ---------------------------------------------------------------------------


def is_node(s: object) -> bool:
    """True when `s` is a (possibly empty) string over {'0','1'}."""
    return isinstance(s, str) and all(ch in "01" for ch in s)


def check_node(s: str) -> str:
    if not is_node(s):
        raise ValueError(f"not a binary string: {s!r}")
    return s


def lenlex_key(s: str) -> tuple[int, str]:
    """Canonical node order: by length first, lexicographic within a length."""
    return (len(s), s)


def compatible(s: str, t: str) -> bool:
    """True when one of the strings is a prefix of the other."""
    return s.startswith(t) or t.startswith(s)


def meet(s: str, t: str) -> str:
    """Longest common prefix."""
    i = 0
    for a, b in zip(s, t):
        if a != b:
            break
        i += 1
    return s[:i]


def node_index(s: str) -> int:
    """Rank of a node within its level under lexicographic order."""
    return int(s, 2) if s else 0


def level_nodes(n: int) -> Iterator[str]:
    """All length-n binary strings in lexicographic order."""
    if n == 0:
        yield ROOT
        return
    for bits in itertools.product("01", repeat=n):
        yield "".join(bits)


def extensions(s: str, length: int) -> Iterator[str]:
    """All extensions of `s` of the given total length, in lexicographic order."""
    assert length >= len(s)
    for suffix in level_nodes(length - len(s)):
        yield s + suffix


def format_node(s: str) -> str:
    """Textual form of a node: '-' stands for the root."""
    return s if s else "-"


def parse_node(text: str) -> str:
    if text == "-":
        return ROOT
    if not is_node(text) or text == "":
        raise ValueError(f"not a node: {text!r}")
    return text


# ---------------------------------------------------------------------------
# level sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LevelSet:
    """A finite set of level indices, kept as a frozenset with sorted iteration."""

    members: frozenset[int]

    @classmethod
    def of(cls, items: Iterable[int]) -> "LevelSet":
        return cls(frozenset(items))

    def __contains__(self, n: int) -> bool:
        return n in self.members

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))

    def intersection(self, other: Iterable[int]) -> "LevelSet":
        return LevelSet(self.members & frozenset(other))

    def isdisjoint(self, other: Iterable[int]) -> bool:
        return self.members.isdisjoint(frozenset(other))


# ---------------------------------------------------------------------------
# level trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LevelTree:
    """Levelwise representation of a pruned subtree of the full binary tree.

    `levels[n]` holds the nodes of length n.  The container itself does not
    enforce the tree invariants; `validate` reports on them, and readers of
    external text reject invalid trees.
    """

    depth: int
    levels: tuple[frozenset[str], ...]

    @classmethod
    def from_levels(cls, levels: Iterable[Iterable[str]]) -> "LevelTree":
        packed = tuple(frozenset(level) for level in levels)
        return cls(len(packed), packed)

    @classmethod
    def from_branch_set(cls, depth: int, tops: Iterable[str]) -> "LevelTree":
        """Downward closure of a set of length-(depth-1) strings."""
        check_depth(depth)
        top = frozenset(tops)
        for t in top:
            if not is_node(t) or len(t) != depth - 1:
                raise ValueError(f"not a top-level node: {t!r}")
        return cls(depth, tuple(frozenset(t[:n] for t in top) for n in range(depth)))

    def level(self, n: int) -> frozenset[str]:
        if not 0 <= n < self.depth:
            raise RangeError(f"level {n} outside [0, {self.depth})")
        return self.levels[n]

    def __contains__(self, s: str) -> bool:
        return len(s) < self.depth and s in self.levels[len(s)]

    def node_count(self) -> int:
        return sum(len(level) for level in self.levels)

    def all_nodes(self) -> Iterator[str]:
        """Nodes in length-lex order."""
        for level in self.levels:
            yield from sorted(level)


def check_depth(depth: int) -> int:
    if not 1 <= depth <= D_MAX:
        raise RangeError(f"depth {depth} outside [1, {D_MAX}]")
    return depth


def make_full(depth: int) -> LevelTree:
    """The complete binary tree of the given depth (levels 0 .. depth-1)."""
    check_depth(depth)
    return LevelTree(depth, tuple(frozenset(level_nodes(n)) for n in range(depth)))


@dataclass(frozen=True)
class Violation:
    rule: str
    node: str
    level: int


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(tree: LevelTree) -> ValidationReport:
    """Check the level-tree invariants; each violation names its rule and node.

    Rules: "shape" (level list inconsistent with depth, or depth out of range),
    "node-length" (a member sits at the wrong level), "root" (level 0 is not
    exactly the empty string), "prefix-closed" (a node's parent is missing),
    "pruned" (a non-top node has no extension on the next level).
    """
    bad: list[Violation] = []
    if not 1 <= tree.depth <= D_MAX or len(tree.levels) != tree.depth:
        bad.append(Violation("shape", ROOT, 0))
        return ValidationReport(tuple(bad))
    for n, level in enumerate(tree.levels):
        for s in sorted(level):
            if not is_node(s) or len(s) != n:
                bad.append(Violation("node-length", str(s), n))
    if tree.levels[0] != frozenset({ROOT}):
        bad.append(Violation("root", ROOT, 0))
    for n in range(1, tree.depth):
        for s in sorted(tree.levels[n]):
            if is_node(s) and len(s) == n and s[:-1] not in tree.levels[n - 1]:
                bad.append(Violation("prefix-closed", s, n))
    for n in range(tree.depth - 1):
        children = tree.levels[n + 1]
        for s in sorted(tree.levels[n]):
            if s + "0" not in children and s + "1" not in children:
                bad.append(Violation("pruned", s, n))
    return ValidationReport(tuple(bad))


def require_valid(tree: LevelTree) -> LevelTree:
    report = validate(tree)
    if not report.ok:
        first = report.violations[0]
        raise TreeInvalidError(
            f"invalid tree: rule {first.rule!r} at node {format_node(first.node)!r}"
            f" (level {first.level}); {len(report.violations)} violation(s)",
            report.violations,
        )
    return tree


def subtree_at(tree: LevelTree, s: str) -> LevelTree:
    """All nodes of `tree` compatible with `s`: the branches through `s`."""
    if s not in tree:
        raise NotFoundError(f"node {format_node(s)!r} not in tree")
    return LevelTree(
        tree.depth,
        tuple(frozenset(x for x in level if compatible(x, s)) for level in tree.levels),
    )


def branches(tree: LevelTree) -> frozenset[str]:
    """Top-level nodes of a valid tree; by prunedness they determine it."""
    require_valid(tree)
    return tree.levels[-1]


# ---------------------------------------------------------------------------
# embeddings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TreeEmbedding:
    """Level-respecting embedding of the full height-h tree 2^{<=h}.

    `images` maps every argument string of length <= height to its image
    node.  Arguments of length < height land on split nodes, arguments of
    full length land on the common top level.
    """

    height: int
    images: dict[str, str]
    top_level: int

    def image(self, arg: str) -> str:
        try:
            return self.images[arg]
        except KeyError:
            raise NotFoundError(f"argument {format_node(arg)!r} not in embedding") from None

    def top_images(self) -> tuple[str, ...]:
        """Images of the 2^height full-length arguments, in argument order."""
        return tuple(self.images[a] for a in sorted(self.images, key=lenlex_key) if len(a) == self.height)


def embedding_problems(e: TreeEmbedding) -> list[str]:
    """Structural problems of an embedding; empty list means valid."""
    problems: list[str] = []
    if e.height < 0:
        return [f"negative height {e.height}"]
    if e.top_level < 0:
        problems.append(f"negative top level {e.top_level}")
    expected = {a for n in range(e.height + 1) for a in level_nodes(n)}
    if set(e.images) != expected:
        problems.append("domain is not exactly the full tree of the stated height")
        return problems
    for arg in sorted(e.images, key=lenlex_key):
        img = e.images[arg]
        if not is_node(img):
            problems.append(f"image of {format_node(arg)!r} is not a binary string")
            return problems
        if len(arg) == e.height and len(img) != e.top_level:
            problems.append(f"top argument {format_node(arg)!r} maps to level {len(img)}, not {e.top_level}")
        if len(img) > e.top_level:
            problems.append(f"image of {format_node(arg)!r} overshoots the top level")
    for arg in sorted(e.images, key=lenlex_key):
        if len(arg) >= e.height:
            continue
        parent = e.images[arg]
        left, right = e.images[arg + "0"], e.images[arg + "1"]
        if not left.startswith(parent + "0"):
            problems.append(f"image of {format_node(arg + '0')!r} does not extend its parent's 0-side")
        if not right.startswith(parent + "1"):
            problems.append(f"image of {format_node(arg + '1')!r} does not extend its parent's 1-side")
    return problems


def validate_embedding(e: TreeEmbedding) -> TreeEmbedding:
    problems = embedding_problems(e)
    if problems:
        raise EmbeddingInvalidError(f"invalid embedding: {problems[0]}", tuple(problems))
    return e


def embed_closure(e: TreeEmbedding, depth: int) -> LevelTree:
    """Downward closure of the embedding's top images inside 2^{<depth}.

    The result is a valid tree with exactly 2^height branches whose meets
    realise the embedding's split nodes.
    """
    check_depth(depth)
    validate_embedding(e)
    if e.top_level != depth - 1:
        raise ShapeError(f"embedding tops sit at level {e.top_level}, tree wants {depth - 1}")
    return LevelTree.from_branch_set(depth, e.top_images())


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


def tree_to_text(tree: LevelTree) -> str:
    """Serialise a tree: header line, then one node per line in length-lex order."""
    lines = [f"tree v1 depth={tree.depth}"]
    lines.extend(format_node(s) for s in tree.all_nodes())
    return "\n".join(lines) + "\n"


def _parse_header(line: str, kind: str, field: str) -> int:
    parts = line.split()
    if len(parts) != 3 or parts[0] != kind or parts[1] != "v1" or not parts[2].startswith(field + "="):
        raise ParseError(f"expected header '{kind} v1 {field}=<n>', got {line!r}", 1)
    try:
        return int(parts[2][len(field) + 1 :])
    except ValueError:
        raise ParseError(f"bad {field} in header: {line!r}", 1) from None


def tree_from_text(text: str) -> LevelTree:
    """Parse and validate a tree; malformed lines and invalid trees are rejected."""
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty input", 1)
    depth = _parse_header(lines[0], "tree", "depth")
    if not 1 <= depth <= D_MAX:
        raise ParseError(f"depth {depth} outside [1, {D_MAX}]", 1)
    levels: list[set[str]] = [set() for _ in range(depth)]
    for i, raw in enumerate(lines[1:], start=2):
        stripped = raw.strip()
        if not stripped:
            continue
        try:
            node = parse_node(stripped)
        except ValueError:
            raise ParseError(f"not a node: {stripped!r}", i) from None
        if len(node) >= depth:
            raise ParseError(f"node {stripped!r} too long for depth {depth}", i)
        levels[len(node)].add(node)
    tree = LevelTree(depth, tuple(frozenset(level) for level in levels))
    report = validate(tree)
    if not report.ok:
        first = report.violations[0]
        raise ParseError(
            f"tree invalid: rule {first.rule!r} at node {format_node(first.node)!r} (level {first.level})",
            1,
        )
    return tree
