import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hlbench.errors import (
    EmbeddingInvalidError,
    NotFoundError,
    ParseError,
    RangeError,
    TreeInvalidError,
)
from hlbench.treecore import (
    D_MAX,
    LevelSet,
    LevelTree,
    TreeEmbedding,
    branches,
    check_depth,
    check_node,
    compatible,
    embed_closure,
    embedding_problems,
    extensions,
    format_node,
    is_node,
    lenlex_key,
    level_nodes,
    make_full,
    meet,
    node_index,
    parse_node,
    subtree_at,
    tree_from_text,
    tree_to_text,
    validate,
    validate_embedding,
)

nodes_st = st.text(alphabet="01", max_size=8)


class TestNodeHelpers:
    def test_is_node(self):
        assert is_node("") and is_node("0101")
        assert not is_node("012") and not is_node(5) and not is_node(None)

    def test_check_node_rejects(self):
        with pytest.raises(ValueError):
            check_node("2")

    @given(nodes_st, nodes_st)
    def test_meet_is_longest_common_prefix(self, s, t):
        m = meet(s, t)
        assert s.startswith(m) and t.startswith(m)
        if len(m) < min(len(s), len(t)):
            assert s[len(m)] != t[len(m)]

    @given(nodes_st, nodes_st)
    def test_compatible_iff_prefix(self, s, t):
        assert compatible(s, t) == (s.startswith(t) or t.startswith(s))

    def test_level_nodes_lex(self):
        assert list(level_nodes(0)) == [""]
        assert list(level_nodes(2)) == ["00", "01", "10", "11"]

    @given(st.integers(min_value=0, max_value=6))
    def test_level_count(self, n):
        assert sum(1 for _ in level_nodes(n)) == 1 << n

    def test_node_index(self):
        assert node_index("") == 0
        assert node_index("101") == 5

    @given(nodes_st)
    def test_format_parse_round_trip(self, s):
        assert parse_node(format_node(s)) == s

    def test_root_spelling(self):
        assert format_node("") == "-"
        assert parse_node("-") == ""

    def test_extensions(self):
        assert list(extensions("1", 3)) == ["100", "101", "110", "111"]
        assert list(extensions("01", 2)) == ["01"]

    @given(nodes_st, nodes_st)
    def test_lenlex_total_order(self, s, t):
        if lenlex_key(s) < lenlex_key(t):
            assert len(s) < len(t) or (len(s) == len(t) and s < t)


class TestLevelSet:
    def test_basics(self):
        ls = LevelSet.of([3, 1, 2])
        assert list(ls) == [1, 2, 3]
        assert 2 in ls and 5 not in ls
        assert len(ls) == 3
        assert ls.as_tuple() == (1, 2, 3)

    def test_set_algebra(self):
        a, b = LevelSet.of([1, 2]), LevelSet.of([2, 3])
        assert a.intersection(b).as_tuple() == (2,)
        assert not a.isdisjoint(b)
        assert a.isdisjoint(LevelSet.of([9]))


class TestLevelTree:
    def test_make_full(self):
        tree = make_full(4)
        assert tree.node_count() == 15
        assert validate(tree).ok
        assert list(tree.all_nodes())[:4] == ["", "0", "1", "00"]

    def test_check_depth(self):
        assert check_depth(1) == 1
        for bad in (0, D_MAX + 1):
            with pytest.raises(RangeError):
                check_depth(bad)

    @given(st.sets(st.integers(min_value=0, max_value=15), min_size=1, max_size=6))
    def test_from_branch_set_valid(self, tops):
        branch_nodes = frozenset(format(t, "04b") for t in tops)
        tree = LevelTree.from_branch_set(5, branch_nodes)
        assert validate(tree).ok
        assert branches(tree) == branch_nodes

    def test_validate_rules(self):
        # pruned: "0" has no extension on the top level
        tree = LevelTree(3, (frozenset({""}), frozenset({"0", "1"}), frozenset({"10"})))
        report = validate(tree)
        assert not report.ok and {v.rule for v in report.violations} == {"pruned"}
        # prefix-closed: "11" present without "1"
        tree = LevelTree(3, (frozenset({""}), frozenset({"1"}), frozenset({"01", "11"})))
        assert {v.rule for v in validate(tree).violations} == {"prefix-closed"}
        # root missing
        tree = LevelTree(1, (frozenset(),))
        assert {v.rule for v in validate(tree).violations} == {"root"}
        # node on the wrong level
        tree = LevelTree(2, (frozenset({""}), frozenset({"010"})))
        assert "node-length" in {v.rule for v in validate(tree).violations}
        # shape: levels tuple does not match depth
        tree = LevelTree(3, (frozenset({""}),))
        assert {v.rule for v in validate(tree).violations} == {"shape"}

    def test_branches_requires_valid(self):
        broken = LevelTree(2, (frozenset({""}), frozenset()))
        with pytest.raises(TreeInvalidError):
            branches(broken)

    def test_subtree_at(self):
        tree = make_full(4)
        cone = subtree_at(tree, "10")
        assert cone.depth == 4
        assert sorted(cone.levels[2]) == ["10"]
        assert sorted(cone.levels[3]) == ["100", "101"]
        assert sorted(cone.levels[0]) == [""]
        with pytest.raises(NotFoundError):
            subtree_at(tree, "0000")

    def test_contains_and_level(self):
        tree = make_full(3)
        assert "01" in tree and "010" not in tree
        assert tree.level(1) == frozenset({"0", "1"})


class TestEmbedding:
    def good(self):
        return TreeEmbedding(1, {"": "", "0": "00", "1": "10"}, 2)

    def test_validates(self):
        e = validate_embedding(self.good())
        assert e.image("0") == "00"
        assert e.top_images() == ("00", "10")

    def test_problem_listing(self):
        # leaves on different levels
        e = TreeEmbedding(1, {"": "", "0": "0", "1": "10"}, 2)
        assert embedding_problems(e)
        with pytest.raises(EmbeddingInvalidError):
            validate_embedding(e)
        # split not the meet of its arms
        e = TreeEmbedding(1, {"": "1", "0": "00", "1": "10"}, 2)
        assert embedding_problems(e)
        # order-reversed arms
        e = TreeEmbedding(1, {"": "", "0": "10", "1": "00"}, 2)
        assert embedding_problems(e)
        # missing argument
        e = TreeEmbedding(1, {"": "", "0": "00"}, 2)
        assert embedding_problems(e)

    def test_embed_closure(self):
        tree = embed_closure(self.good(), 3)
        assert validate(tree).ok
        assert tree.levels[2] == frozenset({"00", "10"})
        assert tree.levels[1] == frozenset({"0", "1"})

    def test_embed_closure_wrong_top(self):
        from hlbench.errors import ShapeError

        with pytest.raises(ShapeError):
            embed_closure(self.good(), 4)


class TestTreeText:
    def test_round_trip(self):
        tree = LevelTree.from_branch_set(4, frozenset({"010", "011", "110"}))
        assert tree_from_text(tree_to_text(tree)) == tree

    def test_header_errors(self):
        with pytest.raises(ParseError, match="line 1"):
            tree_from_text("forest v1 depth=3\n-\n")
        with pytest.raises(ParseError, match="line 1"):
            tree_from_text("tree v1 depth=zero\n")
        with pytest.raises(ParseError):
            tree_from_text("")

    def test_body_errors(self):
        with pytest.raises(ParseError, match="line 3"):
            tree_from_text("tree v1 depth=2\n-\n21\n")
        with pytest.raises(ParseError, match="too long"):
            tree_from_text("tree v1 depth=2\n-\n0\n00\n")

    def test_invalid_tree_rejected(self):
        # parses but fails validation (not pruned)
        with pytest.raises(ParseError, match="pruned"):
            tree_from_text("tree v1 depth=3\n-\n0\n1\n10\n")

    @given(st.sets(st.integers(min_value=0, max_value=7), min_size=1))
    @settings(max_examples=30)
    def test_round_trip_random(self, tops):
        tree = LevelTree.from_branch_set(4, frozenset(format(t, "03b") for t in tops))
        assert tree_from_text(tree_to_text(tree)) == tree
