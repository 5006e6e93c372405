import pytest

from logcompass.hierarchy import (
    collapse_node,
    expand_all_leaves,
    expand_node,
    is_refined,
    leaf_count,
    leaf_edges,
    leaf_paths,
    new_hierarchy,
)


def test_base_has_six_leaves():
    h = new_hierarchy()
    assert leaf_count(h) == 6
    assert leaf_paths(h) == [(l,) for l in "abcdef"]


def test_expand_one_node_gives_eleven_leaves():
    h = expand_node(new_hierarchy(), ("a",))
    assert leaf_count(h) == 6 + 6 - 1
    paths = leaf_paths(h)
    assert ("a",) not in paths
    assert all(("a", l) in paths for l in "abcdef")


def test_uniform_expansion_counts():
    h = new_hierarchy()
    depth2 = expand_all_leaves(h)
    depth3 = expand_all_leaves(depth2)
    assert leaf_count(depth2) == 36
    assert leaf_count(depth3) == 216


def test_expand_already_refined_path_fails():
    h = expand_node(new_hierarchy(), ("a",))
    with pytest.raises(ValueError, match="already refined"):
        expand_node(h, ("a",))


def test_expand_under_unrefined_prefix_fails():
    with pytest.raises(ValueError, match="unrefined"):
        expand_node(new_hierarchy(), ("a", "b"))


def test_expand_unknown_label_fails():
    with pytest.raises(ValueError, match="unknown node label"):
        expand_node(new_hierarchy(), ("x",))


def test_collapse_inverts_expand():
    h = new_hierarchy()
    assert collapse_node(expand_node(h, ("b",)), ("b",)) == h
    nested = expand_node(expand_node(h, ("b",)), ("b", "c"))
    assert collapse_node(nested, ("b", "c")) == expand_node(h, ("b",))


def test_collapse_depth2_per_node_restores_base():
    h = expand_all_leaves(new_hierarchy())
    for label in "abcdef":
        h = collapse_node(h, (label,))
    assert h == new_hierarchy()


def test_collapse_on_base_graph_fails():
    with pytest.raises(ValueError, match="not refined"):
        collapse_node(new_hierarchy(), ("a",))


def test_collapse_with_nested_refinements_fails():
    h = expand_node(expand_node(new_hierarchy(), ("a",)), ("a", "c"))
    with pytest.raises(ValueError, match="nested"):
        collapse_node(h, ("a",))


def test_is_refined():
    h = expand_node(new_hierarchy(), ("a",))
    assert is_refined(h, ("a",))
    assert not is_refined(h, ("b",))


def test_leaf_edges_base():
    edges = leaf_edges(new_hierarchy())
    assert set(edges) == {
        (("a",), ("e",)),
        (("a",), ("f",)),
        (("b",), ("d",)),
        (("b",), ("f",)),
        (("c",), ("d",)),
        (("c",), ("e",)),
    }


def test_leaf_edges_boundary_rule_after_one_expansion():
    h = expand_node(new_hierarchy(), ("a",))
    edges = leaf_edges(h)
    # 6 base edges (two rerouted into the child) + 6 child edges
    assert len(edges) == 12
    # external edges of the refined node attach to its same-label child
    assert (("a", "a"), ("e",)) in edges
    assert (("a", "a"), ("f",)) in edges
    # the child carries a complete compass copy
    child_edges = {e for e in edges if e[0][:1] == ("a",) and e[1][:1] == ("a",)}
    assert child_edges == {
        (("a", "a"), ("a", "e")),
        (("a", "a"), ("a", "f")),
        (("a", "b"), ("a", "d")),
        (("a", "b"), ("a", "f")),
        (("a", "c"), ("a", "d")),
        (("a", "c"), ("a", "e")),
    }


def test_leaf_edges_recursive_attachment():
    h = expand_node(expand_node(new_hierarchy(), ("a",)), ("a", "a"))
    edges = leaf_edges(h)
    # base edge a-e now lands on the grandchild with the same label
    assert (("a", "a", "a"), ("e",)) in edges
    assert leaf_count(h) == 16
