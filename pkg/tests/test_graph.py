"""Directed multigraphs: structure, classification, text format, isomorphism."""

from __future__ import annotations

import itertools
import random

import pytest

from flowinv.graph import (
    GraphError,
    MultiGraph,
    ParseError,
    canonical_key,
    classify_graph,
    format_graph,
    incidence_matrix,
    is_isomorphic,
    parse_graph,
    sinks,
    sources,
    strongly_connected_components,
    transpose,
)


def _rose(petals: int) -> MultiGraph:
    return MultiGraph.from_matrix([[petals]])


def _rand_graph(rng: random.Random, max_n: int = 4, max_mult: int = 2) -> MultiGraph:
    n = rng.randint(1, max_n)
    return MultiGraph.from_matrix(
        [[rng.randint(0, max_mult) for _ in range(n)] for _ in range(n)]
    )


# ---------------------------------------------------------------------------
# Construction and basic accessors.


def test_construction_from_matrix():
    g = MultiGraph.from_matrix([[1, 2], [0, 1]])
    assert g.n == 2
    assert g.labels == ("v0", "v1")
    assert g.incidence().to_lists() == [[1, 2], [0, 1]]
    assert len(g.edges) == 4
    assert [e.id for e in g.edges] == ["e0", "e1", "e2", "e3"]


def test_construction_with_labels_and_edge_ids():
    g = MultiGraph(["a", "b"], [(0, 1, "x"), (1, 0, "y")])
    assert g.labels == ("a", "b")
    assert g.edge_by_id("x").target == 1
    assert g.out_degree(0) == 1 and g.in_degree(0) == 1


def test_construction_errors():
    with pytest.raises(GraphError):
        MultiGraph([])
    with pytest.raises(GraphError):
        MultiGraph(2, [(0, 5)])
    with pytest.raises(GraphError):
        MultiGraph(2, [(0, 1, "x"), (1, 0, "x")])
    with pytest.raises(GraphError):
        MultiGraph.from_matrix([[1, 2], [0]])
    with pytest.raises(GraphError):
        MultiGraph.from_matrix([[-1]])


def test_vertex_resolution():
    g = MultiGraph(["a", "b", "7"])
    assert g.vertex("a") == 0
    assert g.vertex(1) == 1
    assert g.vertex("7") == 2, "label match beats index match"
    assert g.vertex("2") == 2
    with pytest.raises(GraphError):
        g.vertex("missing")
    with pytest.raises(GraphError):
        g.vertex(3)


def test_equality_ignores_labels_and_edge_ids():
    a = MultiGraph(["x", "y"], [(0, 1, "p")])
    b = MultiGraph(["u", "w"], [(0, 1, "q")])
    c = MultiGraph(["x", "y"], [(1, 0, "p")])
    assert a == b
    assert a != c
    assert hash(a) == hash(b)


def test_permuted_moves_rows_and_columns():
    g = MultiGraph.from_matrix([[0, 2], [1, 0]], labels=["a", "b"])
    h = g.permuted([1, 0])
    assert h.labels == ("b", "a")
    assert h.incidence().to_lists() == [[0, 1], [2, 0]]


# ---------------------------------------------------------------------------
# Incidence, transpose, sources, sinks, components.


def test_incidence_and_transpose():
    g = MultiGraph.from_matrix([[1, 1, 1], [0, 0, 1], [1, 0, 0]])
    assert incidence_matrix(g).to_lists() == [[1, 1, 1], [0, 0, 1], [1, 0, 0]]
    assert incidence_matrix(transpose(g)).to_lists() == [[1, 0, 1], [1, 0, 0], [1, 1, 0]]
    assert transpose(transpose(g)) == g


def test_sources_and_sinks():
    g = MultiGraph.from_matrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert sources(g) == [0]
    assert sinks(g) == [2]
    assert sources(_rose(2)) == [] and sinks(_rose(2)) == []


def test_strongly_connected_components():
    g = MultiGraph.from_matrix([[0, 1, 0], [1, 0, 0], [1, 0, 0]])
    comps = [sorted(c) for c in strongly_connected_components(g)]
    assert sorted(comps) == [[0, 1], [2]]
    assert len(strongly_connected_components(_rose(1))) == 1


# ---------------------------------------------------------------------------
# Classification.


def test_classify_rose_is_purely_infinite_simple():
    r = classify_graph(_rose(4))
    assert r.irreducible and r.essential and not r.trivial
    assert r.every_cycle_has_exit and r.simple_lpa and r.purely_infinite_simple


def test_classify_single_loop_is_trivial():
    r = classify_graph(_rose(1))
    assert r.trivial and r.irreducible and r.essential
    assert not r.every_cycle_has_exit
    assert not r.simple_lpa and not r.purely_infinite_simple


def test_classify_acyclic_line_is_simple_but_not_pis():
    r = classify_graph(MultiGraph.from_matrix([[0, 1], [0, 0]]))
    assert r.has_sources and r.has_sinks and not r.essential
    assert r.every_cycle_has_exit and r.simple_lpa
    assert not r.purely_infinite_simple


def test_classify_cycle_with_unreachable_sink():
    # The sink cannot reach the cycle, so the algebra is not simple.
    g = MultiGraph.from_matrix([[1, 1], [0, 0]])
    r = classify_graph(g)
    assert r.has_sinks and not r.every_vertex_reaches_cycle_or_sink
    assert not r.simple_lpa


def test_classify_report_dict_keys():
    d = classify_graph(_rose(2)).to_dict()
    assert list(d) == [
        "has_sources",
        "has_sinks",
        "irreducible",
        "essential",
        "trivial",
        "every_cycle_has_exit",
        "every_vertex_reaches_cycle_or_sink",
        "simple_lpa",
        "purely_infinite_simple",
    ]


def test_pis_without_sources_equals_irreducible_essential_nontrivial():
    # Exhaustive check over all incidence matrices with n <= 3, entries <= 2
    # (entries <= 1 at n = 3 to keep the census fast).
    for n, max_mult in [(1, 2), (2, 2), (3, 1)]:
        cells = n * n
        for combo in itertools.product(range(max_mult + 1), repeat=cells):
            rows = [list(combo[i * n : (i + 1) * n]) for i in range(n)]
            r = classify_graph(MultiGraph.from_matrix(rows))
            lhs = r.purely_infinite_simple and not r.has_sources
            rhs = r.irreducible and r.essential and not r.trivial
            assert lhs == rhs, rows


def test_classification_is_relabel_invariant():
    rng = random.Random(21)
    for _ in range(50):
        g = _rand_graph(rng)
        perm = list(range(g.n))
        rng.shuffle(perm)
        assert classify_graph(g.permuted(perm)) == classify_graph(g)


# ---------------------------------------------------------------------------
# Text format.


def test_parse_edges_format():
    g = parse_graph("edges 2\n0 0 1\n0 1 1\n1 0 3\n1 1 2\n")
    assert g.incidence().to_lists() == [[1, 1], [3, 2]]


def test_parse_matrix_format_with_comments():
    text = "# a comment\nmatrix 2 # header\n1 1\n3 2\n"
    assert parse_graph(text).incidence().to_lists() == [[1, 1], [3, 2]]


def test_parse_repeated_edge_lines_accumulate():
    g = parse_graph("edges 1\n0 0 1\n0 0 2\n")
    assert g.incidence().to_lists() == [[3]]


def test_format_round_trips_bit_exactly():
    rng = random.Random(22)
    for _ in range(50):
        g = _rand_graph(rng)
        for style in ("edges", "matrix"):
            text = format_graph(g, style)
            assert text.endswith("\n")
            assert parse_graph(text) == g
            assert format_graph(parse_graph(text), style) == text


def test_format_rejects_unknown_style():
    with pytest.raises(ValueError):
        format_graph(_rose(1), "dot")


def test_parse_error_positions():
    with pytest.raises(ParseError) as exc:
        parse_graph("")
    assert exc.value.line == 1 and exc.value.col == 1

    with pytest.raises(ParseError) as exc:
        parse_graph("triangle 2\n")
    assert exc.value.line == 1

    with pytest.raises(ParseError) as exc:
        parse_graph("edges 2\n0 9 1\n")
    assert exc.value.line == 2 and "out of range" in exc.value.message

    with pytest.raises(ParseError) as exc:
        parse_graph("matrix 2\n1 1\n")
    assert "2 rows" in str(exc.value)

    with pytest.raises(ParseError) as exc:
        parse_graph("matrix 1\nx\n")
    assert exc.value.line == 2 and exc.value.col == 1

    with pytest.raises(ParseError) as exc:
        parse_graph("edges 1\n0 0 0\n")
    assert "at least 1" in exc.value.message


# ---------------------------------------------------------------------------
# Isomorphism and canonical keys.


def test_is_isomorphic_examples():
    a = MultiGraph.from_matrix([[0, 2], [1, 0]])
    b = MultiGraph.from_matrix([[0, 1], [2, 0]])
    assert is_isomorphic(a, b)
    assert not is_isomorphic(a, MultiGraph.from_matrix([[0, 2], [2, 0]]))
    assert not is_isomorphic(a, _rose(1))


def test_is_isomorphic_respects_vertex_budget():
    g = MultiGraph.from_matrix([[1] * 9 for _ in range(9)])
    with pytest.raises(GraphError):
        is_isomorphic(g, g)
    assert is_isomorphic(g, g, max_vertices=9)


def test_canonical_key_is_permutation_invariant():
    rng = random.Random(23)
    for _ in range(50):
        g = _rand_graph(rng)
        perm = list(range(g.n))
        rng.shuffle(perm)
        assert canonical_key(g.permuted(perm)) == canonical_key(g)


def test_canonical_key_separates_non_isomorphic_pairs():
    a = MultiGraph.from_matrix([[1, 1], [1, 0]])
    b = MultiGraph.from_matrix([[1, 1], [1, 1]])
    assert canonical_key(a) != canonical_key(b)


def test_canonical_key_agrees_with_isomorphism():
    rng = random.Random(24)
    for _ in range(50):
        a = _rand_graph(rng, max_n=3)
        b = _rand_graph(rng, max_n=3)
        assert (canonical_key(a) == canonical_key(b)) == is_isomorphic(a, b)
