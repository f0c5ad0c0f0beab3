"""Graph moves: splittings, amalgamations, delays, shift, sign gadgets."""

from __future__ import annotations

import random

import pytest

from flowinv.exactla import Ternary, cokernel, det, group_iso, pointed_equivalent
from flowinv.graph import MultiGraph, is_isomorphic, sources, transpose
from flowinv.invariants import bowen_franks_matrix, franks_triple
from flowinv.moves import (
    DrinenVector,
    MoveError,
    Partition,
    apply_move,
    contract,
    elimination_class_map,
    eliminate_source,
    expand,
    expansion_class_map,
    in_amalgamate,
    in_delay,
    in_split,
    is_proper_in_partition,
    minus,
    minus1,
    out_amalgamate,
    out_delay,
    out_split,
    proper_in_partition_vector,
    shift,
    verify_vertex_class_map,
)


def _split_base() -> MultiGraph:
    # v carries a loop a and receives c from w; w receives b from v.
    return MultiGraph(
        ["v", "w"], [(0, 0, "a"), (0, 1, "b"), (1, 0, "c")]
    )


def _singleton_in_partition(g: MultiGraph) -> Partition:
    return Partition.singletons(g, "in")


def _rand_graph(rng: random.Random, max_n: int = 4, max_mult: int = 2) -> MultiGraph:
    n = rng.randint(1, max_n)
    return MultiGraph.from_matrix(
        [[rng.randint(0, max_mult) for _ in range(n)] for _ in range(n)]
    )


def _rand_pis_graph(rng: random.Random, max_n: int = 4) -> MultiGraph:
    from flowinv.graph import classify_graph

    while True:
        g = _rand_graph(rng, max_n)
        r = classify_graph(g)
        if r.purely_infinite_simple and not r.has_sources:
            return g


def _rand_partition(rng: random.Random, g: MultiGraph, mode: str) -> Partition:
    classes = {}
    for v in range(g.n):
        edges = list(g.in_edges(v) if mode == "in" else g.out_edges(v))
        if not edges:
            continue
        rng.shuffle(edges)
        k = rng.randint(1, len(edges))
        cls = [[] for _ in range(k)]
        for i, e in enumerate(edges):
            cls[i % k].append(e.id)
        classes[v] = cls
    return Partition(classes)


def _bf_data(g: MultiGraph):
    group, project = cokernel(bowen_franks_matrix(g))
    return group, det(bowen_franks_matrix(g)), project([1] * g.n)


# ---------------------------------------------------------------------------
# Partitions.


def test_partition_validate_errors():
    g = _split_base()
    with pytest.raises(MoveError):
        Partition({0: [["b"]]}).validate(g, "in")  # b enters w, not v
    with pytest.raises(MoveError):
        Partition({0: [["a", "a"], ["c"]]}).validate(g, "in")
    with pytest.raises(MoveError):
        Partition({0: [["a"]]}).validate(g, "in")  # misses c
    with pytest.raises(MoveError):
        Partition({0: [["a", "c"]]}).validate(g, "in")  # w unlisted but fed
    with pytest.raises(MoveError):
        Partition({9: [["a"]]}).validate(g, "in")
    with pytest.raises(ValueError):
        Partition.trivial(g, "sideways")


def test_partition_helpers():
    g = _split_base()
    triv = Partition.trivial(g, "in")
    triv.validate(g, "in")
    assert triv.m(0) == 1 and triv.m(1) == 1
    single = Partition.singletons(g, "in")
    single.validate(g, "in")
    assert single.m(0) == 2 and single.m(1) == 1


# ---------------------------------------------------------------------------
# Splitting pictures.


def test_in_split_picture():
    g = _split_base()
    res = in_split(g, _singleton_in_partition(g))
    assert res.graph.labels == ("v#1", "v#2", "w#1")
    assert res.graph.incidence().to_lists() == [[1, 0, 1], [1, 0, 1], [0, 1, 0]]
    assert res.blocks == ((0, 1), (2,))


def test_out_split_picture():
    g = _split_base()
    res = out_split(g, Partition.singletons(g, "out"))
    assert res.graph.labels == ("v#1", "v#2", "w#1")
    assert res.graph.incidence().to_lists() == [[1, 1, 0], [0, 0, 1], [1, 1, 0]]


def test_trivial_splittings_change_nothing():
    rng = random.Random(31)
    for _ in range(30):
        g = _rand_graph(rng)
        assert in_split(g, Partition.trivial(g, "in")).graph == g
        assert out_split(g, Partition.trivial(g, "out")).graph == g


def test_in_split_factorization_identities():
    rng = random.Random(32)
    seen_sourcefree = 0
    for _ in range(100):
        g = _rand_graph(rng)
        if not g.edges:
            continue
        p = _rand_partition(rng, g, "in")
        res = in_split(g, p)
        fac = res.factorization
        assert (fac.r @ fac.s) == g.incidence()
        if not sources(g):
            seen_sourcefree += 1
            assert (fac.s @ fac.r) == res.graph.incidence()
    assert seen_sourcefree >= 20


def test_split_class_maps_verify():
    rng = random.Random(33)
    for _ in range(25):
        g = _rand_pis_graph(rng)
        pin = _rand_partition(rng, g, "in")
        res = in_split(g, pin)
        assert verify_vertex_class_map(g, res.graph, res.class_map)
        pout = _rand_partition(rng, g, "out")
        res2 = out_split(g, pout)
        assert verify_vertex_class_map(g, res2.graph, res2.class_map)


def test_split_duality_via_transpose():
    rng = random.Random(34)
    for _ in range(50):
        g = _rand_graph(rng)
        p = _rand_partition(rng, g, "out")
        lhs = out_split(g, p).graph
        rhs = transpose(in_split(transpose(g), p).graph)
        assert lhs == rhs


def test_split_labels_stay_distinct_under_collisions():
    g = MultiGraph(["v0", "v0#1"], [(0, 0, "a"), (0, 1, "b"), (1, 0, "c")])
    res = in_split(g, Partition.singletons(g, "in"))
    assert len(set(res.graph.labels)) == res.graph.n


# ---------------------------------------------------------------------------
# Amalgamations.


def test_in_amalgamate_inverts_in_split():
    rng = random.Random(35)
    for _ in range(50):
        g = _rand_graph(rng)
        p = _rand_partition(rng, g, "in")
        res = in_split(g, p)
        assert in_amalgamate(res.graph, res.blocks) == g


def test_out_amalgamate_inverts_out_split():
    rng = random.Random(36)
    for _ in range(50):
        g = _rand_graph(rng)
        p = _rand_partition(rng, g, "out")
        res = out_split(g, p)
        assert out_amalgamate(res.graph, res.blocks) == g


def test_amalgamate_recovers_stripped_labels():
    g = _split_base()
    res = in_split(g, _singleton_in_partition(g))
    merged = in_amalgamate(res.graph, [["v#1", "v#2"], ["w#1"]])
    assert merged.labels == ("v", "w")
    assert merged == g


def test_in_amalgamate_rejects_mismatched_rows():
    g = MultiGraph.from_matrix([[1, 1], [1, 0]])
    with pytest.raises(MoveError) as exc:
        in_amalgamate(g, [[0, 1]])
    assert "different outgoing rows" in str(exc.value)


def test_out_amalgamate_rejects_mismatched_columns():
    g = MultiGraph.from_matrix([[1, 1], [1, 0]])
    with pytest.raises(MoveError) as exc:
        out_amalgamate(g, [[0, 1]])
    assert "different incoming columns" in str(exc.value)


def test_amalgamate_rejects_unfed_member():
    # Rows match (both zero), but vertex 2 has no incoming edges, so its
    # recovered partition class would be empty.
    g = MultiGraph.from_matrix([[0, 1, 0], [0, 0, 0], [0, 0, 0]])
    with pytest.raises(MoveError) as exc:
        in_amalgamate(g, [[0], [1, 2]])
    assert "no incoming edges" in str(exc.value)
    h = transpose(g)
    with pytest.raises(MoveError) as exc:
        out_amalgamate(h, [[0], [1, 2]])
    assert "no outgoing edges" in str(exc.value)


def test_amalgamate_rejects_bad_blocks():
    g = MultiGraph.from_matrix([[1, 1], [1, 1]])
    with pytest.raises(MoveError):
        in_amalgamate(g, [[0]])
    with pytest.raises(MoveError):
        in_amalgamate(g, [[0, 1], [1]])


# ---------------------------------------------------------------------------
# Source elimination, expansion, contraction.


def test_eliminate_source_picture():
    g = MultiGraph.from_matrix([[0, 0, 1], [0, 0, 1], [0, 1, 0]], labels=["v", "p1", "p2"])
    out = eliminate_source(g, "v")
    assert out.labels == ("p1", "p2")
    assert out.incidence().to_lists() == [[0, 1], [1, 0]]


def test_eliminate_source_errors():
    g = MultiGraph.from_matrix([[1, 1], [0, 0]])
    with pytest.raises(MoveError):
        eliminate_source(g, 0)  # has a loop, not a source
    with pytest.raises(MoveError):
        eliminate_source(MultiGraph.from_matrix([[0]]), 0)


def test_expand_picture():
    g = MultiGraph.from_matrix([[1, 0, 1], [1, 0, 0], [0, 1, 0]])
    out = expand(g, 0)
    assert out.labels == ("v0", "v1", "v2", "v0*")
    assert out.incidence().to_lists() == [
        [0, 0, 0, 1],
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [1, 0, 1, 0],
    ]


def test_expand_of_a_point():
    out = expand(MultiGraph.from_matrix([[0]]), 0)
    assert out.incidence().to_lists() == [[0, 1], [0, 0]]


def test_contract_inverts_expand():
    rng = random.Random(37)
    for _ in range(40):
        g = _rand_graph(rng)
        v = rng.randrange(g.n)
        assert contract(expand(g, v), v, g.n) == g


def test_contract_errors():
    g = MultiGraph.from_matrix([[0, 2], [1, 0]])
    with pytest.raises(MoveError):
        contract(g, 0, 0)
    with pytest.raises(MoveError):
        contract(g, 0, 1)  # two outgoing edges at v0
    k = MultiGraph.from_matrix([[0, 1], [1, 1]])
    with pytest.raises(MoveError):
        contract(k, 0, 1)  # the bridge exists but v1 has in-degree 2
    h = MultiGraph.from_matrix([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    with pytest.raises(MoveError):
        contract(h, 0, 2)  # v0's edge points at v1, not v2


# ---------------------------------------------------------------------------
# Delays.


def test_zero_delay_is_identity():
    rng = random.Random(38)
    for _ in range(20):
        g = _rand_graph(rng)
        assert out_delay(g, DrinenVector.from_edges(g, "source")) == g
        assert in_delay(g, DrinenVector.from_edges(g, "range")) == g


def test_out_delay_chain_picture():
    g = MultiGraph(["v", "w"], [(0, 1, "a"), (1, 0, "b")])
    d = DrinenVector.from_edges(g, "source", {"a": 2})
    out = out_delay(g, d)
    assert out.labels == ("v", "v^1", "v^2", "w")
    assert out.incidence().to_lists() == [
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [1, 0, 0, 0],
    ]


def test_out_delay_of_expansion_vector_is_expansion():
    rng = random.Random(39)
    for _ in range(30):
        g = _rand_graph(rng)
        v = rng.randrange(g.n)
        assert is_isomorphic(
            out_delay(g, DrinenVector.expansion_at(g, v)), expand(g, v)
        )


def test_delay_duality_via_transpose():
    rng = random.Random(40)
    for _ in range(50):
        g = _rand_graph(rng)
        edges = {e.id: rng.randint(0, 2) for e in g.edges}
        lhs = in_delay(g, DrinenVector.from_edges(g, "range", edges))
        gt = transpose(g)
        rhs = transpose(out_delay(gt, DrinenVector.from_edges(gt, "source", edges)))
        assert lhs == rhs


def test_delay_validation_errors():
    g = MultiGraph(["v", "w"], [(0, 1, "a"), (1, 0, "b")])
    with pytest.raises(MoveError):
        out_delay(g, DrinenVector("range"))
    with pytest.raises(MoveError):
        in_delay(g, DrinenVector("source"))
    with pytest.raises(MoveError):
        DrinenVector("source", edges={"zz": 1}).validate(g)
    with pytest.raises(MoveError):
        DrinenVector("source", edges={"a": -1}).validate(g)
    with pytest.raises(MoveError):
        # vertex value 0 but max outgoing edge delay 2 violates the max rule
        DrinenVector("source", edges={"a": 2}).validate(g)
    with pytest.raises(ValueError):
        DrinenVector("diagonal")


def test_proper_in_partition_vector_matches_split_invariants():
    rng = random.Random(41)
    for _ in range(25):
        g = _rand_pis_graph(rng)
        p = _rand_partition(rng, g, "in")
        assert is_proper_in_partition(g, p)  # no sinks, so always proper
        delayed = in_delay(g, proper_in_partition_vector(g, p))
        split = in_split(g, p).graph
        sg, sd, _ = _bf_data(split)
        dg, dd, _ = _bf_data(delayed)
        assert sd == dd
        assert group_iso(sg, dg)


def test_improper_partition_detected():
    # splitting the incoming edges of a sink is not proper
    g = MultiGraph(["v", "s"], [(0, 0, "a"), (0, 1, "b"), (0, 1, "c")])
    p = Partition({0: [["a"]], 1: [["b"], ["c"]]})
    p.validate(g, "in")
    assert not is_proper_in_partition(g, p)
    assert is_proper_in_partition(g, Partition({0: [["a"]], 1: [["b", "c"]]}))


# ---------------------------------------------------------------------------
# Shift.


def test_shift_picture():
    g = MultiGraph.from_matrix([[2, 1], [1, 1]])
    out = shift(g, 0, 1)
    assert out.incidence().to_lists() == [[1, 1], [1, 1]]


def test_shift_preserves_bowen_franks_data():
    rng = random.Random(42)
    found = 0
    while found < 30:
        g = _rand_graph(rng, max_n=4, max_mult=3)
        m = g.incidence().to_lists()
        pairs = [
            (v, w)
            for v in range(g.n)
            for w in range(g.n)
            if v != w
            and g.out_degree(v) > 0
            and g.out_degree(w) > 0
            and all(m[v][j] >= m[w][j] for j in range(g.n))
        ]
        if not pairs:
            continue
        found += 1
        v, w = rng.choice(pairs)
        out = shift(g, v, w)
        ga, da, ua = _bf_data(g)
        gb, db, ub = _bf_data(out)
        assert da == db
        assert group_iso(ga, gb)
        ta, tb = franks_triple(g), franks_triple(out)
        assert pointed_equivalent(ta.pointed, tb.pointed) is Ternary.YES


def test_shift_errors():
    g = MultiGraph.from_matrix([[2, 1], [1, 1]])
    with pytest.raises(MoveError):
        shift(g, 0, 0)
    with pytest.raises(MoveError) as exc:
        shift(g, 1, 0)
    assert "does not dominate" in str(exc.value)
    h = MultiGraph.from_matrix([[1, 1], [0, 0]])
    with pytest.raises(MoveError):
        shift(h, 0, 1)  # w is a sink


# ---------------------------------------------------------------------------
# Sign gadgets.


def test_minus_gadget_picture():
    g = MultiGraph.from_matrix([[1, 1], [1, 1]])
    out = minus(g)
    assert out.labels == ("v0", "v1", "w0", "w1")
    assert out.incidence().to_lists() == [
        [1, 1, 0, 0],
        [1, 1, 1, 0],
        [0, 1, 1, 1],
        [0, 0, 1, 1],
    ]


def test_minus_flips_det_and_keeps_group():
    rng = random.Random(43)
    for _ in range(30):
        g = _rand_pis_graph(rng)
        ga, da, _ = _bf_data(g)
        gb, db, _ = _bf_data(minus(g))
        assert db == -da
        assert group_iso(ga, gb)


def test_minus1_flips_det_and_keeps_pointed_pair():
    rng = random.Random(44)
    for _ in range(30):
        g = _rand_pis_graph(rng)
        out = minus1(g)
        assert len(sources(out)) == len(sources(g)) + 1
        ta, tb = franks_triple(g), franks_triple(out)
        assert tb.determinant == -ta.determinant
        assert pointed_equivalent(ta.pointed, tb.pointed) is Ternary.YES


def test_minus1_eliminates_to_minus():
    g = MultiGraph.from_matrix([[1, 1], [1, 1]])
    bigger = minus1(g, 1)
    assert sources(bigger) == [bigger.vertex("w2")]
    assert eliminate_source(bigger, "w2") == minus(g, 1)


def test_gadget_attachment_errors():
    line = MultiGraph.from_matrix([[0, 1], [0, 0]])
    with pytest.raises(MoveError):
        minus(line)  # no cycle anywhere
    g = MultiGraph.from_matrix([[1, 1], [0, 0]])
    with pytest.raises(MoveError):
        minus(g, 1)  # vertex 1 is not on a cycle


# ---------------------------------------------------------------------------
# Vertex class maps.


def test_elimination_class_map_verifies():
    g = MultiGraph.from_matrix([[0, 0, 1], [0, 0, 1], [0, 1, 0]])
    small = eliminate_source(g, 0)
    assert verify_vertex_class_map(small, g, elimination_class_map(g, 0))


def test_expansion_class_map_verifies():
    rng = random.Random(45)
    for _ in range(20):
        g = _rand_pis_graph(rng)
        v = rng.randrange(g.n)
        assert verify_vertex_class_map(g, expand(g, v), expansion_class_map(g, v))


def test_verify_rejects_zero_map():
    from flowinv.moves import VertexClassMap

    g = MultiGraph.from_matrix([[4]])  # cokernel Z/3, nontrivial
    cmap = VertexClassMap(((0,),))
    assert not verify_vertex_class_map(g, g, cmap)


def test_verify_rejects_bad_shape():
    from flowinv.moves import VertexClassMap

    g = MultiGraph.from_matrix([[4]])
    with pytest.raises(ValueError):
        verify_vertex_class_map(g, g, VertexClassMap(((1, 0),)))


# ---------------------------------------------------------------------------
# Uniform dispatch.


def test_apply_move_each_kind():
    g = MultiGraph.from_matrix([[1, 1], [1, 1]])
    assert apply_move(g, "expand", {"vertex": "v0"}) == expand(g, 0)
    assert apply_move(expand(g, 0), "contract", {"vertex": "v0", "star": "v0*"}) == g
    p = Partition.singletons(g, "in")
    split = apply_move(g, "in-split", {"partition": p})
    assert split == in_split(g, p).graph
    blocks = [["v0#1", "v0#2"], ["v1#1", "v1#2"]]
    assert apply_move(split, "in-amalgamate", {"blocks": blocks}) == g
    q = Partition.singletons(g, "out")
    osplit = apply_move(g, "out-split", {"partition": q})
    assert apply_move(osplit, "out-amalgamate", {"blocks": blocks}) == g
    d = DrinenVector.from_edges(g, "source", {g.edges[0].id: 1})
    assert apply_move(g, "out-delay", {"vector": d}) == out_delay(g, d)
    r = DrinenVector.from_edges(g, "range", {g.edges[0].id: 1})
    assert apply_move(g, "in-delay", {"vector": r}) == in_delay(g, r)
    assert apply_move(g, "minus", {}) == minus(g)
    assert apply_move(g, "minus1", {"vertex": 0}) == minus1(g, 0)
    two = MultiGraph.from_matrix([[2, 1], [1, 1]])
    assert apply_move(two, "shift", {"v": 0, "w": 1}) == shift(two, 0, 1)
    fed = MultiGraph.from_matrix([[0, 1, 0], [0, 0, 1], [0, 1, 0]])
    assert apply_move(fed, "eliminate", {"vertex": 0}) == eliminate_source(fed, 0)
    with pytest.raises(MoveError):
        apply_move(g, "teleport", {})
