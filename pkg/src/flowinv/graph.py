"""Finite directed multigraphs: structure, predicates, text format.

Graphs are immutable.  Vertex order is part of a graph's identity, because
incidence matrices (and everything derived from them) depend on it.  Entry
(i, j) of the incidence matrix counts edges from vertex i to vertex j.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from flowinv.exactla import IntMatrix


class GraphError(ValueError):
    """Structural problem with a graph or a graph operation."""


class ParseError(ValueError):
    """Graph text that does not follow the format."""

    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col
        self.message = message


@dataclass(frozen=True)
class Edge:
    source: int
    target: int
    id: str


class MultiGraph:
    """Directed multigraph with ordered vertices and named edges.

    Parallel edges and loops are allowed.  Vertices are 0..n-1 with string
    labels; edges carry unique string ids so that splittings can name the
    copies they create.  The empty graph is rejected.
    """

    __slots__ = ("_labels", "_edges", "_matrix", "_out", "_in", "_canon")

    def __init__(self, vertices, edges=()):
        if isinstance(vertices, int):
            labels = tuple(f"v{i}" for i in range(vertices))
        else:
            labels = tuple(str(x) for x in vertices)
        if not labels:
            raise GraphError("graph must have at least one vertex")
        n = len(labels)

        built = []
        seen_ids = set()
        auto = 0
        for item in edges:
            if isinstance(item, Edge):
                src, tgt, eid = item.source, item.target, item.id
            elif len(item) == 2:
                src, tgt = item
                eid = None
            else:
                src, tgt, eid = item
            if not (0 <= src < n and 0 <= tgt < n):
                raise GraphError(f"edge endpoint out of range: ({src}, {tgt})")
            if eid is None:
                while f"e{auto}" in seen_ids:
                    auto += 1
                eid = f"e{auto}"
                auto += 1
            eid = str(eid)
            if eid in seen_ids:
                raise GraphError(f"duplicate edge id {eid!r}")
            seen_ids.add(eid)
            built.append(Edge(int(src), int(tgt), eid))

        self._labels = labels
        self._edges = tuple(built)
        out = [[] for _ in range(n)]
        inc = [[] for _ in range(n)]
        mat = [[0] * n for _ in range(n)]
        for e in self._edges:
            out[e.source].append(e)
            inc[e.target].append(e)
            mat[e.source][e.target] += 1
        self._out = tuple(tuple(x) for x in out)
        self._in = tuple(tuple(x) for x in inc)
        self._matrix = IntMatrix.from_rows(mat)
        self._canon = None

    @staticmethod
    def from_matrix(rows, labels=None) -> "MultiGraph":
        """Build a graph from a square non-negative incidence matrix."""
        data = [list(r) for r in rows]
        n = len(data)
        if any(len(r) != n for r in data):
            raise GraphError("incidence matrix must be square")
        edges = []
        for i in range(n):
            for j in range(n):
                k = int(data[i][j])
                if k < 0:
                    raise GraphError(f"negative multiplicity at ({i}, {j})")
                edges.extend((i, j) for _ in range(k))
        return MultiGraph(labels if labels is not None else n, edges)

    @property
    def n(self) -> int:
        return len(self._labels)

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    def label(self, v: int) -> str:
        return self._labels[v]

    def vertex(self, name) -> int:
        """Resolve a vertex given as a label or an index (string or int)."""
        if isinstance(name, int):
            if not 0 <= name < self.n:
                raise GraphError(f"vertex index {name} out of range")
            return name
        if name in self._labels:
            return self._labels.index(name)
        if re.fullmatch(r"\d+", name):
            return self.vertex(int(name))
        raise GraphError(f"no vertex named {name!r}")

    def edge_by_id(self, eid: str) -> Edge:
        for e in self._edges:
            if e.id == eid:
                return e
        raise GraphError(f"no edge with id {eid!r}")

    def out_edges(self, v: int) -> tuple[Edge, ...]:
        return self._out[v]

    def in_edges(self, v: int) -> tuple[Edge, ...]:
        return self._in[v]

    def out_degree(self, v: int) -> int:
        return len(self._out[v])

    def in_degree(self, v: int) -> int:
        return len(self._in[v])

    def incidence(self) -> IntMatrix:
        return self._matrix

    def transpose(self) -> "MultiGraph":
        return MultiGraph(
            self._labels,
            [Edge(e.target, e.source, e.id) for e in self._edges],
        )

    def permuted(self, perm) -> "MultiGraph":
        """Relabel vertices: old vertex i becomes position perm[i]."""
        perm = tuple(perm)
        if sorted(perm) != list(range(self.n)):
            raise GraphError("not a permutation")
        labels = [None] * self.n
        for old, new in enumerate(perm):
            labels[new] = self._labels[old]
        edges = [Edge(perm[e.source], perm[e.target], e.id) for e in self._edges]
        return MultiGraph(labels, edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiGraph):
            return NotImplemented
        return self.n == other.n and self._matrix == other._matrix

    def __hash__(self) -> int:
        return hash((self.n, self._matrix.entries))

    def __repr__(self) -> str:
        return f"MultiGraph(n={self.n}, edges={len(self._edges)})"


def incidence_matrix(g: MultiGraph) -> IntMatrix:
    """Incidence matrix: entry (i, j) counts edges from vertex i to j.

    Examples
    --------
    >>> rose = MultiGraph(1, [(0, 0)] * 4)
    >>> incidence_matrix(rose).to_lists()
    [[4]]
    """
    return g.incidence()


def transpose(g: MultiGraph) -> MultiGraph:
    """The graph with every edge reversed; edge ids are kept."""
    return g.transpose()


def sources(g: MultiGraph) -> list[int]:
    """Vertices that receive no edges."""
    return [v for v in range(g.n) if g.in_degree(v) == 0]


def sinks(g: MultiGraph) -> list[int]:
    """Vertices that emit no edges."""
    return [v for v in range(g.n) if g.out_degree(v) == 0]


def strongly_connected_components(g: MultiGraph) -> list[list[int]]:
    """Tarjan's algorithm, iterative; components in discovery order."""
    n = g.n
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    counter = itertools.count()
    components: list[list[int]] = []
    succ = [[e.target for e in g.out_edges(v)] for v in range(n)]

    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = next(counter)
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for i in range(pi, len(succ[v])):
                w = succ[v][i]
                if index[w] is None:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                components.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return components


@dataclass(frozen=True)
class GraphReport:
    """Structural predicates that drive the classification hypotheses."""

    has_sources: bool
    has_sinks: bool
    irreducible: bool
    essential: bool
    trivial: bool
    every_cycle_has_exit: bool
    every_vertex_reaches_cycle_or_sink: bool
    simple_lpa: bool
    purely_infinite_simple: bool

    def to_dict(self) -> dict:
        return {
            "has_sources": self.has_sources,
            "has_sinks": self.has_sinks,
            "irreducible": self.irreducible,
            "essential": self.essential,
            "trivial": self.trivial,
            "every_cycle_has_exit": self.every_cycle_has_exit,
            "every_vertex_reaches_cycle_or_sink": self.every_vertex_reaches_cycle_or_sink,
            "simple_lpa": self.simple_lpa,
            "purely_infinite_simple": self.purely_infinite_simple,
        }


def _has_no_exit_cycle(g: MultiGraph) -> bool:
    """Detect a cycle all of whose vertices have out-degree exactly 1.

    Such a cycle has no exit.  Restricting to out-degree-1 vertices gives a
    partial functional graph; a cycle there is exactly a no-exit cycle, so
    the check is linear in vertices plus edges.
    """
    succ = {}
    for v in range(g.n):
        if g.out_degree(v) == 1:
            succ[v] = g.out_edges(v)[0].target
    state = {v: 0 for v in succ}  # 0 fresh, 1 in progress, 2 done
    for start in succ:
        if state[start]:
            continue
        path = []
        v = start
        while v in succ and state[v] == 0:
            state[v] = 1
            path.append(v)
            v = succ[v]
        if v in succ and state[v] == 1:
            return True
        for w in path:
            state[w] = 2
    return False


def _reaches_all(g: MultiGraph, targets: list[set[int]]) -> bool:
    """Whether every vertex has a path into every one of the target sets."""
    preds = [[] for _ in range(g.n)]
    for e in g.edges:
        preds[e.target].append(e.source)
    for tset in targets:
        seen = set(tset)
        frontier = list(tset)
        while frontier:
            v = frontier.pop()
            for w in preds[v]:
                if w not in seen:
                    seen.add(w)
                    frontier.append(w)
        if len(seen) != g.n:
            return False
    return True


def classify_graph(g: MultiGraph) -> GraphReport:
    """Compute the structural predicate report for a graph.

    ``simple_lpa`` holds when every cycle has an exit and every vertex has a
    path to every cycle and to every sink; adding the existence of a cycle
    gives ``purely_infinite_simple``.
    """
    src = sources(g)
    snk = sinks(g)
    comps = strongly_connected_components(g)
    irreducible = len(comps) == 1

    loops = {v for v in range(g.n) if any(e.target == v for e in g.out_edges(v))}
    cyclic_comps = [
        c for c in comps if len(c) > 1 or c[0] in loops
    ]
    has_cycle = bool(cyclic_comps)

    essential = not src and not snk
    trivial = (
        irreducible
        and all(g.out_degree(v) == 1 for v in range(g.n))
        and all(g.in_degree(v) == 1 for v in range(g.n))
    )

    cycle_exits = not _has_no_exit_cycle(g)
    targets = [set(c) for c in cyclic_comps] + [{v} for v in snk]
    reaches = _reaches_all(g, targets)
    simple = cycle_exits and reaches
    pis = simple and has_cycle

    return GraphReport(
        has_sources=bool(src),
        has_sinks=bool(snk),
        irreducible=irreducible,
        essential=essential,
        trivial=trivial,
        every_cycle_has_exit=cycle_exits,
        every_vertex_reaches_cycle_or_sink=reaches,
        simple_lpa=simple,
        purely_infinite_simple=pis,
    )


# ---------------------------------------------------------------------------
# Isomorphism and canonical forms.

_ISO_LIMIT = 8


def _refinement_cells(g: MultiGraph) -> list[list[int]]:
    """Partition vertices into isomorphism-invariant cells.

    Iterated degree refinement: start from (loop count, sorted out-profile,
    sorted in-profile) and re-color by the multiset of (neighbor color,
    multiplicities) until stable.  Cell order is determined by the invariant
    signatures, so isomorphic graphs refine to matching cell sequences.
    """
    n = g.n
    m = g.incidence().entries

    def rank(sigs):
        order = sorted(set(sigs))
        return [order.index(s) for s in sigs], len(order)

    sigs = [
        (
            m[v][v],
            tuple(sorted(m[v][w] for w in range(n) if w != v)),
            tuple(sorted(m[w][v] for w in range(n) if w != v)),
        )
        for v in range(n)
    ]
    colors, count = rank(sigs)
    while True:
        sigs = [
            (
                colors[v],
                tuple(
                    sorted((colors[w], m[v][w], m[w][v]) for w in range(n) if w != v)
                ),
            )
            for v in range(n)
        ]
        colors, new_count = rank(sigs)
        if new_count == count:
            break
        count = new_count
    cells: dict[int, list[int]] = {}
    for v in range(n):
        cells.setdefault(colors[v], []).append(v)
    return [cells[c] for c in sorted(cells)]


def canonical_permutation(g: MultiGraph) -> tuple[int, ...]:
    """A permutation sending g to its canonical representative.

    Among all orderings that respect the refinement cells, the one whose
    row-major incidence matrix is smallest is chosen; isomorphic graphs end
    up with identical canonical matrices.
    """
    n = g.n
    m = g.incidence().entries
    cells = _refinement_cells(g)
    best = None
    best_order = None
    for parts in itertools.product(*(itertools.permutations(c) for c in cells)):
        order = [v for part in parts for v in part]
        flat = tuple(m[i][j] for i in order for j in order)
        if best is None or flat < best:
            best = flat
            best_order = order
    perm = [0] * n
    for pos, old in enumerate(best_order):
        perm[old] = pos
    return tuple(perm)


def canonical_key(g: MultiGraph):
    """Hashable isomorphism invariant: two graphs get equal keys iff isomorphic."""
    if g._canon is None:
        n = g.n
        m = g.incidence().entries
        perm = canonical_permutation(g)
        order = [0] * n
        for old, pos in enumerate(perm):
            order[pos] = old
        flat = tuple(m[i][j] for i in order for j in order)
        g._canon = (n, flat)
    return g._canon


def is_isomorphic(a: MultiGraph, b: MultiGraph, *, max_vertices: int = _ISO_LIMIT) -> bool:
    """Exact isomorphism test by canonical forms; refuses large graphs."""
    if a.n > max_vertices or b.n > max_vertices:
        raise GraphError(
            f"isomorphism test limited to {max_vertices} vertices"
        )
    if a.n != b.n or len(a.edges) != len(b.edges):
        return False
    return canonical_key(a) == canonical_key(b)


# ---------------------------------------------------------------------------
# Text format.
#
#   # comment
#   matrix n          | edges n
#   <n rows of n ints> | i j k   (k parallel edges from i to j), any number

_TOKEN = re.compile(r"\S+")


def _tokenize(text: str):
    """Significant lines as (line number, [(column, token), ...])."""
    out = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = [(m.start() + 1, m.group()) for m in _TOKEN.finditer(body)]
        if toks:
            out.append((ln, toks))
    return out


def _int_token(ln, col, tok, what):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(ln, col, f"expected {what}, found {tok!r}") from None


def parse_graph(text: str) -> MultiGraph:
    """Parse the graph text format.

    Examples
    --------
    >>> parse_graph("edges 2\\n0 1 1\\n1 0 1\\n").n
    2
    """
    lines = _tokenize(text)
    if not lines:
        raise ParseError(1, 1, "empty input")
    ln, toks = lines[0]
    if len(toks) != 2 or toks[0][1] not in ("matrix", "edges"):
        raise ParseError(ln, toks[0][0], "expected header 'matrix n' or 'edges n'")
    kind = toks[0][1]
    n = _int_token(ln, toks[1][0], toks[1][1], "vertex count")
    if n < 1:
        raise ParseError(ln, toks[1][0], "vertex count must be at least 1")

    body = lines[1:]
    if kind == "matrix":
        if len(body) != n:
            where = body[n][0] if len(body) > n else (body[-1][0] if body else ln)
            raise ParseError(where, 1, f"matrix block needs exactly {n} rows")
        rows = []
        for row_ln, row_toks in body:
            if len(row_toks) != n:
                raise ParseError(row_ln, row_toks[0][0], f"row needs {n} entries")
            row = []
            for col, tok in row_toks:
                val = _int_token(row_ln, col, tok, "multiplicity")
                if val < 0:
                    raise ParseError(row_ln, col, "multiplicity must be non-negative")
                row.append(val)
            rows.append(row)
        return MultiGraph.from_matrix(rows)

    counts: dict[tuple[int, int], int] = {}
    for row_ln, row_toks in body:
        if len(row_toks) != 3:
            raise ParseError(row_ln, row_toks[0][0], "edge line needs 'i j k'")
        (ci, ti), (cj, tj), (ck, tk) = row_toks
        i = _int_token(row_ln, ci, ti, "source vertex")
        j = _int_token(row_ln, cj, tj, "target vertex")
        k = _int_token(row_ln, ck, tk, "multiplicity")
        if not 0 <= i < n:
            raise ParseError(row_ln, ci, f"source {i} out of range 0..{n - 1}")
        if not 0 <= j < n:
            raise ParseError(row_ln, cj, f"target {j} out of range 0..{n - 1}")
        if k < 1:
            raise ParseError(row_ln, ck, "multiplicity must be at least 1")
        counts[(i, j)] = counts.get((i, j), 0) + k
    edges = []
    for (i, j), k in sorted(counts.items()):
        edges.extend((i, j) for _ in range(k))
    return MultiGraph(n, edges)


def format_graph(g: MultiGraph, style: str = "edges") -> str:
    """Render a graph in the text format; parsing the output recovers it."""
    if style == "edges":
        m = g.incidence().entries
        lines = [f"edges {g.n}"]
        for i in range(g.n):
            for j in range(g.n):
                if m[i][j]:
                    lines.append(f"{i} {j} {m[i][j]}")
        return "\n".join(lines) + "\n"
    if style == "matrix":
        lines = [f"matrix {g.n}"]
        for row in g.incidence().entries:
            lines.append(" ".join(str(x) for x in row))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown style {style!r}")
