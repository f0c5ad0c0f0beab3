"""Flow-equivalence invariants and moves for finite directed multigraphs.

The package computes the complete flow-equivalence data of a graph — the
Bowen-Franks group coker(I - A^t), the class of the all-ones vector in it
(the unit class), and det(I - A^t) — and uses it to decide when two purely
infinite simple unital Leavitt path algebras are Morita equivalent or
isomorphic.  A catalogue of invariance-preserving graph moves, a verdict
engine, and a bounded move-sequence search round out the toolkit.
"""

from __future__ import annotations

from flowinv.classify import Verdict, decide, decide_transpose
from flowinv.exactla import (
    AbelianGroup,
    CokernelProjection,
    IntMatrix,
    PointedGroup,
    SmithDecomposition,
    Ternary,
    cokernel,
    det,
    group_iso,
    lattice_contains,
    pointed_equivalent,
    smith_normal_form,
)
from flowinv.flowsearch import (
    MoveSequence,
    MoveStep,
    NotFoundWithinBounds,
    SearchStats,
    find_sequence,
    verify_sequence,
)
from flowinv.graph import (
    Edge,
    GraphError,
    GraphReport,
    MultiGraph,
    ParseError,
    canonical_key,
    canonical_permutation,
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
from flowinv.invariants import (
    FranksTriple,
    bowen_franks_matrix,
    equiv_det_pair,
    equiv_triple,
    equiv_unitary_pair,
    franks_triple,
)
from flowinv.moves import (
    DrinenVector,
    MoveError,
    Partition,
    SplitFactorization,
    VertexClassMap,
    apply_move,
    contract,
    eliminate_source,
    elimination_class_map,
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
from flowinv.selftest import run_selftest

__version__ = "0.1.0"

__all__ = [
    "AbelianGroup",
    "CokernelProjection",
    "DrinenVector",
    "Edge",
    "FranksTriple",
    "GraphError",
    "GraphReport",
    "IntMatrix",
    "MoveError",
    "MoveSequence",
    "MoveStep",
    "MultiGraph",
    "NotFoundWithinBounds",
    "ParseError",
    "Partition",
    "PointedGroup",
    "SearchStats",
    "SmithDecomposition",
    "SplitFactorization",
    "Ternary",
    "Verdict",
    "VertexClassMap",
    "apply_move",
    "bowen_franks_matrix",
    "canonical_key",
    "canonical_permutation",
    "classify_graph",
    "cokernel",
    "contract",
    "decide",
    "decide_transpose",
    "det",
    "eliminate_source",
    "elimination_class_map",
    "equiv_det_pair",
    "equiv_triple",
    "equiv_unitary_pair",
    "expand",
    "expansion_class_map",
    "find_sequence",
    "format_graph",
    "franks_triple",
    "group_iso",
    "in_amalgamate",
    "in_delay",
    "in_split",
    "incidence_matrix",
    "is_isomorphic",
    "is_proper_in_partition",
    "lattice_contains",
    "minus",
    "minus1",
    "out_amalgamate",
    "out_delay",
    "out_split",
    "parse_graph",
    "pointed_equivalent",
    "proper_in_partition_vector",
    "run_selftest",
    "shift",
    "sinks",
    "smith_normal_form",
    "sources",
    "strongly_connected_components",
    "transpose",
    "verify_sequence",
    "verify_vertex_class_map",
]
