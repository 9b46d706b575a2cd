"""
Reduction gadgets from 3-SAT to D-set non-uniqueness.

Provides:
- gadget_k2: capacity 2 everywhere, built from a 3-CNF padded to an even
  number of variables
- gadget_k: capacity k >= 3 everywhere, built from the k-out-of-(k+2)
  widening of a 3-CNF
- claim_b_witness: a second Nash subgraph from a satisfying assignment
- expected_partition / expected_canonical_dset: what the construction says
  partition_xyz and canonical_nash must produce

Vertex ids are allocated in a fixed order: variable chains first, then the
global regions, then one vertex per clause.
"""
import logging
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from nashgraph.cnf import first_unsatisfied_clause, pad_even_variables, widen_to_k_of_k2
from nashgraph.core import from_edges
from nashgraph.errors import PreconditionError
from nashgraph.models import (
    CnfFormula,
    Edge,
    GadgetArtifact,
    NashSubgraph,
    Subdivision,
    VariableChain,
    XYZPartition,
    edge_key,
)

logger = logging.getLogger(__name__)

K2_Z_SIZE = 5
K2_X_STAR_SIZE = 5


class _Allocator:
    """Hands out consecutive vertex ids and records a region label for each."""

    def __init__(self):
        self.region: List[str] = []

    def take(self, label: str, count: int = 1) -> Tuple[int, ...]:
        start = len(self.region)
        self.region.extend([label] * count)
        return tuple(range(start, start + count))

    def one(self, label: str) -> int:
        return self.take(label)[0]


def _reject_repeated_literals(f: CnfFormula) -> None:
    for j, clause in enumerate(f.clauses, start=1):
        if len(set(clause)) != len(clause):
            raise PreconditionError(f"clause {j} repeats a literal; the gadget graph would need parallel edges")


def _literal_vertex(var_vertices: Dict[int, Tuple[int, int]], literal: int) -> int:
    w, wbar = var_vertices[abs(literal)]
    return w if literal > 0 else wbar


def gadget_k2(f: CnfFormula) -> GadgetArtifact:
    """
    Build the capacity-2 gadget of a 3-CNF.

    Per variable pair (2i-1, 2i): for each variable w, wbar, r and five Z
    vertices, then the nine subdivision vertices of the pair's G1 edges
    (four W-W cross edges, the four r-W edges, then r_2i - r_2i+1 with
    r_n+1 = r_1). Then q1, q2, five X* vertices and one vertex per clause.

    Args:
        f: 3-CNF without repeated literals in a clause

    Returns:
        GadgetArtifact with 25n/2 + 7 + m vertices (n, m after padding)
    """
    _reject_repeated_literals(f)
    padded = pad_even_variables(f)
    n, m = padded.variable_count, len(padded.clauses)
    alloc = _Allocator()
    edges: List[Edge] = []
    chains: List[VariableChain] = []
    subdivisions: List[Subdivision] = []
    var_vertices: Dict[int, Tuple[int, int]] = {}
    pair_units: List[Tuple[int, ...]] = []

    for pair in range(n // 2):
        for variable in (2 * pair + 1, 2 * pair + 2):
            w, wbar, r = alloc.one('W'), alloc.one('W'), alloc.one('r')
            z = alloc.take('Z', K2_Z_SIZE)
            var_vertices[variable] = (w, wbar)
            chains.append(VariableChain(variable=variable, w=w, wbar=wbar, r=r, z=z))
        pair_units.append(alloc.take('U', 9))

    by_variable = {chain.variable: chain for chain in chains}
    for pair, units in enumerate(pair_units):
        a, b = by_variable[2 * pair + 1], by_variable[2 * pair + 2]
        following = by_variable[2 * pair + 3] if 2 * pair + 3 <= n else by_variable[1]
        g1_edges = [
            (a.w, b.w), (a.w, b.wbar), (a.wbar, b.w), (a.wbar, b.wbar),
            (a.r, a.w), (a.r, a.wbar), (b.r, b.w), (b.r, b.wbar),
            (b.r, following.r),
        ]
        for (left, right), u in zip(g1_edges, units):
            edges.extend([(left, u), (u, right)])
            subdivisions.append(Subdivision(a=left, b=right, u=u))

    q = alloc.take('Q', 2)
    x_star = alloc.take('X*', K2_X_STAR_SIZE)
    clause_vertices = {j: alloc.one('C') for j in range(1, m + 1)}

    for chain in chains:
        for z in chain.z:
            edges.extend([(z, chain.w), (z, chain.wbar), (z, q[0])])
    edges.extend((qv, x) for qv in q for x in x_star)
    for j, clause in enumerate(padded.clauses, start=1):
        c = clause_vertices[j]
        edges.extend((c, _literal_vertex(var_vertices, literal)) for literal in clause)
        edges.append((c, q[0]))

    vertex_count = len(alloc.region)
    graph = from_edges(vertex_count, edges, [2] * vertex_count)
    logger.debug(f"Built k=2 gadget: {n} variables, {m} clauses, {vertex_count} vertices")
    return GadgetArtifact(
        graph=graph,
        k=2,
        padded_formula=padded,
        var_vertices=var_vertices,
        clause_vertices=clause_vertices,
        region=tuple(alloc.region),
        chains=tuple(chains),
        subdivisions=tuple(subdivisions),
        q=q,
        x_star=x_star,
    )


def gadget_k(f: CnfFormula, k: int) -> GadgetArtifact:
    """
    Build the capacity-k gadget (k >= 3) of a 3-CNF.

    The formula is widened to k-out-of-(k+2) form first. Per variable:
    w, wbar, Z (2k+1), X (k(k-1)/2), Y (k-2), X' (k(k-1)/2). Then y',
    Y* (k-1), X* (k^2+1) and one vertex per clause. Complete bipartite
    joins: Y*-Z_i, Z_i-W_i, W_i-X_i, X_i-Y_i, Y_i-X_i', X_i'-W_i+1
    (wrapping), y'-X*, X*-Y*; each clause vertex joins its k+2 literal
    vertices.

    Raises:
        PreconditionError: If k < 3 (use gadget_k2) or clauses are not width 3
    """
    if k < 3:
        raise PreconditionError(f"gadget_k needs k >= 3, got {k}; use gadget_k2 for k = 2")
    _reject_repeated_literals(f)
    widened = widen_to_k_of_k2(f, k)
    n, m = widened.variable_count, len(widened.clauses)
    half = k * (k - 1) // 2
    alloc = _Allocator()
    chains: List[VariableChain] = []
    var_vertices: Dict[int, Tuple[int, int]] = {}

    for variable in range(1, n + 1):
        w, wbar = alloc.one('W'), alloc.one('W')
        chain = VariableChain(
            variable=variable, w=w, wbar=wbar,
            z=alloc.take('Z', 2 * k + 1),
            x=alloc.take('X', half),
            y=alloc.take('Y', k - 2),
            x_prime=alloc.take("X'", half),
        )
        var_vertices[variable] = (w, wbar)
        chains.append(chain)

    y_prime = alloc.one("y'")
    y_star = alloc.take('Y*', k - 1)
    x_star = alloc.take('X*', k * k + 1)
    clause_vertices = {j: alloc.one('C') for j in range(1, m + 1)}

    edges: List[Edge] = []
    for index, chain in enumerate(chains):
        following = chains[(index + 1) % n]
        pair = (chain.w, chain.wbar)
        edges.extend((s, z) for s in y_star for z in chain.z)
        edges.extend((z, w) for z in chain.z for w in pair)
        edges.extend((w, x) for w in pair for x in chain.x)
        edges.extend((x, y) for x in chain.x for y in chain.y)
        edges.extend((y, x) for y in chain.y for x in chain.x_prime)
        edges.extend((x, w) for x in chain.x_prime for w in (following.w, following.wbar))
    edges.extend((y_prime, x) for x in x_star)
    edges.extend((x, s) for x in x_star for s in y_star)
    for j, clause in enumerate(widened.clauses, start=1):
        c = clause_vertices[j]
        edges.extend((c, _literal_vertex(var_vertices, literal)) for literal in clause)

    vertex_count = len(alloc.region)
    graph = from_edges(vertex_count, edges, [k] * vertex_count)
    logger.debug(f"Built k={k} gadget: {n} variables, {m} clauses, {vertex_count} vertices")
    return GadgetArtifact(
        graph=graph,
        k=k,
        padded_formula=widened,
        var_vertices=var_vertices,
        clause_vertices=clause_vertices,
        region=tuple(alloc.region),
        chains=tuple(chains),
        x_star=x_star,
        y_star=y_star,
        y_prime=y_prime,
    )


def expected_partition(artifact: GadgetArtifact) -> XYZPartition:
    """The X/Y/Z split the construction predicts, read from region labels."""
    if artifact.k == 2:
        x_labels, y_labels, z_labels = ('X*', 'U'), ('Q', 'W', 'r'), ('C', 'Z')
    else:
        x_labels, y_labels, z_labels = ('X*', 'X', "X'"), ("y'", 'Y*', 'W', 'Y'), ('C', 'Z')
    return XYZPartition(
        x_set=artifact.vertices_in(*x_labels),
        y_set=artifact.vertices_in(*y_labels),
        z_set=artifact.vertices_in(*z_labels),
    )


def expected_canonical_dset(artifact: GadgetArtifact) -> FrozenSet[int]:
    """D-set of the subgraph with P = Y: every vertex outside the Y regions."""
    return expected_partition(artifact).xz_set


def _mode(artifact: GadgetArtifact) -> Tuple[str, Optional[int]]:
    return ('exists', None) if artifact.k == 2 else ('k_of_width', artifact.k)


def extend_assignment(artifact: GadgetArtifact, assignment: Sequence[bool]) -> Tuple[bool, ...]:
    """
    Extend an assignment of the original variables to the padded formula.
    Padding and widening variables only ever occur positively, so they are
    set to True.
    """
    total = artifact.padded_formula.variable_count
    if len(assignment) > total:
        raise PreconditionError(f"assignment has {len(assignment)} values; the formula has {total} variables")
    return tuple(bool(v) for v in assignment) + (True,) * (total - len(assignment))


def _true_literal_vertices(artifact: GadgetArtifact, clause: Sequence[int],
                           assignment: Sequence[bool]) -> List[int]:
    return [
        _literal_vertex(artifact.var_vertices, literal)
        for literal in clause
        if assignment[abs(literal) - 1] == (literal > 0)
    ]


def claim_b_witness(artifact: GadgetArtifact, assignment: Sequence[bool]) -> NashSubgraph:
    """
    Build a Nash subgraph whose P-set is not the Y of the construction.

    Args:
        artifact: Output of gadget_k2 or gadget_k
        assignment: Truth values for the padded formula's variables (or a
            prefix of them; the rest default to True)

    Returns:
        NashSubgraph with a D-set different from expected_canonical_dset(artifact)

    Raises:
        PreconditionError: If the assignment does not satisfy the padded
            formula (naming the clause), or the k=2 gadget has no variables
    """
    values = extend_assignment(artifact, assignment)
    mode, k = _mode(artifact)
    failing = first_unsatisfied_clause(artifact.padded_formula, values, mode, k)
    if failing is not None:
        need = 1 if k is None else k
        raise PreconditionError(f"assignment leaves clause {failing} with fewer than {need} true literals")

    if artifact.k == 2:
        if not artifact.chains:
            raise PreconditionError("the k=2 gadget of a formula without variables has a single D-set")
        d_set, edges = _witness_k2(artifact, values)
    else:
        d_set, edges = _witness_k(artifact, values)

    everything = frozenset(artifact.graph.vertices())
    return NashSubgraph(d_set=frozenset(d_set), p_set=everything - frozenset(d_set), edges=edges)


def _sides(chain: VariableChain, value: bool) -> Tuple[int, int]:
    """(false-side vertex, true-side vertex) of a variable."""
    return (chain.wbar, chain.w) if value else (chain.w, chain.wbar)


def _witness_k2(artifact: GadgetArtifact, values: Sequence[bool]) -> Tuple[Set[int], Set[Edge]]:
    unit = {frozenset((s.a, s.b)): s.u for s in artifact.subdivisions}

    def u(a: int, b: int) -> int:
        return unit[frozenset((a, b))]

    q1 = artifact.q[0]
    d_set: Set[int] = set(artifact.x_star) | set(artifact.clause_vertices.values())
    edges: Set[Edge] = {edge_key(x, qv) for x in artifact.x_star for qv in artifact.q}

    for chain in artifact.chains:
        _, true_side = _sides(chain, values[chain.variable - 1])
        for z in chain.z:
            d_set.add(z)
            edges.add(edge_key(z, q1))
            edges.add(edge_key(z, true_side))

    for j, clause in enumerate(artifact.padded_formula.clauses, start=1):
        c = artifact.clause_vertices[j]
        edges.add(edge_key(c, q1))
        edges.add(edge_key(c, _true_literal_vertices(artifact, clause, values)[0]))

    by_variable = {chain.variable: chain for chain in artifact.chains}
    n = artifact.padded_formula.variable_count
    for pair in range(n // 2):
        first, second = by_variable[2 * pair + 1], by_variable[2 * pair + 2]
        following = by_variable[2 * pair + 3] if 2 * pair + 3 <= n else by_variable[1]
        a, a_true = _sides(first, values[first.variable - 1])
        b, b_true = _sides(second, values[second.variable - 1])
        promoted = u(a_true, b_true)
        d_set.update({a, b, first.r, second.r, promoted})
        edges.update({
            edge_key(promoted, a_true), edge_key(promoted, b_true),
            edge_key(first.r, u(first.r, first.w)), edge_key(first.r, u(first.r, first.wbar)),
            edge_key(a, u(a, b)), edge_key(a, u(a, b_true)),
            edge_key(b, u(a_true, b)), edge_key(b, u(b, second.r)),
            edge_key(second.r, u(b_true, second.r)), edge_key(second.r, u(second.r, following.r)),
        })
    return d_set, edges


def _witness_k(artifact: GadgetArtifact, values: Sequence[bool]) -> Tuple[Set[int], Set[Edge]]:
    k = artifact.k
    d_set: Set[int] = set(artifact.x_star) | set(artifact.clause_vertices.values())
    edges: Set[Edge] = {
        edge_key(x, p) for x in artifact.x_star for p in (artifact.y_prime,) + artifact.y_star
    }

    for chain in artifact.chains:
        false_side, true_side = _sides(chain, values[chain.variable - 1])
        d_set.add(false_side)
        d_set.update(chain.z)
        d_set.update(chain.y)
        for z in chain.z:
            edges.add(edge_key(z, true_side))
            edges.update(edge_key(z, s) for s in artifact.y_star)
        edges.update(edge_key(false_side, x) for x in chain.x[:k])
        # remaining X and all of X' are shared round-robin so each Y vertex gets k edges
        targets = chain.x[k:] + chain.x_prime
        for t, x in enumerate(targets):
            edges.add(edge_key(chain.y[t % (k - 2)], x))

    for j, clause in enumerate(artifact.padded_formula.clauses, start=1):
        c = artifact.clause_vertices[j]
        edges.update(edge_key(c, v) for v in _true_literal_vertices(artifact, clause, values)[:k])
    return d_set, edges
