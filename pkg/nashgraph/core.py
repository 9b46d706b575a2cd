"""
Capacitated graph basics: construction, normalization, the X/Y/Z partition
and the two validators (Nash subgraph, D-set).

The D-set test is a feasibility question for a flow with lower bounds:

    source -> x      lower = upper = min(d(x), kappa(x))   for x in S
    x -> p           capacity 1                            for xp in E, p outside S
    p -> sink        lower 1, upper |N(p) & S|
    sink -> source   unbounded

Lower bounds are removed with the usual circulation transform and checked
with networkx.maximum_flow between a super source and a super sink. The
same network, with open vertices as optional senders and receivers, checks
partial D/P labellings for the pruned enumerator.
"""
import logging
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

import networkx as nx

from nashgraph.errors import PreconditionError
from nashgraph.models import CapacitatedGraph, Edge, NashSubgraph, XYZPartition

logger = logging.getLogger(__name__)


def from_edges(n: int, edges: Iterable[Sequence[int]], kappa: Sequence[int]) -> CapacitatedGraph:
    """
    Build a graph from an edge list.

    Args:
        n: Number of vertices (ids 0..n-1)
        edges: Pairs (u, v), any orientation
        kappa: Capacity per vertex

    Returns:
        CapacitatedGraph with sorted adjacency

    Raises:
        PreconditionError: On self-loops, repeated edges or out-of-range ids
    """
    rows: List[Set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise PreconditionError(f"edge {u}-{v} references a vertex outside 0..{n - 1}")
        if u == v:
            raise PreconditionError(f"self-loop at vertex {u}")
        if v in rows[u]:
            raise PreconditionError(f"repeated edge {u}-{v}")
        rows[u].add(v)
        rows[v].add(u)
    return CapacitatedGraph(
        vertex_count=n,
        adjacency=tuple(tuple(sorted(row)) for row in rows),
        kappa=tuple(kappa),
    )


def from_networkx(graph: nx.Graph, kappa: Union[Mapping, str, None] = 'kappa') -> CapacitatedGraph:
    """
    Convert a networkx graph, relabelling nodes to 0..n-1 in sorted order.

    `kappa` is either a mapping node -> capacity or the name of a node
    attribute (missing attributes count as 0).
    """
    if graph.is_directed() or graph.is_multigraph():
        raise PreconditionError("only simple undirected graphs are supported")
    nodes = sorted(graph.nodes())
    index = {node: i for i, node in enumerate(nodes)}
    if isinstance(kappa, Mapping):
        capacities = [int(kappa[node]) for node in nodes]
    else:
        capacities = [int(graph.nodes[node].get(kappa, 0)) for node in nodes]
    edges = [(index[a], index[b]) for a, b in graph.edges()]
    return from_edges(len(nodes), edges, capacities)


def to_networkx(g: CapacitatedGraph) -> nx.Graph:
    graph = nx.Graph()
    for v in g.vertices():
        graph.add_node(v, kappa=g.kappa[v])
    graph.add_edges_from(g.edges())
    return graph


def kappa_targets(g: CapacitatedGraph) -> Tuple[int, ...]:
    """min(d(v), kappa(v)) for every vertex."""
    return tuple(g.target(v) for v in g.vertices())


def is_normalized(g: CapacitatedGraph) -> bool:
    for v in g.vertices():
        if g.kappa[v] > g.degree(v):
            return False
        if g.kappa[v] == 0 and any(g.kappa[u] == 0 for u in g.neighbors(v)):
            return False
    return True


def normalize(g: CapacitatedGraph) -> CapacitatedGraph:
    """
    Drop every edge between two capacity-0 vertices, then cap each capacity
    at the remaining degree. The result accepts exactly the same Nash
    subgraphs as the input.
    """
    adjacency = tuple(
        tuple(u for u in g.neighbors(v) if g.kappa[v] > 0 or g.kappa[u] > 0)
        for v in g.vertices()
    )
    kappa = tuple(min(g.kappa[v], len(adjacency[v])) for v in g.vertices())
    return CapacitatedGraph(vertex_count=g.vertex_count, adjacency=adjacency, kappa=kappa)


def partition_xyz(g: CapacitatedGraph) -> XYZPartition:
    """
    Split V into X = {kappa = d}, Y = N(X) minus X, and Z = the rest.

    Raises:
        PreconditionError: If g is not normalized
    """
    if not is_normalized(g):
        raise PreconditionError("partition_xyz needs a normalized graph (call normalize first)")
    x_set = {v for v in g.vertices() if g.kappa[v] == g.degree(v)}
    y_set = {u for v in x_set for u in g.neighbors(v)} - x_set
    z_set = set(g.vertices()) - x_set - y_set
    return XYZPartition(x_set=frozenset(x_set), y_set=frozenset(y_set), z_set=frozenset(z_set))


def first_internal_edge(g: CapacitatedGraph, vertices: Iterable[int]) -> Optional[Edge]:
    """Lexicographically first edge with both endpoints in `vertices`, or None."""
    members = set(vertices)
    for u in sorted(members):
        for v in g.neighbors(u):
            if v > u and v in members:
                return (u, v)
    return None


def is_independent(g: CapacitatedGraph, vertices: Iterable[int]) -> bool:
    return first_internal_edge(g, vertices) is None


def validate_nash(g: CapacitatedGraph, h: NashSubgraph) -> bool:
    """
    Check the Nash subgraph conditions against g's original capacities.

    - d_set and p_set partition V(g)
    - every edge of h is an edge of g joining d_set and p_set
    - each D vertex has degree min(d(x), kappa(x)) in h
    - no P vertex is isolated in h
    """
    n = g.vertex_count
    if h.d_set & h.p_set:
        logger.debug("Nash check failed: D and P overlap")
        return False
    if (h.d_set | h.p_set) != frozenset(range(n)):
        logger.debug("Nash check failed: D and P do not cover V")
        return False

    degree: Dict[int, int] = {}
    for u, v in h.edges:
        if not g.has_edge(u, v):
            logger.debug(f"Nash check failed: {u}-{v} is not an edge of the graph")
            return False
        if (u in h.d_set) == (v in h.d_set):
            logger.debug(f"Nash check failed: {u}-{v} does not cross D/P")
            return False
        degree[u] = degree.get(u, 0) + 1
        degree[v] = degree.get(v, 0) + 1

    for x in h.d_set:
        if degree.get(x, 0) != g.target(x):
            logger.debug(f"Nash check failed: D vertex {x} has degree {degree.get(x, 0)}, needs {g.target(x)}")
            return False
    for p in h.p_set:
        if degree.get(p, 0) == 0:
            logger.debug(f"Nash check failed: P vertex {p} is isolated")
            return False
    return True


def _passes_prefilters(g: CapacitatedGraph, members: Set[int]) -> bool:
    """Necessary conditions that avoid building a flow network."""
    for v in g.vertices():
        if v in members:
            outside = sum(1 for u in g.neighbors(v) if u not in members)
            if outside < g.target(v):
                return False
        elif not any(u in members and g.target(u) > 0 for u in g.neighbors(v)):
            return False
    return True


def _label_flow(g: CapacitatedGraph, d_labelled: Set[int], p_labelled: Set[int]) -> Optional[Dict]:
    """
    Solve the lower-bound flow for a partial D/P labelling; the flow dict or None.

    Open vertices may act as D vertices sending at most their target to
    P-labelled neighbours, or as P vertices receiving without a lower bound.
    Every completion that is a D-set gives a feasible flow. With no open
    vertex this is the exact D-set test.
    """
    network = nx.DiGraph()
    super_source, super_sink = 'super_source', 'super_sink'
    source, sink = 'source', 'sink'
    network.add_nodes_from((super_source, super_sink, source, sink))

    required = 0
    total_demand = 0
    for x in sorted(d_labelled):
        r = g.target(x)
        if r > 0:
            # source -> x with lower = upper = r becomes pure excess at x
            network.add_edge(super_source, ('d', x), capacity=r)
            required += r
            total_demand += r
        for p in g.neighbors(x):
            if p not in d_labelled:
                network.add_edge(('d', x), ('p', p), capacity=1)

    for v in g.vertices():
        if v in d_labelled:
            continue
        if v in p_labelled:
            in_degree = sum(
                1 for u in g.neighbors(v)
                if u in d_labelled or (u not in p_labelled and g.target(u) > 0)
            )
            # p -> sink with lower 1
            network.add_edge(('p', v), super_sink, capacity=1)
            if in_degree > 1:
                network.add_edge(('p', v), sink, capacity=in_degree - 1)
            total_demand += 1
            continue
        received = sum(1 for u in g.neighbors(v) if u in d_labelled)
        if received:
            network.add_edge(('p', v), sink, capacity=received)
        r = g.target(v)
        senders = [p for p in g.neighbors(v) if p in p_labelled]
        if r > 0 and senders:
            network.add_edge(source, ('o', v), capacity=r)
            for p in senders:
                network.add_edge(('o', v), ('p', p), capacity=1)

    if p_labelled:
        network.add_edge(super_source, sink, capacity=len(p_labelled))
    if required:
        network.add_edge(source, super_sink, capacity=required)
    network.add_edge(sink, source)

    if total_demand == 0:
        return {}
    value, flow = nx.maximum_flow(network, super_source, super_sink)
    if value != total_demand:
        return None
    return flow


def _feasible_flow(g: CapacitatedGraph, members: Set[int]) -> Optional[Dict]:
    """Solve the lower-bound flow; returns the flow dict or None when infeasible."""
    return _label_flow(g, members, set(g.vertices()) - members)


def labels_feasible(g: CapacitatedGraph, d_set: Iterable[int], p_set: Iterable[int]) -> bool:
    """
    False only if no D-set contains `d_set` and avoids `p_set`.

    Vertices in neither set are open. When the two sets cover g the answer
    is exact (same as is_dset).

    Raises:
        PreconditionError: If a vertex is outside g or labelled both D and P
    """
    d_labelled, p_labelled = set(d_set), set(p_set)
    if any(not 0 <= v < g.vertex_count for v in d_labelled | p_labelled):
        raise PreconditionError("labelling references a vertex outside the graph")
    if d_labelled & p_labelled:
        raise PreconditionError(f"vertices labelled both D and P: {sorted(d_labelled & p_labelled)}")
    return _label_flow(g, d_labelled, p_labelled) is not None


def dset_witness(g: CapacitatedGraph, s: Iterable[int]) -> Optional[NashSubgraph]:
    """
    Return a Nash subgraph with D-set `s`, or None if `s` is not a D-set.

    Raises:
        PreconditionError: If `s` names a vertex outside g
    """
    members = set(s)
    if any(not 0 <= v < g.vertex_count for v in members):
        raise PreconditionError("candidate D-set references a vertex outside the graph")
    if not _passes_prefilters(g, members):
        return None
    flow = _feasible_flow(g, members)
    if flow is None:
        return None

    edges = []
    for x in members:
        for target, amount in flow.get(('d', x), {}).items():
            if amount > 0:
                edges.append((x, target[1]))
    return NashSubgraph(
        d_set=frozenset(members),
        p_set=frozenset(g.vertices()) - frozenset(members),
        edges=edges,
    )


def is_dset(g: CapacitatedGraph, s: Iterable[int]) -> bool:
    """True iff some Nash subgraph of g has exactly `s` as its D-set."""
    return dset_witness(g, s) is not None


def forced_set(g: CapacitatedGraph, part: XYZPartition, w_set: Iterable[int]) -> FrozenSet[int]:
    """L(W): vertices of X union Z with more than d(x) - kappa(x) neighbours in W."""
    members = set(w_set)
    return frozenset(
        x for x in part.xz_set
        if sum(1 for u in g.neighbors(x) if u in members) > g.degree(x) - g.kappa[x]
    )
