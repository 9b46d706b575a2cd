"""
Constructive existence of Nash subgraphs.

Provides:
- construct_nash: the peel-a-star construction, run iteratively
- construct_nash_seeded: a Nash subgraph with a chosen vertex in D
- canonical_nash: D = X union Z, P = Y when X union Z is independent
- dependent_pair: two subgraphs with different D-sets when X union Z is dependent
- violation_subgraph: a subgraph whose D-set meets Y, from a matchable W

All choices (star centre, deleted edges, top-up edges) go to the lowest id.
"""
import logging
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from nashgraph.core import first_internal_edge, forced_set, is_normalized, partition_xyz
from nashgraph.errors import PreconditionError
from nashgraph.matching import build_aux, max_matching, restrict
from nashgraph.models import CapacitatedGraph, Edge, NashSubgraph, edge_key

logger = logging.getLogger(__name__)


class _Partial:
    """Edge set under construction plus D/P membership and degree counts."""

    def __init__(self):
        self.d_set: Set[int] = set()
        self.p_set: Set[int] = set()
        self.edges: Set[Edge] = set()
        self.degree: Dict[int, int] = {}

    def add_edge(self, u: int, v: int) -> None:
        self.edges.add(edge_key(u, v))
        self.degree[u] = self.degree.get(u, 0) + 1
        self.degree[v] = self.degree.get(v, 0) + 1

    def deg(self, v: int) -> int:
        return self.degree.get(v, 0)

    def top_up(self, g: CapacitatedGraph, vertices: Iterable[int], targets: Dict[int, int],
               into: Set[int]) -> None:
        """Raise each vertex to its target using lowest-id neighbours in `into`."""
        for v in sorted(vertices):
            deficit = targets[v] - self.deg(v)
            if deficit <= 0:
                continue
            candidates = [p for p in g.neighbors(v) if p in into and edge_key(v, p) not in self.edges]
            if len(candidates) < deficit:
                raise RuntimeError(f"vertex {v} needs {deficit} more edges but only {len(candidates)} are available")
            for p in candidates[:deficit]:
                self.add_edge(v, p)

    def freeze(self) -> NashSubgraph:
        return NashSubgraph(d_set=frozenset(self.d_set), p_set=frozenset(self.p_set), edges=self.edges)


def _solve_residual(g: CapacitatedGraph, alive: Iterable[int]) -> _Partial:
    """
    Nash subgraph of g induced on `alive` (capacities from g), built by
    repeatedly peeling a star around a vertex whose degree equals its
    capacity and then topping up deeper D vertices on the way back.
    """
    alive_set = set(alive)
    adjacency: Dict[int, Set[int]] = {v: {u for u in g.neighbors(v) if u in alive_set} for v in alive_set}
    kappa: Dict[int, int] = {v: g.kappa[v] for v in alive_set}
    levels: List[Tuple[int, Tuple[int, ...], Dict[int, int]]] = []

    while alive_set:
        # normalize the residual instance
        for v in alive_set:
            if kappa[v] == 0:
                for u in [u for u in adjacency[v] if kappa[u] == 0]:
                    adjacency[v].discard(u)
                    adjacency[u].discard(v)
        for v in alive_set:
            kappa[v] = min(kappa[v], len(adjacency[v]))

        tight = [v for v in alive_set if kappa[v] == len(adjacency[v])]
        if tight:
            u = min(tight)
        else:
            u = min(alive_set)
            surplus = len(adjacency[u]) - kappa[u]
            for w in sorted(adjacency[u])[:surplus]:
                adjacency[u].discard(w)
                adjacency[w].discard(u)
            logger.debug(f"No tight vertex; dropped {surplus} edges at {u}")

        leaves = tuple(sorted(adjacency[u]))
        levels.append((u, leaves, dict(kappa)))

        for v in (u,) + leaves:
            for w in adjacency[v]:
                if w != u and w not in leaves:
                    adjacency[w].discard(v)
        for v in (u,) + leaves:
            alive_set.discard(v)
            del adjacency[v]
            del kappa[v]

    partial = _Partial()
    for u, leaves, level_kappa in reversed(levels):
        partial.top_up(g, partial.d_set, level_kappa, set(leaves))
        partial.d_set.add(u)
        partial.p_set.update(leaves)
        for leaf in leaves:
            partial.add_edge(u, leaf)

    logger.debug(f"Built Nash subgraph over {len(levels)} stars")
    return partial


def construct_nash(g: CapacitatedGraph) -> NashSubgraph:
    """
    Build a Nash subgraph of any capacitated graph.

    Args:
        g: Graph (need not be normalized)

    Returns:
        A NashSubgraph that passes validate_nash(g, ...)
    """
    return _solve_residual(g, g.vertices()).freeze()


def _require_normalized(g: CapacitatedGraph, operation: str) -> None:
    if not is_normalized(g):
        raise PreconditionError(f"{operation} needs a normalized graph (call normalize first)")


def construct_nash_seeded(g: CapacitatedGraph, u: int, w: Optional[int] = None) -> NashSubgraph:
    """
    Build a Nash subgraph with u in D and every X-neighbour of u in P
    (and w in P when given).

    Args:
        g: Normalized graph
        u: Vertex to place in D
        w: Optional non-X neighbour of u to place in P

    Returns:
        A valid NashSubgraph with the requested memberships

    Raises:
        PreconditionError: If |N(u) & X| > kappa(u), or w is given and
            |N(u) & X| is not < kappa(u) or w is not in N(u) minus X
    """
    _require_normalized(g, "construct_nash_seeded")
    if not 0 <= u < g.vertex_count:
        raise PreconditionError(f"vertex {u} is not in the graph")
    part = partition_xyz(g)
    x_neighbours = [v for v in g.neighbors(u) if v in part.x_set]
    k = g.kappa[u]

    if len(x_neighbours) > k:
        raise PreconditionError(f"|N({u}) & X| = {len(x_neighbours)} exceeds kappa({u}) = {k}")
    chosen = list(x_neighbours)
    if w is not None:
        if not len(x_neighbours) < k:
            raise PreconditionError(f"|N({u}) & X| = {len(x_neighbours)} is not < kappa({u}) = {k}")
        if w not in g.neighbors(u) or w in part.x_set:
            raise PreconditionError(f"vertex {w} is not in N({u}) minus X")
        chosen.append(w)
    for v in g.neighbors(u):
        if len(chosen) >= k:
            break
        if v not in chosen:
            chosen.append(v)
    leaves = set(chosen)

    partial = _solve_residual(g, set(g.vertices()) - leaves - {u})
    targets = {v: g.kappa[v] for v in partial.d_set}
    partial.top_up(g, partial.d_set, targets, leaves)
    partial.d_set.add(u)
    partial.p_set.update(leaves)
    for leaf in sorted(leaves):
        partial.add_edge(u, leaf)
    return partial.freeze()


def canonical_nash(g: CapacitatedGraph) -> Optional[NashSubgraph]:
    """
    The subgraph with D = X union Z and P = Y, or None when X union Z has an
    internal edge. Uses every X-Y edge and the kappa(z) lowest-id edges at
    each z in Z.
    """
    part = partition_xyz(g)
    if first_internal_edge(g, part.xz_set) is not None:
        return None

    edges: List[Edge] = []
    for x in part.x_set:
        edges.extend(edge_key(x, y) for y in g.neighbors(x))
    for z in part.z_set:
        edges.extend(edge_key(z, y) for y in g.neighbors(z)[:g.kappa[z]])
    return NashSubgraph(d_set=part.xz_set, p_set=part.y_set, edges=edges)


def dependent_pair(g: CapacitatedGraph) -> Optional[Tuple[NashSubgraph, NashSubgraph]]:
    """
    Two Nash subgraphs with different D-sets, built from the first edge uv
    inside X union Z; None when X union Z is independent.
    """
    part = partition_xyz(g)
    edge = first_internal_edge(g, part.xz_set)
    if edge is None:
        return None
    u, v = edge
    if u in part.x_set:
        first = construct_nash_seeded(g, u)
        second = construct_nash_seeded(g, v)
    else:
        # both endpoints lie in Z; a Z-Z edge survives normalization only if one capacity is positive
        if g.kappa[v] < 1:
            u, v = v, u
        first = construct_nash_seeded(g, v, w=u)
        second = construct_nash_seeded(g, u)
    logger.debug(f"Edge {edge} inside X union Z gives D-sets {sorted(first.d_set)} and {sorted(second.d_set)}")
    return first, second


def violation_subgraph(g: CapacitatedGraph, w_set: Iterable[int]) -> NashSubgraph:
    """
    Build a Nash subgraph whose D-set contains part of Y.

    If some y in Y has |N(y) & X| <= kappa(y), y is seeded into D directly.
    Otherwise D starts as W and P as L(W): a matching saturating L(W) into
    the copies of W supplies one edge per P vertex, each w is filled up to
    kappa(w) with further L(W) neighbours, the rest of the graph is solved
    on its own and deficient vertices are topped up into L(W).

    Args:
        g: Normalized graph with X union Z independent
        w_set: Nonempty subset of Y with positive capacities such that a
            matching saturating L(W) into W^kappa exists

    Returns:
        A valid NashSubgraph with D different from X union Z

    Raises:
        PreconditionError: When any of the above conditions fails
    """
    _require_normalized(g, "violation_subgraph")
    part = partition_xyz(g)
    if first_internal_edge(g, part.xz_set) is not None:
        raise PreconditionError("violation_subgraph needs X union Z to be independent")

    for y in sorted(part.y_set):
        if sum(1 for v in g.neighbors(y) if v in part.x_set) <= g.kappa[y]:
            logger.debug(f"Vertex {y} has at most kappa({y}) X-neighbours; seeding it into D")
            return construct_nash_seeded(g, y)

    w_members: FrozenSet[int] = frozenset(w_set)
    if not w_members or any(y not in part.y_set or g.kappa[y] == 0 for y in w_members):
        raise PreconditionError("W must be a nonempty subset of Y with positive capacities")
    l_set = forced_set(g, part, w_members)

    aux = build_aux(g, part)
    copies = [c for y in w_members for c in aux.copies_of[y]]
    matching = max_matching(restrict(aux.bip, l_set, copies))
    if len(matching) < len(l_set):
        raise PreconditionError("no matching saturates L(W) into W^kappa")

    partial = _Partial()
    for x, c in sorted(matching):
        partial.add_edge(aux.copy_of[c], x)
    partial.top_up(g, w_members, {y: g.kappa[y] for y in w_members}, set(l_set))

    rest = _solve_residual(g, set(g.vertices()) - w_members - l_set)
    for e in rest.edges:
        partial.add_edge(*e)
    partial.top_up(g, rest.d_set, {v: g.kappa[v] for v in rest.d_set}, set(l_set))

    partial.d_set = set(w_members) | rest.d_set
    partial.p_set = set(l_set) | rest.p_set
    return partial.freeze()
