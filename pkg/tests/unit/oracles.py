"""
Brute-force oracles and hypothesis strategies shared by the unit tests.

The oracles enumerate (D, edge subset) pairs directly and never call the
package's validators, so they are only usable on very small graphs.
"""
import itertools
from typing import Iterator, List, Set, Tuple

import networkx as nx
from hypothesis import strategies as st

from nashgraph.core import from_edges, from_networkx
from nashgraph.models import CapacitatedGraph, CnfFormula


def graph(n: int, edges, kappa) -> CapacitatedGraph:
    if isinstance(kappa, int):
        kappa = [kappa] * n
    return from_edges(n, edges, kappa)


def complete(n: int, k: int) -> CapacitatedGraph:
    return graph(n, itertools.combinations(range(n), 2), k)


def path(n: int, k: int) -> CapacitatedGraph:
    return graph(n, [(i, i + 1) for i in range(n - 1)], k)


def star(leaves: int, centre_kappa: int = 1, leaf_kappa: int = 1) -> CapacitatedGraph:
    """Centre 0, leaves 1..leaves."""
    return graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)], [centre_kappa] + [leaf_kappa] * leaves)


def _is_nash(g: CapacitatedGraph, d_set: Set[int], edges: Tuple[Tuple[int, int], ...]) -> bool:
    degree = [0] * g.vertex_count
    for u, v in edges:
        degree[u] += 1
        degree[v] += 1
    for v in g.vertices():
        if v in d_set:
            if degree[v] != min(g.degree(v), g.kappa[v]):
                return False
        elif degree[v] == 0:
            return False
    return True


def nash_subgraphs(g: CapacitatedGraph) -> Iterator[Tuple[frozenset, frozenset]]:
    """Every (D, E') pair accepted by the definition."""
    for size in range(g.vertex_count + 1):
        for d in itertools.combinations(g.vertices(), size):
            d_set = set(d)
            crossing = [e for e in g.edges() if (e[0] in d_set) != (e[1] in d_set)]
            for r in range(len(crossing) + 1):
                for chosen in itertools.combinations(crossing, r):
                    if _is_nash(g, d_set, chosen):
                        yield frozenset(d_set), frozenset(chosen)


def dsets(g: CapacitatedGraph) -> List[Tuple[int, ...]]:
    return sorted({tuple(sorted(d)) for d, _ in nash_subgraphs(g)})


def nash_count(g: CapacitatedGraph) -> int:
    return sum(1 for _ in nash_subgraphs(g))


@st.composite
def capacitated_graphs(draw, min_vertices: int = 1, max_vertices: int = 6, max_kappa: int = 3):
    """Random graphs from networkx.gnp_random_graph with random capacities."""
    n = draw(st.integers(min_value=min_vertices, max_value=max_vertices))
    p = draw(st.sampled_from([0.1, 0.3, 0.5, 0.8]))
    seed = draw(st.integers(min_value=0, max_value=100_000))
    base = nx.gnp_random_graph(n, p, seed=seed)
    kappa = draw(st.lists(st.integers(min_value=0, max_value=max_kappa), min_size=n, max_size=n))
    return from_networkx(base, dict(enumerate(kappa)))


@st.composite
def bounded_graphs(draw, min_vertices: int = 1, max_vertices: int = 40):
    """Larger random graphs with kappa(v) uniform in [0, d(v)]."""
    n = draw(st.integers(min_value=min_vertices, max_value=max_vertices))
    p = draw(st.sampled_from([0.1, 0.3, 0.5]))
    seed = draw(st.integers(min_value=0, max_value=100_000))
    base = nx.gnp_random_graph(n, p, seed=seed)
    kappa = {v: draw(st.integers(min_value=0, max_value=base.degree(v))) for v in sorted(base.nodes())}
    return from_networkx(base, kappa)


@st.composite
def cnf_formulas(draw, max_variables: int = 6, max_clauses: int = 8):
    """Width-3 CNF whose clauses never repeat a literal (v and -v may share a clause)."""
    n = draw(st.integers(min_value=2, max_value=max_variables))
    literals = [sign * v for v in range(1, n + 1) for sign in (1, -1)]
    clause = st.lists(st.sampled_from(literals), min_size=3, max_size=3, unique=True).map(tuple)
    clauses = draw(st.lists(clause, max_size=max_clauses))
    return CnfFormula(variable_count=n, clauses=tuple(clauses))
