"""
Pydantic models for capacitated graphs, Nash subgraphs and gadget artifacts.

Implements strict validation:
- Graphs: dense ids, sorted symmetric adjacency, no loops or parallel edges
- Nash subgraphs: edges stored as (low, high) pairs
- CNF formulas: nonzero literals within the declared variable range

Note: Using Pydantic v2 with v1 compatibility mode (@validator, Config class).
"""
from bisect import bisect_left
from typing import Any, Dict, FrozenSet, Iterator, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, root_validator, validator

Edge = Tuple[int, int]

K2_REGIONS = ('W', 'r', 'U', 'Z', 'Q', 'X*', 'C')
K3_REGIONS = ('W', 'X', "X'", 'Y', 'Z', 'X*', 'Y*', "y'", 'C')


def edge_key(u: int, v: int) -> Edge:
    """Canonical (low, high) form of an undirected edge."""
    return (u, v) if u < v else (v, u)


class CapacitatedGraph(BaseModel):
    """Undirected simple graph with a non-negative capacity per vertex."""

    vertex_count: int = Field(..., ge=0)
    adjacency: Tuple[Tuple[int, ...], ...]
    kappa: Tuple[int, ...]

    class Config:
        frozen = True
        extra = 'forbid'

    @root_validator(skip_on_failure=True)
    def validate_structure(cls, values):
        """Check ids, sortedness, symmetry and capacities."""
        n = values['vertex_count']
        adjacency = values['adjacency']
        kappa = values['kappa']

        if len(adjacency) != n:
            raise ValueError(f"adjacency has {len(adjacency)} rows for {n} vertices")
        if len(kappa) != n:
            raise ValueError(f"kappa has {len(kappa)} entries for {n} vertices")

        for v, row in enumerate(adjacency):
            if kappa[v] < 0:
                raise ValueError(f"vertex {v} has negative capacity {kappa[v]}")
            previous = -1
            for u in row:
                if not 0 <= u < n:
                    raise ValueError(f"vertex {v} lists out-of-range neighbour {u}")
                if u == v:
                    raise ValueError(f"self-loop at vertex {v}")
                if u <= previous:
                    raise ValueError(f"adjacency of vertex {v} is not strictly increasing")
                previous = u

        for v, row in enumerate(adjacency):
            for u in row:
                if not _sorted_contains(adjacency[u], v):
                    raise ValueError(f"edge {v}-{u} is not symmetric")

        return values

    def vertices(self) -> range:
        return range(self.vertex_count)

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def target(self, v: int) -> int:
        """Degree a D-vertex must have in any Nash subgraph: min(d(v), kappa(v))."""
        return min(len(self.adjacency[v]), self.kappa[v])

    def has_edge(self, u: int, v: int) -> bool:
        return _sorted_contains(self.adjacency[u], v)

    def edges(self) -> Iterator[Edge]:
        """Yield every edge once as (low, high), in lexicographic order."""
        for u, row in enumerate(self.adjacency):
            for v in row:
                if u < v:
                    yield (u, v)

    @property
    def edge_count(self) -> int:
        return sum(len(row) for row in self.adjacency) // 2


def _sorted_contains(row: Tuple[int, ...], value: int) -> bool:
    i = bisect_left(row, value)
    return i < len(row) and row[i] == value


class NashSubgraph(BaseModel):
    """A claimed DP-Nash subgraph (D, P; E'). Validated by core.validate_nash, never trusted."""

    d_set: FrozenSet[int]
    p_set: FrozenSet[int]
    edges: FrozenSet[Edge]

    class Config:
        frozen = True
        extra = 'forbid'

    @validator('edges', pre=True)
    def normalize_edges(cls, v):
        """Store every edge as (low, high)."""
        return frozenset(edge_key(int(a), int(b)) for a, b in v)

    def as_payload(self) -> Dict[str, Any]:
        """Sorted plain-data form for deterministic reports."""
        return {
            'd_set': sorted(self.d_set),
            'p_set': sorted(self.p_set),
            'edges': [list(e) for e in sorted(self.edges)],
        }


class XYZPartition(BaseModel):
    """X = {kappa = degree}, Y = N(X) minus X, Z = the rest."""

    x_set: FrozenSet[int]
    y_set: FrozenSet[int]
    z_set: FrozenSet[int]

    class Config:
        frozen = True

    @root_validator(skip_on_failure=True)
    def validate_disjoint(cls, values):
        x, y, z = values['x_set'], values['y_set'], values['z_set']
        if x & y or x & z or y & z:
            raise ValueError("X, Y and Z must be pairwise disjoint")
        return values

    @property
    def xz_set(self) -> FrozenSet[int]:
        return self.x_set | self.z_set


class Bipartite(BaseModel):
    """Bipartite graph with separate id spaces for the two sides."""

    left: Tuple[int, ...]
    right: Tuple[int, ...]
    edges: Tuple[Edge, ...]

    class Config:
        frozen = True

    @root_validator(skip_on_failure=True)
    def validate_edges(cls, values):
        left = set(values['left'])
        right = set(values['right'])
        if len(left) != len(values['left']) or len(right) != len(values['right']):
            raise ValueError("duplicate vertex ids on one side")
        seen = set()
        for a, b in values['edges']:
            if a not in left or b not in right:
                raise ValueError(f"edge ({a}, {b}) references an unknown vertex")
            if (a, b) in seen:
                raise ValueError(f"duplicate edge ({a}, {b})")
            seen.add((a, b))
        return values

    def left_adjacency(self) -> Dict[int, List[int]]:
        adj: Dict[int, List[int]] = {a: [] for a in self.left}
        for a, b in self.edges:
            adj[a].append(b)
        for row in adj.values():
            row.sort()
        return adj

    def right_adjacency(self) -> Dict[int, List[int]]:
        adj: Dict[int, List[int]] = {b: [] for b in self.right}
        for a, b in self.edges:
            adj[b].append(a)
        for row in adj.values():
            row.sort()
        return adj


class AuxGraph(BaseModel):
    """G^aux: left = X union Z, right = capacity-expanded copies of Y."""

    bip: Bipartite
    copy_of: Dict[int, int]
    copies_of: Dict[int, Tuple[int, ...]]

    class Config:
        frozen = True


class HallWitness(BaseModel):
    """A set S on one side with |N(S)| < |S|."""

    side: Literal['left', 'right']
    violator: FrozenSet[int]
    neighbourhood: FrozenSet[int]

    class Config:
        frozen = True


class LWResult(BaseModel):
    """L(W) together with W and |W^kappa|."""

    w_set: FrozenSet[int]
    l_set: FrozenSet[int]
    w_kappa_size: int


class UniquenessVerdict(BaseModel):
    """Answer of a uniqueness procedure; `method` names the procedure that decided."""

    unique: bool
    method: str
    witness: Optional[NashSubgraph] = None
    witness_dset: Optional[FrozenSet[int]] = None
    reference: Optional[NashSubgraph] = None
    reference_dset: Optional[FrozenSet[int]] = None


class DSetReport(BaseModel):
    """Result of a D-set enumeration."""

    dsets: List[Tuple[int, ...]] = Field(default_factory=list)
    complete: bool = True
    explored: int = 0
    witnesses: Optional[List[NashSubgraph]] = None


class CnfFormula(BaseModel):
    """CNF over variables 1..variable_count; literals are +/- variable ids."""

    variable_count: int = Field(..., ge=0)
    clauses: Tuple[Tuple[int, ...], ...] = ()
    clause_width: Optional[int] = None

    class Config:
        frozen = True
        extra = 'forbid'

    @root_validator(skip_on_failure=True)
    def validate_literals(cls, values):
        n = values['variable_count']
        for j, clause in enumerate(values['clauses'], start=1):
            if not clause:
                raise ValueError(f"clause {j} is empty")
            for literal in clause:
                if literal == 0 or abs(literal) > n:
                    raise ValueError(f"clause {j} has literal {literal} outside 1..{n}")
        return values


class SatResult(BaseModel):
    """Outcome of the brute-force oracle; assignment[i] is the value of variable i+1."""

    satisfiable: bool
    assignment: Optional[Tuple[bool, ...]] = None


class VariableChain(BaseModel):
    """Vertices a gadget allocates for one variable."""

    variable: int
    w: int
    wbar: int
    r: Optional[int] = None
    z: Tuple[int, ...] = ()
    x: Tuple[int, ...] = ()
    x_prime: Tuple[int, ...] = ()
    y: Tuple[int, ...] = ()


class Subdivision(BaseModel):
    """Subdivision vertex u splitting the G1 edge a-b (k=2 gadget)."""

    a: int
    b: int
    u: int


class GadgetArtifact(BaseModel):
    """A reduction graph plus the bookkeeping needed to build witnesses."""

    graph: CapacitatedGraph
    k: int
    padded_formula: CnfFormula
    var_vertices: Dict[int, Tuple[int, int]]
    clause_vertices: Dict[int, int]
    region: Tuple[str, ...]
    chains: Tuple[VariableChain, ...]
    subdivisions: Tuple[Subdivision, ...] = ()
    q: Tuple[int, ...] = ()
    x_star: Tuple[int, ...] = ()
    y_star: Tuple[int, ...] = ()
    y_prime: Optional[int] = None

    @root_validator(skip_on_failure=True)
    def validate_regions(cls, values):
        graph = values['graph']
        labels = K2_REGIONS if values['k'] == 2 else K3_REGIONS
        if len(values['region']) != graph.vertex_count:
            raise ValueError("every vertex needs exactly one region label")
        for v, label in enumerate(values['region']):
            if label not in labels:
                raise ValueError(f"vertex {v} has unknown region label {label!r}")
        return values

    def vertices_in(self, *labels: str) -> FrozenSet[int]:
        return frozenset(v for v, label in enumerate(self.region) if label in labels)


class Report(BaseModel):
    """Machine-readable CLI report (schema documented in USAGE.md)."""

    command: str
    arguments: Dict[str, Any] = Field(default_factory=dict)
    result: Dict[str, Any] = Field(default_factory=dict)
    witnesses: List[Dict[str, Any]] = Field(default_factory=list)
    budgets: Dict[str, Any] = Field(default_factory=dict)
    budget_exceeded: bool = False
    error: Optional[Dict[str, Any]] = None
    timings: Dict[str, float] = Field(default_factory=dict)
