"""
Uniqueness decisions for Nash subgraphs and D-sets.

unique_nash is polynomial (at most |X| matching computations).
unique_dset runs a ladder of cheap tests before falling back to the
exponential O* sweep (Gray-code order over subsets of Y with positive
capacity) or to exhaustive D-set enumeration.
"""
import logging
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple

from nashgraph.config import Settings, get_settings
from nashgraph.construct import (
    canonical_nash,
    construct_nash_seeded,
    dependent_pair,
    violation_subgraph,
)
from nashgraph.core import forced_set, normalize, partition_xyz
from nashgraph.enumeration import enumerate_dsets
from nashgraph.errors import BudgetExceededError, PreconditionError
from nashgraph.matching import build_aux, hall_violator, max_matching, restrict
from nashgraph.models import (
    CapacitatedGraph,
    LWResult,
    NashSubgraph,
    UniquenessVerdict,
    XYZPartition,
    edge_key,
)

logger = logging.getLogger(__name__)

METHODS = ('auto', 'ostar', 'mstar', 'enumerate')

Matching = FrozenSet[Tuple[int, int]]


def compute_lw(g: CapacitatedGraph, part: XYZPartition, w_set: Iterable[int]) -> LWResult:
    """
    L(W) = {x in X union Z : |N(x) & W| > d(x) - kappa(x)}.

    Raises:
        PreconditionError: If W is empty or not a subset of Y with positive capacities
    """
    w_members = frozenset(w_set)
    if not w_members:
        raise PreconditionError("W must be nonempty")
    outside = sorted(y for y in w_members if y not in part.y_set or g.kappa[y] == 0)
    if outside:
        raise PreconditionError(f"vertices {outside} are not in Y with positive capacity")
    return LWResult(
        w_set=w_members,
        l_set=forced_set(g, part, w_members),
        w_kappa_size=sum(g.kappa[y] for y in w_members),
    )


def _positive_y(g: CapacitatedGraph, part: XYZPartition) -> List[int]:
    return sorted(y for y in part.y_set if g.kappa[y] > 0)


def _gray_sweep(g: CapacitatedGraph, part: XYZPartition, cap: int,
                budget: str) -> Iterator[Tuple[FrozenSet[int], Set[int], int]]:
    """
    Yield (W, L(W), |W^kappa|) for every nonempty W of Y with positive
    capacity, in reflected Gray-code order, updating |N(x) & W| counters
    one vertex at a time.
    """
    candidates = _positive_y(g, part)
    if len(candidates) > cap:
        logger.warning(f"{budget} sweep needs 2^{len(candidates)} subsets, cap is {cap}")
        raise BudgetExceededError(budget, cap, len(candidates))

    xz = part.xz_set
    slack = {x: g.degree(x) - g.kappa[x] for x in xz}
    count: Dict[int, int] = {x: 0 for x in xz}
    l_members: Set[int] = set()
    w_members: Set[int] = set()
    w_kappa = 0

    for i in range(1, 1 << len(candidates)):
        y = candidates[(i & -i).bit_length() - 1]
        if y in w_members:
            w_members.discard(y)
            w_kappa -= g.kappa[y]
            for x in g.neighbors(y):
                if x in count:
                    count[x] -= 1
                    if count[x] == slack[x]:
                        l_members.discard(x)
        else:
            w_members.add(y)
            w_kappa += g.kappa[y]
            for x in g.neighbors(y):
                if x in count:
                    count[x] += 1
                    if count[x] == slack[x] + 1:
                        l_members.add(x)
        yield frozenset(w_members), l_members, w_kappa


def find_ostar_violation(g: CapacitatedGraph, cap: Optional[int] = None) -> Optional[FrozenSet[int]]:
    """
    First nonempty W (Gray-code order) with |L(W)| <= |W^kappa|, or None.

    Raises:
        BudgetExceededError: If |Y with positive capacity| exceeds cap
    """
    cap = get_settings().ostar_cap if cap is None else cap
    part = partition_xyz(g)
    for w_members, l_members, w_kappa in _gray_sweep(g, part, cap, 'ostar'):
        if len(l_members) <= w_kappa:
            logger.debug(f"O* fails at W={sorted(w_members)}: |L|={len(l_members)} <= {w_kappa}")
            return w_members
    return None


def find_mstar_violation(g: CapacitatedGraph,
                         cap: Optional[int] = None) -> Optional[Tuple[FrozenSet[int], Matching]]:
    """
    First nonempty W with a matching saturating L(W) into W^kappa in G^aux,
    together with that matching (pairs (x, copy id)); None when M* holds.
    """
    cap = get_settings().ostar_cap if cap is None else cap
    part = partition_xyz(g)
    aux = build_aux(g, part)
    for w_members, l_members, w_kappa in _gray_sweep(g, part, cap, 'mstar'):
        if len(l_members) > w_kappa:
            continue
        copies = [c for y in w_members for c in aux.copies_of[y]]
        matching = max_matching(restrict(aux.bip, l_members, copies))
        if len(matching) == len(l_members):
            logger.debug(f"M* fails at W={sorted(w_members)}")
            return w_members, matching
    return None


def check_ostar(g: CapacitatedGraph, cap: Optional[int] = None) -> bool:
    """True iff |L(W)| > |W^kappa| for every nonempty W of Y with positive capacity."""
    return find_ostar_violation(g, cap) is None


def check_mstar(g: CapacitatedGraph, cap: Optional[int] = None) -> bool:
    """True iff no nonempty W admits a matching saturating L(W) into W^kappa."""
    return find_mstar_violation(g, cap) is None


def shrink_to_matchable(g: CapacitatedGraph, w_set: Iterable[int]) -> Tuple[FrozenSet[int], Matching]:
    """
    Turn a W with |L(W)| <= |W^kappa| into one whose L(W) can be matched
    into W^kappa.

    While no saturating matching exists, a Hall violator S inside L(W) is
    removed together with its neighbourhood: W <- W minus N(S). Each step
    keeps |L(W)| <= |W^kappa| and W nonempty.

    Returns:
        (W, matching) with the matching saturating L(W)

    Raises:
        PreconditionError: If the starting W does not violate O*
    """
    part = partition_xyz(g)
    lw = compute_lw(g, part, w_set)
    if len(lw.l_set) > lw.w_kappa_size:
        raise PreconditionError(
            f"|L(W)| = {len(lw.l_set)} exceeds |W^kappa| = {lw.w_kappa_size}; W does not violate O*"
        )
    aux = build_aux(g, part)
    w_members = lw.w_set

    while True:
        l_set = forced_set(g, part, w_members)
        copies = [c for y in w_members for c in aux.copies_of[y]]
        bip = restrict(aux.bip, l_set, copies)
        witness = hall_violator(bip, 'left')
        if witness is None:
            return w_members, max_matching(bip)
        removed = {aux.copy_of[c] for c in witness.neighbourhood}
        logger.debug(f"Shrinking W by {sorted(removed)} (Hall violator of size {len(witness.violator)})")
        w_members = w_members - removed


def _second_subgraph(g: CapacitatedGraph, w_set: Iterable[int]) -> NashSubgraph:
    w_members, _ = shrink_to_matchable(g, w_set)
    return violation_subgraph(g, w_members)


def _reselect_at_z(g: CapacitatedGraph, reference: NashSubgraph, z: int) -> NashSubgraph:
    """Swap the last chosen edge at z for its first unchosen one."""
    chosen = [y for y in g.neighbors(z) if edge_key(z, y) in reference.edges]
    unchosen = [y for y in g.neighbors(z) if edge_key(z, y) not in reference.edges]
    edges = set(reference.edges)
    edges.discard(edge_key(z, chosen[-1]))
    edges.add(edge_key(z, unchosen[0]))
    return NashSubgraph(d_set=reference.d_set, p_set=reference.p_set, edges=edges)


def unique_nash(g: CapacitatedGraph) -> UniquenessVerdict:
    """
    Decide whether g has exactly one Nash subgraph.

    - X union Z dependent: two subgraphs with different D-sets exist
    - some z in Z with kappa(z) > 0: its edges can be picked in two ways
    - otherwise unique iff, for every x in X, G^aux restricted to X minus x
      still has a matching saturating all copies of Y

    Args:
        g: Any capacitated graph (normalized internally)

    Returns:
        UniquenessVerdict; when not unique, `witness` is a second valid
        subgraph and `reference` the one it differs from
    """
    g = normalize(g)
    part = partition_xyz(g)

    pair = dependent_pair(g)
    if pair is not None:
        first, second = pair
        return UniquenessVerdict(
            unique=False, method='xz-dependent',
            reference=first, reference_dset=first.d_set,
            witness=second, witness_dset=second.d_set,
        )

    canonical = canonical_nash(g)
    positive_z = sorted(z for z in part.z_set if g.kappa[z] > 0)
    if positive_z:
        witness = _reselect_at_z(g, canonical, positive_z[0])
        logger.debug(f"Vertex {positive_z[0]} in Z has spare edges; subgraph is not unique")
        return UniquenessVerdict(
            unique=False, method='z-reselect',
            reference=canonical, reference_dset=canonical.d_set,
            witness=witness, witness_dset=witness.d_set,
        )

    aux = build_aux(g, part)
    right = aux.bip.right
    for x in sorted(part.x_set):
        bip = restrict(aux.bip, part.x_set - {x}, right)
        violator = hall_violator(bip, 'right')
        if violator is None:
            continue
        w_members = frozenset(aux.copy_of[c] for c in violator.violator)
        logger.debug(f"Removing {x} leaves copies of {sorted(w_members)} unmatched")
        witness = _second_subgraph(g, w_members)
        return UniquenessVerdict(
            unique=False, method='matching',
            reference=canonical, reference_dset=canonical.d_set,
            witness=witness, witness_dset=witness.d_set,
        )

    return UniquenessVerdict(
        unique=True, method='matching',
        reference=canonical, reference_dset=canonical.d_set,
    )


def _from_enumeration(g: CapacitatedGraph, settings: Settings, method: str) -> UniquenessVerdict:
    if g.vertex_count > settings.enumerate_vertex_cap:
        logger.warning(f"Enumeration needs {g.vertex_count} vertices, cap is {settings.enumerate_vertex_cap}")
        raise BudgetExceededError('enumerate', settings.enumerate_vertex_cap, g.vertex_count)
    report = enumerate_dsets(g, limit=2, settings=settings)
    first = frozenset(report.dsets[0])
    if len(report.dsets) == 1:
        return UniquenessVerdict(unique=True, method=method, reference_dset=first)
    return UniquenessVerdict(
        unique=False, method=method,
        reference_dset=first, witness_dset=frozenset(report.dsets[1]),
    )


def unique_dset(g: CapacitatedGraph, settings: Optional[Settings] = None, method: str = 'auto',
                ostar_cap: Optional[int] = None) -> UniquenessVerdict:
    """
    Decide whether every Nash subgraph of g has the same D-set.

    Ladder for method='auto':
    1. X union Z dependent -> not unique
    2. every capacity 0 -> unique
    3. every non-isolated capacity 1 -> unique iff each y in Y has two X-neighbours
    4. no vertex of Z with positive capacity -> same answer as unique_nash
    5. O* sweep, or exhaustive enumeration when the sweep is over budget

    A forced method ('ostar', 'mstar', 'enumerate') skips steps 2-4;
    'enumerate' also skips step 1.

    Args:
        g: Any capacitated graph (normalized internally)
        settings: Budgets (default: environment)
        method: One of METHODS
        ostar_cap: Overrides settings.ostar_cap

    Raises:
        PreconditionError: Unknown method
        BudgetExceededError: When the deciding step exceeds its cap
    """
    if method not in METHODS:
        raise PreconditionError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")
    settings = settings or get_settings()
    cap = settings.ostar_cap if ostar_cap is None else ostar_cap

    if method == 'enumerate':
        return _from_enumeration(g, settings, 'enumerate')

    g = normalize(g)
    part = partition_xyz(g)
    xz = part.xz_set

    pair = dependent_pair(g)
    if pair is not None:
        first, second = pair
        return UniquenessVerdict(
            unique=False, method='xz-dependent',
            reference=first, reference_dset=first.d_set,
            witness=second, witness_dset=second.d_set,
        )

    canonical = canonical_nash(g)

    if method == 'auto':
        if all(k == 0 for k in g.kappa):
            return UniquenessVerdict(unique=True, method='kappa-zero', reference=canonical, reference_dset=xz)

        if all(g.kappa[v] == min(1, g.degree(v)) for v in g.vertices()):
            for y in sorted(part.y_set):
                if sum(1 for v in g.neighbors(y) if v in part.x_set) < 2:
                    witness = construct_nash_seeded(g, y)
                    logger.debug(f"Vertex {y} has fewer than two degree-1 neighbours")
                    return UniquenessVerdict(
                        unique=False, method='kappa-one',
                        reference=canonical, reference_dset=xz,
                        witness=witness, witness_dset=witness.d_set,
                    )
            return UniquenessVerdict(unique=True, method='kappa-one', reference=canonical, reference_dset=xz)

        if not any(g.kappa[z] > 0 for z in part.z_set):
            return unique_nash(g)

    if method == 'mstar':
        found = find_mstar_violation(g, cap)
        if found is None:
            return UniquenessVerdict(unique=True, method='mstar', reference=canonical, reference_dset=xz)
        witness = violation_subgraph(g, found[0])
        return UniquenessVerdict(
            unique=False, method='mstar',
            reference=canonical, reference_dset=xz,
            witness=witness, witness_dset=witness.d_set,
        )

    try:
        violation = find_ostar_violation(g, cap)
    except BudgetExceededError:
        if method == 'ostar' or g.vertex_count > settings.enumerate_vertex_cap:
            raise
        logger.info("O* sweep over budget; falling back to enumeration")
        return _from_enumeration(g, settings, 'enumerate')

    if violation is None:
        return UniquenessVerdict(unique=True, method='ostar', reference=canonical, reference_dset=xz)
    witness = _second_subgraph(g, violation)
    return UniquenessVerdict(
        unique=False, method='ostar',
        reference=canonical, reference_dset=xz,
        witness=witness, witness_dset=witness.d_set,
    )
