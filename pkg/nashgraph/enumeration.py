"""
Exact D-set enumeration.

Two enumerators:
- enumerate_dsets: every subset in lexicographic order, each checked with
  the flow test (after cheap necessary conditions)
- enumerate_dsets_pruned: backtracking over D/P labels with propagation,
  partial labellings cut by a relaxed flow test, leaves checked with the
  exact one, bounded by a wall-clock budget
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Iterator, List, Optional, Sequence, Tuple

from nashgraph.config import Settings, get_settings
from nashgraph.core import dset_witness, is_dset, kappa_targets, labels_feasible
from nashgraph.errors import BudgetExceededError
from nashgraph.models import CapacitatedGraph, DSetReport

logger = logging.getLogger(__name__)

DSet = Tuple[int, ...]

D_LABEL = 'D'
P_LABEL = 'P'


def _subsets_lex(items: Sequence[int], prefix: DSet = ()) -> Iterator[DSet]:
    """Subsets of `items` extending `prefix`, in lexicographic order of sorted tuples."""
    yield prefix
    for i, v in enumerate(items):
        yield from _subsets_lex(items[i + 1:], prefix + (v,))


def _scan_shard(g: CapacitatedGraph, first: int) -> Tuple[List[DSet], int]:
    """All D-sets whose smallest vertex is `first`, plus the number of candidates checked."""
    found: List[DSet] = []
    explored = 0
    for candidate in _subsets_lex(tuple(range(first + 1, g.vertex_count)), (first,)):
        explored += 1
        if is_dset(g, candidate):
            found.append(candidate)
    return found, explored


def _attach_witnesses(g: CapacitatedGraph, report: DSetReport) -> DSetReport:
    report.witnesses = [dset_witness(g, s) for s in report.dsets]
    return report


def enumerate_dsets(g: CapacitatedGraph, limit: Optional[int] = None,
                    settings: Optional[Settings] = None, jobs: Optional[int] = None,
                    witnesses: bool = False) -> DSetReport:
    """
    List every D-set of g in lexicographic order.

    Args:
        g: Any capacitated graph
        limit: Stop after this many D-sets (report is marked incomplete if candidates remain)
        settings: Budgets (default: environment)
        jobs: Worker processes; shards by smallest vertex (ignored when limit is set)
        witnesses: Attach one Nash subgraph per D-set

    Returns:
        DSetReport

    Raises:
        BudgetExceededError: If g has more vertices than enumerate_vertex_cap
    """
    settings = settings or get_settings()
    cap = settings.enumerate_vertex_cap
    if g.vertex_count > cap:
        logger.warning(f"Exhaustive enumeration refused: {g.vertex_count} vertices, cap is {cap}")
        raise BudgetExceededError('enumerate', cap, g.vertex_count)

    jobs = settings.jobs if jobs is None else jobs
    if jobs > 1 and limit is None and g.vertex_count > 1:
        return _enumerate_parallel(g, jobs, witnesses)

    dsets: List[DSet] = []
    explored = 0
    complete = True
    for candidate in _subsets_lex(tuple(g.vertices())):
        if limit is not None and len(dsets) >= limit:
            complete = False
            break
        explored += 1
        if is_dset(g, candidate):
            dsets.append(candidate)

    logger.debug(f"Enumerated {len(dsets)} D-sets from {explored} candidates (complete={complete})")
    report = DSetReport(dsets=dsets, complete=complete, explored=explored)
    return _attach_witnesses(g, report) if witnesses else report


def _enumerate_parallel(g: CapacitatedGraph, jobs: int, witnesses: bool) -> DSetReport:
    dsets: List[DSet] = [()] if is_dset(g, ()) else []
    explored = 1
    firsts = list(g.vertices())
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for found, count in pool.map(_scan_shard, [g] * len(firsts), firsts):
            dsets.extend(found)
            explored += count
    dsets = sorted(set(dsets))
    logger.debug(f"Enumerated {len(dsets)} D-sets across {jobs} workers")
    report = DSetReport(dsets=dsets, complete=True, explored=explored)
    return _attach_witnesses(g, report) if witnesses else report


def count_dsets(g: CapacitatedGraph, settings: Optional[Settings] = None, jobs: Optional[int] = None) -> int:
    """Number of D-sets of g (exhaustive)."""
    return len(enumerate_dsets(g, settings=settings, jobs=jobs).dsets)


class _Timeout(Exception):
    pass


class _LimitReached(Exception):
    pass


class _LabelSearch:
    """Backtracking over D/P labels for the pruned enumerator."""

    def __init__(self, g: CapacitatedGraph, deadline: float, limit: Optional[int] = None):
        self.g = g
        self.targets = kappa_targets(g)
        self.deadline = deadline
        self.limit = limit
        self.found: List[DSet] = []
        self.explored = 0
        self.pruned = 0

    def propagate(self, labels: List[Optional[str]]) -> bool:
        """Apply forced labels until fixpoint; False on contradiction."""
        g, targets = self.g, self.targets
        changed = True
        while changed:
            changed = False
            for v in g.vertices():
                if labels[v] == P_LABEL:
                    if any(labels[u] == D_LABEL and targets[u] > 0 for u in g.neighbors(v)):
                        continue
                    open_candidates = [u for u in g.neighbors(v) if labels[u] is None and targets[u] > 0]
                    if not open_candidates:
                        return False
                    if len(open_candidates) == 1:
                        labels[open_candidates[0]] = D_LABEL
                        changed = True
                elif labels[v] == D_LABEL:
                    available = [u for u in g.neighbors(v) if labels[u] != D_LABEL]
                    if len(available) < targets[v]:
                        return False
                    if len(available) == targets[v]:
                        for u in available:
                            if labels[u] is None:
                                labels[u] = P_LABEL
                                changed = True
        return True

    def feasible(self, labels: List[Optional[str]]) -> bool:
        """Flow check on the partial labelling; leaves are left to is_dset."""
        if all(label is not None for label in labels):
            return True
        d_set = [v for v, label in enumerate(labels) if label == D_LABEL]
        p_set = [v for v, label in enumerate(labels) if label == P_LABEL]
        if not (d_set or p_set):
            return True
        return labels_feasible(self.g, d_set, p_set)

    def _try(self, labels: List[Optional[str]], v: int, label: str) -> Optional[List[Optional[str]]]:
        trial = list(labels)
        trial[v] = label
        return trial if self.propagate(trial) else None

    def search(self, labels: List[Optional[str]]) -> None:
        if time.monotonic() >= self.deadline:
            raise _Timeout()
        if not self.feasible(labels):
            self.pruned += 1
            return

        best: Optional[Tuple[int, int, List[List[Optional[str]]]]] = None
        for v in self.g.vertices():
            if labels[v] is not None:
                continue
            options = [t for t in (self._try(labels, v, D_LABEL), self._try(labels, v, P_LABEL)) if t is not None]
            if best is None or len(options) < best[0]:
                best = (len(options), v, options)
            if not options:
                break

        if best is None:
            self.explored += 1
            members = tuple(v for v in self.g.vertices() if labels[v] == D_LABEL)
            if is_dset(self.g, members):
                self.found.append(members)
                if self.limit is not None and len(self.found) >= self.limit:
                    raise _LimitReached()
            return

        for option in best[2]:
            self.search(option)


def enumerate_dsets_pruned(g: CapacitatedGraph, time_budget: Optional[float] = None,
                           settings: Optional[Settings] = None, limit: Optional[int] = None) -> DSetReport:
    """
    Enumerate D-sets by labelling vertices D or P with propagation.

    Propagation only applies consequences of the Nash conditions:
    - a P vertex needs a neighbour that is (or may become) a D vertex with
      positive target; if exactly one such open neighbour remains it is D
    - a D vertex needs at least min(d, kappa) neighbours not labelled D; if
      exactly that many remain, the open ones are P

    Every inner node also runs the flow test relaxed to the partial
    labelling (labels_feasible) and is cut when no completion can work.

    Branching picks the open vertex with the fewest consistent labels
    (lowest id on ties) and tries D before P.

    Args:
        g: Any capacitated graph
        time_budget: Seconds of wall-clock time (default: settings.timeout_seconds)
        settings: Budgets (default: environment)
        limit: Stop once this many D-sets are found

    Returns:
        DSetReport; complete=False if the budget ran out or the limit was hit
    """
    settings = settings or get_settings()
    budget = settings.timeout_seconds if time_budget is None else time_budget
    search = _LabelSearch(g, time.monotonic() + budget, limit)

    complete = True
    labels: List[Optional[str]] = [None] * g.vertex_count
    try:
        if search.propagate(labels):
            search.search(labels)
    except _Timeout:
        complete = False
        logger.warning(f"Pruned enumeration stopped after {budget}s with {len(search.found)} D-sets")
    except _LimitReached:
        complete = False
        logger.debug(f"Pruned enumeration reached its limit of {limit} D-sets")

    logger.debug(f"Pruned enumeration cut {search.pruned} partial labellings by flow")
    return DSetReport(dsets=sorted(search.found), complete=complete, explored=search.explored)
