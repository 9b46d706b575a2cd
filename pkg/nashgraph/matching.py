"""
Bipartite matching, Hall violators and the auxiliary graph G^aux.

Matching uses augmenting paths (Kuhn): left vertices are processed in
ascending id order and each tries its right neighbours in ascending order,
so the result is a deterministic function of the input.
"""
import logging
from collections import deque
from typing import Dict, FrozenSet, Iterable, List, Literal, Optional, Set, Tuple

from nashgraph.models import AuxGraph, Bipartite, CapacitatedGraph, HallWitness, XYZPartition

logger = logging.getLogger(__name__)

Side = Literal['left', 'right']


def _flip(b: Bipartite) -> Bipartite:
    return Bipartite(left=b.right, right=b.left, edges=tuple((right, left) for left, right in b.edges))


def _match_left(b: Bipartite) -> Dict[int, int]:
    """Maximum matching as right -> left."""
    adjacency = b.left_adjacency()
    owner: Dict[int, int] = {}

    def augment(start: int) -> bool:
        # iterative DFS over alternating paths; stack holds (left vertex, next neighbour index)
        seen: Set[int] = set()
        stack: List[List[int]] = [[start, 0]]
        path: List[Tuple[int, int]] = []
        while stack:
            frame = stack[-1]
            left, index = frame
            row = adjacency[left]
            advanced = False
            while index < len(row):
                right = row[index]
                index += 1
                if right in seen:
                    continue
                seen.add(right)
                frame[1] = index
                path.append((left, right))
                if right not in owner:
                    for a, r in path:
                        owner[r] = a
                    return True
                stack.append([owner[right], 0])
                advanced = True
                break
            if not advanced:
                stack.pop()
                if path:
                    path.pop()
        return False

    for left in sorted(b.left):
        augment(left)
    return owner


def max_matching(b: Bipartite) -> FrozenSet[Tuple[int, int]]:
    """
    Maximum-cardinality matching of b.

    Returns:
        Set of (left, right) pairs, pairwise vertex-disjoint
    """
    owner = _match_left(b)
    return frozenset((left, right) for right, left in owner.items())


def neighbourhood(b: Bipartite, vertices: Iterable[int], side: Side = 'left') -> FrozenSet[int]:
    """N(S) in b for S on the given side."""
    members = set(vertices)
    if side == 'left':
        return frozenset(right for left, right in b.edges if left in members)
    return frozenset(left for left, right in b.edges if right in members)


def hall_violator(b: Bipartite, side: Side = 'left') -> Optional[HallWitness]:
    """
    Return a set S on `side` with |N(S)| < |S|, or None if `side` can be saturated.

    S is the set of side-vertices reachable by alternating paths from the
    unmatched ones under a maximum matching.
    """
    oriented = b if side == 'left' else _flip(b)
    owner = _match_left(oriented)
    if len(owner) == len(oriented.left):
        return None

    partner = {left: right for right, left in owner.items()}
    adjacency = oriented.left_adjacency()
    start = sorted(v for v in oriented.left if v not in partner)
    reached_left: Set[int] = set(start)
    reached_right: Set[int] = set()
    queue = deque(start)
    while queue:
        left = queue.popleft()
        for right in adjacency[left]:
            if right in reached_right:
                continue
            reached_right.add(right)
            # every reached right vertex is matched, else the matching was not maximum
            mate = owner[right]
            if mate not in reached_left:
                reached_left.add(mate)
                queue.append(mate)

    witness = HallWitness(
        side=side,
        violator=frozenset(reached_left),
        neighbourhood=frozenset(reached_right),
    )
    logger.debug(f"Hall violator on {side}: |S|={len(reached_left)}, |N(S)|={len(reached_right)}")
    return witness


def matching_saturates(b: Bipartite, side: Side = 'left') -> bool:
    return hall_violator(b, side) is None


def build_aux(g: CapacitatedGraph, part: XYZPartition) -> AuxGraph:
    """
    Build G^aux: left = X union Z (original ids), right = kappa(y) copies of
    each y in Y, numbered consecutively in ascending y order. A copy of y is
    adjacent to r exactly when yr is an edge of g.
    """
    left = tuple(sorted(part.x_set | part.z_set))
    left_members = set(left)
    copy_of: Dict[int, int] = {}
    copies_of: Dict[int, Tuple[int, ...]] = {}
    edges: List[Tuple[int, int]] = []

    next_id = 0
    for y in sorted(part.y_set):
        copies = tuple(range(next_id, next_id + g.kappa[y]))
        next_id += g.kappa[y]
        copies_of[y] = copies
        for c in copies:
            copy_of[c] = y
        for r in g.neighbors(y):
            if r in left_members:
                edges.extend((r, c) for c in copies)

    bip = Bipartite(left=left, right=tuple(range(next_id)), edges=tuple(sorted(edges)))
    return AuxGraph(bip=bip, copy_of=copy_of, copies_of=copies_of)


def restrict(b: Bipartite, left: Iterable[int], right: Iterable[int]) -> Bipartite:
    """Induced bipartite subgraph on the given vertex subsets."""
    left_ids = tuple(sorted(set(left)))
    right_ids = tuple(sorted(set(right)))
    keep_l, keep_r = set(left_ids), set(right_ids)
    return Bipartite(
        left=left_ids,
        right=right_ids,
        edges=tuple(e for e in b.edges if e[0] in keep_l and e[1] in keep_r),
    )
