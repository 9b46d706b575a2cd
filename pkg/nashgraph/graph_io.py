"""
Graph and sidecar text formats, plus atomic file writes.

Provides:
- Parsing/formatting of the `capgraph` text format (line numbers in errors)
- Parsing/formatting of the gadget sidecar mapping file
- Atomic writes (lock -> temp -> fsync -> rename)
"""
import logging
import os
import tempfile
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import portalocker

from nashgraph.core import from_edges
from nashgraph.errors import GraphFormatError, PreconditionError
from nashgraph.models import CapacitatedGraph, GadgetArtifact

logger = logging.getLogger(__name__)

HEADER = 'capgraph'


def _meaningful_lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        yield number, line.split()


def _int(token: str, number: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise GraphFormatError(f"{what} must be an integer, got {token!r}", line=number)


def parse_graph(text: str) -> CapacitatedGraph:
    """
    Parse the capgraph text format.

    Layout: `capgraph <n> <m>`, then n lines `k <id> <kappa>`, then m lines
    `e <u> <v>` with u < v. Comment lines start with '#'.

    Args:
        text: File contents

    Returns:
        The parsed graph

    Raises:
        GraphFormatError: On any structural problem, naming the line
    """
    lines = _meaningful_lines(text)
    try:
        number, tokens = next(lines)
    except StopIteration:
        raise GraphFormatError("missing 'capgraph <n> <m>' header")

    if len(tokens) != 3 or tokens[0] != HEADER:
        raise GraphFormatError("expected 'capgraph <n> <m>' header", line=number)
    n = _int(tokens[1], number, "vertex count")
    m = _int(tokens[2], number, "edge count")
    if n < 0 or m < 0:
        raise GraphFormatError("counts must be non-negative", line=number)

    kappa: List[Optional[int]] = [None] * n
    edges: List[Tuple[int, int]] = []
    seen_edges = set()
    kappa_lines = 0

    for number, tokens in lines:
        tag = tokens[0]
        if tag == 'k':
            if edges:
                raise GraphFormatError("'k' line after the first 'e' line", line=number)
            if len(tokens) != 3:
                raise GraphFormatError("expected 'k <id> <kappa>'", line=number)
            v = _int(tokens[1], number, "vertex id")
            value = _int(tokens[2], number, "capacity")
            if not 0 <= v < n:
                raise GraphFormatError(f"vertex id {v} out of range 0..{n - 1}", line=number)
            if value < 0:
                raise GraphFormatError(f"capacity of vertex {v} is negative", line=number)
            if kappa[v] is not None:
                raise GraphFormatError(f"duplicate 'k' line for vertex {v}", line=number)
            kappa[v] = value
            kappa_lines += 1
        elif tag == 'e':
            if len(tokens) != 3:
                raise GraphFormatError("expected 'e <u> <v>'", line=number)
            u = _int(tokens[1], number, "vertex id")
            v = _int(tokens[2], number, "vertex id")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge {u}-{v} references a vertex out of range", line=number)
            if u >= v:
                raise GraphFormatError(f"edge endpoints must satisfy u < v, got {u} {v}", line=number)
            if (u, v) in seen_edges:
                raise GraphFormatError(f"duplicate edge {u}-{v}", line=number)
            if len(edges) == m:
                raise GraphFormatError(f"more than the declared {m} edges", line=number)
            seen_edges.add((u, v))
            edges.append((u, v))
        else:
            raise GraphFormatError(f"unknown line type {tag!r}", line=number)

    missing = [v for v in range(n) if kappa[v] is None]
    if missing:
        raise GraphFormatError(f"no 'k' line for vertices {missing[:10]}")
    if len(edges) != m:
        raise GraphFormatError(f"header declares {m} edges but {len(edges)} were given")

    logger.debug(f"Parsed graph with {n} vertices and {m} edges ({kappa_lines} capacities)")
    return from_edges(n, edges, [int(k) for k in kappa])


def format_graph(g: CapacitatedGraph, comment: Optional[str] = None) -> str:
    """Render a graph in the capgraph text format."""
    lines = []
    if comment:
        lines.extend(f"# {part}" for part in comment.splitlines())
    lines.append(f"{HEADER} {g.vertex_count} {g.edge_count}")
    lines.extend(f"k {v} {g.kappa[v]}" for v in g.vertices())
    lines.extend(f"e {u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def read_graph(path: str) -> CapacitatedGraph:
    with open(path, 'r', encoding='utf-8') as f:
        return parse_graph(f.read())


def format_sidecar(artifact: GadgetArtifact) -> str:
    """Line-oriented mapping file: var, clause and region lines."""
    lines = [f"# gadget k={artifact.k} vertices={artifact.graph.vertex_count}"]
    for i in sorted(artifact.var_vertices):
        w, wbar = artifact.var_vertices[i]
        lines.append(f"var {i} {w} {wbar}")
    for j in sorted(artifact.clause_vertices):
        lines.append(f"clause {j} {artifact.clause_vertices[j]}")
    for v, label in enumerate(artifact.region):
        lines.append(f"region {v} {label}")
    return "\n".join(lines) + "\n"


def parse_sidecar(text: str) -> Dict[str, Dict]:
    """
    Parse a sidecar mapping file.

    Returns:
        {'var': {i: (w, wbar)}, 'clause': {j: c}, 'region': {id: label}}

    Raises:
        GraphFormatError: On malformed or duplicate entries
    """
    result: Dict[str, Dict] = {'var': {}, 'clause': {}, 'region': {}}
    for number, tokens in _meaningful_lines(text):
        tag = tokens[0]
        expected = {'var': 4, 'clause': 3, 'region': 3}.get(tag)
        if expected is None:
            raise GraphFormatError(f"unknown sidecar line type {tag!r}", line=number)
        if len(tokens) != expected:
            raise GraphFormatError(f"'{tag}' line needs {expected - 1} fields", line=number)
        key = _int(tokens[1], number, f"{tag} index")
        if key in result[tag]:
            raise GraphFormatError(f"duplicate '{tag} {key}' entry", line=number)
        if tag == 'var':
            result[tag][key] = (_int(tokens[2], number, "vertex id"), _int(tokens[3], number, "vertex id"))
        elif tag == 'clause':
            result[tag][key] = _int(tokens[2], number, "vertex id")
        else:
            result[tag][key] = tokens[2]
    return result


def write_atomic(path: str, text: str, lock_timeout: int = 30) -> None:
    """
    Write text to path atomically.

    Process:
    0. Acquire exclusive lock on <path>.lock
    1. Write to a temporary file in the target directory
    2. fsync
    3. os.replace onto the target

    Raises:
        PreconditionError: If the target directory does not exist
        OSError: If the write fails
    """
    target = Path(path)
    if not target.parent.exists():
        raise PreconditionError(f"directory does not exist: {target.parent}")
    lock_path = target.with_name(target.name + '.lock')

    with portalocker.Lock(lock_path, 'w', timeout=lock_timeout):
        temp_fd, temp_path = tempfile.mkstemp(
            dir=target.parent,
            prefix=f'.{target.name}_tmp_',
        )
        try:
            with os.fdopen(temp_fd, 'w', encoding='utf-8') as f:
                f.write(text)
                f.flush()
                os.fsync(f.fileno())
            os.replace(temp_path, target)
        except Exception:
            try:
                os.unlink(temp_path)
            except OSError:
                pass
            raise

    logger.info(f"Wrote {len(text)} bytes to {target}")
