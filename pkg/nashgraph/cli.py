"""
Command-line front end.

Every subcommand prints one JSON report on stdout; logging and the human
summary go to stderr. Exit codes:
- 0: the question was answered
- 1: input or usage error
- 2: a budget was exceeded
"""
import argparse
import json
import logging
import sys
import time
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from nashgraph import __version__
from nashgraph.cnf import parse_dimacs, sat_oracle
from nashgraph.config import Settings, get_settings, load_settings_file
from nashgraph.construct import canonical_nash, construct_nash
from nashgraph.core import dset_witness, is_dset, normalize, partition_xyz, validate_nash
from nashgraph.decide import METHODS, unique_dset, unique_nash
from nashgraph.enumeration import enumerate_dsets, enumerate_dsets_pruned
from nashgraph.errors import BudgetExceededError, NashGraphError, ReportFormatError, UsageError
from nashgraph.gadgets import claim_b_witness, expected_canonical_dset, expected_partition, gadget_k, gadget_k2
from nashgraph.graph_io import format_graph, format_sidecar, read_graph, write_atomic
from nashgraph.models import CapacitatedGraph, NashSubgraph, Report, UniquenessVerdict

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

Outcome = Tuple[Dict[str, Any], List[Dict[str, Any]]]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _witness(role: str, h: NashSubgraph) -> Dict[str, Any]:
    return {'role': role, **h.as_payload()}


def _dset_entry(role: str, dset) -> Dict[str, Any]:
    return {'role': role, 'd_set': sorted(dset)}


def _verdict_outcome(verdict: UniquenessVerdict) -> Outcome:
    result = {
        'unique': verdict.unique,
        'method': verdict.method,
        'reference_dset': sorted(verdict.reference_dset) if verdict.reference_dset is not None else None,
        'witness_dset': sorted(verdict.witness_dset) if verdict.witness_dset is not None else None,
    }
    witnesses = []
    for role, subgraph, dset in (('reference', verdict.reference, verdict.reference_dset),
                                 ('witness', verdict.witness, verdict.witness_dset)):
        if subgraph is not None:
            witnesses.append(_witness(role, subgraph))
        elif dset is not None:
            witnesses.append(_dset_entry(role, dset))
    return result, witnesses


def _parse_ids(text: str) -> List[int]:
    try:
        return sorted({int(token) for token in text.replace(',', ' ').split()})
    except ValueError:
        raise UsageError(f"--set expects comma-separated vertex ids, got {text!r}")


def cmd_normalize(args, settings: Settings) -> Outcome:
    g = read_graph(args.graph)
    h = normalize(g)
    text = format_graph(h)
    if args.output:
        write_atomic(args.output, text)
    return {
        'vertex_count': h.vertex_count,
        'edge_count': h.edge_count,
        'removed_edges': g.edge_count - h.edge_count,
        'kappa': list(h.kappa),
        'graph': text,
    }, []


def cmd_partition(args, settings: Settings) -> Outcome:
    g = normalize(read_graph(args.graph))
    part = partition_xyz(g)
    return {'x': sorted(part.x_set), 'y': sorted(part.y_set), 'z': sorted(part.z_set)}, []


def cmd_construct(args, settings: Settings) -> Outcome:
    g = read_graph(args.graph)
    h = construct_nash(g)
    return {'valid': validate_nash(g, h), 'd_set': sorted(h.d_set)}, [_witness('construct', h)]


def cmd_unique_nash(args, settings: Settings) -> Outcome:
    return _verdict_outcome(unique_nash(read_graph(args.graph)))


def cmd_unique_dset(args, settings: Settings) -> Outcome:
    g = read_graph(args.graph)
    return _verdict_outcome(unique_dset(g, settings=settings, method=args.method, ostar_cap=args.budget))


def cmd_enumerate(args, settings: Settings) -> Outcome:
    g = read_graph(args.graph)
    if args.pruned:
        report = enumerate_dsets_pruned(g, time_budget=args.timeout, settings=settings, limit=args.limit)
    else:
        report = enumerate_dsets(g, limit=args.limit, settings=settings, witnesses=args.witnesses)
    witnesses = [_witness('dset', h) for h in report.witnesses] if report.witnesses else [
        _dset_entry('dset', s) for s in report.dsets
    ]
    return {
        'count': len(report.dsets),
        'dsets': [list(s) for s in report.dsets],
        'complete': report.complete,
        'explored': report.explored,
    }, witnesses


def cmd_is_dset(args, settings: Settings) -> Outcome:
    g = read_graph(args.graph)
    members = _parse_ids(args.set)
    outside = [v for v in members if not 0 <= v < g.vertex_count]
    if outside:
        raise UsageError(f"vertices {outside} are not in the graph")
    h = dset_witness(g, members)
    result = {'set': members, 'is_dset': h is not None}
    return result, [_witness('dset', h)] if h is not None else []


def _build_gadget(args):
    with open(args.cnf, 'r', encoding='utf-8') as f:
        formula = parse_dimacs(f.read())
    if args.k < 2:
        raise UsageError(f"--k must be at least 2, got {args.k}")
    artifact = gadget_k2(formula) if args.k == 2 else gadget_k(formula, args.k)
    return formula, artifact


def cmd_gadget(args, settings: Settings) -> Outcome:
    _, artifact = _build_gadget(args)
    sidecar = args.output + '.map'
    write_atomic(args.output, format_graph(artifact.graph, comment=f"gadget k={artifact.k} from {args.cnf}"))
    write_atomic(sidecar, format_sidecar(artifact))
    logger.info(f"Wrote {artifact.graph.vertex_count}-vertex gadget to {args.output}")
    return {
        'k': artifact.k,
        'vertex_count': artifact.graph.vertex_count,
        'edge_count': artifact.graph.edge_count,
        'variables': artifact.padded_formula.variable_count,
        'clauses': len(artifact.padded_formula.clauses),
        'graph_file': args.output,
        'sidecar_file': sidecar,
    }, []


def cmd_verify_reduction(args, settings: Settings) -> Outcome:
    """
    Build the gadget, decide the formula by brute force and check both
    directions of the reduction as far as the budgets allow.
    """
    formula, artifact = _build_gadget(args)
    g = artifact.graph
    witnesses = []

    canonical = canonical_nash(g)
    canonical_valid = canonical is not None and validate_nash(g, canonical)
    if canonical is not None:
        witnesses.append(_witness('canonical', canonical))
    result: Dict[str, Any] = {
        'k': artifact.k,
        'vertex_count': g.vertex_count,
        'canonical_valid': canonical_valid,
        'canonical_matches_construction': canonical is not None and canonical.d_set == expected_canonical_dset(artifact),
        'partition_matches_construction': partition_xyz(g) == expected_partition(artifact),
    }

    sat = sat_oracle(formula, cap=settings.sat_variable_cap)
    result['satisfiable'] = sat.satisfiable
    result['assignment'] = list(sat.assignment) if sat.assignment is not None else None
    if sat.satisfiable and artifact.chains:
        witness = claim_b_witness(artifact, sat.assignment)
        witnesses.append(_witness('witness', witness))
        result['witness_valid'] = validate_nash(g, witness)
        result['witness_differs'] = canonical is not None and witness.d_set != canonical.d_set

    search = enumerate_dsets_pruned(g, time_budget=args.timeout, settings=settings, limit=2)
    timed_out = not search.complete and len(search.dsets) < 2
    result['search'] = {
        'dsets_found': len(search.dsets),
        'complete': search.complete,
        'timed_out': timed_out,
    }
    result['consistent'] = not (not sat.satisfiable and len(search.dsets) >= 2)
    if not result['consistent']:
        logger.error("Unsatisfiable formula produced a gadget with two D-sets")
    return result, witnesses


COMMANDS: Dict[str, Callable[[argparse.Namespace, Settings], Outcome]] = {
    'normalize': cmd_normalize,
    'partition': cmd_partition,
    'construct': cmd_construct,
    'unique-nash': cmd_unique_nash,
    'unique-dset': cmd_unique_dset,
    'enumerate': cmd_enumerate,
    'is-dset': cmd_is_dset,
    'gadget': cmd_gadget,
    'verify-reduction': cmd_verify_reduction,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='nashgraph', description="DP-Nash subgraphs and D-sets of capacitated graphs")
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--config', help="YAML settings file layered over NASHGRAPH_* environment variables")
    parser.add_argument('--jobs', type=int, help="worker processes for exhaustive enumeration")
    parser.add_argument('--log-level', help="DEBUG, INFO, WARNING, ERROR or CRITICAL")
    parser.add_argument('--report-file', help="also write the JSON report to this path")
    sub = parser.add_subparsers(dest='command', parser_class=_Parser)

    for name, text in (('normalize', "drop capacity-0 edges and cap capacities at degree"),
                       ('partition', "print the X/Y/Z partition of the normalized graph"),
                       ('construct', "build one Nash subgraph"),
                       ('unique-nash', "decide whether the Nash subgraph is unique")):
        command = sub.add_parser(name, help=text)
        command.add_argument('graph')
        if name == 'normalize':
            command.add_argument('-o', '--output', help="write the normalized graph here")

    command = sub.add_parser('unique-dset', help="decide whether the D-set is unique")
    command.add_argument('graph')
    command.add_argument('--method', choices=METHODS, default='auto')
    command.add_argument('--budget', type=int, help="cap on |Y| for the O*/M* sweep")

    command = sub.add_parser('enumerate', help="list D-sets")
    command.add_argument('graph')
    command.add_argument('--limit', type=int)
    command.add_argument('--pruned', action='store_true', help="backtracking search with a time budget")
    command.add_argument('--timeout', type=float, help="seconds for --pruned")
    command.add_argument('--witnesses', action='store_true', help="attach one Nash subgraph per D-set")

    command = sub.add_parser('is-dset', help="test a vertex set")
    command.add_argument('graph')
    command.add_argument('--set', required=True, help="comma-separated vertex ids (may be empty)")

    command = sub.add_parser('gadget', help="write the reduction graph of a 3-CNF")
    command.add_argument('--k', type=int, required=True)
    command.add_argument('--cnf', required=True)
    command.add_argument('-o', '--output', required=True)

    command = sub.add_parser('verify-reduction', help="check the reduction on one 3-CNF")
    command.add_argument('--k', type=int, required=True)
    command.add_argument('--cnf', required=True)
    command.add_argument('--timeout', type=float, help="seconds for the D-set search")
    return parser


def _resolve_settings(args) -> Settings:
    settings = load_settings_file(args.config) if args.config else get_settings()
    overrides = {}
    if args.jobs is not None:
        overrides['jobs'] = args.jobs
    if args.log_level is not None:
        overrides['log_level'] = args.log_level
    if overrides:
        settings = Settings(**{**settings.model_dump(), **overrides})
    return settings


def _configure_logging(level: str) -> None:
    logging.basicConfig(level=getattr(logging, level), format=LOG_FORMAT, stream=sys.stderr, force=True)


def render_report(report: Report) -> str:
    """Deterministic JSON text of a report (sorted keys)."""
    return json.dumps(report.model_dump(), sort_keys=True, indent=2) + "\n"


def _summary(report: Report) -> str:
    if report.error is not None:
        return f"{report.command}: {report.error['type']}: {report.error['message']}"
    shown = {k: v for k, v in report.result.items() if k not in ('graph', 'dsets', 'assignment')}
    return f"{report.command}: " + ", ".join(f"{k}={v}" for k, v in sorted(shown.items()))


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, run one subcommand and emit its report.

    Returns:
        Process exit code
    """
    report = Report(command='nashgraph')
    settings: Optional[Settings] = None
    code = 0
    args = None
    started = time.perf_counter()

    try:
        args = build_parser().parse_args(argv)
        if not args.command:
            raise UsageError("a subcommand is required")
        report.command = args.command
        report.arguments = {k: v for k, v in sorted(vars(args).items()) if k != 'command'}
        settings = _resolve_settings(args)
        _configure_logging(settings.log_level)
        report.budgets = settings.budgets()
        report.result, report.witnesses = COMMANDS[args.command](args, settings)
    except BudgetExceededError as e:
        logger.warning(f"Budget exceeded: {e}")
        report.budget_exceeded = True
        report.error = {'type': 'BudgetExceededError', 'message': str(e), 'budget': e.budget, 'limit': e.limit}
        code = 2
    except (NashGraphError, OSError, ValidationError) as e:
        logger.warning(f"{type(e).__name__}: {e}")
        report.error = {'type': type(e).__name__, 'message': str(e)}
        code = 1

    report.timings = {'total_seconds': round(time.perf_counter() - started, 6)}
    text = render_report(report)
    sys.stdout.write(text)
    print(_summary(report), file=sys.stderr)

    if args is not None and getattr(args, 'report_file', None):
        try:
            write_atomic(args.report_file, text)
        except (NashGraphError, OSError) as e:
            logger.error(f"Could not write report to {args.report_file}: {e}")
            code = code or 1
    return code


def load_report(text: str) -> Report:
    """
    Parse a JSON report written by `run`.

    Raises:
        ReportFormatError: If the text is not a valid report
    """
    try:
        return Report(**json.loads(text))
    except (json.JSONDecodeError, TypeError) as e:
        raise ReportFormatError(f"report is not valid JSON: {e}")
    except ValidationError as e:
        raise ReportFormatError(f"report does not match the schema: {e}")


def verify_report(report: Report, g: CapacitatedGraph) -> bool:
    """
    Re-check every witness in a report against g: entries with edges must
    pass validate_nash, entries with only a D-set must pass is_dset.
    """
    for entry in report.witnesses:
        if 'edges' in entry:
            h = NashSubgraph(d_set=entry['d_set'], p_set=entry['p_set'], edges=entry['edges'])
            if not validate_nash(g, h):
                logger.warning(f"Witness {entry.get('role')} failed validation")
                return False
        elif not is_dset(g, entry['d_set']):
            logger.warning(f"D-set {entry['d_set']} of {entry.get('role')} is not a D-set")
            return False
    return True


def main() -> None:
    sys.exit(run())
