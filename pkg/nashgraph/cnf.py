"""
CNF formulas: DIMACS parsing, brute-force satisfiability and the padding
transforms the reductions need.
"""
import itertools
import logging
from typing import List, Optional, Sequence, Tuple

from nashgraph.config import get_settings
from nashgraph.errors import BudgetExceededError, CnfFormatError, PreconditionError
from nashgraph.models import CnfFormula, SatResult

logger = logging.getLogger(__name__)

MODES = ('exists', 'k_of_width')


def parse_dimacs(text: str) -> CnfFormula:
    """
    Parse DIMACS CNF text.

    Comment lines start with 'c'; the header is `p cnf <vars> <clauses>`;
    clauses are whitespace-separated literals terminated by 0 and may span
    lines. A line starting with '%' ends the input.

    Raises:
        CnfFormatError: On a missing/malformed header, bad literals, an
            unterminated clause or a clause count that does not match
    """
    header: Optional[Tuple[int, int]] = None
    clauses: List[Tuple[int, ...]] = []
    current: List[int] = []
    clause_line = 0

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('c'):
            continue
        if line.startswith('%'):
            break
        if line.startswith('p'):
            parts = line.split()
            if header is not None:
                raise CnfFormatError("duplicate 'p' header", line=number)
            if len(parts) != 4 or parts[1] != 'cnf':
                raise CnfFormatError("expected 'p cnf <variables> <clauses>'", line=number)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise CnfFormatError("header counts must be integers", line=number)
            if header[0] < 0 or header[1] < 0:
                raise CnfFormatError("header counts must be non-negative", line=number)
            continue
        if header is None:
            raise CnfFormatError("clause before 'p cnf' header", line=number)

        for token in line.split():
            try:
                literal = int(token)
            except ValueError:
                raise CnfFormatError(f"literal must be an integer, got {token!r}", line=number)
            if abs(literal) > header[0]:
                raise CnfFormatError(f"literal {literal} exceeds declared {header[0]} variables", line=number)
            if literal == 0:
                if not current:
                    raise CnfFormatError("empty clause", line=number)
                clauses.append(tuple(current))
                current = []
            else:
                if not current:
                    clause_line = number
                current.append(literal)

    if header is None:
        raise CnfFormatError("missing 'p cnf' header")
    if current:
        raise CnfFormatError("clause is not terminated by 0", line=clause_line)
    if len(clauses) != header[1]:
        raise CnfFormatError(f"header declares {header[1]} clauses but {len(clauses)} were given")

    widths = {len(c) for c in clauses}
    width = widths.pop() if len(widths) == 1 else None
    logger.debug(f"Parsed CNF with {header[0]} variables and {len(clauses)} clauses (width {width})")
    return CnfFormula(variable_count=header[0], clauses=tuple(clauses), clause_width=width)


def _required(mode: str, k: Optional[int]) -> int:
    if mode == 'exists':
        return 1
    if mode == 'k_of_width':
        if k is None or k < 1:
            raise PreconditionError("k_of_width mode needs k >= 1")
        return k
    raise PreconditionError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")


def _true_literals(clause: Sequence[int], assignment: Sequence[bool]) -> int:
    return sum(1 for literal in clause if assignment[abs(literal) - 1] == (literal > 0))


def first_unsatisfied_clause(f: CnfFormula, assignment: Sequence[bool], mode: str = 'exists',
                             k: Optional[int] = None) -> Optional[int]:
    """1-based index of the first clause with too few true literals, or None."""
    if len(assignment) != f.variable_count:
        raise PreconditionError(
            f"assignment has {len(assignment)} values for {f.variable_count} variables"
        )
    required = _required(mode, k)
    for j, clause in enumerate(f.clauses, start=1):
        if _true_literals(clause, assignment) < required:
            return j
    return None


def satisfies(f: CnfFormula, assignment: Sequence[bool], mode: str = 'exists', k: Optional[int] = None) -> bool:
    return first_unsatisfied_clause(f, assignment, mode, k) is None


def sat_oracle(f: CnfFormula, mode: str = 'exists', k: Optional[int] = None,
               cap: Optional[int] = None) -> SatResult:
    """
    Brute-force satisfiability over all 2^n assignments (all-false first).

    Args:
        f: Formula
        mode: 'exists' (ordinary SAT) or 'k_of_width' (at least k true literals per clause)
        k: Threshold for 'k_of_width'
        cap: Maximum variable count (default: settings.sat_variable_cap)

    Returns:
        SatResult with the first satisfying assignment found

    Raises:
        BudgetExceededError: If f has more than `cap` variables
    """
    required = _required(mode, k)
    cap = get_settings().sat_variable_cap if cap is None else cap
    if f.variable_count > cap:
        logger.warning(f"SAT oracle refused: {f.variable_count} variables, cap is {cap}")
        raise BudgetExceededError('sat', cap, f.variable_count)

    for assignment in itertools.product((False, True), repeat=f.variable_count):
        if all(_true_literals(clause, assignment) >= required for clause in f.clauses):
            return SatResult(satisfiable=True, assignment=assignment)
    return SatResult(satisfiable=False)


def _require_width3(f: CnfFormula, operation: str) -> None:
    for j, clause in enumerate(f.clauses, start=1):
        if len(clause) != 3:
            raise PreconditionError(f"{operation} needs width-3 clauses; clause {j} has {len(clause)} literals")


def widen_to_k_of_k2(f: CnfFormula, k: int) -> CnfFormula:
    """
    Append k-1 fresh variables (positive literals) to every clause, so that
    f is satisfiable iff the result has an assignment with at least k true
    literals in every clause.
    """
    if k < 3:
        raise PreconditionError(f"widening needs k >= 3, got {k}")
    _require_width3(f, "widen_to_k_of_k2")
    dummies = tuple(range(f.variable_count + 1, f.variable_count + k))
    return CnfFormula(
        variable_count=f.variable_count + k - 1,
        clauses=tuple(clause + dummies for clause in f.clauses),
        clause_width=k + 2,
    )


def pad_even_variables(f: CnfFormula) -> CnfFormula:
    """If the variable count is odd, add three fresh variables and the clause over them."""
    _require_width3(f, "pad_even_variables")
    n = f.variable_count
    if n % 2 == 0:
        return f
    return CnfFormula(
        variable_count=n + 3,
        clauses=f.clauses + ((n + 1, n + 2, n + 3),),
        clause_width=3,
    )
