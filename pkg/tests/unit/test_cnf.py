"""
Unit tests for CNF parsing, the brute-force oracle and the formula transforms.
"""
import pytest
from pydantic import ValidationError

from nashgraph.cnf import (
    first_unsatisfied_clause,
    pad_even_variables,
    parse_dimacs,
    sat_oracle,
    satisfies,
    widen_to_k_of_k2,
)
from nashgraph.errors import BudgetExceededError, CnfFormatError, PreconditionError
from nashgraph.models import CnfFormula


def formula(n, *clauses):
    return CnfFormula(variable_count=n, clauses=tuple(tuple(c) for c in clauses))


class TestParseDimacs:
    """Test DIMACS parsing."""

    def test_single_clause(self):
        f = parse_dimacs("p cnf 1 1\n1 -1 1 0\n")
        assert f.variable_count == 1
        assert f.clauses == ((1, -1, 1),)
        assert f.clause_width == 3

    def test_empty_formula(self):
        f = parse_dimacs("p cnf 0 0\n")
        assert f.variable_count == 0
        assert f.clauses == ()

    def test_comments_and_multiline_clauses(self):
        text = "c a comment\np cnf 3 2\n1 -2\n3 0 -1 2\n-3 0\n%\n0\n"
        f = parse_dimacs(text)
        assert f.clauses == ((1, -2, 3), (-1, 2, -3))

    def test_mixed_widths(self):
        f = parse_dimacs("p cnf 3 2\n1 2 3 0\n1 0\n")
        assert f.clause_width is None

    def test_missing_header(self):
        with pytest.raises(CnfFormatError, match="missing"):
            parse_dimacs("c only comments\n")

    def test_clause_before_header(self):
        with pytest.raises(CnfFormatError) as info:
            parse_dimacs("1 2 3 0\np cnf 3 1\n")
        assert info.value.line == 1

    def test_literal_out_of_range(self):
        with pytest.raises(CnfFormatError) as info:
            parse_dimacs("p cnf 2 1\n1 2 3 0\n")
        assert info.value.line == 2
        assert "line 2" in str(info.value)

    def test_unterminated_clause(self):
        with pytest.raises(CnfFormatError, match="not terminated"):
            parse_dimacs("p cnf 3 1\n1 2 3\n")

    def test_clause_count_mismatch(self):
        with pytest.raises(CnfFormatError, match="declares 2 clauses"):
            parse_dimacs("p cnf 3 2\n1 2 3 0\n")

    def test_bad_token(self):
        with pytest.raises(CnfFormatError, match="integer"):
            parse_dimacs("p cnf 3 1\n1 x 3 0\n")

    def test_model_rejects_zero_literal(self):
        with pytest.raises(ValidationError):
            formula(2, (1, 0, 2))


class TestSatOracle:
    """Test brute-force satisfiability."""

    def test_single_positive_clause(self):
        result = sat_oracle(formula(1, (1, 1, 1)))
        assert result.satisfiable
        assert result.assignment == (True,)

    def test_contradiction(self):
        assert not sat_oracle(formula(1, (1, 1, 1), (-1, -1, -1))).satisfiable

    def test_k_of_width(self):
        f = formula(5, (1, 2, 3, 4, 5))
        assert satisfies(f, (True,) * 5, 'k_of_width', 3)
        assert not satisfies(f, (True, True, False, False, False), 'k_of_width', 3)
        result = sat_oracle(f, 'k_of_width', 3)
        assert result.satisfiable
        assert sum(result.assignment) >= 3

    def test_all_false_first(self):
        result = sat_oracle(formula(2, (-1, -2, -1)))
        assert result.assignment == (False, False)

    def test_cap(self):
        with pytest.raises(BudgetExceededError) as info:
            sat_oracle(formula(3, (1, 2, 3)), cap=2)
        assert info.value.budget == 'sat'

    def test_unknown_mode(self):
        with pytest.raises(PreconditionError):
            sat_oracle(formula(1, (1,)), mode='most')

    def test_first_unsatisfied_clause(self):
        f = formula(2, (1, 2, 1), (-1, -2, -1))
        assert first_unsatisfied_clause(f, (True, True)) == 2
        assert first_unsatisfied_clause(f, (True, False)) is None

    def test_assignment_length_checked(self):
        with pytest.raises(PreconditionError):
            satisfies(formula(2, (1, 2, 1)), (True,))


class TestTransforms:
    """Test widening and padding."""

    def test_widen_k3(self):
        f = widen_to_k_of_k2(formula(3, (1, -2, 3)), 3)
        assert f.variable_count == 5
        assert f.clauses == ((1, -2, 3, 4, 5),)
        assert f.clause_width == 5

    def test_widen_empty(self):
        f = widen_to_k_of_k2(formula(0), 3)
        assert f.variable_count == 2
        assert f.clauses == ()

    def test_widen_k4(self):
        f = widen_to_k_of_k2(formula(3, (1, 2, 3)), 4)
        assert len(f.clauses[0]) == 6
        assert f.variable_count == 6

    def test_widen_rejects_small_k(self):
        with pytest.raises(PreconditionError):
            widen_to_k_of_k2(formula(3, (1, 2, 3)), 2)

    def test_widen_preserves_satisfiability(self):
        for f in (formula(1, (1, 1, 1)), formula(1, (1, 1, 1), (-1, -1, -1)),
                  formula(3, (1, 2, 3), (-1, -2, -3), (1, -2, 3))):
            widened = widen_to_k_of_k2(f, 3)
            assert sat_oracle(f).satisfiable == sat_oracle(widened, 'k_of_width', 3).satisfiable

    def test_pad_odd(self):
        f = pad_even_variables(formula(3, (1, 2, 3)))
        assert f.variable_count == 6
        assert f.clauses[-1] == (4, 5, 6)

    def test_pad_even_unchanged(self):
        f = formula(4, (1, 2, 3))
        assert pad_even_variables(f) == f

    def test_pad_single_variable(self):
        assert pad_even_variables(formula(1, (1, 1, 1))).variable_count == 4

    def test_pad_requires_width_three(self):
        with pytest.raises(PreconditionError, match="width-3"):
            pad_even_variables(formula(2, (1, 2)))
