"""
Unit tests for the text formats and atomic writes.

Tests:
- capgraph parsing (with line numbers on errors) and formatting
- Sidecar mapping format
- Atomic write (lock → temp → fsync → rename)
- No partial writes on failure
"""
import shutil
import tempfile
from pathlib import Path
from unittest.mock import patch

import pytest

from nashgraph.errors import GraphFormatError, PreconditionError
from nashgraph.gadgets import gadget_k2
from nashgraph.graph_io import format_graph, format_sidecar, parse_graph, parse_sidecar, read_graph, write_atomic
from nashgraph.models import CnfFormula
from tests.unit.oracles import path

PATH_TEXT = """# path with capacity 1
capgraph 3 2
k 0 1
k 1 1
k 2 1
e 0 1
e 1 2
"""


@pytest.fixture
def temp_dir():
    """Create a temporary directory for testing."""
    temp = tempfile.mkdtemp()
    yield Path(temp)
    shutil.rmtree(temp)


class TestParseGraph:
    """Test the capgraph reader."""

    def test_parse(self):
        g = parse_graph(PATH_TEXT)
        assert g == path(3, 1)

    def test_format_then_parse(self):
        g = path(5, 2)
        assert parse_graph(format_graph(g, comment="two\nlines")) == g

    def test_format_layout(self):
        text = format_graph(path(3, 1))
        assert text.splitlines() == ["capgraph 3 2", "k 0 1", "k 1 1", "k 2 1", "e 0 1", "e 1 2"]

    def test_missing_header(self):
        with pytest.raises(GraphFormatError, match="header"):
            parse_graph("# nothing here\n")

    @pytest.mark.parametrize("text, line, fragment", [
        ("graph 1 0\nk 0 0\n", 1, "header"),
        ("capgraph 2 0\nk 0 0\nk 0 1\n", 3, "duplicate"),
        ("capgraph 1 0\nk 3 0\n", 2, "out of range"),
        ("capgraph 1 0\nk 0 -1\n", 2, "negative"),
        ("capgraph 2 1\nk 0 0\nk 1 0\ne 1 0\n", 4, "u < v"),
        ("capgraph 2 1\nk 0 0\nk 1 0\ne 0 1\ne 0 1\n", 5, "duplicate edge"),
        ("capgraph 3 1\nk 0 0\nk 1 0\nk 2 0\ne 0 1\ne 1 2\n", 6, "more than"),
        ("capgraph 2 1\nk 0 0\ne 0 1\nk 1 0\n", 4, "after"),
        ("capgraph 1 0\nk 0 x\n", 2, "integer"),
        ("capgraph 1 0\nv 0 0\n", 2, "unknown"),
    ])
    def test_errors_name_the_line(self, text, line, fragment):
        with pytest.raises(GraphFormatError, match=fragment) as info:
            parse_graph(text)
        assert info.value.line == line
        assert str(info.value).startswith(f"line {line}:")

    def test_missing_capacity(self):
        with pytest.raises(GraphFormatError, match="no 'k' line"):
            parse_graph("capgraph 2 0\nk 0 0\n")

    def test_too_few_edges(self):
        with pytest.raises(GraphFormatError, match="declares 2 edges"):
            parse_graph("capgraph 3 2\nk 0 0\nk 1 0\nk 2 0\ne 0 1\n")

    def test_read_graph(self, temp_dir):
        target = temp_dir / "p.g"
        target.write_text(PATH_TEXT)
        assert read_graph(str(target)) == path(3, 1)


class TestSidecar:
    """Test the gadget mapping file."""

    def test_lists_every_vertex(self):
        artifact = gadget_k2(CnfFormula(variable_count=4, clauses=((1, -2, 3),)))
        parsed = parse_sidecar(format_sidecar(artifact))
        assert parsed['var'] == artifact.var_vertices
        assert parsed['clause'] == artifact.clause_vertices
        assert len(parsed['region']) == artifact.graph.vertex_count
        assert parsed['region'][artifact.q[0]] == 'Q'

    def test_duplicate_entry(self):
        with pytest.raises(GraphFormatError, match="duplicate") as info:
            parse_sidecar("var 1 0 1\nvar 1 2 3\n")
        assert info.value.line == 2

    def test_wrong_field_count(self):
        with pytest.raises(GraphFormatError, match="needs 2 fields"):
            parse_sidecar("clause 1\n")


class TestAtomicWrite:
    """Test atomic write operations."""

    def test_atomic_write_success(self, temp_dir):
        target = temp_dir / "out.g"
        write_atomic(str(target), PATH_TEXT)
        assert target.read_text() == PATH_TEXT
        assert not list(temp_dir.glob(".out.g_tmp_*"))

    def test_overwrite(self, temp_dir):
        target = temp_dir / "out.g"
        write_atomic(str(target), "first\n")
        write_atomic(str(target), "second\n")
        assert target.read_text() == "second\n"

    def test_no_partial_write_on_failure(self, temp_dir):
        """Test that failed writes don't leave partial files."""
        target = temp_dir / "out.g"
        write_atomic(str(target), PATH_TEXT)

        with patch('os.replace', side_effect=IOError("Simulated failure")):
            with pytest.raises(IOError):
                write_atomic(str(target), "capgraph 0 0\n")

        assert target.read_text() == PATH_TEXT
        assert not list(temp_dir.glob(".out.g_tmp_*"))

    def test_missing_directory(self, temp_dir):
        with pytest.raises(PreconditionError, match="does not exist"):
            write_atomic(str(temp_dir / "nope" / "out.g"), "x")
