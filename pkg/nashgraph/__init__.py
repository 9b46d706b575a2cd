"""
nashgraph: DP-Nash subgraphs and D-sets of capacitated graphs.

The public surface is re-exported here; see USAGE.md for the CLI.
"""
__version__ = "0.1.0"

from nashgraph.cnf import parse_dimacs, sat_oracle  # noqa: E402
from nashgraph.construct import canonical_nash, construct_nash, construct_nash_seeded, violation_subgraph  # noqa: E402
from nashgraph.core import (  # noqa: E402
    from_edges,
    from_networkx,
    is_dset,
    normalize,
    partition_xyz,
    to_networkx,
    validate_nash,
)
from nashgraph.decide import check_mstar, check_ostar, compute_lw, unique_dset, unique_nash  # noqa: E402
from nashgraph.enumeration import count_dsets, enumerate_dsets, enumerate_dsets_pruned  # noqa: E402
from nashgraph.gadgets import claim_b_witness, gadget_k, gadget_k2  # noqa: E402
from nashgraph.models import CapacitatedGraph, NashSubgraph  # noqa: E402

__all__ = [
    'CapacitatedGraph', 'NashSubgraph',
    'from_edges', 'from_networkx', 'to_networkx', 'normalize', 'partition_xyz', 'validate_nash', 'is_dset',
    'construct_nash', 'construct_nash_seeded', 'canonical_nash', 'violation_subgraph',
    'unique_nash', 'unique_dset', 'compute_lw', 'check_ostar', 'check_mstar',
    'enumerate_dsets', 'enumerate_dsets_pruned', 'count_dsets',
    'parse_dimacs', 'sat_oracle', 'gadget_k2', 'gadget_k', 'claim_b_witness',
]
