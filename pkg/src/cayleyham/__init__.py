"""Hamiltonian cycles in Cayley graphs of odd-order groups whose commutator
subgroup is cyclic with at most two prime divisors: constructions, a
brute-force oracle, and self-contained verifiable certificates."""

from .groups import (
    Element,
    GenSet,
    InconsistentPresentation,
    PcGroup,
    PcPresentation,
    Subgroup,
    UnknownSymbol,
    closure,
    derived_subgroup,
    generates,
    instance_from_json,
    instance_to_json,
    make_group,
    structural_predicates,
    subgroup,
)

__version__ = "0.1.0"
