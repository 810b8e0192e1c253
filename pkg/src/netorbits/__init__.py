"""Exact counting of the distinct functions a finite-valued feed-forward net can realize.

Submodules:
  arch      architectures, parameter layout, state enumeration, forward evaluation
  symmetry  neuron-permutation group, induced parameter action, exact orbit counts
  symbolic  canonical normal forms under an uninterpreted activation
  numeric   grid evaluation and tolerance-based function dedup
  cli       command-line front end (counts, sweeps, oracle)
"""

from .arch import Architecture, ValueSet, canonical_value_set, evaluate, param_count, state_iter
from .numeric import count_unique_numeric, evaluate_grid, make_grid
from .symbolic import NormalizationPolicy, build_normal_form, count_unique_symbolic
from .symmetry import (
    burnside_exact,
    canonical_representative,
    orbit_enumerate,
    upper_bound,
)

__all__ = [
    "Architecture",
    "ValueSet",
    "canonical_value_set",
    "evaluate",
    "param_count",
    "state_iter",
    "burnside_exact",
    "upper_bound",
    "orbit_enumerate",
    "canonical_representative",
    "NormalizationPolicy",
    "build_normal_form",
    "count_unique_symbolic",
    "evaluate_grid",
    "make_grid",
    "count_unique_numeric",
]

__version__ = "0.1.0"
