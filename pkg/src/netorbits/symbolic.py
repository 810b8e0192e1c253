"""Canonical symbolic normal forms under an uninterpreted activation.

Every state's function is reduced to a nested affine form: an exact rational
constant plus an ordered list of (atom, coefficient) terms, where an atom is
either an input variable or an application of the uninterpreted activation to
another affine form.  Equality of normal forms is structural, so counting
distinct functions over all states is a set-membership problem.  Forms are
plain hashable tuples:

    form = (constant: Fraction, ((atom, coeff), ...))   terms sorted by atom
    atom = (VAR, input_index) | (SIG, form)

Atoms compare as tuples: variables before activation atoms, variables by
index, activation atoms by recursive comparison of their arguments.  The
normalization policy controls whether like atoms are merged and whether
zero-coefficient terms are kept; both choices change the count, so every
reported count names its policy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arch import (
    Architecture,
    DEFAULT_GUARD,
    EnumerationGuardError,
    ValueSet,
    param_count,
    state_iter,
)
from .symmetry import induced_group, is_canonical

VAR = 0
SIG = 1

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class NormalizationPolicy:
    """How far a term list is simplified before structural comparison.

    The default keeps the raw sorted multiset of terms: like atoms are not
    merged and zero coefficients are kept.  That is the faithful quotient by
    summation reordering only, and it is the policy whose counts the exact
    orbit counter brackets most tightly; merging like terms identifies
    strictly more states (repeated-neuron multiplicities collapse), so its
    counts can fall below the orbit count even for shallow nets.
    """

    combine_like_terms: bool = False
    drop_zero_terms: bool = False

    def __post_init__(self):
        if self.drop_zero_terms and not self.combine_like_terms:
            raise ValueError("drop_zero_terms requires combine_like_terms")

    def label(self) -> str:
        if not self.combine_like_terms:
            return "nocombine"
        return "combine+drop0" if self.drop_zero_terms else "combine+keep0"

    @classmethod
    def from_label(cls, label: str) -> "NormalizationPolicy":
        table = {
            "nocombine": cls(False, False),
            "combine+keep0": cls(True, False),
            "combine+drop0": cls(True, True),
        }
        if label not in table:
            raise ValueError(f"unknown policy {label!r}; one of {sorted(table)}")
        return table[label]


DEFAULT_POLICY = NormalizationPolicy(False, False)
ALL_POLICIES = (
    NormalizationPolicy(False, False),
    NormalizationPolicy(True, False),
    NormalizationPolicy(True, True),
)


def make_form(constant: Fraction, terms, policy: NormalizationPolicy) -> tuple:
    """Normalize a term list into a canonical form per the policy."""
    if policy.combine_like_terms:
        merged = {}
        for atom, coeff in terms:
            merged[atom] = merged.get(atom, ZERO) + coeff
        if policy.drop_zero_terms:
            items = [(a, c) for a, c in merged.items() if c != 0]
        else:
            items = list(merged.items())
        items.sort(key=lambda t: t[0])
    else:
        items = sorted(terms)
    return (constant, tuple(items))


def build_normal_form(arch: Architecture, state: tuple, vs: ValueSet,
                      policy: NormalizationPolicy = DEFAULT_POLICY) -> tuple:
    """Bottom-up canonical form of the network function for one state.

    Each hidden neuron becomes a unit-coefficient activation atom over the
    affine form of its inputs; the output is the affine combination of the
    last layer's atoms.  Deterministic: identical states give identical
    structures.
    """
    vals = [vs.values[d] for d in state]
    k = 0
    # sources for layer 1 are the input variables
    sources = [(ZERO, (((VAR, j), ONE),)) for j in range(arch.input_count)]
    for l in range(1, arch.depth + 1):
        out = []
        for _ in range(arch.layer_width(l)):
            const = ZERO
            terms = []
            for j in range(arch.layer_width(l - 1)):
                w = vals[k]
                k += 1
                src_const, src_terms = sources[j]
                const += w * src_const
                for atom, coeff in src_terms:
                    terms.append((atom, w * coeff))
            const += vals[k]  # bias
            k += 1
            arg = make_form(const, terms, policy)
            out.append((ZERO, (((SIG, arg), ONE),)))
        sources = out
    const = ZERO
    terms = []
    for j in range(arch.hidden_sizes[-1]):
        w = vals[k]
        k += 1
        src_const, src_terms = sources[j]
        const += w * src_const
        for atom, coeff in src_terms:
            terms.append((atom, w * coeff))
    if arch.include_output_bias:
        const += vals[k]
        k += 1
    return make_form(const, terms, policy)


def render_form(form: tuple) -> str:
    """Deterministic single-line serialization, for export and diffing."""
    const, terms = form
    parts = []
    if const != 0 or not terms:
        parts.append(str(const))
    for atom, coeff in terms:
        if atom[0] == VAR:
            parts.append(f"{coeff}*x{atom[1]}")
        else:
            parts.append(f"{coeff}*s({render_form(atom[1])})")
    return " + ".join(parts)


def _count_range(arch, vs, policy, start, stop, use_orbits):
    images = induced_group(arch) if use_orbits else None
    forms = set()
    for state in state_iter(arch, vs, start, stop):
        if use_orbits and not is_canonical(state, images):
            continue
        forms.add(build_normal_form(arch, state, vs, policy))
    return forms


def iter_unique_forms(arch: Architecture, vs: ValueSet,
                      policy: NormalizationPolicy = DEFAULT_POLICY,
                      use_orbits: bool = True, guard: int = DEFAULT_GUARD,
                      shards: int = 1):
    """The set of distinct normal forms over all states, in sorted order.

    With use_orbits, only the lexicographically minimal state of each orbit is
    expanded; normal forms are constant on orbits, so the result is the same.
    Shards split the state range; each shard's form set merges by union, so
    the result is independent of the shard count.
    """
    V = len(vs)
    P = param_count(arch)
    total = V ** P
    if total > guard:
        raise EnumerationGuardError(f"{V}^{P} states exceed the enumeration guard {guard}")
    from .arch import shard_ranges

    forms = set()
    for start, stop in shard_ranges(total, shards):
        forms |= _count_range(arch, vs, policy, start, stop, use_orbits)
    return sorted(forms)


def count_unique_symbolic(arch: Architecture, vs: ValueSet,
                          policy: NormalizationPolicy = DEFAULT_POLICY,
                          use_orbits: bool = True, guard: int = DEFAULT_GUARD,
                          shards: int = 1) -> int:
    """Number of distinct normal forms over all states."""
    return len(iter_unique_forms(arch, vs, policy, use_orbits, guard, shards))
