"""Network architectures, parameter layout, state enumeration, and forward evaluation.

A network here is a fully connected single-output feed-forward net with layer
widths n-U1-...-UL.  Its trainable parameters live in one frozen flat layout
(see :func:`param_roles`), and a *state* is a tuple of value-set indices, one
per parameter.  All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Iterator, Sequence


class EnumerationGuardError(RuntimeError):
    """Raised when an exhaustive enumeration would exceed its state-count guard."""


DEFAULT_GUARD = 1 << 24


@dataclass(frozen=True)
class Architecture:
    """Layer widths of a single-output fully connected net.

    input_count is the number of inputs n; hidden_sizes are the hidden layer
    widths U1..UL.  The single output neuron always has UL weights; its bias
    is excluded from the parameter count unless include_output_bias is set
    (the count formula and all reported counts assume no output bias).
    """

    input_count: int
    hidden_sizes: tuple
    include_output_bias: bool = False

    def __post_init__(self):
        if self.input_count < 1:
            raise ValueError("input_count must be >= 1")
        if not isinstance(self.hidden_sizes, tuple):
            object.__setattr__(self, "hidden_sizes", tuple(self.hidden_sizes))
        if len(self.hidden_sizes) < 1 or any(u < 1 for u in self.hidden_sizes):
            raise ValueError("hidden_sizes must be a non-empty sequence of positive ints")

    @classmethod
    def parse(cls, text: str, include_output_bias: bool = False) -> "Architecture":
        """Parse the "n-U1-...-UL" string form, e.g. "1-2-2"."""
        try:
            widths = [int(part) for part in text.strip().split("-")]
        except ValueError:
            raise ValueError(f"bad architecture string: {text!r}")
        if len(widths) < 2:
            raise ValueError(f"architecture needs at least one hidden layer: {text!r}")
        return cls(widths[0], tuple(widths[1:]), include_output_bias)

    def __str__(self):
        return "-".join(str(w) for w in (self.input_count,) + self.hidden_sizes)

    @property
    def depth(self) -> int:
        return len(self.hidden_sizes)

    def layer_width(self, l: int) -> int:
        """Width of layer l, with layer 0 being the input layer."""
        return self.input_count if l == 0 else self.hidden_sizes[l - 1]


def param_count(arch: Architecture) -> int:
    """Total number of trainable parameters: sum of (U_{l-1}+1)*U_l plus UL output weights."""
    total = 0
    for l in range(1, arch.depth + 1):
        total += (arch.layer_width(l - 1) + 1) * arch.layer_width(l)
    total += arch.hidden_sizes[-1]
    if arch.include_output_bias:
        total += 1
    return total


@lru_cache(maxsize=None)
def param_roles(arch: Architecture) -> tuple:
    """Flat parameter layout as a tuple of role tuples, one per flat index.

    Roles (all indices 0-based):
      ("w", l, i, j)  weight into neuron i of hidden layer l from source j
      ("b", l, i)     bias of neuron i of hidden layer l
      ("v", j)        output weight on neuron j of the last hidden layer
      ("v0",)         output bias (only when enabled)

    Order: layers l = 1..L; within a layer neurons i in order; within a neuron
    its incoming weights by source index then the bias; then output weights;
    then the output bias if enabled.  This bijection is frozen: every
    permutation, canonical representative, and shard layout depends on it.
    """
    roles = []
    for l in range(1, arch.depth + 1):
        for i in range(arch.layer_width(l)):
            for j in range(arch.layer_width(l - 1)):
                roles.append(("w", l, i, j))
            roles.append(("b", l, i))
    for j in range(arch.hidden_sizes[-1]):
        roles.append(("v", j))
    if arch.include_output_bias:
        roles.append(("v0",))
    assert len(roles) == param_count(arch)
    return tuple(roles)


@lru_cache(maxsize=None)
def role_index(arch: Architecture) -> dict:
    """Inverse of param_roles: role tuple -> flat index."""
    return {role: k for k, role in enumerate(param_roles(arch))}


@dataclass(frozen=True)
class ValueSet:
    """The finite ordered set of exact rational values parameters may take."""

    values: tuple

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.values)
        if len(set(vals)) != len(vals):
            raise ValueError("value set entries must be pairwise distinct")
        if not vals:
            raise ValueError("value set must be non-empty")
        object.__setattr__(self, "values", vals)

    @classmethod
    def parse(cls, text: str) -> "ValueSet":
        """Parse a comma-separated list of exact rationals, e.g. "-1,0,1" or "1/2,1"."""
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if not parts:
            raise ValueError(f"bad value set string: {text!r}")
        return cls(tuple(Fraction(p) for p in parts))

    def __str__(self):
        return ",".join(str(v) for v in self.values)

    def __len__(self):
        return len(self.values)

    def as_floats(self):
        return tuple(float(v) for v in self.values)


def canonical_value_set(V: int) -> ValueSet:
    """The default value set of cardinality V: {-1,1} for V=2, {-1,0,1} for V=3,
    and in general the V integers of smallest magnitude, zero included iff V is odd."""
    if V < 1:
        raise ValueError("V must be >= 1")
    half = V // 2
    vals = list(range(-half, 0)) + ([0] if V % 2 else []) + list(range(1, half + 1))
    return ValueSet(tuple(vals))


def state_count(arch: Architecture, vs: ValueSet) -> int:
    return len(vs) ** param_count(arch)


def index_to_state(index: int, P: int, V: int) -> tuple:
    """The index-th digit vector in lexicographic order (big-endian mixed radix)."""
    digits = [0] * P
    for k in range(P - 1, -1, -1):
        index, digits[k] = divmod(index, V)
    return tuple(digits)


def state_iter(arch: Architecture, vs: ValueSet, start: int = None, stop: int = None) -> Iterator[tuple]:
    """All states as digit tuples in lexicographic order, optionally restricted
    to the index range [start, stop) for sharding."""
    P = param_count(arch)
    V = len(vs)
    total = V ** P
    if start is None and stop is None:
        yield from product(range(V), repeat=P)
        return
    start = 0 if start is None else start
    stop = total if stop is None else stop
    start = max(0, start)
    stop = min(total, stop)
    if start >= stop:
        return
    digits = list(index_to_state(start, P, V))
    for _ in range(stop - start):
        yield tuple(digits)
        # increment the mixed-radix counter
        k = P - 1
        while k >= 0:
            digits[k] += 1
            if digits[k] < V:
                break
            digits[k] = 0
            k -= 1


def shard_ranges(total: int, shards: int):
    """Split [0, total) into `shards` contiguous ranges covering it exactly."""
    if shards < 1:
        raise ValueError("shards must be >= 1")
    step, extra = divmod(total, shards)
    ranges = []
    lo = 0
    for s in range(shards):
        hi = lo + step + (1 if s < extra else 0)
        ranges.append((lo, hi))
        lo = hi
    return ranges


def evaluate(arch: Architecture, state: Sequence[int], vs: ValueSet,
             act: Callable, x: Sequence) -> object:
    """Forward pass h(x): hidden layers apply `act`, the output neuron is affine.

    Works uniformly over exact rationals and floats; the number type follows
    the value set and input.  Summation follows the flat layout order, so the
    result is deterministic for a given state.
    """
    if len(x) != arch.input_count:
        raise ValueError(f"input has {len(x)} coordinates, architecture wants {arch.input_count}")
    P = param_count(arch)
    if len(state) != P:
        raise ValueError(f"state has {len(state)} digits, architecture has {P} parameters")
    vals = [vs.values[d] for d in state]
    k = 0
    y = list(x)
    for l in range(1, arch.depth + 1):
        width_in = arch.layer_width(l - 1)
        out = []
        for _ in range(arch.layer_width(l)):
            z = 0
            for j in range(width_in):
                z = z + vals[k] * y[j]
                k += 1
            z = z + vals[k]  # bias
            k += 1
            out.append(act(z))
        y = out
    h = 0
    for j in range(arch.hidden_sizes[-1]):
        h = h + vals[k] * y[j]
        k += 1
    if arch.include_output_bias:
        h = h + vals[k]
        k += 1
    return h
