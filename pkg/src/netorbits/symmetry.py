"""Permutation symmetry of the parameter space and exact orbit counting.

The symmetry group is the direct product of the symmetric groups on each
hidden layer's neurons: reordering neurons within a layer (carrying their
incoming weights, bias, and outgoing weights along) leaves the network's
function unchanged.  The number of distinct functions is therefore at most
the number of orbits of the induced action on states, which Burnside's lemma
turns into a sum of V^(cycle count) over group elements.  Summing over
conjugacy classes (tuples of integer partitions) makes the exact count
instant for any architecture; a brute-force orbit enumerator serves as the
independent oracle at small scale.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product
from math import factorial, gcd, prod

from .arch import (
    Architecture,
    DEFAULT_GUARD,
    EnumerationGuardError,
    ValueSet,
    param_count,
    param_roles,
    role_index,
    state_iter,
)

# A HiddenPermutation is a tuple of per-layer mappings, the l-th a tuple p
# with p[i] the new index of neuron i of hidden layer l+1 (0-based).
# A ParamPermutation is a tuple image with image[k] the new flat index of
# the parameter at flat index k.


def identity_element(arch: Architecture) -> tuple:
    return tuple(tuple(range(u)) for u in arch.hidden_sizes)


def group_order(arch: Architecture) -> int:
    return prod(factorial(u) for u in arch.hidden_sizes)


def group_elements(arch: Architecture):
    """All elements of the per-layer neuron permutation group, identity first."""
    return product(*(permutations(range(u)) for u in arch.hidden_sizes))


def compose_hidden(g2: tuple, g1: tuple) -> tuple:
    """g2 after g1, layerwise."""
    return tuple(tuple(p2[p1[i]] for i in range(len(p1))) for p1, p2 in zip(g1, g2))


def induced_param_permutation(arch: Architecture, g: tuple) -> tuple:
    """The permutation of flat parameter indices induced by the neuron permutation g.

    Weight (l,i,j) moves to (l, pi_l(i), pi_{l-1}(j)) with inputs never
    permuted; biases follow their neuron; output weights follow the last
    hidden layer; the output bias is fixed.  g -> induced is a group
    homomorphism, faithful as soon as some hidden layer has >= 2 neurons.
    """
    if len(g) != arch.depth or any(len(p) != u for p, u in zip(g, arch.hidden_sizes)):
        raise ValueError("permutation shape does not match architecture")
    idx = role_index(arch)
    image = [0] * param_count(arch)
    for k, role in enumerate(param_roles(arch)):
        if role[0] == "w":
            _, l, i, j = role
            jj = j if l == 1 else g[l - 2][j]
            image[k] = idx[("w", l, g[l - 1][i], jj)]
        elif role[0] == "b":
            _, l, i = role
            image[k] = idx[("b", l, g[l - 1][i])]
        elif role[0] == "v":
            image[k] = idx[("v", g[-1][role[1]])]
        else:  # output bias
            image[k] = k
    return tuple(image)


def apply_perm(state: tuple, image: tuple) -> tuple:
    """Act on a state: the digit at flat index k moves to index image[k]."""
    if len(state) != len(image):
        raise ValueError("state and permutation lengths differ")
    out = [0] * len(state)
    for k, d in enumerate(state):
        out[image[k]] = d
    return tuple(out)


def compose_perms(p2: tuple, p1: tuple) -> tuple:
    """Flat-index composition p2 after p1."""
    return tuple(p2[p1[k]] for k in range(len(p1)))


def cycle_count(image: tuple) -> int:
    """Number of disjoint cycles in the complete factorisation, fixed points included."""
    seen = [False] * len(image)
    cycles = 0
    for k in range(len(image)):
        if not seen[k]:
            cycles += 1
            j = k
            while not seen[j]:
                seen[j] = True
                j = image[j]
    return cycles


# ---------------------------------------------------------------------------
# Conjugacy classes: integer partitions and class sizes


@lru_cache(maxsize=None)
def partitions(n: int) -> tuple:
    """All integer partitions of n as descending tuples."""
    if n == 0:
        return ((),)
    result = []

    def extend(remaining, largest, prefix):
        if remaining == 0:
            result.append(tuple(prefix))
            return
        for part in range(min(largest, remaining), 0, -1):
            prefix.append(part)
            extend(remaining - part, part, prefix)
            prefix.pop()

    extend(n, n, [])
    return tuple(result)


def class_size(partition: tuple) -> int:
    """Number of permutations of sum(partition) elements with this cycle type."""
    n = sum(partition)
    denom = 1
    counts = {}
    for part in partition:
        counts[part] = counts.get(part, 0) + 1
    for k, m in counts.items():
        denom *= k ** m * factorial(m)
    return factorial(n) // denom


def cycle_type(perm: tuple) -> tuple:
    """Cycle type of a single-layer permutation as a descending partition."""
    seen = [False] * len(perm)
    lengths = []
    for k in range(len(perm)):
        if not seen[k]:
            j, length = k, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


def cycle_type_tuples(arch: Architecture):
    """Conjugacy classes of the product group: (per-layer partitions, class size)."""
    per_layer = [partitions(u) for u in arch.hidden_sizes]
    for combo in product(*per_layer):
        size = prod(class_size(p) for p in combo)
        yield combo, size


def cycles_from_types(arch: Architecture, per_layer: tuple) -> int:
    """Cycle count of the induced parameter permutation for any element of a class.

    A row cycle of length a crossed with a column cycle of length b sweeps an
    a*b block of the weight matrix in gcd(a, b) cycles; biases contribute one
    cycle per row cycle, output weights one per last-layer cycle, and the
    input layer is the all-ones partition (inputs are never permuted).
    """
    if len(per_layer) != arch.depth:
        raise ValueError("cycle type tuple does not match architecture depth")
    for p, u in zip(per_layer, arch.hidden_sizes):
        if sum(p) != u:
            raise ValueError(f"partition {p} is not a partition of {u}")
    prev = (1,) * arch.input_count
    t = 0
    for lam in per_layer:
        t += sum(gcd(a, b) for a in lam for b in prev)  # incoming weights
        t += len(lam)  # biases
        prev = lam
    t += len(per_layer[-1])  # output weights
    if arch.include_output_bias:
        t += 1
    return t


def burnside_exact(arch: Architecture, V: int) -> int:
    """Exact number of state orbits under the neuron permutation group.

    Sums class_size * V^t over conjugacy classes and divides by the group
    order; the division must be exact.
    """
    if V < 1:
        raise ValueError("V must be >= 1")
    total = 0
    for per_layer, size in cycle_type_tuples(arch):
        total += size * V ** cycles_from_types(arch, per_layer)
    order = group_order(arch)
    if total % order:
        raise ArithmeticError(
            f"Burnside sum {total} not divisible by group order {order}: layout bug"
        )
    return total // order


def upper_bound(arch: Architecture, V: int) -> Fraction:
    """The identity term of the Burnside sum, V^P / prod(U_l!), as an exact rational.

    This is the asymptotic upper bound on the hypothesis-space size; the exact
    orbit count approaches it from above as V grows.
    """
    if V < 1:
        raise ValueError("V must be >= 1")
    return Fraction(V ** param_count(arch), group_order(arch))


# ---------------------------------------------------------------------------
# Brute-force oracle


@lru_cache(maxsize=None)
def induced_group(arch: Architecture) -> tuple:
    """All induced parameter permutations, identity first.  Only for small groups."""
    return tuple(induced_param_permutation(arch, g) for g in group_elements(arch))


def canonical_representative(arch: Architecture, state: tuple) -> tuple:
    """Lexicographically minimal state in the orbit of `state`."""
    best = state
    for image in induced_group(arch):
        candidate = apply_perm(state, image)
        if candidate < best:
            best = candidate
    return best


def is_canonical(state: tuple, images: tuple) -> bool:
    """Whether `state` is the lexicographic minimum of its orbit under `images`."""
    for image in images:
        out = [0] * len(state)
        for k, d in enumerate(state):
            out[image[k]] = d
        if tuple(out) < state:
            return False
    return True


def orbit_enumerate(arch: Architecture, vs: ValueSet, guard: int = DEFAULT_GUARD):
    """Partition all states into orbits by exhaustive group action.

    Returns (orbit count, sorted list of canonical representatives).  This is
    the independent check on burnside_exact, so it deliberately shares no
    arithmetic with it.
    """
    V = len(vs)
    P = param_count(arch)
    if V ** P > guard:
        raise EnumerationGuardError(
            f"{V}^{P} states exceed the enumeration guard {guard}"
        )
    images = induced_group(arch)
    reps = set()
    for state in state_iter(arch, vs):
        best = state
        for image in images:
            out = [0] * P
            for k, d in enumerate(state):
                out[image[k]] = d
            t = tuple(out)
            if t < best:
                best = t
        reps.add(best)
    return len(reps), sorted(reps)
