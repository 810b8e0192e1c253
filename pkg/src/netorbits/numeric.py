"""Numeric enumeration: grid evaluation of every state and tolerance dedup.

Each state's function is sampled on a fixed grid of 1001 points in [-1, 1]
for a concrete activation, and the resulting output vectors are deduplicated
with greedy leader clustering at a Euclidean tolerance of 1e-4: vectors are
scanned in lexicographic state order and a vector starts a new cluster iff it
is farther than the tolerance from every existing cluster leader.

Two accelerations keep this linear-ish without changing the result:
  - exact byte-identical vectors are collapsed first (a repeat lands in the
    same cluster its first occurrence did, so dropping it cannot change the
    leader set);
  - leaders are bucketed by three rounded mean summaries; each summary of two
    vectors within the tolerance differs by at most the tolerance, so probing
    the 27 neighbouring buckets finds every leader that could be in range.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .arch import (
    Architecture,
    DEFAULT_GUARD,
    EnumerationGuardError,
    ValueSet,
    param_count,
    shard_ranges,
)

GRID_POINTS = 1001
DEFAULT_TOL = 1e-4

ACTIVATIONS = ("relu", "tanh", "sigmoid", "identity")


def activation_fn(name: str):
    if name == "relu":
        return lambda z: np.maximum(z, 0.0)
    if name == "tanh":
        return np.tanh
    if name == "sigmoid":
        return lambda z: 1.0 / (1.0 + np.exp(-z))
    if name == "identity":
        return lambda z: z
    raise ValueError(f"unknown activation {name!r}; one of {ACTIVATIONS}")


def make_grid(points: int = GRID_POINTS) -> np.ndarray:
    """Uniform grid on [-1, 1]; the default 1001 points give spacing 2/1000."""
    if points < 2:
        raise ValueError("grid needs at least 2 points")
    return np.linspace(-1.0, 1.0, points)


def _forward_batch(arch: Architecture, values: np.ndarray, act, grid: np.ndarray) -> np.ndarray:
    """Forward pass for a (B, P) float array of parameter values on the whole grid.

    Returns (B, G) outputs.  Layer blocks are sliced straight out of the flat
    layout: per layer a (B, U_l, U_{l-1}+1) block whose last column is the bias.
    """
    B = values.shape[0]
    G = grid.shape[0]
    y = np.broadcast_to(grid, (B, 1, G))  # n = 1 for grid experiments
    k = 0
    for l in range(1, arch.depth + 1):
        w_in = arch.layer_width(l - 1)
        u = arch.layer_width(l)
        block = values[:, k:k + (w_in + 1) * u].reshape(B, u, w_in + 1)
        k += (w_in + 1) * u
        z = np.einsum("bij,bjg->big", block[:, :, :-1], y) + block[:, :, -1:]
        y = act(z)
    u = arch.hidden_sizes[-1]
    out = np.einsum("bj,bjg->bg", values[:, k:k + u], y)
    k += u
    if arch.include_output_bias:
        out = out + values[:, k:k + 1]
    return out


def evaluate_grid(arch: Architecture, state, vs: ValueSet, act_name: str,
                  grid: np.ndarray = None) -> np.ndarray:
    """Output vector y_i = h(x_i) over the grid for one state."""
    if arch.input_count != 1:
        raise ValueError("grid evaluation is defined for single-input architectures")
    if grid is None:
        grid = make_grid()
    vals = np.asarray(vs.as_floats())[np.asarray(state, dtype=np.intp)]
    out = _forward_batch(arch, vals[None, :], activation_fn(act_name), grid)[0]
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("non-finite output vector")
    return out


def _digit_block(start: int, stop: int, P: int, V: int) -> np.ndarray:
    """Digit vectors for lexicographic state indices [start, stop) as (N, P) ints."""
    idx = np.arange(start, stop, dtype=np.int64)
    digits = np.empty((idx.shape[0], P), dtype=np.intp)
    for k in range(P - 1, -1, -1):
        idx, digits[:, k] = np.divmod(idx, V)
    return digits


def distinct_vectors(arch: Architecture, vs: ValueSet, act_name: str,
                     grid: np.ndarray, start: int, stop: int,
                     batch: int = 2048):
    """Byte-distinct output vectors for state indices [start, stop), in
    first-occurrence order.  Yields (digest, state_index, vector)."""
    if arch.input_count != 1:
        raise ValueError("grid evaluation is defined for single-input architectures")
    P = param_count(arch)
    V = len(vs)
    float_vals = np.asarray(vs.as_floats())
    act = activation_fn(act_name)
    seen = set()
    for lo in range(start, stop, batch):
        hi = min(lo + batch, stop)
        digits = _digit_block(lo, hi, P, V)
        out = _forward_batch(arch, float_vals[digits], act, grid)
        if not np.all(np.isfinite(out)):
            raise FloatingPointError("non-finite output vector in batch")
        for r in range(out.shape[0]):
            digest = hashlib.sha1(out[r].tobytes()).digest()
            if digest not in seen:
                seen.add(digest)
                yield digest, lo + r, out[r].copy()


class LeaderClusters:
    """Greedy leader clustering at a Euclidean tolerance.

    Feed vectors in stream order; each either joins the first existing leader
    within `tol` or becomes a new leader.  Membership queries are pre-filtered
    through buckets keyed by rounded means of the whole vector and its two
    halves; each key moves by at most one bucket between vectors within tol,
    so scanning the 3x3x3 neighbourhood is exhaustive.
    """

    def __init__(self, tol: float):
        if tol < 0:
            raise ValueError("tolerance must be >= 0")
        self.tol = tol
        self.leaders = []
        self._buckets = {}

    def _key(self, v: np.ndarray) -> tuple:
        g = self.tol if self.tol > 0 else 1.0
        half = v.shape[0] // 2
        return (
            int(round(float(v.mean()) / g)),
            int(round(float(v[:half].mean()) / g)),
            int(round(float(v[half:].mean()) / g)),
        )

    def add(self, v: np.ndarray) -> bool:
        """Insert a vector; returns True if it started a new cluster."""
        if self.tol > 0:
            k0, k1, k2 = self._key(v)
            candidates = []
            for d0 in (-1, 0, 1):
                for d1 in (-1, 0, 1):
                    for d2 in (-1, 0, 1):
                        candidates.extend(self._buckets.get((k0 + d0, k1 + d1, k2 + d2), ()))
            if candidates:
                candidates.sort()
                stack = np.stack([self.leaders[i] for i in candidates])
                dists = np.sqrt(np.sum((stack - v) ** 2, axis=1))
                if np.any(dists <= self.tol):
                    return False
        idx = len(self.leaders)
        self.leaders.append(v)
        self._buckets.setdefault(self._key(v), []).append(idx)
        return True

    def __len__(self):
        return len(self.leaders)


def _shard_worker(args):
    arch, vs, act_name, grid, start, stop = args
    return list(distinct_vectors(arch, vs, act_name, grid, start, stop))


def count_unique_numeric(arch: Architecture, vs: ValueSet, act_name: str,
                         grid: np.ndarray = None, tol: float = DEFAULT_TOL,
                         guard: int = DEFAULT_GUARD, shards: int = 1,
                         workers: int = None, return_clusters: bool = False):
    """Number of distinct output vectors at the given Euclidean tolerance.

    Evaluation is sharded over contiguous state ranges (optionally in
    parallel processes); the leader scan itself is a serial reduction over
    the globally ordered stream of first-occurrence vectors, so the count is
    deterministic and independent of the shard count.
    """
    if grid is None:
        grid = make_grid()
    V = len(vs)
    P = param_count(arch)
    total = V ** P
    if total > guard:
        raise EnumerationGuardError(f"{V}^{P} states exceed the enumeration guard {guard}")

    ranges = shard_ranges(total, shards)
    jobs = [(arch, vs, act_name, grid, lo, hi) for lo, hi in ranges]
    if workers and workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            shard_results = list(pool.map(_shard_worker, jobs))
    else:
        shard_results = [_shard_worker(job) for job in jobs]

    clusters = LeaderClusters(tol)
    leaders_meta = []
    seen = set()
    for result in shard_results:
        for digest, state_index, vec in result:
            if digest in seen:  # duplicate across shard boundaries
                continue
            seen.add(digest)
            if clusters.add(vec):
                leaders_meta.append((state_index, vec))
    if return_clusters:
        return len(clusters), leaders_meta
    return len(clusters)


def write_leaders_csv(path, arch: Architecture, vs: ValueSet, leaders_meta, grid=None):
    """Dump cluster leaders as CSV: state digits then the grid outputs."""
    import csv

    from .arch import index_to_state

    if grid is None:
        grid = make_grid()
    P = param_count(arch)
    V = len(vs)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"d{k}" for k in range(P)] + [f"y{i}" for i in range(len(grid))])
        for state_index, vec in leaders_meta:
            digits = index_to_state(state_index, P, V)
            writer.writerow(list(digits) + [repr(float(y)) for y in vec])
