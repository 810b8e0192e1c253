"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s`.  The V=3 enumerations are
the slow part (a few minutes total); they carry the `slow` marker.
"""

import random
import time
from fractions import Fraction

import pytest

from netorbits.arch import (
    Architecture,
    canonical_value_set,
    evaluate,
    param_count,
)
from netorbits.cli import run_sweep, write_report, read_report
from netorbits.numeric import count_unique_numeric, make_grid
from netorbits.symbolic import (
    ALL_POLICIES,
    build_normal_form,
    count_unique_symbolic,
)
from netorbits.symmetry import (
    apply_perm,
    burnside_exact,
    compose_hidden,
    compose_perms,
    cycle_count,
    cycle_type,
    cycles_from_types,
    group_elements,
    group_order,
    identity_element,
    induced_param_permutation,
    orbit_enumerate,
    upper_bound,
)

A14 = Architecture.parse("1-4")
A122 = Architecture.parse("1-2-2")

# Reference numeric dedup counts (arch, V, activation) -> count
NUMERIC_TARGETS = {
    ("1-4", 2, "relu"): 41, ("1-4", 2, "tanh"): 25, ("1-4", 2, "sigmoid"): 125,
    ("1-2-2", 2, "relu"): 147, ("1-2-2", 2, "tanh"): 67, ("1-2-2", 2, "sigmoid"): 573,
    ("1-4", 3, "relu"): 277, ("1-4", 3, "tanh"): 321, ("1-4", 3, "sigmoid"): 2121,
    ("1-2-2", 3, "relu"): 689, ("1-2-2", 3, "tanh"): 2165, ("1-2-2", 3, "sigmoid"): 16169,
}


def report(n, message):
    print(f"\nACCEPTANCE {n} PASS: {message}")


@pytest.fixture(scope="module")
def numeric_counts():
    grid = make_grid()
    counts = {}
    for (text, v, act) in NUMERIC_TARGETS:
        arch = Architecture.parse(text)
        t0 = time.perf_counter()
        counts[(text, v, act)] = count_unique_numeric(
            arch, canonical_value_set(v), act, grid)
        assert time.perf_counter() - t0 < 1800
    return counts


@pytest.fixture(scope="module")
def symbolic_counts():
    counts = {}
    for text in ("1-4", "1-2-2"):
        arch = Architecture.parse(text)
        for v in (2, 3):
            for policy in ALL_POLICIES:
                counts[(text, v, policy.label())] = count_unique_symbolic(
                    arch, canonical_value_set(v), policy)
    return counts


def test_criterion_1_exact_orbit_counts():
    t0 = time.perf_counter()
    assert burnside_exact(A14, 2) == 330
    t1 = time.perf_counter()
    assert burnside_exact(A14, 3) == 27405
    t2 = time.perf_counter()
    assert t1 - t0 < 1.0 and t2 - t1 < 1.0
    report(1, f"exact counts 330 / 27405 in {t2 - t0:.3f}s")


def test_criterion_2_dual_method_agreement():
    t0 = time.perf_counter()
    cases = [("1-2", 2), ("1-3", 2), ("1-2-2", 2), ("1-2", 3)]
    for text, v in cases:
        arch = Architecture.parse(text)
        enumerated, _ = orbit_enumerate(arch, canonical_value_set(v))
        assert enumerated == burnside_exact(arch, v), (text, v)
    dt = time.perf_counter() - t0
    assert dt < 60
    report(2, f"enumeration == class-sum on {len(cases)} configs in {dt:.1f}s")


@pytest.mark.slow
def test_criterion_3_symbolic_counts(symbolic_counts):
    t0 = time.perf_counter()
    # shallow counts reproduce the reference values exactly under the default
    # (raw multiset) policy
    assert symbolic_counts[("1-4", 2, "nocombine")] == 330
    assert symbolic_counts[("1-4", 3, "nocombine")] == 27405
    # the combining policy provably cannot reproduce them: merging like
    # sigma-terms identifies states with different neuron multiplicities
    assert symbolic_counts[("1-4", 2, "combine+keep0")] == 306 != 330
    # deep counts stay below the orbit count under every policy
    for v, orbit in ((2, 1168), (3, 136323)):
        assert burnside_exact(A122, v) == orbit
        for policy in ALL_POLICIES:
            assert symbolic_counts[("1-2-2", v, policy.label())] <= orbit
    # which policy reproduces the reference deep values 1128 / 132921
    matching = [p.label() for p in ALL_POLICIES
                if symbolic_counts[("1-2-2", 2, p.label())] == 1128
                and symbolic_counts[("1-2-2", 3, p.label())] == 132921]
    assert "nocombine" in matching
    dt = time.perf_counter() - t0
    assert dt < 600
    report(3, "shallow 330/27405 exact under the raw-multiset policy; deep counts "
              f"<= orbit counts under all policies; policies reproducing 1128/132921: "
              f"{matching} (the combine policy gives 306, so the raw-multiset policy "
              f"is the default); fixture+checks {dt:.1f}s")


@pytest.mark.slow
def test_criterion_4_numeric_counts(numeric_counts):
    deviations = []
    for key, target in NUMERIC_TARGETS.items():
        got = numeric_counts[key]
        slack = max(0.02 * target, 2)
        assert abs(got - target) <= slack, (key, got, target)
        if got != target:
            deviations.append((key, got, target))
    report(4, f"all 12 reference numeric counts within max(2%, 2); "
              f"exact matches: {12 - len(deviations)}/12, deviations: {deviations}")


@pytest.mark.slow
def test_criterion_5_depth_beats_width(numeric_counts, symbolic_counts):
    for v in (2, 3):
        assert burnside_exact(A122, v) > burnside_exact(A14, v)
        assert symbolic_counts[("1-2-2", v, "nocombine")] > \
            symbolic_counts[("1-4", v, "nocombine")]
        for act in ("relu", "tanh", "sigmoid"):
            assert numeric_counts[("1-2-2", v, act)] > numeric_counts[("1-4", v, act)]
    report(5, "1-2-2 strictly beats 1-4 at equal parameter count for every "
              "counting method at V in {2, 3}")


def test_criterion_6_bound_tightens():
    for text in ("1-2", "1-4", "1-2-2"):
        arch = Architecture.parse(text)
        prev = None
        for v in range(2, 9):
            ratio = Fraction(burnside_exact(arch, v)) / upper_bound(arch, v)
            assert ratio >= 1
            if prev is not None:
                assert ratio < prev, (text, v)
            prev = ratio
    report(6, "exact/bound ratio >= 1 and strictly decreasing for V=2..8 "
              "on 1-2, 1-4, 1-2-2 (exact rational comparison)")


@pytest.mark.slow
def test_criterion_7_property_suites(numeric_counts, symbolic_counts):
    rng = random.Random(42)

    # exact action invariance, 10^4 randomized cases
    arch = A122
    vs = canonical_value_set(3)
    elements = [induced_param_permutation(arch, g) for g in group_elements(arch)]
    act = lambda z: z * z + 1
    P = param_count(arch)
    for _ in range(10_000):
        s = tuple(rng.randrange(3) for _ in range(P))
        img = elements[rng.randrange(len(elements))]
        x = [Fraction(rng.randrange(-9, 10), 4)]
        assert evaluate(arch, apply_perm(s, img), vs, act, x) == evaluate(arch, s, vs, act, x)

    # homomorphism and faithfulness
    for text in ("1-4", "1-2-2", "2-3-2"):
        a = Architecture.parse(text)
        images = {}
        for g in group_elements(a):
            images[g] = induced_param_permutation(a, g)
            if g != identity_element(a):
                assert images[g] != tuple(range(param_count(a)))
        assert len(set(images.values())) == group_order(a)
        gs = list(images)
        for _ in range(50):
            g1, g2 = gs[rng.randrange(len(gs))], gs[rng.randrange(len(gs))]
            assert images[compose_hidden(g2, g1)] == compose_perms(images[g2], images[g1])

    # normal forms constant on orbits
    a = A122
    vs2 = canonical_value_set(2)
    imgs = [induced_param_permutation(a, g) for g in group_elements(a)]
    for _ in range(200):
        s = tuple(rng.randrange(2) for _ in range(param_count(a)))
        base = build_normal_form(a, s, vs2)
        for img in imgs:
            assert build_normal_form(a, apply_perm(s, img), vs2) == base

    # class-formula cycle counts == explicit cycle counts, exhaustively
    for text in ("1-4", "2-3", "1-2-2", "1-3-2", "1-2-3"):
        a = Architecture.parse(text)
        for g in group_elements(a):
            types = tuple(cycle_type(p) for p in g)
            assert cycles_from_types(a, types) == cycle_count(induced_param_permutation(a, g))

    # ordering chain numeric <= symbolic <= exact <= V^P
    for text in ("1-4", "1-2-2"):
        a = Architecture.parse(text)
        for v in (2, 3):
            exact = burnside_exact(a, v)
            symbolic = symbolic_counts[(text, v, "nocombine")]
            assert symbolic <= exact <= v ** param_count(a)
            for act_name in ("relu", "tanh", "sigmoid"):
                assert numeric_counts[(text, v, act_name)] <= symbolic

    # shard-count independence
    a12 = Architecture.parse("1-2")
    sym = {count_unique_symbolic(a12, canonical_value_set(3), shards=s) for s in (1, 2, 8)}
    assert len(sym) == 1
    grid = make_grid()
    num = {count_unique_numeric(A14, canonical_value_set(2), "relu", grid, shards=s)
           for s in (1, 2, 8)}
    assert len(num) == 1

    report(7, "invariance (10^4 exact cases), homomorphism/faithfulness, "
              "orbit-constant normal forms, exhaustive cycle formula checks, "
              "ordering chain, and shard independence all hold")


def test_criterion_8_sweep_csv(tmp_path):
    t0 = time.perf_counter()
    rows = list(run_sweep(
        ["1-2", "1-3", "1-4", "1-5", "1-6", "1-2-2", "1-3-2", "1-3-3"],
        [2, 3], ["bound", "exact"]))
    path = tmp_path / "sweep.csv"
    write_report(rows, path, "csv")
    back = read_report(path)
    assert len(back) == 8 * 2 * 2
    keys = {(r.arch, r.V, r.method) for r in back}
    assert ("1-3-3", 3, "exact") in keys and ("1-6", 2, "bound") in keys
    spot = [r for r in back if (r.arch, r.V, r.method) == ("1-4", 3, "exact")]
    assert spot[0].count == "27405"
    dt = time.perf_counter() - t0
    assert dt < 60
    report(8, f"sweep CSV over 8 architectures x V in {{2,3}} x {{bound,exact}} "
              f"well-formed in {dt:.2f}s")
