"""Shared fixtures and independent brute-force oracles used across test modules.

The oracles here deliberately re-derive results from first principles (grid
searches, path enumeration, case formulas written out by hand) so that they
can catch errors in the library's own implementations.
"""

from __future__ import annotations

import math
import random

import pytest

from trisched.model import PlatformModel, f_inf


def make_platform(
    f_max: float = 1.0,
    f_rel: float | None = None,
    lambda0: float = 1e-5,
    d: float = 0.0,
    procs: int = 1,
    f_min: float = 1e-6,
) -> PlatformModel:
    if f_rel is None:
        f_rel = 2.0 / 3.0 * f_max
    return PlatformModel(
        f_min=f_min,
        f_max=f_max,
        f_rel=f_rel,
        lambda0=lambda0,
        d_sensitivity=d,
        proc_count=procs,
    )


@pytest.fixture
def platform() -> PlatformModel:
    """Default campaign platform: f_max=1, f_rel=2/3, lambda0=1e-5, d=0."""
    return make_platform()


def _refine(fun, lo, hi, iters=200, tol=1e-12):
    """Ternary search for the minimum of a unimodal function on [lo, hi]."""
    a, b = lo, hi
    for _ in range(iters):
        if b - a <= tol:
            break
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        if fun(m1) <= fun(m2):
            b = m2
        else:
            a = m1
    mid = 0.5 * (a + b)
    return min(fun(lo), fun(hi), fun(mid))


def single_task_grid_oracle(w: float, D: float, platform: PlatformModel, step: float = 1e-4) -> float:
    """Brute-force minimum energy for one task under deadline D.

    Scans once-executed and twice-executed (equal-speed) plans on a speed
    grid, then refines locally; independent of single_task_optimal's case
    analysis.
    """
    fmax, frel = platform.f_max, platform.f_rel
    best = math.inf

    def scan(lo, hi, fun):
        nonlocal best
        if lo > hi:
            return
        n = max(1, int((hi - lo) / step))
        pts = [lo + i * (hi - lo) / n for i in range(n + 1)]
        vals = [fun(f) for f in pts]
        i = min(range(len(pts)), key=vals.__getitem__)
        a = pts[max(0, i - 1)]
        b = pts[min(len(pts) - 1, i + 1)]
        best = min(best, _refine(fun, a, b))

    # once: speed must cover the deadline, the reliability floor, and f_max
    lo1 = max(frel, w / D)
    if lo1 <= fmax * (1 + 1e-12):
        scan(min(lo1, fmax), fmax, lambda f: w * f * f)
    # twice at one common speed within the admissible reliability window
    fi = f_inf(w, platform)
    hi2 = frel / math.sqrt(2.0) * (1 - 1e-15)
    lo2 = max(fi, 2.0 * w / D)
    if lo2 < hi2:
        scan(lo2, hi2, lambda f: 2.0 * w * f * f)
    return best


def single_task_case_energy(w: float, d: float, platform: PlatformModel) -> float:
    """Hand-written five-case energy formula (deadline case analysis)."""
    fmax, frel = platform.f_max, platform.f_rel
    fi = f_inf(w, platform)
    d0 = w / fmax
    d1 = w / frel
    d2 = 2.0 * math.sqrt(2.0) * w / frel
    d3 = 2.0 * w / fi
    if d < d0 * (1 - 1e-12):
        return math.inf
    if d <= d1:
        f = min(w / d, fmax)
        return w * f * f
    if d <= d2 or fi >= frel / math.sqrt(2.0):
        return w * frel * frel
    if d <= d3:
        return 8.0 * w ** 3 / (d * d)
    return 2.0 * w * fi * fi


def fork_grid_oracle(
    w0: float, leaf_weights: list[float], D: float, platform: PlatformModel, step: float = 1e-3
) -> float:
    """Two-level brute force for a fork: grid over the leaves' deadline share,
    exact per-task case energies inside, then local refinement."""
    fmax = platform.f_max

    def total(d2):
        e = single_task_case_energy(w0, D - d2, platform)
        for w in leaf_weights:
            e += single_task_case_energy(w, d2, platform)
        return e

    lo = max(w / fmax for w in leaf_weights)
    hi = D - w0 / fmax
    if lo > hi:
        return math.inf
    n = max(1, int((hi - lo) / step))
    pts = [lo + i * (hi - lo) / n for i in range(n + 1)]
    vals = [total(d) for d in pts]
    i = min(range(len(pts)), key=vals.__getitem__)
    a = pts[max(0, i - 1)]
    b = pts[min(len(pts) - 1, i + 1)]
    return min(min(vals), _refine(total, a, b))


def path_max_weight(g, source: int) -> float:
    """Exhaustive maximum total weight over all paths starting at `source`."""
    best = 0.0
    stack = [(source, g.weight(source))]
    while stack:
        node, acc = stack.pop()
        succs = g.successors(node)
        if not succs:
            best = max(best, acc)
        for s in succs:
            stack.append((s, acc + g.weight(s)))
    return best


def random_instance(rng: random.Random, max_nodes: int = 100):
    """Random DAG plus edge count within the generator's admissible range."""
    from trisched.graph import generate_random

    n = rng.randint(2, max_nodes)
    m = rng.randint(0, min(3 * n, n * (n - 1) // 2))
    return generate_random(n, m, seed=rng.randint(0, 10 ** 9))
