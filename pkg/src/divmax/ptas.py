"""Grid-rounding approximation scheme for all three diversity objectives.

The scheme guesses two quantities: a scale for the average optimal distance
and the center z0 of the optimal solution's spanning star.  For each guess it
keeps every point far from z0 as a forced outlier (far points provably belong
to an optimal set), decomposes the remaining ball into small cells, and
enumerates multiplicity vectors over the cell centers.  Each candidate
multiset is scored after rounding every point to its cell center, and the
best candidate's pre-image is returned.  With cell radius eps / 2^(q+3) times
the guessed scale, rounding changes any candidate's value by at most an eps
fraction of the optimum, which yields the (1 - eps) guarantee.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cells import CellDecomposition, decompose_fixed
from .diversity import (EXACT_BIPARTITION_CAP, MultiplicityVector, Objective,
                        balanced_split_masks, evaluate, value_on_multiset)
from .errors import BudgetExceededError
from .metric import REL_TOL, MetricInstance, diameter_estimate

# Multipliers bounding how far a non-solution point can sit from the optimal
# star center, in units of the q-th root of the average optimal value.
OUTLIER_RADIUS_COEFF = {"clique": 2.0, "star": 4.0, "bipartition": 6.0}

# The guessed scale is only known within a factor 2, so the containment ball
# is enlarged by the same factor.
GUESS_SLACK = 2.0

DEFAULT_BUDGET = 10_000_000


@dataclass
class Solution:
    """A k-subset with its re-checked objective value and solver provenance."""

    subset: tuple[int, ...]
    value: float
    algo: str
    guess: tuple[int, float] | None = None  # (z0 candidate, guessed average value)
    meta: dict = field(default_factory=dict)


@dataclass
class GuessGrid:
    """Scale candidates (descending, ratio one half) and star-center candidates."""

    delta_candidates: list[float]
    z0_candidates: list[int]


def build_guess_grid(inst: MetricInstance, k: int) -> GuessGrid:
    """Geometric grid of scale guesses covering [diam_est / k^2, 2 * diam_est].

    One extra candidate is kept beyond each end of the required range.
    Candidates are q-th roots of guessed average values.
    """
    rhat = diameter_estimate(inst)
    if rhat <= 0:
        return GuessGrid([], list(range(inst.n)))
    top = 2.0 * rhat
    bottom = rhat / (k * k)
    cands = [top * 2.0]  # one extra above
    s = top
    while s >= bottom * (1.0 - REL_TOL):
        cands.append(s)
        s /= 2.0
    cands.append(s)  # one extra below
    return GuessGrid(cands, list(range(inst.n)))


def enumerate_compositions(caps, total: int):
    """Yield every vector 0 <= m <= caps with sum(m) = total.

    Positions are filled left to right with the largest feasible value first,
    so the first coordinate decreases across the stream.
    """
    caps = [int(c) for c in caps]
    if any(c < 0 for c in caps):
        raise ValueError("caps must be nonnegative")
    n = len(caps)
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + caps[i]
    if total < 0 or total > suffix[0]:
        return
    vec = [0] * n

    def rec(i: int, remaining: int):
        if i == n:
            yield tuple(vec)
            return
        hi = min(caps[i], remaining)
        lo = max(0, remaining - suffix[i + 1])
        for v in range(hi, lo - 1, -1):
            vec[i] = v
            yield from rec(i + 1, remaining - v)

    if n == 0:
        if total == 0:
            yield ()
        return
    yield from rec(0, total)


@lru_cache(maxsize=256)
def _compositions_array(caps: tuple[int, ...], total: int) -> np.ndarray:
    rows = list(enumerate_compositions(caps, total))
    return np.array(rows, dtype=np.int64).reshape(len(rows), len(caps))


def evaluate_rounded(inst: MetricInstance, obj: Objective, decomp: CellDecomposition,
                     outliers, mv: MultiplicityVector, *, eps: float | None = None) -> float:
    """Objective value of the multiset ``mv`` joined with the fixed outliers."""
    out = [int(o) for o in outliers]
    if set(out) & set(mv.centers):
        raise ValueError("outliers must be disjoint from cell centers")
    centers = tuple(mv.centers) + tuple(out)
    mult = tuple(mv.mult) + (1,) * len(out)
    return value_on_multiset(inst, obj, MultiplicityVector(centers, mult), eps=eps)


def _expand_rows(counts: np.ndarray, k: int) -> np.ndarray:
    """Turn per-center count rows (all summing to k) into index rows of width k."""
    b, ncent = counts.shape
    cols = np.tile(np.arange(ncent, dtype=np.int64), b)
    flat = np.repeat(cols, counts.reshape(-1))
    return flat.reshape(b, k)


def _rounded_values(inst: MetricInstance, obj: Objective, centers: list[int],
                    outliers: np.ndarray, counts: np.ndarray,
                    eps: float) -> np.ndarray:
    """Vector of rounded objective values, one per candidate count row."""
    ext = list(centers) + [int(o) for o in outliers]
    dq = inst.pow_submatrix(ext)
    full = np.hstack([counts, np.ones((counts.shape[0], len(outliers)), dtype=np.int64)])
    if obj.kind == "clique":
        f = full.astype(np.float64)
        return np.einsum("bi,ij,bj->b", f, dq, f) / 2.0
    if obj.kind == "star":
        sums = full.astype(np.float64) @ dq
        sums[full == 0] = np.inf
        return sums.min(axis=1)
    k = int(full[0].sum())
    if k <= EXACT_BIPARTITION_CAP:
        rows = _expand_rows(full, k)
        masks = balanced_split_masks(k)
        g = dq[rows[:, :, None], rows[:, None, :]]
        return np.einsum("mi,bij,mj->bm", masks, g, 1.0 - masks).min(axis=1)
    vals = np.empty(full.shape[0])
    for i, row in enumerate(full):
        mv = MultiplicityVector(tuple(ext), tuple(int(x) for x in row))
        vals[i] = value_on_multiset(inst, obj, mv, eps=eps)
    return vals


def _preimage(decomp: CellDecomposition, counts, outliers) -> tuple[int, ...]:
    """Concrete subset realizing a count vector: lowest-index members per cell."""
    chosen: list[int] = []
    for c, m in zip(decomp.centers, counts):
        if m:
            chosen.extend(decomp.members[c][:int(m)])
    chosen.extend(int(o) for o in outliers)
    return tuple(sorted(chosen))


def solve(inst: MetricInstance, obj: Objective, k: int, eps: float,
          *, budget: int = DEFAULT_BUDGET) -> Solution:
    """Best k-subset found by the guess-and-round scheme; value >= (1 - eps) * OPT.

    Guesses run over descending scale candidates and ascending center
    candidates; equal-value solutions keep the first one encountered.  Raises
    when the total number of evaluated candidate vectors would exceed
    ``budget``.
    """
    if obj.q != inst.q:
        raise ValueError(f"objective exponent {obj.q} != instance exponent {inst.q}")
    if not 2 <= k <= inst.n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={inst.n}")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if obj.kind == "bipartition" and k % 2:
        raise ValueError(f"bipartition needs even k, got {k}")

    grid = build_guess_grid(inst, k)
    if not grid.delta_candidates:
        subset = tuple(range(k))
        return Solution(subset, 0.0, "ptas", guess=(0, 0.0),
                        meta={"guesses": 0, "candidates": 0, "max_cells": 0})
    q = inst.q
    cell_scale = eps / 2.0 ** (q + 3)
    ball_coeff = GUESS_SLACK * OUTLIER_RADIUS_COEFF[obj.kind]

    best: Solution | None = None
    evaluated = 0
    guesses = 0
    max_cells = 0
    seen: set[tuple[int, bytes]] = set()
    all_idx = np.arange(inst.n, dtype=np.int64)

    for si, s in enumerate(grid.delta_candidates):
        for z0 in grid.z0_candidates:
            d = inst.dists_from(z0)
            radius = ball_coeff * s
            slack = REL_TOL * np.maximum(np.abs(d), radius)
            inside = d <= radius + slack
            outliers = all_idx[~inside]
            if outliers.size > k:
                continue
            key = (si, outliers.tobytes())
            if key in seen:
                continue
            seen.add(key)
            guesses += 1
            decomp = decompose_fixed(inst, all_idx[inside], cell_scale * s)
            max_cells = max(max_cells, len(decomp.centers))
            caps = tuple(min(len(decomp.members[c]), k) for c in decomp.centers)
            counts = _compositions_array(caps, k - int(outliers.size))
            evaluated += counts.shape[0]
            if evaluated > budget:
                raise BudgetExceededError(
                    f"candidate budget exceeded: {evaluated} > {budget} "
                    f"(scale {s!r}, center {z0})")
            if counts.shape[0] == 0:
                continue
            vals = _rounded_values(inst, obj, decomp.centers, outliers, counts, eps)
            i = int(vals.argmax())
            pre = _preimage(decomp, counts[i], outliers)
            val = evaluate(inst, obj, pre, eps=eps)
            if best is None or val > best.value:
                best = Solution(pre, val, "ptas", guess=(z0, float(s) ** q))
    assert best is not None
    best.meta.update(guesses=guesses, candidates=evaluated, max_cells=max_cells)
    return best
