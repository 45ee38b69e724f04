"""Approximation scheme for the minimum balanced bisection of a k-set.

Given a (multi)set T of k points, the task is to split T into halves L and R
minimizing f(L, R), the sum of q-power distances across the split.  The
scheme anchors a variable-radius cell decomposition at the star center of T,
rounds T onto the cell centers, and searches per-center multiplicity grids
whose step is a small fraction of each cell's population.  Any grid choice is
completed to exactly k/2 elements by bounded raises; the best completed
vector's pre-image is returned together with its exact split value, which is
within (1 + eps) of the optimal bisection.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cells import decompose_variable, project_multiset
from .errors import BudgetExceededError
from .metric import MetricInstance

DEFAULT_BUDGET = 10_000_000


@dataclass
class BisectionResult:
    left: tuple[int, ...]
    value: float
    cells_used: int
    provenance: dict


def star_center(inst: MetricInstance, T, q: float | None = None) -> tuple[int, float]:
    """Center of the minimum-weight spanning star of the multiset T.

    Ties go to the lowest point index.  ``q``, when given, must match the
    instance exponent.
    """
    if q is not None and q != inst.q:
        raise ValueError(f"requested exponent {q} != instance exponent {inst.q}")
    elems = [int(t) for t in T]
    if len(elems) < 2:
        raise ValueError(f"need at least 2 elements, got {len(elems)}")
    support = sorted(set(elems))
    mult = np.array([elems.count(u) for u in support], dtype=np.float64)
    dq = inst.pow_submatrix(support)
    weights = dq @ mult
    i = int(weights.argmin())
    return support[i], float(weights[i])


def _cross_value(inst: MetricInstance, left: list[int], right: list[int]) -> float:
    li = np.asarray(left, dtype=np.int64)
    ri = np.asarray(right, dtype=np.int64)
    if inst.matrix is not None:
        d = inst.matrix[np.ix_(li, ri)]
    else:
        from .metric import pairwise_distances

        d = pairwise_distances(inst.points[li], inst.points[ri], inst.norm)
    if inst.q != 1.0:
        d = d ** inst.q
    return float(d.sum())


def min_bisection(inst: MetricInstance, T, eps: float, q: float | None = None,
                  *, budget: int = DEFAULT_BUDGET) -> BisectionResult:
    """Balanced bisection of the multiset T with value <= (1 + eps) * optimum.

    T is a sequence of point indices, repetition allowed.  The reported value
    is the exact cross weight of the returned split, so it always upper
    bounds the optimum.
    """
    if q is not None and q != inst.q:
        raise ValueError(f"requested exponent {q} != instance exponent {inst.q}")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    elems = sorted(int(t) for t in T)
    k = len(elems)
    if k < 2 or k % 2:
        raise ValueError(f"need an even multiset size >= 2, got {k}")
    q = inst.q
    if k == 2:
        return BisectionResult((elems[0],), inst.dist_pow(elems[0], elems[1]), 0,
                               {"z": elems[0], "delta_prime": None})

    support = sorted(set(elems))
    mult_full = np.array([elems.count(u) for u in support], dtype=np.float64)
    dq_sup = inst.pow_submatrix(support)
    cl = float(mult_full @ dq_sup @ mult_full) / 2.0
    if cl == 0.0:
        return BisectionResult(tuple(elems[: k // 2]), 0.0, 0,
                               {"z": elems[0], "delta_prime": 0.0})

    z, _ = star_center(inst, elems)
    delta_prime = (4.0 * cl / (k * k)) / (2.0 ** q + 1.0)
    base = delta_prime ** (1.0 / q)
    delta = eps / 2.0 ** (q + 4.0)
    grid_frac = eps / (8.0 * (2.0 ** q + 1.0))

    decomp = decompose_variable(inst, support, z, base, delta)
    mv = project_multiset(decomp, elems)
    centers = list(mv.centers)
    caps = np.array(mv.mult, dtype=np.int64)
    steps = np.maximum(np.floor(grid_frac * caps).astype(np.int64), 1)
    half = k // 2

    # Members of each cell as positions into the sorted multiset, for the
    # pre-image.
    positions: dict[int, list[int]] = {c: [] for c in centers}
    for pos, e in enumerate(elems):
        positions[decomp.assign[e]].append(pos)

    ncent = len(centers)
    counted = 0
    raised: list[np.ndarray] = []
    seen: set[bytes] = set()
    vec = np.zeros(ncent, dtype=np.int64)

    def complete(v: np.ndarray) -> np.ndarray | None:
        out = v.copy()
        deficit = half - int(out.sum())
        for i in range(ncent):
            if deficit == 0:
                break
            add = min(int(steps[i]), int(caps[i] - out[i]), deficit)
            if add > 0:
                out[i] += add
                deficit -= add
        return out if deficit == 0 else None

    def rec(i: int, total: int) -> None:
        nonlocal counted
        if i == ncent:
            counted += 1
            if counted > budget:
                raise BudgetExceededError(
                    f"grid budget exceeded: more than {budget} candidate vectors")
            done = complete(vec)
            if done is not None:
                key = done.tobytes()
                if key not in seen:
                    seen.add(key)
                    raised.append(done)
            return
        for v in range(0, int(caps[i]) + 1, int(steps[i])):
            if total + v > half:
                break
            vec[i] = v
            rec(i + 1, total + v)
        vec[i] = 0

    rec(0, 0)
    arr = np.array(raised, dtype=np.float64)
    dq_c = inst.pow_submatrix(centers)
    m_full = np.array([mv.mult[i] for i in range(ncent)], dtype=np.float64)
    fvals = np.einsum("bi,ij,bj->b", arr, dq_c, m_full[None, :] - arr)
    vmin = float(fvals.min())
    ties = np.flatnonzero(fvals <= vmin)
    pick = min((tuple(int(x) for x in arr[t]) for t in ties))

    left_pos: list[int] = []
    for c, m in zip(centers, pick):
        left_pos.extend(positions[c][:m])
    left_pos.sort()
    right_pos = sorted(set(range(k)) - set(left_pos))
    left = [elems[p] for p in left_pos]
    right = [elems[p] for p in right_pos]
    value = _cross_value(inst, left, right)
    return BisectionResult(tuple(sorted(left)), value, len(decomp.centers),
                           {"z": z, "delta_prime": delta_prime, "delta": delta,
                            "grid_frac": grid_frac, "candidates": counted})
