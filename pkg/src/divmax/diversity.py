"""Diversity objectives on subsets and on multisets of cell centers.

For a k-subset T and exponent q:

    clique       sum of d^q over all unordered pairs of T
    star         min over z in T of sum_u d^q(z, u)
    bipartition  min over balanced splits T = L | R of sum_{L x R} d^q

All three extend to multisets (a multiplicity per center) by treating each
copy as a distinct point at pairwise distance zero from its siblings.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import EnumerationCapError
from .metric import MetricInstance

OBJECTIVE_KINDS = ("clique", "star", "bipartition")

# Largest subset for which the exact balanced-bipartition oracle will run.
EXACT_BIPARTITION_CAP = 16
# Largest number of distinct centers for which multiset bipartitions are
# enumerated exactly; above this the approximation scheme takes over.
MULTISET_SPLIT_CAP = 10


@dataclass(frozen=True)
class Objective:
    """A diversity function paired with the exponent it is evaluated at."""

    kind: str
    q: float = 1.0

    def __post_init__(self):
        if self.kind not in OBJECTIVE_KINDS:
            raise ValueError(f"unknown objective {self.kind!r}; expected one of {OBJECTIVE_KINDS}")
        if not self.q >= 1.0:
            raise ValueError(f"exponent q must be >= 1, got {self.q}")


def term_count(kind: str, k: int) -> int:
    """Number of distance terms the objective aggregates; divides value into an average."""
    if kind == "clique":
        return k * (k - 1) // 2
    if kind == "star":
        return k - 1
    if kind == "bipartition":
        return (k * k) // 4
    raise ValueError(f"unknown objective {kind!r}")


def _as_index_array(inst: MetricInstance, subset, min_size: int = 2) -> np.ndarray:
    idx = np.asarray(sorted(int(i) for i in subset), dtype=np.int64)
    if idx.size < min_size:
        raise ValueError(f"subset too small: need at least {min_size} points, got {idx.size}")
    if idx.size and (idx[0] < 0 or idx[-1] >= inst.n):
        raise IndexError(f"subset index out of range [0, {inst.n})")
    return idx


def clique_value(inst: MetricInstance, subset) -> float:
    idx = _as_index_array(inst, subset)
    return float(inst.pow_submatrix(idx).sum()) / 2.0


def star_value(inst: MetricInstance, subset) -> tuple[float, int]:
    """Minimum spanning-star weight and its center (lowest index on ties)."""
    idx = _as_index_array(inst, subset)
    rows = inst.pow_submatrix(idx).sum(axis=1)
    i = int(rows.argmin())
    return float(rows[i]), int(idx[i])


@lru_cache(maxsize=64)
def balanced_split_masks(k: int) -> np.ndarray:
    """Indicator rows for every balanced split of k slots with slot 0 pinned left.

    Rows follow lexicographic order of the left-hand position tuples, so the
    first row attaining a minimum corresponds to the lexicographically
    smallest left half.
    """
    if k < 2 or k % 2:
        raise ValueError(f"balanced splits need even k >= 2, got {k}")
    rows = []
    for rest in combinations(range(1, k), k // 2 - 1):
        mask = np.zeros(k, dtype=np.float64)
        mask[0] = 1.0
        mask[list(rest)] = 1.0
        rows.append(mask)
    return np.array(rows)


def bipartition_value_exact(inst: MetricInstance, subset) -> tuple[float, tuple[int, ...]]:
    """Exact minimum balanced-bipartition weight by split enumeration.

    Returns the value and the lexicographically smallest optimal left half.
    Repetition in ``subset`` is allowed; copies behave as coincident points.
    """
    idx = np.asarray(sorted(int(i) for i in subset), dtype=np.int64)
    k = idx.size
    if k < 2 or k % 2:
        raise ValueError(f"bipartition needs an even subset size >= 2, got {k}")
    if k > EXACT_BIPARTITION_CAP:
        raise EnumerationCapError(
            f"exact bipartition supports subsets up to {EXACT_BIPARTITION_CAP}, got {k}")
    d = inst.pow_submatrix(idx)
    masks = balanced_split_masks(k)
    vals = np.einsum("mi,ij,mj->m", masks, d, 1.0 - masks)
    i = int(vals.argmin())
    left = tuple(int(x) for x in idx[masks[i] > 0.5])
    return float(vals[i]), left


def evaluate(inst: MetricInstance, obj: Objective, subset, *, eps: float | None = None) -> float:
    """Value of ``obj`` on ``subset``; the scalar shared by all three objectives.

    Bipartitions larger than the exact cap need ``eps`` and are estimated by
    the balanced-bisection scheme (an upper estimate within 1 + eps).
    """
    if obj.q != inst.q:
        raise ValueError(f"objective exponent {obj.q} != instance exponent {inst.q}")
    if obj.kind == "clique":
        return clique_value(inst, subset)
    if obj.kind == "star":
        return star_value(inst, subset)[0]
    k = len(list(subset))
    if k <= EXACT_BIPARTITION_CAP:
        return bipartition_value_exact(inst, subset)[0]
    if eps is None:
        raise EnumerationCapError(
            f"bipartition of size {k} exceeds the exact cap {EXACT_BIPARTITION_CAP}; "
            "pass eps to evaluate approximately")
    from .bisection import min_bisection

    return min_bisection(inst, list(subset), eps).value


@dataclass(frozen=True)
class MultiplicityVector:
    """Distinct center indices with a nonnegative multiplicity each."""

    centers: tuple[int, ...]
    mult: tuple[int, ...]

    def __post_init__(self):
        if len(self.centers) != len(self.mult):
            raise ValueError("centers and mult must have equal length")
        if len(set(self.centers)) != len(self.centers):
            raise ValueError("centers must be distinct")
        if any(m < 0 for m in self.mult):
            raise ValueError("multiplicities must be nonnegative")

    @property
    def size(self) -> int:
        return int(sum(self.mult))

    def expand(self) -> list[int]:
        """The multiset as an explicit index list, center order preserved."""
        out: list[int] = []
        for c, m in zip(self.centers, self.mult):
            out.extend([c] * m)
        return out


def value_on_multiset(inst: MetricInstance, obj: Objective, mv: MultiplicityVector,
                      *, split_cap: int = MULTISET_SPLIT_CAP,
                      eps: float | None = None) -> float:
    """Objective value of the multiset described by ``mv``.

    Bipartition uses exact per-center split enumeration while the number of
    occupied centers is at most ``split_cap``, and otherwise delegates to the
    balanced-bisection scheme, which requires ``eps``.
    """
    if obj.q != inst.q:
        raise ValueError(f"objective exponent {obj.q} != instance exponent {inst.q}")
    centers = [c for c, m in zip(mv.centers, mv.mult) if m > 0]
    mult = np.array([m for m in mv.mult if m > 0], dtype=np.float64)
    total = int(mult.sum())
    if total < 2:
        raise ValueError(f"multiset too small: need at least 2 elements, got {total}")
    if total == len(centers):
        # all multiplicities are 1: this is a plain subset, and routing through
        # the subset evaluators keeps the two code paths bit-identical
        return evaluate(inst, obj, centers, eps=eps)
    d = inst.pow_submatrix(centers)
    if obj.kind == "clique":
        return float(mult @ d @ mult) / 2.0
    if obj.kind == "star":
        return float((d @ mult).min())
    if total % 2:
        raise ValueError(f"bipartition needs an even multiset size, got {total}")
    if len(centers) <= split_cap:
        splits = _center_splits(tuple(int(m) for m in mult), total // 2)
        vals = np.einsum("bi,ij,bj->b", splits, d, mult[None, :] - splits)
        return float(vals.min())
    if eps is None:
        raise EnumerationCapError(
            f"{len(centers)} occupied centers exceed the split cap {split_cap}; "
            "pass eps to evaluate approximately")
    from .bisection import min_bisection

    return min_bisection(inst, mv.expand(), eps).value


@lru_cache(maxsize=1024)
def _center_splits(mult: tuple[int, ...], half: int) -> np.ndarray:
    """All per-center left counts 0 <= l <= mult with sum(l) == half."""
    rows: list[tuple[int, ...]] = []
    suffix = [0] * (len(mult) + 1)
    for i in range(len(mult) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + mult[i]
    vec = [0] * len(mult)

    def rec(i: int, remaining: int) -> None:
        if i == len(mult):
            if remaining == 0:
                rows.append(tuple(vec))
            return
        hi = min(mult[i], remaining)
        lo = max(0, remaining - suffix[i + 1])
        for v in range(lo, hi + 1):
            vec[i] = v
            rec(i + 1, remaining - v)

    rec(0, half)
    return np.array(rows, dtype=np.float64).reshape(len(rows), len(mult))


def centroid_clique_identity(inst: MetricInstance, subset) -> tuple[float, float]:
    """Squared-distance clique value of unit vectors vs its centroid form.

    For unit vectors the clique value at q = 2 equals k^2 * (1 - |z|^2) where
    z is the centroid of the subset.  Returns (clique value, centroid form).
    """
    if inst.points is None or inst.norm != "l2":
        raise ValueError("centroid identity needs a coordinate backend with the l2 norm")
    if inst.q != 2.0:
        raise ValueError(f"centroid identity holds at q = 2, instance has q = {inst.q}")
    idx = _as_index_array(inst, subset)
    pts = inst.points[idx]
    norms = np.sqrt((pts * pts).sum(axis=1))
    off = float(np.abs(norms - 1.0).max())
    if off > 1e-9:
        raise ValueError(f"subset contains a point with norm deviating from 1 by {off:.3e}")
    k = idx.size
    z = pts.mean(axis=0)
    rhs = k * k * (1.0 - float(z @ z))
    return clique_value(inst, idx), rhs


# Vectorized evaluators over batches of equally sized index rows.  Rows may
# contain repeated indices; repeats behave as coincident copies.

_BATCH_CHUNK = 8192


def _gathered(dq: np.ndarray, rows: np.ndarray) -> np.ndarray:
    return dq[rows[:, :, None], rows[:, None, :]]


def batch_clique(dq: np.ndarray, rows: np.ndarray) -> np.ndarray:
    out = np.empty(rows.shape[0])
    for i in range(0, rows.shape[0], _BATCH_CHUNK):
        g = _gathered(dq, rows[i:i + _BATCH_CHUNK])
        out[i:i + _BATCH_CHUNK] = g.sum(axis=(1, 2)) / 2.0
    return out


def batch_star(dq: np.ndarray, rows: np.ndarray) -> np.ndarray:
    out = np.empty(rows.shape[0])
    for i in range(0, rows.shape[0], _BATCH_CHUNK):
        g = _gathered(dq, rows[i:i + _BATCH_CHUNK])
        out[i:i + _BATCH_CHUNK] = g.sum(axis=2).min(axis=1)
    return out


def batch_bipartition(dq: np.ndarray, rows: np.ndarray) -> np.ndarray:
    k = rows.shape[1]
    masks = balanced_split_masks(k)
    out = np.empty(rows.shape[0])
    for i in range(0, rows.shape[0], _BATCH_CHUNK):
        g = _gathered(dq, rows[i:i + _BATCH_CHUNK])
        vals = np.einsum("mi,bij,mj->bm", masks, g, 1.0 - masks)
        out[i:i + _BATCH_CHUNK] = vals.min(axis=1)
    return out


def batch_evaluate(kind: str, dq: np.ndarray, rows: np.ndarray) -> np.ndarray:
    if kind == "clique":
        return batch_clique(dq, rows)
    if kind == "star":
        return batch_star(dq, rows)
    if kind == "bipartition":
        return batch_bipartition(dq, rows)
    raise ValueError(f"unknown objective {kind!r}")
