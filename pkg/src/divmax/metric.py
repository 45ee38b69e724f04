"""Finite metric spaces with coordinate or matrix backends and q-th-power distances.

An instance is a set of n points together with a metric d and an exponent
q >= 1.  All algorithms in this package work on d^q through ``dist_pow`` and
the submatrix helpers, so the backend (raw coordinates under an lp norm, or an
explicit distance matrix) is invisible to them.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InstanceParseError, MetricValidationError

# Relative slack used for every comparison against a geometric threshold.
REL_TOL = 1e-9

NORMS = ("l1", "l2", "linf")


def tol_leq(a: float, b: float, tol: float = REL_TOL) -> bool:
    """Tolerant ``a <= b`` with slack relative to the larger magnitude."""
    return a <= b + tol * max(abs(a), abs(b))


def _norm_of(diff: np.ndarray, norm: str) -> np.ndarray:
    if norm == "l2":
        return np.sqrt(np.einsum("...i,...i->...", diff, diff))
    if norm == "l1":
        return np.abs(diff).sum(axis=-1)
    if norm == "linf":
        return np.abs(diff).max(axis=-1)
    raise ValueError(f"unknown norm {norm!r}; expected one of {NORMS}")


def pairwise_distances(a: np.ndarray, b: np.ndarray, norm: str) -> np.ndarray:
    """All distances between rows of ``a`` and rows of ``b``."""
    return _norm_of(a[:, None, :] - b[None, :, :], norm)


@dataclass
class MetricInstance:
    """n points, a metric d, and the exponent q used by power distances.

    Exactly one of ``points`` (coordinate backend) or ``matrix`` (explicit
    distances) is set.  Instances are treated as immutable; ``with_q`` returns
    a cheap copy sharing the backing arrays.
    """

    n: int
    q: float
    points: np.ndarray | None = None
    norm: str = "l2"
    matrix: np.ndarray | None = None
    _pow: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_points(cls, points, norm: str = "l2", q: float = 1.0) -> "MetricInstance":
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-d array of shape (n, D)")
        if pts.shape[0] < 2:
            raise ValueError("need at least 2 points")
        if norm not in NORMS:
            raise ValueError(f"unknown norm {norm!r}; expected one of {NORMS}")
        if not q >= 1.0:
            raise ValueError(f"exponent q must be >= 1, got {q}")
        return cls(n=pts.shape[0], q=float(q), points=pts, norm=norm)

    @classmethod
    def from_matrix(cls, entries, q: float = 1.0, validate: bool = False) -> "MetricInstance":
        m = np.asarray(entries, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("distance matrix must be square")
        if m.shape[0] < 2:
            raise ValueError("need at least 2 points")
        if not q >= 1.0:
            raise ValueError(f"exponent q must be >= 1, got {q}")
        if validate:
            _validate_matrix(m)
        return cls(n=m.shape[0], q=float(q), matrix=m)

    def with_q(self, q: float) -> "MetricInstance":
        if not q >= 1.0:
            raise ValueError(f"exponent q must be >= 1, got {q}")
        return MetricInstance(n=self.n, q=float(q), points=self.points,
                              norm=self.norm, matrix=self.matrix)

    @property
    def dim(self) -> int | None:
        return None if self.points is None else self.points.shape[1]

    def _check_index(self, u: int) -> None:
        if not 0 <= u < self.n:
            raise IndexError(f"point index {u} out of range [0, {self.n})")

    def dist(self, u: int, v: int) -> float:
        self._check_index(u)
        self._check_index(v)
        if self.matrix is not None:
            return float(self.matrix[u, v])
        return float(_norm_of(self.points[u] - self.points[v], self.norm))

    def dist_pow(self, u: int, v: int) -> float:
        d = self.dist(u, v)
        return d if self.q == 1.0 else d ** self.q

    def dists_from(self, u: int, targets=None) -> np.ndarray:
        """Plain (unpowered) distances from ``u`` to ``targets`` (default: all points)."""
        self._check_index(u)
        if self.matrix is not None:
            row = self.matrix[u]
            return row.copy() if targets is None else row[np.asarray(targets, dtype=np.int64)]
        pts = self.points if targets is None else self.points[np.asarray(targets, dtype=np.int64)]
        return _norm_of(pts - self.points[u], self.norm)

    def pow_submatrix(self, indices) -> np.ndarray:
        """q-th-power distances between the selected points, as a dense block."""
        idx = np.asarray(indices, dtype=np.int64)
        if self.matrix is not None:
            d = self.matrix[np.ix_(idx, idx)]
        else:
            d = pairwise_distances(self.points[idx], self.points[idx], self.norm)
        return d if self.q == 1.0 else d ** self.q

    def pow_matrix(self) -> np.ndarray:
        """Full n x n matrix of q-th-power distances (cached; intended for small n)."""
        if self._pow is None:
            self._pow = self.pow_submatrix(np.arange(self.n))
        return self._pow


@dataclass(frozen=True)
class Ball:
    center: int
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError(f"ball radius must be nonnegative, got {self.radius}")


def diameter_estimate(inst: MetricInstance) -> float:
    """Largest distance from point 0; the true diameter lies in [estimate, 2*estimate]."""
    return float(inst.dists_from(0).max())


def ball_members(inst: MetricInstance, ball: Ball) -> list[int]:
    """Indices of all points within the closed ball, tolerantly compared."""
    d = inst.dists_from(ball.center)
    slack = REL_TOL * np.maximum(np.abs(d), abs(ball.radius))
    return [int(i) for i in np.flatnonzero(d <= ball.radius + slack)]


def _validate_matrix(m: np.ndarray) -> None:
    n = m.shape[0]
    scale = float(np.abs(m).max()) if m.size else 0.0
    asym = np.abs(m - m.T)
    if asym.max() > REL_TOL * max(scale, 1.0):
        u, v = np.unravel_index(int(asym.argmax()), asym.shape)
        raise MetricValidationError(
            f"matrix is not symmetric at ({u}, {v}): {m[u, v]!r} vs {m[v, u]!r}")
    diag = np.abs(np.diag(m))
    if diag.max() > REL_TOL * max(scale, 1.0):
        u = int(diag.argmax())
        raise MetricValidationError(f"nonzero diagonal entry at ({u}, {u}): {m[u, u]!r}")
    if m.min() < 0:
        u, v = np.unravel_index(int(m.argmin()), m.shape)
        raise MetricValidationError(f"negative distance at ({u}, {v}): {m[u, v]!r}")
    # min over w of m[u,w] + m[w,v], accumulated one w at a time to bound memory
    best = np.full((n, n), np.inf)
    for w in range(n):
        np.minimum(best, m[:, [w]] + m[[w], :], out=best)
    bad = m > best + REL_TOL * np.maximum(m, best)
    if bad.any():
        u, v = np.unravel_index(int(bad.argmax()), bad.shape)
        raise MetricValidationError(
            f"triangle inequality violated for pair ({u}, {v}): "
            f"d={m[u, v]!r} exceeds best two-hop {best[u, v]!r}")


def _fmt(x: float) -> str:
    return repr(float(x))


def save_instance(inst: MetricInstance, path) -> None:
    """Write an instance file; floats use shortest round-trip formatting."""
    lines = []
    if inst.points is not None:
        d = inst.points.shape[1]
        lines.append(f"points {d} {inst.n} {inst.norm}")
        for row in inst.points:
            lines.append(" ".join(_fmt(x) for x in row))
    else:
        lines.append(f"matrix {inst.n}")
        for row in inst.matrix:
            lines.append(" ".join(_fmt(x) for x in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_instance(path, q: float = 1.0, validate: bool = False) -> MetricInstance:
    """Read an instance file.

    Format, one record per line:

        points <D> <n> <norm>      followed by n lines of D coordinates
        matrix <n>                 followed by n lines of n distances

    The exponent q is not stored in the file; it is supplied by the caller.
    """
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw or not raw[0].strip():
        raise InstanceParseError("line 1: empty file, expected a header line")
    head = raw[0].split()
    if head[0] == "points":
        if len(head) != 4:
            raise InstanceParseError(
                f"line 1: expected 'points <D> <n> <norm>', got {raw[0]!r}")
        try:
            d, n = int(head[1]), int(head[2])
        except ValueError:
            raise InstanceParseError(f"line 1: non-integer dimensions in {raw[0]!r}") from None
        norm = head[3]
        if norm not in NORMS:
            raise InstanceParseError(f"line 1: unknown norm {norm!r}; expected one of {NORMS}")
        rows = _read_rows(raw, n, d, what="coordinate")
        return MetricInstance.from_points(np.array(rows), norm=norm, q=q)
    if head[0] == "matrix":
        if len(head) != 2:
            raise InstanceParseError(f"line 1: expected 'matrix <n>', got {raw[0]!r}")
        try:
            n = int(head[1])
        except ValueError:
            raise InstanceParseError(f"line 1: non-integer size in {raw[0]!r}") from None
        rows = _read_rows(raw, n, n, what="distance")
        return MetricInstance.from_matrix(np.array(rows), q=q, validate=validate)
    raise InstanceParseError(
        f"line 1: unknown header {head[0]!r}; expected 'points' or 'matrix'")


def _read_rows(raw: list[str], n: int, width: int, what: str) -> list[list[float]]:
    if n < 2:
        raise InstanceParseError(f"line 1: need at least 2 points, got n={n}")
    body = raw[1:]
    while body and not body[-1].strip():
        body.pop()
    if len(body) != n:
        raise InstanceParseError(
            f"line {len(raw)}: expected {n} {what} rows, found {len(body)}")
    rows = []
    for i, line in enumerate(body, start=2):
        toks = line.split()
        if len(toks) != width:
            raise InstanceParseError(
                f"line {i}: expected {width} values, found {len(toks)}")
        try:
            rows.append([float(t) for t in toks])
        except ValueError as exc:
            raise InstanceParseError(f"line {i}: {exc}") from None
    return rows
