"""Preconditioner metrics on R^n and the geometry primitives built on them.

A metric wraps a symmetric positive definite operator L and provides the
inner product <u, v>_L = <Lu, v>, the squared norm |v|_L^2, application of
L and L^{-1}, and squared distances to a finite set of reference points.
Three kinds are supported: ``identity``, ``diagonal`` and ``dense``.
Dense metrics are validated and Cholesky-factorized once at construction
because every solver applies L and L^{-1} on each iteration.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve

__all__ = ["Metric", "as_point", "metric_from_config"]

_SYMMETRY_RTOL = 1e-12


def as_point(values, dim: int | None = None) -> np.ndarray:
    """Coerce ``values`` to a finite 1-D float64 vector.

    Raises ValueError on non-finite entries or, when ``dim`` is given, on a
    length mismatch.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        v = v.reshape(-1)
    if not np.all(np.isfinite(v)):
        raise ValueError("point has non-finite entries")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {v.shape[0]}")
    return v


class Metric:
    """Symmetric positive definite operator defining the solver geometry.

    Instances are immutable after construction and safe to share across
    threads; all operations are pure.
    """

    def __init__(self, kind: str, *, diag: np.ndarray | None = None,
                 matrix: np.ndarray | None = None, dim: int | None = None):
        self.kind = kind
        self.dim = dim
        self._diag = None
        self._matrix = None
        self._factor = None
        if kind == "identity":
            pass
        elif kind == "diagonal":
            d = as_point(diag)
            if np.any(d <= 0):
                raise ValueError("diagonal metric entries must be strictly positive")
            d.setflags(write=False)
            self._diag = d
            self.dim = d.shape[0]
        elif kind == "dense":
            m = np.asarray(matrix, dtype=float)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ValueError("dense metric must be a square matrix")
            if not np.all(np.isfinite(m)):
                raise ValueError("dense metric has non-finite entries")
            scale = np.abs(m).max()
            if np.abs(m - m.T).max() > _SYMMETRY_RTOL * max(scale, 1.0):
                raise ValueError("dense metric is not symmetric")
            m = 0.5 * (m + m.T)
            try:
                self._factor = cho_factor(m, lower=True)
            except np.linalg.LinAlgError as exc:
                raise ValueError("dense metric is not positive definite") from exc
            m.setflags(write=False)
            self._matrix = m
            self.dim = m.shape[0]
        else:
            raise ValueError(f"unknown metric kind {kind!r}")

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls, dim: int | None = None) -> "Metric":
        return cls("identity", dim=dim)

    @classmethod
    def diagonal(cls, values) -> "Metric":
        return cls("diagonal", diag=values)

    @classmethod
    def dense(cls, matrix) -> "Metric":
        return cls("dense", matrix=matrix)

    # -- helpers ------------------------------------------------------

    def _check(self, v) -> np.ndarray:
        return as_point(v, self.dim)

    def matrix(self, dim: int | None = None) -> np.ndarray:
        """Dense n x n representation of L (used to assemble subproblems)."""
        if self.kind == "identity":
            n = dim if dim is not None else self.dim
            if n is None:
                raise ValueError("identity metric needs an explicit dimension")
            return np.eye(n)
        if self.kind == "diagonal":
            return np.diag(self._diag)
        return np.asarray(self._matrix)

    def diagonal_values(self, dim: int | None = None) -> np.ndarray:
        """Per-coordinate weights; only defined for identity/diagonal kinds."""
        if self.kind == "identity":
            n = dim if dim is not None else self.dim
            if n is None:
                raise ValueError("identity metric needs an explicit dimension")
            return np.ones(n)
        if self.kind == "diagonal":
            return np.asarray(self._diag)
        raise ValueError("dense metric has no separable diagonal form")

    # -- core operations ----------------------------------------------

    def apply(self, v) -> np.ndarray:
        """Return L v."""
        v = self._check(v)
        if self.kind == "identity":
            return v.copy()
        if self.kind == "diagonal":
            return self._diag * v
        return self._matrix @ v

    def solve(self, v) -> np.ndarray:
        """Return w with L w = v, via the cached factorization for dense L."""
        v = self._check(v)
        if self.kind == "identity":
            return v.copy()
        if self.kind == "diagonal":
            return v / self._diag
        return cho_solve(self._factor, v)

    def inner(self, u, v) -> float:
        """<u, v>_L = <L u, v>."""
        return float(self.apply(u) @ self._check(v))

    def norm_sq(self, v) -> float:
        """|v|_L^2 = <L v, v> >= 0."""
        v = self._check(v)
        return float(self.apply(v) @ v)

    def inv_norm_sq(self, v) -> float:
        """|v|_{L^{-1}}^2 = <L^{-1} v, v>, the dual norm of the gradient side."""
        v = self._check(v)
        return float(self.solve(v) @ v)

    def dist_sq(self, x0, candidates: Sequence) -> float:
        """Smallest |x0 - x|_L^2 over the supplied solution representatives.

        The solution set is represented by an explicit finite list of known
        minimizers; the infimum over the full set is approximated by the
        minimum over these representatives.
        """
        x0 = self._check(x0)
        reps = list(candidates)
        if not reps:
            raise ValueError("candidate set must be non-empty")
        return min(self.norm_sq(x0 - as_point(r, x0.shape[0])) for r in reps)

    def inverse(self) -> "Metric":
        """Metric for the inverse operator L^{-1} (dual-side geometry)."""
        if self.kind == "identity":
            return Metric.identity(self.dim)
        if self.kind == "diagonal":
            return Metric.diagonal(1.0 / self._diag)
        n = self._matrix.shape[0]
        inv = cho_solve(self._factor, np.eye(n))
        return Metric.dense(0.5 * (inv + inv.T))

    # -- serialization ------------------------------------------------

    def to_config(self) -> dict:
        if self.kind == "identity":
            return {"kind": "identity"}
        if self.kind == "diagonal":
            return {"kind": "diagonal", "values": self._diag.tolist()}
        return {"kind": "dense", "rows": self._matrix.tolist()}

    def __repr__(self) -> str:
        return f"Metric(kind={self.kind!r}, dim={self.dim})"


def metric_from_config(cfg: dict) -> Metric:
    """Build a Metric from its config-file form.

    Accepted shapes: ``{"kind": "identity"}``,
    ``{"kind": "diagonal", "values": [...]}`` and
    ``{"kind": "dense", "rows": [[...], ...]}``.
    """
    kind = cfg.get("kind")
    if kind == "identity":
        return Metric.identity(cfg.get("dim"))
    if kind == "diagonal":
        if "values" not in cfg:
            raise ValueError("metric.values is required for the diagonal kind")
        return Metric.diagonal(cfg["values"])
    if kind == "dense":
        if "rows" not in cfg:
            raise ValueError("metric.rows is required for the dense kind")
        return Metric.dense(np.asarray(cfg["rows"], dtype=float))
    raise ValueError(f"metric.kind must be identity, diagonal or dense, got {kind!r}")
