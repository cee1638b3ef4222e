"""Kruskal models, the fitness metric, and sampled Khatri-Rao products."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .tensor_core import (
    as_tensor,
    decode_index,
    frobenius_norm,
    gram_hadamard,
    khatri_rao_list,
    other_dims,
)

__all__ = [
    "KruskalModel",
    "SampleIndexSet",
    "reconstruct",
    "fitness",
    "factor_fitness",
    "draw_samples",
    "exhaustive_samples",
    "sample_unfolding",
    "sampled_khatri_rao",
]


@dataclass(frozen=True)
class KruskalModel:
    """Rank-``R`` CP model given by one ``I_n x R`` loading matrix per mode."""

    factors: tuple

    def __post_init__(self):
        factors = tuple(np.asarray(u, dtype=np.float64) for u in self.factors)
        if len(factors) < 2:
            raise DomainError("a Kruskal model needs at least two factors")
        if any(u.ndim != 2 for u in factors):
            raise DomainError("every factor must be a matrix")
        ranks = {u.shape[1] for u in factors}
        if len(ranks) != 1:
            raise DomainError(f"factors disagree on rank: {sorted(ranks)}")
        if not all(np.all(np.isfinite(u)) for u in factors):
            raise DomainError("factor entries must be finite")
        object.__setattr__(self, "factors", factors)

    @property
    def rank(self) -> int:
        return self.factors[0].shape[1]

    @property
    def ndim(self) -> int:
        return len(self.factors)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(u.shape[0] for u in self.factors)

    def __getitem__(self, n):
        return self.factors[n]

    def __len__(self):
        return len(self.factors)

    def replace(self, n, u) -> "KruskalModel":
        """Copy of the model with factor ``n`` swapped for ``u``."""
        factors = list(self.factors)
        factors[n] = u
        return KruskalModel(tuple(factors))

    def full(self) -> np.ndarray:
        return reconstruct(self)


@dataclass(frozen=True)
class SampleIndexSet:
    """Columns drawn from a mode-``mode`` unfolding of a tensor of shape ``dims``.

    Attributes
    ----------
    mode : int
    dims : tuple of int
    rows : ndarray of int, shape (s,)
        0-based column indices of the unfolding (rows of its transpose).
    decoded : ndarray of int, shape (s, N-1)
        Per-mode indices of each sample, modes in increasing order with
        ``mode`` skipped.
    """

    mode: int
    dims: tuple
    rows: np.ndarray
    decoded: np.ndarray

    @property
    def s(self) -> int:
        return len(self.rows)

    @classmethod
    def from_rows(cls, rows, dims, mode) -> "SampleIndexSet":
        dims = tuple(int(d) for d in dims)
        rows = np.asarray(rows, dtype=np.int64).reshape(-1)
        return cls(mode, dims, rows, decode_index(rows, dims, mode).reshape(len(rows), -1))


def reconstruct(model: KruskalModel, dims=None) -> np.ndarray:
    """Full tensor represented by ``model`` (Fortran-ordered)."""
    factors = model.factors
    if dims is not None and tuple(dims) != model.shape:
        raise DomainError(f"model shape {model.shape} does not match dims {tuple(dims)}")
    # first factor times the transposed Khatri-Rao of the rest, in reverse order
    out = factors[-1]
    for u in factors[-2:0:-1]:
        out = (out[:, None, :] * u[None, :, :]).reshape(-1, model.rank)
    mat = factors[0] @ out.T
    return np.reshape(mat, model.shape, order="F")


def fitness(x, x_hat, norm_x=None) -> float:
    """``1 - ||x_hat - x|| / ||x||``.

    ``norm_x`` may be passed to skip recomputing ``||x||``.
    """
    x = np.asarray(x, dtype=np.float64)
    x_hat = np.asarray(x_hat, dtype=np.float64)
    if x.shape != x_hat.shape:
        raise DomainError(f"shape mismatch {x.shape} vs {x_hat.shape}")
    norm = frobenius_norm(x) if norm_x is None else norm_x
    if norm == 0.0:
        raise DomainError("fitness is undefined for an all-zero reference tensor")
    return 1.0 - frobenius_norm(x_hat - x) / norm


def factor_fitness(x_unfolded, norm_x, factors) -> float:
    """Fitness of a model against a tensor given by its mode-0 unfolding.

    Expands ``||x - x_hat||^2 = ||x||^2 - 2 <x, x_hat> + ||x_hat||^2`` so the
    model is never reconstructed; the inner product needs one product of
    the unfolding with a Khatri-Rao matrix.
    """
    factors = list(factors)
    inner = np.sum(factors[0] * (x_unfolded @ khatri_rao_list(factors[:0:-1])))
    norm_hat_sq = np.sum(gram_hadamard(factors))
    resid_sq = max(norm_x ** 2 - 2.0 * inner + norm_hat_sq, 0.0)
    return 1.0 - float(np.sqrt(resid_sq)) / norm_x


def draw_samples(dims, mode, s, rng) -> SampleIndexSet:
    """Draw ``s`` unfolding columns uniformly with replacement."""
    if s < 1:
        raise DomainError(f"sample count must be >= 1, got {s}")
    size = int(np.prod(other_dims(dims, mode)))
    rows = rng.integers(0, size, size=s)
    return SampleIndexSet.from_rows(rows, dims, mode)


def exhaustive_samples(dims, mode, s=None, rng=None) -> SampleIndexSet:
    """Every unfolding column exactly once, in order.

    Has the same signature as :func:`draw_samples` so it can stand in as a
    sampler; ``s`` and ``rng`` are ignored.
    """
    size = int(np.prod(other_dims(dims, mode)))
    return SampleIndexSet.from_rows(np.arange(size), dims, mode)


def sample_unfolding(x, idx: SampleIndexSet) -> np.ndarray:
    """Selected columns of the mode-``idx.mode`` unfolding, shape ``(I_n, s)``.

    Fibers are gathered directly; the unfolding itself is never formed.
    """
    x = as_tensor(x)
    if x.shape != idx.dims:
        raise DomainError(f"tensor shape {x.shape} does not match sample dims {idx.dims}")
    moved = np.moveaxis(x, idx.mode, 0)
    return moved[(slice(None),) + tuple(idx.decoded.T)]


def sampled_khatri_rao(idx: SampleIndexSet, factors: Sequence[np.ndarray]) -> np.ndarray:
    """Rows ``idx.rows`` of the Khatri-Rao product of ``factors``, shape ``(s, R)``.

    ``factors`` are the ``N-1`` loading matrices of every mode except
    ``idx.mode``, in increasing mode order.  Each sampled row is the
    Hadamard product of one row per factor, so only ``s x R`` values are
    ever allocated.
    """
    factors = [np.asarray(u, dtype=np.float64) for u in factors]
    if len(factors) != idx.decoded.shape[1]:
        raise DomainError(
            f"expected {idx.decoded.shape[1]} factors for mode {idx.mode}, got {len(factors)}")
    if len({u.shape[1] for u in factors}) != 1:
        raise DomainError("factors disagree on rank")
    # highest mode first, so the multiplication order matches khatri_rao_list
    # over the reversed factor list bit for bit
    z = None
    for col in range(len(factors) - 1, -1, -1):
        u = factors[col]
        rows = idx.decoded[:, col]
        if rows.size and rows.max() >= u.shape[0]:
            raise DomainError(
                f"sampled index {rows.max()} exceeds factor with {u.shape[0]} rows")
        z = u[rows] if z is None else z * u[rows]
    return z
