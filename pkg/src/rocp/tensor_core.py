"""Dense tensor primitives: unfolding, folding, norms and matrix products.

Tensors are plain :class:`numpy.ndarray` objects of dtype ``float64`` with
``ndim >= 2``.  The column order of a mode-``n`` unfolding follows the
first-index-fastest convention: entry ``(i_1, ..., i_N)`` lands in column

    j = sum_{k != n} i_k * J_k,   J_k = prod_{m < k, m != n} I_m

(all indices 0-based).  A Fortran-ordered array therefore unfolds along
mode 0 without copying.

Khatri-Rao products use the matching convention: in ``khatri_rao(a, b)``
the rows of ``b`` vary fastest, so

    khatri_rao_list([U[N-1], ..., U[n+1], U[n-1], ..., U[0]])

has row ``j`` equal to the Hadamard product of the factor rows picked out
by ``decode_index(j, dims, n)``.
"""

from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

from .errors import DomainError

__all__ = [
    "as_tensor",
    "other_dims",
    "linear_index",
    "decode_index",
    "unfold",
    "fold",
    "frobenius_norm",
    "khatri_rao",
    "khatri_rao_list",
    "hadamard",
    "gram_hadamard",
]


def as_tensor(x) -> np.ndarray:
    """Validate and convert ``x`` to a float64 tensor of order >= 2."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim < 2:
        raise DomainError(f"tensors need at least 2 modes, got ndim={x.ndim}")
    if 0 in x.shape:
        raise DomainError(f"every extent must be >= 1, got shape {x.shape}")
    return x


def _check_mode(mode, ndim):
    if not 0 <= mode < ndim:
        raise DomainError(f"mode {mode} out of range for a {ndim}-way tensor")


def other_dims(dims: Sequence[int], mode: int) -> tuple[int, ...]:
    """Extents of every mode except ``mode``, in increasing mode order."""
    _check_mode(mode, len(dims))
    return tuple(int(d) for k, d in enumerate(dims) if k != mode)


def linear_index(multi_index, dims, mode):
    """Column of the mode-``mode`` unfolding that holds a multi-index.

    Parameters
    ----------
    multi_index : array_like of int, shape (N-1,) or (s, N-1)
        0-based indices of every mode except ``mode``, in increasing mode
        order.
    dims : sequence of int
    mode : int

    Returns
    -------
    int or ndarray of int

    Examples
    --------
    >>> linear_index((2, 3), (2, 3, 4), 0)
    11
    """
    rest = other_dims(dims, mode)
    idx = np.asarray(multi_index, dtype=np.int64)
    if idx.shape[-1:] != (len(rest),):
        raise DomainError(
            f"expected {len(rest)} indices per entry, got shape {idx.shape}")
    if np.any(idx < 0) or np.any(idx >= np.asarray(rest)):
        raise DomainError(f"multi-index {multi_index} out of range for {rest}")
    strides = np.concatenate(([1], np.cumprod(rest[:-1], dtype=np.int64)))
    j = idx @ strides
    return int(j) if np.ndim(j) == 0 else j


def decode_index(j, dims, mode):
    """Inverse of :func:`linear_index`.

    Returns an array of shape ``(N-1,)`` for scalar ``j`` or ``(s, N-1)``
    for an array of column indices.
    """
    rest = other_dims(dims, mode)
    try:
        parts = np.unravel_index(np.asarray(j, dtype=np.int64), rest, order="F")
    except ValueError:
        raise DomainError(f"column index out of range for co-domain {rest}") from None
    return np.stack(parts, axis=-1)


def unfold(x, mode: int) -> np.ndarray:
    """Mode-``mode`` matricization, shape ``(I_mode, prod of other extents)``."""
    x = as_tensor(x)
    _check_mode(mode, x.ndim)
    return np.reshape(np.moveaxis(x, mode, 0), (x.shape[mode], -1), order="F")


def fold(m, mode: int, dims) -> np.ndarray:
    """Inverse of :func:`unfold`; returns a Fortran-ordered tensor."""
    m = np.asarray(m, dtype=np.float64)
    dims = tuple(int(d) for d in dims)
    rest = other_dims(dims, mode)
    if m.shape != (dims[mode], int(np.prod(rest))):
        raise DomainError(
            f"matrix of shape {m.shape} cannot fold into {dims} along mode {mode}")
    moved = np.reshape(m, (dims[mode],) + rest, order="F")
    return np.asfortranarray(np.moveaxis(moved, 0, mode))


def frobenius_norm(x) -> float:
    """Square root of the sum of squared entries."""
    flat = np.asarray(x, dtype=np.float64).ravel(order="K")
    return float(np.sqrt(flat @ flat))


def khatri_rao(a, b) -> np.ndarray:
    """Column-wise Kronecker product of ``a`` (M x R) and ``b`` (P x R).

    Row ``m * P + p`` of the result is ``a[m] * b[p]``.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise DomainError(
            f"Khatri-Rao needs matrices with equal column counts, got {a.shape} and {b.shape}")
    return (a[:, None, :] * b[None, :, :]).reshape(-1, a.shape[1])


def khatri_rao_list(matrices) -> np.ndarray:
    """Left fold of :func:`khatri_rao` over ``matrices`` in the given order."""
    matrices = list(matrices)
    if not matrices:
        raise DomainError("khatri_rao_list needs at least one matrix")
    first = np.asarray(matrices[0], dtype=np.float64)
    if first.ndim != 2:
        raise DomainError(f"expected a matrix, got shape {first.shape}")
    return reduce(khatri_rao, matrices[1:], first)


def hadamard(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DomainError(f"Hadamard product needs equal shapes, got {a.shape} and {b.shape}")
    return a * b


def gram_hadamard(factors) -> np.ndarray:
    """Hadamard product of the Gram matrices ``U.T @ U`` of ``factors``.

    Equals ``Z.T @ Z`` for ``Z`` the Khatri-Rao product of the same factors.
    """
    return reduce(np.multiply, (u.T @ u for u in factors))
