"""Randomized CP-ALS used to decompose the initial part of a stream."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg.lapack import dpocon as pocon, dpotrf as potrf, dpotrs as potrs

from .errors import DomainError, NumericalFailure, RankDeficiencyWarning, RegularizationWarning
from .factor_model import (
    KruskalModel,
    draw_samples,
    factor_fitness,
    sample_unfolding,
    sampled_khatri_rao,
)
from .tensor_core import as_tensor, frobenius_norm, unfold

__all__ = [
    "InitResult",
    "default_sample_size",
    "solve_gram",
    "solve_sampled_ls",
    "cprand_decompose",
]

#: condition-number threshold above which a ridge term is added
COND_LIMIT = 1e12
#: ridge weight relative to trace(Gram)
RIDGE_SCALE = 1e-12


def default_sample_size(rank: int) -> int:
    """``max(R, ceil(10 R ln R))``."""
    if rank < 1:
        raise DomainError(f"rank must be >= 1, got {rank}")
    return max(rank, math.ceil(10 * rank * math.log(rank)))


def solve_gram(gram, rhs):
    """Solve ``U @ gram = rhs`` for symmetric positive semidefinite ``gram``.

    Uses a Cholesky solve.  If Cholesky fails or the LAPACK condition
    estimate exceeds ``COND_LIMIT``, ``RIDGE_SCALE * trace(gram) * I`` is
    added first.

    Returns
    -------
    u : ndarray, shape ``rhs.shape``
    regularized : bool
    """
    gram = np.asarray(gram, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    chol, info = potrf(gram, lower=False, clean=False)
    regularized = info != 0
    if not regularized:
        rcond, _ = pocon(chol, np.abs(gram).sum(axis=0).max())
        regularized = not rcond * COND_LIMIT > 1.0
    if regularized:
        lam = RIDGE_SCALE * np.trace(gram)
        if not lam > 0.0:
            lam = RIDGE_SCALE
        chol, info = potrf(gram + lam * np.eye(len(gram)), lower=False, clean=False)
        if info != 0:
            raise NumericalFailure("Gram matrix is not positive semidefinite")
    u, _ = potrs(chol, rhs.T, lower=False)
    return u.T, regularized


def solve_sampled_ls(z_s, x_s):
    """Least-squares factor update from a sampled system.

    Minimizes ``||z_s @ U.T - x_s.T||_F`` through the normal equations.

    Parameters
    ----------
    z_s : ndarray, shape (s, R)
        Sampled Khatri-Rao rows.
    x_s : ndarray, shape (I_n, s)
        Matching sampled unfolding columns.

    Returns
    -------
    ndarray, shape (I_n, R)

    Warns
    -----
    RankDeficiencyWarning
        When ``s < R``.
    RegularizationWarning
        When the Gram matrix needed a ridge term.
    """
    z_s = np.asarray(z_s, dtype=np.float64)
    x_s = np.asarray(x_s, dtype=np.float64)
    if z_s.shape[0] != x_s.shape[1]:
        raise DomainError(f"sample counts differ: z_s {z_s.shape}, x_s {x_s.shape}")
    if z_s.shape[0] < z_s.shape[1]:
        warnings.warn(f"{z_s.shape[0]} samples for rank {z_s.shape[1]}",
                      RankDeficiencyWarning, stacklevel=2)
    u, regularized = solve_gram(z_s.T @ z_s, x_s @ z_s)
    if regularized:
        warnings.warn("sampled Gram matrix regularized", RegularizationWarning, stacklevel=2)
    return u


@dataclass
class InitResult:
    """Outcome of :func:`cprand_decompose`.

    ``best_sampled_kr[n]`` and ``best_sampled_factors[n]`` cover the
    non-temporal modes ``n = 0 .. N-2`` only; ``model`` is the full model
    at the best iterate.
    """

    model: KruskalModel
    best_sampled_kr: list
    best_sampled_factors: list
    best_fitness: float
    iterations: int
    fitness_trace: list = field(default_factory=list)
    n_regularized: int = 0


def cprand_decompose(x, rank, s=None, tol=1e-4, max_iters=100, rng=None,
                     init=None) -> InitResult:
    """Randomized CP-ALS.

    Each sweep updates every factor from ``s`` freshly sampled columns of
    the corresponding unfolding.  Full-tensor fitness is evaluated after
    each sweep (without reconstructing the model); iteration stops once it
    changes by less than ``tol``.

    Parameters
    ----------
    x : array_like
        Tensor to decompose.
    rank : int
    s : int, optional
        Samples per least-squares solve; defaults to
        :func:`default_sample_size`.
    tol : float
    max_iters : int
    rng : numpy.random.Generator, optional
    init : KruskalModel, optional
        Starting factors; standard normal entries otherwise.

    Returns
    -------
    InitResult
    """
    x = as_tensor(x)
    if rank < 1:
        raise DomainError(f"rank must be >= 1, got {rank}")
    norm_x = frobenius_norm(x)
    if norm_x == 0.0:
        raise DomainError("cannot decompose an all-zero tensor")
    rng = np.random.default_rng(rng)
    s = default_sample_size(rank) if s is None else int(s)
    dims = x.shape
    ndim = x.ndim

    if init is None:
        factors = [rng.standard_normal((d, rank)) for d in dims]
    else:
        if init.shape != dims or init.rank != rank:
            raise DomainError("initial model does not match tensor shape / rank")
        factors = [u.copy() for u in init.factors]

    x0 = np.ascontiguousarray(unfold(x, 0))
    best_fit = -np.inf
    best_factors = None
    prev_fit = None
    trace = []
    n_regularized = 0
    it = 0
    for it in range(1, max_iters + 1):
        for n in range(ndim):
            idx = draw_samples(dims, n, s, rng)
            z_s = sampled_khatri_rao(idx, factors[:n] + factors[n + 1:])
            x_s = sample_unfolding(x, idx)
            factors[n], regularized = solve_gram(z_s.T @ z_s, x_s @ z_s)
            n_regularized += regularized
            if not np.all(np.isfinite(factors[n])):
                raise NumericalFailure(f"non-finite factor in mode {n}", sweep=it)
        fit = factor_fitness(x0, norm_x, factors)
        if not np.isfinite(fit):
            raise NumericalFailure("non-finite fitness", sweep=it)
        trace.append(fit)
        if fit > best_fit:
            best_fit = fit
            best_factors = [u.copy() for u in factors]
        if prev_fit is not None and abs(fit - prev_fit) < tol:
            break
        prev_fit = fit

    best_kr = []
    for n in range(ndim - 1):
        idx = draw_samples(dims, n, s, rng)
        best_kr.append(sampled_khatri_rao(idx, best_factors[:n] + best_factors[n + 1:]))

    return InitResult(
        model=KruskalModel(tuple(best_factors)),
        best_sampled_kr=best_kr,
        best_sampled_factors=[u.copy() for u in best_factors[:-1]],
        best_fitness=float(best_fit),
        iterations=it,
        fitness_trace=trace,
        n_regularized=n_regularized,
    )
