"""Reference algorithms: batch CP-ALS (cold and hot start) and full-product online CP."""

from __future__ import annotations

import numpy as np

from .errors import DomainError, NumericalFailure
from .factor_model import KruskalModel
from .online import ComplementaryState
from .randomized_init import solve_gram
from .tensor_core import as_tensor, frobenius_norm, gram_hadamard, khatri_rao_list, unfold

__all__ = [
    "cp_als",
    "batch_cold",
    "batch_hot",
    "pad_temporal",
    "online_full_init",
    "online_full_update",
]


def _others_reversed(factors, n):
    return [factors[m] for m in range(len(factors) - 1, -1, -1) if m != n]


def cp_als(x, rank, tol=1e-4, max_iters=50, init=None, rng=None, callback=None) -> KruskalModel:
    """CP decomposition by alternating least squares.

    Each factor is solved against the full Khatri-Rao product of the others
    through the normal equations, with the Gram matrix formed as a
    Hadamard product of factor Grams.  After every sweep the columns of
    the leading factors are scaled to unit norm and the norms absorbed
    into the last factor.

    Parameters
    ----------
    x : array_like
    rank : int
    tol : float
        Stop once the fitness changes by less than ``tol`` between sweeps.
    max_iters : int
    init : KruskalModel, optional
        Starting point; standard normal factors from ``rng`` otherwise.
    rng : numpy.random.Generator or int, optional
    callback : callable, optional
        ``callback(sweep, model, fit)`` after each sweep.

    Returns
    -------
    KruskalModel
    """
    x = as_tensor(x)
    if rank < 1:
        raise DomainError(f"rank must be >= 1, got {rank}")
    norm_x = frobenius_norm(x)
    if norm_x == 0.0:
        raise DomainError("cannot decompose an all-zero tensor")
    if init is None:
        rng = np.random.default_rng(rng)
        factors = [rng.standard_normal((d, rank)) for d in x.shape]
    else:
        if init.shape != x.shape or init.rank != rank:
            raise DomainError(f"init model {init.shape} rank {init.rank} does not fit {x.shape}")
        factors = [u.copy() for u in init.factors]

    ndim = x.ndim
    unfolded = [unfold(x, n) for n in range(ndim)]
    prev_fit = None
    for sweep in range(1, max_iters + 1):
        for n in range(ndim):
            z = khatri_rao_list(_others_reversed(factors, n))
            gram = gram_hadamard(factors[:n] + factors[n + 1:])
            mttkrp = unfolded[n] @ z
            factors[n], _ = solve_gram(gram, mttkrp)
        if not all(np.all(np.isfinite(u)) for u in factors):
            raise NumericalFailure("non-finite factor", sweep=sweep)

        # ||x - x_hat||^2 from the last mode's MTTKRP and Gram
        inner = np.sum(factors[-1] * mttkrp)
        norm_hat_sq = np.sum(gram * (factors[-1].T @ factors[-1]))
        resid = np.sqrt(max(norm_x ** 2 - 2 * inner + norm_hat_sq, 0.0))
        fit = 1.0 - resid / norm_x

        norms = [np.linalg.norm(u, axis=0) for u in factors[:-1]]
        for n, w in enumerate(norms):
            w = np.where(w > 0, w, 1.0)
            factors[n] = factors[n] / w
            factors[-1] = factors[-1] * w

        if callback is not None:
            callback(sweep, KruskalModel(tuple(factors)), fit)
        if prev_fit is not None and abs(fit - prev_fit) < tol:
            break
        prev_fit = fit
    return KruskalModel(tuple(factors))


def batch_cold(x, rank, tol=1e-4, max_iters=50, rng=None) -> KruskalModel:
    """CP-ALS from a fresh random start."""
    return cp_als(x, rank, tol=tol, max_iters=max_iters, rng=rng)


def pad_temporal(x, prev: KruskalModel) -> KruskalModel:
    """Extend ``prev`` with least-squares temporal rows for the new slabs of ``x``."""
    x = as_tensor(x)
    if x.shape[:-1] != prev.shape[:-1]:
        raise DomainError(f"head dims {x.shape[:-1]} do not match model {prev.shape[:-1]}")
    t_old = prev.shape[-1]
    if x.shape[-1] < t_old:
        raise DomainError("tensor is shorter than the previous model")
    if x.shape[-1] == t_old:
        return prev
    head = list(prev.factors[:-1])
    z = khatri_rao_list(head[::-1])
    x_new = unfold(x[..., t_old:], x.ndim - 1)
    u_new, _ = solve_gram(gram_hadamard(head), x_new @ z)
    return prev.replace(-1, np.vstack([prev.factors[-1], u_new]))


def batch_hot(x, rank, prev: KruskalModel, tol=1e-4, max_iters=50) -> KruskalModel:
    """CP-ALS started from the previous step's model (temporal rows padded)."""
    return cp_als(x, rank, tol=tol, max_iters=max_iters, init=pad_temporal(x, prev))


def online_full_init(x_init, model: KruskalModel) -> ComplementaryState:
    """Exact complementary matrices ``P = X_(n) Z_(n)``, ``Q = Z_(n).T Z_(n)``."""
    x_init = as_tensor(x_init)
    if x_init.shape != model.shape:
        raise DomainError(f"model shape {model.shape} does not match tensor {x_init.shape}")
    factors = model.factors
    p, q = [], []
    for n in range(x_init.ndim - 1):
        p.append(unfold(x_init, n) @ khatri_rao_list(_others_reversed(factors, n)))
        q.append(gram_hadamard(factors[:n] + factors[n + 1:]))
    return ComplementaryState(p=tuple(p), q=tuple(q), t_len=model.shape[-1], s=None,
                              dims_head=model.shape[:-1])


def online_full_update(state: ComplementaryState, model: KruskalModel, x_new):
    """Online CP update using complete unfoldings and Khatri-Rao products.

    Same recursion as the sampled update, with every column of the new
    slab used instead of a sample.

    Returns
    -------
    model : KruskalModel
    state : ComplementaryState
    """
    x_new = as_tensor(x_new)
    if x_new.shape[:-1] != tuple(state.dims_head):
        raise DomainError(f"batch head dims {x_new.shape[:-1]} do not match {state.dims_head}")
    if model.shape[-1] != state.t_len:
        raise DomainError(f"model has {model.shape[-1]} temporal rows, state expects {state.t_len}")
    head = list(model.factors[:-1])
    last = x_new.ndim - 1
    z = khatri_rao_list(head[::-1])
    u_new, n_reg = solve_gram(z.T @ z, unfold(x_new, last) @ z)

    p, q = list(state.p), list(state.q)
    for n in range(last):
        current = head + [u_new]
        z_new = khatri_rao_list(_others_reversed(current, n))
        p[n] = p[n] + unfold(x_new, n) @ z_new
        q[n] = q[n] + z_new.T @ z_new
        head[n], regularized = solve_gram(q[n], p[n])
        n_reg += regularized

    model = KruskalModel(tuple(head) + (np.vstack([model.factors[-1], u_new]),))
    state = ComplementaryState(p=tuple(p), q=tuple(q), t_len=state.t_len + x_new.shape[-1],
                               s=state.s, dims_head=state.dims_head,
                               n_regularized=state.n_regularized + n_reg)
    return model, state
