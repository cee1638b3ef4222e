"""Randomized online CP: complementary-matrix state and per-batch updates.

The stream grows along the last mode.  For each non-temporal mode ``n``
the state keeps

    P[n] = X_s(n) @ Z_s(n)        (I_n x R)
    Q[n] = Z_s(n).T @ Z_s(n)      (R x R)

accumulated over every sampled system seen so far, so the factor is
recovered as ``P[n] @ inv(Q[n])`` without revisiting old data.  New rows
of the temporal factor are solved from the new slab alone; old rows are
never touched.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, RegularizationWarning
from .factor_model import KruskalModel, draw_samples, sample_unfolding, sampled_khatri_rao
from .randomized_init import InitResult, cprand_decompose, default_sample_size, solve_gram
from .tensor_core import as_tensor

__all__ = [
    "ComplementaryState",
    "init_state",
    "update_last_mode",
    "update_other_modes",
    "rocp_update",
    "rocp_run",
]


@dataclass(frozen=True)
class ComplementaryState:
    """History carried between ROCP updates.

    Attributes
    ----------
    p, q : tuple of ndarray
        One ``I_n x R`` and one ``R x R`` matrix per non-temporal mode.
    t_len : int
        Temporal length absorbed so far (rows of the temporal factor).
    s : int
        Samples drawn per least-squares system.
    dims_head : tuple of int
        Fixed extents of the non-temporal modes.
    n_regularized : int
        Number of ridge-regularized solves so far.
    """

    p: tuple
    q: tuple
    t_len: int
    s: int
    dims_head: tuple
    n_regularized: int = 0

    @property
    def nbytes(self) -> int:
        return sum(m.nbytes for m in self.p) + sum(m.nbytes for m in self.q)


def init_state(init: InitResult, s=None, literal=False) -> ComplementaryState:
    """Build the complementary matrices from a randomized initial fit.

    ``Q[n]`` is the Gram matrix of the best sampled Khatri-Rao block and
    ``P[n] = U_best[n] @ Q[n]``, so the first solve ``P @ inv(Q)`` returns
    the initial factor unchanged.  ``literal=True`` sets ``P[n] = U_best[n]``
    instead.
    """
    model = init.model
    rank = model.rank
    s = init.best_sampled_kr[0].shape[0] if s is None else int(s)
    if len(init.best_sampled_kr) != model.ndim - 1 or len(init.best_sampled_factors) != model.ndim - 1:
        raise DomainError("init result must cover every non-temporal mode")
    p, q = [], []
    for z, u in zip(init.best_sampled_kr, init.best_sampled_factors):
        if z.shape != (s, rank):
            raise DomainError(f"sampled Khatri-Rao block has shape {z.shape}, expected {(s, rank)}")
        gram = z.T @ z
        q.append(gram)
        p.append(u.copy() if literal else u @ gram)
    return ComplementaryState(
        p=tuple(p), q=tuple(q), t_len=model.shape[-1], s=s, dims_head=model.shape[:-1])


def _check_batch(x_new, dims_head):
    x_new = as_tensor(x_new)
    if x_new.shape[:-1] != tuple(dims_head):
        raise DomainError(
            f"batch head dims {x_new.shape[:-1]} do not match {tuple(dims_head)}")
    return x_new


def update_last_mode(model: KruskalModel, x_new, s, rng, sampler=draw_samples):
    """New rows of the temporal factor for one batch.

    Returns
    -------
    u_new : ndarray, shape (batch, R)
    idx : SampleIndexSet
        Columns of the slab's temporal unfolding that were used.
    z_s : ndarray, shape (s, R)
    """
    x_new = _check_batch(x_new, model.shape[:-1])
    last = x_new.ndim - 1
    idx = sampler(x_new.shape, last, s, rng)
    z_s = sampled_khatri_rao(idx, model.factors[:-1])
    u_new, regularized = solve_gram(z_s.T @ z_s, sample_unfolding(x_new, idx) @ z_s)
    if regularized:
        warnings.warn("temporal update regularized", RegularizationWarning, stacklevel=2)
    return u_new, idx, z_s


def update_other_modes(state: ComplementaryState, model: KruskalModel, x_new, u_new, rng,
                       sampler=draw_samples):
    """Fold one batch into ``P``/``Q`` and refresh the non-temporal factors.

    Samples for mode ``n`` are drawn from the new slab only; the sampled
    temporal index selects rows of ``u_new``.  Modes are refreshed in
    order, each using the factors already refreshed for this batch.

    ``model`` may or may not already carry ``u_new`` below its temporal
    factor; only factors ``0 .. N-2`` are replaced.

    Returns
    -------
    model : KruskalModel
    state : ComplementaryState
    """
    x_new = _check_batch(x_new, state.dims_head)
    u_new = np.asarray(u_new, dtype=np.float64)
    if u_new.shape != (x_new.shape[-1], model.rank):
        raise DomainError(f"u_new has shape {u_new.shape}, expected {(x_new.shape[-1], model.rank)}")
    factors = list(model.factors[:-1])
    p, q = list(state.p), list(state.q)
    n_reg = 0
    for n in range(len(factors)):
        idx = sampler(x_new.shape, n, state.s, rng)
        z_new = sampled_khatri_rao(idx, factors[:n] + factors[n + 1:] + [u_new])
        p[n] = p[n] + sample_unfolding(x_new, idx) @ z_new
        q[n] = q[n] + z_new.T @ z_new
        factors[n], regularized = solve_gram(q[n], p[n])
        n_reg += regularized
    model = KruskalModel(tuple(factors) + (model.factors[-1],))
    state = replace(state, p=tuple(p), q=tuple(q), t_len=state.t_len + x_new.shape[-1],
                    n_regularized=state.n_regularized + n_reg)
    return model, state


def rocp_update(state: ComplementaryState, model: KruskalModel, x_new, rng,
                sampler=draw_samples):
    """One complete batch update: temporal rows, append, other modes."""
    if model.shape[-1] != state.t_len:
        raise DomainError(f"model has {model.shape[-1]} temporal rows, state expects {state.t_len}")
    u_new, _, _ = update_last_mode(model, x_new, state.s, rng, sampler)
    model = model.replace(-1, np.vstack([model.factors[-1], u_new]))
    return update_other_modes(state, model, x_new, u_new, rng, sampler)


def rocp_run(x_init, batches, rank, s=None, tol=1e-4, max_iters=100, rng=None,
             literal_init=False, sampler=draw_samples, callback=None) -> KruskalModel:
    """Decompose ``x_init`` and then absorb ``batches`` one at a time.

    Parameters
    ----------
    x_init : array_like
        Leading slabs of the stream (last mode is temporal).
    batches : iterable of array_like
        Subsequent slabs, each with the same head dims as ``x_init``.
    rank : int
    s : int, optional
        Samples per system; defaults to ``max(R, ceil(10 R ln R))``.
    tol, max_iters : float, int
        Stopping rule for the randomized initial fit.
    rng : numpy.random.Generator or int, optional
    literal_init : bool
        Seed ``P`` with the bare initial factors, see :func:`init_state`.
    sampler : callable
        ``(dims, mode, s, rng) -> SampleIndexSet``.
    callback : callable, optional
        Called as ``callback(k, model, state)`` after each batch.

    Returns
    -------
    KruskalModel
    """
    rng = np.random.default_rng(rng)
    s = default_sample_size(rank) if s is None else int(s)
    init = cprand_decompose(x_init, rank, s=s, tol=tol, max_iters=max_iters, rng=rng)
    state = init_state(init, s, literal=literal_init)
    model = init.model
    for k, x_new in enumerate(batches):
        model, state = rocp_update(state, model, x_new, rng, sampler)
        if callback is not None:
            callback(k, model, state)
    return model
