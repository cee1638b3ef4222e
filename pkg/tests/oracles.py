"""Independent reference computations shared by the unit and acceptance tests."""

import numpy as np

from rocp.factor_model import KruskalModel, draw_samples, reconstruct
from rocp.online import init_state, rocp_update
from rocp.randomized_init import cprand_decompose
from rocp.tensor_core import khatri_rao_list, unfold


def planted_model(dims, rank, seed=0):
    rng = np.random.default_rng(seed)
    return KruskalModel(tuple(rng.standard_normal((d, rank)) for d in dims))


def full_kr_rows(factors, n):
    """Complete Khatri-Rao product of every factor except ``n``, highest mode first."""
    return khatri_rao_list([factors[m] for m in reversed(range(len(factors))) if m != n])


class RecordingSampler:
    """Uniform sampler that keeps every index set it hands out."""

    def __init__(self):
        self.log = []

    def __call__(self, dims, mode, s, rng):
        idx = draw_samples(dims, mode, s, rng)
        self.log.append(idx)
        return idx


def replay_direct(dims, rank, init_len, batch, n_batches, s, seed=0):
    """Stream a planted tensor and rebuild ``P``/``Q`` from the raw sampled system.

    The direct side stacks every sampled unfolding column and every sampled
    Khatri-Rao row seen so far (the initial block included) and forms
    ``X_s @ Z_s`` and ``Z_s.T @ Z_s`` in one product.  Khatri-Rao rows are
    taken from the full product of factor snapshots, not from the sampled
    kernel under test.

    Returns
    -------
    state : ComplementaryState
        Result of the recursive updates.
    direct_p, direct_q : list of ndarray
    """
    rng = np.random.default_rng(seed)
    t_total = init_len + batch * n_batches
    x = reconstruct(planted_model(dims + (t_total,), rank, seed + 1))
    x = x + 0.1 * rng.standard_normal(x.shape)
    init = cprand_decompose(x[..., :init_len], rank, s=s, rng=rng)
    state = init_state(init, s)
    model = init.model
    head = len(dims)

    cols = [[u @ z.T] for u, z in zip(init.best_sampled_factors, init.best_sampled_kr)]
    rows = [[z] for z in init.best_sampled_kr]
    sampler = RecordingSampler()
    for k in range(n_batches):
        x_new = x[..., init_len + k * batch: init_len + (k + 1) * batch]
        before = model
        sampler.log.clear()
        model, state = rocp_update(state, model, x_new, rng, sampler)
        u_new = model.factors[-1][-batch:]
        # log order: temporal draw, then modes 0 .. N-2
        for n, idx in enumerate(sampler.log[1:]):
            assert idx.mode == n
            snap = [model.factors[m] if m < n else before.factors[m] for m in range(head)]
            z_full = full_kr_rows(snap + [u_new], n)
            rows[n].append(z_full[idx.rows])
            cols[n].append(unfold(x_new, n)[:, idx.rows])
    direct_p, direct_q = [], []
    for n in range(head):
        x_s = np.hstack(cols[n])
        z_s = np.vstack(rows[n])
        direct_p.append(x_s @ z_s)
        direct_q.append(z_s.T @ z_s)
    return state, direct_p, direct_q


def rel_err(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), np.finfo(float).tiny)
