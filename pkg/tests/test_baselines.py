import numpy as np
import pytest

from oracles import full_kr_rows, planted_model, rel_err
from rocp.baselines import (
    batch_cold,
    batch_hot,
    cp_als,
    online_full_init,
    online_full_update,
    pad_temporal,
)
from rocp.errors import DomainError
from rocp.factor_model import KruskalModel, exhaustive_samples, fitness, reconstruct
from rocp.online import rocp_update
from rocp.tensor_core import gram_hadamard


class TestCpAls:
    def test_rank_one(self):
        rng = np.random.default_rng(0)
        x = reconstruct(KruskalModel(tuple(rng.uniform(0.5, 1.5, (d, 1)) for d in (6, 7, 8))))
        assert fitness(x, reconstruct(cp_als(x, 1, rng=1))) >= 0.9999

    def test_planted_init_is_a_fixed_point(self):
        truth = planted_model((8, 9, 10), 3, seed=2)
        x = reconstruct(truth)
        sweeps = []
        model = cp_als(x, 3, init=truth, callback=lambda k, m, f: sweeps.append(f))
        assert len(sweeps) <= 2
        assert fitness(x, reconstruct(model)) >= 0.9999

    def test_residual_non_increasing(self):
        rng = np.random.default_rng(5)
        x = reconstruct(planted_model((7, 8, 9), 3, seed=6)) + 0.5 * rng.standard_normal((7, 8, 9))
        resid = []
        cp_als(x, 3, tol=0.0, max_iters=30, rng=7,
               callback=lambda k, m, f: resid.append(np.linalg.norm(x - reconstruct(m)) ** 2))
        for a, b in zip(resid, resid[1:]):
            assert b <= a * (1 + 1e-9)

    def test_reported_fitness_is_exact(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal((5, 6, 7))
        pairs = []
        cp_als(x, 2, tol=0.0, max_iters=5, rng=9,
               callback=lambda k, m, f: pairs.append((f, fitness(x, reconstruct(m)))))
        for reported, exact in pairs:
            assert reported == pytest.approx(exact, abs=1e-10)

    def test_leading_columns_normalized(self):
        x = np.random.default_rng(10).standard_normal((5, 6, 7))
        model = cp_als(x, 3, max_iters=3, rng=11)
        for u in model.factors[:-1]:
            np.testing.assert_allclose(np.linalg.norm(u, axis=0), 1.0, rtol=1e-12)

    def test_zero_tensor(self):
        with pytest.raises(DomainError):
            cp_als(np.zeros((3, 4)), 1)

    def test_init_shape_checked(self):
        with pytest.raises(DomainError):
            cp_als(np.ones((3, 4, 5)), 2, init=planted_model((3, 4, 6), 2))


@pytest.mark.parametrize("dims", [(4, 5, 6), (3, 4, 2, 5)])
def test_hadamard_of_grams_identity(dims):
    model = planted_model(dims, 3, seed=12)
    for n in range(len(dims)):
        z = full_kr_rows(model.factors, n)
        others = [u for m, u in enumerate(model.factors) if m != n]
        assert rel_err(gram_hadamard(others), z.T @ z) <= 1e-10


class TestBatch:
    def test_cold_is_seeded_cp_als(self):
        x = np.random.default_rng(13).standard_normal((4, 5, 6))
        a = batch_cold(x, 2, rng=np.random.default_rng(14))
        b = cp_als(x, 2, rng=np.random.default_rng(14))
        for ua, ub in zip(a.factors, b.factors):
            np.testing.assert_array_equal(ua, ub)

    def test_pad_temporal_recovers_planted_rows(self):
        truth = planted_model((6, 7, 12), 3, seed=15)
        x = reconstruct(truth)
        padded = pad_temporal(x, truth.replace(-1, truth.factors[-1][:9]))
        assert rel_err(padded.factors[-1], truth.factors[-1]) <= 1e-9

    def test_pad_temporal_head_mismatch(self):
        with pytest.raises(DomainError):
            pad_temporal(np.ones((6, 8, 12)), planted_model((6, 7, 9), 2))

    def test_hot_from_truth_stays_exact(self):
        truth = planted_model((6, 7, 12), 3, seed=16)
        x = reconstruct(truth)
        model = batch_hot(x, 3, truth.replace(-1, truth.factors[-1][:10]))
        assert model.shape == x.shape
        assert fitness(x, reconstruct(model)) >= 0.9999


class TestOnlineFull:
    def test_matches_exhaustive_rocp(self):
        dims, rank = (5, 6, 30), 2
        truth = planted_model(dims, rank, seed=17)
        rng = np.random.default_rng(18)
        x = reconstruct(truth) + 0.1 * rng.standard_normal(dims)
        start = planted_model((5, 6, 10), rank, seed=19)
        state = online_full_init(x[..., :10], start)

        def sampler(d, mode, s, r):
            return exhaustive_samples(d, mode)

        m_full, s_full = start, state
        m_rocp, s_rocp = start, state
        for t in range(10, 30, 4):
            x_new = x[..., t: t + 4]
            m_full, s_full = online_full_update(s_full, m_full, x_new)
            m_rocp, s_rocp = rocp_update(s_rocp, m_rocp, x_new, rng, sampler)
            for a, b in zip(m_rocp.factors, m_full.factors):
                assert rel_err(a, b) <= 1e-10
            for a, b in zip(s_rocp.p + s_rocp.q, s_full.p + s_full.q):
                assert rel_err(a, b) <= 1e-10

    def test_zero_batch(self):
        truth = planted_model((5, 6, 10), 2, seed=20)
        x = reconstruct(truth)
        state = online_full_init(x, truth)
        model, new_state = online_full_update(state, truth, np.zeros((5, 6, 3)))
        for a, b in zip(state.p + state.q, new_state.p + new_state.q):
            np.testing.assert_array_equal(a, b)
        for n in range(2):
            assert rel_err(model.factors[n], truth.factors[n]) <= 1e-10
        np.testing.assert_array_equal(model.factors[-1][10:], 0.0)

    def test_planted_stream(self):
        truth = planted_model((15, 15, 100), 4, seed=21)
        x = reconstruct(truth)
        init = cp_als(x[..., :20], 4, tol=1e-10, max_iters=200, rng=22)
        state, model = online_full_init(x[..., :20], init), init
        for t in range(20, 100):
            model, state = online_full_update(state, model, x[..., t: t + 1])
        assert fitness(x, reconstruct(model)) >= 0.99

    def test_shape_checks(self):
        truth = planted_model((5, 6, 10), 2)
        with pytest.raises(DomainError):
            online_full_init(np.ones((5, 6, 11)), truth)
        state = online_full_init(reconstruct(truth), truth)
        with pytest.raises(DomainError):
            online_full_update(state, truth, np.ones((5, 7, 1)))
