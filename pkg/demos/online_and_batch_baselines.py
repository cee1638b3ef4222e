"""
Reference algorithms
====================

Three comparison points for the sampled updates: the same online recursion
with complete unfoldings, and batch CP-ALS re-run on everything seen so far
from a random start (cold) or from the previous fit (hot).
"""

import numpy as np

from rocp import (
    batch_cold,
    batch_hot,
    cp_als,
    fitness,
    gen_synthetic,
    online_full_init,
    online_full_update,
    reconstruct,
    split_stream,
)

rng = np.random.default_rng(3)
x, _ = gen_synthetic((20, 20, 60), 4, sir_db=20.0, rng=rng)
x_init, batches = split_stream(x, 0.2, 8)

# online with full products
model = cp_als(x_init, 4, tol=1e-8, max_iters=100, rng=rng)
state = online_full_init(x_init, model)
for b in batches:
    model, state = online_full_update(state, model, b)
print(f"online, full products: {fitness(x, reconstruct(model)):.4f}")

# batch re-fits after each batch
hot = cold = batch_cold(x_init, 4, rng=rng)
seen = x_init
for b in batches:
    seen = np.concatenate([seen, b], axis=-1)
    hot = batch_hot(seen, 4, hot)
    cold = batch_cold(seen, 4, rng=rng)
print(f"batch hot:             {fitness(x, reconstruct(hot)):.4f}")
print(f"batch cold:            {fitness(x, reconstruct(cold)):.4f}")
