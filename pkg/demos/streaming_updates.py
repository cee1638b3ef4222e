"""
Streaming updates
=================

Decompose the first slabs of a stream, then absorb the rest one batch at a
time.  The carried state is two small matrices per non-temporal mode, so
its size does not change however long the stream gets.  It can be written
to disk and picked up again later.
"""

import tempfile
from pathlib import Path

import numpy as np

from rocp import (
    cprand_decompose,
    fitness,
    gen_synthetic,
    init_state,
    load_state,
    reconstruct,
    rocp_update,
    save_state,
    split_stream,
)

rng = np.random.default_rng(1)
x, _ = gen_synthetic((25, 25, 25, 120), 5, sir_db=20.0, rng=rng)
x_init, batches = split_stream(x, init_fraction=0.2, batch_size=4)

init = cprand_decompose(x_init, 5, rng=rng)
state, model = init_state(init), init.model
print(f"init on {x_init.shape}: fitness {init.best_fitness:.4f}, state {state.nbytes} bytes")

half = len(batches) // 2
for b in batches[:half]:
    model, state = rocp_update(state, model, b, rng)

# checkpoint and resume
path = Path(tempfile.mkdtemp()) / "state.rt"
save_state(path, state)
state = load_state(path, s=state.s)

for b in batches[half:]:
    model, state = rocp_update(state, model, b, rng)

print(f"after {len(batches)} batches: {model.shape[-1]} temporal rows, "
      f"state still {state.nbytes} bytes, fitness {fitness(x, reconstruct(model)):.4f}")
