"""
Unfoldings and sampled Khatri-Rao rows
======================================

Columns of a mode-n unfolding are ordered with the lowest remaining mode
varying fastest.  A handful of those columns, and the matching rows of the
Khatri-Rao product of the other factors, can be built without ever
forming the full product.
"""

import numpy as np

from rocp import (
    KruskalModel,
    decode_index,
    draw_samples,
    khatri_rao_list,
    linear_index,
    reconstruct,
    sample_unfolding,
    sampled_khatri_rao,
    unfold,
)

x = np.arange(24.0).reshape(2, 3, 4)
print(unfold(x, 1))

# column 5 of the mode-1 unfolding holds i_0 = 1, i_2 = 2
print(decode_index(5, x.shape, 1), linear_index((1, 2), x.shape, 1))

# a random rank-3 model and eight sampled columns of its mode-0 unfolding
rng = np.random.default_rng(0)
dims = (5, 6, 7)
model = KruskalModel(tuple(rng.standard_normal((d, 3)) for d in dims))
y = reconstruct(model)
idx = draw_samples(dims, 0, 8, rng)

z_s = sampled_khatri_rao(idx, [model[1], model[2]])
x_s = sample_unfolding(y, idx)

# the sampled rows agree with the full product, highest mode first
full = khatri_rao_list([model[2], model[1]])
print(np.array_equal(z_s, full[idx.rows]))

# and the sampled system is still consistent with the model
print(np.allclose(model[0] @ z_s.T, x_s))
