"""
Rewiring convolutional filter banks
===================================

A (w, h, z, o) filter bank is a bipartite layer too: the w*h*z filter
positions are the input neurons and the o filters the output neurons.
Reshaping to 2-D makes every matrix operation (strength analysis and
rewiring) apply unchanged, and the reshape is a bijection on entries.
"""

import numpy as np

from strength_init import (
    InitSpec,
    RewireConfig,
    conv_to_2d,
    derive_stream,
    init,
    pa_rewire_conv,
    strength_stats,
)

w, h, z, o = 3, 3, 16, 32
stream = derive_stream(11, 0, 0)
flat = init(InitSpec("kaiming-normal", w * h * z, o), stream)
bank = flat.reshape(w, h, z, o)
print(f"filter bank {bank.shape} -> matrix {conv_to_2d(bank).shape}")

base = strength_stats(conv_to_2d(bank), "input")
rewired = pa_rewire_conv(bank, RewireConfig(rng=stream))
after = strength_stats(conv_to_2d(rewired), "input")

print(f"strength variance: {base.variance:.4f} -> {after.variance:.4f}")
print(f"max |strength|:    {base.max_abs:.4f} -> {after.max_abs:.4f}")
print("filter-value multiset preserved:",
      np.array_equal(np.sort(bank, axis=None), np.sort(rewired, axis=None)))
print("shape preserved:", rewired.shape == bank.shape)
