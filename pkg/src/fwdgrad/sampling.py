"""Reproducible Gaussian direction streams.

Uniform randomness comes from numpy's PCG64 (a named, documented generator
with 128-bit state); normal variates are produced from it by the
Box-Muller transform so the uniform-to-normal mapping is fully pinned
down by this package rather than by the numpy version in use. Substreams
for trials, the objective path, and probes are derived by SeedSequence
hashing of (base_seed, *key), which keeps trial-level parallelism
reproducible regardless of scheduling.
"""

from __future__ import annotations

import numpy as np

_TWO_PI = 2.0 * np.pi


def substream(seed, *key):
    """SeedSequence for an independent stream keyed by (seed, *key)."""
    return np.random.SeedSequence([int(seed)] + [int(k) for k in key])


class DirectionSampler:
    """Stream of i.i.d. standard-normal vectors in R^dim.

    Box-Muller consumes uniforms in blocks: for a request of n variates it
    draws ceil(n/2) uniforms for the radius, then ceil(n/2) for the angle;
    within each pair the cosine variate comes first and an odd request
    discards the trailing sine variate. Single-owner: one sampler must not
    be shared across threads, but distinct samplers may run concurrently.
    """

    def __init__(self, dim, seed=0):
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        self.dim = int(dim)
        ss = seed if isinstance(seed, np.random.SeedSequence) \
            else np.random.SeedSequence(int(seed))
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def standard_normal(self, n):
        """Next n variates of the stream."""
        pairs = (n + 1) // 2
        u1 = 1.0 - self._gen.random(pairs)  # (0, 1]: keeps log finite
        u2 = self._gen.random(pairs)
        r = np.sqrt(-2.0 * np.log(u1))
        z = np.empty(2 * pairs)
        z[0::2] = r * np.cos(_TWO_PI * u2)
        z[1::2] = r * np.sin(_TWO_PI * u2)
        return z[:n]

    def direction(self):
        """Next direction vector, distributed N(0, I_dim)."""
        return self.standard_normal(self.dim)
