"""Counter-based random substreams.

A stream is keyed by ``(master seed, stream id)`` through a
:class:`numpy.random.SeedSequence` spawn key feeding a Philox generator,
so the draws of stream ``r`` never depend on which worker consumes it.
"""

import numpy as np


class RandomStream:
    def __init__(self, seed, stream_id=0):
        if seed < 0 or stream_id < 0:
            raise ValueError("seed and stream id must be non-negative")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.Philox(ss))

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id})"

    def substream(self, child):
        """Independent child stream, e.g. for symmetrization copies."""
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, int(child)))
        out = RandomStream.__new__(RandomStream)
        out.seed, out.stream_id = self.seed, self.stream_id
        out.generator = np.random.Generator(np.random.Philox(ss))
        return out
