"""Seeded random-number streams.

All randomness in the package flows through Philox4x64 counter-based
generators.  A stream is identified by a (seed, stream_id) pair, so
independent pieces of work (one trajectory, one sampled state, one training
run) each get their own reproducible stream regardless of execution order.
"""

import numpy as np
from numpy.random import Generator, Philox

# Fixed stream ids for the top-level consumers, so different stages never
# share a stream even when handed the same user seed.  Dataset generation
# owns the id blocks [k * 2**40, (k+1) * 2**40) for splits k = 0, 1, 2;
# the other stages live in the fourth block.
STREAM_STATE_SAMPLING = 0
STREAM_TRAJECTORY_BASE = 1
_AUX_BLOCK = 3 << 40
STREAM_TRAINING = _AUX_BLOCK
STREAM_PLOT = _AUX_BLOCK + 1
STREAM_SEQUENTIAL = _AUX_BLOCK + 2


def stream(seed: int, stream_id: int) -> Generator:
    """Return the generator for the given (seed, stream_id) pair."""
    if not (0 <= seed < 2**64):
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if stream_id < 0:
        raise ValueError(f"stream_id must be nonnegative, got {stream_id}")
    return Generator(Philox(key=np.array([seed, stream_id], dtype=np.uint64)))


def trajectory_stream(seed: int, index: int) -> Generator:
    """Stream for the index-th trajectory of a batch simulated under seed."""
    return stream(seed, STREAM_TRAJECTORY_BASE + index)
