"""Counter-based random streams.

Every Monte Carlo loop in the package draws its randomness from
``stream(seed, index)``: a Philox generator keyed by the pair
``(seed, index)``. Streams for different indices are independent, and the
numbers a trial block sees do not depend on which worker thread runs it.
"""

import numpy as np

#: Trials per random stream in the Monte Carlo engines. Fixed, so that results
#: do not depend on the number of workers.
BLOCK_SIZE = 4096

_MASK64 = (1 << 64) - 1


def stream(seed: int, index: int) -> np.random.Generator:
    """Return the generator for stream ``index`` under ``seed``."""
    if index < 0:
        raise ValueError(f"stream index must be nonnegative, got {index}")
    key = np.array([seed & _MASK64, index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def block_ranges(trials: int, start_block: int = 0, block_size: int = BLOCK_SIZE):
    """Yield ``(block_index, n)`` pairs covering ``trials`` trials.

    The last block is truncated to the remaining count; callers still draw a
    full block from its stream and keep the first ``n`` rows, so the trial at
    a given global index always sees the same numbers.
    """
    remaining = trials
    b = start_block
    while remaining > 0:
        n = min(block_size, remaining)
        yield b, n
        remaining -= n
        b += 1
