"""Counter-based random streams keyed by (master seed, stream keys)."""
import numpy as np


def stream(seed, *keys):
    """Independent Philox generator for (seed, keys); same inputs give the same stream."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))
