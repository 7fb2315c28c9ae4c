"""Counter-based random streams.

Every sampler in the package draws from a stream keyed by
(seed, replica, purpose).  Streams with different keys are independent,
and a stream's draws never depend on how many other streams exist, so
adding a new statistic to an experiment cannot perturb existing ones.
"""

import zlib

import numpy as np


def purpose_tag(purpose):
    """Stable 32-bit tag for a purpose string."""
    return zlib.crc32(purpose.encode("utf-8")) & 0xFFFFFFFF


def stream(seed, replica=0, purpose=""):
    """Independent Philox generator for (seed, replica, purpose)."""
    ss = np.random.SeedSequence(
        entropy=int(seed) & 0xFFFFFFFFFFFFFFFF,
        spawn_key=(int(replica) & 0xFFFFFFFF, purpose_tag(purpose)),
    )
    return np.random.Generator(np.random.Philox(ss))
