"""
Random Streams
Counter-style stream keys: every Monte Carlo trial draws from its own
generator derived from (master_seed, stream_index), so results do not
depend on execution order or thread count.
"""
import hashlib
from dataclasses import dataclass

import numpy as np

from core.errors import InvalidInputError

_U64 = 2**64


@dataclass(frozen=True)
class StreamKey:
    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            value = int(getattr(self, name))
            if not 0 <= value < _U64:
                raise InvalidInputError(f"{name} must be an unsigned 64-bit integer", value=value)
            object.__setattr__(self, name, value)

    def generator(self):
        """A fresh numpy Generator; the same key always yields the same sequence."""
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.PCG64(seq))

    def child(self, *labels):
        """Derive an independent key from this one and some labels."""
        return stream_for(self.master_seed, self.stream_index, *labels)


def label_hash(*labels):
    """
    Hash a sequence of labels to an unsigned 64-bit index.

    Args:
        labels: strings or integers naming an experiment and a trial

    Returns:
        Integer in [0, 2^64)
    """
    text = "\x1f".join(str(label) for label in labels)
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big")


def stream_for(master_seed, *labels):
    """StreamKey for trial ``labels`` of a run seeded by ``master_seed``."""
    return StreamKey(master_seed=master_seed, stream_index=label_hash(*labels))


def split(key, count, label="batch"):
    """``count`` keys for a fixed batch partition of one experiment."""
    return [key.child(label, i) for i in range(count)]
