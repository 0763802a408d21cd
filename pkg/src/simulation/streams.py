"""
Named deterministic random streams.

Each draw builds a fresh generator from (seed, crc32(stream name), counter),
so streams never share state and adding a stream leaves the others untouched.
Counters are part of the simulation state.
"""
import zlib
from typing import Optional

import numpy as np

from src.simulation.state import Draft


def stream_generator(seed: int, name: str, counter: int) -> np.random.Generator:
    key = (zlib.crc32(name.encode("utf-8")), int(counter))
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=key))


def next_generator(draft: Draft, name: str, seed: Optional[int] = None) -> np.random.Generator:
    """Generator for the next draw on `name`; bumps the stream counter."""
    counter = draft.rng.get(name, 0)
    draft.rng[name] = counter + 1
    return stream_generator(draft.seed if seed is None else seed, name, counter)
