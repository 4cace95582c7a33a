"""Seed handling.

Every random quantity descends from one unsigned 64-bit seed.  Child streams
are derived with :meth:`numpy.random.SeedSequence.spawn`, so replicate ``k`` of
a batch always receives the same stream regardless of batch size or the order
in which replicates are executed.  Generators are PCG64, whose output is
identical on every platform.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError

SeedLike = "int | np.random.SeedSequence | np.random.Generator | None"


def parse_seed(text: str) -> int:
    """Parse a decimal or ``0x`` hex unsigned 64-bit seed."""
    try:
        value = int(text, 0)
    except (TypeError, ValueError):
        raise InputError(f"invalid seed {text!r}: expected an unsigned 64-bit integer") from None
    if not 0 <= value < 2**64:
        raise InputError(f"seed {text!r} is outside the unsigned 64-bit range")
    return value


def seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if seed is None:
        return np.random.SeedSequence()
    if isinstance(seed, (int, np.integer)) and seed >= 0:
        return np.random.SeedSequence(int(seed))
    raise InputError(f"invalid seed {seed!r}")


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed_sequence(seed)))


def split(seed, n: int) -> list[np.random.SeedSequence]:
    """``n`` independent child seed sequences of ``seed``."""
    return seed_sequence(seed).spawn(n)
