"""Counter-based splittable random streams.

An :class:`RngStream` is the triple (seed, stream_id, counter). The Philox
key is derived from (seed, stream_id) through ``numpy.random.SeedSequence``
and the counter is Philox's block counter, so a stream can be rebuilt at any
point of its sequence from three integers. Child streams are pure functions
of their parent's (seed, stream_id) and a key path, which is what makes
chunked Monte Carlo independent of thread scheduling.
"""

from __future__ import annotations

import enum
import os

import numpy as np

from .errors import ConfigurationError

__all__ = ["RngStream", "Var", "seed_from_env", "DEFAULT_SEED", "SEED_ENV"]

SEED_ENV = "EXCURSION_SEED"
DEFAULT_SEED = 20240917
_U64 = (1 << 64) - 1
_TWO_M53 = 2.0**-53


class Var(enum.IntEnum):
    """Registry of named random ingredients; each gets its own child stream."""

    XI = 1
    XI_PRIME = 2
    E0_PRIME = 3
    ALPHA1 = 4
    ALPHA2 = 5
    LAMBDA_XI = 6
    LAMBDA_EXP = 7
    ARCSINE = 8
    RHO_XI = 9
    RHO_EXP = 10
    STEPS = 11
    CHUNK = 12
    REFERENCE = 13


def seed_from_env(default: int = DEFAULT_SEED) -> int:
    """Seed from ``EXCURSION_SEED`` (decimal), else ``default``."""
    raw = os.environ.get(SEED_ENV, "").strip()
    if not raw:
        return default
    try:
        seed = int(raw, 10)
    except ValueError:
        raise ConfigurationError(f"{SEED_ENV}={raw!r} is not a decimal integer") from None
    return _check_u64("seed", seed)


def _check_u64(name: str, value: int) -> int:
    value = int(value)
    if not 0 <= value <= _U64:
        raise ConfigurationError(f"{name} must fit in an unsigned 64-bit integer, got {value}")
    return value


class RngStream:
    """Deterministic random source addressed by (seed, stream_id, counter).

    Draw methods advance ``counter``. Each call starts on a fresh Philox
    block, so the values drawn depend only on the state before the call.
    A stream is meant to have one owner; hand other workers a ``child``.
    """

    __slots__ = ("seed", "stream_id", "counter", "_key")

    def __init__(self, seed: int, stream_id: int = 0, counter: int = 0):
        self.seed = _check_u64("seed", seed)
        self.stream_id = _check_u64("stream_id", stream_id)
        self.counter = _check_u64("counter", counter)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self._key = ss.generate_state(2, np.uint64)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}, counter={self.counter})"

    def __eq__(self, other):
        if not isinstance(other, RngStream):
            return NotImplemented
        return (self.seed, self.stream_id, self.counter) == (other.seed, other.stream_id, other.counter)

    def __hash__(self):
        return hash((self.seed, self.stream_id, self.counter))

    def _draw(self, fn):
        bitgen = np.random.Philox(key=self._key, counter=self.counter)
        out = fn(np.random.Generator(bitgen))
        # Philox stores a 256-bit counter; streams never get past the low word
        self.counter = int(bitgen.state["state"]["counter"][0])
        return out

    def child(self, *keys: int) -> "RngStream":
        """Stream derived from this one's identity and ``keys``; does not advance."""
        path = (self.stream_id,) + tuple(_check_u64("key", k) for k in keys)
        sid = np.random.SeedSequence(self.seed, spawn_key=path).generate_state(1, np.uint64)[0]
        return RngStream(self.seed, int(sid))

    def split(self) -> "RngStream":
        """Consume one draw and return a stream keyed by it."""
        sid = self._draw(lambda g: g.integers(0, _U64, dtype=np.uint64, endpoint=True))
        return RngStream(self.seed, int(sid))

    def uniform(self, size=None):
        """Uniforms on the open interval (0, 1), 53-bit grid offset by half a step."""
        k = self._draw(lambda g: g.integers(0, 1 << 53, size=size, dtype=np.int64))
        return (k + 0.5) * _TWO_M53

    def exponential(self, size=None):
        """Unit-rate exponentials, strictly positive."""
        return -np.log(self.uniform(size))

    def normal(self, size=None):
        return self._draw(lambda g: g.standard_normal(size))

    def integers(self, low: int, high: int, size=None):
        """Integers in [low, high)."""
        return self._draw(lambda g: g.integers(low, high, size=size))
