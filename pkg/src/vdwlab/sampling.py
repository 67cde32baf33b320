"""Binomial random subsets of Z/nZ and the small amount of statistics we need.

Sampling is counter-based: a (seed, stream) pair keys a Philox generator, so
any trial of any campaign can be regenerated in isolation, in any order, on
any platform.  The inclusion probability at the threshold scale is
p = c * n^(-1/(k-1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cyclic import GroundSubset

__all__ = [
    "RandomSeed",
    "SampleConfig",
    "threshold_probability",
    "sample_binomial_subset",
    "second_round",
    "chernoff_tail",
    "wilson_interval",
]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RandomSeed:
    """Root seed plus a stream index; distinct streams are independent."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array(
            [self.seed & _MASK64, self.stream & _MASK64], dtype=np.uint64
        )
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, stream: int) -> "RandomSeed":
        return RandomSeed(self.seed, stream)


def threshold_probability(n: int, k: int, c: float) -> float:
    """p = c * n^(-1/(k-1)), clamped into [0, 1]."""
    if k < 3:
        raise ValueError("progression length k must be at least 3")
    if n < 1:
        raise ValueError("modulus must be positive")
    if c < 0:
        raise ValueError("threshold constant c must be nonnegative")
    return min(1.0, c * n ** (-1.0 / (k - 1)))


@dataclass(frozen=True)
class SampleConfig:
    """Parameters of one random-subset experiment."""

    n: int
    k: int
    c: float
    epsilon: float = 0.0
    p: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "p", threshold_probability(self.n, self.k, self.c))
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")


def sample_binomial_subset(n: int, p: float, seed: RandomSeed | int) -> GroundSubset:
    """Each residue of Z/nZ joins independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"inclusion probability must be in [0, 1], got {p}")
    if isinstance(seed, int):
        seed = RandomSeed(seed)
    if p == 0.0:
        return GroundSubset.empty(n)
    if p == 1.0:
        return GroundSubset.full(n)
    rng = seed.generator()
    hits = rng.random(n) < p
    packed = np.packbits(hits, bitorder="little").tobytes()
    return GroundSubset(n, int.from_bytes(packed, "little"))


def second_round(Z: GroundSubset, eps_p: float, seed: RandomSeed | int) -> GroundSubset:
    """Z union an independent fresh sample at inclusion probability eps_p."""
    fresh = sample_binomial_subset(Z.n, eps_p, seed)
    return Z | fresh


def chernoff_tail(expectation: float, t: float) -> float:
    """Two-sided tail bound 2*exp(-t^2 / (2*(EX + t/3))) for |X - EX| > t."""
    if expectation < 0:
        raise ValueError("expectation must be nonnegative")
    if t <= 0:
        raise ValueError("deviation t must be positive")
    return 2.0 * math.exp(-(t * t) / (2.0 * (expectation + t / 3.0)))


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = phat + z2 / (2 * trials)
    half = z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials))
    lo = max(0.0, (centre - half) / denom)
    hi = min(1.0, (centre + half) / denom)
    return lo, hi
