"""Lossy, delayed communication path between the two sides.

Tick-quantized delay plus seeded jitter and Bernoulli drops, reconstructed
with hold-last (zero-order hold). The per-tick random draw order (drop
uniform first, then jitter integer) is part of the contract so replays and
independent oracles can reproduce the stream.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .core import ConfigError


@dataclass(frozen=True)
class ChannelConfig:
    delay_steps: int = 0
    jitter_steps_max: int = 0
    drop_probability: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.delay_steps < 0 or self.jitter_steps_max < 0:
            raise ConfigError("channel delay/jitter must be >= 0")
        if not (0.0 <= self.drop_probability <= 1.0):
            raise ConfigError(
                f"channel drop_probability must be in [0,1], got {self.drop_probability}")


class Channel:
    """One direction of the link; push exactly one sample per tick."""

    def __init__(self, config: ChannelConfig, zero_sample):
        self.config = config
        self._rng = random.Random(config.seed)
        self._pending = []  # (arrival_tick, origin_tick, sample)
        self._last_origin = -1  # zero-sample available from t=0
        self._last_sample = _copy_sample(zero_sample)

    def push_pop(self, tick: int, sample):
        """Enqueue this tick's sample, return the reconstructed output.

        The newest arrived sample with origin later than the last delivered
        one is delivered; otherwise the previous output repeats (hold-last).
        Dropped samples are never delivered.
        """
        cfg = self.config
        # both draws happen every tick regardless of outcome: fixed consumption
        dropped = self._rng.random() < cfg.drop_probability
        jitter = self._rng.randrange(cfg.jitter_steps_max + 1)
        if not dropped:
            self._pending.append((tick + cfg.delay_steps + jitter, tick, _copy_sample(sample)))
        ready = [e for e in self._pending if e[0] <= tick]
        self._pending = [e for e in self._pending if e[0] > tick]
        if ready:
            best = max(ready, key=lambda e: e[1])
            if best[1] > self._last_origin:
                self._last_origin = best[1]
                self._last_sample = best[2]
        return _copy_sample(self._last_sample)

    def age(self, tick: int) -> int:
        """Ticks since the delivered sample originated."""
        return tick - self._last_origin


def _copy_sample(sample):
    if isinstance(sample, np.ndarray):
        return sample.copy()
    if isinstance(sample, tuple):
        return tuple(_copy_sample(s) for s in sample)
    return sample


def derive_channel_seeds(master_seed: int, arm_index: int) -> dict:
    """Fixed-offset seed streams for the four directions of one arm pair."""
    base = (int(master_seed) + 0x9E3779B97F4A7C15 * (arm_index + 1)) % 2**64
    names = ("m2s_motion", "m2s_force", "s2m_motion", "s2m_force")
    return {name: (base + i) % 2**64 for i, name in enumerate(names)}
