"""Seeded Monte-Carlo oracle for the closed-form expressions.

Reproducibility contract: trial ``i`` belongs to block ``i // BLOCK_SIZE``;
every block draws from its own Philox stream keyed by ``(base_seed, lane)``
with the block index in the top counter word. Blocks are independent, so a
run gives bit-identical output for any worker count, and the results of a
block never depend on which design is being simulated (channel draws and
random phases use separate lanes). Changing BLOCK_SIZE changes the streams.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import norm

from .channel import LinkStatistics, sample_fading
from .phase_design import DESIGNS, EQUAL_PHASE, PhaseProfile, long_term_phases

BLOCK_SIZE = 2048
_MASK64 = (1 << 64) - 1
_Z95 = float(norm.ppf(0.975))

LANE_CHANNEL = 0
LANE_PHASES = 1
LANE_PHASES_ONCE = 2
LANE_LOCATIONS = 3


def stream(base_seed: int, lane: int, block: int) -> np.random.Generator:
    """Counter-based substream for (seed, lane, block)."""
    counter = [0, 0, 0, block & _MASK64]
    key = [base_seed & _MASK64, lane & _MASK64]
    return np.random.Generator(np.random.Philox(counter=counter, key=key))


def max_workers(requested: int | None = None) -> int:
    """Worker count, capped by the RIS_LAB_THREADS environment variable."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get("RIS_LAB_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


@dataclass(frozen=True)
class SimulationPlan:
    stats: LinkStatistics
    nu: float
    design_tag: str
    sample_count: int
    base_seed: int = 0
    worker_count: int = 1
    random_redraw: bool = True

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if self.design_tag not in DESIGNS:
            raise ValueError(f"unknown design {self.design_tag!r}")
        if not self.nu > 0:
            raise ValueError("nu must be positive")

    def blocks(self) -> list[tuple[int, int]]:
        """(block index, trials in block)."""
        n_full, rest = divmod(self.sample_count, BLOCK_SIZE)
        out = [(b, BLOCK_SIZE) for b in range(n_full)]
        if rest:
            out.append((n_full, rest))
        return out


@dataclass(frozen=True)
class EstimateWithCI:
    estimate: float
    half_width_95: float
    n_effective: int

    @property
    def low(self) -> float:
        return self.estimate - self.half_width_95

    @property
    def high(self) -> float:
        return self.estimate + self.half_width_95


def _map_blocks(plan: SimulationPlan, fn: Callable[[int, int], object]) -> list:
    jobs = plan.blocks()
    workers = min(max_workers(plan.worker_count), len(jobs))
    if workers <= 1:
        return [fn(b, n) for b, n in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map() preserves submission order
        return list(pool.map(lambda job: fn(*job), jobs))


def _draw_once_phases(plan: SimulationPlan) -> np.ndarray:
    rng = stream(plan.base_seed, LANE_PHASES_ONCE, 0)
    return rng.uniform(-math.pi, math.pi, plan.stats.M)


def _fixed_reflection(plan: SimulationPlan, design: str) -> np.ndarray | None:
    M = plan.stats.M
    if design == "long_term":
        return long_term_phases(plan.stats).reflection()
    if design == "equal":
        return np.full(M, np.exp(1j * EQUAL_PHASE))
    if design == "random" and not plan.random_redraw:
        return np.exp(1j * _draw_once_phases(plan))
    return None


def _block_snr(plan: SimulationPlan, designs: Sequence[str], block: int, n: int) -> dict[str, np.ndarray]:
    stats = plan.stats
    h_sd, h_sr, h_rd = sample_fading(stats, stream(plan.base_seed, LANE_CHANNEL, block), n)
    cascade = np.conj(h_sr) * h_rd
    out = {}
    for design in designs:
        if design == "short_term":
            amp = np.abs(h_sd) + np.sum(np.abs(cascade), axis=1)
            out[design] = plan.nu * amp**2
            continue
        refl = _fixed_reflection(plan, design)
        if refl is None:
            theta = stream(plan.base_seed, LANE_PHASES, block).uniform(-math.pi, math.pi, (n, stats.M))
            refl = np.exp(1j * theta)
            gain = h_sd + np.sum(cascade * refl, axis=1)
        else:
            gain = h_sd + cascade @ refl
        out[design] = plan.nu * np.abs(gain) ** 2
    return out


def simulate_paired_snr(plan: SimulationPlan, designs: Sequence[str] = DESIGNS) -> dict[str, np.ndarray]:
    """SNR samples of several designs on the same channel realizations."""
    for d in designs:
        if d not in DESIGNS:
            raise ValueError(f"unknown design {d!r}")
    parts = _map_blocks(plan, lambda b, n: _block_snr(plan, designs, b, n))
    return {d: np.concatenate([p[d] for p in parts]) for d in designs}


def simulate_snr_samples(plan: SimulationPlan) -> np.ndarray:
    return simulate_paired_snr(plan, (plan.design_tag,))[plan.design_tag]


def wilson_interval(successes: int, n: int, z: float = _Z95) -> tuple[float, float]:
    p = successes / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return centre - half, centre + half


def rates_bits(gamma: np.ndarray) -> np.ndarray:
    return np.log1p(np.asarray(gamma, dtype=float)) / math.log(2.0)


def empirical_coverage(gamma: np.ndarray, xi: float) -> EstimateWithCI:
    """Fraction of samples with log2(1 + gamma) > xi, with a Wilson 95% interval.

    The reported half width is the larger distance from the point estimate
    to the Wilson bounds (the interval is not symmetric near 0 and 1).
    """
    gamma = np.asarray(gamma)
    n = gamma.size
    if n == 0:
        raise ValueError("empty SNR sample")
    hits = int(np.count_nonzero(rates_bits(gamma) > xi))
    p = hits / n
    lo, hi = wilson_interval(hits, n)
    return EstimateWithCI(p, max(p - lo, hi - p), n)


def empirical_ergodic_rate(gamma: np.ndarray) -> EstimateWithCI:
    gamma = np.asarray(gamma)
    n = gamma.size
    if n == 0:
        raise ValueError("empty SNR sample")
    r = rates_bits(gamma)
    mean = float(np.mean(r))
    sd = float(np.std(r, ddof=1)) if n > 1 else 0.0
    return EstimateWithCI(mean, _Z95 * sd / math.sqrt(n), n)


def _mean_ci(sums: np.ndarray, sq_sums: np.ndarray, n: int) -> EstimateWithCI:
    mean = float(np.sum(sums)) / n
    var = max(float(np.sum(sq_sums)) / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return EstimateWithCI(mean, _Z95 * math.sqrt(var / n), n)


def empirical_cascade_moments(plan: SimulationPlan, profile: PhaseProfile | None = None):
    """Sample E|h_sr^H Phi h_rd|^2 and E|h_sr^H Phi h_rd|^4 under a fixed profile.

    ``profile`` defaults to the fixed profile of ``plan.design_tag``
    (long-term or equal).
    """
    if profile is not None:
        refl = profile.reflection()
    else:
        refl = _fixed_reflection(plan, plan.design_tag)
        if refl is None:
            raise ValueError(f"design {plan.design_tag!r} has no fixed profile; pass one explicitly")

    def block(b: int, n: int):
        _, h_sr, h_rd = sample_fading(plan.stats, stream(plan.base_seed, LANE_CHANNEL, b), n)
        p2 = np.abs((np.conj(h_sr) * h_rd) @ refl) ** 2
        p4 = p2 * p2
        return p2.sum(), (p2 * p2).sum(), p4.sum(), (p4 * p4).sum()

    parts = np.array(_map_blocks(plan, block))
    n = plan.sample_count
    return _mean_ci(parts[:, 0], parts[:, 1], n), _mean_ci(parts[:, 2], parts[:, 3], n)
