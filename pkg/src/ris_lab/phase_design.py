"""RIS phase-shift designs and the received SNR they produce."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .channel import ChannelRealization, LinkStatistics

DesignTag = Literal["short_term", "long_term", "equal", "random"]
DESIGNS: tuple[str, ...] = ("short_term", "long_term", "equal", "random")

EQUAL_PHASE = math.pi / 4.0


def wrap_phase(theta):
    """Map angles onto [-pi, pi] without changing exp(j theta)."""
    wrapped = np.angle(np.exp(1j * np.asarray(theta, dtype=float)))
    return wrapped


def safe_arg(z):
    """arg(z), with arg(0) taken as 0."""
    z = np.asarray(z)
    return np.where(np.abs(z) == 0.0, 0.0, np.angle(z))


@dataclass(frozen=True)
class PhaseProfile:
    theta: np.ndarray
    design_tag: str

    def __post_init__(self):
        if self.design_tag not in DESIGNS:
            raise ValueError(f"unknown design {self.design_tag!r}")
        theta = np.asarray(self.theta, dtype=float)
        if np.any(np.abs(theta) > math.pi):
            raise ValueError("phases must lie in [-pi, pi]")
        object.__setattr__(self, "theta", theta)

    @property
    def M(self) -> int:
        return int(self.theta.shape[0])

    def reflection(self) -> np.ndarray:
        """Diagonal of Phi."""
        return np.exp(1j * self.theta)


@dataclass(frozen=True)
class SnrContext:
    nu: float

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError(f"nu must be positive, got {self.nu}")

    @classmethod
    def from_dbm(cls, tx_power_dbm: float, noise_dbm: float) -> "SnrContext":
        return cls(10.0 ** ((tx_power_dbm - noise_dbm) / 10.0))


def short_term_phases(realization: ChannelRealization) -> PhaseProfile:
    """Instantaneous-CSI design: co-phase every cascaded term with h_sd."""
    theta = (
        safe_arg(realization.h_sd)
        - safe_arg(np.conj(realization.h_sr))
        - safe_arg(realization.h_rd)
    )
    return PhaseProfile(wrap_phase(theta), "short_term")


def long_term_phases(stats: LinkStatistics) -> PhaseProfile:
    """Statistical-CSI design from the LoS components only."""
    if stats.K_sr * stats.K_rd == 0.0:
        raise ValueError(
            "long-term design needs a LoS component on both hops (K_sr*K_rd > 0); "
            "use the equal or random design instead"
        )
    theta = -safe_arg(np.conj(stats.hbar_sr)) - safe_arg(stats.hbar_rd)
    return PhaseProfile(wrap_phase(theta), "long_term")


def equal_phases(M: int) -> PhaseProfile:
    return PhaseProfile(np.full(M, EQUAL_PHASE), "equal")


def random_phases(M: int, rng: np.random.Generator) -> PhaseProfile:
    return PhaseProfile(rng.uniform(-math.pi, math.pi, M), "random")


def effective_gain(realization: ChannelRealization, profile: PhaseProfile) -> complex:
    """h_sd + h_sr^H Phi h_rd."""
    if profile.M != realization.M:
        raise ValueError(f"profile has {profile.M} phases, channel has {realization.M} elements")
    cascaded = np.sum(np.conj(realization.h_sr) * profile.reflection() * realization.h_rd)
    return complex(realization.h_sd + cascaded)


def snr(realization: ChannelRealization, profile: PhaseProfile, ctx: SnrContext) -> float:
    return ctx.nu * abs(effective_gain(realization, profile)) ** 2


def short_term_snr(realization: ChannelRealization, ctx: SnrContext) -> float:
    """nu (|h_sd| + sum_m |[h_sr]_m| |[h_rd]_m|)^2, the optimum over all profiles."""
    amp = abs(realization.h_sd) + float(np.sum(np.abs(realization.h_sr) * np.abs(realization.h_rd)))
    return ctx.nu * amp**2
