"""Large-scale link statistics, LoS steering vectors and Rician fading draws.

Frame convention: the RIS local frame is the global frame translated to the
RIS centre. Element offsets live in the (y, z) plane, so the panel normal is
the x axis. The angles of a node seen from the RIS are

    azimuth   psi = atan2(dy, dx)
    elevation phi = asin(dz / d)

so a node straight down +x (boresight) has psi = phi = 0. The wave vector is
then applied exactly as (2 pi / lambda) [cos psi cos phi, sin psi cos phi, sin psi].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0

LinkKind = Literal["direct", "indirect"]


def wavelength(carrier_hz: float) -> float:
    if carrier_hz <= 0:
        raise ValueError(f"carrier frequency must be positive, got {carrier_hz}")
    return SPEED_OF_LIGHT / carrier_hz


def default_rows(M: int) -> int:
    """Near-square panel: ceil(sqrt(M)) elements per column."""
    return max(1, math.isqrt(M - 1) + 1) if M > 0 else 1


@dataclass(frozen=True)
class Geometry:
    source_pos: tuple[float, float, float]
    ris_center_pos: tuple[float, float, float]
    dest_pos: tuple[float, float, float]
    M: int
    ris_rows: int
    element_spacing: float
    wavelength: float

    def __post_init__(self):
        if self.M < 0:
            raise ValueError(f"M must be nonnegative, got {self.M}")
        if self.ris_rows < 1:
            raise ValueError(f"ris_rows (M_H) must be >= 1, got {self.ris_rows}")
        if not self.element_spacing > 0:
            raise ValueError(f"element spacing must be positive, got {self.element_spacing}")
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        s, r, d = (np.asarray(p, dtype=float) for p in (self.source_pos, self.ris_center_pos, self.dest_pos))
        for name, a, b in (("source", s, r), ("destination", d, r), ("source/destination", s, d)):
            if np.linalg.norm(a - b) <= 0.0:
                raise ValueError(f"{name} position coincides with another node")

    @classmethod
    def build(
        cls,
        source_pos,
        ris_center_pos,
        dest_pos,
        M: int,
        carrier_hz: float = 1.8e9,
        ris_rows: int | None = None,
        element_spacing: float | None = None,
    ) -> "Geometry":
        """Fill the panel defaults: M_H = ceil(sqrt(M)) and d_r = lambda/4.

        An explicitly given ``ris_rows`` must divide ``M``.
        """
        lam = wavelength(carrier_hz)
        if ris_rows is None:
            ris_rows = default_rows(M)
        elif M > 0 and M % ris_rows != 0:
            raise ValueError(f"M_H={ris_rows} does not divide M={M}")
        if element_spacing is None:
            element_spacing = lam / 4.0
        return cls(
            tuple(map(float, source_pos)),
            tuple(map(float, ris_center_pos)),
            tuple(map(float, dest_pos)),
            int(M),
            int(ris_rows),
            float(element_spacing),
            lam,
        )

    def element_offsets(self) -> np.ndarray:
        """u_m for m = 1..M as an (M, 3) array."""
        m = np.arange(self.M)
        u = np.zeros((self.M, 3))
        u[:, 1] = np.mod(m, self.ris_rows) * self.element_spacing
        u[:, 2] = np.floor_divide(m, self.ris_rows) * self.element_spacing
        return u


@dataclass(frozen=True)
class LinkStatistics:
    beta_sd: float
    beta_sr: float
    beta_rd: float
    K_sr: float
    K_rd: float
    psi_sr: float
    phi_sr: float
    psi_rd: float
    phi_rd: float
    hbar_sr: np.ndarray = field(repr=False)
    hbar_rd: np.ndarray = field(repr=False)
    los_only: bool = False

    def __post_init__(self):
        for name in ("beta_sd", "beta_sr", "beta_rd"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("K_sr", "K_rd"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.hbar_sr.shape != self.hbar_rd.shape:
            raise ValueError("LoS vectors must have equal length")

    @property
    def M(self) -> int:
        return int(self.hbar_sr.shape[0])

    @property
    def scatter_var_sr(self) -> float:
        return 0.0 if self.los_only else self.beta_sr / (self.K_sr + 1.0)

    @property
    def scatter_var_rd(self) -> float:
        return 0.0 if self.los_only else self.beta_rd / (self.K_rd + 1.0)


@dataclass(frozen=True)
class ChannelRealization:
    h_sd: complex
    h_sr: np.ndarray
    h_rd: np.ndarray

    def __post_init__(self):
        if self.h_sr.shape != self.h_rd.shape:
            raise ValueError("h_sr and h_rd must have the same length")

    @property
    def M(self) -> int:
        return int(self.h_sr.shape[0])


def path_loss_db(link_kind: LinkKind, d: float) -> float:
    """Channel gain in dB for the direct (source-destination) or an indirect hop."""
    if not d > 0:
        raise ValueError(f"distance must be positive, got {d}")
    if link_kind == "direct":
        return -33.1 - 3.50 * math.log10(d)
    if link_kind == "indirect":
        return -25.5 - 2.4 * math.log10(d)
    raise ValueError(f"unknown link kind {link_kind!r}")


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def rician_factor(d: float) -> float:
    if not d >= 0:
        raise ValueError(f"distance must be nonnegative, got {d}")
    return 10.0 ** (1.3 - 0.003 * d)


def view_angles(ris_center, node) -> tuple[float, float]:
    """(azimuth, elevation) of ``node`` as seen from the RIS centre."""
    v = np.asarray(node, dtype=float) - np.asarray(ris_center, dtype=float)
    d = float(np.linalg.norm(v))
    if d == 0.0:
        raise ValueError("node coincides with the RIS centre")
    psi = math.atan2(v[1], v[0])
    phi = math.asin(max(-1.0, min(1.0, v[2] / d)))
    return psi, phi


def wave_vector(psi: float, phi: float, lam: float) -> np.ndarray:
    # third entry is sin(psi), as written in the channel model
    return (2.0 * math.pi / lam) * np.array(
        [math.cos(psi) * math.cos(phi), math.sin(psi) * math.cos(phi), math.sin(psi)]
    )


def los_vector(K: float, beta: float, psi: float, phi: float, geometry: Geometry) -> np.ndarray:
    if K < 0:
        raise ValueError(f"Rician factor must be nonnegative, got {K}")
    if not beta > 0:
        raise ValueError(f"gain must be positive, got {beta}")
    amp = math.sqrt(K * beta / (K + 1.0))
    phase = geometry.element_offsets() @ wave_vector(psi, phi, geometry.wavelength)
    return amp * np.exp(1j * phase)


def derive_link_statistics(geometry: Geometry, los_only: bool = False) -> LinkStatistics:
    """Distances -> path gains, Rician factors, view angles and LoS vectors.

    ``los_only`` switches off the scattered components (the K -> infinity
    limit) while keeping the LoS amplitudes of the finite-K statistics.
    """
    s = np.asarray(geometry.source_pos)
    r = np.asarray(geometry.ris_center_pos)
    dst = np.asarray(geometry.dest_pos)
    d_sd = float(np.linalg.norm(dst - s))
    d_sr = float(np.linalg.norm(r - s))
    d_rd = float(np.linalg.norm(dst - r))

    beta_sd = db_to_linear(path_loss_db("direct", d_sd))
    beta_sr = db_to_linear(path_loss_db("indirect", d_sr))
    beta_rd = db_to_linear(path_loss_db("indirect", d_rd))
    K_sr = rician_factor(d_sr)
    K_rd = rician_factor(d_rd)
    psi_sr, phi_sr = view_angles(r, s)
    psi_rd, phi_rd = view_angles(r, dst)
    return LinkStatistics(
        beta_sd=beta_sd,
        beta_sr=beta_sr,
        beta_rd=beta_rd,
        K_sr=K_sr,
        K_rd=K_rd,
        psi_sr=psi_sr,
        phi_sr=phi_sr,
        psi_rd=psi_rd,
        phi_rd=phi_rd,
        hbar_sr=los_vector(K_sr, beta_sr, psi_sr, phi_sr, geometry),
        hbar_rd=los_vector(K_rd, beta_rd, psi_rd, phi_rd, geometry),
        los_only=los_only,
    )


def complex_normal(rng: np.random.Generator, variance: float, size=None) -> np.ndarray:
    """Circularly-symmetric CN(0, variance) draws: two real normals scaled by sqrt(var/2)."""
    scale = math.sqrt(variance / 2.0)
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    return scale * (re + 1j * im)


def sample_fading(stats: LinkStatistics, rng: np.random.Generator, n: int):
    """Draw ``n`` realizations at once as arrays (h_sd: (n,), h_sr/h_rd: (n, M)).

    Draw order is fixed (g_sd, g_sr, g_rd) so a given generator state always
    yields the same channels.
    """
    M = stats.M
    h_sd = math.sqrt(stats.beta_sd) * complex_normal(rng, 1.0, n)
    h_sr = stats.hbar_sr[None, :] + complex_normal(rng, stats.scatter_var_sr, (n, M))
    h_rd = stats.hbar_rd[None, :] + complex_normal(rng, stats.scatter_var_rd, (n, M))
    return h_sd, h_sr, h_rd


def sample_realization(stats: LinkStatistics, rng: np.random.Generator) -> ChannelRealization:
    h_sd, h_sr, h_rd = sample_fading(stats, rng, 1)
    return ChannelRealization(complex(h_sd[0]), h_sr[0], h_rd[0])
