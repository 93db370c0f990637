"""Dimensionless model definition: drive field, parameters, symmetries.

Units: lattice period 2*pi, recoil-scaled energies, v0=1 by convention.
The drive enters the kinetic term through its vector potential A(t) after
a gauge transformation; the A^2 piece is a global phase and is dropped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import hbar

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DrivingField:
    """Two-harmonic ac force E(t) = E1 cos[w(t-t0)] + E2 cos[2w(t-t0)+theta]."""

    E1: float
    E2: float
    omega: float
    theta: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        if not self.omega > 0.0:
            raise ValueError("omega must be positive")

    @property
    def period(self) -> float:
        return TWO_PI / self.omega

    def with_theta(self, theta: float) -> "DrivingField":
        return replace(self, theta=theta)

    def with_t0(self, t0: float) -> "DrivingField":
        return replace(self, t0=t0)


@dataclass(frozen=True)
class ModelParams:
    """Lattice model parameters. dt must divide the drive period exactly."""

    mu: float
    v0: float = 1.0
    g: float = 0.0
    n_max: int = 16
    dt: float = 0.0

    def __post_init__(self):
        if not self.mu > 0.0:
            raise ValueError("mu must be positive")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")

    def steps_per_period(self, field: DrivingField) -> int:
        spp = field.period / self.dt
        if abs(spp - round(spp)) > 1e-12 * spp:
            raise ValueError("dt does not divide the drive period")
        return int(round(spp))

    def with_g(self, g: float) -> "ModelParams":
        return replace(self, g=g)


def params_for(field: DrivingField, mu: float, v0: float = 1.0, g: float = 0.0,
               n_max: int = 16, steps_per_period: int = 1024) -> ModelParams:
    """Convenience constructor fixing dt = T / steps_per_period."""
    return ModelParams(mu=mu, v0=v0, g=g, n_max=n_max,
                       dt=field.period / steps_per_period)


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory-frame inputs for the dimensionless reduction."""

    atomic_mass: float
    lattice_wavenumber: float
    lattice_depth: float
    scattering_length: float
    mean_density: float
    time_scale: float

    def __post_init__(self):
        for name in ("atomic_mass", "lattice_wavenumber", "lattice_depth",
                     "mean_density", "time_scale"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.scattering_length < 0.0:
            raise ValueError("scattering_length must be nonnegative")


def eval_field(field: DrivingField, t) -> float:
    """E(t), the ac force."""
    w, tau = field.omega, np.asarray(t) - field.t0
    return (field.E1 * np.cos(w * tau)
            + field.E2 * np.cos(2.0 * w * tau + field.theta))


def eval_vector_potential(field: DrivingField, t) -> float:
    """A(t) with dA/dt = -E(t) and zero period average."""
    w, tau = field.omega, np.asarray(t) - field.t0
    return (-field.E1 * np.sin(w * tau) / w
            - field.E2 * np.sin(2.0 * w * tau + field.theta) / (2.0 * w))


def is_shift_symmetric(field: DrivingField) -> bool:
    """True iff E(t) = -E(t + T/2); for this family, iff E2 = 0."""
    return abs(field.E2) < 1e-12


def is_time_reversal_symmetric(field: DrivingField) -> bool:
    """True iff E(t) = E(-t) in the t0=0 frame: sin(theta)=0, or no E2."""
    if abs(field.E2) < 1e-12:
        return True
    return abs(math.sin(field.theta)) < 1e-12


def rescale_physical(phys: PhysicalParams, drive_amplitudes) -> tuple:
    """Dimensionless (ModelParams proto, DrivingField amplitudes) from lab units.

    x = 2 k_L X, time in units of t_s, and
        mu = 4 hbar k_L^2 t_s / M
        v0 = mu^2 M V0 / (4 hbar^2 k_L^2)
        g  = mu^2 pi n0 a_s / k_L^2
    A physical force F maps to the dimensionless amplitude
        E = F * mu * t_s / (2 k_L * hbar)  (momentum kick per period scale),
    i.e. the same factor that turns M dX/dt into the dimensionless p.
    Returns (mu, v0, g, scaled_amplitudes).
    """
    M, kL = phys.atomic_mass, phys.lattice_wavenumber
    ts = phys.time_scale
    mu = 4.0 * hbar * kL**2 * ts / M
    v0 = mu**2 * M * phys.lattice_depth / (4.0 * hbar**2 * kL**2)
    g = mu**2 * math.pi * phys.mean_density * phys.scattering_length / kL**2
    scale = mu * ts / (2.0 * kL * hbar)
    amps = tuple(float(a) * scale for a in np.atleast_1d(drive_amplitudes))
    return mu, v0, g, amps
