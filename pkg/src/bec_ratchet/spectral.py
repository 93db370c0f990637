"""Plane-wave representation of the condensate wavefunction.

Coefficients are stored in centered order n = -N..N. psi(x) =
sum_n c_n e^{inx} / sqrt(2 pi) on x in [0, 2 pi). The propagator works in
FFT layout internally; to_fft_layout / from_fft_layout are exact for the
odd length D = 2N+1.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field as dfield

import numpy as np

SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class WaveFunction:
    coeffs: np.ndarray          # complex128, centered order n = -N..N
    n_max: int

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (2 * self.n_max + 1,):
            raise ValueError("coeffs length must be 2*n_max+1")
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return 2 * self.n_max + 1

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def n_values(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)


def plane_wave_state(n: int, n_max: int) -> WaveFunction:
    if abs(n) > n_max:
        raise ValueError(f"plane wave index {n} exceeds cutoff {n_max}")
    c = np.zeros(2 * n_max + 1, dtype=complex)
    c[n + n_max] = 1.0
    return WaveFunction(c, n_max)


def random_state(n_max: int, rng) -> WaveFunction:
    c = rng.standard_normal(2 * n_max + 1) + 1j * rng.standard_normal(2 * n_max + 1)
    return WaveFunction(c / np.linalg.norm(c), n_max)


def mean_momentum(psi: WaveFunction, mu: float) -> float:
    """<p> = sum_n mu n |c_n|^2."""
    return float(np.sum(mu * psi.n_values() * np.abs(psi.coeffs) ** 2))


def to_fft_layout(coeffs_centered: np.ndarray) -> np.ndarray:
    return np.fft.ifftshift(coeffs_centered, axes=-1)

def from_fft_layout(coeffs_fft: np.ndarray) -> np.ndarray:
    return np.fft.fftshift(coeffs_fft, axes=-1)


def fft_freqs(n_max: int) -> np.ndarray:
    """Integer wave numbers in FFT layout for D = 2*n_max+1."""
    d = 2 * n_max + 1
    return np.rint(np.fft.fftfreq(d, 1.0 / d)).astype(int)


def position_values(psi: WaveFunction, m_points: int | None = None) -> tuple:
    """(x_grid, psi(x)) on a uniform grid; default size 4(2N+1) -> power of 2."""
    d = psi.dim
    if m_points is None:
        m_points = 1
        while m_points < 4 * d:
            m_points *= 2
    if m_points < 2 * d:
        raise ValueError("position grid must have at least 2(2N+1) points")
    cf = to_fft_layout(psi.coeffs)
    pad = np.zeros(m_points, dtype=complex)
    nf = fft_freqs(psi.n_max)
    pad[nf % m_points] = cf
    x = 2.0 * np.pi * np.arange(m_points) / m_points
    vals = np.fft.ifft(pad) * (m_points / SQRT_2PI)
    return x, vals


@dataclass
class PropagationLog:
    times: list = dfield(default_factory=list)
    norms: list = dfield(default_factory=list)
    momenta: list = dfield(default_factory=list)


# --- state file format: header (n_max, mu, t) then interleaved re/im, little-endian

_HEADER = struct.Struct("<i d d")


def save_state(path, psi: WaveFunction, mu: float, t: float = 0.0) -> None:
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(psi.n_max, mu, t))
        inter = np.empty(2 * psi.dim, dtype="<f8")
        inter[0::2] = psi.coeffs.real
        inter[1::2] = psi.coeffs.imag
        fh.write(inter.tobytes())


def load_state(path) -> tuple:
    """Returns (WaveFunction, mu, t)."""
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        n_max, mu, t = _HEADER.unpack(raw)
        d = 2 * n_max + 1
        inter = np.frombuffer(fh.read(16 * d), dtype="<f8")
        if inter.size != 2 * d:
            raise ValueError(f"truncated state file: {path}")
    c = inter[0::2] + 1j * inter[1::2]
    return WaveFunction(c, n_max), mu, t
