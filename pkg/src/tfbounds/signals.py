"""Grids, sampled signals and the centered Fourier transform.

Every grid is origin-centered: node ``k`` of ``AxisGrid(n, delta)`` sits at
``(k - n/2) * delta`` for ``k = 0, ..., n-1`` with ``n`` even.  The continuous
transform

    F f(xi) = int f(t) exp(-2 pi i t xi) dt

is approximated by the Riemann sum over the nodes.  On a centered grid of
even length the centering phase factors cancel against the index shift, so
the sum is exactly ``delta * fftshift(fft(ifftshift(f)))`` and its values sit
on the dual grid ``AxisGrid(n, 1/(n*delta))``, again centered.  All transforms
in the package go through :func:`cfft` and :func:`cifft`.

Signals carry their samples and, optionally, an analytic tag (a finite sum
of Gaussian atoms) that lets them be evaluated anywhere.  Untagged signals
are evaluated at half-grid points through factor-2 band-limited
interpolation.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
import scipy.fft as sfft
import scipy.signal as ssig

from .errors import GridMismatch, InputError, MidpointUnavailable, NonGridShift

__all__ = [
    "AxisGrid",
    "DEFAULT_GRID",
    "GaussianAtom",
    "GaussianMix",
    "ConstantSymbol",
    "SampledSignal",
    "TfArray",
    "cfft",
    "cifft",
    "fft_workers",
    "fourier_transform",
    "inverse_fourier_transform",
    "translate",
    "modulate",
    "inner_product",
    "upsample2",
    "evaluate",
    "gaussian",
    "combine",
    "centered_convolve",
]

_GRID_TOL = 1e-9


def fft_workers() -> int:
    """Number of FFT worker threads, capped by ``TFBOUNDS_THREADS``."""
    raw = os.environ.get("TFBOUNDS_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            return 1
    return 1


def cfft(a: np.ndarray, axes: Union[int, Sequence[int]] = -1) -> np.ndarray:
    """Unscaled forward DFT of arrays stored on centered grids."""
    axes = (axes,) if isinstance(axes, int) else tuple(axes)
    a = sfft.ifftshift(a, axes=axes)
    a = sfft.fftn(a, axes=axes, workers=fft_workers())
    return sfft.fftshift(a, axes=axes)


def cifft(a: np.ndarray, axes: Union[int, Sequence[int]] = -1) -> np.ndarray:
    """Inverse of :func:`cfft` (includes the 1/n normalization)."""
    axes = (axes,) if isinstance(axes, int) else tuple(axes)
    a = sfft.ifftshift(a, axes=axes)
    a = sfft.ifftn(a, axes=axes, workers=fft_workers())
    return sfft.fftshift(a, axes=axes)


@dataclass(frozen=True)
class AxisGrid:
    """Origin-centered uniform grid with ``n`` nodes and spacing ``delta``."""

    n: int
    delta: float

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 8 or n & (n - 1):
            raise InputError(f"grid size must be a power of two >= 8, got {n!r}")
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise InputError(f"grid spacing must be positive, got {self.delta!r}")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "delta", float(self.delta))

    @property
    def extent(self) -> float:
        return self.n * self.delta

    @property
    def nodes(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.delta

    @property
    def lo(self) -> float:
        return -(self.n // 2) * self.delta

    @property
    def hi(self) -> float:
        return (self.n // 2 - 1) * self.delta

    def dual(self) -> "AxisGrid":
        return AxisGrid(self.n, 1.0 / self.extent)

    def refined(self) -> "AxisGrid":
        """Grid with twice the nodes at half the spacing (same extent)."""
        return AxisGrid(2 * self.n, self.delta / 2)

    def decimated(self, stride: int) -> "AxisGrid":
        """Every ``stride``-th node, keeping the origin."""
        if stride < 1 or self.n % stride:
            raise InputError(f"stride {stride} does not divide {self.n}")
        return AxisGrid(self.n // stride, self.delta * stride)

    def index_of(self, x) -> np.ndarray:
        """Integer node indices of ``x``; raises if any point is off-grid."""
        r = np.asarray(x, dtype=float) / self.delta + self.n // 2
        k = np.rint(r)
        if np.any(np.abs(r - k) > _GRID_TOL * max(1.0, float(np.max(np.abs(r), initial=0)))):
            raise NonGridShift("points are not grid nodes")
        return k.astype(int)

    def on_grid(self, x) -> bool:
        r = np.asarray(x, dtype=float) / self.delta
        return bool(np.all(np.abs(r - np.rint(r)) <= _GRID_TOL * max(1.0, float(np.max(np.abs(r), initial=0)))))

    def sub_indices(self, other: "AxisGrid") -> np.ndarray:
        """Indices of the nodes of ``other`` within this grid (all must coincide)."""
        idx = self.index_of(other.nodes)
        if idx.min() < 0 or idx.max() >= self.n:
            raise GridMismatch("requested nodes fall outside the grid")
        return idx

    def to_dict(self) -> dict:
        return {"n": self.n, "delta": self.delta}


DEFAULT_GRID = AxisGrid(256, 1.0 / 16)


# ---------------------------------------------------------------- analytic tags
@dataclass(frozen=True)
class GaussianAtom:
    """``coef * exp(-pi lam (t - x0)^2) * exp(2 pi i xi0 t)``."""

    lam: float = 1.0
    x0: float = 0.0
    xi0: float = 0.0
    coef: complex = 1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise InputError("Gaussian atoms need lam > 0")

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.coef * np.exp(-np.pi * self.lam * (t - self.x0) ** 2 + 2j * np.pi * self.xi0 * t)

    def fourier(self) -> "GaussianAtom":
        # closed form of the transform of a modulated, shifted Gaussian
        coef = self.coef * self.lam ** -0.5 * np.exp(2j * np.pi * self.x0 * self.xi0)
        return GaussianAtom(1.0 / self.lam, self.xi0, -self.x0, complex(coef))

    def inverse_fourier(self) -> "GaussianAtom":
        coef = self.coef * self.lam ** -0.5 * np.exp(-2j * np.pi * self.x0 * self.xi0)
        return GaussianAtom(1.0 / self.lam, -self.xi0, self.x0, complex(coef))

    def translated(self, x: float) -> "GaussianAtom":
        coef = self.coef * np.exp(-2j * np.pi * self.xi0 * x)
        return GaussianAtom(self.lam, self.x0 + x, self.xi0, complex(coef))

    def modulated(self, xi: float) -> "GaussianAtom":
        return GaussianAtom(self.lam, self.x0, self.xi0 + xi, self.coef)

    def scaled(self, c: complex) -> "GaussianAtom":
        return GaussianAtom(self.lam, self.x0, self.xi0, complex(self.coef * c))

    def conjugated(self) -> "GaussianAtom":
        return GaussianAtom(self.lam, self.x0, -self.xi0, complex(np.conj(self.coef)))


@dataclass(frozen=True)
class GaussianMix:
    """Finite linear combination of :class:`GaussianAtom` terms."""

    atoms: tuple

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for a in self.atoms:
            out = out + a(t)
        return out

    def _map(self, name, *args) -> "GaussianMix":
        return GaussianMix(tuple(getattr(a, name)(*args) for a in self.atoms))

    def fourier(self):
        return self._map("fourier")

    def inverse_fourier(self):
        return self._map("inverse_fourier")

    def translated(self, x):
        return self._map("translated", x)

    def modulated(self, xi):
        return self._map("modulated", xi)

    def scaled(self, c):
        return self._map("scaled", c)

    def conjugated(self):
        return self._map("conjugated")


def _as_mix(tag) -> Optional[GaussianMix]:
    if tag is None:
        return None
    if isinstance(tag, GaussianAtom):
        return GaussianMix((tag,))
    return tag


@dataclass(frozen=True)
class ConstantSymbol:
    """Phase-space function identically equal to ``value``."""

    value: complex = 1.0

    def __call__(self, x, xi) -> np.ndarray:
        x, xi = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(xi, dtype=float))
        return np.full(x.shape, self.value, dtype=complex)


# ---------------------------------------------------------------- containers
def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SampledSignal:
    """Complex samples on an :class:`AxisGrid` plus an optional analytic tag."""

    grid: AxisGrid
    samples: np.ndarray
    tag: Optional[object] = field(default=None)

    def __post_init__(self):
        s = _freeze(self.samples)
        if s.shape != (self.grid.n,):
            raise InputError(f"expected {self.grid.n} samples, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise InputError("samples must be finite")
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_tag(cls, tag, grid: AxisGrid = DEFAULT_GRID) -> "SampledSignal":
        return cls(grid, tag(grid.nodes), tag)

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.samples) ** 2) * self.grid.delta))

    def __call__(self, t) -> np.ndarray:
        return evaluate(self, t)


def gaussian(lam: float = 1.0, grid: AxisGrid = DEFAULT_GRID, x0: float = 0.0,
             xi0: float = 0.0, amplitude: complex = 1.0) -> SampledSignal:
    """Tagged ``M_xi0 T_x0`` of ``amplitude * exp(-pi lam t^2)``."""
    atom = GaussianAtom(lam, 0.0, 0.0, complex(amplitude)).translated(x0).modulated(xi0)
    return SampledSignal.from_tag(atom, grid)


def combine(signals: Sequence[SampledSignal], coefs: Sequence[complex]) -> SampledSignal:
    """Linear combination; the result is tagged when every input is."""
    grid = signals[0].grid
    if any(s.grid != grid for s in signals):
        raise GridMismatch("signals live on different grids")
    samples = sum(c * s.samples for s, c in zip(signals, coefs))
    tags = [_as_mix(s.tag) for s in signals]
    tag = None
    if all(t is not None for t in tags):
        tag = GaussianMix(tuple(a for t, c in zip(tags, coefs) for a in t.scaled(c).atoms))
    return SampledSignal(grid, samples, tag)


@dataclass(frozen=True, eq=False)
class TfArray:
    """Complex samples on a phase-space grid ``xgrid x xigrid``.

    ``values[i, j]`` is the value at ``(xgrid.nodes[i], xigrid.nodes[j])``.
    The optional ``tag`` is any callable ``tag(x, xi)``.
    """

    xgrid: AxisGrid
    xigrid: AxisGrid
    values: np.ndarray
    tag: Optional[object] = field(default=None)

    def __post_init__(self):
        v = _freeze(self.values)
        if v.shape != (self.xgrid.n, self.xigrid.n):
            raise InputError(f"values shape {v.shape} does not match grids")
        if not np.all(np.isfinite(v)):
            raise InputError("phase-space values must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_tag(cls, tag, xgrid: AxisGrid, xigrid: Optional[AxisGrid] = None) -> "TfArray":
        xigrid = xgrid if xigrid is None else xigrid
        x, xi = np.meshgrid(xgrid.nodes, xigrid.nodes, indexing="ij")
        return cls(xgrid, xigrid, tag(x, xi), tag)

    @property
    def cell(self) -> float:
        return self.xgrid.delta * self.xigrid.delta

    @property
    def mesh(self):
        return np.meshgrid(self.xgrid.nodes, self.xigrid.nodes, indexing="ij")

    def same_grid(self, other: "TfArray") -> bool:
        return self.xgrid == other.xgrid and self.xigrid == other.xigrid

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.cell))

    def inner(self, other: "TfArray") -> complex:
        if not self.same_grid(other):
            raise GridMismatch("phase-space arrays live on different grids")
        return complex(np.sum(self.values * np.conj(other.values)) * self.cell)

    def value_at(self, x: float, xi: float) -> complex:
        i = int(self.xgrid.index_of(x))
        j = int(self.xigrid.index_of(xi))
        return complex(self.values[i, j])

    def shifted(self, di: int, dj: int) -> "TfArray":
        """Translate by whole nodes with zero fill; the tag is dropped."""
        return TfArray(self.xgrid, self.xigrid, shift_zero_fill(self.values, (di, dj)))

    def with_values(self, values, tag=None) -> "TfArray":
        return TfArray(self.xgrid, self.xigrid, values, tag)


def shift_zero_fill(a: np.ndarray, shifts: Sequence[int]) -> np.ndarray:
    """``out[k] = a[k - shift]`` along each axis, zero where undefined."""
    out = np.zeros_like(a)
    src = []
    dst = []
    for size, s in zip(a.shape, shifts):
        s = int(s)
        if abs(s) >= size:
            return out
        if s >= 0:
            src.append(slice(0, size - s))
            dst.append(slice(s, size))
        else:
            src.append(slice(-s, size))
            dst.append(slice(0, size + s))
    out[tuple(dst)] = a[tuple(src)]
    return out


# ---------------------------------------------------------------- operations
def fourier_transform(f: SampledSignal) -> SampledSignal:
    """Riemann-sum Fourier transform, returned on the dual grid."""
    values = cfft(f.samples) * f.grid.delta
    tag = None if f.tag is None else f.tag.fourier()
    return SampledSignal(f.grid.dual(), values, tag)


def inverse_fourier_transform(fhat: SampledSignal) -> SampledSignal:
    """Inverse of :func:`fourier_transform` (dual grid back to time grid)."""
    n = fhat.grid.n
    values = cifft(fhat.samples) * n * fhat.grid.delta
    tag = None if fhat.tag is None else fhat.tag.inverse_fourier()
    return SampledSignal(fhat.grid.dual(), values, tag)


def translate(f: SampledSignal, x0: float) -> SampledSignal:
    """``T_x0 f(t) = f(t - x0)``.

    Tagged signals are re-evaluated exactly; sampled signals are shifted by
    whole nodes with zero fill (no wrap-around).
    """
    if f.tag is not None:
        return SampledSignal.from_tag(f.tag.translated(x0), f.grid)
    if not f.grid.on_grid(x0):
        raise NonGridShift(f"shift {x0} is not a multiple of {f.grid.delta}")
    k = int(np.rint(x0 / f.grid.delta))
    return SampledSignal(f.grid, shift_zero_fill(f.samples, (k,)))


def modulate(f: SampledSignal, xi0: float) -> SampledSignal:
    """``M_xi0 f(t) = exp(2 pi i t xi0) f(t)``."""
    samples = f.samples * np.exp(2j * np.pi * xi0 * f.grid.nodes)
    tag = None if f.tag is None else f.tag.modulated(xi0)
    return SampledSignal(f.grid, samples, tag)


def inner_product(f: SampledSignal, g: SampledSignal) -> complex:
    """Riemann sum of ``f * conj(g)``."""
    if f.grid != g.grid:
        raise GridMismatch("inner product needs a common grid")
    return complex(np.sum(f.samples * np.conj(g.samples)) * f.grid.delta)


def bandlimited_upsample(x: np.ndarray, axis: int = -1) -> np.ndarray:
    """Factor-2 trigonometric interpolation of centered samples along ``axis``.

    The spectrum is zero padded, with the Nyquist bin split evenly, so even
    output indices reproduce the input exactly.
    """
    x = np.moveaxis(np.asarray(x, dtype=complex), axis, -1)
    n = x.shape[-1]
    h = n // 2
    spec = sfft.fft(sfft.ifftshift(x, axes=-1), axis=-1, workers=fft_workers())
    padded = np.zeros(x.shape[:-1] + (2 * n,), dtype=complex)
    padded[..., :h] = spec[..., :h]
    padded[..., h] = spec[..., h] / 2
    padded[..., 2 * n - h] = spec[..., h] / 2
    padded[..., 2 * n - h + 1:] = spec[..., h + 1:]
    y = 2 * sfft.ifft(padded, axis=-1, workers=fft_workers())
    return np.moveaxis(sfft.fftshift(y, axes=-1), -1, axis)


def upsample2(f: SampledSignal) -> SampledSignal:
    """Resample onto the refined grid (spacing delta/2)."""
    fine = f.grid.refined()
    if f.tag is not None:
        return SampledSignal.from_tag(f.tag, fine)
    return SampledSignal(fine, bandlimited_upsample(f.samples))


def evaluate(f: SampledSignal, t) -> np.ndarray:
    """Values of ``f`` at arbitrary points.

    Tagged signals are evaluated exactly.  Otherwise points must be
    multiples of delta/2; they are read from the band-limited interpolant
    and points outside the grid evaluate to zero.
    """
    t = np.asarray(t, dtype=float)
    if f.tag is not None:
        return f.tag(t)
    half = f.grid.delta / 2
    r = t / half
    k = np.rint(r)
    if np.any(np.abs(r - k) > _GRID_TOL * max(1.0, float(np.max(np.abs(r), initial=0)))):
        raise MidpointUnavailable("untagged signals are only evaluable on the half grid")
    fine = bandlimited_upsample(f.samples)
    idx = k.astype(int) + f.grid.n
    inside = (idx >= 0) & (idx < 2 * f.grid.n)
    out = np.zeros(t.shape, dtype=complex)
    out[inside] = fine[idx[inside]]
    return out


def centered_convolve(a: np.ndarray, k: np.ndarray, out_shape: Sequence[int]) -> np.ndarray:
    """Discrete linear convolution of two centered arrays, cut to a centered window.

    Index ``i`` of an axis of length ``m`` stands for offset ``i - m//2``;
    the output keeps the offsets of an array of shape ``out_shape``.
    """
    full = ssig.fftconvolve(a, k, mode="full")
    sl = []
    for d, n_out in enumerate(out_shape):
        start = a.shape[d] // 2 + k.shape[d] // 2 - n_out // 2
        if start < 0 or start + n_out > full.shape[d]:
            raise GridMismatch("convolution output window exceeds the full convolution")
        sl.append(slice(start, start + n_out))
    return full[tuple(sl)]
