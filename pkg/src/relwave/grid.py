"""Periodic lattice, Fourier transform pair and initial wave packets.

Fourier convention (continuum):
    f~(k) = (2 pi)^{-1/2} int e^{-i k xi} f(xi) dxi,
    f(xi) = (2 pi)^{-1/2} int e^{+i k xi} f~(k) dk.

On the lattice the integrals become Riemann sums with weights ``spacing`` and
``dk = 2 pi / length``, so that ``sum |f|^2 spacing == sum |f~|^2 dk``.
Both ``xi_nodes`` and ``k_nodes`` are stored in ascending order with the
zero node at index ``n_points // 2``.
"""

import enum
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from relwave import specfun

__all__ = [
    "Family",
    "Grid",
    "PacketSpec",
    "ScalarField",
    "SpinorField",
    "forward_transform",
    "inverse_transform",
    "make_grid",
    "make_packet",
    "psi3_norm_constant",
    "ResolutionWarning",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)


class ResolutionWarning(UserWarning):
    """Grid spacing is coarse compared to the packet's localization scale."""


@dataclass(frozen=True)
class Grid:
    n_points: int
    length: float

    def __post_init__(self):
        n = self.n_points
        if not isinstance(n, (int, np.integer)) or n < 16 or n & (n - 1):
            raise ValueError(f"n_points must be a power of two >= 16, got {n!r}")
        if not (self.length > 0 and math.isfinite(self.length)):
            raise ValueError(f"length must be finite and > 0, got {self.length!r}")
        object.__setattr__(self, "n_points", int(n))
        object.__setattr__(self, "length", float(self.length))

    @property
    def spacing(self) -> float:
        return self.length / self.n_points

    @property
    def dk(self) -> float:
        return 2.0 * math.pi / self.length

    @property
    def origin_index(self) -> int:
        return self.n_points // 2

    @cached_property
    def xi_nodes(self) -> np.ndarray:
        idx = np.arange(self.n_points) - self.origin_index
        nodes = idx * self.spacing
        nodes.flags.writeable = False
        return nodes

    @cached_property
    def k_nodes(self) -> np.ndarray:
        idx = np.arange(self.n_points) - self.origin_index
        nodes = idx * self.dk
        nodes.flags.writeable = False
        return nodes

    @cached_property
    def omega(self) -> np.ndarray:
        """Relativistic dispersion sqrt(1 + k^2) on the wavenumber lattice."""
        w = np.sqrt(1.0 + self.k_nodes**2)
        w.flags.writeable = False
        return w


def make_grid(n_points: int, length: float) -> Grid:
    return Grid(n_points, length)


def _as_samples(grid, values):
    arr = np.array(values, dtype=complex)
    if arr.shape != (grid.n_points,):
        raise ValueError(
            f"expected {grid.n_points} samples, got array of shape {arr.shape}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Complex samples on a grid; ``domain`` is ``"xi"`` or ``"k"``."""

    grid: Grid
    values: np.ndarray
    domain: str = "xi"

    def __post_init__(self):
        if self.domain not in ("xi", "k"):
            raise ValueError(f"unknown domain {self.domain!r}")
        object.__setattr__(self, "values", _as_samples(self.grid, self.values))

    @property
    def weight(self) -> float:
        return self.grid.spacing if self.domain == "xi" else self.grid.dk

    def norm(self) -> float:
        return math.sqrt(float(np.sum(np.abs(self.values) ** 2)) * self.weight)

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def scaled(self, factor) -> "ScalarField":
        return ScalarField(self.grid, self.values * factor, self.domain)


@dataclass(frozen=True, eq=False)
class SpinorField:
    """Two-component field (psi_plus, psi_minus) on a grid."""

    grid: Grid
    plus_component: np.ndarray
    minus_component: np.ndarray
    domain: str = "xi"

    def __post_init__(self):
        if self.domain not in ("xi", "k"):
            raise ValueError(f"unknown domain {self.domain!r}")
        object.__setattr__(self, "plus_component",
                           _as_samples(self.grid, self.plus_component))
        object.__setattr__(self, "minus_component",
                           _as_samples(self.grid, self.minus_component))

    @property
    def weight(self) -> float:
        return self.grid.spacing if self.domain == "xi" else self.grid.dk

    def norm(self) -> float:
        s = np.sum(np.abs(self.plus_component) ** 2) + np.sum(np.abs(self.minus_component) ** 2)
        return math.sqrt(float(s) * self.weight)

    def density(self) -> np.ndarray:
        return np.abs(self.plus_component) ** 2 + np.abs(self.minus_component) ** 2

    def scaled(self, factor) -> "SpinorField":
        return SpinorField(self.grid, self.plus_component * factor,
                           self.minus_component * factor, self.domain)

    def components(self):
        return (ScalarField(self.grid, self.plus_component, self.domain),
                ScalarField(self.grid, self.minus_component, self.domain))


def fft_forward(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Array-level forward transform (position samples -> spectrum)."""
    return (grid.spacing / SQRT_2PI) * np.fft.fftshift(np.fft.fft(np.fft.ifftshift(values)))


def fft_inverse(grid: Grid, spectrum: np.ndarray) -> np.ndarray:
    """Array-level inverse transform (spectrum -> position samples)."""
    return (SQRT_2PI / grid.spacing) * np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(spectrum)))


def forward_transform(f):
    """Position-space field to spectral samples on ``grid.k_nodes``."""
    if f.domain != "xi":
        raise ValueError("forward_transform expects a position-space field")
    if isinstance(f, SpinorField):
        return SpinorField(f.grid, fft_forward(f.grid, f.plus_component),
                           fft_forward(f.grid, f.minus_component), "k")
    return ScalarField(f.grid, fft_forward(f.grid, f.values), "k")


def inverse_transform(f):
    """Spectral samples back to position space."""
    if f.domain != "k":
        raise ValueError("inverse_transform expects a spectral field")
    if isinstance(f, SpinorField):
        return SpinorField(f.grid, fft_inverse(f.grid, f.plus_component),
                           fft_inverse(f.grid, f.minus_component), "xi")
    return ScalarField(f.grid, fft_inverse(f.grid, f.values), "xi")


class Family(str, enum.Enum):
    GAUSSIAN = "gaussian"
    MACDONALD = "macdonald"
    PSI3 = "psi3"
    MASSLESS_CAUCHY = "massless_cauchy"
    DIRAC_GAUSSIAN_BOTH = "dirac_gaussian_both"
    DIRAC_MACDONALD = "dirac_macdonald"


_DEFAULT_WEIGHTS = {
    Family.DIRAC_GAUSSIAN_BOTH: (1.0 + 0j, 1.0 + 0j),
    Family.DIRAC_MACDONALD: (1.0 + 0j, 0.0j),
}


@dataclass(frozen=True)
class PacketSpec:
    """Declarative initial condition.

    ``beta`` is the localization parameter, ``b`` the length scale of the
    massless Cauchy packet. ``component_weights`` multiply the common
    spectral profile of the two Dirac components; ``None`` means the
    family default, (1, 1) for ``dirac_gaussian_both`` and (1, 0) for
    ``dirac_macdonald``.
    """

    family: Family
    beta: float = 1.0
    b: float = 1.0
    component_weights: tuple | None = None

    def __post_init__(self):
        try:
            fam = Family(self.family)
        except ValueError:
            raise ValueError(f"unknown packet family {self.family!r}") from None
        object.__setattr__(self, "family", fam)
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta!r}")
        if not self.b > 0:
            raise ValueError(f"b must be > 0, got {self.b!r}")
        if self.component_weights is not None:
            w = tuple(complex(c) for c in self.component_weights)
            if len(w) != 2:
                raise ValueError("component_weights must be a pair")
            object.__setattr__(self, "component_weights", w)

    @property
    def is_spinor(self) -> bool:
        return self.family in _DEFAULT_WEIGHTS

    @property
    def weights(self):
        if self.component_weights is not None:
            return self.component_weights
        return _DEFAULT_WEIGHTS.get(self.family)


def psi3_norm_constant(beta: float) -> float:
    """L2 normalization of the Psi_3 packet (unit Compton wavelength).

    The Struve bracket is
    K0(2b) + pi/2 - pi b K0(2b) L_{-1}(2b) - pi b K1(2b) L_0(2b);
    with the 1/sqrt(2 pi) Fourier convention the constant is
    (2 * bracket)^{-1/2}.
    """
    u = 2.0 * beta
    k0 = specfun.bessel_k(0, u).real
    k1 = specfun.bessel_k(1, u).real
    bracket = (k0 + 0.5 * math.pi - math.pi * beta * k0 * specfun.struve_l(-1, u)
               - math.pi * beta * k1 * specfun.struve_l(0, u))
    return 1.0 / math.sqrt(2.0 * bracket)


def _macdonald_profile(beta, xi):
    # beta K1(r)/r with r = sqrt(beta^2 + xi^2); the 1/sqrt(2 pi)-inverse
    # transform of e^{-beta omega} is sqrt(2/pi) times this
    r = np.sqrt(beta**2 + xi**2)
    return beta * specfun.bessel_k(1, r).real / r


def _check_resolution(grid, scale, what):
    if grid.spacing > scale / 4.0:
        warnings.warn(
            f"grid spacing {grid.spacing:.4g} exceeds {what}/4 = {scale / 4:.4g}",
            ResolutionWarning, stacklevel=3)


def make_packet(spec: PacketSpec, grid: Grid, normalize: bool = True):
    """Sample the initial condition described by ``spec`` on ``grid``.

    With ``normalize=True`` scalar packets carry their analytic L2
    normalization (the grid norm is then 1 up to truncation) and Dirac
    packets are rescaled so that the total two-component norm is 1.
    With ``normalize=False`` the raw profiles are returned: the heat-kernel
    Gaussian f1, the L1-normalized-spectrum Macdonald f2, Psi_3 with unit
    constant, and the Dirac spectra ``w * e^{-beta k^2}`` /
    ``w * e^{-beta omega}`` as written.
    """
    xi = grid.xi_nodes
    beta = spec.beta
    fam = spec.family
    if fam is Family.MASSLESS_CAUCHY:
        _check_resolution(grid, spec.b, "b")
    else:
        _check_resolution(grid, beta, "beta")

    if fam is Family.GAUSSIAN:
        if normalize:
            n = (2.0 * beta / math.pi) ** 0.25
            values = n / math.sqrt(2.0 * beta) * np.exp(-xi**2 / (4.0 * beta))
        else:
            values = np.exp(-xi**2 / (4.0 * beta)) / (2.0 * math.sqrt(math.pi * beta))
        return ScalarField(grid, values)

    if fam is Family.MACDONALD:
        prof = _macdonald_profile(beta, xi)
        if normalize:
            k12 = specfun.bessel_k(1, 2.0 * beta).real
            values = prof / math.sqrt(math.pi * k12)
        else:
            values = prof / (2.0 * specfun.bessel_k(1, beta).real)
        return ScalarField(grid, values)

    if fam is Family.PSI3:
        r = np.sqrt(beta**2 + xi**2)
        values = np.sqrt(r + beta) * np.exp(-r) / r
        if normalize:
            values = values * psi3_norm_constant(beta)
        return ScalarField(grid, values)

    if fam is Family.MASSLESS_CAUCHY:
        b = spec.b
        values = math.sqrt(b / (2.0 * math.pi)) * (1.0 / (b + 1j * xi) + 1.0 / (b - 1j * xi))
        return ScalarField(grid, values)

    w_plus, w_minus = spec.weights
    if fam is Family.DIRAC_GAUSSIAN_BOTH:
        prof = math.sqrt(1.0 / (2.0 * beta)) * np.exp(-xi**2 / (4.0 * beta))
        norm2 = math.sqrt(math.pi / (2.0 * beta))
    else:
        prof = math.sqrt(2.0 / math.pi) * _macdonald_profile(beta, xi)
        norm2 = 2.0 * specfun.bessel_k(1, 2.0 * beta).real
    plus, minus = w_plus * prof, w_minus * prof
    if normalize:
        total = math.sqrt(norm2 * (abs(w_plus) ** 2 + abs(w_minus) ** 2))
        if total == 0.0:
            raise ValueError("component_weights are both zero")
        plus, minus = plus / total, minus / total
    return SpinorField(grid, plus, minus)
