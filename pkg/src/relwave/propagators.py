"""Fourier-multiplier propagators for the free equations.

Every propagator transforms to the wavenumber lattice, multiplies each mode
by the exact evolution factor and transforms back; there is no real-space
convolution path. Multipliers use ``omega(k) = sqrt(1 + k^2)``.

Dirac evolution follows the matrix form
``U(tau) = cos(omega tau) + i sin(omega tau)/omega * (alpha k + beta)``,
i.e. ``exp(+i tau H(k))`` with ``H(k) = alpha k + beta``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from relwave.grid import (
    ScalarField,
    SpinorField,
    fft_forward,
    fft_inverse,
)

__all__ = [
    "KGState",
    "MULTIPLIER_KINDS",
    "QuadratureSpec",
    "SubordinationError",
    "apply_multiplier",
    "dirac_matrix",
    "evolve_dirac",
    "evolve_heat_nonrel",
    "evolve_heat_rel",
    "evolve_heat_rel_subordinated",
    "evolve_kg",
    "evolve_salpeter",
    "kg_from_salpeter",
    "kg_matrix",
    "multiplier",
    "positive_energy_projection",
]

MULTIPLIER_KINDS = ("heat_nonrel", "heat_rel", "salpeter", "salpeter_massless")


class SubordinationError(RuntimeError):
    """The subordination quadrature did not reach its tolerance."""


@dataclass(frozen=True)
class QuadratureSpec:
    epsabs: float = 1e-12
    epsrel: float = 1e-10
    limit: int = 2000


@dataclass(frozen=True, eq=False)
class KGState:
    """Klein-Gordon pair (Psi, d/dtau Psi) on a common grid."""

    psi: ScalarField
    psi_dot: ScalarField

    def __post_init__(self):
        if self.psi.grid != self.psi_dot.grid:
            raise ValueError("psi and psi_dot must share a grid")
        if self.psi.domain != "xi" or self.psi_dot.domain != "xi":
            raise ValueError("KGState holds position-space fields")

    @property
    def grid(self):
        return self.psi.grid

    @classmethod
    def at_rest(cls, psi: ScalarField) -> "KGState":
        return cls(psi, ScalarField(psi.grid, np.zeros(psi.grid.n_points)))


def _check_field(field):
    if not isinstance(field, ScalarField):
        raise TypeError(f"expected ScalarField, got {type(field).__name__}")
    if field.domain != "xi":
        raise ValueError("propagators act on position-space fields")


def multiplier(kind: str, grid, tau: float) -> np.ndarray:
    """Per-mode evolution factor of a scalar propagator."""
    k = grid.k_nodes
    if kind == "heat_nonrel":
        return np.exp(-tau * k**2)
    if kind == "heat_rel":
        return np.exp(-tau * grid.omega)
    if kind == "salpeter":
        return np.exp(-1j * tau * grid.omega)
    if kind == "salpeter_massless":
        return np.exp(-1j * tau * np.abs(k))
    raise ValueError(f"unknown multiplier kind {kind!r}")


def apply_multiplier(field: ScalarField, factor: np.ndarray) -> ScalarField:
    _check_field(field)
    grid = field.grid
    return ScalarField(grid, fft_inverse(grid, factor * fft_forward(grid, field.values)))


def _nonnegative(tau):
    if not tau >= 0:
        raise ValueError(f"heat evolution needs tau >= 0, got {tau!r}")


def evolve_heat_nonrel(field: ScalarField, tau: float) -> ScalarField:
    """Ordinary heat flow ``exp(tau d^2/dxi^2)``: modes decay as exp(-tau k^2)."""
    _nonnegative(tau)
    return apply_multiplier(field, multiplier("heat_nonrel", field.grid, tau))


def evolve_heat_rel(field: ScalarField, tau: float) -> ScalarField:
    """Relativistic heat flow ``exp(-tau sqrt(1 - d^2/dxi^2))``."""
    _nonnegative(tau)
    return apply_multiplier(field, multiplier("heat_rel", field.grid, tau))


def subordinated_multiplier(grid, tau: float, quad: QuadratureSpec | None = None):
    """Levy-subordinated heat multiplier.

    Computes ``int_0^inf g_{1/2}(eta) e^{-eta tau^2} m_heat(eta tau^2) d eta``
    for every mode, where ``m_heat`` is the ordinary heat multiplier. The
    substitution ``eta = 1/(4 s^2)`` turns ``g_{1/2}(eta) d eta`` into
    ``(2/sqrt(pi)) e^{-s^2} ds``, which removes the essential singularity at
    eta = 0 and the algebraic tail; the remaining integrand is smooth and is
    integrated adaptively (Gauss-Kronrod, vector-valued).
    """
    quad = quad or QuadratureSpec()
    if not tau > 0:
        raise ValueError(f"subordination needs tau > 0, got {tau!r}")
    t2 = tau * tau
    pref = 2.0 / math.sqrt(math.pi)

    def integrand(s):
        eta = 0.25 / (s * s)
        return pref * math.exp(-s * s - eta * t2) * multiplier("heat_nonrel", grid, eta * t2)

    # peak of the k = 0 integrand sits at s^2 = tau/2; split there
    s_peak = math.sqrt(0.5 * tau)
    total = np.zeros(grid.n_points)
    for a, b in ((0.0, s_peak), (s_peak, np.inf)):
        val, err = quad_vec(integrand, a, b, epsabs=quad.epsabs, epsrel=quad.epsrel,
                            norm="max", limit=quad.limit)
        if not np.isfinite(err) or err > max(quad.epsabs, quad.epsrel * np.max(np.abs(val))) * 10:
            raise SubordinationError(f"quadrature error estimate {err:.3g} over ({a}, {b})")
        total += val
    return total


def evolve_heat_rel_subordinated(field: ScalarField, tau: float,
                                 quad: QuadratureSpec | None = None) -> ScalarField:
    """Relativistic heat flow as a superposition of ordinary heat flows.

    Equivalent to :func:`evolve_heat_rel`, but the multiplier is assembled
    from the ordinary heat kernel weighted by the index-1/2 Levy density.
    """
    _check_field(field)
    if tau == 0:
        return field
    return apply_multiplier(field, subordinated_multiplier(field.grid, tau, quad))


def evolve_salpeter(field: ScalarField, tau: float, massless: bool = False) -> ScalarField:
    """Free Salpeter flow ``exp(-i tau sqrt(1 - d^2/dxi^2))``.

    ``massless=True`` uses ``|k|`` in place of ``omega(k)``.
    """
    kind = "salpeter_massless" if massless else "salpeter"
    return apply_multiplier(field, multiplier(kind, field.grid, tau))


def dirac_matrix(k, tau: float):
    """Per-mode 2x2 Dirac evolution matrix as arrays (u_pp, u_pm, u_mp, u_mm)."""
    k = np.asarray(k, dtype=float)
    w = np.sqrt(1.0 + k**2)
    a = np.sin(w * tau) / w
    b = np.cos(w * tau)
    return (b + 1j * a, 1j * a * k, 1j * a * k, b - 1j * a)


def _spinor_spectra(state):
    if not isinstance(state, SpinorField):
        raise TypeError(f"expected SpinorField, got {type(state).__name__}")
    if state.domain != "xi":
        raise ValueError("propagators act on position-space fields")
    grid = state.grid
    return fft_forward(grid, state.plus_component), fft_forward(grid, state.minus_component)


def evolve_dirac(state: SpinorField, tau: float) -> SpinorField:
    """Free two-component Dirac evolution.

    For each mode, with A = sin(omega tau)/omega and B = cos(omega tau)::

        psi+ <- i A (psi+ + k psi-) + B psi+
        psi- <- i A (k psi+ - psi-) + B psi-
    """
    grid = state.grid
    sp, sm = _spinor_spectra(state)
    upp, upm, ump, umm = dirac_matrix(grid.k_nodes, tau)
    return SpinorField(grid, fft_inverse(grid, upp * sp + upm * sm),
                       fft_inverse(grid, ump * sp + umm * sm))


def positive_energy_projection(state: SpinorField) -> SpinorField:
    """Apply ``(1 + H(k)/omega)/2`` with ``H(k) = [[1, k], [k, -1]]``."""
    grid = state.grid
    sp, sm = _spinor_spectra(state)
    k, w = grid.k_nodes, grid.omega
    plus = 0.5 * ((1.0 + 1.0 / w) * sp + (k / w) * sm)
    minus = 0.5 * ((k / w) * sp + (1.0 - 1.0 / w) * sm)
    return SpinorField(grid, fft_inverse(grid, plus), fft_inverse(grid, minus))


def kg_matrix(k, tau: float):
    """Per-mode Klein-Gordon matrix [[cos, sin/omega], [-omega sin, cos]]."""
    w = np.sqrt(1.0 + np.asarray(k, dtype=float) ** 2)
    c, s = np.cos(w * tau), np.sin(w * tau)
    return c, s / w, -w * s, c


def evolve_kg(state: KGState, tau: float) -> KGState:
    """Evolve the pair (Psi, d/dtau Psi) of the free Klein-Gordon equation."""
    grid = state.grid
    s0 = fft_forward(grid, state.psi.values)
    s1 = fft_forward(grid, state.psi_dot.values)
    u00, u01, u10, u11 = kg_matrix(grid.k_nodes, tau)
    return KGState(ScalarField(grid, fft_inverse(grid, u00 * s0 + u01 * s1)),
                   ScalarField(grid, fft_inverse(grid, u10 * s0 + u11 * s1)))


def kg_from_salpeter(psi0: ScalarField, psi1: ScalarField, tau: float) -> ScalarField:
    """Klein-Gordon solution as a forward plus backward Salpeter flow.

    ``C1 = (Psi0 - i D^{-1} Psi1)/2`` evolves with ``e^{+i tau D}`` and
    ``C2 = (Psi0 + i D^{-1} Psi1)/2`` with ``e^{-i tau D}``, where ``D``
    acts as ``omega(k)``.
    """
    _check_field(psi0)
    _check_field(psi1)
    grid = psi0.grid
    if psi1.grid != grid:
        raise ValueError("psi0 and psi1 must share a grid")
    w = grid.omega
    s0 = fft_forward(grid, psi0.values)
    s1 = fft_forward(grid, psi1.values)
    c1 = 0.5 * (s0 - 1j * s1 / w)
    c2 = 0.5 * (s0 + 1j * s1 / w)
    return ScalarField(grid, fft_inverse(grid, np.exp(1j * tau * w) * c1
                                         + np.exp(-1j * tau * w) * c2))
