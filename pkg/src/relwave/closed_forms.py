"""Closed-form solutions for the special initial families.

All functions take ``xi`` as a scalar or array and return values of the
same shape. Unit Compton wavelength throughout. ``c`` denotes the principal
root ``sqrt((beta + i tau)^2 + xi^2)`` (Re c > 0 for beta > 0).
"""

import math

import numpy as np
from scipy.integrate import quad_vec

from relwave import specfun
from relwave.grid import psi3_norm_constant
from relwave.propagators import QuadratureSpec

__all__ = [
    "complex_radius",
    "dirac_macdonald_exact",
    "dirac_macdonald_norm",
    "f1_exact",
    "f2_exact",
    "kg_macdonald_exact",
    "massless_exact",
    "massless_exact_split",
    "psi1_exact",
    "psi2_exact",
    "psi3_exact",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)


def complex_radius(a, xi):
    """Principal ``sqrt(a^2 + xi^2)`` for complex ``a`` with Re a > 0."""
    return np.sqrt(np.asarray(a, dtype=complex) ** 2 + np.asarray(xi, dtype=float) ** 2)


def _out(x):
    x = np.asarray(x)
    return x[()] if x.ndim == 0 else x


def _gaussian_k_integral(beta, xi, phase, quad):
    # int_0^K e^{-beta k^2} e^{-i phase(k)} 2 cos(k xi) dk, K set by e^{-beta K^2} < 1e-16
    quad = quad or QuadratureSpec()
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    k_max = math.sqrt(16.0 * math.log(10.0) / beta)
    # panels short enough that neither k xi nor the dispersion phase winds by
    # much more than a turn per panel
    spread = float(np.max(np.abs(xi))) + abs(phase(1.0) - phase(0.0)) + 1.0
    n_panels = max(8, int(k_max * spread / math.pi) + 1)
    points = np.linspace(0.0, k_max, n_panels + 1)[1:-1]

    def f(k):
        return 2.0 * math.exp(-beta * k * k) * np.exp(-1j * phase(k)) * np.cos(k * xi)

    val, _ = quad_vec(f, 0.0, k_max, epsabs=quad.epsabs * 1e-2, epsrel=quad.epsrel,
                      norm="max", points=points, limit=max(quad.limit, 4 * n_panels))
    return val


def f1_exact(beta, xi, tau, quad: QuadratureSpec | None = None):
    """Relativistic heat evolution of the heat-kernel Gaussian,
    ``(1/2pi) int e^{-beta k^2 - tau omega(k) + i k xi} dk`` (real)."""
    if not tau >= 0:
        raise ValueError("tau must be >= 0")
    shape = np.shape(xi)
    # the damping factor is real, fold it into the Gaussian weight via the phase hook
    val = _gaussian_k_integral(beta, xi, lambda k: -1j * tau * math.sqrt(1.0 + k * k), quad)
    return _out((val.real / (2.0 * math.pi)).reshape(shape))


def psi1_exact(beta, xi, tau, quad: QuadratureSpec | None = None):
    """L2-normalized Gaussian packet under the Salpeter flow.

    ``N/sqrt(2pi) int e^{-beta q^2 - i tau omega(q) + i q xi} dq`` with
    ``N = (2 beta / pi)^{1/4}``.
    """
    shape = np.shape(xi)
    n = (2.0 * beta / math.pi) ** 0.25
    val = _gaussian_k_integral(beta, xi, lambda k: tau * math.sqrt(1.0 + k * k), quad)
    return _out((n / SQRT_2PI * val).reshape(shape))


def f2_exact(beta, xi, tau):
    """Relativistic heat evolution of the L1-normalized Macdonald spectrum:
    ``(beta + tau)/(2 K1(beta)) K1(r)/r``, ``r = sqrt((beta+tau)^2 + xi^2)``."""
    if not tau >= 0:
        raise ValueError("tau must be >= 0")
    a = beta + tau
    r = np.sqrt(a * a + np.asarray(xi, dtype=float) ** 2)
    k1b = specfun.bessel_k(1, beta).real
    return _out(a / (2.0 * k1b) * specfun.bessel_k(1, r).real / r)


def psi2_exact(beta, xi, tau):
    """Salpeter evolution of the L2-normalized Macdonald packet."""
    a = complex(beta, tau)
    c = complex_radius(a, xi)
    k12 = specfun.bessel_k(1, 2.0 * beta).real
    return _out(a / math.sqrt(math.pi * k12) * specfun.bessel_k(1, c) / c)


def psi3_exact(beta, xi, tau):
    """Salpeter evolution of the Psi_3 family,
    ``N sqrt(c + a) e^{-c} / c`` with ``a = beta + i tau``."""
    a = complex(beta, tau)
    c = complex_radius(a, xi)
    return _out(psi3_norm_constant(beta) * np.sqrt(c + a) * np.exp(-c) / c)


def massless_exact(b, x, t):
    """Massless Salpeter solution ``sqrt(2b/pi) (b + i t)/((b + i t)^2 + x^2)``
    (units with c = 1; pass ``c t`` as ``t``)."""
    x = np.asarray(x, dtype=float)
    w = b + 1j * t
    return _out(math.sqrt(2.0 * b / math.pi) * w / (w * w + x * x))


def massless_exact_split(b, x, t):
    """Same solution written as left- and right-moving Cauchy terms."""
    x = np.asarray(x, dtype=float)
    return _out(math.sqrt(b / (2.0 * math.pi))
                * (1.0 / (b + 1j * (x + t)) + 1.0 / (b - 1j * (x - t))))


def dirac_macdonald_exact(beta, xi, tau):
    """Components (psi+, psi-) evolved from the spectrum ``e^{-beta omega} (1, 0)``.

    psi+ = [K0(c*) + (beta - i tau)/c* K1(c*) - K0(c) + (beta + i tau)/c K1(c)] / sqrt(2pi)
    psi- = -i [xi/c K1(c) - xi/c* K1(c*)] / sqrt(2pi)

    The lower component carries a factor -i relative to the bare bracket;
    it comes from ``k -> -i d/dxi`` in the coupling term. Not normalized:
    divide by :func:`dirac_macdonald_norm` to match a unit-norm packet.
    """
    xi = np.asarray(xi, dtype=float)
    a = complex(beta, tau)
    c = complex_radius(a, xi)
    cs = np.conj(c)
    k0c, k1c = specfun.bessel_k(0, c), specfun.bessel_k(1, c)
    k0s, k1s = specfun.bessel_k(0, cs), specfun.bessel_k(1, cs)
    plus = (k0s + np.conj(a) / cs * k1s - k0c + a / c * k1c) / SQRT_2PI
    minus = -1j * (xi / c * k1c - xi / cs * k1s) / SQRT_2PI
    return _out(plus), _out(minus)


def dirac_macdonald_norm(beta):
    """L2 norm of the unnormalized Dirac Macdonald state, sqrt(2 K1(2 beta))."""
    return math.sqrt(2.0 * specfun.bessel_k(1, 2.0 * beta).real)


def kg_macdonald_exact(beta, xi, tau):
    """Klein-Gordon solution for ``Psi0~ = e^{-beta omega}``, ``Psi1 = 0``:
    ``[(beta - i tau)/c* K1(c*) + (beta + i tau)/c K1(c)] / sqrt(2pi)``."""
    a = complex(beta, tau)
    c = complex_radius(a, xi)
    cs = np.conj(c)
    val = (np.conj(a) / cs * specfun.bessel_k(1, cs) + a / c * specfun.bessel_k(1, c)) / SQRT_2PI
    return _out(val)
