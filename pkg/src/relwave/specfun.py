r"""Special functions used by the closed-form solutions.

Macdonald functions :math:`K_0, K_1` of complex argument, modified Struve
functions :math:`\mathbf{L}_{-1}, \mathbf{L}_0` of real argument and the
one-sided Levy stable density of index 1/2.

The production evaluator for :math:`K_\nu` delegates to the AMOS routines in
:func:`scipy.special.kv`; :func:`bessel_k_integral` evaluates the integral
representation

.. math::
    K_\nu(z) = \int_0^\infty e^{-z\cosh t}\cosh(\nu t)\,dt, \qquad \Re z > 0

in extended precision and serves as the independent oracle.
"""

import math

import mpmath
import numpy as np
from scipy import special

__all__ = [
    "DomainError",
    "bessel_k",
    "bessel_k_integral",
    "levy_half",
    "levy_half_laplace",
    "struve_l",
]


class DomainError(ValueError):
    """Raised when a special function is called outside its domain."""


def bessel_k(order, z):
    """Macdonald function K_0 or K_1 for complex ``z`` with ``Re z > 0``.

    Accepts scalars or arrays; returns complex values of the same shape.
    """
    if order not in (0, 1):
        raise DomainError(f"order must be 0 or 1, got {order!r}")
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise DomainError("non-finite argument")
    if np.any(z.real <= 0.0):
        raise DomainError("bessel_k requires Re z > 0")
    out = special.kv(order, z)
    if not np.all(np.isfinite(out)):
        raise DomainError("K_nu evaluation overflowed")
    return out[()] if out.ndim == 0 else out


def _truncation_point(order, re_z, digits=18):
    # smallest T with e^{-Re z (cosh T - 1)} cosh(nu T) < 10^-digits
    target = digits * math.log(10.0)
    t = 1.0
    for _ in range(100):
        t_new = math.acosh(1.0 + (target + order * t) / re_z)
        if abs(t_new - t) < 1e-12:
            break
        t = t_new
    return t_new


def bessel_k_integral(order, z, dps=30):
    """Integral-representation oracle for K_nu(z), scalar ``z`` only.

    The integrand is truncated where it falls below 1e-18 of its value at
    t = 0 and the interval is split into panels over which the phase
    ``Im z * cosh t`` advances by at most pi.
    """
    if order not in (0, 1):
        raise DomainError(f"order must be 0 or 1, got {order!r}")
    z = complex(z)
    if not z.real > 0.0:
        raise DomainError("bessel_k_integral requires Re z > 0")
    t_max = _truncation_point(order, z.real)
    n_panels = max(4, int(abs(z.imag) * (math.cosh(t_max) - 1.0) / math.pi) + 1)
    # panel edges uniform in cosh t so each carries a similar phase increment
    edges = [math.acosh(1.0 + (math.cosh(t_max) - 1.0) * (i / n_panels))
             for i in range(n_panels + 1)]
    with mpmath.workdps(dps):
        zz = mpmath.mpc(z.real, z.imag)
        f = lambda t: mpmath.exp(-zz * mpmath.cosh(t)) * mpmath.cosh(order * t)
        val = mpmath.quad(f, edges)
    return complex(val)


def struve_l(order, x):
    r"""Modified Struve function :math:`\mathbf{L}_\nu(x)` for nu in {-1, 0}.

    Summed from the ascending series

    .. math::
        \mathbf{L}_\nu(x) = \sum_{m\ge0}
        \frac{(x/2)^{2m+\nu+1}}{\Gamma(m+3/2)\,\Gamma(m+\nu+3/2)}

    until the term ratio drops below 1e-16. All terms are positive, so the
    sum carries no cancellation.
    """
    if order not in (-1, 0):
        raise DomainError(f"order must be -1 or 0, got {order!r}")
    x = float(x)
    if not (x > 0.0 and math.isfinite(x)):
        raise DomainError("struve_l requires finite x > 0")
    h = 0.5 * x
    term = h ** (order + 1) / (math.gamma(1.5) * math.gamma(order + 1.5))
    total = term
    m = 0
    while True:
        # ratio of consecutive terms: h^2 / ((m + 3/2)(m + nu + 3/2))
        term *= h * h / ((m + 1.5) * (m + order + 1.5))
        m += 1
        total += term
        if term < 1e-16 * total:
            return total
        if m > 10_000:
            raise DomainError("struve_l series failed to converge")


def levy_half(eta):
    r"""One-sided Levy stable density of index 1/2,
    :math:`g_{1/2}(\eta) = e^{-1/(4\eta)} / (2\sqrt{\pi}\,\eta^{3/2})`."""
    eta = np.asarray(eta, dtype=float)
    if np.any(~(eta > 0.0)) or not np.all(np.isfinite(eta)):
        raise DomainError("levy_half requires finite eta > 0")
    out = np.exp(-0.25 / eta) / (2.0 * math.sqrt(math.pi) * eta**1.5)
    return out[()] if out.ndim == 0 else out


def levy_half_laplace(p, epsabs=1e-13, epsrel=1e-12):
    """Numerical Laplace transform of :func:`levy_half` at ``p >= 0``.

    Should equal ``exp(-sqrt(p))``; used to check the density.
    """
    from scipy.integrate import quad

    if p < 0:
        raise DomainError("Laplace variable must be >= 0")
    f = lambda e: float(levy_half(e)) * math.exp(-p * e)
    # the left piece holds the essential singularity, the tail decays as eta^{-3/2}
    pieces = [(0.0, 0.05), (0.05, 1.0), (1.0, 20.0), (20.0, np.inf)]
    total = 0.0
    for a, b in pieces:
        val, _ = quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=500)
        total += val
    return total
