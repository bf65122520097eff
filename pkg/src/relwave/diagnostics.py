"""Observables: norms, curvature of the density at the origin, peak
counting, r.m.s. position, the Klein-Gordon invariant and the two-peak
critical parameters."""

import cmath
import enum
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import quad, quad_vec
from scipy.optimize import brentq
from scipy.signal import find_peaks

from relwave import specfun
from relwave.grid import ScalarField, SpinorField, fft_forward, fft_inverse, psi3_norm_constant
from relwave.propagators import KGState

__all__ = [
    "DiagnosticsReport",
    "EvolutionResult",
    "NoCriticalPointError",
    "SolutionFamily",
    "critical_beta",
    "critical_tau",
    "d2_origin",
    "d2_origin_closed_form",
    "d2_psi3_analytic",
    "first_moment",
    "kg_invariant",
    "l1_mass",
    "make_report",
    "peak_count",
    "rms_position",
    "rms_position_exact",
]

DEFAULT_PROMINENCE = 1e-3


class NoCriticalPointError(ValueError):
    """No sign change of the origin curvature in the search bracket."""


class SolutionFamily(str, enum.Enum):
    PSI1 = "psi1"
    PSI2 = "psi2"


@dataclass
class DiagnosticsReport:
    tau: float
    l2_norm: float
    d2_origin: float
    peak_count: int
    rms_position: float | None = None
    kg_invariant: float | None = None

    def to_dict(self):
        return asdict(self)


@dataclass
class EvolutionResult:
    """Snapshots ``(tau, field)`` with one diagnostics report per entry."""

    snapshots: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    closed_form_errors: list | None = None
    notes: list = field(default_factory=list)

    @property
    def taus(self):
        return [t for t, _ in self.snapshots]


def _components(f):
    if isinstance(f, SpinorField):
        return [f.plus_component, f.minus_component]
    if isinstance(f, ScalarField):
        return [f.values]
    raise TypeError(f"expected a field, got {type(f).__name__}")


def _check_position(f):
    if f.domain != "xi":
        raise ValueError("diagnostic expects a position-space field")


def d2_origin(f) -> float:
    """Second xi-derivative of the density at xi = 0, spectrally.

    Uses ``(|psi|^2)'' = 2 Re(conj(psi) psi'') + 2 |psi'|^2`` with both
    derivatives taken on the wavenumber lattice; spinor densities sum both
    components.
    """
    _check_position(f)
    grid = f.grid
    i0 = grid.origin_index
    if grid.xi_nodes[i0] != 0.0:
        raise ValueError("grid has no origin node")
    k = grid.k_nodes
    # Nyquist mode has no partner; drop it from odd derivatives
    k_odd = k.copy()
    k_odd[0] = 0.0
    total = 0.0
    for comp in _components(f):
        spec = fft_forward(grid, comp)
        d1 = fft_inverse(grid, 1j * k_odd * spec)[i0]
        d2 = fft_inverse(grid, -k * k * spec)[i0]
        total += 2.0 * (np.conj(comp[i0]) * d2).real + 2.0 * abs(d1) ** 2
    return float(total)


def d2_psi3_analytic(beta: float, tau: float) -> float:
    """Closed-form origin curvature of ``|Psi_3|^2`` (unit-normalized Psi_3):

    ``N^2 e^{-2 beta} (beta^2 + tau^2)^{-5/2} [tau^2 (3 - 4 beta) - beta^2 (3 + 4 beta)]``.
    """
    if not beta > 0:
        raise ValueError("beta must be > 0")
    n = psi3_norm_constant(beta)
    bracket = tau**2 * (3.0 - 4.0 * beta) - beta**2 * (3.0 + 4.0 * beta)
    return n * n * math.exp(-2.0 * beta) / (beta**2 + tau**2) ** 2.5 * bracket


def critical_tau(beta: float) -> float:
    """Time after which the Psi_3 density develops a minimum at the origin."""
    if not 0.0 < beta < 0.75:
        raise ValueError("critical time exists only for 0 < beta < 3/4")
    return math.sqrt(beta**2 * (3.0 + 4.0 * beta) / (3.0 - 4.0 * beta))


def _psi1_origin_moments(beta, tau):
    # int e^{-beta q^2 - i tau omega(q)} q^{0,2} dq over the half line, doubled
    q_max = math.sqrt(16.0 * math.log(10.0) / beta)
    n_panels = max(8, int(tau * q_max / math.pi) + 1)
    points = np.linspace(0.0, q_max, n_panels + 1)[1:-1]

    def f(q):
        g = 2.0 * cmath.exp(-beta * q * q - 1j * tau * math.sqrt(1.0 + q * q))
        return np.array([g, q * q * g])

    val, _ = quad_vec(f, 0.0, q_max, epsabs=1e-14, epsrel=1e-12, norm="max",
                      points=points, limit=max(2000, 4 * n_panels))
    return val


def d2_origin_closed_form(family, beta: float, tau: float) -> float:
    """Origin curvature of ``|Psi_i(beta; ., tau)|^2`` for i = 1, 2.

    Psi_1: the value and second derivative at xi = 0 are the q^0 and -q^2
    moments of the evolved Gaussian spectrum. Psi_2: with
    ``G(r) = K1(r)/r`` and ``r = sqrt(a^2 + xi^2)``, ``d^2 G/dxi^2 = -K2(a)/a^2``
    at the origin, ``K2 = K0 + 2 K1 / a``. The first derivative vanishes by
    symmetry in both cases.
    """
    family = SolutionFamily(family)
    if family is SolutionFamily.PSI1:
        n2 = math.sqrt(2.0 * beta / math.pi)
        m0, m2 = _psi1_origin_moments(beta, tau)
        return n2 / (2.0 * math.pi) * 2.0 * (np.conj(m0) * (-m2)).real
    a = complex(beta, tau)
    k0, k1 = specfun.bessel_k(0, a), specfun.bessel_k(1, a)
    k2 = k0 + 2.0 * k1 / a
    pref = abs(a) ** 2 / (math.pi * specfun.bessel_k(1, 2.0 * beta).real)
    return float(pref * 2.0 * (np.conj(k1 / a) * (-k2 / a**2)).real)


def critical_beta(family, tau: float, bracket=(0.01, 10.0), xtol: float = 1e-6) -> float:
    """Localization at which the origin curvature changes sign at time ``tau``.

    Smaller beta (tighter packets) gives a minimum at the origin, i.e. two
    peaks. Raises :class:`NoCriticalPointError` without a sign change on
    ``bracket``.
    """
    if not tau > 0:
        raise ValueError("tau must be > 0")
    lo, hi = bracket
    f = lambda b: d2_origin_closed_form(family, b, tau)
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoCriticalPointError(
            f"no sign change of D2 for {SolutionFamily(family).value} at tau={tau} "
            f"on beta in [{lo}, {hi}]")
    return brentq(f, lo, hi, xtol=xtol, rtol=1e-12)


def peak_count(f, threshold: float = DEFAULT_PROMINENCE) -> int:
    """Local maxima of the density with prominence >= threshold * max.

    A nonzero density without an interior maximum (constant, or monotone
    towards one edge) counts as one peak.
    """
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    rho = f.density()
    top = float(np.max(rho))
    if top == 0.0:
        return 0
    peaks, _ = find_peaks(rho, prominence=threshold * top if threshold > 0 else None)
    return max(1, len(peaks))


def l1_mass(f: ScalarField) -> float:
    """``int f dxi`` (real part) on the grid."""
    _check_position(f)
    return float(np.sum(f.values).real * f.grid.spacing)


def first_moment(f) -> float:
    _check_position(f)
    rho = f.density()
    return float(np.sum(f.grid.xi_nodes * rho) / np.sum(rho))


def rms_position(f) -> float:
    """``sqrt(int xi^2 |psi|^2 / int |psi|^2)`` on the grid."""
    _check_position(f)
    rho = f.density()
    return math.sqrt(float(np.sum(f.grid.xi_nodes**2 * rho) / np.sum(rho)))


def rms_position_exact(density, epsabs=1e-13, epsrel=1e-12) -> float:
    """r.m.s. position of an even density given as a callable on the real line."""
    num = 2 * sum(quad(lambda x: x * x * density(x), a, b, epsabs=epsabs, epsrel=epsrel,
                       limit=500)[0] for a, b in ((0, 10), (10, np.inf)))
    den = 2 * sum(quad(density, a, b, epsabs=epsabs, epsrel=epsrel, limit=500)[0]
                  for a, b in ((0, 10), (10, np.inf)))
    return math.sqrt(num / den)


def kg_invariant(state: KGState) -> float:
    """``int (|d/dtau Psi~|^2 + omega^2 |Psi~|^2) dk``, conserved by the KG flow."""
    grid = state.grid
    s0 = fft_forward(grid, state.psi.values)
    s1 = fft_forward(grid, state.psi_dot.values)
    return float(np.sum(np.abs(s1) ** 2 + grid.omega**2 * np.abs(s0) ** 2) * grid.dk)


def make_report(f, tau: float, threshold: float = DEFAULT_PROMINENCE,
                with_rms: bool = True) -> DiagnosticsReport:
    """Assemble the standard diagnostics for a scalar, spinor or KG state."""
    kg = None
    if isinstance(f, KGState):
        kg = kg_invariant(f)
        f = f.psi
    return DiagnosticsReport(
        tau=float(tau),
        l2_norm=f.norm(),
        d2_origin=d2_origin(f),
        peak_count=peak_count(f, threshold),
        rms_position=rms_position(f) if with_rms else None,
        kg_invariant=kg,
    )
