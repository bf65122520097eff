import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from relwave import closed_forms as cf
from relwave import diagnostics as dg
from relwave import propagators as pr
from relwave.grid import (PacketSpec, ScalarField, SpinorField, fft_forward, make_grid,
                          make_packet)


def sup(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


@pytest.fixture(scope="module")
def gauss(grid):
    return make_packet(PacketSpec("gaussian", beta=0.5), grid)


@pytest.fixture(scope="module")
def macd(grid):
    return make_packet(PacketSpec("macdonald", beta=0.2), grid, normalize=False)


@pytest.mark.parametrize("evolve", [pr.evolve_heat_nonrel, pr.evolve_heat_rel, pr.evolve_salpeter,
                                    pr.evolve_heat_rel_subordinated])
def test_zero_time_identity(evolve, gauss):
    assert sup(evolve(gauss, 0.0).values, gauss.values) <= 1e-15


@pytest.mark.parametrize("evolve", [pr.evolve_heat_nonrel, pr.evolve_heat_rel])
def test_heat_rejects_negative_time(evolve, gauss):
    with pytest.raises(ValueError):
        evolve(gauss, -0.1)


def test_subordination_rejects_negative_time(gauss):
    with pytest.raises(ValueError):
        pr.evolve_heat_rel_subordinated(gauss, -1.0)


def test_unknown_multiplier(grid):
    with pytest.raises(ValueError):
        pr.multiplier("schrodinger", grid, 1.0)


def test_type_checks(grid):
    s = make_packet(PacketSpec("dirac_gaussian_both"), grid)
    with pytest.raises(TypeError):
        pr.evolve_salpeter(s, 1.0)
    with pytest.raises(TypeError):
        pr.evolve_dirac(ScalarField(grid, np.ones(grid.n_points)), 1.0)


def test_glaisher(grid):
    f = make_packet(PacketSpec("gaussian", beta=0.2), grid, normalize=False)
    out = pr.evolve_heat_nonrel(f, 0.3)
    ref = make_packet(PacketSpec("gaussian", beta=0.5), grid, normalize=False)
    assert sup(out.values, ref.values) <= 1e-8


def test_heat_nonrel_macdonald_against_quadrature(grid, macd):
    tau, beta = 0.4, 0.2
    out = pr.evolve_heat_nonrel(macd, tau)
    # raw f2 has spectrum c e^{-beta omega}; fix c at k = 0
    c = fft_forward(grid, macd.values)[grid.origin_index].real / math.exp(-beta)
    for idx in grid.origin_index + np.array([0, 12, 40]):
        xi = grid.xi_nodes[idx]
        ref = quad(lambda k: math.exp(-beta * math.hypot(1, k) - tau * k * k) * math.cos(k * xi),
                   0, 40, limit=400)[0] * 2 * c / math.sqrt(2 * math.pi)
        assert out.values[idx].real == pytest.approx(ref, abs=1e-10)


def test_heat_rel_macdonald_closed_form(grid, macd):
    out = pr.evolve_heat_rel(macd, 0.2)
    assert sup(out.values, cf.f2_exact(0.2, grid.xi_nodes, 0.2)) <= 1e-8


def test_heat_rel_gaussian_closed_form(grid):
    f = make_packet(PacketSpec("gaussian", beta=0.2), grid, normalize=False)
    out = pr.evolve_heat_rel(f, 0.7)
    idx = grid.origin_index + np.array([0, 17, 64])
    assert sup(out.values[idx], cf.f1_exact(0.2, grid.xi_nodes[idx], 0.7)) <= 1e-8


def test_subordination_matches_multiplier(grid, gauss, macd):
    assert sup(pr.evolve_heat_rel_subordinated(gauss, 1.0).values,
               pr.evolve_heat_rel(gauss, 1.0).values) <= 1e-6
    assert sup(pr.evolve_heat_rel_subordinated(macd, 0.2).values,
               cf.f2_exact(0.2, grid.xi_nodes, 0.2)) <= 1e-6


@pytest.mark.parametrize("tau", [1e-3, 1e-4])
def test_subordination_small_time_limit(grid, gauss, tau):
    # difference from identity is first order in tau, with slope -(1 - d^2)^{1/2}
    out = pr.evolve_heat_rel_subordinated(gauss, tau)
    slope = pr.apply_multiplier(gauss, -grid.omega).values
    assert sup(out.values, gauss.values + tau * slope) <= 1e-6 * tau / 1e-3


def test_subordinated_multiplier_is_laplace_transform(grid):
    m = pr.subordinated_multiplier(grid, 0.8)
    assert np.max(np.abs(m - np.exp(-0.8 * grid.omega))) <= 1e-9


@pytest.mark.parametrize("kind", ["heat_nonrel", "heat_rel", "salpeter", "salpeter_massless"])
def test_semigroup(grid, gauss, kind):
    t1, t2 = 0.37, 1.21
    once = pr.apply_multiplier(gauss, pr.multiplier(kind, grid, t1 + t2))
    twice = pr.apply_multiplier(pr.apply_multiplier(gauss, pr.multiplier(kind, grid, t1)),
                                pr.multiplier(kind, grid, t2))
    assert sup(once.values, twice.values) <= 1e-12


def test_dirac_and_kg_semigroup(grid):
    s = make_packet(PacketSpec("dirac_gaussian_both", beta=1.0), grid)
    a = pr.evolve_dirac(pr.evolve_dirac(s, 0.8), 1.7)
    b = pr.evolve_dirac(s, 2.5)
    assert sup(a.plus_component, b.plus_component) <= 1e-12
    st0 = pr.KGState.at_rest(make_packet(PacketSpec("macdonald"), grid))
    a = pr.evolve_kg(pr.evolve_kg(st0, 0.8), 1.7)
    b = pr.evolve_kg(st0, 2.5)
    assert sup(a.psi.values, b.psi.values) <= 1e-12
    assert sup(a.psi_dot.values, b.psi_dot.values) <= 1e-12


@pytest.mark.parametrize("tau", [-3.0, 0.5, 9.5])
def test_salpeter_unitary(grid, tau):
    f = make_packet(PacketSpec("psi3", beta=0.25), grid)
    assert pr.evolve_salpeter(f, tau).norm() == pytest.approx(f.norm(), abs=1e-12)
    assert pr.evolve_salpeter(f, tau, massless=True).norm() == pytest.approx(f.norm(), abs=1e-12)


def test_massless_multiplier_at_zero_mode(grid):
    m = pr.multiplier("salpeter_massless", grid, 3.0)
    assert m[grid.origin_index] == 1.0


@pytest.fixture(scope="module")
def wide_grid():
    return make_grid(8192, 800.0)


@pytest.mark.parametrize("family", ["gaussian", "macdonald"])
def test_heat_rel_mass_decays(wide_grid, family):
    f = make_packet(PacketSpec(family, beta=1.0), wide_grid, normalize=False)
    masses = [dg.l1_mass(pr.evolve_heat_rel(f, tau)) for tau in (0.0, 0.5, 1.0, 2.0)]
    assert masses == sorted(masses, reverse=True)
    for tau, m in zip((0.0, 0.5, 1.0, 2.0), masses):
        assert m * math.exp(tau) == pytest.approx(masses[0], rel=1e-10)


@pytest.mark.parametrize("tau", [0.0, 1.0, 3.0])
def test_heat_rel_restored_normalization(wide_grid, tau):
    from relwave.specfun import bessel_k

    beta = 1.0
    g1 = make_packet(PacketSpec("gaussian", beta=beta), wide_grid, normalize=False)
    f2 = make_packet(PacketSpec("macdonald", beta=beta), wide_grid, normalize=False)
    assert dg.l1_mass(pr.evolve_heat_rel(g1, tau)) * math.exp(tau) == pytest.approx(1.0, rel=1e-12)
    # with the beta/(2 K1) prefactor of f2 the restoring factor is 2 K1(beta) e^{beta+tau}/pi
    restore = 2 * bessel_k(1, beta).real * math.exp(beta + tau) / math.pi
    assert dg.l1_mass(pr.evolve_heat_rel(f2, tau)) * restore == pytest.approx(1.0, rel=1e-10)


def test_nonrelativistic_limit():
    g = make_grid(4096, 4096.0)
    k = g.k_nodes
    spec = np.where(np.abs(k) <= 0.1, np.cos(5 * np.pi * k) ** 2, 0.0)
    from relwave.grid import fft_inverse
    f = ScalarField(g, fft_inverse(g, spec))
    tau = 2.0
    rel = pr.evolve_heat_rel(f, tau)
    approx = pr.evolve_heat_nonrel(f, tau / 2).scaled(math.exp(-tau))
    assert sup(rel.values, approx.values) <= 1e-4 * np.max(np.abs(f.values))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(-6.0, 6.0))
def test_dirac_unitary_random(seed, tau):
    g = make_grid(256, 40.0)
    rng = np.random.default_rng(seed)
    s = SpinorField(g, rng.standard_normal(256) + 1j * rng.standard_normal(256),
                    rng.standard_normal(256) + 1j * rng.standard_normal(256))
    assert pr.evolve_dirac(s, tau).norm() == pytest.approx(s.norm(), rel=1e-12)


def test_dirac_matrix_unitary():
    k = np.linspace(-20, 20, 101)
    upp, upm, ump, umm = pr.dirac_matrix(k, 1.3)
    u = np.stack([np.stack([upp, upm], -1), np.stack([ump, umm], -1)], -2)
    eye = np.einsum("kij,klj->kil", u, u.conj())
    assert np.max(np.abs(eye - np.eye(2))) <= 1e-14


def test_dirac_zero_time(grid):
    s = make_packet(PacketSpec("dirac_gaussian_both"), grid)
    out = pr.evolve_dirac(s, 0.0)
    assert sup(out.plus_component, s.plus_component) <= 1e-15


def test_dirac_macdonald_closed_form(grid):
    s0 = make_packet(PacketSpec("dirac_macdonald", beta=1.0), grid)
    s = pr.evolve_dirac(s0, 2.0)
    p, m = cf.dirac_macdonald_exact(1.0, grid.xi_nodes, 2.0)
    nrm = cf.dirac_macdonald_norm(1.0)
    assert sup(s.plus_component, p / nrm) <= 1e-7
    assert sup(s.minus_component, m / nrm) <= 1e-7


def test_dirac_gaussian_double_lobe(grid):
    from scipy.signal import find_peaks

    s = pr.evolve_dirac(make_packet(PacketSpec("dirac_gaussian_both", beta=1.0), grid), 4.5)
    assert s.norm() == pytest.approx(1.0, abs=1e-12)
    rho = s.density()
    peaks, _ = find_peaks(rho, height=0.5 * rho.max())
    assert len(peaks) == 2
    # lobes separated by more than the initial width 2 sqrt(beta)
    assert np.ptp(grid.xi_nodes[peaks]) > 2.0


def test_positive_energy_projector(grid):
    s = make_packet(PacketSpec("dirac_gaussian_both", beta=1.0), grid)
    p = pr.positive_energy_projection(s)
    pp = pr.positive_energy_projection(p)
    assert sup(pp.plus_component, p.plus_component) <= 1e-14
    # an eigenstate of U = exp(i tau H) picks up the phase e^{i tau omega} per mode
    out = pr.evolve_dirac(p, 1.0)
    sp = fft_forward(grid, out.plus_component)
    assert np.max(np.abs(sp - np.exp(1j * grid.omega) * fft_forward(grid, p.plus_component))) \
        <= 1e-14


def _centroid_residual(state, taus):
    c = np.array([dg.first_moment(pr.evolve_dirac(state, t)) for t in taus])
    fit = np.polyval(np.polyfit(taus, c, 1), taus)
    return float(np.max(np.abs(c - fit)))


def test_no_zitterbewegung_for_positive_energy(grid):
    boost = np.exp(1j * 1.5 * grid.xi_nodes)
    base = make_packet(PacketSpec("dirac_gaussian_both", beta=1.0, component_weights=(1, 0)), grid)
    s = SpinorField(grid, base.plus_component * boost, base.minus_component * boost)
    taus = np.linspace(0.0, 6.0, 61)
    proj = pr.positive_energy_projection(s)
    proj = proj.scaled(1 / proj.norm())
    assert _centroid_residual(proj, taus) <= 1e-3
    # the unprojected packet does tremble, so the check has teeth
    assert _centroid_residual(s, taus) > 1e-2


def test_kg_matrix_determinant():
    k = np.linspace(-30, 30, 77)
    a, b, c, d = pr.kg_matrix(k, 2.2)
    assert np.max(np.abs(a * d - b * c - 1)) <= 1e-13


def test_kg_inverse(grid):
    rng = np.random.default_rng(3)
    psi = make_packet(PacketSpec("macdonald"), grid)
    dot = ScalarField(grid, psi.values * rng.standard_normal(grid.n_points))
    st0 = pr.KGState(psi, dot)
    back = pr.evolve_kg(pr.evolve_kg(st0, 3.3), -3.3)
    assert sup(back.psi.values, psi.values) <= 1e-12
    assert sup(back.psi_dot.values, dot.values) <= 1e-12
    same = pr.evolve_kg(st0, 0.0)
    assert sup(same.psi.values, psi.values) <= 1e-15


def test_kg_closed_form(grid):
    psi0 = make_packet(PacketSpec("dirac_macdonald", beta=1.0), grid, normalize=False).components()[0]
    st0 = pr.KGState.at_rest(psi0)
    out = pr.evolve_kg(st0, 0.5)
    assert sup(out.psi.values, cf.kg_macdonald_exact(1.0, grid.xi_nodes, 0.5)) <= 1e-8


def test_kg_from_salpeter_zero_velocity(grid):
    psi0 = make_packet(PacketSpec("psi3", beta=0.25), grid)
    zero = ScalarField(grid, np.zeros(grid.n_points))
    tau = 1.7
    out = pr.kg_from_salpeter(psi0, zero, tau)
    half = 0.5 * (pr.evolve_salpeter(psi0, tau).values + pr.evolve_salpeter(psi0, -tau).values)
    assert sup(out.values, half) <= 1e-14
    assert sup(pr.kg_from_salpeter(psi0, zero, 0.0).values, psi0.values) <= 1e-15


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(-10.0, 10.0))
def test_kg_from_salpeter_matches_kg(seed, tau):
    g = make_grid(128, 30.0)
    rng = np.random.default_rng(seed)
    psi = ScalarField(g, rng.standard_normal(128) + 1j * rng.standard_normal(128))
    dot = ScalarField(g, rng.standard_normal(128) + 1j * rng.standard_normal(128))
    a = pr.evolve_kg(pr.KGState(psi, dot), tau).psi.values
    b = pr.kg_from_salpeter(psi, dot, tau).values
    assert sup(a, b) <= 1e-12 * max(1.0, np.max(np.abs(a)))


def test_kg_state_grid_mismatch():
    a = ScalarField(make_grid(16, 4.0), np.ones(16))
    b = ScalarField(make_grid(32, 4.0), np.ones(32))
    with pytest.raises(ValueError):
        pr.KGState(a, b)
