import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.linalg import expm

from relwave import diagnostics as dg
from relwave import potential as pt
from relwave import propagators as pr
from relwave.grid import PacketSpec, SpinorField, make_grid, make_packet
from relwave.scenario import convergence_study, global_convergence_study


def sup(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def test_linear_potential_type():
    v = pt.LinearPotential(0.5)
    assert np.allclose(v(np.array([-2.0, 4.0])), [-1.0, 2.0])
    with pytest.raises(ValueError):
        pt.LinearPotential(math.inf)


def test_split_plan():
    plan = pt.SplitStepPlan.covering(1.0, 0.03)
    assert plan.n_steps == 34
    assert plan.total_tau == pytest.approx(1.0, rel=1e-15)
    assert plan.step_tau <= 0.03
    assert pt.SplitStepPlan.covering(2.0, 0.01).n_steps == 200
    with pytest.raises(ValueError):
        pt.SplitStepPlan(0.0, 3)
    with pytest.raises(ValueError):
        pt.SplitStepPlan(0.1, 0)


def test_phase_reference_value():
    expected = (math.sqrt(2) + math.asinh(1.0)) / 2
    assert float(pt.salpeter_linear_phase(0.0, 1.0, 1.0)) == pytest.approx(1.1477935747, abs=1e-10)
    assert float(pt.salpeter_linear_phase(0.0, 1.0, 1.0)) == pytest.approx(expected, rel=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.floats(-8, 8), st.floats(-2, 2).filter(lambda m: abs(m) > 1e-12), st.floats(0, 6))
def test_phase_against_quadrature(k, mu0, tau):
    ref = quad(lambda t: math.sqrt(1 + (k + mu0 * t) ** 2), 0, tau, epsabs=1e-14, epsrel=1e-13)[0]
    assert float(pt.salpeter_linear_phase(k, mu0, tau)) == pytest.approx(ref, rel=1e-11, abs=1e-11)


def test_phase_small_mu0_is_free():
    k = np.linspace(-5, 5, 11)
    free = 2.0 * np.sqrt(1 + k * k)
    assert np.max(np.abs(pt.salpeter_linear_phase(k, 1e-9, 2.0) - free)) <= 1e-8
    assert np.array_equal(pt.salpeter_linear_phase(k, 0.0, 2.0), free)


def test_salpeter_linear_unitary_and_limit(grid):
    f = make_packet(PacketSpec("macdonald", beta=1.0), grid)
    out = pt.salpeter_linear_exact(f, 0.5, 4.3)
    assert out.norm() == pytest.approx(1.0, abs=1e-12)
    near = pt.salpeter_linear_exact(f, 1e-6, 1.0)
    assert sup(near.values, pr.evolve_salpeter(f, 1.0).values) <= 1e-6
    same = pt.salpeter_linear_exact(f, 0.0, 1.0)
    assert sup(same.values, pr.evolve_salpeter(f, 1.0).values) == 0.0


def test_salpeter_linear_solves_equation(grid):
    # i d/dtau Psi = (sqrt(1 - d^2) + mu0 xi) Psi, checked by a centered time difference
    f = make_packet(PacketSpec("gaussian", beta=1.0), grid)
    mu0, tau, dt = 0.4, 1.5, 1e-4
    plus = pt.salpeter_linear_exact(f, mu0, tau + dt).values
    minus = pt.salpeter_linear_exact(f, mu0, tau - dt).values
    mid = pt.salpeter_linear_exact(f, mu0, tau)
    lhs = 1j * (plus - minus) / (2 * dt)
    rhs = pr.apply_multiplier(mid, grid.omega).values + mu0 * grid.xi_nodes * mid.values
    assert sup(lhs, rhs) <= 1e-6


@pytest.mark.parametrize("mu0, tau", [(0.5, 4.3), (-0.8, 1.0), (1.0, 2.0)])
def test_spectral_centroid_shift(grid, mu0, tau):
    f = make_packet(PacketSpec("macdonald", beta=1.0), grid)
    shift = pt.spectral_centroid(pt.salpeter_linear_exact(f, mu0, tau)) - pt.spectral_centroid(f)
    assert shift == pytest.approx(-mu0 * tau, abs=1e-6)


def test_linear_potential_suppresses_two_lobes(grid):
    f = make_packet(PacketSpec("macdonald", beta=1.0), grid)
    driven = pt.salpeter_linear_exact(f, 0.5, 4.3)
    free = pr.evolve_salpeter(f, 4.3)
    assert dg.peak_count(driven) == 1
    # free density flattens at the origin
    assert abs(dg.d2_origin(free)) < 0.01 * abs(dg.d2_origin(f))


def test_salpeter_linear_rejects_spectrum(grid):
    from relwave.grid import forward_transform
    with pytest.raises(ValueError):
        pt.salpeter_linear_exact(forward_transform(make_packet(PacketSpec("gaussian"), grid)),
                                 0.5, 1.0)


@pytest.fixture(scope="module")
def coarse():
    return make_grid(128, 32.0)


def test_commutator_factor_unitary():
    k = np.linspace(-20, 20, 81)
    c11, c12, c21, c22 = pt._commutator_factor(k, 0.7, 0.05)
    u = np.stack([np.stack([c11, c12], -1), np.stack([c21, c22], -1)], -2)
    assert np.max(np.abs(np.einsum("kij,klj->kil", u, u.conj()) - np.eye(2))) <= 1e-14


def test_commutator_factor_against_expm():
    h, mu0 = 0.1, 0.6
    for k in (0.0, 1.3, -4.0):
        z = np.array([[0, h * h * k + 0.5j * h * h * mu0], [-h * h * k + 0.5j * h * h * mu0, 0]])
        ref = expm(z)
        got = np.array(pt._commutator_factor(np.array(k), mu0, h)).reshape(2, 2)
        assert np.max(np.abs(got - ref)) <= 1e-15


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(-1, 1), st.floats(1e-3, 0.2))
def test_step_unitary(seed, mu0, h):
    g = make_grid(128, 32.0)
    rng = np.random.default_rng(seed)
    s = SpinorField(g, rng.standard_normal(128) + 1j * rng.standard_normal(128),
                    rng.standard_normal(128) + 1j * rng.standard_normal(128))
    assert pt.dirac_zassenhaus_step(s, mu0, h).norm() == pytest.approx(s.norm(), rel=1e-12)


def test_index_mode_matches_spectral(coarse):
    s = make_packet(PacketSpec("dirac_gaussian_both", beta=1.0), coarse)
    h = coarse.spacing
    a = pt.dirac_zassenhaus_step(s, 0.5, h, shift_mode="spectral")
    b = pt.dirac_zassenhaus_step(s, 0.5, h, shift_mode="index")
    # translation by one node is exact in both realizations
    assert sup(a.plus_component, b.plus_component) <= 1e-12
    assert sup(a.minus_component, b.minus_component) <= 1e-12


def test_index_mode_rejects_fractional_shift(coarse):
    s = make_packet(PacketSpec("dirac_gaussian_both", beta=1.0), coarse)
    with pytest.raises(ValueError):
        pt.dirac_zassenhaus_step(s, 0.5, 0.3 * coarse.spacing, shift_mode="index")
    with pytest.raises(ValueError):
        pt.dirac_zassenhaus_step(s, 0.5, 0.01, shift_mode="linear")
    with pytest.raises(ValueError):
        pt.dirac_zassenhaus_step(s, 0.5, 0.0)


def test_generator_zero_potential_is_free_dirac(coarse):
    s = make_packet(PacketSpec("dirac_gaussian_both", beta=1.0), coarse)
    gen = pt.linear_dirac_generator(coarse, 0.0)
    v = expm(1.3 * gen) @ np.concatenate([s.plus_component, s.minus_component])
    ref = pr.evolve_dirac(s, 1.3)
    n = coarse.n_points
    assert sup(v[:n], ref.plus_component) <= 1e-11
    assert sup(v[n:], ref.minus_component) <= 1e-11


def test_generator_anti_hermitian(coarse):
    gen = pt.linear_dirac_generator(coarse, 0.7)
    assert np.max(np.abs(gen + gen.conj().T)) <= 1e-12
    with pytest.raises(ValueError):
        pt.linear_dirac_generator(make_grid(512, 40.0), 0.5)


def test_local_order_three():
    study = convergence_study(0.5)
    errs = study["local_errors"]
    assert 2.7 <= study["order"] <= 3.3
    assert errs[0] / errs[1] == pytest.approx(8.0, rel=0.1)


def test_global_order_two():
    study = global_convergence_study(0.5, total_tau=1.0)
    for r in study["ratios"]:
        assert r == pytest.approx(4.0, rel=0.1)


def test_free_limit_matches_evolve_dirac(grid):
    s0 = make_packet(PacketSpec("dirac_gaussian_both", beta=1.0), grid)
    res = pt.dirac_linear_evolve(s0, 0.0, pt.SplitStepPlan.covering(2.0, 0.01),
                                 snapshot_every=50, diagnostics=False)
    assert res.taus == pytest.approx([0.0, 0.5, 1.0, 1.5, 2.0])
    ref = pr.evolve_dirac(s0, 2.0)
    final = res.snapshots[-1][1]
    assert sup(final.plus_component, ref.plus_component) <= 1e-4
    assert sup(final.minus_component, ref.minus_component) <= 1e-4


def test_evolve_one_step_is_single_step(coarse):
    s0 = make_packet(PacketSpec("dirac_gaussian_both", beta=1.0), coarse)
    res = pt.dirac_linear_evolve(s0, 0.5, pt.SplitStepPlan(0.02, 1))
    step = pt.dirac_zassenhaus_step(s0, 0.5, 0.02)
    assert len(res.snapshots) == 2 and len(res.diagnostics) == 2
    assert np.array_equal(res.snapshots[1][1].plus_component, step.plus_component)
    assert res.diagnostics[1].l2_norm == pytest.approx(1.0, abs=1e-12)
