"""Run configured scenarios, critical-parameter searches and split-step
convergence studies."""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.linalg import expm

from relwave import closed_forms as cf
from relwave import diagnostics as dg
from relwave import potential, propagators
from relwave.config import ScenarioConfig
from relwave.grid import Family, PacketSpec, ScalarField, SpinorField, make_grid, make_packet

__all__ = [
    "closed_form_for",
    "convergence_study",
    "global_convergence_study",
    "run_critical_search",
    "run_scenario",
]


def _heat_kernel(beta):
    return lambda xi, tau: np.exp(-xi**2 / (4.0 * (beta + tau))) / (2.0 * math.sqrt(math.pi * (beta + tau)))


def closed_form_for(equation: str, spec: PacketSpec):
    """Closed-form evaluator ``(xi, tau) -> values`` matching the shape of
    the packet's evolution, or ``None``. Spinor forms return (plus, minus).

    Evaluators reproduce the packet only up to a constant factor; callers
    rescale by the ratio at (xi = 0, tau = 0).
    """
    fam, beta = spec.family, spec.beta
    table = {
        ("heat_nonrel", Family.GAUSSIAN): _heat_kernel(beta),
        ("heat_rel", Family.GAUSSIAN): lambda x, t: cf.f1_exact(beta, x, t),
        ("heat_rel", Family.MACDONALD): lambda x, t: cf.f2_exact(beta, x, t),
        ("salpeter", Family.GAUSSIAN): lambda x, t: cf.psi1_exact(beta, x, t),
        ("salpeter", Family.MACDONALD): lambda x, t: cf.psi2_exact(beta, x, t),
        ("salpeter", Family.PSI3): lambda x, t: cf.psi3_exact(beta, x, t),
        ("salpeter_massless", Family.MASSLESS_CAUCHY): lambda x, t: cf.massless_exact(spec.b, x, t),
        ("kg", Family.MACDONALD): lambda x, t: cf.kg_macdonald_exact(beta, x, t),
    }
    table[("heat_rel_subordinated", Family.GAUSSIAN)] = table[("heat_rel", Family.GAUSSIAN)]
    table[("heat_rel_subordinated", Family.MACDONALD)] = table[("heat_rel", Family.MACDONALD)]
    if equation == "dirac" and fam is Family.DIRAC_MACDONALD and spec.weights[1] == 0:
        return lambda x, t: cf.dirac_macdonald_exact(beta, x, t)
    return table.get((equation, fam))


def _scalar_step(equation, cfg, field0, tau):
    if equation == "heat_nonrel":
        return propagators.evolve_heat_nonrel(field0, tau)
    if equation == "heat_rel":
        return propagators.evolve_heat_rel(field0, tau)
    if equation == "heat_rel_subordinated":
        return propagators.evolve_heat_rel_subordinated(field0, tau)
    if equation == "salpeter":
        return propagators.evolve_salpeter(field0, tau)
    if equation == "salpeter_massless":
        return propagators.evolve_salpeter(field0, tau, massless=True)
    if equation == "salpeter_linear":
        return potential.salpeter_linear_exact(field0, cfg.mu0, tau)
    if equation == "dirac":
        return propagators.evolve_dirac(field0, tau)
    if equation == "kg":
        return propagators.evolve_kg(field0, tau)
    raise ValueError(f"unsupported equation {equation!r}")


def _sup_error(cfg, exact, initial, state, tau):
    grid = initial.grid
    xi = grid.xi_nodes
    i0 = grid.origin_index
    if isinstance(initial, SpinorField):
        ref0 = exact(0.0, 0.0)[0]
        scale = initial.plus_component[i0] / ref0
        plus, minus = exact(xi, tau)
        return float(max(np.max(np.abs(state.plus_component - scale * plus)),
                         np.max(np.abs(state.minus_component - scale * minus))))
    scale = initial.values[i0] / exact(0.0, 0.0)
    return float(np.max(np.abs(state.values - scale * exact(xi, tau))))


def run_scenario(cfg: ScenarioConfig, threads: int = 1) -> dg.EvolutionResult:
    """Evolve the configured packet to every requested time.

    Multiplier-based evolutions are direct functions of tau and may run on
    ``threads`` workers (0 = one per CPU); split-step runs are sequential.
    Results are ordered by tau either way.
    """
    grid = make_grid(cfg.n_points, cfg.length)
    initial = make_packet(cfg.packet, grid, normalize=cfg.normalize)
    result = dg.EvolutionResult()
    thr = cfg.outputs.peak_threshold

    if cfg.equation == "dirac_linear":
        states = []
        current, t_prev = initial, 0.0
        if cfg.times[0] < 0:
            raise ValueError("split-step evolution needs tau >= 0")
        for t in cfg.times:
            if t > t_prev:
                plan = cfg.split_plan(t - t_prev)
                for _ in range(plan.n_steps):
                    current = potential.dirac_zassenhaus_step(current, cfg.mu0, plan.step_tau,
                                                              cfg.shift_mode)
                t_prev = t
            states.append(current)
        result.notes.append(f"zassenhaus step <= {cfg.step_tau}, shift_mode={cfg.shift_mode}")
    else:
        start = propagators.KGState.at_rest(initial) if cfg.equation == "kg" else initial
        job = lambda t: _scalar_step(cfg.equation, cfg, start, t)
        workers = threads if threads > 0 else None
        if threads == 1 or len(cfg.times) == 1:
            states = [job(t) for t in cfg.times]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                states = list(pool.map(job, cfg.times))

    exact = closed_form_for(cfg.equation, cfg.packet) if cfg.outputs.compare_closed_form else None
    if cfg.outputs.compare_closed_form:
        if exact is None:
            result.notes.append("no closed form for this equation/packet")
        else:
            result.closed_form_errors = []

    for t, state in zip(cfg.times, states):
        report = dg.make_report(state, t, thr)
        field = state.psi if isinstance(state, propagators.KGState) else state
        result.snapshots.append((t, field))
        result.diagnostics.append(report)
        if exact is not None:
            result.closed_form_errors.append((t, _sup_error(cfg, exact, initial, field, t)))
    return result


def run_critical_search(family: str, tau: float | None = None, beta: float | None = None) -> dict:
    """Critical localization (psi1, psi2 at fixed tau) or critical time
    (psi3 at fixed beta). A missing root is reported, not raised."""
    if family in ("psi3", "psi3_analytic"):
        if beta is None:
            raise ValueError("psi3 search needs beta")
        out = {"family": "psi3", "beta": beta}
        try:
            out.update(status="ok", tau_c=dg.critical_tau(beta))
        except ValueError as exc:
            out.update(status="no root", reason=str(exc))
        return out
    if tau is None:
        raise ValueError(f"{family} search needs tau")
    out = {"family": dg.SolutionFamily(family).value, "tau": tau}
    try:
        out.update(status="ok", beta_c=dg.critical_beta(family, tau))
    except dg.NoCriticalPointError as exc:
        out.update(status="no root", reason=str(exc))
    return out


def _stack(s: SpinorField):
    return np.concatenate([s.plus_component, s.minus_component])


def convergence_study(mu0: float, steps=(0.02, 0.01, 0.005), beta: float = 1.0,
                      family: str = "dirac_gaussian_both", n_points: int = 128,
                      length: float = 32.0) -> dict:
    """Single-step error of the Zassenhaus split against ``expm`` of the
    dense lattice generator, and the fitted log-log slope."""
    grid = make_grid(n_points, length)
    state = make_packet(PacketSpec(family, beta=beta), grid)
    gen = potential.linear_dirac_generator(grid, mu0)
    v = _stack(state)
    errors = []
    for h in steps:
        ref = expm(h * gen) @ v
        approx = _stack(potential.dirac_zassenhaus_step(state, mu0, h))
        errors.append(math.sqrt(float(np.sum(np.abs(approx - ref) ** 2)) * grid.spacing))
    slope = float(np.polyfit(np.log(steps), np.log(errors), 1)[0])
    return {"mu0": mu0, "beta": beta, "family": family, "n_points": n_points,
            "length": length, "steps": list(steps), "local_errors": errors,
            "order": slope}


def global_convergence_study(mu0: float, total_tau: float = 1.0,
                             steps=(0.04, 0.02, 0.01), beta: float = 1.0,
                             family: str = "dirac_gaussian_both", n_points: int = 256,
                             length: float = 40.0) -> dict:
    """Global error at ``total_tau`` against a Richardson-extrapolated
    reference built from the two finest step sizes below ``steps``."""
    grid = make_grid(n_points, length)
    state = make_packet(PacketSpec(family, beta=beta), grid)

    def run(h):
        plan = potential.SplitStepPlan.covering(total_tau, h)
        cur = state
        for _ in range(plan.n_steps):
            cur = potential.dirac_zassenhaus_step(cur, mu0, plan.step_tau)
        return _stack(cur)

    h_min = steps[-1]
    fine, finer = run(h_min / 2), run(h_min / 4)
    reference = (4.0 * finer - fine) / 3.0
    errors = [math.sqrt(float(np.sum(np.abs(run(h) - reference) ** 2)) * grid.spacing)
              for h in steps]
    ratios = [errors[i] / errors[i + 1] for i in range(len(errors) - 1)]
    return {"mu0": mu0, "total_tau": total_tau, "steps": list(steps),
            "global_errors": errors, "ratios": ratios}
