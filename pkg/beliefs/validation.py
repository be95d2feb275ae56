"""Cross-check battery: solvers against closed forms, each other and the simulator.

Every check runs at reduced scale and returns a pass flag with a one-line
detail. A check that raises is recorded as failed, unless it is an
expected-failure check whose whole point is the error.
"""

from __future__ import annotations

import dataclasses
import logging
import time
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from beliefs.errors import BeliefFluidError, NonPositiveNoise
from beliefs.mcsim import (
    InteractionPath,
    drift_diagnostic,
    init_ensemble,
    interaction_sums,
    marginal_l1,
    mc_run,
)
from beliefs.model.initial import PrejudiceInit
from beliefs.model.presets import get_preset
from beliefs.model.scenario import ScenarioSpec, Tabulated, personality_density
from beliefs.numerics.grid import Grid, make_grid
from beliefs.stationary import (
    find_modes,
    homogeneous_closed_form,
    solve_stationary,
    two_cluster_split,
)
from beliefs.transient import (
    density_at,
    laplace_consistency_check,
    slowest_relaxation_rate,
    solve_phi_volterra,
    solve_transient,
)

logger = logging.getLogger(__name__)

GROUPS = ("stationary", "transient", "mcsim", "scenario")

CheckFn = Callable[[], tuple[bool, str]]


@dataclass(frozen=True)
class Check:
    """One named cross-check."""

    name: str
    group: str
    run: CheckFn
    slow: bool = False
    expect_error: type[Exception] | None = None


@dataclass
class CheckOutcome:
    """What one check reported."""

    name: str
    group: str
    passed: bool
    detail: str
    seconds: float


@dataclass
class ValidationResult:
    """Outcomes of a battery run."""

    outcomes: list[CheckOutcome] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """True when every check that ran passed."""
        return all(outcome.passed for outcome in self.outcomes)

    @property
    def failures(self) -> list[CheckOutcome]:
        """The checks that failed."""
        return [outcome for outcome in self.outcomes if not outcome.passed]

    def table(self) -> str:
        """Fixed-width pass/fail table."""
        width = max([len(o.name) for o in self.outcomes] + [5])
        lines = [f"  {'check':<{width}}  {'group':<10}  result  {'time':>7}  detail"]
        for o in self.outcomes:
            verdict = "PASS" if o.passed else "FAIL"
            lines.append(
                f"  {o.name:<{width}}  {o.group:<10}  {verdict:<6}  "
                f"{o.seconds:>6.1f}s  {o.detail}"
            )
        lines.append(f"  {len(self.outcomes) - len(self.failures)}/{len(self.outcomes)} passed")
        return "\n".join(lines)


# --- Stationary ---


def _closed_form_homogeneous() -> tuple[bool, str]:
    worst = 0.0
    for alpha in (0.1, 0.5, 1.0):
        spec = get_preset("homogeneous", alpha=alpha, sigma2=0.01).spec
        grid = make_grid(spec, 201, 801)
        result = solve_stationary(spec, grid, method="closed-form")
        exact = homogeneous_closed_form(alpha, 0.01, grid.x_nodes)
        worst = max(worst, float(np.max(np.abs(result.marginal - exact))))
    return worst <= 1e-5, f"max |rho - erf form| = {worst:.2e} (tol 1e-5)"


def _solver_agreement() -> tuple[bool, str]:
    worst = 0.0
    for shape in ("one-minus-abs", "abs"):
        for n in (0, 8):
            spec = get_preset("inhomogeneous", shape=shape, n=n).spec
            grid = make_grid(spec, 101, 401)
            fields = [
                solve_stationary(spec, grid, method=method).density
                for method in ("closed-form", "fredholm", "successive")
            ]
            for i in range(len(fields)):
                for j in range(i + 1, len(fields)):
                    worst = max(worst, fields[i].l1_distance(fields[j]))
    return worst <= 1e-4, f"largest pairwise L1 = {worst:.2e} (tol 1e-4)"


def _symmetric_phi_star() -> tuple[bool, str]:
    presets = [
        get_preset("homogeneous"),
        get_preset("inhomogeneous", shape="one-minus-abs", n=0),
        get_preset("inhomogeneous", shape="abs", n=8),
    ]
    worst = 0.0
    for preset in presets:
        grid = make_grid(preset.spec, 201, 101)
        result = solve_stationary(preset.spec, grid)
        assert result.gaussian is not None
        worst = max(worst, float(np.max(np.abs(result.gaussian.phi_star))))
    return worst <= 1e-8, f"max |phi*| = {worst:.2e} (tol 1e-8)"


def _bounded_marginal(alpha: float, sigma2: float) -> tuple[np.ndarray, np.ndarray]:
    spec = get_preset("bounded-rect", alpha=alpha, sigma2=sigma2).spec
    grid = make_grid(spec, 41, 401)
    return grid.x_nodes, solve_stationary(spec, grid, method="successive").marginal


def _clusterization() -> tuple[bool, str]:
    clustered = _bounded_marginal(0.1, 1e-3)
    noisy = _bounded_marginal(0.1, 0.1)
    stubborn = _bounded_marginal(0.3, 1e-3)
    split = [two_cluster_split(x, rho) for x, rho in (clustered, noisy, stubborn)]
    passed = split == [True, False, False]
    return passed, (
        f"modes {[round(x, 3) for x in find_modes(*clustered)]}; split at +-0.5: "
        f"alpha=0.1 {split[0]}, sigma2=0.1 {split[1]}, alpha=0.3 {split[2]}"
    )


# --- Transient ---


def _right_case_reference(spec: ScenarioSpec, grid: Grid, t: np.ndarray) -> np.ndarray:
    """phi(t) for zeta = 1, w = 1 with the grid's quadrature constants."""
    weights = grid.p_weights * personality_density(spec, grid)
    alpha = spec.alpha(grid.p_nodes)
    a = float(weights @ (alpha * spec.prejudice(grid.p_nodes)))
    b = float(weights @ (1.0 - alpha))
    rate = 1.0 - b
    j = a / rate + a / b * np.exp(-t) - (a / rate + a / b) * np.exp(-rate * t)
    return a * -np.expm1(-t) + b * j


def _right_case_phi() -> tuple[bool, str]:
    spec = get_preset("proximity", n=0).spec
    grid = make_grid(spec, 201, 3)
    path = solve_phi_volterra(spec, grid, t_final=20.0, dt=0.005)
    reference = _right_case_reference(spec, grid, path.t_nodes)
    error = float(np.max(np.abs(path.phi - reference[None, :])))
    return error <= 1e-6, f"max |phi - 1/2 (1 - e^(-t/3)) form| = {error:.2e} (tol 1e-6)"


def _shifted_homogeneous(alpha: float = 0.5) -> ScenarioSpec:
    spec = get_preset("homogeneous", alpha=alpha).spec
    shifted = Tabulated(np.array([-1.0, 1.0]), np.array([-0.7, 1.3]))
    return dataclasses.replace(spec, prejudice=shifted, name="homogeneous-shifted")


def _mean_conservation() -> tuple[bool, str]:
    spec = _shifted_homogeneous()
    grid = make_grid(spec, 101, 3)
    solution = solve_transient(spec, grid, t_final=10.0, dt=0.01)
    weights = grid.p_weights * personality_density(spec, grid)
    u_bar = float(weights @ spec.prejudice(grid.p_nodes))
    drift = float(np.max(np.abs(solution.mean_belief() - u_bar)))
    return drift <= 1e-6, f"max |mean(t) - mean u| = {drift:.2e} (tol 1e-6)"


def _laplace_residuals() -> tuple[bool, str]:
    worst = 0.0
    for spec in (get_preset("proximity", n=0).spec, _shifted_homogeneous()):
        grid = make_grid(spec, 101, 3)
        path = solve_phi_volterra(spec, grid, t_final=50.0, dt=0.01)
        residuals = laplace_consistency_check(spec, path, [0.5, 1.0, 2.0])
        worst = max([worst] + [r.residual for r in residuals])
    return worst <= 1e-4, f"largest relative residual = {worst:.2e} (tol 1e-4)"


def _relaxation() -> tuple[bool, str]:
    preset = get_preset("event-driven")
    spec = preset.spec
    grid = make_grid(spec, 101, 401)
    t = 20.0 / slowest_relaxation_rate(spec, grid)
    solution = solve_transient(spec, grid, t_final=t, init=preset.initial)
    stationary = solve_stationary(spec, grid).density
    gap = density_at(spec, solution, t, grid).l1_distance(stationary)
    return gap <= 1e-2, f"L1 at t = {t:.3g}: {gap:.2e} (tol 1e-2)"


# --- Monte Carlo ---


def _green_variance_mc() -> tuple[bool, str]:
    alpha, sigma2 = 0.5, 0.01
    spec = get_preset("noninteracting", alpha=alpha, sigma2=sigma2).spec
    ens = init_ensemble(spec, 10_000, seed=11)
    worst = 0.0
    for t in (0.5, 1.0, 5.0):
        mc_run(ens, t, dt=1e-3, record_every=1000)
        spread = float(np.var(ens.beliefs - ens.coefficients.prejudice))
        exact = sigma2 * -np.expm1(-2 * alpha * t) / (2 * alpha)
        worst = max(worst, abs(spread / exact - 1.0))
    return worst <= 0.1, f"largest relative variance error = {worst:.1%} (tol 10%)"


def _fast_path() -> tuple[bool, str]:
    spec = get_preset("inhomogeneous", shape="abs", n=8).spec
    ens = init_ensemble(spec, 200, seed=3)
    fast = interaction_sums(ens, InteractionPath.PRODUCT) / ens.size
    slow = interaction_sums(ens, InteractionPath.PAIRWISE) / ens.size
    gap = float(np.max(np.abs(fast - slow)))
    return gap <= 1e-12, f"max per-agent gap = {gap:.2e} (tol 1e-12)"


def _determinism() -> tuple[bool, str]:
    spec = get_preset("bounded-rect", alpha=0.3).spec
    runs = []
    for threads in (1, 2):
        ens = init_ensemble(spec, 600, seed=5)
        mc_run(ens, 0.5, dt=0.01, record_every=10, threads=threads)
        runs.append(ens.beliefs.copy())
    identical = np.array_equal(runs[0], runs[1])
    detail = "1 and 2 threads bit-identical" if identical else "thread count changed beliefs"
    return identical, detail


def _drift_restoring() -> tuple[bool, str]:
    spec = get_preset("noninteracting", alpha=0.5).spec
    ens = init_ensemble(spec, 50, seed=1)
    ens.beliefs[0], ens.beliefs[1] = 25.0, -25.0
    diag = drift_diagnostic(ens)
    return diag.restoring, f"drift {diag.drift_at_max:.3g} at max, {diag.drift_at_min:.3g} at min"


def _mc_against_mean_field() -> tuple[bool, str]:
    # Noise-dominated regime: at sigma2 = 1e-3 the alpha = 0.3 fixed point sits near
    # the clustering threshold and U = 1000 ensembles stay ~0.18 away in L1.
    spec = get_preset("bounded-rect", alpha=0.3, sigma2=0.1).spec
    grid = make_grid(spec, 41, 401)
    stationary = solve_stationary(spec, grid, method="successive")
    ens = init_ensemble(spec, 1000, seed=7)
    trajectory = mc_run(ens, 50.0, dt=0.01, record_every=100)
    gap = marginal_l1(trajectory.averaged(), grid.x_nodes, stationary.marginal)
    return gap <= 0.1, f"L1 of belief marginals = {gap:.3f} (tol 0.1)"


def _ergodicity() -> tuple[bool, str]:
    preset = get_preset("event-driven", alpha=0.3)
    finals = []
    for init in (PrejudiceInit(), preset.initial):
        ens = init_ensemble(preset.spec, 500, seed=9, init=init)
        finals.append(mc_run(ens, 40.0, dt=0.01, record_every=100).averaged())
    gap = float(np.sum(np.abs(finals[0].marginal_x() - finals[1].marginal_x())))
    return gap <= 0.15, f"L1 between initial conditions = {gap:.3f} (tol 0.15)"


# --- Scenario ---


def _zero_noise_rejected() -> tuple[bool, str]:
    get_preset("homogeneous", sigma2=0.0)
    return False, "sigma2 = 0 was accepted"


CHECKS: list[Check] = [
    Check("homogeneous-closed-form", "stationary", _closed_form_homogeneous),
    Check("solver-agreement", "stationary", _solver_agreement, slow=True),
    Check("symmetric-phi-star", "stationary", _symmetric_phi_star),
    Check("clusterization", "stationary", _clusterization, slow=True),
    Check("right-case-phi", "transient", _right_case_phi),
    Check("mean-conservation", "transient", _mean_conservation),
    Check("laplace-residual", "transient", _laplace_residuals),
    Check("relaxation", "transient", _relaxation),
    Check("green-variance-mc", "mcsim", _green_variance_mc, slow=True),
    Check("fast-path", "mcsim", _fast_path),
    Check("determinism", "mcsim", _determinism),
    Check("drift-restoring", "mcsim", _drift_restoring),
    Check("mc-vs-mean-field", "mcsim", _mc_against_mean_field, slow=True),
    Check("ergodicity", "mcsim", _ergodicity, slow=True),
    Check("zero-noise-rejected", "scenario", _zero_noise_rejected, expect_error=NonPositiveNoise),
]


def run_check(check: Check) -> CheckOutcome:
    """Run one check, turning errors into failures (or passes when expected)."""
    start = time.perf_counter()
    try:
        passed, detail = check.run()
    except (BeliefFluidError, ArithmeticError, ValueError) as e:
        if check.expect_error is not None and isinstance(e, check.expect_error):
            passed, detail = True, f"rejected as expected: {type(e).__name__}"
        else:
            logger.error("Check %s raised %s: %s", check.name, type(e).__name__, e)
            passed, detail = False, f"{type(e).__name__}: {e}"
    return CheckOutcome(check.name, check.group, passed, detail, time.perf_counter() - start)


def run_validation(
    only: list[str] | None = None,
    skip_slow: bool = False,
    checks: list[Check] | None = None,
) -> ValidationResult:
    """Run the battery, optionally restricted to some groups or check names.

    Args:
        only: Group or check names to keep; None keeps everything.
        skip_slow: Leave out the checks marked slow.
        checks: Battery to draw from; defaults to CHECKS.
    """
    selected = [
        check
        for check in (CHECKS if checks is None else checks)
        if (only is None or check.group in only or check.name in only)
        and not (skip_slow and check.slow)
    ]
    result = ValidationResult()
    for i, check in enumerate(selected, 1):
        logger.info("Check %d/%d: %s", i, len(selected), check.name)
        outcome = run_check(check)
        result.outcomes.append(outcome)
        if not outcome.passed:
            logger.warning("Check %s failed: %s", check.name, outcome.detail)
    passed = len(selected) - len(result.failures)
    logger.info("Validation complete: %d/%d passed", passed, len(selected))
    return result
