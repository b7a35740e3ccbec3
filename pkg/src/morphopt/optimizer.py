"""Bounded nonlinear conjugate gradients and the two outer schemes.

The minimizer is projected Polak-Ribiere+ CG with Armijo backtracking;
every trial point is projected onto the box, accepted iterates never
increase the objective, and a failed line search returns the best iterate
with a stalled flag instead of raising.

run_monolithic optimizes (rho2, rho3, s_1..s_n) jointly; run_staggered
optimizes the densities only and re-minimizes the stimulus in closed form
at every accepted design iterate (committing the update only if the true
objective decreased, which keeps the history monotone).
"""

from dataclasses import dataclass, field

import numpy as np

from . import functional, sensitivity
from .elasticity import solve_adjoint, solve_state
from .fields import DesignField, StimulusField, project_design, project_stimulus
from .stimulus_update import minimize_stimulus_field


@dataclass(frozen=True)
class OptimizerConfig:
    grad_rtol: float = 1e-6
    grad_atol: float = 1e-6
    obj_rtol: float = 1e-6
    max_outer_iters: int = 500
    armijo_c: float = 1e-4
    backtrack_factor: float = 0.5
    max_ls_trials: int = 40
    restart_period: int = 50
    obj_stall_window: int = 5
    initial_step: float = 1.0
    step_growth: float = 2.0


@dataclass
class IterateRecord:
    """One accepted outer iterate, as logged to the CSV history."""

    iteration: int
    breakdown: functional.ObjectiveBreakdown
    grad_norm_design: float
    grad_norm_stimulus: float
    step: float
    vol_frac2: float
    vol_frac3: float


@dataclass
class BncgResult:
    x: np.ndarray
    value: float
    status: str  # converged-grad | converged-obj | maxiter | stalled
    iterations: int
    history: list = field(default_factory=list)

    @property
    def stalled(self):
        return self.status == "stalled"


def _norm(v):
    return float(np.sqrt(np.sum(v * v)))


def bncg_minimize(value_fn, value_grad_fn, x0, lower, upper, cfg,
                  on_accept=None, post_accept=None, diag_scale=None):
    """Minimize over the box [lower, upper].

    ``value_fn(x) -> f`` is used for line-search trials, ``value_grad_fn(x)
    -> (f, g)`` at accepted iterates.  ``on_accept(k, x, f, g, step)`` is
    called after evaluating the gradient at every accepted point (and at
    the initial point with step 0).  ``post_accept(x, f, g) -> (f, g) or
    None`` may revise the objective/gradient at an accepted iterate (used
    by the staggered scheme's inner stimulus minimization); it must not
    increase f.  ``diag_scale`` is an optional positive diagonal
    preconditioner for the search direction; it defaults off and the
    production schemes do not set it.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if diag_scale is not None:
        diag_scale = np.asarray(diag_scale, dtype=float)
        if np.any(diag_scale <= 0.0):
            raise ValueError("diag_scale entries must be positive")
    x = np.clip(np.asarray(x0, dtype=float), lower, upper)
    f, g = value_grad_fn(x)

    def projected_grad_norm(x, g):
        return _norm(x - np.clip(x - g, lower, upper))

    # record the pristine initial point before any inner minimization
    history = [dict(iteration=0, value=f, pg_norm=projected_grad_norm(x, g),
                    step=0.0)]
    if on_accept is not None:
        on_accept(0, x, f, g, 0.0)
    if post_accept is not None:
        revised = post_accept(x, f, g)
        if revised is not None:
            f, g = revised

    pg0 = projected_grad_norm(x, g)
    grad_target = max(cfg.grad_atol, cfg.grad_rtol * pg0)
    if pg0 <= grad_target:
        return BncgResult(x, f, "converged-grad", 0, history)

    def reduced(g, x):
        out = g if diag_scale is None else g * diag_scale
        out = out.copy() if out is g else out
        out[(x <= lower) & (g > 0)] = 0.0
        out[(x >= upper) & (g < 0)] = 0.0
        return out

    g_red = reduced(g, x)
    d = -g_red
    g_red_prev = g_red
    alpha0 = cfg.initial_step
    stall_count = 0

    for k in range(1, cfg.max_outer_iters + 1):
        accepted = False
        for attempt in (0, 1):  # second attempt restarts with steepest descent
            if attempt == 1:
                d = -reduced(g, x)
            if np.dot(g, d) >= 0.0:
                if attempt == 0:
                    continue
                break
            alpha = alpha0
            for _ in range(cfg.max_ls_trials):
                x_t = np.clip(x + alpha * d, lower, upper)
                delta = float(np.dot(g, x_t - x))
                if delta < 0.0:
                    f_t = value_fn(x_t)
                    if f_t <= f + cfg.armijo_c * delta:
                        accepted = True
                        break
                alpha *= cfg.backtrack_factor
            if accepted:
                break
        if not accepted:
            return BncgResult(x, f, "stalled", k - 1, history)

        x = x_t
        f_prev = f
        f, g = value_grad_fn(x)
        if post_accept is not None:
            revised = post_accept(x, f, g)
            if revised is not None:
                f, g = revised
        pg = projected_grad_norm(x, g)
        history.append(dict(iteration=k, value=f, pg_norm=pg, step=alpha))
        if on_accept is not None:
            on_accept(k, x, f, g, alpha)

        if pg <= grad_target:
            return BncgResult(x, f, "converged-grad", k, history)
        rel_drop = (f_prev - f) / max(abs(f), 1e-300)
        stall_count = stall_count + 1 if rel_drop <= cfg.obj_rtol else 0
        if stall_count >= cfg.obj_stall_window:
            return BncgResult(x, f, "converged-obj", k, history)

        g_red = reduced(g, x)
        if k % cfg.restart_period == 0:
            beta = 0.0
        else:
            denom = float(np.dot(g_red_prev, g_red_prev))
            beta = 0.0 if denom == 0.0 else max(
                0.0, float(np.dot(g_red, g_red - g_red_prev)) / denom)
        d = -g_red + beta * d
        g_red_prev = g_red
        alpha0 = alpha * cfg.step_growth

    return BncgResult(x, f, "maxiter", cfg.max_outer_iters, history)


def _record(iteration, mesh, design, breakdown, g2, g3, gs, step):
    f2, f3 = functional.volume_fractions(mesh, design)
    return IterateRecord(
        iteration=iteration,
        breakdown=breakdown,
        grad_norm_design=_norm(np.concatenate([g2, g3])),
        grad_norm_stimulus=_norm(gs.ravel()),
        step=step,
        vol_frac2=f2,
        vol_frac3=f3,
    )


def run_monolithic(mesh, phases, params, targets, cfg,
                   design0=None, stimulus0=None, fixed_dofs=None,
                   solver_tol=1e-10, on_iterate=None):
    """Joint BNCG over the concatenated (rho2, rho3, s_1..s_n) variable."""
    n_cases = len(np.asarray(targets))
    nn = mesh.n_nodes
    design0 = design0 or DesignField.constant(nn, 0.3, 0.3)
    stimulus0 = stimulus0 or StimulusField.zeros(n_cases, nn)

    def unpack(z):
        design = DesignField(z[:nn].copy(), z[nn:2 * nn].copy())
        stim = StimulusField(z[2 * nn:].reshape(n_cases, nn).copy())
        return design, stim

    cache = {}

    def value_fn(z):
        design, stim = unpack(z)
        state = solve_state(mesh, design, phases, stim,
                            fixed_dofs=fixed_dofs, tol=solver_tol)
        return functional.total(mesh, design, stim, state.u, targets, params).total

    def value_grad_fn(z):
        design, stim = unpack(z)
        breakdown, grad, state, lambdas = sensitivity.reduced_gradient(
            mesh, design, stim, phases, params, targets,
            fixed_dofs=fixed_dofs, tol=solver_tol)
        cache["aux"] = (design, stim, breakdown, grad)
        g = np.concatenate([grad.g_rho2, grad.g_rho3, grad.g_s.ravel()])
        return breakdown.total, g

    history = []

    def on_accept(k, z, f, g, step):
        design, stim, breakdown, grad = cache["aux"]
        rec = _record(k, mesh, design, breakdown,
                      grad.g_rho2, grad.g_rho3, grad.g_s, step)
        history.append(rec)
        if on_iterate is not None:
            on_iterate(rec, design, stim)

    z0 = np.concatenate([design0.rho2, design0.rho3, stimulus0.s.ravel()])
    lower = np.concatenate([np.zeros(2 * nn), -np.ones(n_cases * nn)])
    upper = np.ones(2 * nn + n_cases * nn)
    result = bncg_minimize(value_fn, value_grad_fn, z0, lower, upper, cfg,
                           on_accept=on_accept)
    design, stim = unpack(result.x)
    return project_design(design), project_stimulus(stim), history, result


def run_staggered(mesh, phases, params, targets, cfg,
                  design0=None, stimulus0=None, fixed_dofs=None,
                  solver_tol=1e-10, on_iterate=None, stimulus_mode="nodal"):
    """Outer BNCG over the densities with exact inner stimulus minimization.

    The stimulus is frozen during each line search.  At every accepted
    design the state and adjoint are refreshed, the closed-form update is
    applied, and the candidate stimulus is committed only if it lowers the
    true objective; the returned gradient is then evaluated at the
    committed stimulus.
    """
    n_cases = len(np.asarray(targets))
    nn = mesh.n_nodes
    design0 = design0 or DesignField.constant(nn, 0.3, 0.3)
    current = {"stim": stimulus0 or StimulusField.zeros(n_cases, nn)}
    cache = {}

    def unpack(z):
        return DesignField(z[:nn].copy(), z[nn:].copy())

    def evaluate(design, stim):
        state = solve_state(mesh, design, phases, stim,
                            fixed_dofs=fixed_dofs, tol=solver_tol)
        breakdown = functional.total(mesh, design, stim, state.u, targets, params)
        return state, breakdown

    def value_fn(z):
        _, breakdown = evaluate(unpack(z), current["stim"])
        return breakdown.total

    def grad_at(design, stim, state):
        lambdas = solve_adjoint(mesh, design, phases, state, targets,
                                tol=solver_tol)
        g2, g3 = sensitivity.grad_design(mesh, design, stim, state, lambdas,
                                         phases, params, targets)
        gs = sensitivity.grad_stimulus(mesh, design, stim, lambdas, phases, params)
        return lambdas, g2, g3, gs

    def value_grad_fn(z):
        design = unpack(z)
        stim = current["stim"]
        state, breakdown = evaluate(design, stim)
        lambdas, g2, g3, gs = grad_at(design, stim, state)
        cache["aux"] = (design, stim, breakdown, g2, g3, gs, state, lambdas)
        return breakdown.total, np.concatenate([g2, g3])

    def post_accept(z, f, g):
        design, stim, breakdown, g2, g3, gs, state, lambdas = cache["aux"]
        candidate = minimize_stimulus_field(mesh, design, lambdas, phases,
                                            mode=stimulus_mode)
        new_state, new_breakdown = evaluate(design, candidate)
        if new_breakdown.total <= breakdown.total:
            current["stim"] = candidate
            lambdas, g2, g3, gs = grad_at(design, candidate, new_state)
            cache["aux"] = (design, candidate, new_breakdown, g2, g3, gs,
                            new_state, lambdas)
            return new_breakdown.total, np.concatenate([g2, g3])
        return None

    history = []

    def on_accept(k, z, f, g, step):
        design, stim, breakdown, g2, g3, gs, _, _ = cache["aux"]
        rec = _record(k, mesh, design, breakdown, g2, g3, gs, step)
        history.append(rec)
        if on_iterate is not None:
            on_iterate(rec, design, stim)

    z0 = np.concatenate([design0.rho2, design0.rho3])
    lower = np.zeros(2 * nn)
    upper = np.ones(2 * nn)
    result = bncg_minimize(value_fn, value_grad_fn, z0, lower, upper, cfg,
                           on_accept=on_accept, post_accept=post_accept)
    design = unpack(result.x)
    return project_design(design), current["stim"].copy(), history, result
