"""Adjoint gradients of the reduced objective.

The gradients returned here are the exact derivatives of the discretized
objective with respect to the nodal coefficients (discretize-then-
differentiate): every quadrature rule used by the assembly is
differentiated consistently, so central finite differences on
:func:`reduced_objective` agree to the float rounding floor.

Design sensitivity (direction phi restricted to nodal hat functions,
with the void chain rule phi1 = -phi2 - phi3):

  alpha * dP_eps + (nu2 phi2 + nu3 phi3)
  + sum_j sum_i a'(rho_i) C_i (e(u_j) - beta_i s_j I) : e(lambda_j) phi_i
  + dQ/drho . phi

Stimulus sensitivity per case j:

  - sum_i a(rho_i) beta_i C_i I : e(lambda_j) + dQ/ds_j

both with the multiplier convention K lambda_j = M0 (ubar_j - u_j).
"""

from dataclasses import dataclass

import numpy as np

from . import quadrature
from .elasticity import (element_strains, phase_densities, solve_adjoint,
                         solve_state)
from .fields import check_nodal
from .functional import multiwell_derivative, total
from .materials import interp, interp_derivative


@dataclass
class Gradient:
    g_rho2: np.ndarray
    g_rho3: np.ndarray
    g_s: np.ndarray  # (n_cases, n_nodes)


def _scatter(mesh, contrib, out):
    np.add.at(out, mesh.triangles.ravel(), contrib.ravel())


def perimeter_design_grad(mesh, design, epsilon):
    """Gradient of the perimeter energy (not yet weighted by alpha)."""
    rule = quadrature.TRI_DEG4
    tri = mesh.triangles
    r2q = quadrature.at_quadrature_points(design.rho2, tri, rule)
    r3q = quadrature.at_quadrature_points(design.rho3, tri, rule)
    w1 = multiwell_derivative(1.0 - r2q - r3q)
    w2 = multiwell_derivative(r2q)
    w3 = multiwell_derivative(r3q)
    aw = mesh.areas[:, None] / epsilon
    g2 = np.zeros(mesh.n_nodes)
    g3 = np.zeros(mesh.n_nodes)
    _scatter(mesh, (((w2 - w1) * rule.weights) @ rule.points) * aw, g2)
    _scatter(mesh, (((w3 - w1) * rule.weights) @ rule.points) * aw, g3)

    gr2 = np.einsum("ma,mad->md", design.rho2[tri], mesh.grads)
    gr3 = np.einsum("ma,mad->md", design.rho3[tri], mesh.grads)
    gr1 = -gr2 - gr3
    c = 2.0 * epsilon * mesh.areas
    _scatter(mesh, c[:, None] * np.einsum("md,mad->ma", gr2 - gr1, mesh.grads), g2)
    _scatter(mesh, c[:, None] * np.einsum("md,mad->ma", gr3 - gr1, mesh.grads), g3)
    return g2, g3


def q_design_grad(mesh, design, stimulus):
    """Gradient of the stimulus penalty with respect to the densities."""
    rule = quadrature.TRI_DEG4
    tri = mesh.triangles
    r2q = quadrature.at_quadrature_points(design.rho2, tri, rule)
    r3q = quadrature.at_quadrature_points(design.rho3, tri, rule)
    r1q = 1.0 - r2q - r3q
    s2 = np.zeros_like(r2q)
    for j in range(stimulus.n_cases):
        sq = quadrature.at_quadrature_points(stimulus.s[j], tri, rule)
        s2 += sq * sq
    aw = mesh.areas[:, None]
    g2 = np.zeros(mesh.n_nodes)
    g3 = np.zeros(mesh.n_nodes)
    _scatter(mesh, ((2.0 * (r2q - r1q) * s2 * rule.weights) @ rule.points) * aw, g2)
    _scatter(mesh, ((-2.0 * r1q * s2 * rule.weights) @ rule.points) * aw, g3)
    return g2, g3


def elasticity_design_grad(mesh, design, stimulus, state, lambdas, phases):
    """sum_j sum_i a'(rho_i) C_i (e(u_j) - beta_i s_j I) : e(lambda_j) phi_i."""
    mats = phases.as_tuple()
    tri = mesh.triangles
    rhos = phase_densities(design)
    r3 = quadrature.TRI_DEG2
    r6 = quadrature.TRI_DEG4
    da3 = [interp_derivative(quadrature.at_quadrature_points(r, tri, r3))
           for r in rhos]
    da6 = [interp_derivative(quadrature.at_quadrature_points(r, tri, r6))
           for r in rhos]
    # sign of phi_i in the chain rule phi1 = -phi2 - phi3
    sign2 = (-1.0, 1.0, 0.0)
    sign3 = (-1.0, 0.0, 1.0)

    g2 = np.zeros(mesh.n_nodes)
    g3 = np.zeros(mesh.n_nodes)
    for j, u_j in enumerate(state.u):
        eu = element_strains(mesh, u_j)
        el = element_strains(mesh, lambdas[j])
        inner = np.einsum("mxy,mxy->m", eu, el)
        tru = eu[:, 0, 0] + eu[:, 1, 1]
        trl = el[:, 0, 0] + el[:, 1, 1]
        sq6 = quadrature.at_quadrature_points(stimulus.s[j], tri, r6)
        for i, mat in enumerate(mats):
            cval = 2.0 * mat.lame_mu * inner + mat.lame_lambda * tru * trl
            stiff = (((da3[i] * r3.weights) @ r3.points)
                     * (mesh.areas * cval)[:, None])
            if sign2[i]:
                _scatter(mesh, sign2[i] * stiff, g2)
            if sign3[i]:
                _scatter(mesh, sign3[i] * stiff, g3)
            if mat.beta != 0.0:
                lval = mat.beta * 2.0 * mat.bulk * trl
                load = (((da6[i] * sq6 * r6.weights) @ r6.points)
                        * (mesh.areas * lval)[:, None])
                if sign2[i]:
                    _scatter(mesh, -sign2[i] * load, g2)
                if sign3[i]:
                    _scatter(mesh, -sign3[i] * load, g3)
    return g2, g3


def grad_design(mesh, design, stimulus, state, lambdas, phases, params, targets):
    """Full design gradient (g_rho2, g_rho3) of the reduced objective."""
    check_nodal(mesh, design.rho2, "rho2")
    p2, p3 = perimeter_design_grad(mesh, design, params.epsilon)
    q2, q3 = q_design_grad(mesh, design, stimulus)
    e2, e3 = elasticity_design_grad(mesh, design, stimulus, state, lambdas, phases)
    lumped = mesh.lumped_node_areas()
    g2 = params.alpha * p2 + params.nu2 * lumped + params.q_weight * q2 + e2
    g3 = params.alpha * p3 + params.nu3 * lumped + params.q_weight * q3 + e3
    return g2, g3


def grad_stimulus(mesh, design, stimulus, lambdas, phases, params=None):
    """Stimulus gradient, one nodal array per load case."""
    q_weight = 1.0 if params is None else params.q_weight
    mats = phases.as_tuple()
    tri = mesh.triangles
    rule = quadrature.TRI_DEG4
    rhos = phase_densities(design)
    a6 = [interp(quadrature.at_quadrature_points(r, tri, rule)) for r in rhos]
    r2q = quadrature.at_quadrature_points(design.rho2, tri, rule)
    r3q = quadrature.at_quadrature_points(design.rho3, tri, rule)
    bq = (1.0 - r2q - r3q) ** 2 + r2q ** 2

    out = np.zeros((stimulus.n_cases, mesh.n_nodes))
    for j in range(stimulus.n_cases):
        el = element_strains(mesh, lambdas[j])
        trl = el[:, 0, 0] + el[:, 1, 1]
        g = out[j]
        for i, mat in enumerate(mats):
            if mat.beta == 0.0:
                continue
            coef = mat.beta * 2.0 * mat.bulk * trl
            contrib = ((a6[i] * rule.weights) @ rule.points) \
                * (mesh.areas * coef)[:, None]
            _scatter(mesh, -contrib, g)
        sq = quadrature.at_quadrature_points(stimulus.s[j], tri, rule)
        qcontrib = ((2.0 * bq * sq * rule.weights) @ rule.points) \
            * mesh.areas[:, None]
        _scatter(mesh, q_weight * qcontrib, g)
    return out


def reduced_objective(mesh, design, stimulus, phases, params, targets,
                      fixed_dofs=None, tol=1e-10):
    """J(design, stimulus): solve the states and evaluate the objective."""
    state = solve_state(mesh, design, phases, stimulus,
                        fixed_dofs=fixed_dofs, tol=tol)
    return total(mesh, design, stimulus, state.u, targets, params).total


def reduced_gradient(mesh, design, stimulus, phases, params, targets,
                     fixed_dofs=None, tol=1e-10):
    """Objective breakdown plus the full gradient at (design, stimulus).

    Returns (breakdown, Gradient, state, lambdas).
    """
    state = solve_state(mesh, design, phases, stimulus,
                        fixed_dofs=fixed_dofs, tol=tol)
    lambdas = solve_adjoint(mesh, design, phases, state, targets, tol=tol)
    breakdown = total(mesh, design, stimulus, state.u, targets, params)
    g2, g3 = grad_design(mesh, design, stimulus, state, lambdas, phases,
                         params, targets)
    gs = grad_stimulus(mesh, design, stimulus, lambdas, phases, params)
    return breakdown, Gradient(g2, g3, gs), state, lambdas
