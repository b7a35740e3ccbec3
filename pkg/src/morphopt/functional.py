"""Every term of the total objective and the multi-well perimeter energy.

total = tracking + alpha * perimeter + volume_penalty + q_weight * stimulus_penalty

Quadrature choices (all exact for their integrands):
  tracking        closed-form P1 mass integration on target elements
  multi-well term 6-point degree-4 rule (quartic per element)
  gradient term   piecewise-constant gradients, integrated exactly
  volume penalty  nodal lumping (linear integrand, exact)
  stimulus term   6-point degree-4 rule (quartic per element)
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .errors import InvalidParameterError
from .fields import check_nodal, target_values


@dataclass(frozen=True)
class RegularizationParams:
    """Phase-field length, perimeter weight, and penalty factors."""

    epsilon: float
    alpha: float
    nu2: float
    nu3: float
    q_weight: float = 1.0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise InvalidParameterError(f"epsilon must be positive, got {self.epsilon}")
        if self.alpha <= 0:
            raise InvalidParameterError(f"alpha must be positive, got {self.alpha}")
        if self.nu2 < 0 or self.nu3 < 0:
            raise InvalidParameterError("volume penalty factors must be >= 0")
        if self.q_weight < 0:
            raise InvalidParameterError("q_weight must be >= 0")

    def warn_if_unresolved(self, cell_size):
        if self.epsilon < cell_size:
            warnings.warn(
                f"epsilon = {self.epsilon} is below the cell size {cell_size}; "
                "the diffuse interface is unresolved", RuntimeWarning)


@dataclass(frozen=True)
class ObjectiveBreakdown:
    tracking: float
    perimeter: float
    volume_penalty: float
    stimulus_penalty: float
    alpha: float
    q_weight: float
    total: float

    @classmethod
    def combine(cls, tracking, perimeter, volume_penalty, stimulus_penalty,
                alpha, q_weight):
        total = (tracking + alpha * perimeter + volume_penalty
                 + q_weight * stimulus_penalty)
        return cls(tracking, perimeter, volume_penalty, stimulus_penalty,
                   alpha, q_weight, total)


def tracking(mesh, state_u, targets):
    """sum_j (1/2) int_{target} |u_j - ubar_j|^2, exact P1 mass quadrature.

    For a P1 misfit w the element integral is
    (A/6) * (w1.w1 + w2.w2 + w3.w3 + w1.w2 + w2.w3 + w1.w3).
    """
    te = mesh.target_elements
    if len(te) == 0:
        return 0.0
    tri = mesh.triangles[te]
    a = mesh.areas[te]
    value = 0.0
    for j, u_j in enumerate(state_u):
        u_j = check_nodal(mesh, u_j, "displacement")
        w = u_j - target_values(targets, j, mesh.n_nodes)
        we = w[tri]
        dots = np.einsum("max,mbx->mab", we, we)
        diag = np.trace(dots, axis1=1, axis2=2)
        off = 0.5 * (dots.sum(axis=(1, 2)) - diag)
        value += 0.5 * float(np.sum(a / 6.0 * (diag + off)))
    return value


def multiwell(rho1, rho2, rho3):
    """W(rho) = sum_i rho_i^2 (1 - rho_i)^2; zero only at simplex vertices."""
    total = 0.0
    for r in (rho1, rho2, rho3):
        r = np.asarray(r, dtype=float)
        total = total + r * r * (1.0 - r) ** 2
    return total


def multiwell_derivative(rho):
    """W'(t) = 2 t (1 - t)(1 - 2t) applied componentwise."""
    r = np.asarray(rho, dtype=float)
    return 2.0 * r * (1.0 - r) * (1.0 - 2.0 * r)


def perimeter_terms(mesh, design):
    """The two epsilon-free integrals of the perimeter energy.

    Returns (well_integral, gradient_integral) with
    perimeter = well_integral / eps + eps * gradient_integral.
    """
    check_nodal(mesh, design.rho2, "rho2")
    rule = quadrature.TRI_DEG4
    r2q = quadrature.at_quadrature_points(design.rho2, mesh.triangles, rule)
    r3q = quadrature.at_quadrature_points(design.rho3, mesh.triangles, rule)
    wq = multiwell(1.0 - r2q - r3q, r2q, r3q)
    well = float(np.sum((wq @ rule.weights) * mesh.areas))

    g2 = np.einsum("ma,mad->md", design.rho2[mesh.triangles], mesh.grads)
    g3 = np.einsum("ma,mad->md", design.rho3[mesh.triangles], mesh.grads)
    g1 = -g2 - g3
    sq = np.einsum("md,md->m", g1, g1) + np.einsum("md,md->m", g2, g2) \
        + np.einsum("md,md->m", g3, g3)
    grad = float(np.sum(sq * mesh.areas))
    return well, grad


def perimeter_energy(mesh, design, epsilon):
    """Multi-well phase-field perimeter  int W(rho)/eps + eps |D rho|^2."""
    if epsilon <= 0:
        raise InvalidParameterError(f"epsilon must be positive, got {epsilon}")
    well, grad = perimeter_terms(mesh, design)
    return well / epsilon + epsilon * grad


def volume_penalty(mesh, design, nu2, nu3):
    """nu2 int rho2 + nu3 int rho3, exact for P1 densities."""
    lumped = mesh.lumped_node_areas()
    return float(nu2 * np.dot(lumped, design.rho2)
                 + nu3 * np.dot(lumped, design.rho3))


def volume_fractions(mesh, design):
    """Achieved volume fractions (int rho2 / |domain|, int rho3 / |domain|)."""
    lumped = mesh.lumped_node_areas()
    area = mesh.area
    return (float(np.dot(lumped, design.rho2)) / area,
            float(np.dot(lumped, design.rho3)) / area)


def stimulus_penalty(mesh, design, stimulus):
    """int ((1 - rho2 - rho3)^2 + rho2^2) sum_j s_j^2."""
    check_nodal(mesh, stimulus.s.T, "stimulus")
    rule = quadrature.TRI_DEG4
    r2q = quadrature.at_quadrature_points(design.rho2, mesh.triangles, rule)
    r3q = quadrature.at_quadrature_points(design.rho3, mesh.triangles, rule)
    bq = (1.0 - r2q - r3q) ** 2 + r2q ** 2
    s2 = np.zeros_like(r2q)
    for j in range(stimulus.n_cases):
        sq = quadrature.at_quadrature_points(stimulus.s[j], mesh.triangles, rule)
        s2 += sq * sq
    return float(np.sum(((bq * s2) @ rule.weights) * mesh.areas))


def total(mesh, design, stimulus, state_u, targets, params):
    """Full objective breakdown at given fields."""
    return ObjectiveBreakdown.combine(
        tracking=tracking(mesh, state_u, targets),
        perimeter=perimeter_energy(mesh, design, params.epsilon),
        volume_penalty=volume_penalty(mesh, design, params.nu2, params.nu3),
        stimulus_penalty=stimulus_penalty(mesh, design, stimulus),
        alpha=params.alpha,
        q_weight=params.q_weight,
    )
