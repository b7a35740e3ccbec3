"""Exact pointwise minimization of the objective over the stimulus.

With the state and adjoint frozen, the Lagrangian is pointwise quadratic
in each stimulus:  -c s + B s^2  with

  c = a(rho3) beta3 d kappa3 tr(e(lambda)),   B = (1 - rho2 - rho3)^2 + rho2^2,

so the box-constrained minimizer is clamp(c / 2B) when B > 0 and the
bang-bang sign rule when B = 0.  This is the inner step of the staggered
scheme.
"""

from dataclasses import dataclass

import numpy as np

from .elasticity import element_strains
from .errors import InvalidParameterError
from .fields import StimulusField, nodal_average_from_elements
from .materials import interp


@dataclass
class StimulusQuadratic:
    """Pointwise coefficients of  -c s + B s^2  (arrays of equal shape)."""

    c: np.ndarray
    B: np.ndarray


def optimal_stimulus_pointwise(quad):
    """Minimizer of -c s + B s^2 over [-1, 1], elementwise.

    B > 0: clamp(c / 2B); B = 0: sign(c) (0 when c = 0).  Matches the
    limiting cases: pure responsive points give s = sign(tr e(lambda)),
    points without responsive material give the penalty minimizer 0.
    """
    c = np.asarray(quad.c, dtype=float)
    B = np.asarray(quad.B, dtype=float)
    if np.any(B < 0):
        raise InvalidParameterError("quadratic coefficient B must be >= 0")
    scalar = c.ndim == 0
    c, B = np.atleast_1d(c), np.atleast_1d(B)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(B > 0.0, np.clip(c / (2.0 * B), -1.0, 1.0), np.sign(c))
    return float(s[0]) if scalar else s


def stimulus_coefficients(mesh, design, lam_j, phases, mode="nodal"):
    """Pointwise quadratic coefficients for one load case.

    tr(e(lambda)) is piecewise constant for P1; ``mode='nodal'`` recovers
    it at the nodes by area-weighted averaging (the default), while
    ``mode='element'`` averages the fully assembled element coefficient
    instead, for comparison.
    """
    if mode not in ("nodal", "element"):
        raise InvalidParameterError(f"unknown stimulus update mode {mode!r}")
    resp = phases.responsive
    el = element_strains(mesh, lam_j)
    tr_elem = el[:, 0, 0] + el[:, 1, 1]
    if mode == "nodal":
        tr = nodal_average_from_elements(mesh, tr_elem)
        c = interp(design.rho3) * resp.beta * 2.0 * resp.bulk * tr
        B = design.rho1() ** 2 + design.rho2 ** 2
    else:
        cent = mesh.triangles
        r2e = design.rho2[cent].mean(axis=1)
        r3e = design.rho3[cent].mean(axis=1)
        c_elem = interp(r3e) * resp.beta * 2.0 * resp.bulk * tr_elem
        b_elem = (1.0 - r2e - r3e) ** 2 + r2e ** 2
        c = nodal_average_from_elements(mesh, c_elem)
        B = nodal_average_from_elements(mesh, b_elem)
    return StimulusQuadratic(c, B)


def minimize_stimulus_field(mesh, design, lambdas, phases, mode="nodal"):
    """Closed-form stimulus minimizer, applied per load case and node."""
    s = np.empty((len(lambdas), mesh.n_nodes))
    for j, lam_j in enumerate(lambdas):
        quad = stimulus_coefficients(mesh, design, lam_j, phases, mode=mode)
        s[j] = optimal_stimulus_pointwise(quad)
    return StimulusField(s)
