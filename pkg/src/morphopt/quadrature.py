"""Gauss quadrature rules on the reference triangle.

Points are stored as barycentric coordinates, weights sum to one; an
integral over a physical triangle is ``area * sum_q w_q f(x_q)``.  For P1
fields the barycentric coordinates double as shape-function values at the
quadrature points.
"""

import numpy as np


class TriangleRule:
    """Quadrature rule: barycentric points (nq, 3) and weights (nq,)."""

    def __init__(self, points, weights, degree):
        self.points = np.asarray(points, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        self.degree = degree
        self.points.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def npoints(self):
        return len(self.weights)


# Edge-midpoint rule, exact for polynomials of degree 2.
TRI_DEG2 = TriangleRule(
    [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]],
    [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    degree=2,
)

# Six-point rule (Dunavant), exact for degree 4.
_A1, _W1 = 0.816847572980459, 0.109951743655322
_B1 = 0.091576213509771
_A2, _W2 = 0.108103018168070, 0.223381589678011
_B2 = 0.445948490915965
TRI_DEG4 = TriangleRule(
    [
        [_A1, _B1, _B1], [_B1, _A1, _B1], [_B1, _B1, _A1],
        [_A2, _B2, _B2], [_B2, _A2, _B2], [_B2, _B2, _A2],
    ],
    [_W1, _W1, _W1, _W2, _W2, _W2],
    degree=4,
)

# Seven-point rule, exact for degree 5; used only to cross-check exactness.
_C1, _V1 = 0.797426985353087, 0.125939180544827
_D1 = 0.101286507323456
_C2, _V2 = 0.059715871789770, 0.132394152788506
_D2 = 0.470142064105115
TRI_DEG5 = TriangleRule(
    [
        [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        [_C1, _D1, _D1], [_D1, _C1, _D1], [_D1, _D1, _C1],
        [_C2, _D2, _D2], [_D2, _C2, _D2], [_D2, _D2, _C2],
    ],
    [0.225, _V1, _V1, _V1, _V2, _V2, _V2],
    degree=5,
)


def at_quadrature_points(nodal, triangles, rule):
    """Evaluate a nodal P1 field at the rule's points on every triangle.

    Parameters
    ----------
    nodal : (n_nodes,) array
    triangles : (n_tri, 3) int array
    rule : TriangleRule

    Returns
    -------
    (n_tri, nq) array of field values.
    """
    vals = np.asarray(nodal)[triangles]          # (M, 3)
    return vals @ rule.points.T                  # (M, nq)


# 1D Gauss-Legendre on [0, 1], 3 points: exact for degree 5.
_G = np.sqrt(3.0 / 5.0)
GL3_POINTS = np.array([0.5 * (1.0 - _G), 0.5, 0.5 * (1.0 + _G)])
GL3_WEIGHTS = np.array([5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])
