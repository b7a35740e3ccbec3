"""Nodal field containers and projection utilities.

Design and stimulus fields are nodal P1 coefficient arrays; displacements
and adjoints are (n_nodes, 2) arrays.  Target displacements are one
2-vector per load case (a per-node (n_nodes, 2) array is also accepted).
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError


@dataclass
class DesignField:
    """Nodal densities of the passive (rho2) and responsive (rho3) phases."""

    rho2: np.ndarray
    rho3: np.ndarray

    def __post_init__(self):
        self.rho2 = np.asarray(self.rho2, dtype=float)
        self.rho3 = np.asarray(self.rho3, dtype=float)
        if self.rho2.shape != self.rho3.shape or self.rho2.ndim != 1:
            raise InvalidParameterError("rho2 and rho3 must be 1d arrays of equal length")

    @property
    def n_nodes(self):
        return len(self.rho2)

    def rho1(self):
        """Implicit void density 1 - rho2 - rho3 (may dip into [-1, 0))."""
        return 1.0 - self.rho2 - self.rho3

    def copy(self):
        return DesignField(self.rho2.copy(), self.rho3.copy())

    @classmethod
    def constant(cls, n_nodes, rho2, rho3):
        return cls(np.full(n_nodes, float(rho2)), np.full(n_nodes, float(rho3)))


@dataclass
class StimulusField:
    """One nodal stimulus array per load case, shape (n_cases, n_nodes)."""

    s: np.ndarray

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=float)
        if self.s.ndim == 1:
            self.s = self.s[None, :]
        if self.s.ndim != 2:
            raise InvalidParameterError("stimulus must be (n_cases, n_nodes)")

    @property
    def n_cases(self):
        return self.s.shape[0]

    @property
    def n_nodes(self):
        return self.s.shape[1]

    def copy(self):
        return StimulusField(self.s.copy())

    @classmethod
    def zeros(cls, n_cases, n_nodes):
        return cls(np.zeros((n_cases, n_nodes)))


def project_design(design):
    """Clamp both densities to [0, 1]; idempotent."""
    return DesignField(np.clip(design.rho2, 0.0, 1.0),
                       np.clip(design.rho3, 0.0, 1.0))


def project_stimulus(stimulus):
    """Clamp every stimulus to [-1, 1]; idempotent."""
    return StimulusField(np.clip(stimulus.s, -1.0, 1.0))


def check_nodal(mesh, array, name="field"):
    """Raise unless ``array``'s leading nodal axis matches the mesh."""
    arr = np.asarray(array)
    if arr.shape[0] != mesh.n_nodes:
        raise InvalidParameterError(
            f"{name} has {arr.shape[0]} entries for a {mesh.n_nodes}-node mesh")
    return arr


def nodal_average_from_elements(mesh, element_values):
    """Area-weighted average of per-triangle values onto the nodes."""
    vals = np.asarray(element_values, dtype=float)
    if vals.shape != (mesh.n_triangles,):
        raise InvalidParameterError("element_values must have one entry per triangle")
    num = np.zeros(mesh.n_nodes)
    den = np.zeros(mesh.n_nodes)
    w = np.repeat(mesh.areas, 3)
    np.add.at(num, mesh.triangles.ravel(), w * np.repeat(vals, 3))
    np.add.at(den, mesh.triangles.ravel(), w)
    return num / den


def target_values(targets, j, n_nodes):
    """Target displacement of case ``j`` broadcast against nodal shape.

    ``targets`` is an (n, 2) array of constants or an (n, n_nodes, 2)
    nodal array; returns something subtractable from a (n_nodes, 2) field.
    """
    t = np.asarray(targets, dtype=float)
    if t.ndim == 2 and t.shape[1] == 2:
        return t[j]
    if t.ndim == 3 and t.shape[1:] == (n_nodes, 2):
        return t[j]
    raise InvalidParameterError("targets must be (n, 2) or (n, n_nodes, 2)")
