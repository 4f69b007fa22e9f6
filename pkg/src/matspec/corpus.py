"""Named test potentials shared by the test suite, the CLI report and benchmarks.

Two families:

* ``audit_corpus``: supports inside [0, 2], mixing boxes, exponential bumps,
  matrix couplings and spline data. Used for propagation and scattering
  identities.
* ``smooth_corpus``: truncated Gaussians that vanish to all orders at x = 0
  (centre at least seven widths from the origin), as the large-lambda
  expansion of ln det S requires. Used for invariants and trace identities.
"""
from __future__ import annotations

import numpy as np

from .potential import MatrixPotential, PotentialTerm, box, bump, combine, gaussian, zero_potential


def free(n: int = 1) -> MatrixPotential:
    return zero_potential(n)


def square_well() -> MatrixPotential:
    """Scalar -2 on [0, 1]."""
    return box(-2.0, 0.0, 1.0)


def square_well_block() -> MatrixPotential:
    """diag(-2 on [0, 1], 0)."""
    return box(np.diag([-2.0, 0.0]), 0.0, 1.0)


def barrier() -> MatrixPotential:
    """Scalar +1 on [0, pi/2]."""
    return box(1.0, 0.0, float(np.pi / 2))


def scalar_bump() -> MatrixPotential:
    return bump(-3.0, 0.2, 1.8)


def diagonal_pair() -> MatrixPotential:
    return combine([box(np.diag([-2.0, 0.0]), 0.0, 1.0), bump(np.diag([0.0, -2.5]), 0.5, 2.0)])


def rotated_pair() -> MatrixPotential:
    """Two terms with non-commuting matrices."""
    return combine([
        box(np.array([[-2.0, 1.0], [1.0, 0.0]]), 0.0, 1.0),
        bump(np.array([[0.5, 0.0], [0.0, -1.5]]), 0.5, 2.0),
    ])


def matrix_bump3() -> MatrixPotential:
    M = np.array([[-2.0, 0.5, 0.0], [0.5, -1.0, 0.3], [0.0, 0.3, 0.5]])
    return bump(M, 0.1, 1.9)


def grid_sampled() -> MatrixPotential:
    x = np.linspace(0.0, 2.0, 81)
    y = -1.5 * np.sin(np.pi * x / 2.0) ** 2
    return MatrixPotential(1, (PotentialTerm("grid_sampled", (0.0, 2.0), np.eye(1),
                                             {"x": x, "values": y, "order": 5}),))


def weak_pair() -> MatrixPotential:
    """diag(-0.5, -0.5) on [0, 1]; at gamma = 1/2 its moment sum exceeds int ||v|| but not 2 int ||v||."""
    return box(np.diag([-0.5, -0.5]), 0.0, 1.0)


def audit_corpus() -> dict[str, MatrixPotential]:
    return {
        "square_well": square_well(),
        "scalar_bump": scalar_bump(),
        "diagonal_pair": diagonal_pair(),
        "rotated_pair": rotated_pair(),
        "matrix_bump3": matrix_bump3(),
        "grid_sampled": grid_sampled(),
    }


def weak_bump() -> MatrixPotential:
    """Repulsive Gaussian; no bound states."""
    return gaussian(1.0, 4.0, 0.5)


def deep_well() -> MatrixPotential:
    """Attractive Gaussian with one bound state."""
    return gaussian(-3.0, 4.0, 0.6)


def double_bump() -> MatrixPotential:
    return combine([gaussian(0.8, 3.0, 0.4), gaussian(-1.5, 5.0, 0.7)])


def matrix_gaussians() -> MatrixPotential:
    return combine([
        gaussian(np.array([[1.0, 0.6], [0.6, -0.8]]), 3.5, 0.5),
        gaussian(np.array([[-0.5, 0.0], [0.0, 0.7]]), 4.5, 0.6),
    ])


def smooth_corpus() -> dict[str, MatrixPotential]:
    return {
        "weak_bump": weak_bump(),
        "deep_well": deep_well(),
        "double_bump": double_bump(),
        "matrix_gaussians": matrix_gaussians(),
    }


def slow_decay(M0=None) -> MatrixPotential:
    """(1 + x)^(-0.7) M0 on [0, inf); J_1 finite, not compactly supported."""
    M0 = np.array([[0.15]]) if M0 is None else np.atleast_2d(np.asarray(M0, float))
    return MatrixPotential(M0.shape[0], (PotentialTerm("power_law", (0.0, np.inf), M0, {"alpha": 0.7}),))
