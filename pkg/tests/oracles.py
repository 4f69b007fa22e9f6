"""Closed-form oracles shared by the tests, written independently of the package."""
import cmath
import math

import numpy as np
from scipy.optimize import brentq


def well_bound_state(depth=2.0, width=1.0):
    """Neumann eigenvalue of -depth on [0, width]: omega tan(omega width) = sqrt(depth - omega^2)."""
    f = lambda w: w * math.tan(w * width) - math.sqrt(depth - w * w)
    w = brentq(f, 1e-9, min(math.sqrt(depth), math.pi / (2 * width)) - 1e-12, xtol=1e-15)
    return w * w - depth


def well_jost_zero(depth=2.0, width=1.0):
    """lambda = -kappa^2 < 0 where the Jost solution decays beyond the well."""

    def f(kappa):
        k = math.sqrt(depth - kappa * kappa)
        val = math.cos(k * width) + kappa / k * math.sin(k * width)
        der = -k * math.sin(k * width) + kappa * math.cos(k * width)
        return der + kappa * val

    kappa = brentq(f, 1e-6, math.sqrt(depth) - 1e-9, xtol=1e-15)
    return -kappa * kappa


def well_scattering(lam, depth=2.0, width=1.0, offset=1.0):
    """A, B, P, S of the scalar well, matched at m = width + offset."""
    s = cmath.sqrt(lam) if lam > 0 else 1j * math.sqrt(-lam)
    w = cmath.sqrt(lam + depth)
    m = width + offset
    u = (cmath.cos(w * width), -w * cmath.sin(w * width))
    j = (cmath.cos(w * width) - 1j * s / w * cmath.sin(w * width),
         -w * cmath.sin(w * width) - 1j * s * cmath.cos(w * width))

    def coeffs(d):
        # free propagation from width to m, then split into e^{+isx} and e^{-isx}
        val = d[0] * cmath.cos(s * offset) + d[1] * cmath.sin(s * offset) / s
        der = -s * d[0] * cmath.sin(s * offset) + d[1] * cmath.cos(s * offset)
        cp = (val + der / (1j * s)) * cmath.exp(-1j * s * m) / 2
        cm = (val - der / (1j * s)) * cmath.exp(1j * s * m) / 2
        return cp, cm

    A, B = coeffs(u)
    P, S = coeffs(j)
    return A, B, P, S


def well_density(lam, depth=2.0, width=1.0):
    B = well_scattering(lam, depth, width)[1]
    return 1.0 / (4 * math.pi * math.sqrt(lam) * abs(B) ** 2)


def free_density(lam, n=1):
    return np.eye(n) / (math.pi * math.sqrt(lam))
