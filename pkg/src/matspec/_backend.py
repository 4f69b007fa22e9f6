"""Select the propagation kernel: compiled if importable, else pure Python.

Set ``MATSPEC_BACKEND=python`` to force the fallback.
"""
import os

import numpy as np
from scipy.integrate._ivp import dop853_coefficients as _dop

from . import _pykernels

NAME = "python"
_kernel = _pykernels.propagate

if os.environ.get("MATSPEC_BACKEND", "").lower() != "python":
    try:
        from . import _kernels

        _kernel = _kernels.propagate
        NAME = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        pass

_NST = _dop.N_STAGES
TABLEAU = (
    np.ascontiguousarray(_dop.A[:_NST, :_NST], dtype=float),
    np.ascontiguousarray(_dop.B, dtype=float),
    np.ascontiguousarray(_dop.C[:_NST], dtype=float),
    np.ascontiguousarray(_dop.E3, dtype=float),
    np.ascontiguousarray(_dop.E5, dtype=float),
)


def available() -> dict:
    """Map backend name to kernel function for every importable backend."""
    out = {"python": _pykernels.propagate}
    try:
        from . import _kernels

        out["cython"] = _kernels.propagate
    except ImportError:  # pragma: no cover
        pass
    return out


def run(packed, lam, sigma, x0, xs, Y0, rtol, atol, hmax, kernel=None):
    """Call a kernel on a PackedPotential; returns (states, nsteps, nrej)."""
    k = kernel or _kernel
    A, B, C, E3, E5 = TABLEAU
    return k(
        packed.kind, packed.lo, packed.hi, packed.par, packed.mats,
        packed.pp_off, packed.pp_cnt, packed.pp_brk, packed.pp_coef,
        packed.breaks, complex(lam), complex(sigma), float(x0),
        np.asarray(xs, dtype=float), np.asarray(Y0, dtype=complex),
        float(rtol), float(atol), float(hmax), A, B, C, E3, E5,
    )
