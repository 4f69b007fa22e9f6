"""Pure-Python propagation kernel (fallback for the compiled ``_kernels``).

Integrates the frame-shifted matrix Schrodinger system

    Z'' = 2 i sigma Z' + (v(x) - lambda + sigma^2) Z,

whose sigma = 0 case is -psi'' + v psi = lambda psi, with the DOP853 embedded
pair. The state is the stacked (2n, k) array [Z; Z'].

The argument list is flat on purpose so that this module and the Cython
module expose the same signature.
"""
import math

import numpy as np

from .errors import StiffnessError

K_BOX, K_GAUSS, K_SMOOTH, K_PP, K_EXP, K_POWER = range(6)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0


def _profile(kind, lo, par, pp_off, pp_cnt, pp_brk, pp_coef, t, x):
    k = kind[t]
    if k == K_BOX:
        return 1.0
    if k == K_GAUSS:
        u = (x - par[t, 0]) / par[t, 1]
        return math.exp(-u * u)
    if k == K_SMOOTH:
        u = (x - par[t, 0]) / par[t, 1]
        w = 1.0 - u * u
        return math.exp(1.0 - 1.0 / w) if w > 0.0 else 0.0
    if k == K_EXP:
        return math.exp(-par[t, 0] * (x - lo[t]))
    if k == K_POWER:
        return (1.0 + x - lo[t]) ** (-par[t, 0])
    off = pp_off[t]
    cnt = pp_cnt[t]
    j = int(np.searchsorted(pp_brk[off:off + cnt], x, side="right")) - 1
    j = min(max(j, 0), cnt - 1)
    s = x - pp_brk[off + j]
    row = pp_coef[off + j]
    acc = 0.0
    for c in row[::-1]:
        acc = acc * s + c
    return acc


def propagate(kind, lo, hi, par, mats, pp_off, pp_cnt, pp_brk, pp_coef, breaks,
              lam, sigma, x0, xs, Y0, rtol, atol, hmax, A, B, C, E3, E5):
    """Return (Y at each point of xs, accepted steps, rejected steps)."""
    n = mats.shape[1]
    T = kind.shape[0]
    Y = np.array(Y0, dtype=complex)
    ncol = Y.shape[1]
    shift = sigma * sigma - lam
    two_i_sigma = 2j * sigma
    nst = B.shape[0]
    K = np.empty((nst + 1, 2 * n, ncol), dtype=complex)
    out = np.empty((len(xs), 2 * n, ncol), dtype=complex)
    nsteps = 0
    nrej = 0
    x = float(x0)
    ndof = Y.size

    def rhs(xm, xx, y, dst):
        V = np.zeros((n, n))
        for t in range(T):
            if lo[t] <= xm <= hi[t]:
                V += _profile(kind, lo, par, pp_off, pp_cnt, pp_brk, pp_coef, t, xx) * mats[t]
        U = y[:n]
        W = y[n:]
        dst[:n] = W
        dst[n:] = two_i_sigma * W + V @ U + shift * U

    for io, xt in enumerate(xs):
        direction = 1.0 if xt >= x else -1.0
        if xt == x:
            out[io] = Y
            continue
        inner = [b for b in breaks if min(x, xt) < b < max(x, xt)]
        stops = sorted(inner, reverse=direction < 0) + [xt]
        for xs_end in stops:
            xm = 0.5 * (x + xs_end)
            h = min(hmax, abs(xs_end - x))
            rhs(xm, x, Y, K[0])
            while direction * (xs_end - x) > 0:
                remaining = abs(xs_end - x)
                last = h >= remaining * (1.0 - 1e-12)
                if last:
                    h = remaining
                hs = direction * h
                for s in range(1, nst):
                    dy = np.tensordot(A[s, :s], K[:s], axes=1) * hs
                    rhs(xm, x + C[s] * hs, Y + dy, K[s])
                Ynew = Y + hs * np.tensordot(B, K[:nst], axes=1)
                xnew = xs_end if last else x + hs
                rhs(xm, xnew, Ynew, K[nst])
                colmax = np.maximum(np.abs(Y).max(axis=0), np.abs(Ynew).max(axis=0))
                scale = atol + rtol * colmax[None, :]
                e5 = np.tensordot(E5, K, axes=1) / scale
                e3 = np.tensordot(E3, K, axes=1) / scale
                n5 = float(np.sum(np.abs(e5) ** 2))
                n3 = float(np.sum(np.abs(e3) ** 2))
                if n5 == 0.0 and n3 == 0.0:
                    err = 0.0
                else:
                    err = h * n5 / math.sqrt((n5 + 0.01 * n3) * ndof)
                if err <= 1.0 and np.all(np.isfinite(Ynew)):
                    Y = Ynew
                    x = xnew
                    K[0] = K[nst]
                    nsteps += 1
                    fac = MAX_FACTOR if err == 0.0 else min(MAX_FACTOR, SAFETY * err ** (-1.0 / 8.0))
                    h = min(hmax, h * fac)
                else:
                    nrej += 1
                    fac = MIN_FACTOR if not math.isfinite(err) else max(MIN_FACTOR, SAFETY * err ** (-1.0 / 8.0))
                    h *= fac
                    if h < 1e-14 * (1.0 + abs(x)):
                        raise StiffnessError(x)
            x = xs_end
        out[io] = Y
    return out, nsteps, nrej
