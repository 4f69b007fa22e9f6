# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled propagation kernel; same algorithm and signature as _pykernels."""
import numpy as np

from libc.math cimport exp, pow, sqrt, fabs

from .errors import StiffnessError

DEF K_BOX = 0
DEF K_GAUSS = 1
DEF K_SMOOTH = 2
DEF K_PP = 3
DEF K_EXP = 4
DEF K_POWER = 5

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 10.0


cdef class _Pot:
    cdef int n, T
    cdef const int[::1] kind
    cdef const int[::1] pp_off
    cdef const int[::1] pp_cnt
    cdef const double[::1] lo
    cdef const double[::1] hi
    cdef const double[::1] pp_brk
    cdef const double[:, ::1] par
    cdef const double[:, ::1] pp_coef
    cdef const double[:, :, ::1] mats
    cdef int ncoef


cdef inline double _profile(_Pot P, int t, double x) noexcept:
    cdef int k = P.kind[t]
    cdef double u, w, s, acc
    cdef int off, cnt, a, b, m, j, c
    if k == K_BOX:
        return 1.0
    if k == K_GAUSS:
        u = (x - P.par[t, 0]) / P.par[t, 1]
        return exp(-u * u)
    if k == K_SMOOTH:
        u = (x - P.par[t, 0]) / P.par[t, 1]
        w = 1.0 - u * u
        if w > 0.0:
            return exp(1.0 - 1.0 / w)
        return 0.0
    if k == K_EXP:
        return exp(-P.par[t, 0] * (x - P.lo[t]))
    if k == K_POWER:
        return pow(1.0 + x - P.lo[t], -P.par[t, 0])
    off = P.pp_off[t]
    cnt = P.pp_cnt[t]
    # last piece whose left end is <= x
    a = 0
    b = cnt
    while b - a > 1:
        m = (a + b) >> 1
        if P.pp_brk[off + m] <= x:
            a = m
        else:
            b = m
    j = off + a
    s = x - P.pp_brk[j]
    acc = 0.0
    for c in range(P.ncoef - 1, -1, -1):
        acc = acc * s + P.pp_coef[j, c]
    return acc


cdef inline void _eval_v(_Pot P, double xm, double x, double[:, ::1] V) noexcept:
    cdef int n = P.n
    cdef int t, i, j
    cdef double f
    for i in range(n):
        for j in range(n):
            V[i, j] = 0.0
    for t in range(P.T):
        if P.lo[t] <= xm and xm <= P.hi[t]:
            f = _profile(P, t, x)
            if f != 0.0:
                for i in range(n):
                    for j in range(n):
                        V[i, j] += f * P.mats[t, i, j]


cdef inline void _rhs(_Pot P, double xm, double x, double complex[:, ::1] Y,
                      double complex[:, :, ::1] K, int dst, double[:, ::1] V,
                      double complex shift, double complex tis, int ncol) noexcept:
    cdef int n = P.n
    cdef int i, j, c
    cdef double complex acc
    _eval_v(P, xm, x, V)
    for i in range(n):
        for c in range(ncol):
            K[dst, i, c] = Y[n + i, c]
            acc = tis * Y[n + i, c] + shift * Y[i, c]
            for j in range(n):
                acc = acc + V[i, j] * Y[j, c]
            K[dst, n + i, c] = acc


cdef inline double _cabs(double complex z) noexcept:
    return sqrt(z.real * z.real + z.imag * z.imag)


def propagate(kind, lo, hi, par, mats, pp_off, pp_cnt, pp_brk, pp_coef, breaks,
              lam, sigma, double x0, xs, Y0, double rtol, double atol, double hmax,
              A, B, C, E3, E5):
    """Return (Y at each point of xs, accepted steps, rejected steps)."""
    cdef _Pot P = _Pot()
    P.kind = np.ascontiguousarray(kind, dtype=np.int32)
    P.pp_off = np.ascontiguousarray(pp_off, dtype=np.int32)
    P.pp_cnt = np.ascontiguousarray(pp_cnt, dtype=np.int32)
    P.lo = np.ascontiguousarray(lo, dtype=np.float64)
    P.hi = np.ascontiguousarray(hi, dtype=np.float64)
    P.pp_brk = np.ascontiguousarray(pp_brk, dtype=np.float64)
    P.par = np.ascontiguousarray(par, dtype=np.float64)
    P.pp_coef = np.ascontiguousarray(pp_coef, dtype=np.float64)
    P.mats = np.ascontiguousarray(mats, dtype=np.float64)
    P.T = len(kind)
    P.n = mats.shape[1]
    P.ncoef = pp_coef.shape[1]

    cdef int n = P.n
    cdef int n2 = 2 * n
    cdef double complex[:, ::1] Y = np.array(Y0, dtype=np.complex128, order="C")
    cdef int ncol = Y.shape[1]
    cdef double complex lamc = complex(lam)
    cdef double complex sig = complex(sigma)
    cdef double complex shift = sig * sig - lamc
    cdef double complex tis = 2j * sig
    cdef const double[:, ::1] Am = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[::1] Bm = np.ascontiguousarray(B, dtype=np.float64)
    cdef const double[::1] Cm = np.ascontiguousarray(C, dtype=np.float64)
    cdef const double[::1] E3m = np.ascontiguousarray(E3, dtype=np.float64)
    cdef const double[::1] E5m = np.ascontiguousarray(E5, dtype=np.float64)
    cdef int nst = Bm.shape[0]
    cdef double complex[:, :, ::1] K = np.empty((nst + 1, n2, ncol), dtype=np.complex128)
    cdef double complex[:, ::1] Yt = np.empty((n2, ncol), dtype=np.complex128)
    cdef double complex[:, ::1] Yn = np.empty((n2, ncol), dtype=np.complex128)
    cdef double[:, ::1] V = np.empty((n, n), dtype=np.float64)
    cdef double[::1] scale = np.empty(ncol, dtype=np.float64)
    xs_arr = np.asarray(xs, dtype=np.float64)
    out_np = np.empty((len(xs_arr), n2, ncol), dtype=np.complex128)
    cdef double complex[:, :, ::1] out = out_np
    cdef long nsteps = 0, nrej = 0
    cdef double x = x0
    cdef double xt, xe, xm, h, hs, remaining, xnew, err, n5, n3, fac, direction, cm, a1, a2
    cdef double complex acc, e5, e3
    cdef int io, s, j, i, c, last, ok
    cdef int ndof = n2 * ncol
    brk = [float(b) for b in breaks]

    for io in range(xs_arr.shape[0]):
        xt = xs_arr[io]
        if xt == x:
            out[io, :, :] = Y
            continue
        direction = 1.0 if xt > x else -1.0
        lo_, hi_ = (x, xt) if direction > 0 else (xt, x)
        inner = sorted([b for b in brk if lo_ < b < hi_], reverse=direction < 0)
        inner.append(xt)
        for xe in inner:
            xm = 0.5 * (x + xe)
            h = min(hmax, fabs(xe - x))
            _rhs(P, xm, x, Y, K, 0, V, shift, tis, ncol)
            while direction * (xe - x) > 0:
                remaining = fabs(xe - x)
                last = h >= remaining * (1.0 - 1e-12)
                if last:
                    h = remaining
                hs = direction * h
                for s in range(1, nst):
                    for i in range(n2):
                        for c in range(ncol):
                            acc = 0.0
                            for j in range(s):
                                acc = acc + Am[s, j] * K[j, i, c]
                            Yt[i, c] = Y[i, c] + hs * acc
                    _rhs(P, xm, x + Cm[s] * hs, Yt, K, s, V, shift, tis, ncol)
                ok = 1
                for i in range(n2):
                    for c in range(ncol):
                        acc = 0.0
                        for j in range(nst):
                            acc = acc + Bm[j] * K[j, i, c]
                        Yn[i, c] = Y[i, c] + hs * acc
                        if not (fabs(Yn[i, c].real) < 1e308 and fabs(Yn[i, c].imag) < 1e308):
                            ok = 0
                xnew = xe if last else x + hs
                _rhs(P, xm, xnew, Yn, K, nst, V, shift, tis, ncol)
                for c in range(ncol):
                    cm = 0.0
                    for i in range(n2):
                        a1 = _cabs(Y[i, c])
                        a2 = _cabs(Yn[i, c])
                        if a1 > cm:
                            cm = a1
                        if a2 > cm:
                            cm = a2
                    scale[c] = atol + rtol * cm
                n5 = 0.0
                n3 = 0.0
                for i in range(n2):
                    for c in range(ncol):
                        e5 = 0.0
                        e3 = 0.0
                        for j in range(nst + 1):
                            e5 = e5 + E5m[j] * K[j, i, c]
                            e3 = e3 + E3m[j] * K[j, i, c]
                        a1 = _cabs(e5) / scale[c]
                        a2 = _cabs(e3) / scale[c]
                        n5 += a1 * a1
                        n3 += a2 * a2
                if n5 == 0.0 and n3 == 0.0:
                    err = 0.0
                else:
                    err = h * n5 / sqrt((n5 + 0.01 * n3) * ndof)
                if ok and err <= 1.0:
                    Y[:, :] = Yn
                    x = xnew
                    K[0, :, :] = K[nst, :, :]
                    nsteps += 1
                    if err == 0.0:
                        fac = MAX_FACTOR
                    else:
                        fac = min(MAX_FACTOR, SAFETY * pow(err, -0.125))
                    h = min(hmax, h * fac)
                else:
                    nrej += 1
                    if ok and err == err:
                        fac = max(MIN_FACTOR, SAFETY * pow(err, -0.125))
                    else:
                        fac = MIN_FACTOR
                    h *= fac
                    if h < 1e-14 * (1.0 + fabs(x)):
                        raise StiffnessError(x)
            x = xe
        out[io, :, :] = Y
    return out_np, nsteps, nrej
