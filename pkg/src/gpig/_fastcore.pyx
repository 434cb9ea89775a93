# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled float-mode core for the per-pair sub-game solve.

Mirrors the generic implementation in plinear/solver operation for
operation (same arithmetic, same order), so float results and operation
counts are bit-identical with the pure-Python fallback.
"""

from libc.stdlib cimport malloc, free

import numpy as np

cdef double FLOAT_TOL = 1e-12


cdef struct Counter:
    long merges
    long scans
    long evals


cdef inline double _max3(double a, double b, double c) nogil:
    if b > a:
        a = b
    if c > a:
        a = c
    return a


cdef inline bint _collinear(double x1, double v1, double x2, double v2,
                            double x3, double v3) nogil:
    cdef double s12 = (v2 - v1) / (x2 - x1)
    cdef double s23 = (v3 - v2) / (x3 - x2)
    cdef double d = s12 - s23
    if d < 0:
        d = -d
    cdef double a1 = s12 if s12 >= 0 else -s12
    cdef double a2 = s23 if s23 >= 0 else -s23
    return d <= FLOAT_TOL * _max3(1.0, a1, a2)


cdef int _coalesce(double* xs, double* vs, int m) nogil:
    """In-place removal of interior collinear points; returns new length."""
    cdef int out = 1, i
    for i in range(1, m):
        xs[out] = xs[i]
        vs[out] = vs[i]
        out += 1
        while out >= 3 and _collinear(xs[out - 3], vs[out - 3],
                                      xs[out - 2], vs[out - 2],
                                      xs[out - 1], vs[out - 1]):
            xs[out - 2] = xs[out - 1]
            vs[out - 2] = vs[out - 1]
            out -= 1
    return out


cdef double _eval(double* xs, double* vs, int m, double y) nogil:
    """Binary-search segment lookup plus interpolation (bisect_right)."""
    cdef int lo = 0, hi = m, mid, k
    while lo < hi:
        mid = (lo + hi) // 2
        if y < xs[mid]:
            hi = mid
        else:
            lo = mid + 1
    k = lo - 1
    if k >= m - 1:
        return vs[m - 1]
    if y == xs[k]:
        return vs[k]
    return vs[k] + (y - xs[k]) * (vs[k + 1] - vs[k]) / (xs[k + 1] - xs[k])


cdef int _build_side(double* probs, int n, int aa, double* consts,
                     double* pi, double* lineA, double* lineB,
                     double* hullA, double* hullB, double* hullY,
                     double* outx, double* outv, Counter* cnt) nogil:
    """Top-level turn-value function via the stopping-line envelope.

    First the candidate lines L_t(y) = A_t - B_t*y for t = 1..aa, each
    derived from the previous by shifting first-passage mass out of level
    t; then their upper envelope on [0, 1] by a hull scan in
    slope-ascending order (t descending).  Returns the point count.
    """
    cdef int t, z, j, nl, top, m, k
    cdef double p0 = probs[0]
    cdef double beta, K, mass, A, B, A0, B0, y0, y_int
    cdef bint keep

    for z in range(aa + n + 1):
        pi[z] = 0.0
    for j in range(1, n + 1):
        if probs[j] > 0:
            pi[j] = probs[j]
    beta = p0
    nl = 0
    for t in range(1, aa + 1):
        K = 0.0
        for z in range(t, t + n):
            if pi[z] != 0.0:
                K = K + pi[z] * (consts[aa - z - 1] if z < aa else 1.0)
        lineA[nl] = beta + K
        lineB[nl] = beta
        nl += 1
        cnt.merges += n
        mass = pi[t]
        if mass != 0.0:
            beta = beta + mass * p0
            for j in range(1, n + 1):
                if probs[j] > 0:
                    pi[t + j] = pi[t + j] + mass * probs[j]

    top = 0  # hull size
    for t in range(nl - 1, -1, -1):
        A = lineA[t]
        B = lineB[t]
        cnt.scans += 1
        y_int = 0.0
        keep = True
        while top > 0:
            A0 = hullA[top - 1]
            B0 = hullB[top - 1]
            y0 = hullY[top - 1]
            if B == B0:
                if A <= A0:
                    keep = False
                    break
                top -= 1
                cnt.merges += 1
                continue
            y_int = (A0 - A) / (B0 - B)
            if y_int <= y0 + FLOAT_TOL:
                top -= 1
                cnt.merges += 1
                continue
            break
        if not keep:
            continue
        if top == 0:
            hullA[0] = A
            hullB[0] = B
            hullY[0] = 0.0
            top = 1
        else:
            hullA[top] = A
            hullB[top] = B
            hullY[top] = y_int
            top += 1

    m = 0
    for k in range(top):
        if hullY[k] >= 1.0:
            break
        outx[m] = hullY[k]
        outv[m] = hullA[k] - hullB[k] * hullY[k]
        m += 1
    outx[m] = 1.0
    outv[m] = hullA[m - 1] - hullB[m - 1]
    m += 1
    cnt.evals += m
    return _coalesce(outx, outv, m)


cdef int _solve_system(double* fabx, double* fabv, int ma,
                       double* fbax, double* fbav, int mb,
                       double* xout, double* yout, Counter* cnt) nogil:
    """Root of g(x) = f_ab(f_ba(x)) - x on the pulled-back grid."""
    cdef int total = mb + ma
    cdef double* cand = <double*> malloc(total * sizeof(double))
    cdef int nc = 0, i, j, l
    cdef double t, x, g, h, prev_x = 0.0, prev_g = 0.0, m, xstar, tmp
    cdef bint have_prev = False

    for i in range(mb):
        cand[nc] = fbax[i]
        nc += 1
    # preimages of f_ab's breakpoints under f_ba
    l = 0
    for i in range(ma - 1, -1, -1):
        t = fabx[i]
        if t > fbav[0] or t < fbav[mb - 1]:
            continue
        while l < mb - 1 and fbav[l + 1] > t:
            l += 1
        cnt.scans += 1
        if fbav[l] == t:
            cand[nc] = fbax[l]
            nc += 1
        elif l < mb - 1 and fbav[l + 1] != fbav[l]:
            cand[nc] = fbax[l] + (t - fbav[l]) * (fbax[l + 1] - fbax[l]) / (fbav[l + 1] - fbav[l])
            nc += 1

    # insertion sort + dedup (candidate sets are small)
    for i in range(1, nc):
        t = cand[i]
        j = i - 1
        while j >= 0 and cand[j] > t:
            cand[j + 1] = cand[j]
            j -= 1
        cand[j + 1] = t
    j = 0
    for i in range(1, nc):
        if cand[i] != cand[j]:
            j += 1
            cand[j] = cand[i]
    nc = j + 1

    for i in range(nc):
        x = cand[i]
        cnt.scans += 1
        cnt.evals += 2
        g = _eval(fabx, fabv, ma, _eval(fbax, fbav, mb, x))
        h = g - x
        if h == 0:
            xout[0] = x
            yout[0] = _eval(fbax, fbav, mb, x)
            free(cand)
            return 0
        if h < 0:
            if not have_prev:
                break
            m = (g - prev_g) / (x - prev_x)
            xstar = (prev_g - m * prev_x) / (1.0 - m)
            if xstar < prev_x:
                xstar = prev_x
            elif xstar > x:
                xstar = x
            xout[0] = xstar
            yout[0] = _eval(fbax, fbav, mb, xstar)
            free(cand)
            return 0
        prev_x = x
        prev_g = g
        have_prev = True
    free(cand)
    return -1


cdef double _backsub(double* probs, int n, int aa, double y, double* consts,
                     unsigned char* acts) nogil:
    """Optimal actions for tau = 1..aa-1 given the opposite start value;
    returns the tau = 0 value (used to certify the envelope solution)."""
    cdef double* w = <double*> malloc((aa + 1) * sizeof(double))
    cdef double roll = 0.0, c
    cdef double zero_bonus = probs[0] * (1.0 - y)
    cdef int k, j
    for k in range(1, aa + 1):
        roll = zero_bonus
        for j in range(1, n + 1):
            if probs[j] > 0:
                roll = roll + (probs[j] if k - j <= 0 else probs[j] * w[k - j])
        if k < aa:
            c = consts[k - 1]
            if roll > c:
                w[k] = roll
                acts[aa - k - 1] = 1
            else:
                w[k] = c
                acts[aa - k - 1] = 0
        else:
            w[k] = roll
    free(w)
    return roll


def solve_pair(probs_arr, int a, int b, consts_a_arr, consts_b_arr):
    """Solve one (a, b) sub-game pair in doubles via the envelope route.

    Returns (x, y, ok, acts_ab, acts_ba, fab_x, fab_v, fba_x, fba_v,
    merges, scans, evals); ok reports whether the solution is certified
    by the one-step recursion (the caller must redo the pair with the
    step-by-step construction when it is False).
    """
    cdef double[::1] probs = np.ascontiguousarray(probs_arr, dtype=np.float64)
    cdef double[::1] ca = np.ascontiguousarray(consts_a_arr, dtype=np.float64)
    cdef double[::1] cb = np.ascontiguousarray(consts_b_arr, dtype=np.float64)
    cdef int n = probs.shape[0] - 1
    cdef int big = a if a > b else b
    cdef int cap = big + n + 4
    cdef Counter cnt
    cnt.merges = 0
    cnt.scans = 0
    cnt.evals = 0

    cdef double* fabx = <double*> malloc(cap * sizeof(double))
    cdef double* fabv = <double*> malloc(cap * sizeof(double))
    cdef double* fbax = <double*> malloc(cap * sizeof(double))
    cdef double* fbav = <double*> malloc(cap * sizeof(double))
    cdef double* pi = <double*> malloc(cap * sizeof(double))
    cdef double* lineA = <double*> malloc(cap * sizeof(double))
    cdef double* lineB = <double*> malloc(cap * sizeof(double))
    cdef double* hullA = <double*> malloc(cap * sizeof(double))
    cdef double* hullB = <double*> malloc(cap * sizeof(double))
    cdef double* hullY = <double*> malloc(cap * sizeof(double))
    cdef int ma, mb, rc, s
    cdef double x = 0.0, y = 0.0
    cdef double v0a = 0.0, v0b = 0.0
    cdef bint ok
    cdef unsigned char[::1] aa_view
    cdef unsigned char[::1] bb_view

    cdef double* pc = &probs[0]
    cdef double* cap_ = NULL
    cdef double* cbp = NULL
    if a > 1:
        cap_ = &ca[0]
    if b > 1:
        cbp = &cb[0]

    try:
        ma = _build_side(pc, n, a, cap_, pi, lineA, lineB,
                         hullA, hullB, hullY, fabx, fabv, &cnt)
        mb = _build_side(pc, n, b, cbp, pi, lineA, lineB,
                         hullA, hullB, hullY, fbax, fbav, &cnt)

        rc = _solve_system(fabx, fabv, ma, fbax, fbav, mb, &x, &y, &cnt)
        if rc != 0:
            raise ArithmeticError(f"no crossing for pair ({a}, {b})")

        acts_ab = bytearray(max(a - 1, 0))
        acts_ba = bytearray(max(b - 1, 0))
        if a > 1:
            aa_view = acts_ab
            v0a = _backsub(pc, n, a, y, cap_, &aa_view[0])
        else:
            v0a = _backsub(pc, n, a, y, cap_, NULL)
        if b > 1:
            bb_view = acts_ba
            v0b = _backsub(pc, n, b, x, cbp, &bb_view[0])
        else:
            v0b = _backsub(pc, n, b, x, cbp, NULL)
        ok = abs(v0a - x) <= FLOAT_TOL and abs(v0b - y) <= FLOAT_TOL

        fab_x = np.empty(ma)
        fab_v = np.empty(ma)
        fba_x = np.empty(mb)
        fba_v = np.empty(mb)
        for s in range(ma):
            fab_x[s] = fabx[s]
            fab_v[s] = fabv[s]
        for s in range(mb):
            fba_x[s] = fbax[s]
            fba_v[s] = fbav[s]
        return (
            x,
            y,
            ok,
            bytes(acts_ab),
            bytes(acts_ba),
            fab_x,
            fab_v,
            fba_x,
            fba_v,
            cnt.merges,
            cnt.scans,
            cnt.evals,
        )
    finally:
        free(fabx)
        free(fabv)
        free(fbax)
        free(fbav)
        free(pi)
        free(lineA)
        free(lineB)
        free(hullA)
        free(hullB)
        free(hullY)
