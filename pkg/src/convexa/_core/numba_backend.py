"""Numba twin of convexa._core.numpy_backend.

Same public signatures, same formulas, loop-per-sample @njit kernels instead
of vectorized einsums. Tests pin cross-backend agreement to ~1e-12.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from convexa._core import spec
from convexa._core.numpy_backend import J4

NAME = "numba"

_J4 = J4.copy()


# ---------------------------------------------------------------------------
# profile (scalar kernels)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _profile_w_scalar(s, l, blend, taper):
    a = abs(s)
    sg = 1.0 if s >= 0 else -1.0
    if s == 0.0:
        sg = 0.0
    L1 = 0.5 * l
    u = (a - L1) / blend
    if u < 0.0:
        u = 0.0
    if u > 1.0:
        u = 1.0
    ramp = 3 * u**2 - 2 * u**3
    ramp_int = u**3 - 0.5 * u**4
    ramp_d = (6 * u - 6 * u**2) / blend
    wp = taper + (1 - taper) * ramp
    if a > L1 + blend:
        w_abs = taper * (L1 + blend) + (1 - taper) * blend * 0.5 + (a - L1 - blend)
        wpp = 0.0
    else:
        w_abs = taper * a + (1 - taper) * blend * ramp_int
        wpp = sg * (1 - taper) * ramp_d if a > L1 else 0.0
    return sg * w_abs, wp, wpp


@njit(cache=True)
def _profile_f_scalar(s, l, blend, taper):
    w, wp, wpp = _profile_w_scalar(s, l, blend, taper)
    cw = np.cos(w)
    sw = np.sin(w)
    return cw, -wp * sw, -wpp * sw - wp**2 * cw


def profile_w(s, l, blend, taper):
    s = np.atleast_1d(np.asarray(s, dtype=np.float64))
    return _profile_w_batch(s, l, blend, taper)


@njit(cache=True)
def _profile_w_batch(s, l, blend, taper):
    n = s.shape[0]
    w = np.empty(n)
    wp = np.empty(n)
    wpp = np.empty(n)
    for i in range(n):
        w[i], wp[i], wpp[i] = _profile_w_scalar(s[i], l, blend, taper)
    return w, wp, wpp


def profile_f(s, l, blend, taper):
    w, wp, wpp = profile_w(s, l, blend, taper)
    cw, sw = np.cos(w), np.sin(w)
    return cw, -wp * sw, -wpp * sw - wp**2 * cw


def profile_gauss(s, l, blend, taper):
    w, wp, wpp = profile_w(s, l, blend, taper)
    return wp**2 + wpp * np.tan(w)


def profile_pole(l, blend, taper) -> float:
    w_end = taper * (0.5 * l + blend) + (1 - taper) * blend * 0.5
    return 0.5 * l + blend + (np.pi / 2 - w_end)


# ---------------------------------------------------------------------------
# metric / dmetric scalar kernels
# ---------------------------------------------------------------------------

@njit(cache=True)
def _metric_scalar(code, params, x, J, out):
    d = x.shape[0]
    for i in range(d):
        for j in range(d):
            out[i, j] = 0.0
    if code == 0:  # EUCLIDEAN
        for i in range(d):
            out[i, i] = 1.0
    elif code == 1:  # BERGER
        kappa = params[0]
        tau = params[1]
        lam = 4.0 / kappa
        mu = 16.0 * tau**2 / kappa**2
        s = 0.0
        for i in range(4):
            s += x[i] * x[i]
        q = J @ x
        c1 = 1.0 / s - lam / s**2
        c2 = (mu - lam) / s**2
        for i in range(4):
            out[i, i] += lam / s
            for j in range(4):
                out[i, j] += c1 * x[i] * x[j] + c2 * q[i] * q[j]
    elif code == 2:  # HEISENBERG
        tau = params[0]
        b0 = tau * x[1]
        b1 = -tau * x[0]
        out[0, 0] = 1.0 + b0 * b0
        out[0, 1] = b0 * b1
        out[0, 2] = b0
        out[1, 0] = b0 * b1
        out[1, 1] = 1.0 + b1 * b1
        out[1, 2] = b1
        out[2, 0] = b0
        out[2, 1] = b1
        out[2, 2] = 1.0
    elif code == 3 or code == 5:  # PROD_SPHERE / SURF_SPHERE
        r = params[0]
        out[0, 0] = r * r
        st = np.sin(x[0])
        out[1, 1] = r * r * st * st
        if d == 3:
            out[2, 2] = 1.0
    elif code == 4 or code == 6:  # PROD_CAPPED / SURF_CAPPED
        f, _, _ = _profile_f_scalar(x[0], params[0], params[1], params[2])
        out[0, 0] = 1.0
        out[1, 1] = f * f
        if d == 3:
            out[2, 2] = 1.0


@njit(cache=True)
def _dmetric_scalar(code, params, x, J, out):
    d = x.shape[0]
    for k in range(d):
        for i in range(d):
            for j in range(d):
                out[k, i, j] = 0.0
    if code == 0:
        return
    if code == 1:
        kappa = params[0]
        tau = params[1]
        lam = 4.0 / kappa
        mu = 16.0 * tau**2 / kappa**2
        s = 0.0
        for i in range(4):
            s += x[i] * x[i]
        q = J @ x
        c1 = 1.0 / s - lam / s**2
        c2 = (mu - lam) / s**2
        dc1 = -1.0 / s**2 + 2.0 * lam / s**3
        dc2 = -2.0 * (mu - lam) / s**3
        dlam = -lam / s**2
        for k in range(4):
            tp = 2.0 * x[k]
            for i in range(4):
                for j in range(4):
                    v = dlam * tp * (1.0 if i == j else 0.0)
                    v += dc1 * tp * x[i] * x[j]
                    v += c1 * ((1.0 if i == k else 0.0) * x[j] + x[i] * (1.0 if j == k else 0.0))
                    v += dc2 * tp * q[i] * q[j]
                    v += c2 * (J[i, k] * q[j] + q[i] * J[j, k])
                    out[k, i, j] = v
        return
    if code == 2:
        tau = params[0]
        b = np.empty(3)
        b[0] = tau * x[1]
        b[1] = -tau * x[0]
        b[2] = 1.0
        B = np.zeros((3, 3))
        B[0, 1] = -tau
        B[1, 0] = tau
        for k in range(3):
            for i in range(3):
                for j in range(3):
                    out[k, i, j] = B[k, i] * b[j] + b[i] * B[k, j]
        return
    if code == 3 or code == 5:
        r = params[0]
        out[0, 1, 1] = 2.0 * r * r * np.sin(x[0]) * np.cos(x[0])
        return
    if code == 4 or code == 6:
        f, fp, _ = _profile_f_scalar(x[0], params[0], params[1], params[2])
        out[0, 1, 1] = 2.0 * f * fp
        return


@njit(cache=True)
def _christoffel_scalar(code, params, x, J, gam):
    d = x.shape[0]
    g = np.empty((d, d))
    dg = np.empty((d, d, d))
    _metric_scalar(code, params, x, J, g)
    _dmetric_scalar(code, params, x, J, dg)
    ginv = np.linalg.inv(g)
    for k in range(d):
        for i in range(d):
            for j in range(d):
                acc = 0.0
                for l in range(d):
                    acc += ginv[k, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j])
                gam[k, i, j] = 0.5 * acc


@njit(cache=True)
def _christoffel_fd_scalar(code, params, x, J, h, gam):
    d = x.shape[0]
    g = np.empty((d, d))
    _metric_scalar(code, params, x, J, g)
    dg = np.empty((d, d, d))
    gp = np.empty((d, d))
    gm = np.empty((d, d))
    xp = x.copy()
    for k in range(d):
        xp[k] = x[k] + h
        _metric_scalar(code, params, xp, J, gp)
        xp[k] = x[k] - h
        _metric_scalar(code, params, xp, J, gm)
        xp[k] = x[k]
        for i in range(d):
            for j in range(d):
                dg[k, i, j] = (gp[i, j] - gm[i, j]) / (2 * h)
    ginv = np.linalg.inv(g)
    for k in range(d):
        for i in range(d):
            for j in range(d):
                acc = 0.0
                for l in range(d):
                    acc += ginv[k, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j])
                gam[k, i, j] = 0.5 * acc


# ---------------------------------------------------------------------------
# batch wrappers
# ---------------------------------------------------------------------------

@njit(cache=True)
def _metric_batch(code, params, X, J):
    n, d = X.shape
    out = np.empty((n, d, d))
    for m in range(n):
        _metric_scalar(code, params, X[m], J, out[m])
    return out


@njit(cache=True)
def _dmetric_batch(code, params, X, J):
    n, d = X.shape
    out = np.empty((n, d, d, d))
    for m in range(n):
        _dmetric_scalar(code, params, X[m], J, out[m])
    return out


@njit(cache=True)
def _christoffel_batch(code, params, X, J):
    n, d = X.shape
    out = np.empty((n, d, d, d))
    for m in range(n):
        _christoffel_scalar(code, params, X[m], J, out[m])
    return out


@njit(cache=True)
def _christoffel_fd_batch(code, params, X, J, h):
    n, d = X.shape
    out = np.empty((n, d, d, d))
    for m in range(n):
        _christoffel_fd_scalar(code, params, X[m], J, h, out[m])
    return out


def _prep(X):
    return np.atleast_2d(np.asarray(X, dtype=np.float64))


def metric(code, params, X):
    return _metric_batch(code, params, _prep(X), _J4)


def dmetric(code, params, X):
    return _dmetric_batch(code, params, _prep(X), _J4)


def dmetric_fd(code, params, X, h=1e-5):
    X = _prep(X)
    n, d = X.shape
    dg = np.empty((n, d, d, d))
    for k in range(d):
        e = np.zeros(d)
        e[k] = h
        dg[:, k] = (metric(code, params, X + e) - metric(code, params, X - e)) / (2 * h)
    return dg


def metric_inv(g):
    return np.linalg.inv(g)


def christoffel(code, params, X):
    return _christoffel_batch(code, params, _prep(X), _J4)


def christoffel_fd(code, params, X, h=1e-5):
    return _christoffel_fd_batch(code, params, _prep(X), _J4, h)


# ---------------------------------------------------------------------------
# Killing field / wedge / normals
# ---------------------------------------------------------------------------

def killing(code, params, X):
    X = _prep(X)
    n, d = X.shape
    if code == spec.BERGER:
        kappa, tau = params[0], params[1]
        return (kappa / (4.0 * abs(tau))) * (X @ _J4.T)
    if code == spec.HEISENBERG or (code == spec.EUCLIDEAN and d == 3) or code in (
        spec.PROD_SPHERE,
        spec.PROD_CAPPED,
    ):
        xi = np.zeros((n, d))
        xi[:, d - 1] = 1.0
        return xi
    raise ValueError(f"space code {code} has no Killing fiber field")


def orientation_sign(code, params) -> float:
    if code == spec.BERGER:
        return -1.0 if params[1] > 0 else 1.0
    return 1.0


@njit(cache=True)
def _det3(a):
    return (
        a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
        - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
        + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
    )


@njit(cache=True)
def _det4_covector_one(a, b, c, out):
    M = np.empty((3, 4))
    for i in range(4):
        M[0, i] = a[i]
        M[1, i] = b[i]
        M[2, i] = c[i]
    sub = np.empty((3, 3))
    for m in range(4):
        cc = 0
        for i in range(4):
            if i == m:
                continue
            for r in range(3):
                sub[r, cc] = M[r, i]
            cc += 1
        sgn = -1.0 if (m + 3) % 2 == 1 else 1.0
        out[m] = sgn * _det3(sub)


@njit(cache=True)
def _wedge_batch(code, params, P, X, Y, J, sgn):
    n, d = P.shape
    out = np.empty((n, d))
    g = np.empty((d, d))
    low = np.empty(d)
    for m in range(n):
        _metric_scalar(code, params, P[m], J, g)
        vol = sgn * np.sqrt(np.linalg.det(g))
        if d == 3:
            low[0] = X[m, 1] * Y[m, 2] - X[m, 2] * Y[m, 1]
            low[1] = X[m, 2] * Y[m, 0] - X[m, 0] * Y[m, 2]
            low[2] = X[m, 0] * Y[m, 1] - X[m, 1] * Y[m, 0]
        else:
            r = 0.0
            for i in range(4):
                r += P[m, i] * P[m, i]
            r = np.sqrt(r)
            u = P[m] / r
            _det4_covector_one(u, X[m], Y[m], low)
        out[m] = np.linalg.solve(g, vol * low)
    return out


def wedge(code, params, P, X, Y):
    P, X, Y = _prep(P), _prep(X), _prep(Y)
    return _wedge_batch(code, params, P, X, Y, _J4, orientation_sign(code, params))


@njit(cache=True)
def _normal_raw_batch(code, params, P, Pu, Pv, J):
    n, d = P.shape
    out = np.empty((n, d))
    g = np.empty((d, d))
    low = np.empty(d)
    for m in range(n):
        _metric_scalar(code, params, P[m], J, g)
        if d == 3:
            low[0] = Pu[m, 1] * Pv[m, 2] - Pu[m, 2] * Pv[m, 1]
            low[1] = Pu[m, 2] * Pv[m, 0] - Pu[m, 0] * Pv[m, 2]
            low[2] = Pu[m, 0] * Pv[m, 1] - Pu[m, 1] * Pv[m, 0]
        else:
            r = 0.0
            for i in range(4):
                r += P[m, i] * P[m, i]
            r = np.sqrt(r)
            u = P[m] / r
            _det4_covector_one(u, Pu[m], Pv[m], low)
        out[m] = np.linalg.solve(g, low)
    return out


def normal_raw(code, params, P, Pu, Pv):
    return _normal_raw_batch(code, params, _prep(P), _prep(Pu), _prep(Pv), _J4)


# ---------------------------------------------------------------------------
# shape pipeline
# ---------------------------------------------------------------------------

@njit(cache=True)
def _shape_batch(code, params, P, Pu, Pv, Puu, Puv, Pvv, ref, J, has_xi, xi_all):
    n, d = P.shape
    E = np.empty(n); F = np.empty(n); G = np.empty(n)
    e = np.empty(n); f = np.empty(n); g2 = np.empty(n)
    k1 = np.empty(n); k2 = np.empty(n)
    H = np.empty(n); Ke = np.empty(n); nu = np.empty(n)
    Nout = np.empty((n, d))
    g = np.empty((d, d))
    gam = np.empty((d, d, d))
    low = np.empty(d)
    for m in range(n):
        _metric_scalar(code, params, P[m], J, g)
        _christoffel_scalar(code, params, P[m], J, gam)
        if d == 3:
            low[0] = Pu[m, 1] * Pv[m, 2] - Pu[m, 2] * Pv[m, 1]
            low[1] = Pu[m, 2] * Pv[m, 0] - Pu[m, 0] * Pv[m, 2]
            low[2] = Pu[m, 0] * Pv[m, 1] - Pu[m, 1] * Pv[m, 0]
        else:
            r = 0.0
            for i in range(4):
                r += P[m, i] * P[m, i]
            r = np.sqrt(r)
            u4 = P[m] / r
            _det4_covector_one(u4, Pu[m], Pv[m], low)
        N = np.linalg.solve(g, low)
        nn = np.sqrt(N @ g @ N)
        N = N / nn
        dref = N @ g @ ref[m]
        if dref < 0:
            N = -N
        elif abs(dref) < 1e-12:
            best = 0
            for i in range(1, d):
                if abs(N[i]) > abs(N[best]):
                    best = i
            if N[best] < 0:
                N = -N
        cuu = Puu[m].copy()
        cuv = Puv[m].copy()
        cvv = Pvv[m].copy()
        for k in range(d):
            auu = 0.0; auv = 0.0; avv = 0.0
            for i in range(d):
                for j in range(d):
                    auu += gam[k, i, j] * Pu[m, i] * Pu[m, j]
                    auv += gam[k, i, j] * Pu[m, i] * Pv[m, j]
                    avv += gam[k, i, j] * Pv[m, i] * Pv[m, j]
            cuu[k] += auu
            cuv[k] += auv
            cvv[k] += avv
        E[m] = Pu[m] @ g @ Pu[m]
        F[m] = Pu[m] @ g @ Pv[m]
        G[m] = Pv[m] @ g @ Pv[m]
        e[m] = cuu @ g @ N
        f[m] = cuv @ g @ N
        g2[m] = cvv @ g @ N
        l11 = np.sqrt(E[m])
        l21 = F[m] / l11
        gg = G[m] - l21 * l21
        if gg < 1e-300:
            gg = 1e-300
        l22 = np.sqrt(gg)
        i11 = 1.0 / l11
        i22 = 1.0 / l22
        m21 = -l21 * i11 * i22
        s11 = i11 * i11 * e[m]
        s12 = i11 * (m21 * e[m] + i22 * f[m])
        s22 = m21 * m21 * e[m] + 2.0 * m21 * i22 * f[m] + i22 * i22 * g2[m]
        mean = 0.5 * (s11 + s22)
        disc = np.sqrt((0.5 * (s11 - s22)) ** 2 + s12 * s12)
        k1[m] = mean - disc
        k2[m] = mean + disc
        H[m] = mean
        Ke[m] = k1[m] * k2[m]
        if has_xi:
            nu[m] = N @ g @ xi_all[m]
        else:
            nu[m] = np.nan
        Nout[m] = N
    return E, F, G, e, f, g2, k1, k2, H, Ke, nu, Nout


def shape_pipeline(code, params, P, Pu, Pv, Puu, Puv, Pvv, ref):
    arrs = [_prep(a) for a in (P, Pu, Pv, Puu, Puv, Pvv, ref)]
    P, Pu, Pv, Puu, Puv, Pvv, ref = arrs
    try:
        xi = killing(code, params, P)
        has_xi = True
    except ValueError:
        xi = np.zeros_like(P)
        has_xi = False
    return _shape_batch(code, params, P, Pu, Pv, Puu, Puv, Pvv, ref, _J4, has_xi, xi)


# ---------------------------------------------------------------------------
# geodesics
# ---------------------------------------------------------------------------

@njit(cache=True)
def _rk4(code, params, x0, v0, h, n_steps, J, project_sphere):
    d = x0.shape[0]
    xs = np.empty((n_steps + 1, d))
    vs = np.empty((n_steps + 1, d))
    xs[0] = x0
    vs[0] = v0
    gam = np.empty((d, d, d))
    x = x0.copy()
    v = v0.copy()

    for it in range(n_steps):
        k1x = v
        k1v = _acc(code, params, x, v, J, gam)
        x2 = x + 0.5 * h * k1x
        v2 = v + 0.5 * h * k1v
        k2x = v2
        k2v = _acc(code, params, x2, v2, J, gam)
        x3 = x + 0.5 * h * k2x
        v3 = v + 0.5 * h * k2v
        k3x = v3
        k3v = _acc(code, params, x3, v3, J, gam)
        x4 = x + h * k3x
        v4 = v + h * k3v
        k4x = v4
        k4v = _acc(code, params, x4, v4, J, gam)
        x = x + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        if project_sphere:
            r = np.sqrt(np.sum(x * x))
            x = x / r
            v = v - (v @ x) * x
        xs[it + 1] = x
        vs[it + 1] = v
    return xs, vs


@njit(cache=True)
def _acc(code, params, x, v, J, gam):
    _christoffel_scalar(code, params, x, J, gam)
    d = x.shape[0]
    a = np.zeros(d)
    for k in range(d):
        acc = 0.0
        for i in range(d):
            for j in range(d):
                acc += gam[k, i, j] * v[i] * v[j]
        a[k] = -acc
    return a


def rk4_geodesic(code, params, x0, v0, step, n_steps):
    x0 = np.asarray(x0, dtype=np.float64)
    v0 = np.asarray(v0, dtype=np.float64)
    return _rk4(code, params, x0, v0, step, n_steps, _J4, code == spec.BERGER)


# ---------------------------------------------------------------------------
# triangle-triangle intersection
# ---------------------------------------------------------------------------

@njit(cache=True)
def _cross3(a, b, out):
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]


@njit(cache=True)
def _tri_pairs(A, B, eps):
    m = A.shape[0]
    hit = np.zeros(m, dtype=np.bool_)
    unc = np.zeros(m, dtype=np.bool_)
    N1 = np.empty(3)
    N2 = np.empty(3)
    D = np.empty(3)
    ea = np.empty(3)
    eb = np.empty(3)
    dA = np.empty(3)
    dB = np.empty(3)
    pA = np.empty(3)
    pB = np.empty(3)
    for q in range(m):
        scale = 1.0
        for r in range(3):
            for c in range(3):
                if abs(A[q, r, c]) > scale:
                    scale = abs(A[q, r, c])
                if abs(B[q, r, c]) > scale:
                    scale = abs(B[q, r, c])
        tol = eps * (scale + 1.0)
        for i in range(3):
            ea[i] = B[q, 1, i] - B[q, 0, i]
            eb[i] = B[q, 2, i] - B[q, 0, i]
        _cross3(ea, eb, N2)
        n2s = np.sqrt(N2 @ N2) + 1e-300
        for k in range(3):
            acc = 0.0
            for i in range(3):
                acc += N2[i] * (A[q, k, i] - B[q, 0, i])
            dA[k] = acc / n2s
        for i in range(3):
            ea[i] = A[q, 1, i] - A[q, 0, i]
            eb[i] = A[q, 2, i] - A[q, 0, i]
        _cross3(ea, eb, N1)
        n1s = np.sqrt(N1 @ N1) + 1e-300
        for k in range(3):
            acc = 0.0
            for i in range(3):
                acc += N1[i] * (B[q, k, i] - A[q, 0, i])
            dB[k] = acc / n1s
        zeroA = abs(dA[0]) <= tol and abs(dA[1]) <= tol and abs(dA[2]) <= tol
        zeroB = abs(dB[0]) <= tol and abs(dB[1]) <= tol and abs(dB[2]) <= tol
        if zeroA and zeroB:
            ov, near = _coplanar_one(A[q], B[q], N1, tol)
            hit[q] = ov
            unc[q] = near and ov
            continue
        sepA = (dA[0] > tol and dA[1] > tol and dA[2] > tol) or (
            dA[0] < -tol and dA[1] < -tol and dA[2] < -tol)
        sepB = (dB[0] > tol and dB[1] > tol and dB[2] > tol) or (
            dB[0] < -tol and dB[1] < -tol and dB[2] < -tol)
        if sepA or sepB:
            continue
        if (abs(dA[0]) <= tol or abs(dA[1]) <= tol or abs(dA[2]) <= tol or
                abs(dB[0]) <= tol or abs(dB[1]) <= tol or abs(dB[2]) <= tol):
            unc[q] = True
            continue
        _cross3(N1, N2, D)
        axis = 0
        if abs(D[1]) > abs(D[axis]):
            axis = 1
        if abs(D[2]) > abs(D[axis]):
            axis = 2
        for k in range(3):
            pA[k] = A[q, k, axis]
            pB[k] = B[q, k, axis]
        a0, a1 = _interval(pA, dA)
        b0, b1 = _interval(pB, dB)
        lo = max(min(a0, a1), min(b0, b1))
        hi = min(max(a0, a1), max(b0, b1))
        span = hi - lo
        if span > tol:
            hit[q] = True
        elif abs(span) <= tol:
            unc[q] = True
    return hit, unc


@njit(cache=True)
def _interval(p, dist):
    s0 = dist[0] > 0
    s1 = dist[1] > 0
    s2 = dist[2] > 0
    if s0 != s1:
        lone = 0 if s0 != s2 else 1
    else:
        lone = 2
    j = (lone + 1) % 3
    k = (lone + 2) % 3
    t0 = p[j] + (p[lone] - p[j]) * dist[j] / (dist[j] - dist[lone])
    t1 = p[k] + (p[lone] - p[k]) * dist[k] / (dist[k] - dist[lone])
    return t0, t1


@njit(cache=True)
def _coplanar_one(A, B, N, tol):
    drop = 0
    if abs(N[1]) > abs(N[drop]):
        drop = 1
    if abs(N[2]) > abs(N[drop]):
        drop = 2
    k0 = (drop + 1) % 3
    k1 = (drop + 2) % 3
    A2 = np.empty((3, 2))
    B2 = np.empty((3, 2))
    for i in range(3):
        A2[i, 0] = A[i, k0]
        A2[i, 1] = A[i, k1]
        B2[i, 0] = B[i, k0]
        B2[i, 1] = B[i, k1]
    sep = False
    near = False
    for which in range(2):
        tri = A2 if which == 0 else B2
        for i in range(3):
            ex = tri[(i + 1) % 3, 0] - tri[i, 0]
            ey = tri[(i + 1) % 3, 1] - tri[i, 1]
            nx = -ey
            ny = ex
            band = tol * (np.sqrt(nx * nx + ny * ny) + 1e-300)
            amin = 1e300; amax = -1e300
            bmin = 1e300; bmax = -1e300
            for kk in range(3):
                pa = nx * A2[kk, 0] + ny * A2[kk, 1]
                pb = nx * B2[kk, 0] + ny * B2[kk, 1]
                amin = min(amin, pa); amax = max(amax, pa)
                bmin = min(bmin, pb); bmax = max(bmax, pb)
            gap = max(bmin - amax, amin - bmax)
            if gap > band:
                sep = True
            if abs(gap) <= band:
                near = True
    return (not sep), (near and not sep)


def tri_pairs_intersect(A, B, eps=1e-12):
    A = np.ascontiguousarray(np.asarray(A, dtype=np.float64))
    B = np.ascontiguousarray(np.asarray(B, dtype=np.float64))
    if A.shape[0] == 0:
        return np.zeros(0, dtype=bool), np.zeros(0, dtype=bool)
    return _tri_pairs(A, B, eps)
