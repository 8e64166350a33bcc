"""Vectorized numpy implementation of the hot kernels.

All functions take batches: points are ``[n, d]`` arrays, metrics ``[n, d, d]``,
metric derivatives ``[n, k, i, j]`` (k = coordinate of differentiation) and
Christoffel symbols ``[n, k, i, j]`` = Gamma^k_ij.

The numba backend mirrors these signatures one to one; cross-backend
agreement is pinned by tests.
"""
from __future__ import annotations

import numpy as np

from convexa._core import spec

NAME = "numpy"

# complex structure on R^4 = C^2: J p = (iz, iw) in real coordinates
J4 = np.array([
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
])


# ---------------------------------------------------------------------------
# capped-cylinder profile
#
# Surface of revolution ds^2 + f(s)^2 dphi^2 with f = cos(w(s)); w is odd,
# w' = taper on the tube, ramping C^1-smoothly to 1 over a band of width
# `blend`, then exactly 1 on the caps. Gauss curvature K = w'^2 + w'' tan(w)
# is then taper^2 on the tube and exactly 1 on the caps, positive throughout.
# ---------------------------------------------------------------------------

def profile_w(s, l, blend, taper):
    """(w, w', w'') of the profile angle at arclength s (arrays ok)."""
    s = np.asarray(s, dtype=np.float64)
    a = np.abs(s)
    sg = np.sign(s)
    L1 = 0.5 * l
    u = np.clip((a - L1) / blend, 0.0, 1.0)
    # integral of the smoothstep ramp: T(u) = u^3 - u^4/2, T' = 3u^2 - 2u^3
    ramp = 3 * u**2 - 2 * u**3
    ramp_int = u**3 - 0.5 * u**4
    ramp_d = (6 * u - 6 * u**2) / blend
    wp = taper + (1 - taper) * ramp
    # beyond the blend the ramp integral is blend/2 and w grows at unit rate
    beyond = a > L1 + blend
    w_abs = np.where(
        beyond,
        taper * (L1 + blend) + (1 - taper) * blend * 0.5 + (a - L1 - blend),
        taper * a + (1 - taper) * blend * ramp_int,
    )
    wpp = sg * np.where((a > L1) & ~beyond, (1 - taper) * ramp_d, 0.0)
    return sg * w_abs, wp, wpp


def profile_f(s, l, blend, taper):
    """(f, f', f'') of the revolution profile f = cos(w)."""
    w, wp, wpp = profile_w(s, l, blend, taper)
    cw, sw = np.cos(w), np.sin(w)
    return cw, -wp * sw, -wpp * sw - wp**2 * cw


def profile_gauss(s, l, blend, taper):
    w, wp, wpp = profile_w(s, l, blend, taper)
    return wp**2 + wpp * np.tan(w)


def profile_pole(l, blend, taper) -> float:
    """Arclength from the equator at which the profile closes (f -> 0)."""
    w_end = taper * (0.5 * l + blend) + (1 - taper) * blend * 0.5
    return 0.5 * l + blend + (np.pi / 2 - w_end)


# ---------------------------------------------------------------------------
# metric and its first derivatives, per space
# ---------------------------------------------------------------------------

def metric(code, params, X):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    n, d = X.shape
    if code == spec.EUCLIDEAN:
        return np.broadcast_to(np.eye(d), (n, d, d)).copy()
    if code == spec.BERGER:
        kappa, tau = params[0], params[1]
        lam = 4.0 / kappa
        mu = 16.0 * tau**2 / kappa**2
        s = np.einsum("ni,ni->n", X, X)
        q = X @ J4.T
        c1 = 1.0 / s - lam / s**2
        c2 = (mu - lam) / s**2
        g = (lam / s)[:, None, None] * np.eye(4)
        g = g + c1[:, None, None] * np.einsum("ni,nj->nij", X, X)
        g = g + c2[:, None, None] * np.einsum("ni,nj->nij", q, q)
        return g
    if code == spec.HEISENBERG:
        tau = params[0]
        beta = np.stack([tau * X[:, 1], -tau * X[:, 0], np.ones(n)], axis=1)
        g = np.broadcast_to(np.diag([1.0, 1.0, 0.0]), (n, 3, 3)).copy()
        return g + np.einsum("ni,nj->nij", beta, beta)
    if code in (spec.PROD_SPHERE, spec.SURF_SPHERE):
        r = params[0]
        g = np.zeros((n, d, d))
        g[:, 0, 0] = r**2
        g[:, 1, 1] = (r * np.sin(X[:, 0])) ** 2
        if d == 3:
            g[:, 2, 2] = 1.0
        return g
    if code in (spec.PROD_CAPPED, spec.SURF_CAPPED):
        f, _, _ = profile_f(X[:, 0], params[0], params[1], params[2])
        g = np.zeros((n, d, d))
        g[:, 0, 0] = 1.0
        g[:, 1, 1] = f**2
        if d == 3:
            g[:, 2, 2] = 1.0
        return g
    raise ValueError(f"unknown space code {code}")


def dmetric(code, params, X):
    """Analytic coordinate derivatives [n, k, i, j] = d_k g_ij."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    n, d = X.shape
    dg = np.zeros((n, d, d, d))
    if code == spec.EUCLIDEAN:
        return dg
    if code == spec.BERGER:
        kappa, tau = params[0], params[1]
        lam = 4.0 / kappa
        mu = 16.0 * tau**2 / kappa**2
        s = np.einsum("ni,ni->n", X, X)
        q = X @ J4.T
        c1 = 1.0 / s - lam / s**2
        c2 = (mu - lam) / s**2
        dc1 = -1.0 / s**2 + 2.0 * lam / s**3
        dc2 = -2.0 * (mu - lam) / s**3
        dlam = -lam / s**2
        eye = np.eye(4)
        two_pk = 2.0 * X  # d_k s
        dg += np.einsum("nk,ij->nkij", dlam[:, None] * two_pk, eye)
        dg += np.einsum("nk,ni,nj->nkij", dc1[:, None] * two_pk, X, X)
        dg += c1[:, None, None, None] * (
            np.einsum("ki,nj->nkij", eye, X) + np.einsum("ni,kj->nkij", X, eye)
        )
        dg += np.einsum("nk,ni,nj->nkij", dc2[:, None] * two_pk, q, q)
        # d_k q_i = J_ik
        dg += c2[:, None, None, None] * (
            np.einsum("ik,nj->nkij", J4, q) + np.einsum("ni,jk->nkij", q, J4)
        )
        return dg
    if code == spec.HEISENBERG:
        tau = params[0]
        beta = np.stack([tau * X[:, 1], -tau * X[:, 0], np.ones(n)], axis=1)
        B = np.array([[0.0, -tau, 0.0], [tau, 0.0, 0.0], [0.0, 0.0, 0.0]])  # B[k,i] = d_k beta_i
        dg += np.einsum("ki,nj->nkij", B, beta)
        dg += np.einsum("ni,kj->nkij", beta, B)
        return dg
    if code in (spec.PROD_SPHERE, spec.SURF_SPHERE):
        r = params[0]
        dg[:, 0, 1, 1] = 2.0 * r**2 * np.sin(X[:, 0]) * np.cos(X[:, 0])
        return dg
    if code in (spec.PROD_CAPPED, spec.SURF_CAPPED):
        f, fp, _ = profile_f(X[:, 0], params[0], params[1], params[2])
        dg[:, 0, 1, 1] = 2.0 * f * fp
        return dg
    raise ValueError(f"unknown space code {code}")


def dmetric_fd(code, params, X, h=1e-5):
    """Central finite differences of the metric; verification twin of dmetric."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    n, d = X.shape
    dg = np.empty((n, d, d, d))
    for k in range(d):
        e = np.zeros(d)
        e[k] = h
        dg[:, k] = (metric(code, params, X + e) - metric(code, params, X - e)) / (2 * h)
    return dg


def metric_inv(g):
    return np.linalg.inv(g)


def _christoffel_from(g, dg):
    ginv = np.linalg.inv(g)
    sym = dg + dg.transpose(0, 2, 1, 3) - dg.transpose(0, 2, 3, 1)
    return 0.5 * np.einsum("nkl,nijl->nkij", ginv, sym)


def christoffel(code, params, X):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    return _christoffel_from(metric(code, params, X), dmetric(code, params, X))


def christoffel_fd(code, params, X, h=1e-5):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    return _christoffel_from(metric(code, params, X), dmetric_fd(code, params, X, h))


# ---------------------------------------------------------------------------
# Killing field, wedge product, normals
# ---------------------------------------------------------------------------

def killing(code, params, X):
    """Unit vertical Killing field at the given points."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    n, d = X.shape
    if code == spec.BERGER:
        kappa, tau = params[0], params[1]
        return (kappa / (4.0 * abs(tau))) * (X @ J4.T)
    if code == spec.HEISENBERG or (code == spec.EUCLIDEAN and d == 3) or code in (
        spec.PROD_SPHERE,
        spec.PROD_CAPPED,
    ):
        xi = np.zeros((n, d))
        xi[:, d - 1] = 1.0
        return xi
    raise ValueError(f"space code {code} has no Killing fiber field")


def orientation_sign(code, params) -> float:
    # Berger ties the fiber orientation to the sign of tau; all other charts
    # are positively oriented in coordinate order.
    if code == spec.BERGER:
        return -1.0 if params[1] > 0 else 1.0
    return 1.0


def wedge(code, params, P, X, Y):
    """Metric cross product X ^ Y tangent to the space at P (3-manifolds)."""
    P = np.atleast_2d(np.asarray(P, dtype=np.float64))
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
    g = metric(code, params, P)
    sgn = orientation_sign(code, params)
    if P.shape[1] == 3:
        vol = sgn * np.sqrt(np.linalg.det(g))
        cr = np.cross(X, Y)  # lower-index components up to the vol factor
        low = vol[:, None] * cr
    else:
        # Berger: vol3(X, Y, Z) = vol4(unit radial, X, Y, Z)
        r = np.linalg.norm(P, axis=1, keepdims=True)
        u = P / r
        vol = sgn * np.sqrt(np.linalg.det(g))
        low = vol[:, None] * _det4_covector(u, X, Y)
    return np.linalg.solve(g, low[..., None])[..., 0]


def _det4_covector(a, b, c):
    """Covector m -> det[a, b, c, e_m] for batches of R^4 vectors."""
    n = a.shape[0]
    out = np.empty((n, 4))
    idx = [0, 1, 2, 3]
    M = np.stack([a, b, c], axis=1)  # [n, 3, 4]
    for m in range(4):
        cols = [i for i in idx if i != m]
        out[:, m] = (-1) ** (m + 3) * np.linalg.det(M[:, :, cols])
    return out


def normal_raw(code, params, P, Pu, Pv):
    """g-raised, unnormalized normal of the surface spanned by (Pu, Pv)."""
    g = metric(code, params, P)
    if P.shape[1] == 3:
        low = np.cross(Pu, Pv)
    else:
        r = np.linalg.norm(P, axis=1, keepdims=True)
        low = _det4_covector(P / r, Pu, Pv)
    return np.linalg.solve(g, low[..., None])[..., 0]


# ---------------------------------------------------------------------------
# fundamental forms / shape operator pipeline
# ---------------------------------------------------------------------------

def shape_pipeline(code, params, P, Pu, Pv, Puu, Puv, Pvv, ref):
    """Batched first/second forms, principal curvatures and angle function.

    `ref` orients the normal: N is flipped wherever <N, ref>_g < 0. Rows of
    `ref` that are all zero fall back to a deterministic chart rule (largest
    |component| of N made positive).

    Returns (E, F, G, e, f, g2, k1, k2, H, Ke, nu, N) with k1 <= k2.
    """
    arrs = [np.atleast_2d(np.asarray(a, dtype=np.float64)) for a in (P, Pu, Pv, Puu, Puv, Pvv, ref)]
    P, Pu, Pv, Puu, Puv, Pvv, ref = arrs
    g = metric(code, params, P)
    gam = christoffel(code, params, P)

    def lower(a, b):
        return np.einsum("nij,ni,nj->n", g, a, b)

    N = normal_raw(code, params, P, Pu, Pv)
    N = N / np.sqrt(lower(N, N))[:, None]
    dot_ref = lower(N, ref)
    flip = dot_ref < 0
    undecided = np.abs(dot_ref) < 1e-12
    if np.any(undecided):
        comp = np.argmax(np.abs(N), axis=1)
        lead = N[np.arange(len(N)), comp]
        flip = np.where(undecided, lead < 0, flip)
    N = np.where(flip[:, None], -N, N)

    def cov(second, a, b):
        return second + np.einsum("nkij,ni,nj->nk", gam, a, b)

    E = lower(Pu, Pu)
    F = lower(Pu, Pv)
    G = lower(Pv, Pv)
    e = lower(cov(Puu, Pu, Pu), N)
    f = lower(cov(Puv, Pu, Pv), N)
    g2 = lower(cov(Pvv, Pv, Pv), N)

    # eigenvalues of I^{-1} II, symmetrized through the Cholesky factor of I
    l11 = np.sqrt(E)
    l21 = F / l11
    l22 = np.sqrt(np.maximum(G - l21**2, 1e-300))
    i11 = 1.0 / l11
    i22 = 1.0 / l22
    m21 = -l21 * i11 * i22
    s11 = i11 * i11 * e
    s12 = i11 * (m21 * e + i22 * f)
    s22 = m21 * m21 * e + 2.0 * m21 * i22 * f + i22 * i22 * g2
    mean = 0.5 * (s11 + s22)
    disc = np.sqrt((0.5 * (s11 - s22)) ** 2 + s12**2)
    k1 = mean - disc
    k2 = mean + disc
    H = mean
    Ke = k1 * k2

    try:
        xi = killing(code, params, P)
        nu = lower(N, xi)
    except ValueError:
        nu = np.full(len(P), np.nan)
    return E, F, G, e, f, g2, k1, k2, H, Ke, nu, N


# ---------------------------------------------------------------------------
# geodesic integration
# ---------------------------------------------------------------------------

def _geo_rhs(code, params, x, v):
    gam = christoffel(code, params, x[None, :])[0]
    return v, -np.einsum("kij,i,j->k", gam, v, v)


def rk4_geodesic(code, params, x0, v0, step, n_steps):
    """Classic RK4 for the geodesic equation; Berger paths are re-projected
    onto the unit sphere after every step."""
    d = len(x0)
    xs = np.empty((n_steps + 1, d))
    vs = np.empty((n_steps + 1, d))
    x = np.asarray(x0, dtype=np.float64).copy()
    v = np.asarray(v0, dtype=np.float64).copy()
    xs[0], vs[0] = x, v
    h = step
    for i in range(n_steps):
        k1x, k1v = _geo_rhs(code, params, x, v)
        k2x, k2v = _geo_rhs(code, params, x + 0.5 * h * k1x, v + 0.5 * h * k1v)
        k3x, k3v = _geo_rhs(code, params, x + 0.5 * h * k2x, v + 0.5 * h * k2v)
        k4x, k4v = _geo_rhs(code, params, x + h * k3x, v + h * k3v)
        x = x + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        if code == spec.BERGER:
            r = np.linalg.norm(x)
            x = x / r
            v = v - (v @ x) * x
        xs[i + 1], vs[i + 1] = x, v
    return xs, vs


# ---------------------------------------------------------------------------
# triangle-triangle intersection (Moller interval test, batched)
# ---------------------------------------------------------------------------

def tri_pairs_intersect(A, B, eps=1e-12):
    """Intersection test for corresponding triangle pairs.

    A, B: [m, 3, 3] vertex arrays. Returns (hit, uncertain): boolean masks.
    Pairs flagged uncertain (near-degenerate or coplanar-touching) should be
    re-decided by the exact-arithmetic fallback.
    """
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    m = A.shape[0]
    hit = np.zeros(m, dtype=bool)
    unc = np.zeros(m, dtype=bool)
    if m == 0:
        return hit, unc

    scale = np.maximum(
        np.abs(A).reshape(m, -1).max(axis=1), np.abs(B).reshape(m, -1).max(axis=1)
    ) + 1.0
    tol = eps * scale

    N2 = np.cross(B[:, 1] - B[:, 0], B[:, 2] - B[:, 0])
    dA = np.einsum("mi,mki->mk", N2, A - B[:, 0:1])
    N1 = np.cross(A[:, 1] - A[:, 0], A[:, 2] - A[:, 0])
    dB = np.einsum("mi,mki->mk", N1, B - A[:, 0:1])

    n2s = np.linalg.norm(N2, axis=1) + 1e-300
    n1s = np.linalg.norm(N1, axis=1) + 1e-300
    dAn = dA / n2s[:, None]
    dBn = dB / n1s[:, None]

    zeroA = np.abs(dAn) <= tol[:, None]
    zeroB = np.abs(dBn) <= tol[:, None]
    coplanar = zeroA.all(axis=1) & zeroB.all(axis=1)

    sepA = (dAn > tol[:, None]).all(axis=1) | (dAn < -tol[:, None]).all(axis=1)
    sepB = (dBn > tol[:, None]).all(axis=1) | (dBn < -tol[:, None]).all(axis=1)
    active = ~(sepA | sepB) & ~coplanar

    # grazing contacts: not cleanly separated but some distance is within tol
    graze = active & (zeroA.any(axis=1) | zeroB.any(axis=1))
    unc |= graze
    active &= ~graze

    if np.any(active):
        ia = np.where(active)[0]
        D = np.cross(N1[ia], N2[ia])
        axis = np.argmax(np.abs(D), axis=1)
        sub = np.arange(len(ia))
        pA = A[ia][sub, :, axis]
        pB = B[ia][sub, :, axis]
        # projections of the three vertices on the intersection-line axis
        tA0, tA1 = _plane_interval(pA, dA[ia])
        tB0, tB1 = _plane_interval(pB, dB[ia])
        lo = np.maximum(np.minimum(tA0, tA1), np.minimum(tB0, tB1))
        hi = np.minimum(np.maximum(tA0, tA1), np.maximum(tB0, tB1))
        span = hi - lo
        hit[ia] = span > tol[ia]
        unc[ia] |= np.abs(span) <= tol[ia]

    if np.any(coplanar):
        ic = np.where(coplanar)[0]
        ov, touch = _coplanar_overlap(A[ic], B[ic], N1[ic], tol[ic])
        hit[ic] = ov
        unc[ic] |= touch
    return hit, unc


def _plane_interval(proj, dist):
    """Interval of the triangle's intersection with the other plane.

    proj: [m, 3] projections of the vertices onto the line axis,
    dist: [m, 3] signed distances to the other plane.
    """
    m = proj.shape[0]
    s = np.sign(dist)
    s[s == 0] = 1.0
    # lone vertex: the one whose sign differs from the other two
    lone = np.where(s[:, 0] != s[:, 1], np.where(s[:, 0] != s[:, 2], 0, 1), 2)
    j = (lone + 1) % 3
    k = (lone + 2) % 3
    r = np.arange(m)
    pl, dl = proj[r, lone], dist[r, lone]
    t0 = proj[r, j] + (pl - proj[r, j]) * dist[r, j] / (dist[r, j] - dl)
    t1 = proj[r, k] + (pl - proj[r, k]) * dist[r, k] / (dist[r, k] - dl)
    return t0, t1


def _coplanar_overlap(A, B, N, tol):
    """2D separating-axis overlap test for coplanar triangle pairs.

    Returns (overlap, near_touch); near_touch marks pairs whose separation
    gap falls inside the tolerance band on some axis.
    """
    m = A.shape[0]
    drop = np.argmax(np.abs(N) + 1e-300, axis=1)
    keep = np.stack([(drop + 1) % 3, (drop + 2) % 3], axis=1)
    r = np.arange(m)[:, None, None]
    A2 = A[r, np.arange(3)[None, :, None], keep[:, None, :]]
    B2 = B[r, np.arange(3)[None, :, None], keep[:, None, :]]
    sep = np.zeros(m, dtype=bool)
    near = np.zeros(m, dtype=bool)
    for tri in (A2, B2):
        for i in range(3):
            edge = tri[:, (i + 1) % 3] - tri[:, i]
            nrm = np.stack([-edge[:, 1], edge[:, 0]], axis=1)
            band = tol * (np.linalg.norm(nrm, axis=1) + 1e-300)
            pa = np.einsum("mi,mki->mk", nrm, A2)
            pb = np.einsum("mi,mki->mk", nrm, B2)
            gap = np.maximum(pb.min(axis=1) - pa.max(axis=1), pa.min(axis=1) - pb.max(axis=1))
            sep |= gap > band
            near |= np.abs(gap) <= band
    return ~sep, near & ~sep
