"""Closed-form evaluators and verification checks.

Every closed-form expression here is checked against the numeric
shape-operator oracle (convexa.immersion) or against direct arithmetic;
each check returns a VerificationReport that serializes deterministically.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from convexa import backend as _backend
from convexa import geometry as geo
from convexa import immersion as imm
from convexa import spaces as sp
from convexa.geometry import GeometryError

SCHEMA_VERSION = 1


@dataclass
class VerificationReport:
    check: str
    params: dict
    max_residual: float
    slack: float
    passed: bool
    notes: str = ""
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "params": _plain(self.params),
            "max_residual": float(self.max_residual),
            "slack": float(self.slack),
            "pass": bool(self.passed),
            "notes": self.notes,
            "details": _plain(self.details),
        }


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in np.asarray(obj).tolist()] if isinstance(obj, np.ndarray) else [
            _plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    return obj


def write_reports(path, reports, extra_meta=None):
    """Serialize reports as JSON; re-runs on identical inputs are
    byte-identical apart from the segregated meta block."""
    payload = {
        "schema_version": SCHEMA_VERSION,
        "meta": {"generated_at": datetime.now(timezone.utc).isoformat(),
                 **(extra_meta or {})},
        "reports": [r.to_dict() for r in reports],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_reports(path) -> list[dict]:
    with open(path) as fh:
        payload = json.load(fh)
    return payload["reports"]


# ---------------------------------------------------------------------------
# closed forms for the equator family
# ---------------------------------------------------------------------------

def equator_alpha_sq(kappa: float, tau: float, x) -> np.ndarray:
    d = kappa + 4 * tau**2 - (kappa - 4 * tau**2) * np.cos(2 * np.asarray(x, dtype=np.float64))
    return 2 * kappa * tau**2 / d


def equator_Ke_closed_form(kappa: float, tau: float, x) -> np.ndarray:
    """Extrinsic curvature of the equator family:
    -4 tau^2 (kappa - 4 tau^2)^2 cos^4 x / (kappa + 4 tau^2 - (kappa - 4 tau^2) cos 2x)^2.
    The denominator is bounded below by min(8 tau^2, 2 kappa) > 0."""
    x = np.asarray(x, dtype=np.float64)
    d = kappa + 4 * tau**2 - (kappa - 4 * tau**2) * np.cos(2 * x)
    return -4 * tau**2 * (kappa - 4 * tau**2) ** 2 * np.cos(x) ** 4 / d**2


def equator_curvature_bound(kappa: float, tau: float) -> float:
    """|k_i| <= |kappa - 4 tau^2| / (4 |tau|), attained where |cos x| = 1."""
    return abs(kappa - 4 * tau**2) / (4 * abs(tau))


def equator_first_form_closed(kappa: float, tau: float, x):
    """(E, F, G) of the equator family."""
    x = np.asarray(x, dtype=np.float64)
    E = np.full_like(x, 4.0 / kappa)
    F = np.zeros_like(x)
    G = (4 * tau**2 / (kappa * equator_alpha_sq(kappa, tau, x))) * np.cos(x) ** 2
    return E, F, G


def equator_II_cross_candidates(kappa: float, tau: float, x):
    """The two candidate closed forms for II(psi_x, psi_y).

    direct:     4 alpha (kappa - 4 tau^2) cos^3 x
    consistent: sign(direct) * sqrt(-Ke * E * G), i.e. the value forced by
                the determinant identity Ke = -f^2 / (E G) with e = g = 0.
    """
    x = np.asarray(x, dtype=np.float64)
    alpha = np.sqrt(equator_alpha_sq(kappa, tau, x))
    direct = 4 * alpha * (kappa - 4 * tau**2) * np.cos(x) ** 3
    E, _, G = equator_first_form_closed(kappa, tau, x)
    ke = equator_Ke_closed_form(kappa, tau, x)
    consistent = np.sign(direct) * np.sqrt(np.maximum(-ke * E * G, 0.0))
    return direct, consistent


def comparability_constant(kappa: float, tau: float) -> float:
    """a^2 with <X,X>_(kappa,tau) <= a^2 ||X||^2_round on the 3-sphere."""
    return (4.0 / kappa) * (1.0 + abs(4 * tau**2 / kappa - 1.0))


def bonnet_diameter_bound(c: float) -> float:
    """Upper diameter bound pi/c for surfaces with principal curvatures > c."""
    if c <= 0:
        raise GeometryError("bonnet bound needs c > 0")
    return math.pi / c


# ---------------------------------------------------------------------------
# equator verification
# ---------------------------------------------------------------------------

def _equator_grid(surface, space, n):
    U, V = surface.grid(n, n)
    return imm.shape_grid(surface, space, U, V, on_degenerate="skip")


def verify_equator(kappa: float, tau: float, theta: float, grid_n: int = 101) -> VerificationReport:
    """Oracle assertions for the equator family: minimality, closed-form
    extrinsic curvature, curvature bound with attainment at |cos x| = 1."""
    space = sp.BergerSphere(kappa, tau)
    surface = imm.BergerEquator(theta)
    sg = _equator_grid(surface, space, grid_n)
    ok = sg.ok
    x = sg.U[ok]
    maxH = float(np.max(np.abs(sg.H[ok])))
    ke_closed = equator_Ke_closed_form(kappa, tau, x)
    ke_scale = max(float(np.max(np.abs(ke_closed))), 1e-12)
    ke_rel = float(np.max(np.abs(sg.Ke[ok] - ke_closed))) / ke_scale
    bound = equator_curvature_bound(kappa, tau)
    kmax = float(np.max(np.abs(np.stack([sg.k1[ok], sg.k2[ok]]))))
    at_ends = np.abs(np.cos(x)) > 1.0 - 1e-12
    attained = float(np.max(np.abs(sg.k2[ok][at_ends]))) if np.any(at_ends) else 0.0
    checks = {
        "max_abs_H": (maxH, maxH < 1e-6),
        "ke_rel_err": (ke_rel, ke_rel < 1e-4),
        "bound_respected": (kmax - bound, kmax <= bound + 1e-6),
        "bound_attained": (bound - attained, attained >= bound - 1e-4),
    }
    passed = all(okk for _, okk in checks.values())
    notes = f"{sg.n_skipped()} degenerate samples (cos x = 0 poles) skipped"
    if abs(kappa - 4 * tau**2) < 1e-12:
        notes += "; round case: K_e vanishes identically"
    return VerificationReport(
        check="equator-verify",
        params={"kappa": kappa, "tau": tau, "theta": theta, "grid": grid_n},
        max_residual=max(maxH, ke_rel),
        slack=bound + 1e-6 - kmax,
        passed=passed,
        notes=notes,
        details={k: {"residual": v, "ok": o} for k, (v, o) in checks.items()},
    )


def adjudicate_II_coefficient(kappa: float, tau: float, theta: float = 0.0,
                              grid_n: int = 101) -> VerificationReport:
    """Decide which candidate cross coefficient II(psi_x, psi_y) the
    shape-operator oracle supports.

    The two closed-form candidates differ by the factor kappa^2; only the
    determinant-consistent one can satisfy Ke * E * G = -f^2. The oracle
    picks the winner; nothing is silently corrected.
    """
    space = sp.BergerSphere(kappa, tau)
    surface = imm.BergerEquator(theta)
    sg = _equator_grid(surface, space, grid_n)
    ok = sg.ok
    x = sg.U[ok]
    f_oracle = sg.f[ok]
    direct, consistent = equator_II_cross_candidates(kappa, tau, x)
    scale_d = max(float(np.max(np.abs(direct))), 1e-12)
    scale_c = max(float(np.max(np.abs(consistent))), 1e-12)
    res_direct = float(np.max(np.abs(np.abs(f_oracle) - np.abs(direct)))) / scale_d
    res_consistent = float(np.max(np.abs(np.abs(f_oracle) - np.abs(consistent)))) / scale_c
    # determinant identity against the oracle f
    E, _, G = equator_first_form_closed(kappa, tau, x)
    ke = equator_Ke_closed_form(kappa, tau, x)
    ident = float(np.max(np.abs(ke * E * G + f_oracle**2))) / max(
        float(np.max(np.abs(ke * E * G))), 1e-12)
    big = np.abs(direct) > 1e-6 * scale_d
    ratios = np.abs(direct[big]) / np.abs(consistent[big]) if np.any(big) else np.array([kappa**2])
    ratio = float(np.mean(ratios))
    ratio_err = abs(ratio - kappa**2) / kappa**2
    winner = "determinant-consistent" if res_consistent < res_direct else "direct"
    degenerate_family = abs(kappa - 4 * tau**2) < 1e-12 or abs(kappa**2 - 1) < 1e-12
    passed = (res_consistent < 1e-4) and (ident < 1e-4) and (
        degenerate_family or (winner == "determinant-consistent" and ratio_err < 1e-6))
    notes = (
        f"oracle matches the {winner} candidate; candidates differ by the factor "
        f"kappa^2 = {kappa**2:g} (measured {ratio:.9g}); the direct closed form "
        "overstates II(psi_x, psi_y) by that factor"
    )
    if degenerate_family:
        notes = "candidates coincide for this (kappa, tau); identity check only"
    return VerificationReport(
        check="equator-ii-adjudication",
        params={"kappa": kappa, "tau": tau, "theta": theta, "grid": grid_n},
        max_residual=max(res_consistent, ident),
        slack=res_direct - res_consistent,
        passed=passed,
        notes=notes,
        details={
            "winner": winner,
            "residual_direct": res_direct,
            "residual_consistent": res_consistent,
            "identity_rel_err": ident,
            "candidate_ratio": ratio,
        },
    )


# ---------------------------------------------------------------------------
# Heisenberg plane bounds
# ---------------------------------------------------------------------------

def heisenberg_plane_bound(tau: float, coeffs, grid_n: int = 50,
                           extent: float = 3.0) -> VerificationReport:
    """max |k_i| <= |tau| for the affine plane a x + b y + c z = d."""
    space = sp.Heisenberg(tau)
    a, b, c, d = coeffs
    plane = imm.AffinePlane(a, b, c, d, extent=extent)
    sg = imm.shape_grid(plane, space, *plane.grid(grid_n, grid_n))
    kmax = float(np.max(np.abs(np.stack([sg.k1, sg.k2]))))
    vertical = abs(c) < 1e-12
    maxH = float(np.max(np.abs(sg.H)))
    passed = kmax <= abs(tau) + 1e-6
    notes = ""
    if vertical:
        passed = passed and maxH < 1e-7
        notes = f"vertical plane: minimal, max|H| = {maxH:.2e}"
    return VerificationReport(
        check="heisenberg-plane-bound",
        params={"tau": tau, "a": a, "b": b, "c": c, "d": d, "grid": grid_n},
        max_residual=max(kmax - abs(tau), 0.0),
        slack=abs(tau) + 1e-6 - kmax,
        passed=passed,
        notes=notes,
        details={"max_abs_k": kmax, "max_abs_H": maxH, "vertical": vertical},
    )


def heis_planes_suite(tau: float, n_random: int = 20, grid_n: int = 50,
                      seed: int = 0) -> list[VerificationReport]:
    """Horizontal + vertical + random affine planes."""
    rng = np.random.default_rng(seed)
    reports = [
        heisenberg_plane_bound(tau, (0.0, 0.0, 1.0, 0.0), grid_n),
        heisenberg_plane_bound(tau, (0.0, 1.0, 0.0, 0.0), grid_n),
    ]
    for _ in range(n_random):
        n = rng.standard_normal(3)
        n /= np.linalg.norm(n)
        d = rng.uniform(-1.0, 1.0)
        reports.append(heisenberg_plane_bound(tau, (n[0], n[1], n[2], d), grid_n))
    return reports


def vertical_plane_check(tau: float, direction: float = 0.0,
                         grid_n: int = 50) -> VerificationReport:
    """Vertical planes: minimal, |k_i| <= |tau|, angle function identically 0."""
    space = sp.Heisenberg(tau)
    plane = imm.VerticalPlane(direction)
    sg = imm.shape_grid(plane, space, *plane.grid(grid_n, grid_n))
    maxH = float(np.max(np.abs(sg.H)))
    kmax = float(np.max(np.abs(np.stack([sg.k1, sg.k2]))))
    numax = float(np.max(np.abs(sg.nu)))
    passed = maxH < 1e-7 and kmax <= abs(tau) + 1e-6 and numax < 1e-10
    return VerificationReport(
        check="vertical-plane",
        params={"tau": tau, "dir": direction, "grid": grid_n},
        max_residual=max(maxH, numax, kmax - abs(tau)),
        slack=abs(tau) + 1e-6 - kmax,
        passed=passed,
        notes=f"max|H|={maxH:.2e} max|k|={kmax:.8g} max|nu|={numax:.2e}",
        details={"max_abs_H": maxH, "max_abs_k": kmax, "max_abs_nu": numax},
    )


# ---------------------------------------------------------------------------
# comparability of the Berger and round metrics
# ---------------------------------------------------------------------------

def comparability_check(kappa: float, tau: float, n_samples: int = 10_000,
                        seed: int = 0) -> VerificationReport:
    """a^2 g_round - g_Berger is positive semidefinite on the tangent spaces."""
    space = sp.BergerSphere(kappa, tau)
    a2 = comparability_constant(kappa, tau)
    rng = np.random.default_rng(seed)
    P = rng.standard_normal((n_samples, 4))
    P /= np.linalg.norm(P, axis=1, keepdims=True)
    kb = _backend.get_backend()
    gB = kb.metric(space.code, space.params, P)
    worst = np.inf
    # tangent bases via the complement of the position vector
    for i in range(n_samples):
        p = P[i]
        _, _, vt = np.linalg.svd(p[None, :])
        basis = vt[1:]  # 3 euclidean-orthonormal tangent vectors
        m_round = basis @ basis.T
        m_b = basis @ gB[i] @ basis.T
        ev = np.linalg.eigvalsh(a2 * m_round - m_b)[0]
        worst = min(worst, float(ev))
    passed = worst >= -1e-12
    return VerificationReport(
        check="comparability",
        params={"kappa": kappa, "tau": tau, "samples": n_samples},
        max_residual=max(-worst, 0.0),
        slack=worst,
        passed=passed,
        notes=f"a^2 = {a2:.12g}; min eigenvalue of a^2 g_round - g_B = {worst:.3e}",
        details={"a_squared": a2, "min_eigenvalue": worst},
    )


# ---------------------------------------------------------------------------
# connection integrity
# ---------------------------------------------------------------------------

def berger_connection_integrity(kappa: float, tau: float, n_points: int = 100,
                                seed: int = 0) -> VerificationReport:
    """The frame connection table vs the kernel's Christoffel route:
    agreement, torsion-freeness and metric compatibility, all < 1e-8."""
    space = sp.BergerSphere(kappa, tau)
    rng = np.random.default_rng(seed)
    mats = {"E1": sp.E1_MAT, "E2": sp.E2_MAT, "V": sp.V_MAT}
    norms = {"E1": 4 / kappa, "E2": 4 / kappa, "V": 16 * tau**2 / kappa**2}
    worst_table = 0.0
    worst_torsion = 0.0
    worst_compat = 0.0
    for _ in range(n_points):
        p = space.random_point(rng)
        x = p.coords
        g = geo.metric_matrix(space, p).g
        frame = {k: m @ x for k, m in mats.items()}
        cov = {}
        for ni, Ai in mats.items():
            for nj, Aj in mats.items():
                w = geo.covariant_derivative(space, p, frame[ni], geo.LinearField(Aj))
                cov[(ni, nj)] = w.components
                coef = sp.berger_connection(space, ni, nj)
                table_vec = sum(c * frame[nm] for c, nm in zip(coef, sp.FRAME_NAMES))
                diff = w.components - table_vec
                worst_table = max(worst_table, float(np.sqrt(diff @ g @ diff)))
        for (ni, Ai), (nj, Aj) in [(("E1", mats["E1"]), ("E2", mats["E2"])),
                                   (("E2", mats["E2"]), ("V", mats["V"])),
                                   (("V", mats["V"]), ("E1", mats["E1"]))]:
            bracket = (Aj @ Ai - Ai @ Aj) @ x
            t = cov[(ni, nj)] - cov[(nj, ni)] - bracket
            worst_torsion = max(worst_torsion, float(np.sqrt(t @ g @ t)))
        for ni in mats:
            for nj in mats:
                for nk in mats:
                    # frame inner products are constant, so X<Y,Z> = 0
                    r = cov[(ni, nj)] @ g @ frame[nk] + frame[nj] @ g @ cov[(ni, nk)]
                    worst_compat = max(worst_compat, abs(float(r)))
    worst = max(worst_table, worst_torsion, worst_compat)
    return VerificationReport(
        check="berger-connection-integrity",
        params={"kappa": kappa, "tau": tau, "points": n_points},
        max_residual=worst,
        slack=1e-8 - worst,
        passed=worst < 1e-8,
        notes=(f"table-vs-kernel {worst_table:.2e}, torsion {worst_torsion:.2e}, "
               f"metric-compat {worst_compat:.2e}"),
        details={"table": worst_table, "torsion": worst_torsion, "compat": worst_compat,
                 "frame_norms": norms},
    )


def heisenberg_christoffel_integrity(tau: float, n_points: int = 100,
                                     seed: int = 0) -> VerificationReport:
    """Finite-difference vs analytic Christoffel symbols, < 1e-6."""
    space = sp.Heisenberg(tau)
    rng = np.random.default_rng(seed)
    P = rng.uniform(-2, 2, (n_points, 3))
    kb = _backend.get_backend()
    worst = float(np.max(np.abs(
        kb.christoffel(space.code, space.params, P)
        - kb.christoffel_fd(space.code, space.params, P))))
    return VerificationReport(
        check="heisenberg-christoffel-integrity",
        params={"tau": tau, "points": n_points},
        max_residual=worst,
        slack=1e-6 - worst,
        passed=worst < 1e-6,
        notes=f"max |Gamma_fd - Gamma_analytic| = {worst:.2e}",
    )


def tau_estimate_check(space, n_points: int = 100, seed: int = 0,
                       expected: float | None = None) -> VerificationReport:
    """Constancy (and, when expected is given, the value) of the bundle
    curvature recovered from nabla_X xi = tau X ^ xi."""
    rng = np.random.default_rng(seed)
    vals = []
    for _ in range(n_points):
        p = space.random_point(rng)
        vals.append(sp.tau_estimate(space, p))
    vals = np.array(vals)
    std = float(np.std(vals))
    mean = float(np.mean(vals))
    residual = std if expected is None else max(std, float(np.max(np.abs(vals - expected))))
    passed = residual < 1e-7
    return VerificationReport(
        check="killing-tau-estimate",
        params={"space": space.space_id, "points": n_points,
                "expected": expected if expected is not None else "constancy-only"},
        max_residual=residual,
        slack=1e-7 - residual,
        passed=passed,
        notes=f"tau_hat = {mean:.12g} (std {std:.2e})",
        details={"mean": mean, "std": std},
    )


# ---------------------------------------------------------------------------
# pinched-manifold arithmetic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PinchingInequality:
    kappa_minus: float
    kappa_plus: float
    ratio: float
    injectivity_bound: float   # l >= 2 pi / sqrt(kappa_plus)
    bonnet_bound: float        # l <= pi / sqrt(kappa_minus)
    contradiction_possible: bool

    @property
    def bounds_compatible(self) -> bool:
        return self.injectivity_bound <= self.bonnet_bound


def pinching_inequality_check(kappa_minus: float, kappa_plus: float) -> PinchingInequality:
    """Whether the double-point length bounds can coexist: a connecting
    geodesic needs l >= 2 pi/sqrt(kappa+) yet l <= pi/sqrt(kappa-), which is
    possible exactly when kappa-/kappa+ <= 1/4."""
    if kappa_minus <= 0 or kappa_plus <= 0 or kappa_minus > kappa_plus:
        raise GeometryError("need 0 < kappa_minus <= kappa_plus")
    ratio = kappa_minus / kappa_plus
    return PinchingInequality(
        kappa_minus=kappa_minus,
        kappa_plus=kappa_plus,
        ratio=ratio,
        injectivity_bound=2 * math.pi / math.sqrt(kappa_plus),
        bonnet_bound=math.pi / math.sqrt(kappa_minus),
        contradiction_possible=ratio <= 0.25,
    )


def pinching_report(kappa_minus: float, kappa_plus: float) -> VerificationReport:
    pi_ = pinching_inequality_check(kappa_minus, kappa_plus)
    consistent = pi_.contradiction_possible == pi_.bounds_compatible
    verdict = ("double points arithmetically reachable" if pi_.contradiction_possible
               else "length bounds incompatible: embedding persists")
    return VerificationReport(
        check="pinching-inequality",
        params={"kappa_minus": kappa_minus, "kappa_plus": kappa_plus},
        max_residual=0.0 if consistent else 1.0,
        slack=pi_.ratio - 0.25,
        passed=consistent,
        notes=(f"ratio = {pi_.ratio:.6g}; l >= {pi_.injectivity_bound:.6g} vs "
               f"l <= {pi_.bonnet_bound:.6g}; {verdict}"),
        details={"ratio": pi_.ratio, "injectivity_bound": pi_.injectivity_bound,
                 "bonnet_bound": pi_.bonnet_bound,
                 "contradiction_possible": pi_.contradiction_possible},
    )


def bonnet_report(c: float, kappa_plus: float = 1.0) -> VerificationReport:
    """diam < pi/c; for kappa+ = 1 and c > 2 the geodesic-disk radius
    pi/2 - eps beats it for small eps."""
    bound = bonnet_diameter_bound(c)
    half = math.pi / (2 * math.sqrt(kappa_plus))
    margin = half - bound
    applicable = c > 2 and abs(kappa_plus - 1.0) < 1e-12
    passed = (margin > 0) if applicable else True
    notes = f"diam bound pi/c = {bound:.12g}"
    if applicable:
        notes += f"; disk radius pi/2 exceeds it by {margin:.6g} (eps can be chosen below that)"
    return VerificationReport(
        check="bonnet-diameter-bound",
        params={"c": c, "kappa_plus": kappa_plus},
        max_residual=0.0,
        slack=margin,
        passed=passed,
        notes=notes,
        details={"bound": bound, "disk_radius": half},
    )


# ---------------------------------------------------------------------------
# convex curves in the flat plane
# ---------------------------------------------------------------------------

def polyline_turning_curvature(points: np.ndarray) -> np.ndarray:
    """Discrete geodesic curvature of a closed flat polyline: exterior
    turning angle over the average adjacent edge length."""
    pts = np.asarray(points, dtype=np.float64)
    n = len(pts)
    prev_ = np.roll(pts, 1, axis=0)
    next_ = np.roll(pts, -1, axis=0)
    u = pts - prev_
    w = next_ - pts
    ang = np.arctan2(u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0],
                     np.einsum("ni,ni->n", u, w))
    le = 0.5 * (np.linalg.norm(u, axis=1) + np.linalg.norm(w, axis=1))
    return ang / le


def min_enclosing_circle(points: np.ndarray, seed: int = 0):
    """Welzl's algorithm; returns (center, radius)."""
    pts = [tuple(map(float, p)) for p in np.asarray(points, dtype=np.float64)]
    rnd = random.Random(seed)
    rnd.shuffle(pts)
    c = None
    for i, p in enumerate(pts):
        if c is None or not _in_circle(c, p):
            c = _circle_one(pts[: i + 1], p)
    if c is None:
        raise GeometryError("no points given")
    return np.array([c[0], c[1]]), c[2]


def _in_circle(c, p, rel=1e-12):
    return math.hypot(p[0] - c[0], p[1] - c[1]) <= c[2] * (1 + rel) + 1e-15


def _circle_one(pts, p):
    c = (p[0], p[1], 0.0)
    for i, q in enumerate(pts):
        if not _in_circle(c, q):
            if c[2] == 0.0:
                c = _diameter(p, q)
            else:
                c = _circle_two(pts[: i + 1], p, q)
    return c


def _circle_two(pts, p, q):
    c = _diameter(p, q)
    left = right = None
    px, py = p
    qx, qy = q
    for r in pts:
        if _in_circle(c, r):
            continue
        cross = (qx - px) * (r[1] - py) - (qy - py) * (r[0] - px)
        cc = _circumcircle(p, q, r)
        if cc is None:
            continue
        ccx = (qx - px) * (cc[1] - py) - (qy - py) * (cc[0] - px)
        if cross > 0 and (left is None or ccx > (qx - px) * (left[1] - py) - (qy - py) * (left[0] - px)):
            left = cc
        elif cross < 0 and (right is None or ccx < (qx - px) * (right[1] - py) - (qy - py) * (right[0] - px)):
            right = cc
    if left is None and right is None:
        return c
    if left is None:
        return right
    if right is None:
        return left
    return left if left[2] <= right[2] else right


def _diameter(p, q):
    cx, cy = (p[0] + q[0]) / 2, (p[1] + q[1]) / 2
    return (cx, cy, math.hypot(p[0] - cx, p[1] - cy))


def _circumcircle(p, q, r):
    ax, ay = p
    bx, by = q
    cx, cy = r
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0:
        return None
    ux = ((ax**2 + ay**2) * (by - cy) + (bx**2 + by**2) * (cy - ay) + (cx**2 + cy**2) * (ay - by)) / d
    uy = ((ax**2 + ay**2) * (cx - bx) + (bx**2 + by**2) * (ax - cx) + (cx**2 + cy**2) * (bx - ax)) / d
    return (ux, uy, math.hypot(ax - ux, ay - uy))


def convex_curve_radius_check(points: np.ndarray, c: float,
                              tol: float | None = None) -> VerificationReport:
    """A closed flat polyline with discrete curvature >= c at every vertex is
    enclosed by a circle of radius <= 1/c (+ mesh tolerance)."""
    pts = np.asarray(points, dtype=np.float64)
    if c <= 0:
        raise GeometryError("need c > 0")
    k = polyline_turning_curvature(pts)
    if np.min(k) < c * (1 - 1e-9):
        raise GeometryError(
            f"curvature precondition violated: min discrete curvature "
            f"{np.min(k):.6g} < declared c = {c:g}")
    seg = float(np.max(np.linalg.norm(pts - np.roll(pts, 1, axis=0), axis=1)))
    if tol is None:
        tol = 2.0 * seg
    _, radius = min_enclosing_circle(pts)
    passed = radius <= 1.0 / c + tol
    return VerificationReport(
        check="convex-curve-radius",
        params={"c": c, "n_vertices": len(pts), "tol": tol},
        max_residual=max(radius - 1.0 / c, 0.0),
        slack=1.0 / c + tol - radius,
        passed=passed,
        notes=f"enclosing radius {radius:.9g} vs 1/c = {1.0 / c:.9g} (+ tol {tol:.3g})",
        details={"radius": radius, "min_curvature": float(np.min(k))},
    )


def pinching_fixture_report(surface: sp.Surface2D, grid_n: int = 64) -> VerificationReport:
    kmin, kmax, ratio = sp.pinching_ratio(surface, grid_n)
    quarter = ratio > 0.25
    return VerificationReport(
        check="pinching-ratio",
        params={"surface": surface.space_id, "grid": grid_n},
        max_residual=0.0,
        slack=ratio - 0.25,
        passed=True,
        notes=(f"kappa- = {kmin:.6g}, kappa+ = {kmax:.6g}, ratio = {ratio:.6g}: "
               + ("quarter-pinched" if quarter else "not quarter-pinched")),
        details={"kappa_minus": kmin, "kappa_plus": kmax, "ratio": ratio,
                 "quarter_pinched": quarter},
    )
