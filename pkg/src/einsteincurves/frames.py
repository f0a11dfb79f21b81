"""Canonical conformal frame, conformal curvatures, Frenet integration and
the curvature operator.

A frame is a 5x5 matrix F with F^T m F = m  and det F = +1, where m is the
Möbius-basis Gram matrix; its columns are the Möbius coordinates of the
frame vectors.  Curve-side computations run in Poincaré coordinates and are
converted through the transition matrix at the boundary.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

from . import jets
from .curves import TimelikeCurve, reparametrize_by_strain, strain_density
from .errors import ConsistencyError, NotGenericError, NumericError, UsageError
from .geometry import GRAM_MOBIUS, GRAM_POINCARE, T_MP

__all__ = [
    "frenet_matrix",
    "is_mobius_frame",
    "frame_gram_residual",
    "mobius_dual",
    "canonical_frame_at",
    "CurvatureProfile",
    "curvature_profile",
    "integrate_frenet",
    "curvature_operator",
    "reorthonormalize",
    "frame_to_poincare",
    "frame_path_to_csv",
]

_T_MP_INV = np.linalg.inv(T_MP)


def frenet_matrix(k: float, h: float) -> np.ndarray:
    """Structure matrix of the canonical frame equations M' = M K(h, k)."""
    m = np.zeros((5, 5))
    m[0, 1] = -h
    m[0, 2] = 1.0
    m[1, 0] = 1.0
    m[1, 4] = h
    m[2, 3] = -k
    m[2, 4] = 1.0
    m[3, 2] = k
    m[4, 1] = -1.0
    return m


def frame_gram_residual(frame: np.ndarray) -> float:
    return float(np.max(np.abs(frame.T @ GRAM_MOBIUS @ frame - GRAM_MOBIUS)))


def is_mobius_frame(frame: np.ndarray, tol: float = 1e-9) -> bool:
    return (
        frame.shape == (5, 5)
        and frame_gram_residual(frame) < tol
        and abs(np.linalg.det(frame) - 1.0) < tol
    )


def mobius_dual(frame: np.ndarray) -> np.ndarray:
    """Inverse of a Möbius frame via the Gram matrix (the dual basis rows)."""
    return GRAM_MOBIUS @ frame.T @ GRAM_MOBIUS


def frame_to_poincare(frame: np.ndarray) -> np.ndarray:
    """Columns of the frame as Poincaré coordinate vectors."""
    return _T_MP_INV @ frame


def canonical_frame_at(curve: TimelikeCurve, u: float, gram_tol: float = 1e-9):
    """Canonical conformal frame and curvatures (k, h) at parameter u.

    The curve must be parametrized by conformal parameter (unit strain
    density); the construction is then algebraic in the jet of the section:

        M0 = gamma / speed,      M1 = M0',
        h  = -<M0'', M0''> / 2,  M4 = -M0'' - h M0,
        M2 = -M0''' - h' M0 - 2 h M1,   k M3 = M2' - M0,

    with the sign of k fixed by positive orientation of the frame.  Needs
    jets of the lift through order 5.
    """
    g = curve.section_jet(u, 5)
    v2 = -jets.jet_dot(g.deriv_jet(1), g.deriv_jet(1), GRAM_POINCARE)
    if v2.value <= 0:
        raise NotGenericError(f"curve not timelike at u={u}")
    m0 = g * v2.sqrt().reciprocal()  # order 5 jet of M0
    d = [m0.deriv_jet(k) for k in range(5)]
    h_jet = -0.5 * jets.jet_dot(d[2], d[2], GRAM_POINCARE)
    h = float(h_jet.value)
    m1 = d[1]
    m4 = -(d[2]) - h_jet * m0
    m2 = -(d[3]) - h_jet.deriv_jet(1) * m0 - 2.0 * (h_jet * m1)
    w = m2.deriv_jet(1).value - m0.value
    k2 = float(w @ GRAM_POINCARE @ w)

    cols = [m0.value, m1.value, m2.value, None, m4.value]
    unit_res = abs(float(m2.value @ GRAM_POINCARE @ m2.value) - 1.0)
    if unit_res > 1e-6:
        raise NotGenericError(
            f"strain density is not 1 at u={u} (<M2,M2> off by {unit_res:.2e}); "
            "reparametrize by strain first"
        )
    if k2 > 1e-20:
        k = np.sqrt(k2)
        m3 = w / k
    else:
        k = 0.0
        m3 = _complete_spacelike(cols)
    cols[3] = m3
    frame_p = np.stack(cols, axis=1)
    if np.linalg.det(frame_p) < 0:
        k = -k
        frame_p[:, 3] = -frame_p[:, 3]
    frame = T_MP @ frame_p
    res = frame_gram_residual(frame)
    if res > gram_tol:
        raise ConsistencyError(f"canonical frame Gram residual {res:.2e} at u={u}")
    # future-direction of the frame bivector in the reference space orientation
    biv = np.stack(
        [frame_p[:, 0], frame_p[:, 1] + frame_p[:, 2], *np.eye(5)[2:].tolist()], axis=1
    )
    if np.linalg.det(biv) <= 0:
        raise ConsistencyError(f"frame not future-oriented at u={u}")
    return frame, float(k), h


def _complete_spacelike(cols):
    """Unique spacelike unit vector orthogonal to the four given columns."""
    b = np.stack([c for c in cols if c is not None], axis=1)
    a = b.T @ GRAM_POINCARE
    _, _, vh = np.linalg.svd(a)
    n = vh[-1]
    nn = float(n @ GRAM_POINCARE @ n)
    if nn <= 0:
        raise ConsistencyError("orthogonal completion is not spacelike")
    return n / np.sqrt(nn)


class CurvatureProfile:
    """Sampled conformal curvatures in conformal parameter."""

    def __init__(self, u, k, h):
        self.u = np.asarray(u)
        self.k = np.asarray(k)
        self.h = np.asarray(h)

    def __iter__(self):
        return iter(zip(self.u, self.k, self.h))


def curvature_profile(curve: TimelikeCurve, n: int = 33, span=None) -> CurvatureProfile:
    """Curvatures along the curve after reparametrizing by strain."""
    if not curve.meta.get("conformal_parameter"):
        curve = reparametrize_by_strain(curve)
    if span is None:
        if curve.period is not None:
            span = (0.0, curve.period)
        elif curve.domain is not None:
            span = curve.domain
        else:
            raise UsageError("pass a span for curves without period or domain")
    us = np.linspace(span[0], span[1], n)
    ks, hs = [], []
    for u in us:
        _, k, h = canonical_frame_at(curve, u)
        ks.append(k)
        hs.append(h)
    return CurvatureProfile(us, ks, hs)


def integrate_frenet(k, h, frame0: np.ndarray, span, tol: float = 1e-11, n_out: int = 201):
    """Integrate the frame equations M' = M K(h(u), k(u)) from frame0.

    Returns (u samples, frames (n,5,5), curve points (n,5) in Poincaré
    coordinates).  Each output frame is re-orthonormalized; the drift after
    correction stays below 1e-10.
    """
    if not is_mobius_frame(frame0, tol=1e-7):
        raise UsageError("initial frame is not a Möbius frame")

    kf = k if callable(k) else (lambda u: float(k))
    hf = h if callable(h) else (lambda u: float(h))

    def rhs(u, y):
        m = y.reshape(5, 5)
        return (m @ frenet_matrix(kf(u), hf(u))).reshape(-1)

    sol = solve_ivp(
        rhs,
        span,
        frame0.reshape(-1),
        method="DOP853",
        rtol=tol,
        atol=tol * 1e-2,
        dense_output=True,
    )
    if not sol.success:
        raise NumericError(f"Frenet integration failed: {sol.message}")
    us = np.linspace(span[0], span[1], n_out)
    frames = np.empty((n_out, 5, 5))
    points = np.empty((n_out, 5))
    for i, u in enumerate(us):
        f = reorthonormalize(sol.sol(u).reshape(5, 5))
        frames[i] = f
        p = frame_to_poincare(f)[:, 0]
        points[i] = p / np.hypot(p[0], p[1])
    return us, frames, points


def reorthonormalize(frame: np.ndarray) -> np.ndarray:
    """Signature-aware Gram-Schmidt in the order (M1, M2, M3, M0, M4).

    The spacelike/timelike columns are orthonormalized first; the null pair
    is corrected last by solving the 2x2 pairing conditions, which preserves
    <M0, M4> = -1 without mixing the pair into the definite directions.
    """
    g = GRAM_MOBIUS
    f = frame.copy()

    def dot(a, b):
        return float(a @ g @ b)

    # timelike column M1 then spacelike M2, M3
    f[:, 1] /= np.sqrt(-dot(f[:, 1], f[:, 1]))
    v = f[:, 2] + dot(f[:, 2], f[:, 1]) * f[:, 1]
    f[:, 2] = v / np.sqrt(dot(v, v))
    v = f[:, 3] + dot(f[:, 3], f[:, 1]) * f[:, 1]
    v = v - dot(v, f[:, 2]) * f[:, 2]
    f[:, 3] = v / np.sqrt(dot(v, v))
    # project the null pair off the definite directions
    for j in (0, 4):
        v = f[:, j]
        v = v + dot(v, f[:, 1]) * f[:, 1]
        v = v - dot(v, f[:, 2]) * f[:, 2]
        v = v - dot(v, f[:, 3]) * f[:, 3]
        f[:, j] = v
    # null-pair correction: kill <M0,M0>, <M4,M4>, rescale <M0,M4> to -1
    for _ in range(3):
        a = dot(f[:, 0], f[:, 0])
        b = dot(f[:, 4], f[:, 4])
        c = dot(f[:, 0], f[:, 4])
        if abs(a) < 1e-15 and abs(b) < 1e-15 and abs(c + 1.0) < 1e-15:
            break
        m0 = f[:, 0] - a / (2 * c) * f[:, 4]
        m4 = f[:, 4] - b / (2 * c) * f[:, 0]
        c2 = dot(m0, m4)
        f[:, 0] = m0
        f[:, 4] = -m4 / c2
    return f


def curvature_operator(frame: np.ndarray, k: float, h: float) -> np.ndarray:
    """Frame-conjugated structure matrix M K(h,k) M*; an infinitesimal
    isometry of the ambient scalar product."""
    if not is_mobius_frame(frame, tol=1e-7):
        raise UsageError("not a Möbius frame")
    return frame @ frenet_matrix(k, h) @ mobius_dual(frame)


def frame_path_to_csv(path_or_buf, us, frames, ks, hs):
    """Write a frame path as CSV `u,M00..M44,k,h` (27 columns)."""
    import csv

    close = False
    if isinstance(path_or_buf, (str, bytes)):
        path_or_buf = open(path_or_buf, "w", newline="")
        close = True
    try:
        w = csv.writer(path_or_buf)
        header = ["u"] + [f"M{i}{j}" for i in range(5) for j in range(5)] + ["k", "h"]
        w.writerow(header)
        for u, f, k, h in zip(us, frames, ks, hs):
            w.writerow([u, *f.reshape(-1), k, h])
    finally:
        if close:
            path_or_buf.close()
