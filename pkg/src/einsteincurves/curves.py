"""Timelike curve model and the conformal strain machinery.

A curve is stored as an evaluator of a null lift t -> X(t) in Poincaré
coordinates together with its derivatives.  All strain computations first
pass to the unit-section representative X / |time part|, differentiating the
normalisation analytically in jet arithmetic, so the choice of lift never
leaks into the invariants.
"""

from __future__ import annotations

import csv
import io
import numpy as np
from scipy.integrate import quad
from scipy.interpolate import make_interp_spline

from . import jets
from .errors import (
    DegenerateCurveError,
    DomainError,
    NotGenericError,
    NumericError,
    UsageError,
)
from .geometry import GRAM_POINCARE, future_rate

__all__ = [
    "TimelikeCurve",
    "split_components",
    "strain_density",
    "strain_density_jet",
    "osculating_space",
    "normal_projector",
    "VertexScan",
    "find_vertices",
    "maslov_index",
    "total_strain",
    "reparametrize_by_strain",
    "curve_from_csv",
    "curve_to_csv",
    "conformal_cycle",
]

_EPS = np.finfo(float).eps

# centered stencils: order -> (offsets, weights, denominator power)
_STENCILS = {
    1: (np.arange(-2, 3), np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0),
    2: (np.arange(-2, 3), np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0),
    3: (np.arange(-2, 3), np.array([-1.0, 2.0, 0.0, -2.0, 1.0]) / 2.0),
    4: (np.arange(-3, 4), np.array([-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0]) / 6.0),
}


class TimelikeCurve:
    """Evaluator of a future-directed timelike curve in the null-ray model.

    Parameters
    ----------
    jet_fn : callable, optional
        Maps a scalar parameter jet to the 5-vector jet of the null lift;
        gives exact derivatives of any order.
    deriv_fn : callable, optional
        Maps (t, order) to an array (order+1, 5) of derivatives; used by
        ODE-backed curves.
    point_fn : callable, optional
        Maps t to the 5-vector lift only; derivatives are taken with
        centered finite-difference stencils (order <= 4).
    period : float, optional
        Minimal period for closed curves.
    domain : tuple, optional
        Parameter interval for open curves.
    """

    def __init__(
        self,
        jet_fn=None,
        deriv_fn=None,
        point_fn=None,
        period=None,
        domain=None,
        max_order=None,
        fd_scale=1.0,
        meta=None,
    ):
        if sum(f is not None for f in (jet_fn, deriv_fn, point_fn)) != 1:
            raise UsageError("provide exactly one of jet_fn, deriv_fn, point_fn")
        self._jet_fn = jet_fn
        self._deriv_fn = deriv_fn
        self._point_fn = point_fn
        self.period = period
        self.domain = domain
        self.max_order = max_order if max_order is not None else (4 if point_fn else 16)
        self.fd_scale = fd_scale
        self.meta = dict(meta or {})

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, t: float, order: int) -> np.ndarray:
        """Derivatives X, X', ..., X^(order) of the null lift at t."""
        if order > self.max_order:
            raise UsageError(
                f"curve supports derivatives up to order {self.max_order}, got {order}"
            )
        if self._jet_fn is not None:
            return self._jet_fn(jets.variable(t, order)).derivatives()
        if self._deriv_fn is not None:
            return np.asarray(self._deriv_fn(t, order), dtype=float)
        out = np.empty((order + 1, 5))
        out[0] = self._point_fn(t)
        for k in range(1, order + 1):
            offs, w = _STENCILS[k]
            h = _EPS ** (1.0 / (k + 2)) * self.fd_scale
            vals = np.stack([self._point_fn(t + o * h) for o in offs])
            out[k] = (w @ vals) / h**k
        return out

    def jet(self, t: float, order: int) -> jets.Jet:
        return jets.from_derivatives(self.evaluate(t, order))

    def section_jet(self, t: float, order: int) -> jets.Jet:
        """Jet of the unit-section representative (time part normalised)."""
        x = self.jet(t, order)
        lam2 = x.component(0) * x.component(0) + x.component(1) * x.component(1)
        return x * lam2.sqrt().reciprocal()

    def point(self, t: float) -> np.ndarray:
        """Unit-section representative at t."""
        x = self.evaluate(t, 0)[0]
        return x / np.hypot(x[0], x[1])

    # -- derived curves -------------------------------------------------------

    def transformed(self, matrix: np.ndarray) -> "TimelikeCurve":
        """Image under a linear conformal transformation (Poincaré coords)."""
        matrix = np.asarray(matrix, dtype=float)

        def deriv(t, order):
            return self.evaluate(t, order) @ matrix.T

        return TimelikeCurve(
            deriv_fn=deriv,
            period=self.period,
            domain=self.domain,
            max_order=self.max_order,
            meta=self.meta,
        )

    def reparametrized(self, f_jet, f_inverse=None, period=None, domain=None) -> "TimelikeCurve":
        """Curve t -> X(f(t)) for a smooth parameter change given as a jet map."""

        def deriv(t, order):
            fj = f_jet(jets.variable(t, order))
            inner = self.jet(float(fj.value), order)
            return jets.compose(inner, fj).derivatives()

        return TimelikeCurve(
            deriv_fn=deriv,
            period=period,
            domain=domain,
            max_order=self.max_order,
            meta=self.meta,
        )

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_samples(cls, t, x, periodic=False):
        """Quintic-spline curve through rows of x (shape (n, 5)) at parameters t."""
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.shape[1] != 5:
            raise UsageError("samples must have shape (n, 5)")
        if np.any(np.diff(t) <= 0):
            raise UsageError("sample parameters must be strictly increasing")
        period = None
        if periodic:
            period = t[-1] - t[0]
            if np.linalg.norm(x[-1] - x[0]) > 1e-8 * np.max(np.abs(x)):
                raise UsageError("periodic samples must close up")
            spl = make_interp_spline(t, x, k=5, bc_type="periodic")
        else:
            spl = make_interp_spline(t, x, k=5)

        def deriv(s, order):
            if periodic:
                s = t[0] + (s - t[0]) % period
            return np.stack([spl(s, nu=k) for k in range(order + 1)])

        return cls(
            deriv_fn=deriv,
            period=period,
            domain=None if periodic else (t[0], t[-1]),
            max_order=5,
        )


def split_components(curve: TimelikeCurve, t: float):
    """Time and space components (eta, beta) of the section representative."""
    p = curve.point(t)
    return p[:2].copy(), p[2:].copy()


def _osculating_gram(g):
    """Span basis (gamma, gamma', gamma'') and its 3x3 Gram from derivatives."""
    b = np.stack([g[0], g[1], g[2]], axis=1)
    return b, b.T @ GRAM_POINCARE @ b


def strain_density(curve: TimelikeCurve, t: float) -> float:
    """Fourth root of the normal-projected third-derivative norm over the
    squared speed, evaluated on the unit-section representative."""
    g = curve.section_jet(t, 3).derivatives()
    b, gram3 = _osculating_gram(g)
    if abs(np.linalg.det(gram3)) < 1e-12:
        raise DegenerateCurveError(f"osculating span rank-deficient at t={t}")
    coef = np.linalg.solve(gram3, b.T @ GRAM_POINCARE @ g[3])
    pn = g[3] - b @ coef
    q = float(pn @ GRAM_POINCARE @ pn)
    denom = abs(float(g[1] @ GRAM_POINCARE @ g[1]))
    return max(q, 0.0) ** 0.25 / denom**0.25


def strain_density_jet(curve: TimelikeCurve, t: float, order: int) -> jets.Jet:
    """Jet of the strain density; needs section jets of order 3 + order."""
    g = curve.section_jet(t, 3 + order)
    d = [g.deriv_jet(k).truncate(order) for k in range(4)]
    gram = [[jets.jet_dot(d[i], d[j], GRAM_POINCARE) for j in range(3)] for i in range(3)]
    rhs = [jets.jet_dot(d[i], d[3], GRAM_POINCARE) for i in range(3)]
    # Cramer solve of the 3x3 jet system
    det = (
        gram[0][0] * (gram[1][1] * gram[2][2] - gram[1][2] * gram[2][1])
        - gram[0][1] * (gram[1][0] * gram[2][2] - gram[1][2] * gram[2][0])
        + gram[0][2] * (gram[1][0] * gram[2][1] - gram[1][1] * gram[2][0])
    )
    if abs(det.value) < 1e-12:
        raise DegenerateCurveError(f"osculating span rank-deficient at t={t}")
    coef = []
    for j in range(3):
        cols = [[gram[i][k] if k != j else rhs[i] for k in range(3)] for i in range(3)]
        dj = (
            cols[0][0] * (cols[1][1] * cols[2][2] - cols[1][2] * cols[2][1])
            - cols[0][1] * (cols[1][0] * cols[2][2] - cols[1][2] * cols[2][0])
            + cols[0][2] * (cols[1][0] * cols[2][1] - cols[1][1] * cols[2][0])
        )
        coef.append(dj / det)
    pn = d[3] - (coef[0] * d[0] + coef[1] * d[1] + coef[2] * d[2])
    q = jets.jet_dot(pn, pn, GRAM_POINCARE)
    v2 = jets.jet_dot(d[1], d[1], GRAM_POINCARE)
    ratio = q * (-v2).reciprocal()
    return ratio.sqrt().sqrt()


def osculating_space(curve: TimelikeCurve, t: float):
    """Orthonormalised basis of span(gamma, gamma', gamma'') with Gram
    diag(-1,-1,+1), together with the normal projector."""
    g = curve.section_jet(t, 2).derivatives()
    b, gram3 = _osculating_gram(np.vstack([g, np.zeros((1, 5))]))
    if abs(np.linalg.det(gram3)) < 1e-12:
        raise DegenerateCurveError(f"osculating span rank-deficient at t={t}")
    w, v = np.linalg.eigh(gram3)
    order = np.argsort(w)  # two negatives first, then the positive
    basis = b @ v[:, order] / np.sqrt(np.abs(w[order]))
    return basis, normal_projector(b)


def normal_projector(span: np.ndarray) -> np.ndarray:
    """Projector onto the orthogonal complement of the column span (with
    respect to the indefinite product)."""
    gram = span.T @ GRAM_POINCARE @ span
    pt = span @ np.linalg.solve(gram, span.T @ GRAM_POINCARE)
    return np.eye(5) - pt


class VertexScan:
    """Result of a vertex search: kind is 'generic' or 'cycle'."""

    def __init__(self, kind, vertices):
        self.kind = kind
        self.vertices = list(vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __repr__(self):
        return f"VertexScan(kind={self.kind!r}, vertices={self.vertices})"


def find_vertices(curve: TimelikeCurve, span=None, n: int = 400, tol: float = 1e-7) -> VertexScan:
    """Locate parameters where the strain density touches zero.

    A sub-interval where the density stays below 1e-10 is reported as the
    conformal-cycle degenerate case instead of infinitely many vertices.
    Isolated minima are refined by a parabola fit on the squared density,
    which is exact for the generic conical zero.
    """
    a, b = _resolve_span(curve, span)
    ts = np.linspace(a, b, n)
    ups = np.array([strain_density(curve, t) for t in ts])
    below = ups < 1e-10
    run = _longest_run(below)
    if run >= max(3, n // 20):
        return VertexScan("cycle", [])
    verts = []
    for i in range(1, n - 1):
        if ups[i] <= ups[i - 1] and ups[i] <= ups[i + 1] and ups[i] < np.median(ups) * 0.5:
            t0 = _refine_vertex(curve, ts[i - 1], ts[i + 1])
            if strain_density(curve, t0) < tol:
                verts.append(t0)
    # merge near-duplicates
    verts.sort()
    merged = []
    for t0 in verts:
        if not merged or abs(t0 - merged[-1]) > 1e-6 * (b - a):
            merged.append(t0)
    return VertexScan("generic", merged)


def _longest_run(mask) -> int:
    best = cur = 0
    for flag in mask:
        cur = cur + 1 if flag else 0
        best = max(best, cur)
    return best


def _refine_vertex(curve, lo, hi):
    from scipy.optimize import minimize_scalar

    f = lambda t: strain_density(curve, t) ** 2
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    t0 = res.x
    # parabola vertex on the squared density; exact for conical zeros
    h = max(1e-5 * (hi - lo), 1e-9)
    f0, fm, fp = f(t0), f(t0 - h), f(t0 + h)
    denom = fm - 2 * f0 + fp
    if denom > 0:
        t0 = t0 - 0.5 * h * (fp - fm) / denom
    return t0


def _resolve_span(curve, span):
    if span is not None:
        return span
    if curve.period is not None:
        return 0.0, curve.period
    if curve.domain is not None:
        return curve.domain
    raise UsageError("curve has no period or domain; pass an explicit span")


def maslov_index(curve: TimelikeCurve, n: int = 720) -> int:
    """Winding number of the time component of a closed curve."""
    if curve.period is None:
        raise UsageError("Maslov index requires a closed curve")
    ts = np.linspace(0.0, curve.period, n + 1)
    eta = np.array([curve.point(t)[:2] for t in ts])
    ang = np.unwrap(np.arctan2(eta[:, 1], eta[:, 0]))
    wind = (ang[-1] - ang[0]) / (2 * np.pi)
    if abs(wind - round(wind)) > 0.1:
        raise NumericError(f"winding {wind} not close to an integer; sample denser")
    return int(round(wind))


def total_strain(curve: TimelikeCurve, a: float = None, b: float = None) -> float:
    if a is None or b is None:
        a, b = _resolve_span(curve, None)
    val, err = quad(lambda t: strain_density(curve, t), a, b, limit=200)
    if err > 1e-8 * max(1.0, abs(val)):
        raise NumericError("strain quadrature did not converge")
    return val


def reparametrize_by_strain(curve: TimelikeCurve, t0: float = None, nodes: int = 256):
    """Curve in conformal parameter: strain density identically one.

    Constant-density curves get an exact affine parameter change; otherwise a
    cumulative-strain table is inverted with Newton iterations and the jets of
    the new evaluator are produced by series inversion and composition.
    """
    a, b = _resolve_span(curve, None)
    if t0 is None:
        t0 = a
    probe = np.linspace(a, b, 33)
    vals = np.array([strain_density(curve, t) for t in probe])
    if np.min(vals) < 1e-8:
        raise NotGenericError("curve has a conformal vertex; no conformal parameter")
    mean = float(np.mean(vals))
    if np.max(np.abs(vals - mean)) < 1e-12 * mean:
        ups = mean

        def f_jet(uj):  # affine parameter change t = t0 + u / upsilon
            return uj * (1.0 / ups) + t0

        new = curve.reparametrized(
            f_jet,
            period=None if curve.period is None else curve.period * ups,
            domain=None if curve.period is not None else (0.0, (b - a) * ups),
        )
        new.meta["conformal_parameter"] = True
        return new

    # general case: cumulative strain table over [a, b]
    ts = np.linspace(a, b, nodes + 1)
    us = np.zeros(nodes + 1)
    xg, wg = np.polynomial.legendre.leggauss(12)
    for i in range(nodes):
        mid, half = 0.5 * (ts[i] + ts[i + 1]), 0.5 * (ts[i + 1] - ts[i])
        us[i + 1] = us[i] + half * sum(
            w * strain_density(curve, mid + half * x) for x, w in zip(xg, wg)
        )
    u0 = np.interp(t0, ts, us)
    us -= u0
    total = us[-1] - us[0]

    def t_of_u(u):
        if curve.period is not None:
            u = us[0] + (u - us[0]) % total
        t = np.interp(u, us, ts)
        for _ in range(60):
            i = min(np.searchsorted(ts, t) - 1, nodes - 1)
            i = max(i, 0)
            mid, half = 0.5 * (ts[i] + t), 0.5 * (t - ts[i])
            ui = us[i] + half * sum(
                w * strain_density(curve, mid + half * x) for x, w in zip(xg, wg)
            )
            step = (ui - u) / strain_density(curve, t)
            t -= step
            if abs(step) < 1e-13 * max(1.0, abs(t)):
                break
        else:
            raise NumericError("parameter inversion did not converge")
        return t

    def deriv(u, order):
        t = t_of_u(u)
        vj = strain_density_jet(curve, t, max(order - 1, 0)).truncate(max(order - 1, 0))
        # Taylor coefficients of u(t) at t: u' = upsilon
        uc = np.zeros(order + 1)
        uc[0] = u
        for k in range(1, order + 1):
            uc[k] = vj.c[k - 1] / k if k - 1 <= vj.order else 0.0
        tj = jets.invert_series(jets.Jet(uc), t0=t)
        inner = curve.jet(t, order)
        return jets.compose(inner, tj).derivatives()

    new = TimelikeCurve(
        deriv_fn=deriv,
        period=total if curve.period is not None else None,
        domain=None if curve.period is not None else (us[0], us[-1]),
        max_order=max(curve.max_order - 3, 2),
    )
    new.meta["conformal_parameter"] = True
    return new


def conformal_cycle() -> TimelikeCurve:
    """Centerline of the positive adS chamber; the model conformal cycle."""

    def jet_fn(tj):
        s, c = tj.sincos()
        rows = [c, s, jets.constant(1.0, tj.order), jets.constant(0.0, tj.order), jets.constant(0.0, tj.order)]
        return jets.Jet(np.stack([r.c for r in rows], axis=1))

    return TimelikeCurve(jet_fn=jet_fn, period=2 * np.pi)


def curve_to_csv(curve: TimelikeCurve, path_or_buf, n: int = 512, span=None):
    """Write sampled unit-section coordinates as CSV `t,x0,...,x4`."""
    a, b = _resolve_span(curve, span)
    ts = np.linspace(a, b, n)
    rows = [[t, *curve.point(t)] for t in ts]
    close = False
    if isinstance(path_or_buf, (str, bytes)):
        path_or_buf = open(path_or_buf, "w", newline="")
        close = True
    try:
        w = csv.writer(path_or_buf)
        w.writerow(["t", "x0", "x1", "x2", "x3", "x4"])
        w.writerows(rows)
    finally:
        if close:
            path_or_buf.close()


def curve_from_csv(path_or_buf, periodic=None) -> TimelikeCurve:
    """Read a sampled curve CSV `t,x0,...,x4` (monotone t) into a spline curve."""
    if isinstance(path_or_buf, (str, bytes)):
        with open(path_or_buf, newline="") as fh:
            return curve_from_csv(io.StringIO(fh.read()), periodic=periodic)
    reader = csv.reader(path_or_buf)
    header = next(reader)
    if [h.strip() for h in header[:6]] != ["t", "x0", "x1", "x2", "x3", "x4"]:
        raise UsageError("expected header t,x0,x1,x2,x3,x4")
    data = np.array([[float(v) for v in row[:6]] for row in reader])
    if data.shape[0] < 8:
        raise UsageError("need at least 8 samples")
    t, x = data[:, 0], data[:, 1:]
    if periodic is None:
        periodic = np.linalg.norm(x[-1] - x[0]) < 1e-6 * np.max(np.abs(x))
    return TimelikeCurve.from_samples(t, x, periodic=periodic)


def validate_timelike(curve: TimelikeCurve, span=None, n: int = 64):
    """Check the defining inequalities on a sample grid; raises DomainError."""
    a, b = _resolve_span(curve, span)
    for t in np.linspace(a, b, n):
        g = curve.section_jet(t, 1).derivatives()
        p, v = g[0], g[1]
        null_res = abs(p @ GRAM_POINCARE @ p)
        if null_res > 1e-9:
            raise DomainError(f"not on the null cone at t={t}: {null_res:.2e}")
        te = v[0] ** 2 + v[1] ** 2
        sp = v[2] ** 2 + v[3] ** 2 + v[4] ** 2
        if not te > sp:
            raise DomainError(f"not timelike at t={t}")
        if future_rate(p[:2], v[:2]) <= 0:
            raise DomainError(f"not future-directed at t={t}")
