"""Constant-curvature timelike curves: the nine-class stratification of the
(k, h) half plane, closed-form parametrizations, the maps between class
parameters and curvatures, and chamber-trapping reports.

Regular classes C1-C4 (with the two branches of the second class) carry a
two-parameter family each; the exceptional classes C5-C8 carry one parameter
and C9 is a single curve.  Parametrizations are written in the basis kind in
which they are simplest (Lie, Poincaré or Möbius) and converted to Poincaré
coordinates for the returned evaluator.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from . import jets
from .curves import TimelikeCurve, strain_density
from .errors import DomainError, NumericError, UsageError
from .geometry import GRAM_POINCARE, basis_transition, chamber

__all__ = [
    "REGULAR_CLASSES",
    "EXCEPTIONAL_CLASSES",
    "classify",
    "in_domain",
    "curvatures_from_params",
    "params_from_curvatures",
    "parametrize",
    "TrappedReport",
    "trapped_report",
    "c2i_frequencies",
    "c2i_conformal_period",
]

REGULAR_CLASSES = ("C1", "C2i", "C2ii", "C3", "C4")
EXCEPTIONAL_CLASSES = ("C5", "C6", "C7i", "C7ii", "C8", "C9")

_STRATUM_TOL = 1e-9


def classify(k: float, h: float, tol: float = _STRATUM_TOL) -> str:
    """Stratum of a constant-curvature pair with k >= 0.

    The boundary strata are matched first: the single point C9 = (1, -1/2),
    the hyperbola h = -1/(2 k^2) split into C5 (k > 1) and C6 (k < 1), the
    parabola k^2 - 2h = 2 split into C7ii (k > 1) and C8 (k < 1), and the
    parabola k^2 - 2h = -2 (C7i).  k = 0 is the adS-wall case, not a stratum.
    """
    if k < -tol:
        raise UsageError("classify expects k >= 0 (apply the orientation flip first)")
    if abs(k) <= tol:
        return "adS-wall"
    d = k * k - 2.0 * h
    scale = 1.0 + abs(k) + abs(h)
    if abs(k - 1.0) <= tol and abs(h + 0.5) <= tol:
        return "C9"
    if abs(h + 1.0 / (2 * k * k)) <= tol * scale:
        return "C5" if k > 1.0 else "C6"
    if abs(d - 2.0) <= tol * scale:
        return "C7ii" if k > 1.0 else "C8"
    if abs(d + 2.0) <= tol * scale:
        return "C7i"
    if -2.0 < d < 2.0:
        return "C1"
    if d < -2.0:
        return "C2i"
    # d > 2 from here on
    if h < -1.0 / (2 * k * k):
        return "C4"
    return "C2ii" if k > 1.0 else "C3"


def in_domain(cls: str, a: float = None, b: float = None) -> bool:
    """Membership of (a, b) (or b alone) in the parameter domain of a class."""
    if cls == "C1":
        return (
            -1 < a < 1
            and b > 0
            and (1 + b + a * (b - 1)) * (b - 1 + a * (1 + b)) < 0
        )
    if cls == "C2i":
        return 0 < a < 1 and 0 < b < 1
    if cls == "C2ii":
        return 0 < a < 1 and b > 1 and (1 - a * a) * b * b < 1
    if cls == "C3":
        return a > 0.25 and b > 1 and 4 * a * (b * b - 1) - (b * b + 1) > 0
    if cls == "C4":
        return 0 < a < 1 and b > 0 and a * a + (a * a - 1) * b * b > 0
    if cls in ("C5", "C7i", "C7ii"):
        return b > 1
    if cls in ("C6", "C8"):
        return 0 < b < 1
    if cls == "C9":
        return True
    raise UsageError(f"unknown class {cls!r}")


def curvatures_from_params(cls: str, a: float = None, b: float = None):
    """Constant curvatures (k, h) of the class member with given parameters."""
    if cls in REGULAR_CLASSES:
        if not in_domain(cls, a, b):
            raise DomainError(f"({a}, {b}) outside the parameter domain of {cls}")
        if cls == "C1":
            k = np.sqrt((1 + b * b) * (1 - a * a) / (2 * b * (1 + a * a)))
            h = (
                1 - 6 * b**2 + b**4 + 8 * a * b * (b * b - 1) - a * a * (b**4 - 6 * b * b + 1)
            ) / (4 * b * (1 + a * a) * (1 + b * b))
            return k, h
        if cls == "C2i":
            k = a * np.sqrt(b) / ((1 - b * b) ** 2 * (1 - a * a)) ** 0.25
            h = (1 - b**4 * (1 - a * a)) / (2 * b * (1 - b * b) * np.sqrt(1 - a * a))
            return k, h
        if cls == "C2ii":
            k = a * np.sqrt(b) / ((b * b - 1) ** 2 * (1 - a * a)) ** 0.25
            h = (1 - b**4 * (1 - a * a)) / (2 * b * (b * b - 1) * np.sqrt(1 - a * a))
            return k, h
        if cls == "C3":
            k = np.sqrt(2 * b) / ((b * b - 1) ** 2 * (16 * a * a - 1)) ** 0.25
            h = ((4 * a - 1) * b**4 - 4 * a - 1) / (2 * b * (b * b - 1) * np.sqrt(16 * a * a - 1))
            return k, h
        if cls == "C4":
            k = np.sqrt(b) / (a * a * (1 - a * a) * (1 + b * b) ** 2) ** 0.25
            h = (a * a * (b**4 - 1) - b**4) / (2 * a * b * np.sqrt(1 - a * a) * (1 + b * b))
            return k, h
    if cls in EXCEPTIONAL_CLASSES:
        bval = a if b is None else b
        if cls != "C9" and not in_domain(cls, b=bval):
            raise DomainError(f"b={bval} outside the parameter domain of {cls}")
        return _curvatures_from_orbit(parametrize(cls, b=bval))
    raise UsageError(f"unknown class {cls!r}")


def _curvatures_from_orbit(curve: TimelikeCurve, t: float = 0.3):
    """Curvatures of a homogeneous curve from its constant scalar products.

    Independent of the frame construction: uses the invariant combination of
    derivative products valid whenever <gamma^(n), gamma^(m)> are constants.
    """
    g = curve.section_jet(t, 5).derivatives()

    def dot(u, v):
        return float(u @ GRAM_POINCARE @ v)

    c2 = -dot(g[1], g[1])
    c = np.sqrt(c2)
    g4c = -(1 / c2) * g[2] + dot(g[2], g[2]) / (2 * c2 * c2) * g[0]
    g4p = -(1 / c2) * g[3] + dot(g[2], g[2]) / (2 * c2 * c2) * g[1]
    r4 = (
        dot(g4p, g4p) / c2
        + dot(g4p, g[1]) * dot(g[2], g[2]) / c**6
        + dot(g[2], g[2]) ** 2 * dot(g[1], g[1]) / (4 * c**10)
    )
    if r4 <= 0:
        raise DomainError("curve is a conformal cycle or not generic")
    r = r4**0.25
    m2p = (1 / (r * r * c)) * (-(1 / c2) * g[4] + dot(g[2], g[2]) / (2 * c2 * c2) * g[2]) + dot(
        g[2], g[2]
    ) / (2 * c**5 * r * r) * g[2]
    w = m2p - r * r * c * g[0]
    k = np.sqrt(max(dot(w, w), 0.0)) / (r * c)
    h = -dot(g[2], g[2]) / (2 * c**4 * r * r)
    return float(k), float(h)


def params_from_curvatures(cls: str, k: float, h: float, tol: float = 1e-12):
    """Invert the curvature map of a class by damped Newton iteration."""
    if cls in EXCEPTIONAL_CLASSES:
        if cls == "C9":
            return ()
        lo, hi = (1.0 + 1e-9, 60.0) if cls in ("C5", "C7i", "C7ii") else (1e-9, 1.0 - 1e-9)
        f = lambda b: curvatures_from_params(cls, b=b)[0] - k
        try:
            return (brentq(f, lo, hi, xtol=1e-13),)
        except ValueError as exc:
            raise NumericError(f"no {cls} parameter with k={k}: {exc}") from None

    x = np.array(_initial_guess(cls, k, h))
    target = np.array([k, h])
    for _ in range(80):
        fx = np.array(curvatures_from_params(cls, *x)) - target
        if np.max(np.abs(fx)) < tol:
            return tuple(x)
        jac = np.zeros((2, 2))
        for j in range(2):
            step = 1e-7 * max(1.0, abs(x[j]))
            xp = x.copy()
            xp[j] += step
            if not in_domain(cls, *xp):
                xp[j] -= 2 * step
                step = -step
            jac[:, j] = (np.array(curvatures_from_params(cls, *xp)) - fx - target) / step
        try:
            dx = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError:
            raise NumericError(f"singular Jacobian inverting {cls} at (k,h)=({k},{h})")
        lam = 1.0
        while lam > 1e-6:
            xn = x + lam * dx
            if in_domain(cls, *xn):
                fn = np.array(curvatures_from_params(cls, *xn)) - target
                if np.linalg.norm(fn) < np.linalg.norm(fx) or lam < 2e-6:
                    break
            lam /= 2
        x = x + lam * dx
    raise NumericError(
        f"Newton failed inverting {cls} at (k,h)=({k},{h}); residual {np.max(np.abs(fx)):.2e}"
    )


def _initial_guess(cls: str, k: float, h: float):
    grids = {
        "C1": (np.linspace(-0.9, 0.9, 19), np.geomspace(0.05, 20, 25)),
        "C2i": (np.linspace(0.05, 0.95, 19), np.linspace(0.05, 0.95, 19)),
        "C2ii": (np.linspace(0.05, 0.95, 19), np.geomspace(1.001, 30, 25)),
        "C3": (np.geomspace(0.26, 30, 25), np.geomspace(1.001, 30, 25)),
        "C4": (np.linspace(0.05, 0.95, 19), np.geomspace(0.05, 30, 25)),
    }
    best, bestval = None, np.inf
    for a in grids[cls][0]:
        for b in grids[cls][1]:
            if not in_domain(cls, a, b):
                continue
            kk, hh = curvatures_from_params(cls, a, b)
            val = (kk - k) ** 2 + (hh - h) ** 2
            if val < bestval:
                best, bestval = (a, b), val
    if best is None:
        raise DomainError(f"empty parameter domain search for {cls}")
    return best


# -- parametrizations ---------------------------------------------------------


def _jet_rows(rows) -> jets.Jet:
    return jets.Jet(np.stack([r.c for r in rows], axis=1))


def _const(val, order):
    return jets.constant(float(val), order)


def _lift(jet_fn, basis: str, period=None, meta=None) -> TimelikeCurve:
    if basis == "poincare":
        return TimelikeCurve(jet_fn=jet_fn, period=period, meta=meta)
    conv = basis_transition("poincare", basis)  # x_p = conv @ x_basis

    def wrapped(tj):
        v = jet_fn(tj)
        return jets.Jet(v.c @ conv.T)

    return TimelikeCurve(jet_fn=wrapped, period=period, meta=meta)


def parametrize(cls: str, a: float = None, b=None, **kwargs) -> TimelikeCurve:
    """Closed-form homogeneous curve of the given class.

    For C2i/C2ii a rational b may be passed as a Fraction or string "m/n";
    closure is then decided exactly and the returned curve carries its
    minimal period.
    """
    if cls in EXCEPTIONAL_CLASSES:
        bval = b if b is not None else a
        if cls != "C9" and not in_domain(cls, b=bval):
            raise DomainError(f"b={bval} outside the parameter domain of {cls}")
        return _parametrize_exceptional(cls, bval)
    frac = _as_fraction(b)
    bval = float(frac) if frac is not None else float(b)
    if not in_domain(cls, a, bval):
        raise DomainError(f"({a}, {bval}) outside the parameter domain of {cls}")
    if cls == "C1":
        return _c1(a, bval)
    if cls == "C2i":
        return _c2(a, bval, frac, branch=1)
    if cls == "C2ii":
        return _c2(a, bval, frac, branch=2)
    if cls == "C3":
        return _c3(a, bval)
    if cls == "C4":
        return _c4(a, bval)
    raise UsageError(f"unknown class {cls!r}")


def _as_fraction(b):
    if isinstance(b, Fraction):
        return b
    if isinstance(b, str) and "/" in b:
        num, den = b.split("/")
        return Fraction(int(num), int(den))
    if isinstance(b, tuple):
        return Fraction(*b)
    return None


def _c1(a, b):
    def f(tj):
        s, c = tj.sincos()
        ep = ((tj - np.pi / 4) * b).exp()
        em = ep.reciprocal()
        x0 = ep * (c + a * s)
        x1 = -(em * (s + a * c))
        x2 = _const(-np.sqrt(2 * (1 - a * a)), tj.order)
        x3 = ep * (a * c - s)
        x4 = em * (c - a * s)
        return _jet_rows([x0, x1, x2, x3, x4])

    return _lift(f, "lie", meta={"class": "C1", "params": (a, b)})


def _c2(a, b, frac, branch):
    sgn = 1.0 if branch == 1 else -1.0
    root = np.sqrt(1 - a * a)

    def f(tj):
        s, c = tj.sincos()
        sb, cb = (tj * b).sincos()
        x2 = _const(sgn * a, tj.order)
        x3 = root * cb
        x4 = -sgn * root * sb
        return _jet_rows([c, s, x2, x3, x4])

    period = None
    meta = {"class": "C2i" if branch == 1 else "C2ii", "params": (a, b)}
    if frac is not None:
        meta["b_fraction"] = frac
        period = 2 * np.pi * frac.denominator
    return _lift(f, "poincare", period=period, meta=meta)


def _c3(a, b):
    def f(tj):
        ep = tj.exp()
        em = (-tj).exp()
        ebm = (tj * (-b)).exp()
        ebp = (tj * b).exp()
        return _jet_rows(
            [
                ep * ((1 + 4 * a) / 4.0),
                ebm,
                _const(1.0, tj.order),
                ebp * ((1 - 4 * a) / 4.0),
                em,
            ]
        )

    return _lift(f, "lie", meta={"class": "C3", "params": (a, b)})


def _c4(a, b):
    root = np.sqrt(1 - a * a)

    def f(tj):
        sh, ch = tj.sinhcosh()
        sb, cb = (tj * b).sincos()
        return _jet_rows(
            [_const(1.0, tj.order), sh * a, ch * (-a), cb * root, sb * root]
        )

    return _lift(f, "poincare", meta={"class": "C4", "params": (a, b)})


def _parametrize_exceptional(cls, b):
    if cls == "C5":

        def f(tj):
            s, c = tj.sincos()
            return _jet_rows(
                [(1.0 - (tj * b) ** 2) * 0.5, tj * b, c, -s, _const(1.0, tj.order)]
            )

        return _lift(f, "mobius", meta={"class": "C5", "params": (b,)})
    if cls == "C6":
        # final basis coefficient reconstructed (= 1) from the null condition;
        # flagged because the source display is corrupted
        warnings.warn(
            "C6 parametrization uses a reconstructed final coefficient",
            stacklevel=2,
        )

        def f(tj):
            sh, ch = tj.sinhcosh()
            return _jet_rows(
                [(1.0 + (tj * b) ** 2) * 0.5, sh, ch, tj * b, _const(1.0, tj.order)]
            )

        return _lift(
            f, "mobius", meta={"class": "C6", "params": (b,), "reconstructed": True}
        )
    if cls == "C7i":

        def f(tj):
            s, c = tj.sincos()
            x0 = (c * (b * b - 1) - tj * s) * (1.0 / b)
            x1 = (tj * c + s * (b * b - 1)) * (1.0 / b)
            return _jet_rows(
                [x0, -x1, _const(np.sqrt(2 * (b * b - 1) / b), tj.order), -s, c]
            )

        return _lift(f, "lie", meta={"class": "C7i", "params": (b,)})
    if cls == "C7ii":

        def f(tj):
            s, c = tj.sincos()
            x0 = c * (1 + b * b) + tj * s
            x3 = tj * c - s * (1 + b * b)
            return _jet_rows(
                [x0, s * (-b), _const(-np.sqrt(2 * b * (1 + b * b)), tj.order), x3, c * b]
            )

        return _lift(f, "lie", meta={"class": "C7ii", "params": (b,)})
    if cls == "C8":

        def f(tj):
            ep = tj.exp()
            em = (-tj).exp()
            return _jet_rows(
                [
                    (b - tj) * ep,
                    ep * (-np.sqrt(1 - b)),
                    _const(2 * (b * b * (1 - b)) ** 0.25, tj.order),
                    (b + tj) * em * (-1.0),
                    em * np.sqrt(1 - b),
                ]
            )

        return _lift(f, "lie", meta={"class": "C8", "params": (b,)})
    if cls == "C9":

        def f(tj):
            return _jet_rows(
                [
                    (tj**4 + 6 * tj**2 - 3) * (1 / 24.0),
                    (tj**3 + tj * 3) * (1 / 6.0),
                    (tj**2 + 1) * 0.5,
                    tj,
                    _const(-1.0, tj.order),
                ]
            )

        return _lift(f, "lie", meta={"class": "C9", "params": ()})
    raise UsageError(f"unknown class {cls!r}")


# -- chamber trapping ----------------------------------------------------------


@dataclass
class TrappedReport:
    """Which single open chamber (if any) contains the sampled trajectory."""

    adS: str | None
    minkowski: str | None
    deSitter: str | None


def trapped_report(curve: TimelikeCurve, span=None, n: int = 600) -> TrappedReport:
    if span is None:
        span = (0.0, curve.period) if curve.period else (-8.0, 8.0)
    reports = [chamber(curve.point(t)) for t in np.linspace(span[0], span[1], n)]

    def contained(fam):
        vals = {getattr(r, fam) for r in reports}
        if len(vals) == 1:
            v = vals.pop()
            if v in ("positive", "negative"):
                return v
        return None

    return TrappedReport(
        adS=contained("adS"),
        minkowski=contained("minkowski"),
        deSitter=contained("deSitter"),
    )


# -- closed C2i helpers ---------------------------------------------------------


def c2i_frequencies(a: float, b: float):
    """Rotation rates of the structure matrix for a second-class curve of the
    first type; their ratio is b."""
    lam1 = np.sqrt(b * (1 + b * b * (a * a - 1))) / ((1 - a * a) ** 0.25 * np.sqrt(1 - b * b))
    lam2 = np.sqrt(1 + b * b * (a * a - 1)) / ((1 - a * a) ** 0.25 * np.sqrt(b * (1 - b * b)))
    return lam1, lam2


def c2i_conformal_period(a: float, m: int, n: int) -> float:
    """Total strain (conformal-parameter period) of the closed C2i curve with
    b = m/n: equals 2*pi*n over the fast rotation rate."""
    _, lam2 = c2i_frequencies(a, m / n)
    return 2 * np.pi * n / lam2
