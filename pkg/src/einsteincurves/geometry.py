"""Linear algebra of the signature-(2,3) space, the point model of the
Einstein universe, chambers, conformal embeddings, and the toroidal
projection used for visualisation.

Conventions
-----------
Internally every point computation uses Poincaré coordinates, where the
Gram matrix is diag(-1,-1,1,1,1) and the point-model constraints are
diagonal: a representative on the unit section satisfies
x0^2 + x1^2 = 1 and x2^2 + x3^2 + x4^2 = 1.  Basis conversions happen at
API boundaries through the transition matrices below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UsageError

__all__ = [
    "GRAM_MOBIUS",
    "GRAM_POINCARE",
    "GRAM_LIE",
    "T_MP",
    "T_ML",
    "gram_matrix",
    "product",
    "basis_transition",
    "convert_coords",
    "ray_normalize",
    "is_einstein_point",
    "ChamberReport",
    "chamber",
    "toroidal_projection",
    "toroid_boundary_distance",
    "embed",
    "future_rate",
    "WALL_TOL",
]

WALL_TOL = 1e-9
NULL_TOL = 1e-9

_SQ2 = np.sqrt(2.0)


def _gram_mobius() -> np.ndarray:
    g = np.zeros((5, 5))
    g[0, 4] = g[4, 0] = -1.0
    g[1, 1] = -1.0
    g[2, 2] = g[3, 3] = 1.0
    return g


def _gram_lie() -> np.ndarray:
    g = np.zeros((5, 5))
    g[0, 4] = g[4, 0] = -1.0
    g[1, 3] = g[3, 1] = -1.0
    g[2, 2] = 1.0
    return g


GRAM_MOBIUS = _gram_mobius()
GRAM_POINCARE = np.diag([-1.0, -1.0, 1.0, 1.0, 1.0])
GRAM_LIE = _gram_lie()

# B is a Möbius basis iff B @ T_MP is a Poincaré basis iff B @ T_ML is a Lie
# basis; both matrices have determinant one.
T_MP = np.array(
    [
        [1 / _SQ2, 0, 0, 0, -1 / _SQ2],
        [0, 1, 0, 0, 0],
        [0, 0, 1, 0, 0],
        [0, 0, 0, 1, 0],
        [1 / _SQ2, 0, 0, 0, 1 / _SQ2],
    ]
)
T_ML = np.array(
    [
        [1, 0, 0, 0, 0],
        [0, -1 / _SQ2, 0, -1 / _SQ2, 0],
        [0, 0, 1, 0, 0],
        [0, 1 / _SQ2, 0, -1 / _SQ2, 0],
        [0, 0, 0, 0, 1],
    ]
)

_GRAMS = {"mobius": GRAM_MOBIUS, "poincare": GRAM_POINCARE, "lie": GRAM_LIE}


def gram_matrix(basis) -> np.ndarray:
    """Gram matrix of a named basis kind, or a custom 5x5 symmetric matrix."""
    if isinstance(basis, str):
        try:
            return _GRAMS[basis.lower()]
        except KeyError:
            raise UsageError(f"unknown basis kind {basis!r}") from None
    g = np.asarray(basis, dtype=float)
    if g.shape != (5, 5) or not np.allclose(g, g.T):
        raise UsageError("custom Gram matrix must be symmetric 5x5")
    return g


def product(u, v, basis="poincare") -> float:
    """Scalar product <u, v> of two coordinate vectors in the given basis."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != (5,) or v.shape != (5,):
        raise UsageError("vectors must have exactly 5 components")
    g = gram_matrix(basis)
    return float(u @ g @ v)


def basis_transition(frm: str, to: str) -> np.ndarray:
    """Matrix T such that a basis of kind `frm` right-multiplied by T is a
    basis of kind `to`.  Coordinates transform with T^{-1}."""
    key = (frm.lower(), to.lower())
    for k in key:
        if k not in _GRAMS:
            raise UsageError(f"unknown basis kind {k!r}")
    if key[0] == key[1]:
        return np.eye(5)
    table = {
        ("mobius", "poincare"): T_MP,
        ("mobius", "lie"): T_ML,
        ("poincare", "mobius"): np.linalg.inv(T_MP),
        ("lie", "mobius"): np.linalg.inv(T_ML),
        ("poincare", "lie"): np.linalg.inv(T_MP) @ T_ML,
        ("lie", "poincare"): np.linalg.inv(T_ML) @ T_MP,
    }
    return table[key]


def convert_coords(x, frm: str, to: str) -> np.ndarray:
    """Convert coordinate vectors between the standard bases."""
    x = np.asarray(x, dtype=float)
    t = basis_transition(frm, to)
    return np.linalg.solve(t, x.T).T if x.ndim > 1 else np.linalg.solve(t, x)


def ray_normalize(x, basis: str = "poincare") -> np.ndarray:
    """Representative of the null ray [x] on the unit section (Poincaré
    coordinates).

    The input must be a nonzero null vector; the result satisfies both the
    unit-circle and unit-sphere constraints because a null vector has equal
    Euclidean time- and space-norms in Poincaré coordinates.
    """
    x = np.asarray(x, dtype=float)
    if basis != "poincare":
        x = convert_coords(x, basis, "poincare")
    if x.shape != (5,):
        raise UsageError("expected a single 5-vector")
    q = float(x @ GRAM_POINCARE @ x)
    euc = float(x @ x)
    if euc == 0.0:
        raise DomainError("zero vector is not a ray")
    if abs(q) / euc > NULL_TOL:
        raise DomainError(f"vector is not null: <x,x>/|x|^2 = {q / euc:.3e}")
    tnorm = np.hypot(x[0], x[1])
    if tnorm < 1e-14:
        raise DomainError("degenerate ray: vanishing time component")
    return x / tnorm


def is_einstein_point(x, tol: float = 1e-12) -> bool:
    x = np.asarray(x, dtype=float)
    return (
        x.shape == (5,)
        and abs(x[0] ** 2 + x[1] ** 2 - 1.0) <= tol
        and abs(x[2] ** 2 + x[3] ** 2 + x[4] ** 2 - 1.0) <= tol
    )


@dataclass(frozen=True)
class ChamberReport:
    """Tri-state classification of a point against the three chamber families."""

    adS: str
    minkowski: str
    deSitter: str


def chamber(p, tol: float = WALL_TOL) -> ChamberReport:
    """Classify an Einstein-universe point against the adS, Minkowski and
    de Sitter chamber decompositions.

    In Poincaré coordinates the defining functions are x2 for the adS family,
    x0 - x4 for the Minkowski family, and x0 for the dS family (whose wall
    x0 = 0 splits into the two spheres x1 = +-1).
    """
    p = np.asarray(p, dtype=float)
    if not is_einstein_point(p, tol=1e-6):
        raise DomainError("not a point of the unit section")

    def sign_of(val):
        if val > tol:
            return "positive"
        if val < -tol:
            return "negative"
        return "wall"

    ads = sign_of(p[2])
    mink = sign_of(p[0] - p[4])
    if p[0] > tol:
        ds = "positive"
    elif p[0] < -tol:
        ds = "negative"
    else:
        ds = "wallPlus" if p[1] > 0 else "wallMinus"
    return ChamberReport(adS=ads, minkowski=mink, deSitter=ds)


def toroidal_projection(p) -> np.ndarray:
    """2:1 branched covering of the unit section onto the solid toroid in R^3."""
    p = np.asarray(p, dtype=float)
    x0, x1, x2, x3, x4 = p
    return np.array([x0 * x2 - x1 * (x3 + 2.0), x1 * x2 + x0 * (x3 + 2.0), x4])


def toroid_boundary_distance(point3) -> float:
    """Distance of the tube-section point from the tube centerline; the solid
    toroid is the set where this is <= 1."""
    x, y, z = np.asarray(point3, dtype=float)
    return float(np.hypot(np.hypot(x, y) - 2.0, z))


def _embed_ads(coords) -> np.ndarray:
    x1, x2, y1, y2 = coords
    q = -(x1 * x1) - x2 * x2 + y1 * y1 + y2 * y2
    if abs(q + 1.0) > WALL_TOL:
        raise DomainError(f"adS coordinates off the quadric: residual {q + 1.0:.3e}")
    r = np.sqrt(x1 * x1 + x2 * x2)
    return np.array([x1, x2, 1.0, y1, y2]) / r


def _embed_minkowski(coords) -> np.ndarray:
    x1, x2, x3 = coords
    star = -x1 * x1 + x2 * x2 + x3 * x3
    xm = np.array([1.0, x1, x2, x3, star / 2.0])
    return ray_normalize(convert_coords(xm, "mobius", "poincare"))


def _embed_ds(coords) -> np.ndarray:
    w1, w2, w3, w4 = coords
    q = -(w1 * w1) + w2 * w2 + w3 * w3 + w4 * w4
    if abs(q - 1.0) > WALL_TOL:
        raise DomainError(f"dS coordinates off the quadric: residual {q - 1.0:.3e}")
    r = np.sqrt(1.0 + w1 * w1)
    return np.array([1.0, w1, w2, w3, w4]) / r


def embed(model: str, coords) -> np.ndarray:
    """Conformal embedding of a Lorentzian space form into the Einstein
    universe; returns the unit-section representative in Poincaré coordinates.
    """
    coords = np.asarray(coords, dtype=float)
    model = model.lower()
    if model in ("ads", "anti-de-sitter"):
        if coords.shape != (4,):
            raise UsageError("adS embedding takes 4 coordinates")
        return _embed_ads(coords)
    if model in ("minkowski", "m"):
        if coords.shape != (3,):
            raise UsageError("Minkowski embedding takes 3 coordinates")
        return _embed_minkowski(coords)
    if model in ("desitter", "ds", "de-sitter"):
        if coords.shape != (4,):
            raise UsageError("dS embedding takes 4 coordinates")
        return _embed_ds(coords)
    raise UsageError(f"unknown model {model!r}")


def future_rate(eta, eta_prime) -> float:
    """Rate rho in eta' = rho * J eta for a curve on the unit circle of the
    negative-definite time plane; positive exactly for future-directed motion."""
    return float(eta[0] * eta_prime[1] - eta[1] * eta_prime[0])
