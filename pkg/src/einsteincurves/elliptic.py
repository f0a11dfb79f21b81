"""Jacobi elliptic functions and elliptic integrals.

Parameter convention: all functions take the parameter m in [0, 1)
(the square of the modulus).  The amplitude is computed by the descending
Landen/AGM recursion, the complete integral of the first kind by the AGM,
and the third-kind integral in Legendre trigonometric form through Carlson
symmetric integrals with duplication.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

__all__ = [
    "ellip_K",
    "jacobi_am",
    "jacobi_sn",
    "jacobi_cn",
    "jacobi_dn",
    "jacobi_sd",
    "jacobi_nd",
    "jacobi_cd",
    "jacobi_sn_cn_dn",
    "ellip_Pi",
    "ellip_Pi_complete",
    "carlson_rf",
    "carlson_rc",
    "carlson_rj",
]


def _check_m(m: float):
    if not 0.0 <= m < 1.0:
        raise DomainError(f"parameter m must lie in [0, 1), got {m}")


def ellip_K(m: float) -> float:
    """Complete elliptic integral of the first kind, AGM evaluation."""
    _check_m(m)
    a, b = 1.0, np.sqrt(1.0 - m)
    while abs(a - b) > 1e-17 * a:
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    return np.pi / (2.0 * a)


def jacobi_am(u: float, m: float) -> float:
    """Jacobi amplitude via the descending Landen (Gauss) transformation."""
    _check_m(m)
    if m == 0.0:
        return float(u)
    a = [1.0]
    b = [np.sqrt(1.0 - m)]
    c = [np.sqrt(m)]
    while abs(c[-1]) > 1e-17 * a[-1] and len(a) < 12:
        a.append(0.5 * (a[-1] + b[-1]))
        b.append(np.sqrt(a[-2] * b[-2]))
        c.append(0.5 * (a[-2] - b[-2]))
    n = len(a) - 1
    phi = (2.0**n) * a[n] * np.asarray(u, dtype=float)
    for i in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(np.clip(c[i] / a[i] * np.sin(phi), -1.0, 1.0)))
    return float(phi)


def jacobi_sn_cn_dn(u: float, m: float):
    phi = jacobi_am(u, m)
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(1.0 - m * sn * sn)
    return sn, cn, dn


def jacobi_sn(u, m):
    return jacobi_sn_cn_dn(u, m)[0]


def jacobi_cn(u, m):
    return jacobi_sn_cn_dn(u, m)[1]


def jacobi_dn(u, m):
    return jacobi_sn_cn_dn(u, m)[2]


def jacobi_sd(u, m):
    sn, _, dn = jacobi_sn_cn_dn(u, m)
    return sn / dn


def jacobi_nd(u, m):
    return 1.0 / jacobi_sn_cn_dn(u, m)[2]


def jacobi_cd(u, m):
    _, cn, dn = jacobi_sn_cn_dn(u, m)
    return cn / dn


# -- Carlson symmetric integrals -------------------------------------------------

_RF_ERRTOL = 0.0020
_RC_ERRTOL = 0.0010
_RJ_ERRTOL = 0.0015


def carlson_rf(x: float, y: float, z: float) -> float:
    if min(x, y, z) < 0 or min(x + y, x + z, y + z) < 1e-290:
        raise DomainError("carlson_rf arguments out of range")
    while True:
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        lam = sx * (sy + sz) + sy * sz
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
        mu = (x + y + z) / 3.0
        dx, dy, dz = (mu - x) / mu, (mu - y) / mu, (mu - z) / mu
        if max(abs(dx), abs(dy), abs(dz)) < _RF_ERRTOL:
            break
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / np.sqrt(mu)


def carlson_rc(x: float, y: float) -> float:
    """Degenerate symmetric integral; y < 0 is the Cauchy principal value."""
    if x < 0 or y == 0:
        raise DomainError("carlson_rc arguments out of range")
    if y > 0:
        w = 1.0
    else:
        w = np.sqrt(x / (x - y))
        x, y = x - y, -y
    while True:
        lam = 2.0 * np.sqrt(x) * np.sqrt(y) + y
        x, y = 0.25 * (x + lam), 0.25 * (y + lam)
        mu = (x + 2.0 * y) / 3.0
        s = (y - mu) / mu
        if abs(s) < _RC_ERRTOL:
            break
    return w * (1.0 + s * s * (0.3 + s * (1.0 / 7.0 + s * (0.375 + s * 9.0 / 22.0)))) / np.sqrt(mu)


def carlson_rj(x: float, y: float, z: float, p: float) -> float:
    """Symmetric integral of the third kind; p < 0 gives the principal value."""
    if min(x, y, z) < 0 or min(x + y, x + z, y + z) < 1e-290 or p == 0:
        raise DomainError("carlson_rj arguments out of range")
    if p > 0:
        xt, yt, zt, pt = x, y, z, p
        a = b = rcx = 0.0
    else:
        xt, yt, zt = sorted((x, y, z))
        a = 1.0 / (yt - p)
        b = a * (zt - yt) * (yt - xt)
        pt = yt + b
        rho = xt * zt / yt
        tau = p * pt / yt
        rcx = carlson_rc(rho, tau)
    total = 0.0
    fac = 1.0
    while True:
        sx, sy, sz = np.sqrt(xt), np.sqrt(yt), np.sqrt(zt)
        lam = sx * (sy + sz) + sy * sz
        alpha = (pt * (sx + sy + sz) + sx * sy * sz) ** 2
        beta = pt * (pt + lam) ** 2
        total += fac * carlson_rc(alpha, beta)
        fac *= 0.25
        xt, yt, zt, pt = 0.25 * (xt + lam), 0.25 * (yt + lam), 0.25 * (zt + lam), 0.25 * (pt + lam)
        mu = (xt + yt + zt + 2.0 * pt) / 5.0
        dx, dy, dz = (mu - xt) / mu, (mu - yt) / mu, (mu - zt) / mu
        dp = (mu - pt) / mu
        if max(abs(dx), abs(dy), abs(dz), abs(dp)) < _RJ_ERRTOL:
            break
    ea = dx * (dy + dz) + dy * dz
    eb = dx * dy * dz
    ec = dp * dp
    ed = ea - 3.0 * ec
    ee = eb + 2.0 * dp * (ea - ec)
    series = (
        1.0
        + ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 9.0 / 52.0 * ee)
        + eb * (1.0 / 6.0 + dp * (-3.0 / 11.0 + dp * 3.0 / 26.0))
        + dp * ea * (1.0 / 3.0 - dp * 3.0 / 22.0)
        - dp * ec / 3.0
    )
    rj = 3.0 * total + fac * series / (mu * np.sqrt(mu))
    if p <= 0:
        rj = a * (b * rj + 3.0 * (rcx - carlson_rf(xt, yt, zt)))
    return rj


def ellip_Pi_complete(x: float, m: float, principal_value: bool = False) -> float:
    """Complete third-kind integral over [0, pi/2] with characteristic x."""
    _check_m(m)
    if x >= 1.0 or (x == 1.0):
        if not principal_value:
            raise DomainError("integrand pole on the path; enable principal_value")
    if abs(1.0 - x) < 1e-300:
        raise DomainError("characteristic x = 1 is singular")
    return carlson_rf(0.0, 1.0 - m, 1.0) + (x / 3.0) * carlson_rj(0.0, 1.0 - m, 1.0, 1.0 - x)


def ellip_Pi(x: float, phi: float, m: float, principal_value: bool = False) -> float:
    """Incomplete elliptic integral of the third kind,

        Pi(x; phi | m) = int_0^phi dtheta / ((1 - x sin^2) sqrt(1 - m sin^2)),

    in the trigonometric (Legendre) form.  The amplitude phi is unrestricted;
    whole half-periods are peeled off with the complete integral.  A pole of
    the integrand on the path raises unless principal_value is set.
    """
    _check_m(m)
    if phi == 0.0:
        return 0.0
    sign = 1.0 if phi > 0 else -1.0
    phi = abs(phi)
    wraps = int(np.floor(phi / np.pi + 0.5))
    r = phi - wraps * np.pi  # r in (-pi/2, pi/2]
    # pole detection along the swept angles
    smax2 = 1.0 if wraps > 0 else np.sin(phi) ** 2
    if x * smax2 >= 1.0 and not principal_value:
        raise DomainError("integrand pole on the path; enable principal_value")
    total = 0.0
    if wraps:
        total += 2.0 * wraps * ellip_Pi_complete(x, m, principal_value=principal_value)
    if abs(r) > 0:
        s = np.sin(abs(r))
        c2 = np.cos(abs(r)) ** 2
        s2 = s * s
        val = s * carlson_rf(c2, 1.0 - m * s2, 1.0)
        if x != 0.0:
            val += (x / 3.0) * s2 * s * carlson_rj(c2, 1.0 - m * s2, 1.0, 1.0 - x * s2)
        total += np.sign(r) * val
    return sign * total
