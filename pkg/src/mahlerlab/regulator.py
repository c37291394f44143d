"""Bloch-Wigner dilogarithm, elliptic regulator functions and lattice sums.

For tau in the upper half plane with q = e^{2 pi i tau}:

* ``J(z) = log|z| log|1-z|``
* ``J_tau(z) = sum_{n>=0} J(z q^n) - sum_{n>=1} J(z^{-1} q^n) + (1/3) log^2|q| B_3(log|z|/log|q|)``
* ``D_tau(z) = sum_{n in Z} D(z q^n)``
* ``R_tau = D_tau - i J_tau``

``R_tau`` is also a Kronecker-Eisenstein double sum; :func:`kronecker_eisenstein`
evaluates it row by row in closed form, and :func:`kronecker_eisenstein_square`
by brute-force square truncation.  :func:`family_lattice` gives the Mahler
measures of the four families as lattice sums in the nome variable mu.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
import scipy.special as sc

from .errors import DomainError, NoConvergence
from .numkit import SeriesBudget, sum_series
from .qseries import FamilyId

__all__ = [
    "bloch_wigner",
    "jfun",
    "j_tau",
    "d_tau",
    "r_tau",
    "normalize_point",
    "kronecker_eisenstein",
    "kronecker_eisenstein_square",
    "r_tau_lattice",
    "family_lattice",
    "mu_from_q",
    "mu_from_tau",
    "LATTICE_LEVEL",
    "LATTICE_SIGN",
]

PI = math.pi
# Bernoulli numbers B_0..B_40 with B_1 = -1/2
_BERN = sc.bernoulli(40)
_FACT = np.array([math.factorial(n + 1) for n in range(41)], dtype=float)


# ---------------------------------------------------------------------------
# dilogarithm


def _li2_series(z: complex) -> complex:
    s = 0j
    zn = z
    for n in range(1, 200):
        term = zn / (n * n)
        s += term
        if abs(term) < 1e-18:
            break
        zn *= z
    return s


def _li2_bernoulli(z: complex) -> complex:
    # Li2(z) = sum_n B_n w^{n+1}/(n+1)!, w = -log(1-z); |w| < 2 pi
    w = -cmath.log(1 - z)
    s = 0j
    wn = w
    for n in range(41):
        if _BERN[n] != 0:
            term = _BERN[n] * wn / _FACT[n]
            s += term
            if n > 4 and abs(term) < 1e-18:
                break
        wn *= w
    return s


def _bw(z: complex) -> float:
    if z == 1:
        return 0.0
    if abs(z) > 1:
        return -_bw(1 / z)
    if z.real > 0.5:
        return -_bw(1 - z)
    li2 = _li2_series(z) if abs(z) <= 0.5 else _li2_bernoulli(z)
    return li2.imag + cmath.phase(1 - z) * math.log(abs(z))


def bloch_wigner(z) -> float:
    """Bloch-Wigner dilogarithm D(z) = Im Li2(z) + arg(1-z) log|z|."""
    z = complex(z)
    if z == 0 or z == 1:
        raise DomainError("D(z) is evaluated only for z not in {0, 1}")
    return _bw(z)


def jfun(z) -> float:
    """J(z) = log|z| log|1-z|."""
    z = complex(z)
    if z == 0 or z == 1:
        raise DomainError("J(z) is singular at z = 0 and z = 1")
    return math.log(abs(z)) * math.log(abs(1 - z))


# ---------------------------------------------------------------------------
# elliptic functions on C*/q^Z


def _nome(tau) -> complex:
    tau = complex(tau)
    if not tau.imag > 0:
        raise DomainError("tau must lie in the upper half plane")
    return cmath.exp(2j * PI * tau)


def normalize_point(tau, z) -> complex:
    """Representative of z in C*/q^Z with |q| < |z| <= 1."""
    q = _nome(tau)
    z = complex(z)
    if z == 0:
        raise DomainError("z must be nonzero")
    lq = math.log(abs(q))
    s = math.log(abs(z)) / lq
    k = math.floor(s)
    z = z * q ** (-k)
    # guard against rounding at the band edges
    if abs(z) > 1:
        z *= q
    elif abs(z) <= abs(q):
        z /= q
    return z


def _b3(x: float) -> float:
    return x ** 3 - 1.5 * x ** 2 + 0.5 * x


def _elliptic_sum(fn, tau, z, budget):
    q = _nome(tau)
    z = normalize_point(tau, z)
    zi = 1 / z

    def terms():
        yield fn(z)
        qn = q
        while True:
            yield fn(z * qn) - fn(zi * qn)
            qn *= q
    return q, z, sum_series(terms(), budget or SeriesBudget(eps=1e-19))


def _j_safe(w):
    if w == 1:
        raise DomainError("J_tau is singular at z in q^Z")
    return math.log(abs(w)) * math.log(abs(1 - w))


def j_tau(tau, z, budget: SeriesBudget | None = None) -> float:
    """Elliptic J_tau(z) with the third Bernoulli polynomial correction."""
    q, z, s = _elliptic_sum(_j_safe, tau, z, budget)
    lq = math.log(abs(q))
    return float(s + lq * lq / 3 * _b3(math.log(abs(z)) / lq))


def d_tau(tau, z, budget: SeriesBudget | None = None) -> float:
    """Elliptic dilogarithm D_tau(z) = sum_{n in Z} D(z q^n)."""
    return float(_elliptic_sum(_bw, tau, z, budget)[2])


def r_tau(tau, z, budget: SeriesBudget | None = None) -> complex:
    """R_tau(z) = D_tau(z) - i J_tau(z)."""
    return complex(d_tau(tau, z, budget), -j_tau(tau, z, budget))


# ---------------------------------------------------------------------------
# Kronecker-Eisenstein sums for R_tau
#
# K(tau; a, b) = (y^2/pi) sum' e^{2 pi i (b n - a m)} / ((m tau + n)^2 (m conj(tau) + n)).
# Row m != 0 is summed over n in closed form by partial fractions:
#   1/((n+w)^2 (n+wb)) = A/(n+w) + B/(n+w)^2 + C/(n+wb),  d = wb - w,
#   A = -1/d^2, B = 1/d, C = 1/d^2,
# with F(w) = sum_n e^{2 pi i b n}/(n+w) and G = -F'.

# Evaluated directly this equals -R_tau(e^{2 pi i (a + b tau)}) for D and J as
# defined above; the orientation sign is applied in r_tau_lattice.
LATTICE_SIGN = -1.0


def _fg(w: complex, b: float):
    """F(w) and G(w) for 0 <= b < 1, in overflow-free form, with the
    w-independent limit of F removed (it cancels since A + C = 0)."""
    tp = 2j * PI
    if w.imag > 0:
        P = cmath.exp(tp * w)
        e = cmath.exp(tp * (1 - b) * w)
        F = -tp * e / (1 - P)
        G = tp * tp * e * ((1 - b) / (1 - P) + P / (1 - P) ** 2)
        return F, G
    E = cmath.exp(-tp * w)
    e = cmath.exp(-tp * b * w)
    if b == 0:
        F = tp * E / (1 - E)  # 2 pi i/(1-E) minus its limit 2 pi i
    else:
        F = tp * e / (1 - E)
    G = tp * tp * e * (b / (1 - E) + E / (1 - E) ** 2)
    return F, G


def _sl3(theta: float) -> float:
    """sum_{n>=1} sin(n theta)/n^3 for 0 <= theta < 2 pi."""
    return PI * PI * theta / 6 - PI * theta * theta / 4 + theta ** 3 / 12


def kronecker_eisenstein(tau, a: float, b: float, tol: float = 1e-17,
                         max_rows: int = 100_000) -> complex:
    """(y^2/pi) sum' e^{2 pi i (b n - a m)}/((m tau + n)^2 (m conj(tau) + n)).

    Rows in n are summed exactly; rows in m decay geometrically apart from a
    1/m^2 part (b = 0 only) that is summed in closed form through the
    Clausen function Cl_2(2 pi a) = D(e^{2 pi i a}).
    """
    tau = complex(tau)
    _nome(tau)
    y = tau.imag
    a = float(a) % 1.0
    b = float(b) % 1.0
    total = 2j * _sl3(2 * PI * b)  # row m = 0
    if b == 0 and a != 0:
        # the removed limits of F contribute -(pi/y^2) sum sin(2 pi a m)/m^2
        total += -(PI / (y * y)) * _bw(cmath.exp(2j * PI * a))
    m = 1
    small = 0
    while m <= max_rows:
        row = 0j
        for mm in (m, -m):
            w = mm * tau
            wb = mm * tau.conjugate()
            d = wb - w
            Fw, Gw = _fg(w, b)
            Fb, _ = _fg(wb, b)
            row += cmath.exp(-2j * PI * a * mm) * (-Fw / d ** 2 + Gw / d + Fb / d ** 2)
        total += row
        small = small + 1 if abs(row) < tol else 0
        if small >= 3:
            return (y * y / PI) * total
        m += 1
    raise NoConvergence("Kronecker-Eisenstein rows did not decay")


def kronecker_eisenstein_square(tau, a: float, b: float, M0: int = 32,
                                tol: float = 1e-7, max_M: int = 4096,
                                full_output: bool = False):
    """Square-truncated sum over |m|, |n| <= M with M doubling.

    The truncation error decays like 1/M, so successive values are combined
    by Richardson extrapolation; stops when two extrapolants agree within
    ``tol``.  Slow; used as an independent check of the row evaluator.
    """
    tau = complex(tau)
    _nome(tau)
    y = tau.imag
    tb = tau.conjugate()

    def partial(M):
        ms = np.arange(-M, M + 1)
        acc = 0j
        for m0 in range(0, ms.size, 256):
            m = ms[m0:m0 + 256, None].astype(float)
            n = np.arange(-M, M + 1, dtype=float)[None, :]
            den = (m * tau + n) ** 2 * (m * tb + n)
            ph = np.exp(2j * PI * (b * n - a * m))
            with np.errstate(divide="ignore", invalid="ignore"):
                t = ph / den
            t[~np.isfinite(t)] = 0.0
            acc += t.sum()
        return (y * y / PI) * acc

    M = M0
    vals = [partial(M)]
    extrap = []
    while M < max_M:
        M *= 2
        vals.append(partial(M))
        extrap.append(2 * vals[-1] - vals[-2])
        if len(extrap) >= 2 and abs(extrap[-1] - extrap[-2]) < tol:
            return (extrap[-1], M) if full_output else extrap[-1]
    raise NoConvergence(f"square lattice sum not stable to {tol:g} by M = {max_M}")


def r_tau_lattice(tau, z) -> complex:
    """R_tau(z) from the Kronecker-Eisenstein sum, z = e^{2 pi i (a + b tau)}."""
    tau = complex(tau)
    z = complex(z)
    if z == 0:
        raise DomainError("z must be nonzero")
    lz = cmath.log(z) / (2j * PI)  # a + b tau up to an integer
    b = lz.imag / tau.imag
    a = (lz - b * tau).real
    return LATTICE_SIGN * kronecker_eisenstein(tau, a, b)


# ---------------------------------------------------------------------------
# family lattice sums

# level N in the relation mu = -1/(N tau) between the nome variable mu and
# the period tau of the attached elliptic curve
LATTICE_LEVEL = {FamilyId.MU: 4, FamilyId.N: 3, FamilyId.G: 6, FamilyId.R: 5}


def mu_from_q(q) -> complex:
    """mu with q = e^{2 pi i mu} (principal logarithm)."""
    q = complex(q)
    if not 0 < abs(q) < 1:
        raise DomainError("need 0 < |q| < 1")
    return cmath.log(q) / (2j * PI)


def mu_from_tau(f: FamilyId, tau) -> complex:
    return -1 / (LATTICE_LEVEL[FamilyId.parse(f)] * complex(tau))


def _char_weights(f: FamilyId):
    if f is FamilyId.MU:
        return 4, np.array([0, 1, 0, -1], dtype=complex)
    if f in (FamilyId.N, FamilyId.G):
        return 3, np.array([0, 1, -1], dtype=complex)
    r = np.arange(5)
    # 2(z^m - z^-m) + z^2m - z^-2m with z = e^{2 pi i/5}, written with sines
    return 5, 2j * (2 * np.sin(2 * PI * r / 5) + np.sin(4 * PI * r / 5))


def _cot_csc2_small(w):
    """Exponentially small parts of cot(pi w) and csc^2(pi w) for Im w != 0.

    cot(pi w) = -i sgn(Im w) + c, csc^2(pi w) = s; returns (c, s).
    """
    if w.imag > 0:
        P = cmath.exp(2j * PI * w)
        return -2j * P / (1 - P), -4 * P / (1 - P) ** 2
    E = cmath.exp(-2j * PI * w)
    return 2j * E / (1 - E), -4 * E / (1 - E) ** 2


def _lattice_S(period: int, w: np.ndarray, lam: complex, tol: float, max_rows: int) -> complex:
    """sum' w(m)/((m + lam n)^2 (m + conj(lam) n)) for an odd weight w mod period."""
    r = np.arange(period)
    # n = 0 row: 2 sum_{m>=1} w(m)/m^3 via Hurwitz zeta
    total = 2 * sum(w[k] * sc.zeta(3, k / period) for k in range(1, period)) / period ** 3
    lb = lam.conjugate()
    n = 1
    small = 0
    while n <= max_rows:
        row = 0j
        for nn in (n, -n):
            a = lam * nn
            ab = lb * nn
            d = ab - a
            A, B, C = -1 / d ** 2, 1 / d, 1 / d ** 2
            for k in r:
                if w[k] == 0:
                    continue
                c1, s1 = _cot_csc2_small((k + a) / period)
                c2, _ = _cot_csc2_small((k + ab) / period)
                row += w[k] * (A * PI / period * c1 + B * PI ** 2 / period ** 2 * s1
                               + C * PI / period * c2)
        total += row
        small = small + 1 if abs(row) < tol else 0
        if small >= 3:
            return total
        n += 1
    raise NoConvergence("lattice rows did not decay")


def family_lattice(f: FamilyId, mu, tol: float = 1e-18, max_rows: int = 100_000) -> float:
    """Mahler measure of family ``f`` at q = e^{2 pi i mu} as a lattice sum.

    The argument of the measure is family_argument(f, e^{2 pi i mu}).
    """
    f = FamilyId.parse(f)
    mu = complex(mu)
    if not mu.imag > 0:
        raise DomainError("mu must lie in the upper half plane")
    y = mu.imag
    P, w = _char_weights(f)
    s3 = math.sqrt(3.0)
    if f is FamilyId.MU:
        return float((16 * y / PI ** 2 * _lattice_S(P, w, 4 * mu, tol, max_rows)).real)
    if f is FamilyId.N:
        return float((27 * s3 * y / (4 * PI ** 2) * _lattice_S(P, w, 3 * mu, tol, max_rows)).real)
    if f is FamilyId.G:
        s6 = _lattice_S(P, w, 6 * mu, tol, max_rows)
        s3_ = _lattice_S(P, w, 3 * mu, tol, max_rows)
        return float((18 * s3 * y / PI ** 2 * s6 + 9 * s3 * y / (4 * PI ** 2) * s3_).real)
    return float(-(25j * y / (4 * PI ** 2) * _lattice_S(P, w, 5 * mu, tol, max_rows)).real)
