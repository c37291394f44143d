"""Generalized hypergeometric series and the closed forms built on them.

Contents:

* :func:`hyp` -- pFq Taylor series inside the unit disk.
* :func:`mu_hyp`, :func:`n_hyp`, :func:`g_hyp` -- the 4F3 expressions for
  the mu, n and g families.
* :func:`omega` and :func:`phi` -- the generating functions of the Franel and
  Apery numbers, by series or by their 2F1 closed forms.
* :func:`r_via_phi` -- r(t) through the integral of (phi(u) - 1)/u.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Sequence

from .errors import DomainError
from .numkit import SeriesBudget, precision, smallest_root, sum_series

__all__ = [
    "hyp",
    "hyp2f1",
    "mu_hyp",
    "n_hyp",
    "g_hyp",
    "franel",
    "apery",
    "omega",
    "phi",
    "phi_closed1_k",
    "phi_closed2_k",
    "r_via_phi",
    "hyp_z_sides",
    "PHI_RADIUS",
]

F = Fraction
# radius of convergence of the Apery generating function: (11 - 5 sqrt 5)/2
PHI_RADIUS = 0.09016994374947424
OMEGA_RADIUS = 0.125


def _param(a):
    ctx = precision()
    if isinstance(a, Fraction):
        return ctx.frac(a.numerator, a.denominator)
    return ctx.mpf(a)


def hyp(upper: Sequence, lower: Sequence, z, budget: SeriesBudget | None = None):
    """pFq(upper; lower; z) by its Taylor series, for |z| < 1.

    Parameters may be ints, floats or :class:`fractions.Fraction` (exact in
    extended precision).
    """
    ctx = precision()
    z = ctx.cx(z)
    if not abs(z) < 1:
        raise DomainError(f"|z| = {float(abs(z)):.6g} >= 1 is outside the series disk")
    for b in lower:
        if b <= 0 and b == int(b):
            raise DomainError(f"lower parameter {b} is a non-positive integer")
    a_ = [_param(a) for a in upper]
    b_ = [_param(b) for b in lower]

    def terms():
        t = ctx.cx(1)
        n = 0
        while True:
            yield t
            num = 1
            for a in a_:
                num *= a + n
            den = n + 1
            for b in b_:
                den *= b + n
            t = t * num / den * z
            n += 1
    return sum_series(terms(), budget)


def hyp2f1(a, b, c, z, budget: SeriesBudget | None = None):
    return hyp([a, b], [c], z, budget)


def _check_t(t, radius=1.0):
    ctx = precision()
    t = ctx.cx(t)
    if t == 0:
        raise DomainError("t must be nonzero")
    if not abs(t) < radius:
        raise DomainError(f"|t| = {float(abs(t)):.6g} must be < {radius}")
    return t


def mu_hyp(t, budget: SeriesBudget | None = None):
    """mu(t) = -Re[(t/8) 4F3(3/2,3/2,1,1; 2,2,2; t) + log(t/16)/2], |t| < 1."""
    ctx = precision()
    t = _check_t(t)
    h = hyp([F(3, 2), F(3, 2), 1, 1], [2, 2, 2], t, budget)
    return -(t / 8 * h + ctx.log(t / 16) / 2).real


def _n_core(t, budget):
    ctx = precision()
    h = hyp([F(4, 3), F(5, 3), 1, 1], [2, 2, 2], t, budget)
    return 2 * t / 27 * h + ctx.log(t / 27) / 3


def n_hyp(t, budget: SeriesBudget | None = None):
    """n(t) = -Re[(2t/27) 4F3(4/3,5/3,1,1; 2,2,2; t) + log(t/27)/3], |t| < 1."""
    t = _check_t(t)
    return -_n_core(t, budget).real


def g_hyp(t, budget: SeriesBudget | None = None):
    """g(t) through two n-type 4F3 terms, for small |t|.

    Uses 3 g(t) = n(27t/(1+4t)^3) + 4 n(27t^2/(1-2t)^3).  Both inner
    arguments must lie in the unit disk.
    """
    t = _check_t(t, radius=float("inf"))
    if abs(1 + 4 * t) == 0 or abs(1 - 2 * t) == 0:
        raise DomainError("t = -1/4 and t = 1/2 are singular")
    a = 27 * t / (1 + 4 * t) ** 3
    b = 27 * t * t / (1 - 2 * t) ** 3
    if not (abs(a) < 1 and abs(b) < 1):
        raise DomainError("g_hyp: inner 4F3 arguments leave the unit disk")
    val = _n_core(a, budget) + 4 * _n_core(b, budget)
    return -val.real / 3


# --- omega and phi ---------------------------------------------------------

def franel(n: int) -> int:
    """Franel number sum_k C(n,k)^3."""
    return sum(comb(n, k) ** 3 for k in range(n + 1))


def apery(n: int) -> int:
    """Apery number sum_k C(n,k)^2 C(n+k,k)."""
    return sum(comb(n, k) ** 2 * comb(n + k, k) for k in range(n + 1))


def _three_term(t, a, b, c, budget):
    """Sum u_n t^n where (n+1)^2 u_{n+1} = (a n^2 + a n + b) u_n + c n^2 u_{n-1}.

    Forward recursion on v_n = u_n t^n, stable for the dominant solution.
    """
    ctx = precision()
    t = ctx.cx(t)

    def terms():
        v_prev, v = ctx.cx(0), ctx.cx(1)
        n = 0
        while True:
            yield v
            nxt = ((a * n * n + a * n + b) * v * t + c * n * n * v_prev * t * t) / ((n + 1) ** 2)
            v_prev, v = v, nxt
            n += 1
    return sum_series(terms(), budget)


def _omega_series(t, budget):
    return _three_term(t, 7, 2, 8, budget)


def _phi_series(t, budget):
    return _three_term(t, 11, 3, 1, budget)


def omega(t, mode: str = "series", budget: SeriesBudget | None = None):
    """omega(t) = sum_n t^n sum_k C(n,k)^3.

    ``mode="series"`` needs |t| < 1/8; ``mode="closed"`` uses
    2F1(1/3, 2/3; 1; 27t^2/(1-2t)^3)/(1-2t).
    """
    ctx = precision()
    t = ctx.cx(t)
    if mode == "series":
        if not abs(t) < OMEGA_RADIUS:
            raise DomainError(f"omega series needs |t| < 1/8, got {float(abs(t)):.4g}")
        return _omega_series(t, budget)
    if mode == "closed":
        if 1 - 2 * t == 0:
            raise DomainError("t = 1/2 is singular")
        z = 27 * t * t / (1 - 2 * t) ** 3
        return hyp2f1(F(1, 3), F(2, 3), 1, z, budget) / (1 - 2 * t)
    raise DomainError(f"unknown omega mode {mode!r}")


def _phi_c1_parts(k):
    d = (1 + k * k) * ((1 - k - k * k) ** 2 - 5 * k * k)
    z = 64 * k ** 5 * (1 + k - k * k) / ((1 + k * k) ** 2 * ((1 - k - k * k) ** 2 - 5 * k * k) ** 2)
    return d, z


def _phi_c2_parts(k):
    d = (1 + k * k) * ((1 + 11 * k - k * k) ** 2 - 125 * k * k)
    z = 64 * k * (1 + k - k * k) ** 5 / ((1 + k * k) ** 2 * ((1 + 11 * k - k * k) ** 2 - 125 * k * k) ** 2)
    return d, z


def phi_closed1_k(k, budget: SeriesBudget | None = None):
    """phi(k(1-k)^2/(1+k)^2) by its 2F1(1/4, 3/4; 1; .) closed form."""
    ctx = precision()
    k = ctx.cx(k)
    d, z = _phi_c1_parts(k)
    return (1 + k) ** 2 / ctx.sqrt(d) * hyp2f1(F(1, 4), F(3, 4), 1, z, budget)


def phi_closed2_k(k, budget: SeriesBudget | None = None):
    """phi(k^2(1+k)/(1-k)) by its 2F1(1/4, 3/4; 1; .) closed form."""
    ctx = precision()
    k = ctx.cx(k)
    d, z = _phi_c2_parts(k)
    return (1 - k) / ctx.sqrt(d) * hyp2f1(F(1, 4), F(3, 4), 1, z, budget)


def phi(t, mode: str = "series", budget: SeriesBudget | None = None):
    """phi(t) = sum_n t^n sum_k C(n,k)^2 C(n+k,k) (Apery numbers).

    ``closed1``/``closed2`` solve for the auxiliary k of smallest modulus with
    t = k(1-k)^2/(1+k)^2 or t = k^2(1+k)/(1-k), then use the closed forms.
    """
    ctx = precision()
    t = ctx.cx(t)
    if mode == "series":
        if not abs(t) < PHI_RADIUS:
            raise DomainError(f"phi series needs |t| < {PHI_RADIUS:.5f}, got {float(abs(t)):.4g}")
        return _phi_series(t, budget)
    if t == 0:
        return ctx.cx(1)
    if mode == "closed1":
        k = smallest_root([1, -(2 + t), 1 - 2 * t, -t])
        return phi_closed1_k(k, budget)
    if mode == "closed2":
        k = smallest_root([1, 1, t, -t])
        return phi_closed2_k(k, budget)
    raise DomainError(f"unknown phi mode {mode!r}")


def r_via_phi(t, budget: SeriesBudget | None = None):
    """r(t) = -Re[log t + int_0^t (phi(u) - 1)/u du].

    The integral is taken term by term, sum_{n>=1} b_n t^n / n with Apery
    numbers b_n, so it is exact up to series truncation.  Needs
    0 < |t| < radius of the phi series.
    """
    ctx = precision()
    t = ctx.cx(t)
    if t == 0 or not abs(t) < PHI_RADIUS:
        raise DomainError(f"r_via_phi needs 0 < |t| < {PHI_RADIUS:.5f}")

    def terms():
        v_prev, v = ctx.cx(0), ctx.cx(1)
        n = 0
        while True:
            nxt = ((11 * n * n + 11 * n + 3) * v * t + n * n * v_prev * t * t) / ((n + 1) ** 2)
            v_prev, v = v, nxt
            n += 1
            yield v / n
    s = sum_series(terms(), budget)
    return -(ctx.log(t) + s).real


def hyp_z_sides(z, budget: SeriesBudget | None = None):
    """Both sides of the 2F1(1/4, 3/4; 1; .) transformation in z.

    LHS = sqrt(((1+11z)^2-125z^2)/((1-z)^2-5z^2)) 2F1(..; 64z^5(1+z)/((1+4z^2)((1-z)^2-5z^2)^2))
    RHS = 2F1(..; 64z(1+z)^5/((1+4z^2)((1+11z)^2-125z^2)^2))
    """
    ctx = precision()
    z = ctx.cx(z)
    a = (1 - z) ** 2 - 5 * z * z
    b = (1 + 11 * z) ** 2 - 125 * z * z
    w1 = 64 * z ** 5 * (1 + z) / ((1 + 4 * z * z) * a * a)
    w2 = 64 * z * (1 + z) ** 5 / ((1 + 4 * z * z) * b * b)
    lhs = ctx.sqrt(b / a) * hyp2f1(F(1, 4), F(3, 4), 1, w1, budget)
    rhs = hyp2f1(F(1, 4), F(3, 4), 1, w2, budget)
    return lhs, rhs
