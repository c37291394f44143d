"""Elliptic nomes q_j(alpha) of signature j and the family inversions.

For a = 1/j the nome is

    q_j(alpha) = exp(-pi/sin(pi a) * F(1 - alpha)/F(alpha)),
    F(z) = 2F1(a, 1 - a; 1; z).

The default evaluation uses the logarithmic connection formula for
F(1 - alpha), which turns the quotient into

    q_j(alpha) = alpha * exp(-H(alpha)/F(alpha)),
    H(alpha) = sum_n (a)_n (1-a)_n/n!^2 [2 psi(n+1) - psi(a+n) - psi(1-a+n)] alpha^n.

Both series converge on the whole disk |alpha| < 1, so negative and complex
arguments are covered without evaluating F near alpha = 1.  The literal
quotient is available as ``method="direct"`` where both series converge.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DomainError
from .hypergeom import hyp2f1
from .numkit import SeriesBudget, precision, smallest_root, sum_series
from .qseries import FamilyId

__all__ = ["NOME_SIGNATURES", "nome_qj", "nome_from_argument", "invert_base", "nome4_quintic_sides"]

NOME_SIGNATURES = (2, 3, 4, 6)


def _check_sig(j):
    if j not in NOME_SIGNATURES:
        raise DomainError(f"nome signature must be one of {NOME_SIGNATURES}, got {j!r}")


def _fh_series(j, alpha, budget):
    """F(alpha) and H(alpha) for a = 1/j."""
    ctx = precision()
    a = ctx.frac(1, j)
    b = 1 - a
    h0 = 2 * ctx.digamma(1) - ctx.digamma(a) - ctx.digamma(b)

    def pairs():
        c = ctx.cx(1)
        h = h0
        n = 0
        while True:
            yield c, c * h
            c = c * (a + n) * (b + n) / ((n + 1) ** 2) * alpha
            n += 1
            h = h + 2 / ctx.mpf(n) - 1 / (a + n - 1) - 1 / (b + n - 1)

    # both series share terms; sum them through one driver pass each
    Fv = sum_series((p[0] for p in pairs()), budget)
    Hv = sum_series((p[1] for p in pairs()), budget)
    return Fv, Hv


def nome_qj(j: int, alpha, budget: SeriesBudget | None = None, method: str = "log"):
    """Nome q_j(alpha) for j in {2, 3, 4, 6}.

    ``method="log"`` (default) is valid for 0 < |alpha| < 1.
    ``method="direct"`` evaluates the 2F1 quotient literally and also needs
    |1 - alpha| < 1.
    """
    _check_sig(j)
    ctx = precision()
    alpha = ctx.cx(alpha)
    if alpha == 0 or alpha == 1:
        raise DomainError("alpha must not be 0 or 1")
    if not abs(alpha) < 1:
        raise DomainError(f"|alpha| = {float(abs(alpha)):.6g} must be < 1")
    if method == "log":
        Fv, Hv = _fh_series(j, alpha, budget)
        return alpha * ctx.exp(-Hv / Fv)
    if method == "direct":
        if not abs(1 - alpha) < 1:
            raise DomainError("direct nome quotient needs |1 - alpha| < 1")
        a, b = Fraction(1, j), Fraction(j - 1, j)
        num = hyp2f1(a, b, 1, 1 - alpha, budget)
        den = hyp2f1(a, b, 1, alpha, budget)
        s = {2: 1, 3: ctx.sqrt(3) / 2, 4: ctx.sqrt(2) / 2, 6: ctx.mpf(1) / 2}[j]
        return ctx.exp(-ctx.pi / s * num / den)
    raise DomainError(f"unknown nome method {method!r}")


def _g_aux(t):
    """u of smallest modulus with u/(2(1+u)^2) = t."""
    return smallest_root([2 * t, 4 * t - 1, 2 * t])


def _r_aux(t):
    """k of smallest modulus with k(1-k)^2/(1+k)^2 = t."""
    return smallest_root([1, -(2 + t), 1 - 2 * t, -t])


def nome_from_argument(f: FamilyId, t, budget: SeriesBudget | None = None):
    """The q near 0 whose family argument (M, N, G^3, R^5) equals t."""
    f = FamilyId.parse(f)
    ctx = precision()
    t = ctx.cx(t)
    if t == 0:
        raise DomainError("argument must be nonzero")
    if f is FamilyId.MU:
        return nome_qj(2, t, budget)
    if f is FamilyId.N:
        return nome_qj(3, t, budget)
    if f is FamilyId.G:
        u = _g_aux(t)
        return nome_qj(2, u * (2 + u) ** 3 / (1 + 2 * u) ** 3, budget)
    k = _r_aux(t)
    z = 64 * k * (1 + k - k * k) ** 5 / ((1 + k * k) ** 2 * ((1 + 11 * k - k * k) ** 2 - 125 * k * k) ** 2)
    return nome_qj(4, z, budget)


def invert_base(f: FamilyId, alpha, budget: SeriesBudget | None = None):
    """q with base_function(f, q) = alpha, on the branch anchored at q -> 0.

    For G and R the result satisfies G(q)^3 = alpha^3 and R(q)^5 = alpha^5;
    it equals alpha itself when alpha is on the principal branch.
    """
    f = FamilyId.parse(f)
    ctx = precision()
    alpha = ctx.cx(alpha)
    power = {FamilyId.MU: 1, FamilyId.N: 1, FamilyId.G: 3, FamilyId.R: 5}[f]
    return nome_from_argument(f, alpha ** power, budget)


def nome4_quintic_sides(z, budget: SeriesBudget | None = None):
    """(q_4(A)^5, q_4(B)) for the quintic relation between signature-4 nomes.

    A = 64z(1+z)^5/((1+4z^2)((1+11z)^2-125z^2)^2),
    B = 64z^5(1+z)/((1+4z^2)((1-z)^2-5z^2)^2).
    """
    ctx = precision()
    z = ctx.cx(z)
    A = 64 * z * (1 + z) ** 5 / ((1 + 4 * z * z) * ((1 + 11 * z) ** 2 - 125 * z * z) ** 2)
    B = 64 * z ** 5 * (1 + z) / ((1 + 4 * z * z) * ((1 - z) ** 2 - 5 * z * z) ** 2)
    return nome_qj(4, A, budget) ** 5, nome_qj(4, B, budget)
