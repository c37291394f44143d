"""Base q-products M, N, G, R and the Mahler-measure q-expansions.

For ``f`` in :class:`FamilyId` the measure series evaluate

* ``mu(M(q))``, ``n(N(q))``, ``g(G(q)^3)`` and ``r(R(q)^5)``

as ``-Re[c log q + sum_j j w_f(j) log(1 - q^j)]`` with a character-like
weight ``w_f``.  All routines accept complex ``q`` with ``|q| < 1``.
"""

from __future__ import annotations

import enum

from .errors import BudgetExceeded, DomainError
from .numkit import SeriesBudget, precision, sum_series

__all__ = [
    "FamilyId",
    "CharacterId",
    "character",
    "qpochhammer",
    "base_function",
    "family_argument",
    "mahler_qseries",
    "series_weight",
    "hecke_residual",
    "mixed_relation_residuals",
    "DEFAULT_RADIUS",
]

DEFAULT_RADIUS = 0.25


class FamilyId(str, enum.Enum):
    """The four genus-one families mu, n, g, r."""

    MU = "mu"
    N = "n"
    G = "g"
    R = "r"

    @classmethod
    def parse(cls, value) -> "FamilyId":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise DomainError(f"unknown family {value!r}; expected one of mu, n, g, r") from None


class CharacterId(str, enum.Enum):
    CHI_M4 = "chi_m4"
    CHI_M3 = "chi_m3"
    CHI_R = "chi_r"


_CHI_TABLES = {
    CharacterId.CHI_M4: (4, (0, 1, 0, -1)),
    CharacterId.CHI_M3: (3, (0, 1, -1)),
    CharacterId.CHI_R: (5, (0, 1, 1j, -1j, -1)),
}


def character(c: CharacterId, n: int):
    """Value of the character ``c`` at the integer ``n``."""
    period, table = _CHI_TABLES[CharacterId(c)]
    return table[n % period]


# coefficient sequences w_f(j) of the measure series, periodic in j
_WEIGHTS = {
    FamilyId.MU: (4, (0, 2, 0, -2)),           # 2 chi_{-4}(j)
    FamilyId.N: (3, (0, 3, -3)),               # 3 chi_{-3}(j)
    FamilyId.G: (6, (0, 1, 1, 0, -1, -1)),     # (-1)^{j-1} chi_{-3}(j)
    FamilyId.R: (5, (0, 2, 1, -1, -2)),        # Re[(2-i) chi_r(j)]
}
_LOG_COEF = {FamilyId.MU: (1, 2), FamilyId.N: (1, 3), FamilyId.G: (1, 1), FamilyId.R: (1, 1)}
_HECKE_CHAR = {FamilyId.MU: CharacterId.CHI_M4, FamilyId.N: CharacterId.CHI_M3,
               FamilyId.G: CharacterId.CHI_M3, FamilyId.R: CharacterId.CHI_R}


def series_weight(f: FamilyId, j: int) -> int:
    """Coefficient w_f(j) multiplying ``j log(1 - q^j)`` in the measure series."""
    period, table = _WEIGHTS[FamilyId.parse(f)]
    return table[j % period]


def _check_q(q, *, allow_zero=False):
    ctx = precision()
    q = ctx.cx(q)
    a = abs(q)
    if not a < 1:
        raise DomainError(f"|q| = {float(a):.6g} must be < 1")
    if not allow_zero and a == 0:
        raise DomainError("q must be nonzero")
    return q


def qpochhammer(x, q, budget: SeriesBudget | None = None):
    """Infinite product (x; q)_inf = prod_{n>=0} (1 - x q^n)."""
    ctx = precision()
    q = _check_q(q, allow_zero=True)
    x = ctx.cx(x)
    budget = budget or SeriesBudget()
    eps = budget.resolved_eps()
    prod = ctx.cx(1)
    term = x
    small = 0
    for _ in range(budget.max_terms):
        prod *= 1 - term
        small = small + 1 if abs(term) < eps else 0
        if small >= 3 or term == 0:
            return prod
        term *= q
    raise BudgetExceeded("q-Pochhammer product did not converge")


def base_function(f: FamilyId, q, budget: SeriesBudget | None = None):
    """M(q), N(q), G(q) or R(q); fractional powers use the principal branch."""
    f = FamilyId.parse(f)
    ctx = precision()
    q = _check_q(q)
    P = lambda a, b: qpochhammer(a, b, budget)  # noqa: E731
    if f is FamilyId.MU:
        return 16 * q * P(q, q) ** 8 * P(q ** 4, q ** 4) ** 16 / P(q ** 2, q ** 2) ** 24
    if f is FamilyId.N:
        a = 27 * q * P(q ** 3, q ** 3) ** 12
        return a / (P(q, q) ** 12 + a)
    if f is FamilyId.G:
        return ctx.root(q, 3) * _g_ratio(q, budget)
    return ctx.root(q, 5) * _r_ratio(q, budget)


def _g_ratio(q, budget):
    return qpochhammer(q, q ** 2, budget) / qpochhammer(q ** 3, q ** 6, budget) ** 3


def _r_ratio(q, budget):
    q5 = q ** 5
    P = lambda a: qpochhammer(a, q5, budget)  # noqa: E731
    return P(q) * P(q ** 4) / (P(q ** 2) * P(q ** 3))


def family_argument(f: FamilyId, q, budget: SeriesBudget | None = None):
    """The Mahler-measure argument t attached to q: M(q), N(q), G(q)^3, R(q)^5.

    G^3 and R^5 are formed without fractional powers, so they are
    single-valued in q.
    """
    f = FamilyId.parse(f)
    q = _check_q(q)
    if f is FamilyId.G:
        return q * _g_ratio(q, budget) ** 3
    if f is FamilyId.R:
        return q * _r_ratio(q, budget) ** 5
    return base_function(f, q, budget)


def mahler_qseries(f: FamilyId, q, budget: SeriesBudget | None = None,
                   radius: float = DEFAULT_RADIUS):
    """Mahler measure of family ``f`` at argument ``family_argument(f, q)``.

    Raises :class:`DomainError` when ``|q|`` exceeds ``radius``.
    """
    f = FamilyId.parse(f)
    ctx = precision()
    q = _check_q(q)
    if abs(q) > radius:
        raise DomainError(f"|q| = {float(abs(q)):.4g} exceeds the q-series radius {radius}")
    period, table = _WEIGHTS[f]
    num, den = _LOG_COEF[f]

    def terms():
        qj = ctx.cx(1)
        j = 0
        while True:
            j += 1
            qj *= q
            w = table[j % period]
            yield j * w * ctx.log(1 - qj) if w else 0 * qj
    s = sum_series(terms(), budget)
    val = ctx.frac(num, den) * ctx.log(q) + s
    return -val.real


def _chi_real(f: FamilyId, p: int):
    val = character(_HECKE_CHAR[f], p)
    if isinstance(val, complex):
        raise DomainError(f"p={p} is excluded for family {f.value} (complex character value)")
    return val


def hecke_residual(f: FamilyId, p: int, q, budget: SeriesBudget | None = None,
                   radius: float = DEFAULT_RADIUS):
    """LHS - RHS of the Hecke eigenvalue relation at prime ``p``.

    sum_j F(e^{2 pi i j/p} q) - (1 + p^2 chi(p)) F(q^p) + p chi(p) F(q^{p^2})
    with F(q) = mahler_qseries(f, q).
    """
    f = FamilyId.parse(f)
    if f is FamilyId.G and p == 2:
        raise DomainError("p = 2 is excluded for the g family")
    if f is FamilyId.R and p % 5 in (2, 3):
        raise DomainError("p = 2, 3 (mod 5) is excluded for the r family")
    ctx = precision()
    q = ctx.cx(q)
    chi = _chi_real(f, p)
    F = lambda z: mahler_qseries(f, z, budget, radius)  # noqa: E731
    lhs = sum(F(ctx.expi(2 * ctx.pi * j / p) * q) for j in range(p))
    rhs = (1 + p * p * chi) * F(q ** p)
    if chi:
        rhs -= p * chi * F(q ** (p * p))
    return lhs - rhs


def mixed_relation_residuals(q, budget: SeriesBudget | None = None):
    """Residuals of the two mixed g/n relations at q.

    With g(q) := g(G^3(q)) and n(q) := n(N(q)) these are

    * r1 = 3 g(q) - [n(q) + 4 n(q^2)]
    * r2 = 3 n(q) - [g(q) - 8 g(-q) + 4 g(q^2)]
    """
    ctx = precision()
    q = ctx.cx(q)
    g = lambda z: mahler_qseries(FamilyId.G, z, budget)  # noqa: E731
    n = lambda z: mahler_qseries(FamilyId.N, z, budget)  # noqa: E731
    r1 = 3 * g(q) - (n(q) + 4 * n(q ** 2))
    r2 = 3 * n(q) - (g(q) - 8 * g(-q) + 4 * g(q ** 2))
    return r1, r2
