"""Shared numerics: precision context, series driver, roots, Laurent polynomials.

Precision is a process-wide switch.  The default ``double`` context uses
``cmath``/``math`` and hardware floats.  The ``extended`` context routes the
scalar series kernels (qseries, nome, hypergeom) through a private mpmath
context at 34 significant digits.  The vectorized kernels (torus, lattice,
L-series) always run in double precision.

The switch is read from ``MAHLERLAB_PREC`` on first use and can be changed
with :func:`set_precision`.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Union

import mpmath
import numpy as np
import scipy.special as sc

from .errors import BranchAmbiguous, BudgetExceeded, DegenerateLeading, DomainError

Number = Union[int, float, complex]

__all__ = [
    "SeriesBudget",
    "SeriesInfo",
    "LaurentPoly",
    "precision",
    "set_precision",
    "sum_series",
    "poly_roots",
    "poly_roots_batch",
    "poly_eval",
    "smallest_root",
]


# ---------------------------------------------------------------------------
# precision contexts


class _DoubleContext:
    name = "double"
    digits = 15
    eps = 1e-18
    pi = math.pi

    @staticmethod
    def mpf(x):
        return float(x)

    @staticmethod
    def frac(p, q):
        return p / q

    @staticmethod
    def cx(z):
        return complex(z)

    exp = staticmethod(cmath.exp)
    log = staticmethod(cmath.log)
    sqrt = staticmethod(cmath.sqrt)

    @staticmethod
    def rlog(x):
        return math.log(x)

    @staticmethod
    def digamma(x):
        return float(sc.digamma(float(x)))

    @staticmethod
    def cbrt(z):
        return complex(z) ** (1.0 / 3.0)

    @staticmethod
    def root(z, n):
        return complex(z) ** (1.0 / n)

    @staticmethod
    def expi(theta):
        # e^{i theta} for real theta
        return cmath.exp(1j * theta)

    @staticmethod
    def to_float(x):
        return float(x.real) if isinstance(x, complex) else float(x)

    @staticmethod
    def to_complex(z):
        return complex(z)


class _ExtendedContext:
    name = "extended"
    digits = 34

    def __init__(self):
        self._mp = mpmath.MPContext()
        self._mp.dps = 34
        self.eps = self._mp.mpf("1e-36")
        self.pi = self._mp.pi

    def mpf(self, x):
        return self._mp.mpf(x)

    def frac(self, p, q):
        return self._mp.mpf(p) / q

    def cx(self, z):
        return self._mp.mpc(z)

    def literal(self, text: str):
        """Real or complex value of a decimal literal at full working precision."""
        z = self._mp.mpmathify(text.strip().replace("i", "j"))
        return z.real if isinstance(z, mpmath.mpc) and z.imag == 0 else z

    def exp(self, z):
        return self._mp.exp(z)

    def log(self, z):
        return self._mp.log(self._mp.mpc(z))

    def sqrt(self, z):
        return self._mp.sqrt(self._mp.mpc(z))

    def rlog(self, x):
        return self._mp.log(self._mp.mpf(x))

    def digamma(self, x):
        return self._mp.digamma(x)

    def cbrt(self, z):
        return self._mp.power(self._mp.mpc(z), self._mp.mpf(1) / 3)

    def root(self, z, n):
        return self._mp.power(self._mp.mpc(z), self._mp.mpf(1) / n)

    def expi(self, theta):
        return self._mp.expj(theta)

    @staticmethod
    def to_float(x):
        return float(x.real) if isinstance(x, mpmath.mpc) else float(x)

    @staticmethod
    def to_complex(z):
        return complex(z)


_active = None


def _make(mode: str):
    mode = mode.strip().lower()
    if mode in ("", "double", "default"):
        return _DoubleContext()
    if mode in ("extended", "ext", "quad"):
        return _ExtendedContext()
    raise DomainError(f"unknown precision mode {mode!r}; use 'double' or 'extended'")


def precision():
    """Return the active precision context."""
    global _active
    if _active is None:
        _active = _make(os.environ.get("MAHLERLAB_PREC", "double"))
    return _active


def set_precision(mode: str) -> str:
    """Switch the process-wide precision mode; returns the previous mode name."""
    global _active
    old = precision().name
    _active = _make(mode)
    return old


# ---------------------------------------------------------------------------
# series driver


@dataclass(frozen=True)
class SeriesBudget:
    """Absolute tail target ``eps`` and a hard cap on the number of terms.

    ``eps=None`` means the precision context default.
    """

    eps: float | None = None
    max_terms: int = 100_000

    def __post_init__(self):
        if self.eps is not None and not self.eps > 0:
            raise DomainError("SeriesBudget.eps must be positive")
        if self.max_terms < 8:
            raise DomainError("SeriesBudget.max_terms must be at least 8")

    def resolved_eps(self):
        return precision().eps if self.eps is None else self.eps


DEFAULT_BUDGET = SeriesBudget()


@dataclass(frozen=True)
class SeriesInfo:
    n_terms: int
    tail_bound: float


def sum_series(terms: Callable[[int], Number] | Iterable[Number],
               budget: SeriesBudget | None = None,
               full_output: bool = False):
    """Sum a series until three consecutive terms are below ``budget.eps``.

    ``terms`` is either a callable ``n -> term`` (n = 0, 1, ...) or an
    iterable yielding terms in order.  With ``full_output`` a
    :class:`SeriesInfo` is returned alongside the sum; its ``tail_bound`` is a
    geometric estimate from the last two terms.
    """
    budget = budget or DEFAULT_BUDGET
    eps = budget.resolved_eps()
    if callable(terms):
        it = (terms(n) for n in range(budget.max_terms))
    else:
        it = iter(terms)
    total = 0
    small = 0
    prev = cur = 0.0
    n = 0
    for t in it:
        if n >= budget.max_terms:
            break
        total = total + t
        n += 1
        prev, cur = cur, abs(t)
        small = small + 1 if cur < eps else 0
        if small >= 3:
            if full_output:
                r = cur / prev if prev else 0.0
                tail = float(cur * r / (1 - r)) if r < 1 else float(cur)
                return total, SeriesInfo(n, tail)
            return total
    else:
        if n < budget.max_terms:
            # finite iterable ran out: the sum is exact
            return (total, SeriesInfo(n, 0.0)) if full_output else total
    raise BudgetExceeded(f"series did not converge within {budget.max_terms} terms "
                         f"(last |term| = {float(cur):.3e}, eps = {float(eps):.1e})")


# ---------------------------------------------------------------------------
# polynomial roots

_LEAD_TOL = 1e-14


def poly_eval(coeffs, z):
    """Horner evaluation; ``coeffs`` highest degree first."""
    acc = 0
    for c in coeffs:
        acc = acc * z + c
    return acc


def _quadratic(a, b, c):
    disc = np.sqrt(b * b - 4 * a * c + 0j)
    s = np.where((np.conj(b) * disc).real >= 0, 1.0, -1.0)
    qq = -0.5 * (b + s * disc)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = qq / a
        r2 = np.where(qq != 0, c / np.where(qq != 0, qq, 1), 0)
    return r1, r2


def poly_roots(coeffs) -> np.ndarray:
    """All roots (with multiplicity) of a polynomial, coefficients highest first.

    Uses a stable quadratic formula for degree <= 2 and companion-matrix
    eigenvalues followed by a guarded Newton polish otherwise.
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1 or c.size == 0:
        raise DomainError("coeffs must be a non-empty 1-d sequence")
    scale = np.max(np.abs(c))
    if scale == 0 or not np.all(np.isfinite(c)):
        raise DomainError("polynomial is zero or non-finite")
    if abs(c[0]) / scale < _LEAD_TOL:
        raise DegenerateLeading(f"|leading|/max|coeff| = {abs(c[0]) / scale:.2e}")
    d = c.size - 1
    if d == 0:
        return np.empty(0, dtype=complex)
    if d == 1:
        return np.array([-c[1] / c[0]])
    if d == 2:
        r1, r2 = _quadratic(c[0], c[1], c[2])
        return np.array([complex(r1), complex(r2)])
    roots = np.roots(c).astype(complex)
    return _polish(c[None, :], roots[None, :])[0]


def smallest_root(coeffs, bound: float = 0.5, tie_tol: float = 1e-12):
    """The unique root of smallest modulus, refined in the active precision.

    ``coeffs`` are highest degree first and may be complex.  Raises
    :class:`BranchAmbiguous` if that root has modulus >= ``bound`` or if two
    roots tie in modulus to within ``tie_tol``.
    """
    ctx = precision()
    roots = poly_roots([complex(c) for c in coeffs])
    order = np.argsort(np.abs(roots))
    r0 = roots[order[0]]
    if abs(r0) >= bound:
        raise BranchAmbiguous(f"smallest root has modulus {abs(r0):.3g} >= {bound}")
    if len(roots) > 1 and abs(abs(roots[order[1]]) - abs(r0)) <= tie_tol:
        raise BranchAmbiguous("two roots of equal smallest modulus")
    # Newton refinement in the active precision (a no-op in double mode)
    z = ctx.cx(r0)
    cs = [ctx.cx(c) for c in coeffs]
    for _ in range(1 if ctx.name == "double" else 4):
        p = 0
        dp = 0
        for c in cs:
            dp = dp * z + p
            p = p * z + c
        if dp == 0:
            break
        step = p / dp
        z = z - step
        if abs(step) <= abs(z) * ctx.eps:
            break
    return z


def _polish(C, R, steps=2):
    """Newton-polish batched roots, keeping a step only if it lowers |p|."""
    d = C.shape[1] - 1
    for _ in range(steps):
        p = np.zeros_like(R)
        dp = np.zeros_like(R)
        for k in range(d + 1):
            dp = dp * R + p
            p = p * R + C[:, k:k + 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = R - p / dp
        pc = np.zeros_like(R)
        for k in range(d + 1):
            pc = pc * cand + C[:, k:k + 1]
        ok = np.isfinite(cand) & (np.abs(pc) < np.abs(p))
        R = np.where(ok, cand, R)
    return R


def poly_roots_batch(C) -> np.ndarray:
    """Roots of many polynomials of equal degree; ``C`` has shape (n, d+1).

    Rows must have a nonzero leading coefficient.  Returns shape (n, d).
    """
    C = np.asarray(C, dtype=complex)
    n, d1 = C.shape
    d = d1 - 1
    if d == 0:
        return np.empty((n, 0), dtype=complex)
    if d == 1:
        return (-C[:, 1] / C[:, 0])[:, None]
    if d == 2:
        r1, r2 = _quadratic(C[:, 0], C[:, 1], C[:, 2])
        return np.stack([r1, r2], axis=1)
    comp = np.zeros((n, d, d), dtype=complex)
    comp[:, 0, :] = -C[:, 1:] / C[:, :1]
    idx = np.arange(d - 1)
    comp[:, idx + 1, idx] = 1.0
    R = np.linalg.eigvals(comp)
    return _polish(C, R)


# ---------------------------------------------------------------------------
# Laurent polynomials


class LaurentPoly:
    """Finitely supported Laurent polynomial in x, y with complex coefficients.

    Stored as a mapping ``(i, j) -> c`` for the monomial ``c x^i y^j``; zero
    coefficients are never stored.  Supports ``+``, ``-``, ``*``, integer
    powers and scalar operands, so polynomials can be written naturally::

        x, y = LaurentPoly.x(), LaurentPoly.y()
        P = 2 + x + x**-1 + y + y**-1
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple[int, int], Number] | Iterable = ()):
        if isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = (((int(i), int(j)), c) for i, j, c in terms)
        acc: dict[tuple[int, int], complex] = {}
        for key, c in items:
            acc[key] = acc.get(key, 0) + complex(c)
        self._terms = {k: v for k, v in acc.items() if v != 0}
        if not self._terms:
            raise DomainError("LaurentPoly must have at least one nonzero term")
        if not all(cmath.isfinite(v) for v in self._terms.values()):
            raise DomainError("LaurentPoly coefficients must be finite")

    # constructors
    @classmethod
    def x(cls):
        return cls({(1, 0): 1})

    @classmethod
    def y(cls):
        return cls({(0, 1): 1})

    @classmethod
    def const(cls, c):
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, i, j, c=1):
        return cls({(i, j): c})

    # accessors
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(sorted(self._terms.items()))

    def x_range(self):
        xs = [i for i, _ in self._terms]
        return min(xs), max(xs)

    def y_range(self):
        ys = [j for _, j in self._terms]
        return min(ys), max(ys)

    # arithmetic
    @staticmethod
    def _coerce(other):
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return LaurentPoly.const(other) if other != 0 else None
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            return self
        t = dict(self._terms)
        for k, v in o._terms.items():
            t[k] = t.get(k, 0) + v
        return LaurentPoly(t)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self if o is None else self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            if other == 0:
                raise DomainError("product is the zero polynomial")
            return LaurentPoly({k: v * other for k, v in self._terms.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        t: dict = {}
        for (i1, j1), a in self._terms.items():
            for (i2, j2), b in other._terms.items():
                key = (i1 + i2, j1 + j2)
                t[key] = t.get(key, 0) + a * b
        return LaurentPoly(t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * (1 / other)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, (int, np.integer)):
            return NotImplemented
        if n < 0:
            if len(self._terms) != 1:
                raise DomainError("negative powers are only defined for monomials")
            (i, j), c = next(iter(self._terms.items()))
            return LaurentPoly({(i * n, j * n): c ** n})
        out = LaurentPoly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        body = " + ".join(f"({c:g})*x^{i}*y^{j}" for (i, j), c in self)
        return f"LaurentPoly({body})"

    # transforms
    def inverted(self) -> "LaurentPoly":
        """P(1/x, 1/y)."""
        return LaurentPoly({(-i, -j): c for (i, j), c in self._terms.items()})

    def swapped(self) -> "LaurentPoly":
        """P(y, x)."""
        return LaurentPoly({(j, i): c for (i, j), c in self._terms.items()})

    def conjugate(self) -> "LaurentPoly":
        return LaurentPoly({k: v.conjugate() for k, v in self._terms.items()})

    def __call__(self, x, y):
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        out = np.zeros(np.broadcast(x, y).shape, dtype=complex)
        for (i, j), c in self._terms.items():
            out = out + c * x ** i * y ** j
        return out

    def y_coefficient_matrix(self):
        """Coefficients of y^j as Laurent polynomials in x.

        Returns ``(imin, C)`` where ``C[k, l]`` is the coefficient of
        ``x^(imin + l) * y^(jmax - k)``: row 0 is the leading y-coefficient,
        after multiplying through by ``y^(-jmin)``.
        """
        imin, imax = self.x_range()
        jmin, jmax = self.y_range()
        C = np.zeros((jmax - jmin + 1, imax - imin + 1), dtype=complex)
        for (i, j), c in self._terms.items():
            C[jmax - j, i - imin] = c
        return imin, C
