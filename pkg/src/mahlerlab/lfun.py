"""Elliptic-curve L-series by point counting and the value L'(E, 0).

Curves are integral models v^2 = u^3 + A u^2 + B u.  Good-prime coefficients
come from naive counting over F_p; coefficients at primes dividing the model
discriminant come from a registered newform (eta product) of the stated
conductor, or failing that from a search over local values that passes the
functional-equation test.

With Lambda(s) = (sqrt(N)/2 pi)^s Gamma(s) L(E, s) and Lambda(s) = Lambda(2 - s),
L'(E, 0) = Lambda(0) = Lambda(2), and for any t > 0, with c = 2 pi/sqrt(N),

    Lambda(2) = sum_n a_n [Gamma(2, c n t)/(c n)^2 + E_1(c n/t)].

The right side is independent of t only when the sign, conductor and local
factors are right; comparing t = 1 with t = 1.3 is the self-test.
"""

from __future__ import annotations

import itertools
import math
import os
import tempfile
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.special import exp1

from .errors import BadPrime, DegenerateCurve, DomainError, NoConvergence, SignMismatch

__all__ = [
    "Curve",
    "ApCache",
    "curve_from_k2",
    "squarefree_part",
    "primes_upto",
    "ap",
    "local_ap",
    "anlist",
    "eta_product_coeffs",
    "NEWFORMS",
    "KNOWN_CONDUCTORS",
    "LValue",
    "lprime_at_0",
    "cache_dir",
]

# eta quotients q^s prod_d prod_n (1 - q^{dn})^{e_d} as ((d, e_d), ...)
NEWFORMS: dict[int, tuple[tuple[int, int], ...]] = {
    15: ((1, 1), (3, 1), (5, 1), (15, 1)),
    24: ((2, 1), (4, 1), (6, 1), (12, 1)),
    32: ((4, 2), (8, 2)),
    64: ((8, 8), (4, -2), (16, -2)),
}

# conductor of curve_from_k2(k2) (twisted model), validated against NEWFORMS
KNOWN_CONDUCTORS = {1: 15, 18: 24, 32: 64}

FE_T = (1.0, 1.3)
FE_TOL = 1e-7


def squarefree_part(n: int) -> int:
    """Signed squarefree part of a nonzero integer."""
    if n == 0:
        raise DomainError("0 has no squarefree part")
    s = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e % 2:
            out *= p
        p += 1
    return s * out * n


@dataclass(frozen=True)
class Curve:
    """v^2 = u^3 + A u^2 + B u over Z."""

    A: int
    B: int
    label: str = ""

    def __post_init__(self):
        if self.discriminant == 0:
            raise DegenerateCurve(f"singular model A={self.A}, B={self.B}")
        if not self.label:
            object.__setattr__(self, "label", f"A{self.A}_B{self.B}")

    @property
    def discriminant(self) -> int:
        # discriminant of the cubic times 16
        return 16 * self.B ** 2 * (self.A ** 2 - 4 * self.B)

    def bad_primes(self) -> list[int]:
        d = abs(self.discriminant)
        out = []
        p = 2
        while p * p <= d:
            if d % p == 0:
                out.append(p)
                while d % p == 0:
                    d //= p
            p += 1
        if d > 1:
            out.append(d)
        return out


def curve_from_k2(k2, twist: bool = True) -> Curve:
    """Integral model of Y^2 = X(X^2 + (k^2/4 - 2)X + 1).

    With u = 4X, v = 8Y this is v^2 = u^3 + (k^2 - 8)u^2 + 16u.  For
    irrational k the Mahler measure is attached to the quadratic twist by
    d = squarefree part of k^2, v^2 = u^3 + d(k^2 - 8)u^2 + 16 d^2 u, which
    is the default; ``twist=False`` returns the untwisted model.
    """
    k2 = Fraction(k2)
    if k2.denominator != 1:
        raise DomainError(f"k^2 = {k2} must be an integer")
    k2 = int(k2)
    if k2 in (0, 16):
        raise DegenerateCurve(f"k^2 = {k2} gives a singular curve")
    d = squarefree_part(k2) if twist and k2 > 0 else 1
    label = f"k2_{k2}" + (f"_tw{d}" if d != 1 else "")
    return Curve(d * (k2 - 8), 16 * d * d, label)


# ---------------------------------------------------------------------------
# coefficient cache


def cache_dir() -> Path | None:
    d = os.environ.get("MAHLERLAB_CACHE_DIR")
    return Path(d) if d else None


class ApCache:
    """a_p values for one curve label, optionally persisted as "p,a_p" lines."""

    def __init__(self, label: str, directory: Path | str | None = None):
        self.label = label
        self.directory = Path(directory) if directory is not None else cache_dir()
        self.entries: dict[int, int] = {}
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            self.entries = self.read(self.path)

    @property
    def path(self) -> Path | None:
        return None if self.directory is None else self.directory / f"{self.label}.txt"

    @staticmethod
    def read(path: Path) -> dict[int, int]:
        out = {}
        for line in Path(path).read_text().splitlines():
            if line.strip():
                p, a = line.split(",")
                out[int(p)] = int(a)
        return out

    def save(self) -> None:
        if self.path is None:
            return
        with self._lock:
            self.directory.mkdir(parents=True, exist_ok=True)
            text = "".join(f"{p},{a}\n" for p, a in sorted(self.entries.items()))
            fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".ap_")
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, self.path)

    def update(self, values: dict[int, int]) -> None:
        with self._lock:
            self.entries.update(values)


# ---------------------------------------------------------------------------
# point counting


def primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    s = np.ones(n + 1, dtype=bool)
    s[:2] = False
    for i in range(2, math.isqrt(n) + 1):
        if s[i]:
            s[i * i::i] = False
    return np.nonzero(s)[0]


def _count_ap(A: int, B: int, p: int) -> int:
    u = np.arange(p, dtype=np.int64)
    sq = np.zeros(p, dtype=bool)
    sq[(u * u) % p] = True
    f = ((u * u % p) * u + (A % p) * (u * u % p) + (B % p) * u) % p
    chi = np.where(f == 0, 0, np.where(sq[f], 1, -1))
    return -int(chi.sum())


def ap(c: Curve, p: int) -> int:
    """a_p = p + 1 - #E(F_p) for an odd prime of good reduction."""
    p = int(p)
    if p < 3:
        raise BadPrime("p = 2 is not handled by point counting")
    if c.discriminant % p == 0:
        raise BadPrime(f"p = {p} divides the discriminant")
    return _count_ap(c.A, c.B, p)


# ---------------------------------------------------------------------------
# eta products


def eta_product_coeffs(parts, n: int) -> np.ndarray:
    """Coefficients a_0..a_n of q^s prod_d prod_k (1 - q^{dk})^{e_d}.

    The leading power s = sum d e_d / 24 must be a nonnegative integer.
    """
    s = Fraction(sum(d * e for d, e in parts), 24)
    if s.denominator != 1 or s < 0:
        raise DomainError("eta quotient does not have an integral q-shift")
    s = int(s)
    m = n - s
    c = np.zeros(max(m, 0) + 1, dtype=np.int64)
    c[0] = 1
    for d, e in parts:
        for k in range(1, m // d + 1):
            step = d * k
            for _ in range(abs(e)):
                if e > 0:
                    c[step:] = c[step:] - c[:m + 1 - step]
                else:
                    for r in range(step):
                        c[r::step] = np.cumsum(c[r::step])
    out = np.zeros(n + 1, dtype=np.int64)
    out[s:] = c[:n + 1 - s]
    return out


# ---------------------------------------------------------------------------
# local data and a_n


def _local_candidates(p: int, conductor: int) -> list[int]:
    if conductor % p:
        b = int(2 * math.sqrt(p))
        return list(range(-b, b + 1))
    if conductor % (p * p) == 0:
        return [0]
    return [-1, 0, 1]


def local_ap(c: Curve, conductor: int) -> dict[int, int] | None:
    """a_p at primes dividing the discriminant, from the registered newform.

    Returns None when no newform of that level is registered.
    """
    parts = NEWFORMS.get(conductor)
    if parts is None:
        return None
    bad = c.bad_primes()
    e = eta_product_coeffs(parts, max(bad) if bad else 1)
    return {p: int(e[p]) for p in bad}


def _ap_table(c: Curve, pmax: int, cache: ApCache | None) -> dict[int, int]:
    out = dict(cache.entries) if cache is not None else {}
    disc = c.discriminant
    new = {}
    for p in primes_upto(pmax):
        p = int(p)
        if p in out or disc % p == 0:
            continue
        new[p] = _count_ap(c.A, c.B, p)
    if cache is not None and new:
        cache.update(new)
        cache.save()
    out.update(new)
    return out


def anlist(c: Curve, n: int, local: dict[int, int], conductor: int,
           cache: ApCache | None = None) -> np.ndarray:
    """a_1..a_n (index 0 unused) from good-prime counts and local values.

    a_{p^r} = a_p a_{p^{r-1}} - p a_{p^{r-2}} at p not dividing the conductor
    and a_{p^r} = a_p^r at p dividing it; a_{mn} = a_m a_n for coprime m, n.
    """
    if n < 1:
        raise DomainError("need at least one coefficient")
    missing = [p for p in c.bad_primes() if p not in local]
    if missing:
        raise BadPrime(f"no local value for primes {missing}")
    apd = _ap_table(c, n, cache)
    apd.update(local)
    spf = np.arange(n + 1)
    for p in primes_upto(math.isqrt(n)):
        blk = spf[p * p::p]
        mask = blk == np.arange(p * p, n + 1, p)
        blk[mask] = p
    a = np.zeros(n + 1, dtype=float)
    a[1] = 1.0
    for m in range(2, n + 1):
        p = int(spf[m])
        k = m
        while k % p == 0:
            k //= p
        if k > 1:
            a[m] = a[k] * a[m // k]
        elif m == p:
            a[m] = apd[p]
        elif conductor % p == 0:
            a[m] = apd[p] * a[m // p]
        else:
            a[m] = apd[p] * a[m // p] - p * a[m // (p * p)]
    return a


# ---------------------------------------------------------------------------
# L'(E, 0)


@dataclass
class LValue:
    value: float
    conductor: int
    n_terms: int
    fe_residual: float
    tail_bound: float
    local: dict[int, int] = field(default_factory=dict)


def _weights(n: np.ndarray, conductor: int, t: float) -> np.ndarray:
    x = 2 * math.pi / math.sqrt(conductor) * n
    return (1 + x * t) * np.exp(-x * t) / (x * x) + exp1(x / t)


def _terms_needed(conductor: int, eps: float, limit: int) -> int | None:
    # smallest M whose tail sum_{n>M} n w(n) (|a_n| <= n) is below eps
    # for every t in FE_T; None if M would exceed limit
    c = 2 * math.pi / math.sqrt(conductor)
    rate = c / max(FE_T)
    n = np.arange(1, limit + 2, dtype=float)
    w = np.max([_weights(n, conductor, t) for t in FE_T], axis=0) * n
    tail = w / (1 - math.exp(-rate))
    idx = np.nonzero(tail < eps)[0]
    if idx.size == 0:
        return None
    return int(idx[0])  # tail from n = idx+1 onward is below eps


def _lambda2(a: np.ndarray, conductor: int, t: float) -> float:
    n = np.arange(1, a.size, dtype=float)
    return float(np.dot(a[1:], _weights(n, conductor, t)))


def lprime_at_0(c: Curve, conductor: int, N_terms: int = 100_000, eps: float = 1e-13,
                cache: ApCache | None = None, fe_tol: float = FE_TOL) -> LValue:
    """L'(E, 0) for a rank-one curve of the given conductor, root number +1.

    Uses at most ``N_terms`` coefficients; raises NoConvergence if the tail
    bound after ``N_terms`` terms exceeds ``eps`` and SignMismatch if the
    sum depends on the smoothing parameter (wrong sign, conductor or local
    factors).
    """
    conductor = int(conductor)
    if conductor < 1:
        raise DomainError("conductor must be positive")
    need = _terms_needed(conductor, eps, max(int(N_terms), 1))
    if need is None or need > N_terms:
        raise NoConvergence(f"{N_terms} coefficients leave a tail above {eps:g}")
    need = max(need, 1)
    if cache is None and cache_dir() is not None:
        cache = ApCache(c.label)
    local = local_ap(c, conductor)
    candidates = [local] if local is not None else _local_search_space(c, conductor)
    best = None
    for loc in candidates:
        a = anlist(c, need, loc, conductor, cache)
        v = [_lambda2(a, conductor, t) for t in FE_T]
        res = abs(v[0] - v[1])
        if best is None or res < best.fe_residual:
            best = LValue(v[0], conductor, need, res, eps, dict(loc))
        if res < fe_tol and local is None:
            break
    if best.fe_residual > fe_tol:
        raise SignMismatch(
            f"functional-equation test failed (residual {best.fe_residual:.3g}) for conductor {conductor}")
    return best


def _local_search_space(c: Curve, conductor: int):
    bad = c.bad_primes()
    opts = [_local_candidates(p, conductor) for p in bad]
    for combo in itertools.product(*opts):
        yield dict(zip(bad, combo))
