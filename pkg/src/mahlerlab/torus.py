"""Mahler measure of two-variable Laurent polynomials by Jensen reduction.

Writing ``P = c_d(x) y^d + ... + c_0(x)`` (after clearing negative powers of
y), Jensen's formula in y gives

    m(P) = (1/2pi) int_0^{2pi} [log|c_d(e^{it})| + sum_i log+|y_i(e^{it})|] dt.

The integrand is smooth except where a root y_i(e^{it}) crosses the unit
circle, where it has an algebraic kink.  Those points are located by
bisection on the count of roots outside the circle; each arc between them is
integrated with tanh-sinh quadrature, which is insensitive to endpoint
singularities.  Without crossings the integrand is periodic and analytic and
the trapezoid rule converges geometrically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NoConvergence
from .numkit import LaurentPoly, poly_roots, poly_roots_batch
from .qseries import FamilyId

__all__ = [
    "family_polynomial",
    "mu_polynomial",
    "g3_polynomial",
    "mahler_jensen",
    "mahler_grid",
    "mahler_1d",
    "jensen_integrand",
    "JensenInfo",
]

TWO_PI = 2.0 * math.pi
DEAD_BAND = 1e-13
_X = LaurentPoly.x()
_Y = LaurentPoly.y()


def mu_polynomial(k) -> LaurentPoly:
    """k + x + 1/x + y + 1/y, whose measure is written m(k)."""
    P = _X + _X ** -1 + _Y + _Y ** -1
    k = complex(k)
    return P + (k.real if k.imag == 0 else k) if k != 0 else P


def family_polynomial(f: FamilyId, t) -> LaurentPoly:
    """The defining Laurent polynomial of family ``f`` at argument ``t``.

    Radicals 4/sqrt(t) and 3/t^(1/3) use principal branches.
    """
    f = FamilyId.parse(f)
    t = complex(t)
    if t == 0:
        raise DomainError("t must be nonzero")
    if f is FamilyId.MU:
        return mu_polynomial(4 / t ** 0.5)
    if f is FamilyId.N:
        return _X ** 3 + _Y ** 3 + 1 - (3 / t ** (1 / 3)) * _X * _Y
    if f is FamilyId.G:
        return (_X + _Y) * (_X + 1) * (_Y + 1) - (1 / t) * _X * _Y
    return (_X + _Y + 1) * (_X + 1) * (_Y + 1) - (1 / t) * _X * _Y


def g3_polynomial(beta) -> LaurentPoly:
    """G_3(a, beta) at a = (x + 1/x)^2 (y + 1/y)^2/16, expanded.

    G_3(a, b) = (a^2 + b^2 + 6ab)^2 - 16ab(4(1 + ab) - 3(a + b))^2 is the
    third-degree modular polynomial for M(q).
    """
    b = complex(beta)
    a = ((_X + _X ** -1) * (_Y + _Y ** -1)) ** 2 / 16
    first = a * a + 6 * b * a + b * b
    second = (4 * b - 3) * a + (4 - 3 * b)
    return first * first - 16 * b * a * second * second


# ---------------------------------------------------------------------------
# one-variable measure


def mahler_1d(coeffs) -> float:
    """Measure of a one-variable polynomial (coefficients highest first)."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex))
    if c.size == 0:
        raise DomainError("zero polynomial has no Mahler measure")
    roots = poly_roots(c)
    mags = np.abs(roots)
    return float(np.log(abs(c[0])) + np.sum(np.log(mags[mags > 1.0])))


# ---------------------------------------------------------------------------
# Jensen integrand


class _YPoly:
    """Coefficient functions c_d(x) .. c_0(x) of P viewed as a polynomial in y."""

    def __init__(self, P: LaurentPoly):
        self.imin, C = P.y_coefficient_matrix()
        self.C = C  # rows: leading y-power first; columns: x^(imin + l)
        self.d = C.shape[0] - 1
        self.scale = float(np.max(np.abs(C)))

    def coeffs(self, theta):
        x = np.exp(1j * np.asarray(theta, dtype=float))
        ncol = self.C.shape[1]
        X = x[:, None] ** (self.imin + np.arange(ncol))[None, :]
        return X @ self.C.T  # (n, d+1)

    def roots(self, theta):
        V = self.coeffs(theta)
        return V, poly_roots_batch(V)

    def integrand(self, theta):
        V, R = self.roots(theta)
        mags = np.abs(R)
        with np.errstate(divide="ignore"):
            lead = np.log(np.abs(V[:, 0]))
            out = lead + np.sum(np.where(mags > 1.0, np.log(np.where(mags > 1.0, mags, 1.0)), 0.0), axis=1)
        return out

    def outside_count(self, theta):
        _, R = self.roots(theta)
        return np.sum(np.abs(R) > 1.0 + DEAD_BAND, axis=1)

    def lead_zero_angles(self):
        """Angles of zeros of c_d on the unit circle."""
        c = np.trim_zeros(self.C[0, ::-1], "f")  # highest x-power first
        c = np.trim_zeros(c, "b")
        if c.size <= 1:
            return np.empty(0)
        r = poly_roots(c)
        on = np.abs(np.abs(r) - 1.0) < 1e-9
        return np.mod(np.angle(r[on]), TWO_PI)


def jensen_integrand(P: LaurentPoly, theta) -> np.ndarray:
    """The Jensen integrand log|c_d| + sum log+|y_i| at the given angles."""
    return _YPoly(P).integrand(np.atleast_1d(theta))


# ---------------------------------------------------------------------------
# breakpoints and quadrature


@dataclass
class JensenInfo:
    method: str
    n_evals: int
    error_estimate: float
    breakpoints: list = field(default_factory=list)


_THETA0 = 0.1234567891234  # grid offset away from symmetric angles


def _refine(yp: _YPoly, theta: float, width: float = 1e-6) -> float:
    """Polish a bisected crossing with a smooth sign-changing function.

    Bisection on the outside-count is limited by root conditioning near a
    double root.  A simple crossing is refined on log|y(theta)| for the
    tracked root; a pair of roots meeting on the circle is refined on the
    symmetric function (y1+y2)^2/(y1 y2) - 4, which is negative while both
    roots sit on the circle and positive once they split.
    """
    _, R = yp.roots(np.array([theta]))
    R = R[0]
    dist = np.abs(np.abs(R) - 1.0)
    order = np.argsort(dist)
    y1 = R[order[0]]
    pair = R.size > 1 and dist[order[1]] < 1e-2 and abs(R[order[1]] - y1) < 2e-2

    if pair:
        anchor = 0.5 * (y1 + R[order[1]])

        def g(th):
            r = yp.roots(np.array([th]))[1][0]
            i = np.argsort(np.abs(r - anchor))[:2]
            a, b = r[i[0]], r[i[1]]
            return float(((a + b) ** 2 / (a * b)).real - 4.0)
    else:
        def g(th):
            r = yp.roots(np.array([th]))[1][0]
            return float(np.log(np.abs(r[np.argmin(np.abs(r - y1))])))
    lo, hi = theta - width, theta + width
    try:
        glo, ghi = g(lo), g(hi)
        if glo * ghi >= 0:
            return theta
        return brentq(g, lo, hi, xtol=1e-16, rtol=1e-15, maxiter=200)
    except (ValueError, RuntimeError, FloatingPointError):
        return theta


def _breakpoints(yp: _YPoly, grid: int) -> np.ndarray:
    th = _THETA0 + TWO_PI * np.arange(grid + 1) / grid
    cnt = yp.outside_count(th)
    idx = np.nonzero(cnt[1:] != cnt[:-1])[0]
    pts = []
    if idx.size:
        lo, hi = th[idx].copy(), th[idx + 1].copy()
        clo = cnt[idx]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            cm = yp.outside_count(mid)
            same = cm == clo
            lo = np.where(same, mid, lo)
            hi = np.where(same, hi, mid)
        pts.extend(np.mod([_refine(yp, float(m)) for m in 0.5 * (lo + hi)], TWO_PI))
    pts.extend(yp.lead_zero_angles())
    if not pts:
        return np.empty(0)
    pts = np.sort(np.mod(np.asarray(pts), TWO_PI))
    keep = [pts[0]]
    for p in pts[1:]:
        if p - keep[-1] > 1e-11:
            keep.append(p)
    if len(keep) > 1 and keep[0] + TWO_PI - keep[-1] <= 1e-11:
        keep.pop()
    return np.asarray(keep)


def _trapezoid(yp, n0, tol, max_nodes):
    n = max(8, int(n0))
    th = _THETA0 + TWO_PI * np.arange(n) / n
    total = np.sum(yp.integrand(th))
    val = total / n
    evals = n
    while n < max_nodes:
        th = _THETA0 + TWO_PI * (np.arange(n) + 0.5) / n
        total += np.sum(yp.integrand(th))
        evals += n
        n *= 2
        new = total / n
        err = abs(new - val)
        val = new
        if err < tol:
            return float(val), JensenInfo("trapezoid", evals, float(err))
    raise NoConvergence(f"trapezoid rule did not reach {tol:g} with {max_nodes} nodes")


_TS_TMAX = 4.0


def _ts_nodes(level):
    """tanh-sinh abscissae as (sign, distance-to-endpoint, weight) for new nodes.

    Level 0 has step 1 and includes t = 0; level L > 0 adds odd multiples of
    2^-L.  Weights are for the interval [-1, 1] with the step included.
    """
    h = 2.0 ** -level
    if level == 0:
        t = np.arange(0, _TS_TMAX + 1e-12, 1.0)
    else:
        t = np.arange(h, _TS_TMAX + 1e-12, 2 * h)
    u = 0.5 * math.pi * np.sinh(t)
    w = h * 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
    delta = 2.0 / (np.exp(2 * u) + 1.0)  # 1 - tanh(u), no cancellation
    return t, delta, w


def _tanh_sinh(yp, arcs, tol, max_level):
    a = arcs[:, 0]
    half = 0.5 * (arcs[:, 1] - arcs[:, 0])
    acc = np.zeros(len(arcs))

    def level_sum(level):
        t, delta, w = _ts_nodes(level)
        thetas, weights, owner = [], [], []
        for s in (-1.0, 1.0):
            for j in range(len(arcs)):
                if s < 0:
                    th = a[j] + half[j] * delta
                else:
                    th = a[j] + 2 * half[j] - half[j] * delta
                ok = half[j] * delta > 4e-16 * max(1.0, abs(th).max() if th.size else 1.0)
                if level == 0 and s > 0:
                    ok &= t > 0  # centre node counted once
                thetas.append(th[ok])
                weights.append(w[ok] * half[j])
                owner.append(np.full(ok.sum(), j))
        th = np.concatenate(thetas)
        f = yp.integrand(th)
        contrib = np.concatenate(weights) * f
        return np.bincount(np.concatenate(owner), weights=contrib, minlength=len(arcs)), th.size

    s, evals = level_sum(0)
    acc += s
    prev = acc.copy()
    for level in range(1, max_level + 1):
        s, n = level_sum(level)
        evals += n
        acc = 0.5 * prev + s  # halving the step halves the old weights
        err = float(np.sum(np.abs(acc - prev))) / TWO_PI
        if level >= 3 and err < tol:
            return float(np.sum(acc) / TWO_PI), evals, err
        prev = acc
    raise NoConvergence(f"tanh-sinh did not reach {tol:g} by level {max_level} (last change {err:.2e})")


def mahler_jensen(P: LaurentPoly, n_nodes: int = 64, tol: float = 1e-12,
                  grid: int = 2048, max_nodes: int = 2 ** 18, max_level: int = 12,
                  full_output: bool = False):
    """Mahler measure of ``P`` by Jensen reduction in y and integration in x.

    Parameters
    ----------
    P : LaurentPoly
    n_nodes : int
        Starting node count for the trapezoid rule.
    tol : float
        Absolute stabilization target between successive refinements.
    grid : int
        Resolution of the scan for unit-circle crossings of the y-roots.
    full_output : bool
        Also return a :class:`JensenInfo`.
    """
    if not isinstance(P, LaurentPoly):
        raise DomainError("P must be a LaurentPoly")
    yp = _YPoly(P)
    if yp.d == 0:
        # P = c(x) y^j: a one-variable measure
        val = mahler_1d(yp.C[0, ::-1])
        info = JensenInfo("roots", 0, 0.0)
        return (val, info) if full_output else val
    bps = _breakpoints(yp, grid)
    if bps.size == 0:
        val, info = _trapezoid(yp, n_nodes, tol, max_nodes)
    else:
        ends = np.append(bps[1:], bps[0] + TWO_PI)
        arcs = np.stack([bps, ends], axis=1)
        val, evals, err = _tanh_sinh(yp, arcs, tol, max_level)
        info = JensenInfo("tanh-sinh", evals, err, [float(b) for b in bps])
    if not math.isfinite(val):
        raise NoConvergence("non-finite Mahler measure estimate")
    return (val, info) if full_output else val


def mahler_grid(P: LaurentPoly, n: int = 256, chunk: int = 256) -> float:
    """Plain n x n midpoint-grid average of log|P| over the torus.

    A slow, low-accuracy sanity oracle independent of the Jensen reduction.
    """
    th = TWO_PI * (np.arange(n) + 0.5) / n
    y = np.exp(1j * th)
    total = 0.0
    for s in range(0, n, chunk):
        x = np.exp(1j * th[s:s + chunk])[:, None]
        v = np.abs(P(x, y[None, :]))
        total += float(np.sum(np.log(np.maximum(v, 1e-300))))
    return total / (n * n)
