import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mahlerlab.errors import DomainError
from mahlerlab.hypergeom import mu_hyp
from mahlerlab.numkit import LaurentPoly
from mahlerlab.torus import (family_polynomial, g3_polynomial, jensen_integrand, mahler_1d, mahler_grid,
                             mahler_jensen, mu_polynomial)

X, Y = LaurentPoly.x(), LaurentPoly.y()
M_ONE = 0.25133043371325223

# Gaussian integers keep leading coefficients away from the degeneracy guard
coef = st.builds(complex, st.integers(-3, 3), st.integers(-3, 3))


def poly_from(cs):
    terms = {}
    for (i, j), c in zip([(0, 0), (1, 0), (0, 1), (1, 1), (-1, 1)], cs):
        if c != 0:
            terms[(i, j)] = c
    return LaurentPoly(terms) if len(terms) >= 2 else None


def test_one_variable():
    assert mahler_jensen(Y - 2) == pytest.approx(math.log(2), abs=1e-14)
    assert mahler_1d([1, -3, 2]) == pytest.approx(math.log(2), abs=1e-14)
    with pytest.raises(DomainError):
        mahler_1d([0])


def test_smyth():
    assert mahler_jensen(1 + X + Y) == pytest.approx(0.3230659472194505, abs=1e-12)


def test_k_zero_and_small_k():
    assert abs(mahler_jensen(mu_polynomial(0))) < 1e-12
    assert mahler_jensen(mu_polynomial(1)) == pytest.approx(M_ONE, abs=1e-11)


@pytest.mark.parametrize("k,expected", [(2, 0.5114240670535037), (5, 1.5079826022795134),
                                        (8, 2.045696268214015), (3 * math.sqrt(2), 1.2785601676337593),
                                        (4 * math.sqrt(2), 1.658664498381914)])
def test_known_mk(k, expected):
    assert mahler_jensen(mu_polynomial(k)) == pytest.approx(expected, abs=1e-11)
    assert mahler_jensen(mu_polynomial(-k)) == pytest.approx(expected, abs=1e-11)


def test_imaginary_k():
    assert mahler_jensen(mu_polynomial(1j * math.sqrt(2))) == pytest.approx(0.7671361005802557, abs=1e-11)


@pytest.mark.parametrize("t", [0.1, 0.5, 0.9])
def test_mu_matches_hypergeometric(t):
    assert mahler_jensen(family_polynomial("mu", t)) == pytest.approx(mu_hyp(t), abs=1e-7)


@settings(max_examples=15, deadline=None)
@given(st.lists(coef, min_size=5, max_size=5), st.lists(coef, min_size=5, max_size=5))
def test_multiplicativity(a, b):
    P, Q = poly_from(a), poly_from(b)
    if P is None or Q is None:
        return
    lhs = mahler_jensen(P * Q, tol=1e-10)
    rhs = mahler_jensen(P, tol=1e-10) + mahler_jensen(Q, tol=1e-10)
    assert lhs == pytest.approx(rhs, abs=1e-6)


@settings(max_examples=15, deadline=None)
@given(st.lists(coef, min_size=5, max_size=5))
def test_inversion_invariance(a):
    P = poly_from(a)
    if P is None:
        return
    Pi = LaurentPoly({(-i, j): c for (i, j), c in P.terms.items()})
    Pc = LaurentPoly({k: complex(c).conjugate() for k, c in P.terms.items()})
    m = mahler_jensen(P, tol=1e-10)
    assert mahler_jensen(Pi, tol=1e-10) == pytest.approx(m, abs=1e-7)
    assert mahler_jensen(Pc, tol=1e-10) == pytest.approx(m, abs=1e-7)


def test_grid_agrees():
    P = mu_polynomial(5)
    assert mahler_grid(P, n=256) == pytest.approx(1.5079826022795134, abs=1e-6)


def test_jensen_integrand_mean():
    P = mu_polynomial(8)
    th = 2 * math.pi * (np.arange(512) + 0.5) / 512
    assert np.mean(jensen_integrand(P, th)) == pytest.approx(2.045696268214015, abs=1e-10)


def test_family_polynomials():
    P = family_polynomial("n", 1.0)
    assert P.terms[(3, 0)] == 1 and P.terms[(0, 0)] == 1
    assert complex(P.terms[(1, 1)]) == pytest.approx(-3)
    G = family_polynomial("g", 0.5)
    assert (1, 1) not in G.terms  # 2xy from the product cancels against xy/t
    R = family_polynomial("r", 0.5)
    assert complex(R.terms[(1, 1)]) == pytest.approx(3 - 2)
    with pytest.raises(DomainError):
        family_polynomial("mu", 0)


def test_g3_polynomial_symmetric():
    P = g3_polynomial(0.3)
    for (i, j), c in P.terms.items():
        assert P.terms.get((-i, j)) == pytest.approx(c)
        assert P.terms.get((j, i)) == pytest.approx(c)
