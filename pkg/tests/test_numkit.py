import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mahlerlab.errors import BranchAmbiguous, BudgetExceeded, DegenerateLeading, DomainError
from mahlerlab.numkit import (LaurentPoly, SeriesBudget, poly_roots, poly_roots_batch, precision,
                              smallest_root, sum_series)


def test_geometric_series():
    assert sum_series(lambda n: 0.5 ** n, SeriesBudget(eps=1e-12)) == pytest.approx(2.0, abs=1e-12)


def test_zero_terms():
    assert sum_series(lambda n: 0.0) == 0


def test_harmonic_exceeds_budget():
    with pytest.raises(BudgetExceeded):
        sum_series(lambda n: 1.0 / (n + 1), SeriesBudget(eps=1e-12, max_terms=1000))


def test_three_small_terms_survive_lacunary_zeros():
    # terms vanish at every other index; two zeros in a row must not stop the sum
    terms = [1.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.25] + [0.0] * 10
    assert sum_series(terms, SeriesBudget(eps=1e-12)) == 1.75


def test_full_output_reports_tail():
    s, info = sum_series(lambda n: 0.1 ** n, SeriesBudget(eps=1e-14), full_output=True)
    assert s == pytest.approx(1 / 0.9, rel=1e-15)
    assert info.n_terms > 10 and info.tail_bound < 1e-14


def test_deterministic():
    f = lambda n: (-0.3) ** n / (n + 1)  # noqa: E731
    assert sum_series(f) == sum_series(f)


def test_budget_invariants():
    with pytest.raises(DomainError):
        SeriesBudget(eps=0)
    with pytest.raises(DomainError):
        SeriesBudget(max_terms=4)


@pytest.mark.parametrize("coeffs, expected", [
    ([1, 0, -1], [1, -1]),
    ([1, 0, 1], [1j, -1j]),
])
def test_simple_roots(coeffs, expected):
    r = poly_roots(coeffs)
    assert sorted(r, key=lambda z: (z.real, z.imag)) == pytest.approx(
        sorted(expected, key=lambda z: (complex(z).real, complex(z).imag)))


def test_triple_root_cluster():
    r = poly_roots([1, -3, 3, -1])
    assert np.all(np.abs(r - 1) < 1e-5)


def test_degenerate_leading():
    with pytest.raises(DegenerateLeading):
        poly_roots([1e-16, 1, 1])


coeff = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(coeff, min_size=2, max_size=7).filter(lambda c: abs(c[0]) > 0.1))
def test_roots_residual_and_vieta(c):
    r = poly_roots(c)
    d = len(c) - 1
    assert len(r) == d
    scale = max(abs(x) for x in c)
    # residual bound, relative to the size of the roots
    for z in r:
        assert abs(np.polyval(c, z)) < 1e-12 * scale * max(1.0, abs(z)) ** d * 10
    if d >= 1:
        assert abs(np.sum(r) + c[1] / c[0]) < 1e-8 * max(1, np.sum(np.abs(r)))


def test_batch_matches_single():
    rng = np.random.default_rng(1)
    C = rng.normal(size=(20, 5)) + 1j * rng.normal(size=(20, 5))
    R = poly_roots_batch(C)
    for c, r in zip(C, R):
        for z in r:
            assert abs(np.polyval(c, z)) < 1e-10 * np.abs(c).max() * max(1, abs(z)) ** 4


def test_smallest_root_and_ambiguity():
    assert complex(smallest_root([1, -3, 0.02])) == pytest.approx((3 - 8.92 ** 0.5) / 2, rel=1e-13)
    with pytest.raises(BranchAmbiguous):
        smallest_root([1, 0, -0.01])  # +-0.1 tie
    with pytest.raises(BranchAmbiguous):
        smallest_root([1, -3, 2])  # smallest root 1 is outside the bound


def test_laurent_arithmetic():
    x, y = LaurentPoly.x(), LaurentPoly.y()
    P = x + x ** -1 + y + y ** -1
    assert len(P) == 4
    assert P.x_range() == (-1, 1) and P.y_range() == (-1, 1)
    Q = (x + y) * (x - y)
    assert Q == x * x - y * y
    assert P(1.0, 1.0) == pytest.approx(4)
    with pytest.raises(DomainError):
        x - x
    with pytest.raises(DomainError):
        LaurentPoly({})


def test_precision_modes(extended):
    ctx = precision()
    assert ctx.name == "extended"
    assert abs(ctx.pi - ctx.mpf("3.14159265358979323846264338327950288")) < 1e-33
