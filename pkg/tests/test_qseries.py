import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mahlerlab.errors import DomainError
from mahlerlab.nome import nome_qj
from mahlerlab.numkit import precision
from mahlerlab.qseries import (CharacterId, FamilyId, base_function, character, family_argument,
                               hecke_residual, mahler_qseries, mixed_relation_residuals, qpochhammer,
                               series_weight)
from mahlerlab.torus import family_polynomial, mahler_jensen

# mpmath oracle values (tests/oracles/mpmath_oracles.py)
QP_HALF = 0.288788095086602421278899721929
M_AT_001975 = 0.271060400306149909946261125287
MU_TENTH = 2.52471806933192802144915617407
AT_003 = {"mu": 1.81403560413654542049910639878, "n": 1.25483717938260757502383979863,
          "g": 3.53881455394803753245359717959, "r": 3.56918965057507027510714779048}


def test_qpochhammer():
    assert qpochhammer(0, 0.3) == 1
    assert complex(qpochhammer(0.5, 0.5)).real == pytest.approx(QP_HALF, abs=1e-15)
    with pytest.raises(DomainError):
        qpochhammer(0.5, 1.0)


def test_base_function_leading_terms():
    q = 1e-6
    assert abs(complex(base_function("n", q)) / q / 27 - 1) < 1e-4
    assert abs(complex(base_function("r", q)) / q ** 0.2 - 1) < 1e-4
    assert abs(complex(base_function("mu", q)) / q / 16 - 1) < 1e-4
    assert abs(complex(base_function("g", q)) / q ** (1 / 3) - 1) < 1e-4


def test_M_at_nome_of_one_tenth():
    q = nome_qj(2, 0.1)
    assert complex(base_function("mu", q)) == pytest.approx(0.1, abs=1e-14)
    # the value at q = 0.01975 itself
    assert complex(base_function("mu", 0.01975)).real == pytest.approx(M_AT_001975, abs=1e-14)


def test_characters():
    assert character(CharacterId.CHI_M4, 3) == -1
    assert character(CharacterId.CHI_R, 4) == -1
    assert character(CharacterId.CHI_M3, 6) == 0
    assert character(CharacterId.CHI_R, 2) == 1j
    # chi_r is totally multiplicative mod 5
    for a in range(10):
        for b in range(10):
            assert character("chi_r", a * b) == character("chi_r", a) * character("chi_r", b)


def test_r_series_weights():
    expected = [2, 1, -1, -2, 0]
    got = [series_weight("r", j) for j in range(1, 6)]
    assert got == expected
    for j in range(1, 6):
        assert (2 - 1j) * character("chi_r", j) == pytest.approx(expected[j - 1] + 1j * ((2 - 1j) * character("chi_r", j)).imag)


def test_mu_at_one_tenth():
    q = nome_qj(2, 0.1)
    assert float(mahler_qseries("mu", q)) == pytest.approx(MU_TENTH, abs=1e-14)


def test_mu_small_q_leading_term():
    q = 1e-8
    assert float(mahler_qseries("mu", q)) == pytest.approx(-0.5 * math.log(q), abs=1e-6)


@pytest.mark.parametrize("f", ["mu", "n", "g", "r"])
def test_frozen_values_at_003(f):
    assert float(mahler_qseries(f, 0.03)) == pytest.approx(AT_003[f], abs=1e-13)


def test_g_matches_torus():
    q = 0.05
    t = complex(family_argument("g", q)).real
    assert float(mahler_qseries("g", q)) == pytest.approx(mahler_jensen(family_polynomial("g", t)), abs=1e-7)


def test_radius_is_configurable():
    with pytest.raises(DomainError):
        mahler_qseries("mu", 0.3)
    assert math.isfinite(float(mahler_qseries("mu", 0.3, radius=0.5)))


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=1e-4, max_value=0.2))
def test_mu_second_degree(q):
    lhs = float(mahler_qseries("mu", q)) + float(mahler_qseries("mu", -q))
    assert lhs == pytest.approx(float(mahler_qseries("mu", q * q)), abs=1e-10)


@pytest.mark.parametrize("f,p", [("mu", 3), ("n", 2), ("g", 3), ("r", 5), ("mu", 2), ("mu", 5), ("n", 3)])
@pytest.mark.parametrize("q", [0.02, 0.05])
def test_hecke(f, p, q):
    assert abs(hecke_residual(f, p, q)) < 1e-9


def test_hecke_exclusions():
    with pytest.raises(DomainError):
        hecke_residual("g", 2, 0.05)
    with pytest.raises(DomainError):
        hecke_residual("r", 3, 0.05)


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=1e-3, max_value=0.1))
def test_mixed_relations(q):
    r1, r2 = mixed_relation_residuals(q)
    assert abs(r1) < 1e-9 and abs(r2) < 1e-9


def test_complex_q_accepted():
    q = 0.05 * cmath.exp(0.7j)
    assert math.isfinite(float(mahler_qseries("n", q)))


def test_family_parse():
    assert FamilyId.parse("MU") is FamilyId.MU
    with pytest.raises(DomainError):
        FamilyId.parse("x")


def test_extended_precision(extended):
    q = nome_qj(2, "0.1")
    v = mahler_qseries("mu", q)
    assert abs(v - precision().mpf("2.52471806933192802144915617407")) < 1e-28
