import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mahlerlab.errors import BadPrime, DegenerateCurve, DomainError, NoConvergence, SignMismatch
from mahlerlab.lfun import (KNOWN_CONDUCTORS, NEWFORMS, ApCache, Curve, anlist, ap, curve_from_k2,
                            eta_product_coeffs, local_ap, lprime_at_0, primes_upto, squarefree_part)

LPRIME = {1: 0.2513304337132523, 18: 0.5114240670535036, 32: 1.658664498381914}


def test_squarefree_part():
    assert squarefree_part(18) == 2
    assert squarefree_part(32) == 2
    assert squarefree_part(-12) == -3
    assert squarefree_part(1) == 1
    with pytest.raises(DomainError):
        squarefree_part(0)


def test_curve_models():
    assert (curve_from_k2(18).A, curve_from_k2(18).B) == (20, 64)
    assert (curve_from_k2(32).A, curve_from_k2(32).B) == (48, 64)
    assert (curve_from_k2(1).A, curve_from_k2(1).B) == (-7, 16)
    assert (curve_from_k2(18, twist=False).A, curve_from_k2(18, twist=False).B) == (10, 16)
    assert curve_from_k2(18).label == "k2_18_tw2"
    for k2 in (0, 16):
        with pytest.raises(DegenerateCurve):
            curve_from_k2(k2)
    with pytest.raises(DegenerateCurve):
        Curve(4, 4)


def test_untwisted_k18_differs():
    # the untwisted model is not the level-24 form
    assert ap(curve_from_k2(18, twist=False), 5) == 2
    assert eta_product_coeffs(NEWFORMS[24], 5)[5] == -2


@pytest.mark.parametrize("k2", [1, 18, 32])
def test_hasse_bound(k2):
    c = curve_from_k2(k2)
    for p in primes_upto(400):
        p = int(p)
        if c.discriminant % p:
            assert abs(ap(c, p)) <= 2 * math.sqrt(p)


def test_bad_prime():
    c = curve_from_k2(18)
    with pytest.raises(BadPrime):
        ap(c, 2)
    with pytest.raises(BadPrime):
        ap(c, 3)


@pytest.mark.parametrize("k2", [1, 18, 32])
def test_matches_newform(k2):
    N = KNOWN_CONDUCTORS[k2]
    c = curve_from_k2(k2)
    a = anlist(c, 100, local_ap(c, N), N)
    e = eta_product_coeffs(NEWFORMS[N], 100)
    assert np.array_equal(a[1:].astype(np.int64), e[1:])


def test_untwisted_32_is_level_32():
    c = curve_from_k2(32, twist=False)
    a = anlist(c, 100, local_ap(c, 32), 32)
    assert np.array_equal(a[1:].astype(np.int64), eta_product_coeffs(NEWFORMS[32], 100)[1:])


def test_cm_vanishing():
    c = curve_from_k2(32)
    for p in primes_upto(300):
        p = int(p)
        if p % 4 == 3:
            assert ap(c, p) == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 60), st.integers(2, 60))
def test_multiplicativity(m, n):
    if math.gcd(m, n) != 1:
        return
    c = curve_from_k2(18)
    a = anlist(c, 3600, local_ap(c, 24), 24)
    assert a[m * n] == a[m] * a[n]


def test_eta_product_examples():
    assert list(eta_product_coeffs(NEWFORMS[15], 8)) == [0, 1, -1, -1, -1, 1, 1, 0, 3]
    with pytest.raises(DomainError):
        eta_product_coeffs(((1, 1),), 5)


def test_cache_roundtrip(tmp_path):
    c = curve_from_k2(18)
    cache = ApCache(c.label, tmp_path)
    a1 = anlist(c, 500, local_ap(c, 24), 24, cache)
    assert (tmp_path / "k2_18_tw2.txt").exists()
    reread = ApCache(c.label, tmp_path)
    assert reread.entries == cache.entries
    assert reread.entries[5] == ap(c, 5)
    a2 = anlist(c, 500, local_ap(c, 24), 24, reread)
    assert np.array_equal(a1, a2)


def test_cache_env(tmp_path, monkeypatch):
    monkeypatch.setenv("MAHLERLAB_CACHE_DIR", str(tmp_path))
    lprime_at_0(curve_from_k2(18), 24)
    assert (tmp_path / "k2_18_tw2.txt").exists()


@pytest.mark.parametrize("k2", [1, 18, 32])
def test_lprime(k2):
    res = lprime_at_0(curve_from_k2(k2), KNOWN_CONDUCTORS[k2])
    assert res.value == pytest.approx(LPRIME[k2], abs=1e-12)
    assert res.fe_residual < 1e-10


def test_local_factors():
    assert lprime_at_0(curve_from_k2(18), 24).local == {2: 0, 3: -1}
    assert lprime_at_0(curve_from_k2(1), 15).local == {2: -1, 3: -1, 5: 1}


def test_fe_search_fallback():
    # with the level-24 form unregistered the local factors are found by search
    saved = NEWFORMS.pop(24)
    try:
        res = lprime_at_0(curve_from_k2(18), 24)
    finally:
        NEWFORMS[24] = saved
    assert res.value == pytest.approx(LPRIME[18], abs=1e-12)
    assert res.local == {2: 0, 3: -1}


def test_no_convergence():
    with pytest.raises(NoConvergence):
        lprime_at_0(curve_from_k2(18), 24, N_terms=5)


def test_sign_mismatch():
    with pytest.raises(SignMismatch):
        lprime_at_0(curve_from_k2(32), 32)
