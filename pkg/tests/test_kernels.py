import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hequery import _accel, kernels
from oracles import poly_mod, poly_mul, sylvester_resultant_mod, trim

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba unavailable")

primes = st.sampled_from([2, 3, 5, 7, 11, 13, 97, 65521])


@st.composite
def monic_and_elems(draw):
    p = draw(primes)
    d = draw(st.integers(1, 8))
    f = draw(st.lists(st.integers(0, p - 1), min_size=d, max_size=d)) + [1]
    a = draw(st.lists(st.integers(0, p - 1), min_size=d, max_size=d))
    b = draw(st.lists(st.integers(0, p - 1), min_size=d, max_size=d))
    return p, f, a, b


def _pad(a, d):
    a = trim(a)
    return a + [0] * (d - len(a))


@given(monic_and_elems())
def test_mulmod_matches_schoolbook(case):
    p, f, a, b = case
    want = _pad(poly_mod(poly_mul(a, b, p), f, p), len(f) - 1)
    for use in (False, True):
        ring = kernels.PolyModRing(np.array(f), p, use_numba=use)
        got = ring.mul(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64))
        assert list(got) == want


@needs_numba
@given(monic_and_elems())
def test_backends_agree_on_frobenius_and_inverse(case):
    p, f, a, _ = case
    r_np = kernels.PolyModRing(np.array(f), p, use_numba=False)
    r_nb = kernels.PolyModRing(np.array(f), p, use_numba=True)
    a = np.array(a, dtype=np.int64)
    assert np.array_equal(r_np.frobenius(a), r_nb.frobenius(a))
    assert np.array_equal(r_np.frobenius(a), r_np.pow(a, p))
    ok1, inv1 = r_np.inverse(a)
    ok2, inv2 = r_nb.inverse(a)
    assert ok1 == ok2
    if ok1:
        assert np.array_equal(inv1, inv2)
        assert list(r_np.mul(a, inv1)) == [1] + [0] * (len(f) - 2)


@given(st.sampled_from([2, 3, 5, 7, 101]),
       st.lists(st.integers(-50, 50), min_size=2, max_size=7),
       st.lists(st.integers(-50, 50), min_size=2, max_size=7))
def test_resultant_matches_sylvester(p, a, b):
    a = [x % p for x in a]
    b = [x % p for x in b]
    if len(trim(a)) < 2 or len(trim(b)) < 2:
        return
    want = sylvester_resultant_mod(a, b, p)
    assert kernels.resultant(np.array(a), np.array(b), p) == want
    assert int(kernels._resultant_np(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64), p)) == want


@given(st.sampled_from([3, 5, 7]), st.lists(st.integers(0, 6), min_size=1, max_size=6),
       st.lists(st.integers(0, 6), min_size=1, max_size=4))
def test_gcd_divides_both(p, a, b):
    a = [x % p for x in a]
    b = [x % p for x in b]
    g = [int(x) for x in kernels.gcd(np.array(a), np.array(b), p)]
    if not trim(a) and not trim(b):
        assert g == []
        return
    assert g[-1] == 1
    assert not poly_mod(a, g, p) and not poly_mod(b, g, p)


def test_prime_range_guard():
    with pytest.raises(ValueError):
        kernels.PolyModRing(np.array([1, 1]), kernels.MAX_PRIME + 15)


def test_non_monic_modulus_rejected():
    with pytest.raises(ValueError):
        kernels.PolyModRing(np.array([1, 2]), 5)
