import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hequery import ring
from hequery.errors import IntegerOverflow, InvalidParams
from hequery.ring import PlainPoly, RingCiphertext, RingParams


@pytest.fixture(scope="module")
def keys(desk_ring):
    return ring.keygen(desk_ring, 2024)


def rand_plain(params, rng):
    return PlainPoly.make([rng.randrange(params.t) for _ in range(params.d)], params)


def plain_mul(a, b, params):
    return PlainPoly.make(ring._mul_int(list(a.coeffs), list(b.coeffs)), params)


def test_params_guard():
    with pytest.raises(InvalidParams):
        RingParams(n=16, q=97, t=97)
    with pytest.raises(InvalidParams):
        RingParams(n=16, q=1 << 20, t=97, w=1)


def test_round_div_ties_to_even():
    assert [ring.round_div(x, 2) for x in (1, 3, 5, -1, -3)] == [0, 2, 2, 0, -2]
    assert ring.round_div(7, 3) == 2 and ring.round_div(-7, 3) == -2


def test_key_structure(desk_ring, keys):
    p = desk_ring
    assert all(x % p.t == (1 if i == 0 else 0) for i, x in enumerate(ring.center(c, p.q) for c in keys.f))
    f_inv = ring._inverse_mod_q(keys.f, p)
    assert ring.ring_mul(keys.f, f_inv, p) == tuple([1] + [0] * (p.d - 1))


def test_zero_noise_encryption(desk_ring, keys):
    p = desk_ring
    zero = [0] * p.d
    assert ring.encrypt(PlainPoly.constant(0, p), keys, p, s=zero, e=zero).coeffs == tuple(zero)
    c = ring.encrypt(PlainPoly.constant(1, p), keys, p, s=zero, e=zero)
    assert c.coeffs == tuple([p.delta] + [0] * (p.d - 1))
    fresh = ring.noise_estimate(ring.encrypt(PlainPoly.constant(1, p), keys, p, rng=1), keys, p)
    assert ring.noise_estimate(c, keys, p) > fresh


def test_roundtrip(desk_ring, keys):
    rng = random.Random(0)
    for _ in range(200):
        m = rand_plain(desk_ring, rng)
        assert ring.decrypt(ring.encrypt(m, keys.public, desk_ring, rng), keys, desk_ring) == m
    assert ring.decrypt(RingCiphertext((0,) * desk_ring.d), keys, desk_ring).is_zero()
    for i in range(desk_ring.d):
        m = PlainPoly.make([0] * i + [1], desk_ring)
        assert ring.decrypt(ring.encrypt(m, keys, desk_ring, i), keys, desk_ring) == m


def test_add_and_mul_homomorphism(desk_ring, keys):
    p = desk_ring
    rng = random.Random(1)
    for _ in range(100):
        a, b = rand_plain(p, rng), rand_plain(p, rng)
        ca, cb = ring.encrypt(a, keys, p, rng), ring.encrypt(b, keys, p, rng)
        s = ring.hom_add(ca, cb, p)
        m = ring.hom_mul(ca, cb, keys.evk, p)
        assert ring.decrypt(s, keys, p) == PlainPoly.make([x + y for x, y in zip(a.coeffs, b.coeffs)], p)
        assert ring.decrypt(m, keys, p) == plain_mul(a, b, p)
        assert ring.noise_estimate(m, keys, p) > 0


def test_identities(desk_ring, keys):
    p = desk_ring
    rng = random.Random(3)
    m = rand_plain(p, rng)
    cm = ring.encrypt(m, keys, p, rng)
    one = ring.encrypt(PlainPoly.constant(1, p), keys, p, rng)
    zero = ring.encrypt(PlainPoly.constant(0, p), keys, p, rng)
    assert ring.decrypt(ring.hom_mul(one, cm, keys.evk, p), keys, p) == m
    assert ring.decrypt(ring.hom_mul(zero, cm, keys.evk, p), keys, p).is_zero()
    assert ring.decrypt(ring.hom_add(cm, RingCiphertext((0,) * p.d), p), keys, p) == m
    acc = one
    for _ in range(p.t - 1):
        acc = ring.hom_add(acc, one, p)
    assert ring.decrypt(acc, keys, p).is_zero()


def test_plain_ops(desk_ring, keys):
    p = desk_ring
    rng = random.Random(4)
    for _ in range(20):
        a, b = rand_plain(p, rng), rand_plain(p, rng)
        ca = ring.encrypt(a, keys, p, rng)
        assert ring.decrypt(ring.add_plain(ca, b, p), keys, p) == PlainPoly.make(
            [x + y for x, y in zip(a.coeffs, b.coeffs)], p)
        assert ring.decrypt(ring.sub_plain(ca, b, p), keys, p) == PlainPoly.make(
            [x - y for x, y in zip(a.coeffs, b.coeffs)], p)
        assert ring.decrypt(ring.mul_plain(ca, b, p), keys, p) == plain_mul(a, b, p)


@given(st.lists(st.integers(0, (1 << 60) - 1), min_size=8, max_size=8))
def test_decomposition_radix_identity(coeffs):
    p = RingParams.with_q_bits(16, 60, 97)
    c = RingCiphertext(tuple(x % p.q for x in coeffs))
    digits = ring.decompose(c, p)
    assert len(digits) == p.ell
    assert all(0 <= x < p.w for d in digits for x in d)
    recon = [sum(d[i] * p.w ** k for k, d in enumerate(digits)) for i in range(p.d)]
    assert tuple(recon) == c.coeffs


def test_mul_chain_budget_decreases(desk_ring, keys):
    p = desk_ring
    c = ring.encrypt(PlainPoly.constant(3, p), keys, p, 5)
    budgets = [ring.noise_estimate(c, keys, p)]
    assert budgets[0] > 10
    for _ in range(2):
        c = ring.hom_mul(c, c, keys.evk, p)
        budgets.append(ring.noise_estimate(c, keys, p))
    assert all(b2 < b1 for b1, b2 in zip(budgets, budgets[1:]))
    assert ring.decrypt(c, keys, p) == PlainPoly.constant(3 ** 4, p)


def test_depth3_chain_on_bigger_modulus():
    p = RingParams.with_q_bits(16, 100, 97)
    keys = ring.keygen(p, 8)
    c = ring.encrypt(PlainPoly.constant(2, p), keys, p, 1)
    budgets = [ring.noise_estimate(c, keys, p)]
    for _ in range(3):
        c = ring.hom_mul(c, c, keys.evk, p)
        budgets.append(ring.noise_estimate(c, keys, p, expected=ring.decrypt(c, keys, p)))
    assert all(b2 < b1 for b1, b2 in zip(budgets, budgets[1:])) and budgets[-1] > 0
    assert ring.decrypt(c, keys, p) == PlainPoly.constant(2 ** 8, p)


def test_integer_encoding():
    p = RingParams.with_q_bits(16, 40, 257)
    assert ring.encode_integer(20, p).coeffs[:5] == (0, 0, 1, 0, 1)
    assert ring.decode_integer(ring.encode_integer(20, p), p) == 20
    assert ring.encode_integer(0, p).is_zero()
    for z in range(-63, 64):
        assert ring.decode_integer(ring.encode_integer(z, p), p) == z
    with pytest.raises(IntegerOverflow):
        ring.encode_integer(1 << 9, p)


def test_keygen_deterministic(desk_ring):
    assert ring.keygen(desk_ring, 7) == ring.keygen(desk_ring, 7)
