import itertools
import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hequery import dghv
from hequery.dghv import BitCiphertext, DghvParams, DghvSecretKey
from hequery.errors import EmptyPublicKey, InvalidParams, NoiseOverflowWarning

LAM4 = DghvParams.from_lambda(4)


def test_params_validation():
    DghvParams(4, 16, 32)
    with pytest.raises(InvalidParams):
        DghvParams(8, 8, 32)
    with pytest.raises(InvalidParams):
        DghvParams(4, 32, 32)
    with pytest.raises(InvalidParams):
        DghvParams(4, 16, 32, pubkey_size=0)
    assert (LAM4.noise_bits, LAM4.secret_bits, LAM4.rand_bits) == (4, 16, 1024)


def test_keygen_shape():
    params = DghvParams(4, 16, 32)
    sk, pk = dghv.keygen(params, 0)
    assert sk.p % 2 == 1 and sk.p.bit_length() == 16
    for z in pk.zeros:
        assert z % sk.p % 2 == 0 and z % sk.p < 2 ** 5
        assert dghv.decrypt(BitCiphertext(z, 0), sk) == 0


def test_keygen_distinct_seeds():
    ps = {dghv.keygen(LAM4, s)[0].p for s in range(200)}
    # 2^14 odd 16-bit candidates; collisions among 200 draws are possible but rare
    assert len(ps) >= 195


def test_keygen_deterministic():
    assert dghv.keygen(LAM4, 5) == dghv.keygen(LAM4, 5)


def test_worked_encryption():
    sk = DghvSecretKey(19)
    c = dghv.encrypt_sym(1, sk, DghvParams(2, 5, 6), r=2, q=3)
    assert c.value == 62 and dghv.decrypt(c, sk) == 1
    assert dghv.encrypt_sym(0, sk, DghvParams(2, 5, 6), r=0, q=0).value == 0
    c = dghv.encrypt_sym(0, sk, DghvParams(2, 5, 6), r=1, q=1)
    assert c.value == 21 and dghv.decrypt(c, sk) == 0
    assert dghv.decrypt(BitCiphertext(19 * 12345, 0), sk) == 0


def test_centered_residue():
    assert dghv.centered_residue(62, 19) == 5
    assert dghv.centered_residue(18, 19) == -1
    assert dghv.decrypt(BitCiphertext(18, 1), DghvSecretKey(19)) == 1


def test_public_encryption_single_element():
    sk, pk = dghv.keygen(DghvParams(4, 16, 32, pubkey_size=1), 3)
    c = dghv.encrypt_pub(1, pk, DghvParams(4, 16, 32, pubkey_size=1), 1, subset=[0])
    assert c.value == 1 + pk.zeros[0] and dghv.decrypt(c, sk) == 1


def test_empty_public_key():
    with pytest.raises(EmptyPublicKey):
        dghv.encrypt_pub(0, dghv.DghvPublicKey(()), LAM4)


def test_fresh_encryptions_decrypt():
    sk, pk = dghv.keygen(LAM4, 1)
    for i in range(1000):
        for m in (0, 1):
            c = dghv.encrypt_pub(m, pk, LAM4, i)
            assert dghv.decrypt(c, sk) == m
            assert c.noise_bound < sk.p // 2


# one gate of depth 1: size P from the worst tracked bound of a product of fresh ciphertexts
_FRESH = LAM4.pubkey_size * LAM4.zero_noise_bound + 1
GATE = DghvParams(4, dghv.min_secret_bits(_FRESH * _FRESH), 1024)


@pytest.mark.parametrize("seed", range(50))
def test_truth_tables(seed):
    sk, pk = dghv.keygen(GATE, seed)
    for a, b in itertools.product((0, 1), repeat=2):
        ca = dghv.encrypt_pub(a, pk, GATE, seed * 7 + a)
        cb = dghv.encrypt_pub(b, pk, GATE, seed * 7 + 3 + b)
        s, m = dghv.hom_add(ca, cb, GATE), dghv.hom_mul(ca, cb, GATE)
        assert s.noise_bound < sk.p // 2 and m.noise_bound < sk.p // 2
        assert dghv.decrypt(s, sk) == a ^ b
        assert dghv.decrypt(m, sk) == a & b


def test_plain_ops():
    sk, pk = dghv.keygen(LAM4, 2)
    z, o = dghv.encrypt_pub(0, pk, LAM4, 1), dghv.encrypt_pub(1, pk, LAM4, 2)
    assert dghv.decrypt(dghv.add_plain(z, 1), sk) == 1
    assert dghv.decrypt(dghv.add_plain(o, 1), sk) == 0
    assert dghv.decrypt(dghv.mul_plain(o, 0), sk) == 0
    assert dghv.decrypt(dghv.mul_plain(o, 1), sk) == 1


@given(st.integers(0, 1), st.integers(0, 1), st.integers(0, 2 ** 20))
def test_tracked_bound_dominates_true_noise(a, b, seed):
    sk, pk = dghv.keygen(LAM4, seed)
    ca, cb = dghv.encrypt_pub(a, pk, LAM4, seed + 1), dghv.encrypt_pub(b, pk, LAM4, seed + 2)
    for c in (ca, dghv.hom_add(ca, cb), dghv.hom_mul(ca, cb), dghv.add_plain(ca, 1)):
        assert abs(dghv.centered_residue(c.value, sk.p)) <= c.noise_bound


def test_overflow_warning():
    sk, pk = dghv.keygen(LAM4, 0)
    c = dghv.encrypt_pub(1, pk, LAM4, 0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        for _ in range(3):
            c = dghv.hom_mul(c, c, LAM4)
    assert any(issubclass(w.category, NoiseOverflowWarning) for w in caught)
    assert dghv.noise_budget(c, LAM4) < 0


def test_noise_budget():
    sk, pk = dghv.keygen(LAM4, 0)
    c = dghv.encrypt_pub(1, pk, LAM4, 0)
    assert dghv.noise_budget(c, sk) > 0
    assert dghv.noise_budget(dghv.encrypt_sym(1, sk, LAM4, r=0), sk) == pytest.approx(dghv.noise_budget(BitCiphertext(0, 1), sk))
    budgets = []
    for _ in range(5):
        c = dghv.hom_mul(c, c)
        budgets.append(dghv.noise_budget(c, sk))
    assert all(b2 < b1 for b1, b2 in zip(budgets, budgets[1:]))
    # public estimate never exceeds the exact one
    assert dghv.noise_budget(c, LAM4) <= dghv.noise_budget(c, sk)


def _enc_num(v, width, pk, params, rng):
    return [dghv.encrypt_pub((v >> i) & 1, pk, params, rng) for i in range(width)]


def _dec_num(cts, sk):
    return sum(dghv.decrypt(c, sk) << i for i, c in enumerate(cts))


def test_adder_exhaustive_3_bit():
    params = DghvParams(4, 120, 240)
    sk, pk = dghv.keygen(params, 9)
    rng = dghv.as_rng(1)
    for a, b in itertools.product(range(8), repeat=2):
        s = dghv.hom_binary_add(_enc_num(a, 3, pk, params, rng), _enc_num(b, 3, pk, params, rng), params)
        assert len(s) == 4
        assert _dec_num(s, sk) == a + b


def test_adder_examples():
    params = DghvParams(4, 80, 160)
    sk, pk = dghv.keygen(params, 4)
    one = dghv.encrypt_pub(1, pk, params, 1)
    assert [dghv.decrypt(c, sk) for c in dghv.hom_binary_add([one], [one], params)] == [0, 1]
    a = _enc_num(5, 3, pk, params, 2)
    zeros = _enc_num(0, 3, pk, params, 3)
    assert _dec_num(dghv.hom_binary_add(a, zeros, params), sk) == 5


@given(st.integers(0, 63), st.integers(0, 3), st.integers(1, 8))
def test_adder_width_truncation(a, b, width):
    params = DghvParams(4, 200, 400)
    sk, pk = dghv.keygen(params, 1)
    rng = dghv.as_rng(a * 4 + b)
    s = dghv.hom_binary_add(_enc_num(a, 6, pk, params, rng), _enc_num(b, 2, pk, params, rng), params, width=width)
    assert len(s) == min(width, 7)
    assert _dec_num(s, sk) == (a + b) % (1 << len(s))


def test_min_secret_bits():
    for bound in (1, 2, 3, 1000, 2 ** 40 - 1, 2 ** 40):
        P = dghv.min_secret_bits(bound)
        assert (1 << (P - 2)) - 1 >= bound
        assert (1 << (P - 3)) - 1 < bound
