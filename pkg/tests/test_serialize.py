import json

import pytest

from hequery import dghv, ring, serialize
from hequery.errors import InvalidParams


def test_dghv_roundtrip():
    params = dghv.DghvParams.from_lambda(4)
    sk, pk = dghv.keygen(params, 1)
    sec, pub = serialize.dump_dghv_keys(params, sk, pk)
    sec, pub = json.loads(json.dumps(sec)), json.loads(json.dumps(pub))
    assert pub["params"] == {"n_bits": 4, "p_bits": 16, "q_bits": 1024, "pubkey_size": 8, "format_version": 1}
    assert all(c == c.lower() for c in pub["zeros"])
    p2, sk2 = serialize.load_dghv_secret(sec)
    p3, pk2 = serialize.load_dghv_public(pub)
    assert sk2 == sk and pk2 == pk and p2 == p3 == dghv.DghvParams(4, 16, 1024)
    cts = [dghv.encrypt_pub(b, pk, params, b) for b in (0, 1, 1)]
    assert serialize.load_bits(serialize.dump_bits(params, cts)) == cts


def test_ring_roundtrip():
    params = ring.RingParams.with_q_bits(8, 50, 17)
    keys = ring.keygen(params, 2)
    sec, pub = serialize.dump_ring_keys(params, keys)
    assert set(pub["params"]) == {"n", "q_hex", "t", "w", "sigma", "version"}
    p2, keys2 = serialize.load_ring_secret(json.loads(json.dumps(sec)))
    p3, pub2 = serialize.load_ring_public(pub)
    assert keys2 == keys and pub2 == keys.public and p2 == params == p3
    c = ring.encrypt(ring.PlainPoly.constant(3, params), keys, params, 1)
    assert serialize.load_ring_ciphertexts(serialize.dump_ring_ciphertexts(params, [c])) == [c]


def test_version_checked():
    with pytest.raises(InvalidParams):
        serialize.dghv_params_from({"n_bits": 4, "p_bits": 16, "q_bits": 32, "pubkey_size": 1, "format_version": 2})
    with pytest.raises(InvalidParams):
        serialize.ring_params_from({"n": 8, "q_hex": "ff", "t": 3, "w": 16, "sigma": 3.2, "version": 9})
