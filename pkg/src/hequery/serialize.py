"""JSON formats for keys and ciphertexts of both schemes.

Big integers are lowercase hex strings. DGHV objects carry the header
``{n_bits, p_bits, q_bits, pubkey_size, format_version}`` and ring objects
``{n, q_hex, t, w, sigma, version}``; polynomials are little-endian arrays.
"""
from __future__ import annotations

from . import dghv, ring
from .errors import InvalidParams

FORMAT_VERSION = 1


def _hex(x: int) -> str:
    return format(x, "x")


def _unhex(s: str) -> int:
    return int(s, 16)


def dghv_header(params: dghv.DghvParams) -> dict:
    return {"n_bits": params.noise_bits, "p_bits": params.secret_bits, "q_bits": params.rand_bits,
            "pubkey_size": params.pubkey_size, "format_version": FORMAT_VERSION}


def dghv_params_from(header: dict) -> dghv.DghvParams:
    if header.get("format_version") != FORMAT_VERSION:
        raise InvalidParams(f"unsupported format_version {header.get('format_version')!r}")
    return dghv.DghvParams(noise_bits=header["n_bits"], secret_bits=header["p_bits"],
                           rand_bits=header["q_bits"], pubkey_size=header["pubkey_size"])


def dump_dghv_keys(params, sk, pk) -> tuple[dict, dict]:
    head = dghv_header(params)
    return ({"params": head, "p": _hex(sk.p)},
            {"params": head, "zeros": [_hex(z) for z in pk.zeros]})


def load_dghv_secret(obj) -> tuple:
    return dghv_params_from(obj["params"]), dghv.DghvSecretKey(_unhex(obj["p"]))


def load_dghv_public(obj) -> tuple:
    return dghv_params_from(obj["params"]), dghv.DghvPublicKey(tuple(_unhex(z) for z in obj["zeros"]))


def dump_bits(params, cts) -> dict:
    return {"params": dghv_header(params),
            "ciphertexts": [{"value": _hex(c.value), "noise_bound": _hex(c.noise_bound)} for c in cts]}


def load_bits(obj) -> list:
    return [dghv.BitCiphertext(_unhex(c["value"]), _unhex(c["noise_bound"])) for c in obj["ciphertexts"]]


def ring_header(params: ring.RingParams) -> dict:
    return {"n": params.n, "q_hex": _hex(params.q), "t": params.t, "w": params.w,
            "sigma": params.err_stddev, "version": FORMAT_VERSION}


def ring_params_from(header: dict) -> ring.RingParams:
    if header.get("version") != FORMAT_VERSION:
        raise InvalidParams(f"unsupported version {header.get('version')!r}")
    return ring.RingParams(n=header["n"], q=_unhex(header["q_hex"]), t=header["t"],
                           w=header["w"], err_stddev=header["sigma"])


def _poly(c) -> list:
    return [_hex(x) for x in c]


def _unpoly(c) -> tuple:
    return tuple(_unhex(x) for x in c)


def dump_ring_keys(params, keys: ring.RingKeys) -> tuple[dict, dict]:
    head = ring_header(params)
    pub = {"params": head, "h": _poly(keys.h), "evk": [_poly(e) for e in keys.evk]}
    return {"params": head, "f": _poly(keys.f), **{k: pub[k] for k in ("h", "evk")}}, pub


def load_ring_secret(obj) -> tuple:
    return ring_params_from(obj["params"]), ring.RingKeys(
        f=_unpoly(obj["f"]), h=_unpoly(obj["h"]), evk=tuple(_unpoly(e) for e in obj["evk"]))


def load_ring_public(obj) -> tuple:
    return ring_params_from(obj["params"]), ring.RingPublicKey(
        h=_unpoly(obj["h"]), evk=tuple(_unpoly(e) for e in obj["evk"]))


def dump_ring_ciphertexts(params, cts) -> dict:
    return {"params": ring_header(params), "ciphertexts": [_poly(c.coeffs) for c in cts]}


def load_ring_ciphertexts(obj) -> list:
    return [ring.RingCiphertext(_unpoly(c)) for c in obj["ciphertexts"]]
