"""Lagrange-style query processing over the ring scheme with a field plaintext.

Records are single elements of the field ``Z_p[x]/<Phi_n>`` (bit i is the
coefficient of x^i) and the ring scheme runs with plaintext modulus t = p,
so every nonzero plaintext difference is invertible. For a query ``m``:

* ``F_i = prod_{v != R_i} (m - v) * D_i`` with ``D_i = prod_{v != R_i} (R_i - v)^-1``,
  products over the distinct database values; F_i is 1 when m = R_i and 0
  when m is another database value;
* ``G_i = F_1 + ... + F_i`` with plain ciphertext additions;
* ``F'_{i,k} = F_i * prod_{j != k} (G_i - j) * prod_{j != k} (k - j)^-1`` for
  j, k in 1..i, a Lagrange basis polynomial evaluated at G_i;
* ``R' = sum_k R_k (F'_k)`` zero-padded, and the count ``sum_i F_i``.

If m is not in the database the F_i are arbitrary field elements; the
optional pre-check ``prod_i (m - R_i)`` lets the user abort early, and
:func:`detect_garbage` lets them recognise a meaningless result afterwards.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

from . import ring
from .circuits import all_but_one_products, tree_product
from .codec import Database, EncryptedSequence, PlainRecord, decode_field, encode_field, pad_add
from .cyclotomic import FieldContext, FieldElement, euler_phi, find_field_prime
from .dghv import as_rng
from .errors import (CounterOverflow, DegreeTooSmall, EncodingError, FieldTooSmall,
                     NotFound, SearchExhausted, SquareDiscriminant, WidthOverflow)
from .metering import OpCounter, phase_of
from .ring import PlainPoly, RingCiphertext, RingParams


def key_fingerprint(pub) -> str:
    h = hashlib.sha256()
    for x in pub.h:
        h.update(format(x, "x").encode() + b",")
    return h.hexdigest()[:16]


def choose_field(n_bits: int, m: int, max_index: int = 200) -> FieldContext:
    """Smallest-degree field Z_p[x]/<Phi_n> with degree > n_bits and p > m."""
    candidates = sorted((euler_phi(n), n) for n in range(3, max_index) if euler_phi(n) > n_bits)
    for _, n in candidates:
        try:
            p = find_field_prime(n, lower_bound=max(m, 2), max_tests=200)
        except (SquareDiscriminant, SearchExhausted):
            continue
        return FieldContext(n, p, check=False)
    raise SearchExhausted(f"no field found for {n_bits}-bit records and {m} records")


def multiplicative_depth(m: int, strict: bool = False) -> int:
    """Upper bound on the ciphertext multiplication depth of one select session."""
    lg = max(math.ceil(math.log2(m)), 0) if m > 1 else 0
    indicator = lg + 1
    # all-but-one products: up-sweep plus push-down, then the product with F_i
    position = max(2 * lg, indicator) + 1
    return position + (2 if strict else 0)


def advise_ring(field_ctx: FieldContext, m: int, strict: bool = False, margin_bits: int = 12,
                w: int = 1 << 32) -> RingParams:
    """Ring parameters for a select session over ``m`` records.

    Each multiplication level costs about log2(t) + 2 log2(d) + 8 bits of
    budget (scale-and-round error times the key-switch term); plaintext
    multiplications by field constants cost log2(t d) each. Key switching
    leaves a noise floor that grows with the digit base w.
    """
    t, d = field_ctx.p, field_ctx.degree
    lt, ld = math.log2(t), math.log2(max(d, 2))
    per_level = lt + 2 * ld + 8
    fresh = 24 + lt + ld + max(0.0, math.log2(w) - 16)
    plain = 2 * (lt + ld)
    q_bits = math.ceil(fresh + multiplicative_depth(m, strict) * per_level + plain + margin_bits)
    return RingParams.with_q_bits(field_ctx.n, max(q_bits, 40), t, w=w)


class RingBackend:
    """Evaluation context holding only the public key and evaluation key."""

    def __init__(self, params: RingParams, pub: ring.RingPublicKey, rng=None,
                 counter: OpCounter | None = None):
        self.params = params
        self.pub = pub
        self.rng = as_rng(rng)
        self.counter = counter
        self.context = key_fingerprint(pub)

    def _tick(self, op):
        if self.counter is not None:
            self.counter.record(op)

    def phase(self, name):
        return phase_of(self.counter, name)

    def plain(self, elem) -> PlainPoly:
        coeffs = elem.coeffs if isinstance(elem, FieldElement) else elem
        return PlainPoly.make(coeffs, self.params)

    def encrypt(self, elem) -> RingCiphertext:
        self._tick("enc")
        return ring.encrypt(self.plain(elem), self.pub, self.params, self.rng)

    def zero(self) -> RingCiphertext:
        return self.encrypt([0])

    def add(self, a, b):
        self._tick("add")
        return ring.hom_add(a, b, self.params)

    def sub(self, a, b):
        self._tick("add")
        return ring.hom_sub(a, b, self.params)

    def mul(self, a, b):
        self._tick("mul")
        return ring.hom_mul(a, b, self.pub.evk, self.params)

    def sub_plain(self, a, elem):
        self._tick("plain_add")
        return ring.sub_plain(a, self.plain(elem), self.params)

    def mul_plain(self, a, elem):
        self._tick("plain_mul")
        return ring.mul_plain(a, self.plain(elem), self.params)

    def tick_inverse(self, n: int = 1):
        if self.counter is not None:
            self.counter.record("inv", n)


class HqpClient:
    """The user side: field choice, ring keys, query encryption, decryption."""

    def __init__(self, field_ctx: FieldContext, params: RingParams, rng=None, keys=None):
        if params.t != field_ctx.p or params.n != field_ctx.n:
            raise ValueError("ring plaintext space must be the chosen field (t = p, same Phi_n)")
        self.field = field_ctx
        self.params = params
        self.rng = as_rng(rng)
        self.keys = keys if keys is not None else ring.keygen(params, self.rng)

    @property
    def public(self) -> ring.RingPublicKey:
        return self.keys.public

    def backend(self, counter: OpCounter | None = None, rng=None) -> RingBackend:
        return RingBackend(self.params, self.public, rng if rng is not None else self.rng, counter)

    def encrypt_record(self, record: PlainRecord) -> RingCiphertext:
        elem = encode_field(record, self.field)
        return ring.encrypt(PlainPoly.make(elem.coeffs, self.params), self.public, self.params, self.rng)

    def decrypt(self, c: RingCiphertext) -> FieldElement:
        return self.field.element(ring.decrypt(c, self.keys, self.params).coeffs)

    def decrypt_scalar(self, c: RingCiphertext) -> int:
        """Decrypt a value expected to be a constant polynomial; raises otherwise."""
        e = self.decrypt(c)
        if not e.is_constant():
            raise EncodingError(f"expected a constant, decrypted {e.coeffs}")
        return e.coeffs[0]

    def decrypt_sequence(self, seq: EncryptedSequence) -> list:
        return [self.decrypt(c) for c in seq.entries]

    def decrypt_records(self, seq: EncryptedSequence, n_bits: int) -> list:
        return [decode_field(e, n_bits) for e in self.decrypt_sequence(seq)]

    def budget(self, c: RingCiphertext) -> float:
        return ring.noise_estimate(c, self.keys, self.params)


@dataclass
class HqpContext:
    """Server-side state: database encodings plus precomputed denominators."""

    db: Database
    field: FieldContext
    backend: RingBackend
    encoded: list
    distinct: list
    D: dict
    enc_D: dict
    strict: bool = False

    @property
    def m(self) -> int:
        return len(self.db)


def build_context(db: Database, field_ctx: FieldContext, be: RingBackend, strict: bool = False) -> HqpContext:
    """Encode records and precompute D_v = prod_{u != v} (v - u)^-1 per distinct value v.

    D depends only on the record's value, so each distinct value gets one
    field inversion and one encryption.
    """
    if field_ctx.p <= len(db):
        raise FieldTooSmall(f"need p > m for counters, got p={field_ctx.p}, m={len(db)}")
    if db.n_bits >= field_ctx.degree:
        raise DegreeTooSmall(f"{db.n_bits}-bit records need degree > {db.n_bits}, field has {field_ctx.degree}")
    if be.params.t != field_ctx.p or be.params.n != field_ctx.n:
        raise ValueError("ring plaintext space must be the chosen field (t = p, same Phi_n)")
    encoded = [encode_field(r, field_ctx) for r in db]
    distinct = list(dict.fromkeys(r.bits for r in db))
    elem = {v: encode_field(PlainRecord(v), field_ctx) for v in distinct}
    D, enc_D = {}, {}
    with be.phase("setup"):
        for v in distinct:
            acc = field_ctx.one()
            for u in distinct:
                if u != v:
                    acc = acc * (elem[v] - elem[u])
            D[v] = acc.inverse()
            be.tick_inverse()
            enc_D[v] = be.encrypt(D[v])
    return HqpContext(db=db, field=field_ctx, backend=be, encoded=encoded,
                      distinct=distinct, D=D, enc_D=enc_D, strict=strict)


def match_indicator(enc_query: RingCiphertext, i: int, ctx: HqpContext) -> RingCiphertext:
    """F_i = prod_{v != R_i} (m - v) * Enc(D_i)."""
    be = ctx.backend
    own = ctx.db.records[i].bits
    factors = []
    for v in ctx.distinct:
        if v == own:
            continue
        elem = encode_field(PlainRecord(v), ctx.field)
        if ctx.strict:
            factors.append(be.sub(enc_query, be.encrypt(elem)))
        else:
            factors.append(be.sub_plain(enc_query, elem))
    factors.append(ctx.enc_D[own])
    return tree_product(factors, be.mul)


def indicators(enc_query, ctx: HqpContext) -> list:
    with ctx.backend.phase("indicators"):
        return [match_indicator(enc_query, i, ctx) for i in range(ctx.m)]


def partial_sums(F, be: RingBackend) -> list:
    with be.phase("partial_sums"):
        G = [F[0]]
        for f in F[1:]:
            G.append(be.add(G[-1], f))
    return G


def lagrange_scalar(k: int, i: int, p: int) -> int:
    """prod_{j in 1..i, j != k} (k - j)^-1 mod p."""
    acc = 1
    for j in range(1, i + 1):
        if j != k:
            acc = acc * (k - j) % p
    return pow(acc, -1, p)


def position_indicators(F_i, G_i, i: int, ctx: HqpContext) -> list:
    """F'_{i,k} for k = 1..i: decrypts to 1 iff F_i = 1 and G_i = k."""
    be, p = ctx.backend, ctx.field.p
    if i >= p:
        raise CounterOverflow(f"counter {i} does not fit below p={p}")
    if ctx.strict:
        diffs = [be.sub(G_i, be.encrypt([j])) for j in range(1, i + 1)]
    else:
        diffs = [be.sub_plain(G_i, [j]) for j in range(1, i + 1)]
    partial = all_but_one_products(diffs, be.mul)
    out = []
    for k in range(1, i + 1):
        rest = partial[k - 1]
        v = F_i if rest is None else be.mul(F_i, rest)
        scalar = lagrange_scalar(k, i, p)
        if ctx.strict:
            v = be.mul(v, be.encrypt([scalar]))
        else:
            v = be.mul_plain(v, [scalar])
        out.append(v)
    return out


def all_position_indicators(F, G, ctx: HqpContext) -> list:
    with ctx.backend.phase("position_indicators"):
        return [position_indicators(F[i], G[i], i + 1, ctx) for i in range(ctx.m)]


def gather(Fprime, ctx: HqpContext) -> EncryptedSequence:
    be = ctx.backend
    with be.phase("gather"):
        seqs = []
        for rec, seq in zip(ctx.encoded, Fprime):
            if ctx.strict:
                enc_rec = be.encrypt(rec)
                entries = [be.mul(ind, enc_rec) for ind in seq]
            else:
                entries = [be.mul_plain(ind, rec) for ind in seq]
            seqs.append(EncryptedSequence(entries, be.context))
        return pad_add(seqs, add=be.add, make_zero=be.zero)


def match_count(F, be: RingBackend) -> RingCiphertext:
    with be.phase("count"):
        acc = F[0]
        for f in F[1:]:
            acc = be.add(acc, f)
    return acc


def membership_precheck(enc_query, ctx: HqpContext) -> RingCiphertext:
    """prod_i (m - R_i): zero exactly when the query is one of the records."""
    be = ctx.backend
    with be.phase("precheck"):
        if ctx.strict:
            factors = [be.sub(enc_query, be.encrypt(r)) for r in ctx.encoded]
        else:
            factors = [be.sub_plain(enc_query, r) for r in ctx.encoded]
        return tree_product(factors, be.mul)


@dataclass
class HqpTrace:
    F: list
    G: list
    Fprime: list
    count: RingCiphertext
    result: EncryptedSequence | None = None
    precheck: RingCiphertext | None = None
    extra: dict = field(default_factory=dict)

    def ciphertexts(self):
        yield from self.F
        yield from self.G
        for seq in self.Fprime:
            yield from seq
        if self.count is not None:
            yield self.count
        if self.result is not None:
            yield from self.result.entries
        if self.precheck is not None:
            yield self.precheck


def evaluate(enc_query, ctx: HqpContext) -> HqpTrace:
    """All server steps; returns the untruncated result."""
    if ctx.m == 0:
        return HqpTrace(F=[], G=[], Fprime=[], count=None, result=EncryptedSequence([], ctx.backend.context))
    F = indicators(enc_query, ctx)
    G = partial_sums(F, ctx.backend)
    Fprime = all_position_indicators(F, G, ctx)
    result = gather(Fprime, ctx)
    count = match_count(F, ctx.backend)
    return HqpTrace(F=F, G=G, Fprime=Fprime, count=count, result=result)


def run_select(enc_query, ctx: HqpContext, reveal_count=None, precheck=None, no_leak: bool = False):
    """Full session with optional pre-check and truncation rounds.

    ``precheck`` receives the encrypted membership product and returns True
    when it decrypted to zero; False aborts with :class:`NotFound` before
    any indicator is computed. ``reveal_count`` receives the encrypted count
    and returns the integer the user decrypted. With ``no_leak`` the count
    round is skipped and all m entries are returned.
    """
    pre = None
    if precheck is not None:
        pre = membership_precheck(enc_query, ctx)
        if not precheck(pre):
            raise NotFound("query value does not occur in the database")
    trace = evaluate(enc_query, ctx)
    trace.precheck = pre
    if no_leak or reveal_count is None or trace.count is None:
        return trace.result, trace
    n = int(reveal_count(trace.count))
    trace.extra["revealed_count"] = n
    return trace.result.truncated(n), trace


def detect_garbage(decrypted, n_bits: int) -> bool:
    """True when every entry is zero or a valid ``n_bits``-bit record encoding.

    False means the result is meaningless, which happens when the query
    value was not in the database and no pre-check ran.
    """
    for e in decrypted:
        c = e.coeffs if isinstance(e, FieldElement) else tuple(e)
        if any(x not in (0, 1) for x in c) or any(c[n_bits:]):
            return False
    return True


def plaintext_indicator(db: Database, query_bits, field_ctx: FieldContext) -> list:
    """Reference F_i computed directly in the field."""
    q = encode_field(PlainRecord(tuple(query_bits)), field_ctx)
    distinct = list(dict.fromkeys(r.bits for r in db))
    out = []
    for r in db:
        own = encode_field(r, field_ctx)
        acc = field_ctx.one()
        for v in distinct:
            if v != r.bits:
                e = encode_field(PlainRecord(v), field_ctx)
                acc = acc * (q - e) * (own - e).inverse()
        out.append(acc)
    return out


def transcript(trace: HqpTrace, ctx: HqpContext, client: HqpClient | None = None, returned=None) -> dict:
    out = {"scheme": "hqp", "records": ctx.m,
           "field": {"n": ctx.field.n, "p": ctx.field.p, "degree": ctx.field.degree},
           "ring": {"q_bits": ctx.backend.params.q.bit_length(), "t": ctx.backend.params.t},
           "revealed_count": trace.extra.get("revealed_count")}
    if client is not None:
        def show(c):
            e = client.decrypt(c)
            return e.coeffs[0] if e.is_constant() else list(e.coeffs)
        out["F"] = [show(c) for c in trace.F]
        out["G"] = [show(c) for c in trace.G]
        out["Fprime"] = [[show(c) for c in seq] for seq in trace.Fprime]
        out["count"] = show(trace.count)
        if returned is not None:
            dec = client.decrypt_sequence(returned)
            out["well_formed"] = detect_garbage(dec, ctx.db.n_bits)
            if out["well_formed"]:
                out["result"] = [decode_field(e, ctx.db.n_bits).display() for e in dec]
        out["min_noise_budget"] = round(min(client.budget(c) for c in trace.ciphertexts()), 3)
    return out
