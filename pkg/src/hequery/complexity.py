"""Operation-count grid comparing the two protocols phase by phase."""
from __future__ import annotations

import time

import numpy as np

from . import gahi, hqp
from .codec import Database, PlainRecord
from .dghv import DghvParams
from .metering import OpCounter

COMPARED_PHASES = ("indicators", "partial_sums", "position_indicators", "gather")

# growth laws per phase as (exponent of n_bits, exponent of m)
CLAIMED = {
    "gahi": {"indicators": (1, 1), "partial_sums": (1, 2), "position_indicators": (1, 2), "gather": (1, 2)},
    "hqp": {"indicators": (0, 1), "partial_sums": (0, 2), "position_indicators": (0, 2), "gather": (0, 2)},
}


def grid_database(m: int, n_bits: int) -> Database:
    """Records alternate between all-ones and all-zeros; the query is record 1.

    Two distinct values keep the HQP indicator products the same size for
    every width, so width effects show up only on the bitwise side.
    """
    hi = (1 << n_bits) - 1
    return Database.from_values([hi if i % 2 == 0 else 0 for i in range(m)], n_bits)


def _sim_params() -> DghvParams:
    # counting does not depend on key size; keep ciphertexts tiny
    return DghvParams(noise_bits=2, secret_bits=3, rand_bits=4, pubkey_size=2)


def count_gahi(db: Database, query: PlainRecord, strict: bool = False) -> OpCounter:
    counter = OpCounter()
    be = gahi.BoundOnlyBackend(_sim_params(), counter)
    with counter.phase("query"):
        enc = [be.encrypt(b) for b in query.bits]
    gahi.evaluate(db, enc, be, strict)
    return counter


def count_hqp(db: Database, query: PlainRecord, strict: bool = False, seed: int = 0) -> OpCounter:
    """Counts from a real (small-modulus) run; counts do not depend on the modulus."""
    counter = OpCounter()
    fc = hqp.choose_field(db.n_bits, len(db))
    params = hqp.advise_ring(fc, len(db), strict)
    client = hqp.HqpClient(fc, params, seed)
    be = client.backend(counter)
    ctx = hqp.build_context(db, fc, be, strict)
    with counter.phase("query"):
        enc = be.encrypt(hqp.encode_field(query, fc))
    hqp.evaluate(enc, ctx)
    return counter


def run_grid(n_bits_values=(2, 4, 8), m_values=(2, 4, 8), strict: bool = False, seed: int = 0) -> list:
    rows = []
    for m in m_values:
        for nb in n_bits_values:
            db = grid_database(m, nb)
            query = db.records[0]
            t0 = time.perf_counter()
            g = count_gahi(db, query, strict)
            t1 = time.perf_counter()
            h = count_hqp(db, query, strict, seed)
            t2 = time.perf_counter()
            row = {"m": m, "n_bits": nb, "gahi": g.as_dict(), "hqp": h.as_dict(),
                   "seconds": {"gahi_count": round(t1 - t0, 4), "hqp_run": round(t2 - t1, 4)}}
            for ph in COMPARED_PHASES + ("total",):
                for kind, op in (("mul", "mul"), ("ops", None)):
                    gm = g.total(op) if ph == "total" else g.get(ph, op)
                    hm = h.total(op) if ph == "total" else h.get(ph, op)
                    row.setdefault(kind, {})[ph] = {"gahi": gm, "hqp": hm,
                                                    "ratio": round(gm / hm, 4) if hm else None}
            rows.append(row)
    return rows


def linear_fit(xs, ys) -> dict:
    """Least-squares line y = a x + b and the worst relative deviation from it."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    a, b = np.polyfit(xs, ys, 1)
    pred = a * xs + b
    dev = float(np.max(np.abs(ys - pred) / np.maximum(np.abs(pred), 1e-12)))
    return {"slope": float(a), "intercept": float(b), "max_rel_dev": dev}


def complexity_report(rows: list) -> dict:
    """Per-phase shape checks across the grid, grouped by m."""
    by_m = {}
    for r in rows:
        by_m.setdefault(r["m"], []).append(r)
    report = {"rows": rows, "per_m": {}, "claimed": CLAIMED}
    for m, rs in sorted(by_m.items()):
        rs = sorted(rs, key=lambda r: r["n_bits"])
        nb = [r["n_bits"] for r in rs]
        entry = {"n_bits": nb}
        for ph in COMPARED_PHASES + ("total",):
            g = [r["mul"][ph]["gahi"] for r in rs]
            h = [r["mul"][ph]["hqp"] for r in rs]
            ratios = [r["ops"][ph]["ratio"] for r in rs]
            entry[ph] = {"gahi_mul": g, "hqp_mul": h, "ops_ratio": ratios,
                         "gahi_mul_fit": linear_fit(nb, g) if len(nb) > 1 else None,
                         "hqp_mul_constant": len(set(h)) == 1,
                         "ops_ratio_increasing": all(b > a for a, b in zip(ratios, ratios[1:]))}
        report["per_m"][m] = entry
    return report


def format_table(rows: list) -> str:
    header = ["m", "n_bits", "phase", "gahi_mul", "hqp_mul", "gahi_ops", "hqp_ops", "ops_ratio"]
    lines = []
    for r in rows:
        for ph in COMPARED_PHASES + ("total",):
            c, o = r["mul"][ph], r["ops"][ph]
            ratio = "-" if o["ratio"] is None else f"{o['ratio']:.2f}"
            lines.append([str(r["m"]), str(r["n_bits"]), ph, str(c["gahi"]), str(c["hqp"]),
                          str(o["gahi"]), str(o["hqp"]), ratio])
    widths = [max(len(h), *(len(l[i]) for l in lines)) for i, h in enumerate(header)]
    fmt = lambda cells: "  ".join(c.rjust(w) if i != 2 else c.ljust(w) for i, (c, w) in enumerate(zip(cells, widths)))
    return "\n".join([fmt(header), fmt(["-" * w for w in widths])] + [fmt(l) for l in lines]) + "\n"
