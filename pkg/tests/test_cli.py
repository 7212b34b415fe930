import json

import pytest

from hequery.cli import main

T1 = ["1100", "1010", "1100", "1101", "1000"]
T2 = "id,bits\n1,0010\n2,1011\n3,1001\n4,1011\n5,1100\n"


@pytest.fixture
def dbs(tmp_path):
    (tmp_path / "t1.json").write_text(json.dumps(T1))
    (tmp_path / "t2.csv").write_text(T2)
    return tmp_path


def test_demo_tables(capsys):
    assert main(["demo", "--table", "1"]) == 0
    assert main(["demo", "--table", "2"]) == 0
    out = capsys.readouterr().out
    assert "EXPECTED" not in out


def test_demo_bad_table():
    with pytest.raises(SystemExit) as e:
        main(["demo", "--table", "3"])
    assert e.value.code == 2


def test_query_gahi(dbs, capsys):
    out = dbs / "tr.json"
    assert main(["query", "1100", "--db", str(dbs / "t1.json"), "--out", str(out)]) == 0
    tr = json.loads(out.read_text())
    assert tr["result"] == ["1100", "1100"] and tr["I"] == [1, 0, 1, 0, 0]


def test_query_hqp(dbs):
    out = dbs / "tr.json"
    assert main(["query", "1011", "--scheme", "hqp", "--db", str(dbs / "t2.csv"), "--out", str(out)]) == 0
    tr = json.loads(out.read_text())
    assert tr["result"] == ["1011", "1011"] and tr["G"] == [0, 1, 1, 2, 2]


def test_query_exit_codes(dbs):
    assert main(["query", "1111", "--scheme", "hqp", "--precheck", "--db", str(dbs / "t2.csv")]) == 4
    assert main(["query", "111", "--db", str(dbs / "t1.json")]) == 3
    assert main(["query", "1111"]) == 2
    assert main(["query", "1100", "--db", str(dbs / "missing.csv")]) == 3


def test_transcripts_byte_identical(dbs):
    for scheme, db, q in (("gahi", "t1.json", "1100"), ("hqp", "t2.csv", "1011")):
        outs = []
        for name in ("a.json", "b.json"):
            assert main(["query", q, "--scheme", scheme, "--seed", "9", "--db", str(dbs / db),
                         "--out", str(dbs / name)]) == 0
            outs.append((dbs / name).read_bytes())
        assert outs[0] == outs[1]


def test_keygen(dbs, capsys):
    for k in ("k1", "k2"):
        assert main(["keygen", "--seed", "3", "--out", str(dbs / k)]) == 0
    for f in ("secret.json", "public.json"):
        assert (dbs / "k1" / f).read_bytes() == (dbs / "k2" / f).read_bytes()
    (dbs / "bad.json").write_text(json.dumps({"noise_bits": 8, "secret_bits": 8}))
    assert main(["keygen", "--params", str(dbs / "bad.json")]) == 2
    (dbs / "unk.json").write_text(json.dumps({"colour": 1}))
    assert main(["keygen", "--params", str(dbs / "unk.json")]) == 2


def test_keys_reused_for_query(dbs):
    for scheme, db, q in (("gahi", "t1.json", "1100"), ("hqp", "t2.csv", "1011")):
        kd = dbs / f"keys_{scheme}"
        assert main(["keygen", "--scheme", scheme, "--db", str(dbs / db), "--out", str(kd)]) == 0
        out = dbs / f"{scheme}.json"
        assert main(["query", q, "--scheme", scheme, "--db", str(dbs / db), "--keys", str(kd),
                     "--out", str(out)]) == 0
        assert json.loads(out.read_text())["count"] == 2


def test_update_delete(dbs):
    out = dbs / "view.json"
    assert main(["update", "1100", "--new", "0110", "--db", str(dbs / "t1.json"), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["decrypted"] == ["0110", "1010", "0110", "1101", "1000"]
    assert main(["delete", "1100", "--db", str(dbs / "t1.json"), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["decrypted"] == ["0000", "1010", "0000", "1101", "1000"]
    assert main(["delete", "1011", "--scheme", "hqp", "--db", str(dbs / "t2.csv")]) == 2


def test_field_find(dbs, capsys):
    assert main(["field-find", "107", "--below", "100", "--all"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["irreducible_primes"] == [2, 5, 7, 17, 31, 43, 59, 67, 71, 73, 97]
    assert main(["field-find", "8"]) == 3
    assert "square" in json.loads(capsys.readouterr().out)["error"]
    assert main(["field-find", "4"]) == 0
    assert json.loads(capsys.readouterr().out)["chosen_p"] == 3


def test_bench(dbs):
    out = dbs / "bench"
    assert main(["bench", "--m", "2,4", "--n-bits", "2,4", "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert set(rep["per_m"]) == {"2", "4"}
    assert (out / "report.txt").read_text().startswith("m")
