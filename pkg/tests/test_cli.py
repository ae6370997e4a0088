import json

import pytest
from click.testing import CliRunner

from arithfuchs.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def test_field_info_k7(runner):
    res = runner.invoke(main, ["field-info", "k7", "--primes", "14"])
    assert res.exit_code == 0, res.output
    assert "disc 49" in res.output
    assert "embeddings -1.2469796037175 0.4450418679126 1.8019377358048" in res.output
    assert "periods {2,3,7}" in res.output
    refs = [line.split()[0] for line in res.output.splitlines() if line.startswith("  P")]
    assert refs == ["P7", "P2", "P13", "P13'", "P13''"]


def test_field_info_rationals_and_alias(runner):
    res = runner.invoke(main, ["field-info", "q", "--primes", "10"])
    assert res.exit_code == 0 and "disc 1" in res.output
    res = runner.invoke(main, ["field-info", "3981", "--primes", "10"])
    assert res.exit_code == 0
    lines = [line.split() for line in res.output.splitlines() if line.startswith("  P")]
    assert [(x[0], x[2]) for x in lines] == [("P3", "3"), ("P5", "5"), ("P3'", "9")]


def test_field_info_writes_records(runner, tmp_path):
    res = runner.invoke(main, ["--out", str(tmp_path), "field-info", "k7", "--primes", "8"])
    assert res.exit_code == 0
    (rec,) = [json.loads(line) for line in (tmp_path / "field-info.jsonl").read_text().splitlines()]
    assert rec["disc"] == 49 and [p["ref"] for p in rec["primes"]] == ["P7", "P2"]


def test_unknown_field_exits_2(runner):
    res = runner.invoke(main, ["field-info", "d50"])
    assert res.exit_code == 2
    res = runner.invoke(main, ["ford", "k7", "no-such-algebra"])
    assert res.exit_code == 2


def test_degree_bounds(runner):
    res = runner.invoke(main, ["degree-bounds"])
    assert res.exit_code == 0
    assert "15.1925" in res.output and "20.2036" in res.output
    assert "< 1263165" in res.output
    assert "PASS" in res.output


def test_signatures(runner):
    res = runner.invoke(main, ["signatures"])
    assert res.exit_code == 0
    assert res.output.strip().splitlines()[-1] == "33 signatures"
    assert "(0;2,3,7)          area 1/21 pi, index 84" in res.output
    assert "(0;2,3,18)" in res.output and "(0;2,5,6)" not in res.output


def test_areas(runner):
    res = runner.invoke(main, ["areas", "k7", "d3981"])
    assert res.exit_code == 0
    assert "mu = 1/21 pi" in res.output and "mu = 1 pi" in res.output


def test_classify_quintic(runner, tmp_path):
    res = runner.invoke(main, ["--out", str(tmp_path), "classify", "--degree", "5"])
    assert res.exit_code == 0, res.output
    assert res.output.strip().splitlines()[-1] == "3/3 rows PASS"
    records = [json.loads(line) for line in (tmp_path / "classify.jsonl").read_text().splitlines()]
    assert len(records) == 3 and all(r["status"] == "PASS" for r in records)


def test_ford_k7(runner, tmp_path):
    outputs = []
    for sub in ("one", "two"):
        out = tmp_path / sub
        res = runner.invoke(main, ["--out", str(out), "ford", "k7", "ram-2-7"])
        assert res.exit_code == 0, res.output
        assert "signature (1;2,2)" in res.output
        assert "genus-two subgroups of index <= 2: 4" in res.output
        assert "FAIL" not in res.output
        names = sorted(p.name for p in out.iterdir())
        assert names == ["ford-k7-ram-2-7.jsonl", "k7-ram-2-7-generators.txt", "k7-ram-2-7.svg"]
        outputs.append({n: (out / n).read_bytes() for n in names})
    assert outputs[0] == outputs[1]


def test_render(runner, tmp_path):
    res = runner.invoke(main, ["--out", str(tmp_path), "render", "k7", "ram-2-7", "--size", "300"])
    assert res.exit_code == 0
    svg = list(tmp_path.glob("*.svg"))
    assert len(svg) == 1 and svg[0].read_text().startswith("<svg")
