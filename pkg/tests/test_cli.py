import json
import math

import pytest

from shortsmooth import cli
from shortsmooth.cli import EstimateReport, ExperimentConfig, main, run, verify_theorem_main
from shortsmooth.errors import ConfigError, DomainError
from shortsmooth.sieve import psi_exact

# frozen schemas; changing one of these is a breaking change for report consumers
GOLDEN_HEADERS = {
    "count": "x,y,h,exact,provenance",
    "hildebrand": "x,y,h,exact,g,estimate,rel_err,terms,provenance",
    "export-contour": "index,kind,source,t_lo,t_hi,sigma_lo,sigma_hi",
}


def report_lines(path):
    return path.read_text().splitlines()


def test_count_example():
    r = run(ExperimentConfig("count", x=100, y=3))
    assert r.rows[0]["exact"] == 20 and r.rows[0]["provenance"] == "spf"


def test_theorem_main_three_rows(tmp_path):
    grid = [(10**5, 100, 3000), (10**5, 1000, 3000), (10**6, 1000, 20000)]
    r = verify_theorem_main(grid)
    assert len(r.rows) == 3
    for row, (x, y, h) in zip(r.rows, grid):
        assert row["ratio"] == pytest.approx(row["short_density"] / row["long_density"], rel=1e-15)
        assert row["long_density"] == psi_exact(x, y) / x
        u = math.log(x) / math.log(y)
        want = abs(row["ratio"] - 1) * math.log(y) / math.log(u + 1)
        assert row["implied_constant"] == pytest.approx(want, rel=1e-12)


def test_theorem_main_all_smooth():
    # y >= x + h: both sides count every integer
    r = verify_theorem_main([(1000, 2000, 1000)])
    assert r.rows[0]["ratio"] == 1.0


def test_duplicate_rows_identical():
    r = verify_theorem_main([(10**5, 300, 2000)] * 2)
    assert r.rows[0] == r.rows[1]


def test_invalid_theta_names_field():
    with pytest.raises(ConfigError, match="theta"):
        run(ExperimentConfig("theorem-main", x=10**5, y=100, theta=0.5))


@pytest.mark.parametrize("kwargs,field", [
    (dict(experiment="count", y=3), "x"),
    (dict(experiment="perron", x=10**4, y=30, h=100), "H"),
    (dict(experiment="ftheta", x=10**5, y=100, h=100, eps=0.3), "eps"),
    (dict(experiment="explicit-psi", x=10**4), "zeros"),
    (dict(experiment="count", x=100, y=3, workers=0), "workers"),
])
def test_validation_messages(kwargs, field):
    with pytest.raises(ConfigError, match=field):
        run(ExperimentConfig(**kwargs))


def test_row_errors_are_annotated():
    with pytest.raises(DomainError, match="row 1"):
        run(ExperimentConfig("count", grid=[(100, 3, None), (100, 1, None)]))


def test_exit_codes(tmp_path, capsys):
    assert main(["count", "--x", "100", "--y", "3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("# shortsmooth report schema=1 experiment=count")
    assert out[3] == "100,3,0,20,spf"
    assert main(["theorem-main", "--x", "1e5", "--y", "100", "--theta", "0.5"]) == 2
    assert main(["count", "--x", "1e11", "--y", "100"]) == 3
    assert main(["explicit-psi", "--x", "1e4", "--zeros", str(tmp_path / "none.txt")]) == 4
    with pytest.raises(SystemExit):
        main(["no-such-experiment"])


@pytest.mark.parametrize("experiment,argv", [
    ("count", ["--x", "1000", "--y", "10"]),
    ("hildebrand", ["--x", "1e5", "--y", "1e4", "--h", "1000"]),
])
def test_golden_headers(tmp_path, experiment, argv):
    out = tmp_path / "r.csv"
    assert main([experiment, *argv, "--output", str(out)]) == 0
    lines = report_lines(out)
    assert lines[0] == f"# shortsmooth report schema=1 experiment={experiment}"
    assert lines[1].startswith("# sha256=")
    assert lines[2] == GOLDEN_HEADERS[experiment]


def test_hash_line_matches_body(tmp_path):
    import hashlib
    out = tmp_path / "r.csv"
    main(["count", "--x", "1000", "--y", "10", "--output", str(out), "--timestamp"])
    lines = out.read_text().splitlines(keepends=True)
    assert lines[2].startswith("# timestamp=")
    digest = lines[1].strip().split("=", 1)[1]
    assert hashlib.sha256("".join(lines[3:]).encode()).hexdigest() == digest


def test_jsonl(tmp_path):
    out = tmp_path / "r.jsonl"
    main(["count", "--x", "100", "--y", "3", "--format", "jsonl", "--output", str(out)])
    meta, row = [json.loads(s) for s in report_lines(out)]
    assert meta["schema"] == 1 and meta["columns"] == GOLDEN_HEADERS["count"].split(",")
    assert row["exact"] == 20


def test_rel_err():
    assert cli.rel_err(110.0, 100) == pytest.approx(0.1)
    assert cli.rel_err(1.0, None) is None
    r = EstimateReport("x", ["a", "b"], [{"a": 1.5, "b": None}])
    assert r.body_csv() == "a,b\n1.5,\n"


def test_workers_byte_identical(tmp_path):
    grid = tmp_path / "grid.txt"
    grid.write_text("x,y,h\n100000,100,2000\n200000,30,5000\n# comment\n1e6,1000,\n")
    outs = []
    for w in (1, 8):
        out = tmp_path / f"w{w}.csv"
        assert main(["count", "--grid", str(grid), "--workers", str(w), "--output", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert len(outs[0].decode().splitlines()) == 3 + 3


def test_cache_roundtrip(tmp_path):
    cache = tmp_path / "cache.csv"
    first = run(ExperimentConfig("count", x=10**5, y=50, cache=str(cache)))
    text = cache.read_text()
    assert "100000" in text
    again = run(ExperimentConfig("count", x=10**5, y=50, cache=str(cache)))
    assert again.rows == first.rows
    assert cache.read_text() == text


def test_config_file_and_override(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("# comment\nx = 1e4\ny=30\nh=100\neps=0.1\n")
    assert main(["count", "--config", str(conf), "--y", "50", "--print-config"]) == 0
    printed = dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())
    assert printed["x"] == "10000" and printed["y"] == "50" and printed["eps"] == "0.1"
    assert printed["workers"] == "1" and printed["format"] == "csv"
    conf.write_text("bogus=1\n")
    assert main(["count", "--config", str(conf)]) == 2
    conf.write_text("x=ten\n")
    assert main(["count", "--config", str(conf)]) == 2
    assert "x: bad value" in capsys.readouterr().err


def test_number_parsing():
    assert cli._num("1e6") == 10**6 and isinstance(cli._num("1e6"), int)
    assert cli._num("10**6") == 10**6
    assert cli._num("0.7") == 0.7
    with pytest.raises(ValueError):
        cli._num("ten")


def test_export_contour(tmp_path):
    path = tmp_path / "gamma.csv"
    r = run(ExperimentConfig("export-contour", x=10**6, y=1000, H=2000, synthetic_zeros=3, seed=7,
                             export_path=str(path), samples=101))
    lines = report_lines(path)
    assert lines[0] == "t,sigma" and len(lines) == 102
    spans = [(row["t_lo"], row["t_hi"]) for row in r.rows]
    assert spans[0][0] == -2000 and spans[-1][1] == 2000
    assert all(a[1] == b[0] for a, b in zip(spans, spans[1:]))


def test_saddle_and_theorem_via_theta():
    r = run(ExperimentConfig("saddle", x=10**6, y=1000))
    assert r.rows[0]["alpha"] == pytest.approx(0.8107722261171988, abs=1e-12)
    t = run(ExperimentConfig("theorem-main", x=10**5, y=100, theta=0.7))
    assert t.rows[0]["h"] == math.ceil((10**5) ** 0.7)
