import json

import pytest

from volterra_chain.cli import lemma_sweep, main


@pytest.fixture
def chain(tmp_path):
    def make(data, name="chain.json"):
        p = tmp_path / name
        p.write_text(json.dumps(data))
        return str(p)

    return make


def test_spectrum_constant(chain, tmp_path):
    out = tmp_path / "s.json"
    assert main(["spectrum", "--input", chain({"n": 3, "u": [4, 4, 4]}), "--output", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["lambda"] == pytest.approx([-2, -1, -1, 1, 1, 2], abs=1e-12)
    assert set(data) == {"n", "lambda", "gaps", "mu", "sigma"}


def test_spectrum_from_a(chain, tmp_path):
    out = tmp_path / "s.json"
    assert main(["spectrum", "--input", chain({"n": 3, "a": [1, 2, 3]}), "--output", str(out)]) == 0
    assert json.loads(out.read_text())["mu"][0] == pytest.approx([-2, 2], abs=1e-12)


@pytest.mark.parametrize(
    "data",
    [
        {"n": 2, "u": [1, 1, 1]},
        {"n": 2},
        {"n": 2, "u": [1, 1], "a": [1, 1]},
        {"n": 1, "u": [1]},
        {"n": 2, "u": [1, "x"]},
        [1, 2],
    ],
)
def test_spectrum_bad_input(chain, data):
    assert main(["spectrum", "--input", chain(data)]) == 2


def test_invariant_violation(chain, capsys):
    assert main(["spectrum", "--input", chain({"n": 2, "u": [1, -1]})]) == 3
    assert "'u'" in capsys.readouterr().err


def test_missing_file(tmp_path):
    assert main(["spectrum", "--input", str(tmp_path / "nope.json")]) == 2


def test_evolve_constant_rows_identical(chain, tmp_path):
    out = tmp_path / "d.csv"
    args = ["evolve", "--input", chain({"n": 4, "u": [1.5] * 4}), "--t-end", "0.1", "--dt", "0.01"]
    assert main(args + ["--output", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,u_1,u_2,u_3,u_4,sum_drift,prod_drift"
    assert len({line.split(",", 1)[1] for line in lines[1:]}) == 1


def test_evolve_spectral_matches_direct(chain, tmp_path):
    src = chain({"n": 3, "u": [2, 3, 4]})
    rows = {}
    for method in ("direct", "spectral"):
        out = tmp_path / f"{method}.csv"
        assert main(["evolve", "--input", src, "--method", method, "--t-end", "1", "--output", str(out)]) == 0
        text = out.read_text()
        assert "\r" not in text
        lines = text.splitlines()
        rows[method] = [[float(v) for v in line.split(",")[:4]] for line in lines[1:]]
    assert len(rows["direct"]) == len(rows["spectral"]) == 101
    for d, s in zip(rows["direct"], rows["spectral"]):
        assert d[0] == s[0]
        assert max(abs(x - y) / x for x, y in zip(d[1:], s[1:])) <= 1e-4
    header = (tmp_path / "spectral.csv").read_text().splitlines()[0].split(",")
    assert header[4:8] == ["mu_1_0", "mu_2_0", "mu_1_1", "mu_2_1"]
    assert header[-3:] == ["sum_drift", "zero_sum", "min_a2"]


@pytest.mark.parametrize("dt", ["0", "-0.1"])
def test_evolve_bad_dt(chain, dt):
    assert main(["evolve", "--input", chain({"n": 3, "u": [1, 2, 3]}), "--dt", dt]) == 2


def test_evolve_integration_failure(chain, capsys):
    src = chain({"n": 5, "u": [0.1, 5.0, 0.1, 5.0, 0.2]})
    assert main(["evolve", "--input", src, "--t-end", "2", "--dt", "0.9"]) == 4
    assert "t=" in capsys.readouterr().err


def test_evolve_reproducible(chain, tmp_path):
    src = chain({"n": 4, "u": [0.7, 1.2, 1.9, 1.1]})
    texts = []
    for i in range(2):
        out = tmp_path / f"r{i}.csv"
        main(["evolve", "--input", src, "--method", "spectral", "--t-end", "0.3", "--output", str(out)])
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]


def test_verify_constant(chain, tmp_path):
    out = tmp_path / "r.json"
    assert main(["verify", "--input", chain({"n": 3, "u": [4, 4, 4]}), "--output", str(out)]) == 0
    data = json.loads(out.read_text())
    assert all(c["pass"] for c in data["checks"])
    res = {c["name"]: c["max_residual"] for c in data["checks"]}
    assert res["mu_cross_validation"] == 0 and res["sigma_agreement"] == 0
    assert max(res.values()) <= 1e-14


def test_verify_seed_reproducible(tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"v{i}.json"
        assert main(["verify", "--seed", "5", "--n", "4", "--t-end", "0.5", "--output", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_verify_flip_sigma(chain, tmp_path):
    out = tmp_path / "r.json"
    src = chain({"n": 3, "u": [2, 3, 4]})
    assert main(["verify", "--input", src, "--flip-sigma", "1,1", "--output", str(out)]) == 1
    failed = {c["name"] for c in json.loads(out.read_text())["checks"] if not c["pass"]}
    assert "sigma_agreement" in failed or "a2_nonnegative" in failed


@pytest.mark.parametrize("flag", ["0,1", "3,0", "1,5", "x"])
def test_verify_flip_sigma_range(chain, flag):
    assert main(["verify", "--input", chain({"n": 3, "u": [2, 3, 4]}), "--flip-sigma", flag]) == 2


def test_verify_needs_source():
    assert main(["verify"]) == 2


def test_lemma_exact(capsys):
    assert main(["lemma", "--n", "3", "--s-min", "-4", "--s-max", "7"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,s,max_residual,max_term,value,ok"
    rows = {int(r.split(",")[1]): r.split(",") for r in lines[1:]}
    assert all(r[2] == "0.0" and r[5] == "1" for r in rows.values())
    assert rows[0][4] == "0"
    assert rows[3][4] == "1"


def test_lemma_float():
    assert all(ok for *_, ok in lemma_sweep(4, -6, 10, 10, 1, "float"))


def test_lemma_bad_range():
    assert main(["lemma", "--s-min", "3", "--s-max", "1"]) == 2


def _trajectory(chain, tmp_path, method):
    out = tmp_path / f"{method}.csv"
    src = chain({"n": 3, "u": [2, 3, 4]})
    assert main(["evolve", "--input", src, "--method", method, "--t-end", "0.5", "--output", str(out)]) == 0
    return str(out)


@pytest.mark.parametrize("what, method", [("u", "direct"), ("mu", "spectral")])
def test_plot(chain, tmp_path, what, method):
    csv_path = _trajectory(chain, tmp_path, method)
    svgs = []
    for i in range(2):
        out = tmp_path / f"p{i}.svg"
        assert main(["plot", "--input", csv_path, "--output", str(out), "--what", what]) == 0
        svgs.append(out.read_bytes())
    assert svgs[0].lstrip().startswith(b"<?xml")
    assert svgs[0] == svgs[1]


def test_plot_errors(chain, tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert main(["plot", "--input", str(empty), "--output", str(tmp_path / "x.svg")]) == 2
    direct = _trajectory(chain, tmp_path, "direct")
    assert main(["plot", "--input", direct, "--output", str(tmp_path / "x.svg"), "--what", "mu"]) == 2
    odd = tmp_path / "odd.csv"
    odd.write_text("x,y\n1,2\n")
    assert main(["plot", "--input", str(odd), "--output", str(tmp_path / "x.svg")]) == 2


def test_plot_refuses_escaped_mu(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,mu_1_0,gap_lo_1,gap_hi_1\n0,0.5,0,1\n1,1.5,0,1\n")
    assert main(["plot", "--input", str(bad), "--output", str(tmp_path / "x.svg"), "--what", "mu"]) == 2
