import json
import subprocess
import sys

import pytest

from ncclab import cli, network


def run(args, capsys):
    code = cli.main(args)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(autouse=True)
def no_seed_env(monkeypatch):
    monkeypatch.delenv(cli.SEED_ENV, raising=False)


def test_fft_check(tmp_path, capsys):
    path = tmp_path / "a.csv"
    path.write_text(",".join(str(i % 17) for i in range(16)) + "\n")
    code, out, _ = run(["fft", "--p", "17", "--n", "16", "--input", str(path), "--check"], capsys)
    assert code == 0
    assert out.splitlines()[-1] == "OK naive-DFT match"


def test_fft_constant(tmp_path, capsys, monkeypatch):
    path = tmp_path / "c.csv"
    path.write_text("4\n0\n0\n0\n")
    code, out, _ = run(["fft", "--p", "17", "--n", "4", "--input", str(path)], capsys)
    assert code == 0 and out == "4,4,4,4\n"


def test_fft_inverse_to_file(tmp_path, capsys):
    src = tmp_path / "v.csv"
    src.write_text("5,5,5,5")
    dst = tmp_path / "out.csv"
    code, out, _ = run(["fft", "--p", "17", "--n", "4", "--input", str(src), "--inverse",
                        "--check", "--output", str(dst)], capsys)
    assert code == 0 and dst.read_text() == "5,0,0,0\n" and out == "OK naive-DFT match\n"


def test_fft_no_root(capsys):
    code, _, err = run(["fft", "--n", "5", "--p", "17"], capsys)
    assert code == 1 and "NoSuchRoot" in err


def test_fft_parse_error(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("1,two,3")
    code, _, err = run(["fft", "--p", "17", "--n", "4", "--input", str(path)], capsys)
    assert code == 2 and "ParseError" in err


def test_fft_not_prime(capsys):
    code, _, err = run(["fft", "--p", "15", "--n", "2"], capsys)
    assert code == 1 and "NotPrime" in err


def test_reduce_inversion_report(tmp_path, capsys):
    code, out, _ = run(["reduce", "--problem", "inversion", "--ds", "inv_block", "--n", "8", "--t", "2",
                        "--q", "4", "--out-dir", str(tmp_path)], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["edges_G_prime"]["value"] == 32 and rep["seed"] == 0
    assert rep["scheme"]["members"] == rep["scheme"]["direct_correct"] == rep["scheme"]["replay_correct"]
    assert (tmp_path / "report.json").read_text() == out
    net = network.read_network(tmp_path / "network.txt")
    assert len(net.edges) == 32
    assert json.loads((tmp_path / "bucket.json").read_text())["members"]


def test_reduce_hellman_rejected(capsys):
    code, _, err = run(["reduce", "--ds", "hellman"], capsys)
    assert code == 1 and "AdaptiveDSRejected" in err


def test_reduce_polyeval(capsys):
    code, out, _ = run(["reduce", "--problem", "polyeval", "--p", "17", "--n", "16", "--b", "5"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["b"] == 5
    assert rep["telescoping"] == {"samples": 200, "b": 5, "mismatches": 0, "ok": True, "two_pass_correct": 200}


def test_reduce_wrong_ds_for_problem(capsys):
    code, _, err = run(["reduce", "--problem", "polyeval", "--ds", "inv_block", "--n", "16"], capsys)
    assert code == 2


def test_reduce_deterministic_and_env_seed(capsys, monkeypatch):
    args = ["reduce", "--n", "16", "--samples", "300"]
    _, a, _ = run(args + ["--seed", "4"], capsys)
    _, b, _ = run(args + ["--seed", "4"], capsys)
    assert a == b
    monkeypatch.setenv(cli.SEED_ENV, "4")
    _, c, _ = run(args + ["--seed", "99"], capsys)
    assert c == a and json.loads(c)["seed"] == 4


def test_flowrate_butterfly(capsys):
    assert run(["flowrate", "butterfly"], capsys)[1] == "flow_rate 0.5\n"
    assert run(["flowrate", "butterfly", "--gap"], capsys)[1] == "coding 1.0 flow 0.5 ratio 2.0\n"


def test_flowrate_path_and_csv(tmp_path, capsys):
    csv = tmp_path / "flow.csv"
    code, out, _ = run(["flowrate", "path", "--csv", str(csv)], capsys)
    assert out == "flow_rate 3.0\n"
    assert csv.read_text().startswith("commodity,u,v,flow\n")


def test_flowrate_from_file(tmp_path, capsys):
    path = tmp_path / "net.txt"
    path.write_text("network undirected 3 2 1\ne 0 1 2\ne 1 2 5\np 0 2\n")
    assert run(["flowrate", str(path)], capsys)[1] == "flow_rate 2.0\n"


def test_flowrate_malformed(tmp_path, capsys):
    path = tmp_path / "net.txt"
    path.write_text("network directed 2 1 1\ne 0 one 1\np 0 1\n")
    code, _, err = run(["flowrate", str(path)], capsys)
    assert code == 2 and "ParseError" in err
    assert run(["flowrate", str(tmp_path / "missing.txt")], capsys)[0] == 2


def test_gap_report_and_witness(tmp_path, capsys):
    w = tmp_path / "w.txt"
    code, out, _ = run(["gap", "butterfly", "--witness", str(w)], capsys)
    rep = json.loads(out)
    assert rep["coding_rate"] == 1.0 and rep["directed_flow_rate"] == pytest.approx(0.5)
    assert w.read_text().startswith("scheme 1\n")


def test_commonbits_fixtures(capsys):
    out = run(["commonbits", "hub"], capsys)[1]
    assert "cut size 1: 4" in out
    out = run(["commonbits", "identity"], capsys)[1]
    assert "cut size 0: -" in out and "t = 1" in out
    out = run(["commonbits", "inversion", "--verify"], capsys)[1]
    assert "24/24 permutations OK" in out and "256/256 tables OK" in out


def test_commonbits_json_from_file(tmp_path, capsys):
    path = tmp_path / "sorter.net"
    run(["fixture", "sorter", "--output", str(path)], capsys)
    code, out, _ = run(["commonbits", str(path), "--in-width", "2", "--block", "2", "--bound", "4",
                        "--verify", "--json"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["verify"] == ["256/256 inputs OK"]


def test_commonbits_parse_error(tmp_path, capsys):
    path = tmp_path / "bad.net"
    path.write_text("circuit 1 1\ngate 0 INPUT\ngate 1 XOR 0 0\n")
    assert run(["commonbits", str(path)], capsys)[0] == 2


def test_hellman_csv(capsys):
    code, out, _ = run(["hellman", "--ns", "8", "16", "--ts", "1", "2", "--trials", "5"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("n,t,trials") and len(lines) == 5


def test_correction_summary(capsys):
    code, out, _ = run(["correction", "--instances", "10"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["all_in_F"] and rep["log2_F"] == 60


def test_supervisor(capsys):
    code, out, _ = run(["supervisor"], capsys)
    rep = json.loads(out)["inversion"]
    assert code == 0 and rep["permutations_decoded"] == 24


def test_figures_written_and_stable(tmp_path, capsys):
    for d in ("a", "b"):
        run(["flowrate", "butterfly", "--figures", str(tmp_path / d)], capsys)
        run(["hellman", "--ns", "8", "--ts", "1", "2", "--trials", "3", "--figures", str(tmp_path / d)], capsys)
        run(["correction", "--instances", "5", "--figures", str(tmp_path / d)], capsys)
        run(["commonbits", "hub", "--figures", str(tmp_path / d)], capsys)
        run(["reduce", "--n", "4", "--figures", str(tmp_path / d)], capsys)
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == ["correction_lengths.png", "cut_connectivity.png", "flow_loads.png",
                     "hellman_tradeoff.png", "layered_network.png"]
    for n in names:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()


def test_console_entry_point_exit_code():
    res = subprocess.run([sys.executable, "-m", "ncclab.cli", "fft", "--n", "5", "--p", "17"],
                         capture_output=True, text=True)
    assert res.returncode == 1
    assert res.stderr.startswith("error: NoSuchRoot")


def test_argparse_usage_error():
    res = subprocess.run([sys.executable, "-m", "ncclab.cli", "flowrate"], capture_output=True, text=True)
    assert res.returncode == 2
