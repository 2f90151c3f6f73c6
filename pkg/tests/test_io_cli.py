import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from qcent import channels as ch
from qcent import io
from qcent.cli import main
from qcent.errors import ParseError

LN2 = math.log(2.0)


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return str(p)
    return write


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestParse:
    def test_state_forms(self):
        a = io.parse_state({"type": "state", "diag": [0.5, 0.5]})
        b = io.parse_state({"type": "state", "generator": "maximally_mixed", "params": {"dim": 2}})
        c = io.parse_state({"type": "state", "matrix": [[[0.5, 0], 0], [0, 0.5]]})
        for m in (b, c):
            np.testing.assert_allclose(m, a)
        k = io.parse_state({"type": "state", "ket": [1, [0, 1]]})
        np.testing.assert_allclose(k, np.array([[0.5, -0.5j], [0.5j, 0.5]]))

    def test_state_roundtrip(self, rng):
        from conftest import rand_density
        rho = rand_density(rng, 3)
        np.testing.assert_array_equal(io.parse_state(io.state_document(rho)), rho)

    def test_channel_roundtrip(self):
        c = ch.mix_with_pure(3, 0.3)
        back = io.parse_channel(json.loads(json.dumps(io.channel_document(c))))
        assert back.n_kraus == c.n_kraus
        for u, v in zip(back.kraus, c.kraus):
            np.testing.assert_array_equal(u, v)

    @pytest.mark.parametrize("doc, n_kraus", [
        ({"generator": "dephasing", "params": {"dim": 3}}, 3),
        ({"generator": "mix_with_pure", "params": {"dim": 2, "p": 0.5}}, 3),
        ({"generator": "example1_pinching", "params": {"alpha": 0.5, "n": 8}}, 8),
        ({"generator": "depolarizing", "params": {"dim": 2}}, 5),
    ])
    def test_channel_generators(self, doc, n_kraus):
        c = io.parse_channel({"type": "channel", **doc})
        assert ch.validate(c).passed
        assert ch.choi_rank(c) <= c.n_kraus

    def test_hamiltonians(self):
        h = io.parse_hamiltonian({"type": "hamiltonian", "kind": "oscillator", "hbar_omega": [1, 2]})
        assert h.kind == "oscillator"
        h = io.parse_hamiltonian({"type": "hamiltonian", "kind": "explicit", "levels": [0, 1]})
        assert h.kind == "explicit"

    @pytest.mark.parametrize("doc", [
        {"type": "state", "version": "v2", "diag": [1]},
        {"type": "channel", "diag": [1]},
        {"type": "state"},
        {"type": "state", "matrix": [[1, 0]]},
        {"type": "state", "matrix": [[1, 0], [0]]},
        {"type": "state", "diag": [True]},
        {"type": "state", "dim": 3, "diag": [1]},
    ])
    def test_state_errors(self, doc):
        with pytest.raises(ParseError):
            io.parse_state(doc)

    @pytest.mark.parametrize("doc", [
        {"type": "channel"},
        {"type": "channel", "generator": "amplitude_damping", "params": {}},
        {"type": "channel", "generator": "dephasing", "params": {}},
        {"type": "channel", "kraus": [[[2, 0], [0, 2]]]},
        {"type": "channel", "input_dim": 3, "kraus": [[[1, 0], [0, 1]]]},
        {"type": "hamiltonian", "kind": "oscillator"},
    ])
    def test_channel_errors(self, doc):
        with pytest.raises(ParseError):
            io.parse_channel(doc)

    def test_hamiltonian_errors(self):
        with pytest.raises(ParseError):
            io.parse_hamiltonian({"type": "hamiltonian", "kind": "ladder"})
        with pytest.raises(ParseError):
            io.parse_hamiltonian({"type": "hamiltonian", "kind": "explicit", "levels": [2, 1]})

    def test_bad_json(self, tmp_path):
        p = tmp_path / "x.json"
        p.write_text("{nope")
        with pytest.raises(ParseError):
            io.load_document(str(p))
        with pytest.raises(ParseError):
            io.load_document(str(tmp_path / "missing.json"))
        with pytest.raises(ParseError):
            io.load_document({"version": "v9"})
        p.write_text("[1, 2]")
        with pytest.raises(ParseError):
            io.load_document(str(p))


class TestEmission:
    @pytest.mark.parametrize("x", [0.1, 1 / 3, math.pi * 1e-300, 2.0 ** 60, -0.0])
    def test_floats_roundtrip(self, x):
        assert float(io.format_float(x)) == x

    def test_special_floats(self):
        assert io.format_float(math.inf) == '"inf"'
        assert io.format_float(math.nan) == '"nan"'
        assert json.loads(io.dumps({"a": math.inf})) == {"a": "inf"}

    def test_dumps_is_valid_json(self):
        obj = {"a": [1, 2.5, {"b": None}], "c": np.float64(0.1), "d": np.arange(3), "e": True}
        assert json.loads(io.dumps(obj)) == {"a": [1, 2.5, {"b": None}], "c": 0.1,
                                             "d": [0, 1, 2], "e": True}

    def test_csv_and_table(self):
        rows = [{"x": 0.5, "y": "a"}, {"x": 1.0, "y": "b,c"}]
        assert io.to_csv(rows, ["x", "y"]) == 'x,y\n0.5,a\n1,"b,c"\n'
        lines = io.to_table(rows, ["x", "y"]).splitlines()
        assert lines[0].startswith("x") and len(lines) == 4


class TestCLI:
    def test_entropy(self, files, capsys):
        f = files("s.json", {"type": "state", "diag": [0.5, 0.25, 0.25]})
        code, out, _ = run(["entropy", f, "--bits"], capsys)
        assert code == 0
        assert json.loads(out)["entropy_bits"] == pytest.approx(1.5)

    def test_entropy_csv(self, files, capsys):
        f = files("s.json", {"type": "state", "diag": [0.5, 0.5]})
        code, out, _ = run(["entropy", f, "--format", "csv"], capsys)
        header, row = out.strip().splitlines()
        assert header == "entropy_nats" and float(row) == pytest.approx(LN2)

    def test_channel_info(self, files, capsys):
        f = files("c.json", {"type": "channel", "generator": "dephasing", "params": {"dim": 3}})
        code, out, _ = run(["channel", "info", f], capsys)
        res = json.loads(out)
        assert code == 0 and res["choi_rank"] == 3 and res["validation"]["passed"]
        assert res["pure_output_entropy_sup"]["upper"] == pytest.approx(math.log(3))

    def test_channel_info_table(self, files, capsys):
        f = files("c.json", {"type": "channel", "generator": "dephasing", "params": {"dim": 2}})
        code, out, _ = run(["channel", "info", f, "--format", "table"], capsys)
        assert code == 0 and "validation.passed" in out.splitlines()[0]

    def test_gibbs(self, files, capsys):
        f = files("h.json", {"type": "hamiltonian", "kind": "oscillator", "hbar_omega": [1.0]})
        code, out, _ = run(["gibbs", "--spec", f, "--energy", "1.5", "--populations"], capsys)
        res = json.loads(out)
        assert res["lambda"] == pytest.approx(LN2) and res["F_H"] == pytest.approx(2 * LN2)
        assert res["populations"][0] == pytest.approx(0.5)

    def test_bounds(self, files, capsys):
        assert json.loads(run(["bound", "audenaert", "--dim", "2", "--eps", "0.5"], capsys)[1])["value"] \
            == pytest.approx(LN2)
        assert json.loads(run(["bound", "afw", "--range", "0", "--eps", "1"], capsys)[1])["value"] \
            == pytest.approx(2 * LN2)
        h = files("h.json", {"type": "hamiltonian", "kind": "oscillator", "hbar_omega": [1.0]})
        code, out, _ = run(["bound", "theorem2", "--spec", h, "--envelope", "oscillator",
                            "--eps", "0.1", "--E", "1.5", "--t", "0.5"], capsys)
        res = json.loads(out)
        assert code == 0 and res["value"] == pytest.approx(3.3488386051107266, rel=1e-12)
        assert res["Hp_max_source"] == "identity"

    def test_bound_with_channel(self, files, capsys):
        c = files("c.json", {"type": "channel", "generator": "mix_with_pure", "params": {"dim": 3, "p": 0.3}})
        code, out, _ = run(["bound", "corollary5", "--modes", "1", "--omega", "1", "--eps", "0.1",
                            "--E", "1.5", "--t", "0.5", "--chan", c, "--hp-upper", str(LN2)], capsys)
        res = json.loads(out)
        assert code == 0 and res["Hp_max_upper"] == pytest.approx(LN2)
        assert res["delta"] == pytest.approx(2 * LN2 + math.exp(-1))

    def test_roof(self, files, capsys):
        bell = np.zeros((4, 4))
        bell[np.ix_([0, 3], [0, 3])] = 0.5
        s = files("s.json", io.state_document(bell))
        c = files("c.json", io.channel_document(ch.partial_trace_channel(2, 2)))
        code, out, _ = run(["roof", "--chan", c, "--state", s], capsys)
        assert code == 0 and json.loads(out)["value"] == pytest.approx(LN2)

    def test_error_exit(self, files, capsys):
        code, _, err = run(["bound", "audenaert", "--dim", "2", "--eps", "0.9"], capsys)
        assert code == 2 and err.startswith("error:")
        code, _, _ = run(["entropy", "/nonexistent.json"], capsys)
        assert code == 2

    def test_verify_exit_codes(self, capsys, monkeypatch):
        code, out, _ = run(["verify", "--suite", "core", "--samples", "5"], capsys)
        assert code == 0 and json.loads(out)["passed"]
        monkeypatch.setenv("QCENT_TOL", "1e-300")
        code, out, _ = run(["verify", "--suite", "core", "--samples", "5"], capsys)
        assert code == 1 and not json.loads(out)["passed"]

    def test_console_script_deterministic(self):
        cmd = [sys.executable, "-m", "qcent.cli", "verify", "--suite", "energy", "--seed", "3",
               "--samples", "10"]
        env = {k: v for k, v in os.environ.items() if k != "QCENT_TOL"}
        a = subprocess.run(cmd, capture_output=True, env=env, check=True).stdout
        b = subprocess.run(cmd, capture_output=True, env=env, check=True).stdout
        assert a == b and a.endswith(b"}\n")
