"""End-to-end tests of the command-line interface."""

import json

import pytest

from timeloom.cli import main
from timeloom.core import frob_distance, read_matrix


def run(*argv):
    return main(list(argv))


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


class TestPipeline:
    @pytest.mark.parametrize("method,m", [("elimination", 3), ("cs", 3)])
    def test_decompose_schedule_simulate(self, workdir, capsys, method, m):
        assert run("random", "--dim", "12", "--seed", "5", "-o", "u.mat") == 0
        assert run("decompose", "--method", method, "--m", str(m),
                   "-i", "u.mat", "-o", "plan.json") == 0
        out = capsys.readouterr().out
        assert "reconstruction_error" in out
        assert run("schedule", "-i", "plan.json", "-o", "sched.json") == 0
        assert run("simulate", "-i", "sched.json", "--plan", "plan.json") == 0
        out = capsys.readouterr().out
        assert "distance" in out

    def test_simulate_against_original_input(self, workdir, capsys):
        # full file round trip back to the source matrix (no padding case)
        assert run("random", "--dim", "13", "--seed", "8", "-o", "u.mat") == 0
        assert run("decompose", "--method", "elimination", "--m", "5",
                   "-i", "u.mat", "-o", "p.json") == 0
        assert run("schedule", "-i", "p.json", "-o", "s.json") == 0
        assert run("simulate", "-i", "s.json", "--reference", "u.mat") == 0

    def test_simulate_reference_with_padding(self, workdir):
        # 6 modes at block size 4 pads to 7; the reference is embedded
        assert run("random", "--dim", "6", "--seed", "2", "-o", "u.mat") == 0
        assert run("decompose", "--method", "elimination", "--m", "4",
                   "-i", "u.mat", "-o", "p.json") == 0
        assert run("schedule", "-i", "p.json", "-o", "s.json") == 0
        assert run("simulate", "-i", "s.json", "--reference", "u.mat") == 0

    def test_simulate_identity_schedule_defaults_to_identity(self, workdir, capsys):
        (workdir / "i.mat").write_text(
            "dim 3\n"
            "1.0+0.0i 0.0+0.0i 0.0+0.0i\n"
            "0.0+0.0i 1.0+0.0i 0.0+0.0i\n"
            "0.0+0.0i 0.0+0.0i 1.0+0.0i\n")
        run("decompose", "--method", "elimination", "--m", "3",
            "-i", "i.mat", "-o", "p.json")
        run("schedule", "-i", "p.json", "-o", "s.json")
        capsys.readouterr()
        assert run("simulate", "-i", "s.json") == 0
        assert "distance=0.000e+00" in capsys.readouterr().out

    def test_reuse_schedule(self, workdir):
        assert run("random", "--dim", "9", "--seed", "1", "-o", "u.mat") == 0
        assert run("decompose", "--method", "cs", "--m", "3",
                   "-i", "u.mat", "-o", "p.json") == 0
        assert run("schedule", "-i", "p.json", "-o", "s.json", "--reuse") == 0
        assert run("simulate", "-i", "s.json", "--plan", "p.json") == 0

    def test_reuse_rejected_for_elimination(self, workdir, capsys):
        run("random", "--dim", "7", "--seed", "1", "-o", "u.mat")
        run("decompose", "--method", "elimination", "--m", "3",
            "-i", "u.mat", "-o", "p.json")
        assert run("schedule", "-i", "p.json", "-o", "s.json", "--reuse") == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "usage"

    def test_reconstruct_round_trip(self, workdir):
        run("random", "--dim", "7", "--seed", "9", "-o", "u.mat")
        run("decompose", "--method", "elimination", "--m", "3",
            "-i", "u.mat", "-o", "p.json")
        assert run("reconstruct", "-i", "p.json", "-o", "r.mat") == 0
        u = read_matrix((workdir / "u.mat").read_text())
        r = read_matrix((workdir / "r.mat").read_text())
        assert frob_distance(u.data, r.data) < 1e-10

    def test_deterministic_artifacts(self, workdir):
        for tag in ("a", "b"):
            run("random", "--dim", "7", "--seed", "3", "-o", f"u{tag}.mat")
            run("decompose", "--method", "cs", "--m", "3",
                "-i", f"u{tag}.mat", "-o", f"p{tag}.json")
            run("schedule", "-i", f"p{tag}.json", "-o", f"s{tag}.json")
        assert (workdir / "ua.mat").read_bytes() == (workdir / "ub.mat").read_bytes()
        assert (workdir / "pa.json").read_bytes() == (workdir / "pb.json").read_bytes()
        assert (workdir / "sa.json").read_bytes() == (workdir / "sb.json").read_bytes()


class TestCounts:
    def test_formula_counts(self, workdir, capsys):
        assert run("counts", "--n", "7", "--m", "3") == 0
        out = capsys.readouterr().out
        assert "universal-block beam splitters: 3" in out
        assert "residual-block tunable beam splitters: 1" in out

    def test_schedule_inventory(self, workdir, capsys):
        run("random", "--dim", "7", "--seed", "2", "-o", "u.mat")
        run("decompose", "--method", "elimination", "--m", "3",
            "-i", "u.mat", "-o", "p.json")
        run("schedule", "-i", "p.json", "-o", "s.json")
        capsys.readouterr()
        assert run("counts", "-i", "s.json") == 0
        out = capsys.readouterr().out
        assert "device V" in out and "device W" in out

    def test_usage_error(self, workdir, capsys):
        assert run("counts") == 2
        assert json.loads(capsys.readouterr().err)["error"] == "usage"


class TestLossCommand:
    def test_fig4_csv_and_plot(self, workdir, capsys):
        assert run("loss", "--fig4", "--n-max", "100", "-o", "loss.csv",
                   "--plot", "loss.png") == 0
        text = (workdir / "loss.csv").read_text()
        assert text.startswith("N,M,log10_ratio_exact,log10_ratio_approx")
        assert (workdir / "loss.png").stat().st_size > 1000

    def test_custom_params(self, workdir):
        assert run("loss", "--eta-sc", "0.9", "--eta-c", "0.8",
                   "--n-max", "30", "--m-set", "2,3", "-o", "loss.csv") == 0
        rows = [r for r in (workdir / "loss.csv").read_text().splitlines()
                if r and not r.startswith(("#", "N,"))]
        assert all(int(r.split(",")[1]) in (2, 3) for r in rows)


class TestErrors:
    def test_malformed_matrix(self, workdir, capsys):
        (workdir / "bad.mat").write_text("dim 2\n1.0+0.0i\n")
        assert run("decompose", "--method", "cs", "--m", "2",
                   "-i", "bad.mat", "-o", "p.json") == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "parse"

    def test_non_unitary_rejected_and_bypassed(self, workdir, capsys):
        (workdir / "nu.mat").write_text(
            "dim 2\n1.0+0.0i 1.0+0.0i\n0.0+0.0i 1.0+0.0i\n")
        assert run("decompose", "--method", "cs", "--m", "1",
                   "-i", "nu.mat", "-o", "p.json") == 1
        capsys.readouterr()
        # --no-check forwards the raw matrix; the decomposition itself
        # still rejects it
        assert run("decompose", "--method", "cs", "--m", "1", "--no-check",
                   "-i", "nu.mat", "-o", "p.json") == 1

    def test_missing_file(self, workdir, capsys):
        assert run("decompose", "--method", "cs", "--m", "2",
                   "-i", "nope.mat", "-o", "p.json") == 2
        assert json.loads(capsys.readouterr().err)["error"] == "io"

    def test_tolerance_env_override(self, workdir, capsys, monkeypatch):
        run("random", "--dim", "7", "--seed", "4", "-o", "u.mat")
        monkeypatch.setenv("TIMELOOM_TOLERANCE", "1e-30")
        assert run("decompose", "--method", "elimination", "--m", "3",
                   "-i", "u.mat", "-o", "p.json") == 1
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "reconstruction"
