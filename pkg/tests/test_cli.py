import csv
import io

import pytest

from closeness.cli import main
from closeness.distributions import DiscreteDistribution, RngStream, sample_categorical, write_samples
from closeness.tester import TestParams, make_plan


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    return {row[0]: row[1:] for row in csv.reader(io.StringIO(text))}


@pytest.fixture
def uniform_files(tmp_path):
    plan = make_plan(TestParams(100, 0.5, 0.1))
    u = DiscreteDistribution.uniform(100)
    paths = []
    for side in range(2):
        path = tmp_path / f"s{side}.txt"
        write_samples(path, sample_categorical(u, plan.samples_per_side, RngStream(12, side)))
        paths.append(str(path))
    return paths


class TestGapCommand:
    def test_bound(self, capsys):
        code, out, _ = run(capsys, "gap", "bound", "--binomial", "-n", "16", "-p", "0", "-q", "0.03125", "--csv")
        row = csv_rows(out)["16"]
        assert code == 0
        assert float(row[2]) == pytest.approx(0.0088388, abs=1e-7)
        assert row[3] == "CltRegime"

    def test_binomial_exact(self, capsys):
        code, out, _ = run(capsys, "gap", "binomial-exact", "-n", "1", "-p", "0", "-q", "0.25", "--csv")
        assert code == 0 and float(csv_rows(out)["1"][2]) == pytest.approx(0.125)

    def test_grid_product(self, capsys):
        _, out, _ = run(capsys, "gap", "bound", "--poisson", "--mu", "0", "1", "--lambda", "1", "2", "--csv")
        assert len(out.strip().splitlines()) == 1 + 4

    def test_zolotarev_matches_exact(self, capsys):
        _, z, _ = run(capsys, "gap", "zolotarev", "--poisson", "--mu", "2", "--lambda", "5", "--csv")
        _, e, _ = run(capsys, "gap", "poisson-exact", "--mu", "2", "--lambda", "5", "--csv")
        assert float(z.splitlines()[1].split(",")[2]) == pytest.approx(float(e.splitlines()[1].split(",")[2]), abs=1e-6)

    def test_missing_parameter(self, capsys):
        code, _, err = run(capsys, "gap", "bound", "--binomial", "-n", "16", "-p", "0.1")
        assert code == 2 and "-q" in err

    def test_domain_error(self, capsys):
        code, _, err = run(capsys, "gap", "bound", "--binomial", "-n", "8", "-p", "0", "-q", "0.1")
        assert code == 2 and "error" in err


class TestSampleSizeCommand:
    def test_dominant_branch(self, capsys):
        code, out, _ = run(capsys, "samplesize", "-k", "1000000", "--epsilon", "0.5", "--delta", "0.5", "--csv")
        rows = csv_rows(out)
        assert code == 0 and rows["k23_term"][1] == "dominant"

    def test_log_branch(self, capsys):
        _, out, _ = run(capsys, "samplesize", "-k", "10", "--epsilon", "0.01", "--delta", "1e-6", "--csv")
        assert csv_rows(out)["log_term"][1] == "dominant"

    def test_halving_epsilon_increases_n(self, capsys):
        _, a, _ = run(capsys, "samplesize", "-k", "50", "--epsilon", "0.4", "--delta", "0.1", "--csv")
        _, b, _ = run(capsys, "samplesize", "-k", "50", "--epsilon", "0.2", "--delta", "0.1", "--csv")
        assert int(csv_rows(b)["n"][0]) > int(csv_rows(a)["n"][0])


class TestTestCommand:
    def test_uniform_files_equal(self, capsys, uniform_files):
        code, out, _ = run(capsys, "test", "--p-samples", uniform_files[0], "--q-samples", uniform_files[1],
                           "-k", "100", "--epsilon", "0.5", "--delta", "0.1", "--csv")
        assert code == 0 and csv_rows(out)["decision"] == ["Equal"]

    def test_far_files(self, capsys, tmp_path):
        plan = make_plan(TestParams(4, 0.5, 0.1))
        paths = []
        for side, symbol in enumerate((1, 3)):
            path = tmp_path / f"f{side}.txt"
            path.write_text("\n".join([str(symbol)] * plan.samples_per_side))
            paths.append(str(path))
        code, out, _ = run(capsys, "test", "--p-samples", paths[0], "--q-samples", paths[1],
                           "-k", "4", "--epsilon", "0.5", "--delta", "0.1")
        assert code == 1 and "Far" in out

    def test_malformed_line(self, capsys, tmp_path, uniform_files):
        bad = tmp_path / "bad.txt"
        bad.write_text("1\n2\nabc\n")
        code, _, err = run(capsys, "test", "--p-samples", str(bad), "--q-samples", uniform_files[1],
                           "-k", "100", "--epsilon", "0.5", "--delta", "0.1")
        assert code == 2 and ":3:" in err

    def test_symbol_above_k(self, capsys, uniform_files):
        code, _, err = run(capsys, "test", "--p-samples", uniform_files[0], "--q-samples", uniform_files[1],
                           "-k", "50", "--epsilon", "0.5", "--delta", "0.1")
        assert code == 2

    def test_insufficient_samples(self, capsys, tmp_path, uniform_files):
        short = tmp_path / "short.txt"
        short.write_text("1\n2\n")
        plan = make_plan(TestParams(100, 0.5, 0.1))
        code, _, err = run(capsys, "test", "--p-samples", str(short), "--q-samples", uniform_files[1],
                           "-k", "100", "--epsilon", "0.5", "--delta", "0.1")
        assert code == 2 and str(plan.samples_per_side) in err

    def test_seed_from_environment(self, capsys, monkeypatch, uniform_files):
        args = ("test", "--p-samples", uniform_files[0], "--q-samples", uniform_files[1],
                "-k", "100", "--epsilon", "0.5", "--delta", "0.1", "--csv")
        monkeypatch.setenv("CLOSENESS_SEED", "3")
        _, env_out, _ = run(capsys, *args)
        _, flag_out, _ = run(capsys, *args, "--seed", "3")
        assert env_out == flag_out


class TestSimulateCommand:
    def test_key_value_null(self, capsys, tmp_path):
        out_path = tmp_path / "trials.csv"
        code, out, _ = run(capsys, "simulate", "--null", "k=10", "eps=0.5", "delta=0.1", "trials=20",
                           "--out", str(out_path), "--csv")
        rows = csv_rows(out)
        assert code == 0
        assert rows["hypothesis"] == ["null"] and rows["error_rate_check"] == ["pass"]
        assert len(out_path.read_text().splitlines()) == 21

    def test_alternative(self, capsys):
        code, out, _ = run(capsys, "simulate", "--alt", "-k", "10", "--epsilon", "0.5", "--delta", "0.1",
                           "--tv", "0.5", "--trials", "10", "--csv")
        assert code == 0 and float(csv_rows(out)["far_rate"][0]) == 1.0

    def test_needs_hypothesis(self, capsys):
        code, _, err = run(capsys, "simulate", "-k", "10", "--epsilon", "0.5", "--delta", "0.1")
        assert code == 2


class TestVerifyCommand:
    def test_single_check(self, capsys):
        code, out, _ = run(capsys, "verify", "--check", "claim")
        assert code == 0 and "0 violations" in out

    @pytest.mark.slow
    def test_all(self, capsys, tmp_path):
        code, out, _ = run(capsys, "verify", "--all", "--out", str(tmp_path / "grid.csv"))
        assert code == 0 and out.strip().endswith("0 violations")
