from bergkern.main import app
from bergkern.models.moment_table import MomentTableRecord
from bergkern.models.report import VerificationReport
from bergkern.runner import EXIT_CONFIG, EXIT_FAILED, EXIT_INCONCLUSIVE, EXIT_OK, exit_code
from bergkern.services.files import read_csv
from typer.testing import CliRunner
import io
import json
import math
import pytest

runner = CliRunner(mix_stderr=False)


def _lines(result):
    return [json.loads(line) for line in result.stdout.splitlines() if line.strip()]


def _report(status):
    return VerificationReport.build("x", {}, 0.0, 0.0 if status != "failed" else 1.0, 1e-6, "absolute", 1,
                                    inconclusive=status == "inconclusive")


def _record(result):
    (line,) = [line for line in result.stdout.splitlines() if line.strip()]
    return MomentTableRecord.model_validate_json(line)


def _by_method(record, method):
    return {tuple(e.alpha): e for e in record.entries if e.method == method}


class TestMoments:
    def test_gaussian_table(self):
        result = runner.invoke(
            app, ["moments", "--family", "cn", "--params", "n=1", "--params", "mu1=1", "--params", "mu2=2", "--degree", "2"]
        )
        assert result.exit_code == EXIT_OK, result.stderr
        record = _record(result)
        assert record.weight["kind"] == "exp_power"
        closed = _by_method(record, "closed_form")
        quadrature = _by_method(record, "quadrature")
        assert sorted(closed) == sorted(quadrature) == [(0,), (1,), (2,)]
        for alpha, expected in zip([(0,), (1,), (2,)], [math.pi, math.pi, 2 * math.pi]):
            assert math.exp(closed[alpha].log_value) == pytest.approx(expected, rel=1e-13)
            assert math.exp(quadrature[alpha].log_value) == pytest.approx(expected, rel=1e-8)
            assert quadrature[alpha].converged
        assert [tuple(a.alpha) for a in record.agreement] == [(0,), (1,), (2,)]
        assert all(a.agrees for a in record.agreement)
        assert not record.errors

    def test_json_keys(self):
        result = runner.invoke(app, ["moments", "--family", "disc", "--degree", "1"])
        assert result.exit_code == EXIT_OK
        (raw,) = _lines(result)
        assert set(raw) >= {"weight", "shadow", "entries", "agreement", "errors"}
        entry = raw["entries"][0]
        assert set(entry) >= {"alpha", "log_value", "method", "abs_error_estimate", "rel_tol", "converged"}
        assert set(raw["agreement"][0]) >= {"alpha", "rel_discrepancy", "tolerance", "agrees"}

    def test_disc_table(self):
        result = runner.invoke(app, ["moments", "--family", "disc", "--degree", "3"])
        assert result.exit_code == EXIT_OK
        closed = _by_method(_record(result), "closed_form")
        for k in range(4):
            assert math.exp(closed[(k,)].log_value) == pytest.approx(math.pi / (k + 1), rel=1e-13)

    def test_csv(self, tmp_path):
        out = tmp_path / "moments.csv"
        result = runner.invoke(app, ["moments", "--family", "fock", "--degree", "1", "--format", "csv", "--out", str(out)])
        assert result.exit_code == EXIT_OK
        with out.open(encoding="utf-8") as handle:
            schema, rows = read_csv(handle)
        assert schema == "bergkern.moments.v1"
        # two indices, one row per method
        assert [(r["alpha"], r["method"]) for r in rows] == [
            ("[0]", "closed_form"), ("[0]", "quadrature"), ("[1]", "closed_form"), ("[1]", "quadrature"),
        ]
        assert rows[1]["agrees"] == "true"
        assert rows[0]["agrees"] == ""

    def test_custom_weight(self, tmp_path):
        path = tmp_path / "weight.json"
        path.write_text(
            json.dumps({"weight": "bergkern.models.weights:unit_weight", "arity": 1, "bounds": [1.0]}), encoding="utf-8"
        )
        result = runner.invoke(app, ["moments", "--weight-file", str(path), "--degree", "1"])
        assert result.exit_code == EXIT_OK, result.stderr
        record = _record(result)
        assert record.shadow["kind"] == "custom"
        assert {e.method for e in record.entries} == {"quadrature"}
        assert not record.agreement
        quadrature = _by_method(record, "quadrature")
        assert math.exp(quadrature[(0,)].log_value) == pytest.approx(math.pi, rel=1e-5)
        assert math.exp(quadrature[(1,)].log_value) == pytest.approx(math.pi / 2, rel=1e-5)

    def test_alias_conflict_is_a_config_error(self):
        result = runner.invoke(app, ["moments", "--family", "fock", "--params", "mu2=3"])
        assert result.exit_code == EXIT_CONFIG
        assert not result.stdout.strip()

    def test_config_file_wins(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"degree": 1}), encoding="utf-8")
        result = runner.invoke(app, ["moments", "--family", "disc", "--degree", "3", "--config", str(path)])
        assert result.exit_code == EXIT_OK
        assert {tuple(e.alpha) for e in _record(result).entries} == {(0,), (1,)}


class TestEval:
    def test_fock(self):
        result = runner.invoke(app, ["eval", "--family", "fock", "--pair", "0.5,0 0.5,0"])
        assert result.exit_code == EXIT_OK
        (row,) = _lines(result)
        assert row["closed_re"] == pytest.approx(0.408718, abs=1e-6)
        assert row["series_re"] == pytest.approx(row["closed_re"], rel=1e-11)
        assert row["rel_discrepancy"] < 1e-11

    def test_veta_origin(self, tmp_path):
        points = tmp_path / "points.txt"
        points.write_text("0 0 0  0 0 0\n0.1 0 0.2  0 0.1,0.1 0\n", encoding="utf-8")
        result = runner.invoke(
            app, ["eval", "--family", "veta", "--params", "eta=1", "--points", str(points), "--format", "csv"]
        )
        assert result.exit_code == EXIT_OK, result.stderr
        schema, rows = read_csv(io.StringIO(result.stdout))
        assert schema == "bergkern.eval.v1"
        first = rows[0]
        assert float(first["closed_re"]) == pytest.approx(2 / math.pi ** 3, rel=1e-14)

    def test_exterior_pair_is_recorded(self):
        result = runner.invoke(app, ["eval", "--family", "disc", "--pair", "1.5,0 0,0", "--pair", "0.1 0.2"])
        assert result.exit_code == EXIT_OK
        bad, good = _lines(result)
        assert "DomainError" in bad["error"]
        assert "error" not in good

    @pytest.mark.parametrize(
        "args",
        [
            ["eval", "--family", "fock", "--params", "n"],
            ["eval", "--family", "ellipsoid", "--pair", "0 0"],
            ["eval", "--family", "fock", "--pair", "0 0 0"],
            ["eval", "--family", "fock"],
            ["eval", "--family", "cn", "--params", "mu1=-1", "--pair", "0 0"],
        ],
    )
    def test_configuration_errors(self, args):
        result = runner.invoke(app, args)
        assert result.exit_code == EXIT_CONFIG


class TestVerify:
    def test_cross_validate(self):
        result = runner.invoke(app, ["verify", "--family", "fock", "--num-points", "3", "--seed", "1"])
        assert result.exit_code == EXIT_OK, result.stderr
        reports = _lines(result)
        assert len(reports) == 3
        assert {r["check_name"] for r in reports} == {"cross_validate"}

    def test_orthogonality(self):
        result = runner.invoke(app, ["verify", "--family", "disc", "--suite", "orthogonality", "--degree", "2"])
        assert result.exit_code == EXIT_OK, result.stderr
        assert len(_lines(result)) == 6

    def test_monte_carlo_is_reproducible(self):
        args = [
            "verify", "--family", "disc", "--suite", "orthogonality", "--scheme", "mc", "--samples", "20000",
            "--seed", "5", "--degree", "1",
        ]
        first = runner.invoke(app, args)
        second = runner.invoke(app, args)
        assert first.stdout == second.stdout
        assert all(r["rng_seed"] == 5 for r in _lines(first))

    def test_monte_carlo_needs_seed(self):
        result = runner.invoke(app, ["verify", "--family", "disc", "--suite", "orthogonality", "--scheme", "mc"])
        assert result.exit_code == EXIT_CONFIG

    def test_reproducing_on_veta(self):
        result = runner.invoke(
            app, ["verify", "--family", "veta", "--suite", "reproducing", "--degree", "1", "--seed", "1"]
        )
        assert result.exit_code in (EXIT_OK, EXIT_FAILED), result.stderr
        reports = _lines(result)
        # two anchor points, seven polynomials of degree <= 1
        assert len(reports) == 14
        assert all(r["check_name"] == "reproducing" for r in reports)
        assert all(r["samples_or_nodes"] <= 2 * 64 ** 3 for r in reports)

    def test_veta_series_needs_veta(self):
        result = runner.invoke(app, ["verify", "--family", "disc", "--suite", "veta_series"])
        assert result.exit_code == EXIT_CONFIG

    def test_gram(self):
        result = runner.invoke(app, ["verify", "--family", "dnm", "--suite", "gram", "--seed", "3"])
        assert result.exit_code == EXIT_OK, result.stderr
        assert [r["target"]["kernel"] for r in _lines(result)] == ["closed", "series"]


def test_compare():
    result = runner.invoke(app, ["compare", "--family", "disc", "--degree", "3"])
    assert result.exit_code == EXIT_OK, result.stderr
    reports = _lines(result)
    assert len(reports) == 4
    assert all(r["check_name"] == "moment_compare" for r in reports)


@pytest.mark.parametrize(
    "statuses, expected",
    [
        ([], EXIT_OK),
        (["passed", "passed"], EXIT_OK),
        (["passed", "inconclusive"], EXIT_INCONCLUSIVE),
        (["inconclusive", "failed"], EXIT_FAILED),
    ],
)
def test_exit_code(statuses, expected):
    assert exit_code([_report(s) for s in statuses]) == expected


def test_error_records_count_as_failures():
    assert exit_code([_report("passed"), {"check_name": "reproducing", "status": "error"}]) == EXIT_FAILED
