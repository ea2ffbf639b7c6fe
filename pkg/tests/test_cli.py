"""Command line interface: config resolution, formats, artifacts, exit codes."""
import csv
import json
import math

import pytest

from amcengine import PricingResult, kernels
from amcengine.cli import (
    KEYS,
    TABLE_CSV_COLUMNS,
    emit_result,
    main,
    parse_config,
)


@pytest.fixture(autouse=True)
def _no_env_seed(monkeypatch):
    monkeypatch.delenv("AMC_SEED", raising=False)


class TestConfigResolution:
    def test_defaults_are_the_benchmark_setup(self):
        cfg = parse_config(["price-parallel"])
        assert cfg.spot == 36.0
        assert cfg.strike == 40.0
        assert cfg.rate == 0.06
        assert cfg.vol == 0.2
        assert cfg.maturity == 1.0
        assert cfg.dates_per_year == 50
        assert cfg.paths == 100_000
        assert cfg.iterations == 100
        assert cfg.group_size == 10
        assert (cfg.lam, cfg.mu, cfg.nu) == (2.0, 2.0, 0.99)
        assert cfg.beta is None
        assert cfg.boundary_weights is True
        assert cfg.seed == 0
        assert cfg.format == "text"

    def test_flags_override_defaults(self):
        cfg = parse_config(["price-parallel", "--spot=38", "--paths=2000", "--iterations=4"])
        assert cfg.spot == 38.0
        assert cfg.paths == 2_000
        assert cfg.iterations == 4

    def test_file_then_flags_then_env(self, tmp_path, monkeypatch):
        conf = tmp_path / "run.conf"
        conf.write_text(
            "# benchmark tweak\n"
            "spot = 38.0\n"
            "seed = 7\n"
            "paths = 4000\n"
            "iterations = 4\n"
        )
        cfg = parse_config(["price-parallel", "--config", str(conf), "--seed=9"])
        assert cfg.spot == 38.0  # from file
        assert cfg.seed == 9  # flag beats file
        monkeypatch.setenv("AMC_SEED", "11")
        cfg = parse_config(["price-parallel", "--config", str(conf), "--seed=9"])
        assert cfg.seed == 11  # environment beats both
        assert cfg.paths == 4_000

    def test_bad_env_seed_is_config_error(self, monkeypatch, capsys):
        monkeypatch.setenv("AMC_SEED", "twelve")
        assert main(["price-european"]) == 2
        assert "AMC_SEED" in capsys.readouterr().err

    def test_unknown_file_key_names_the_key(self, tmp_path, capsys):
        conf = tmp_path / "run.conf"
        conf.write_text("spott = 38\n")
        assert main(["price-european", "--config", str(conf)]) == 2
        assert "spott" in capsys.readouterr().err

    def test_malformed_file_line_reports_location(self, tmp_path, capsys):
        conf = tmp_path / "run.conf"
        conf.write_text("spot 38\n")
        assert main(["price-european", "--config", str(conf)]) == 2
        err = capsys.readouterr().err
        assert "run.conf" in err and "1" in err

    def test_optional_floats_parse_auto(self):
        cfg = parse_config(["price-parallel", "--beta=auto", "--fd_smax=none"])
        assert cfg.beta is None
        assert cfg.fd_smax is None
        cfg = parse_config(["price-parallel", "--beta=5.5"])
        assert cfg.beta == 5.5

    def test_bool_and_points_parsing(self):
        cfg = parse_config(
            ["converge", "--boundary_weights=false", "--points=1000,2000,4000", "--iterations=4"]
        )
        assert cfg.boundary_weights is False
        assert cfg.points == (1_000, 2_000, 4_000)

    def test_every_key_has_help_and_default(self):
        for key, spec in KEYS.items():
            assert spec.help
            assert " " not in key


class TestValidation:
    def test_divisibility_error_names_config_keys(self, capsys):
        assert main(["price-parallel", "--paths=1000", "--iterations=7"]) == 2
        err = capsys.readouterr().err
        assert "paths" in err and "iterations" in err

    def test_lsm_ignores_iteration_divisibility(self):
        cfg = parse_config(["price-lsm", "--paths=1000", "--iterations=7"])
        assert cfg.paths == 1_000

    def test_converge_points_divisibility(self, capsys):
        assert main(["converge", "--points=1000,2000,4001", "--iterations=4"]) == 2
        assert "points" in capsys.readouterr().err

    def test_warm_bootstrap_requires_file(self, capsys):
        assert main(["price-parallel", "--bootstrap=warm"]) == 2
        assert "warm_start" in capsys.readouterr().err

    def test_enum_keys_rejected_with_key_name(self, capsys):
        for argv, key in [
            (["price-parallel", "--bootstrap=zeros"], "bootstrap"),
            (["price-fd", "--fd_method=explicit"], "fd_method"),
            (["price-fd", "--fd_exercise=asian"], "fd_exercise"),
            (["converge", "--axis=strikes"], "axis"),
            (["price-european", "--format=yaml"], "format"),
            (["converge", "--repeats=0"], "repeats"),
        ]:
            assert main(argv) == 2
            assert key in capsys.readouterr().err

    def test_market_field_errors_carry_field_name(self, capsys):
        assert main(["price-european", "--spot=-3"]) == 2
        assert "spot" in capsys.readouterr().err
        assert main(["price-parallel", "--lam=3", "--mu=-1"]) == 2
        assert "mu" in capsys.readouterr().err


class TestEmitResult:
    def _result(self):
        return PricingResult(
            engine="parallel",
            price=4.4671234,
            standard_error=0.0091,
            n_paths=100_000,
            wall_ms={"total": 1234.5},
            config={"spot": 36.0},
        )

    def test_text_uses_desk_convention(self):
        text = emit_result(self._result(), "text")
        assert "price: 4.467 (.009)" in text
        assert "95% CI: +-0.0178" in text
        assert "paths: 100000" in text

    def test_text_without_error_bar(self):
        result = self._result()
        result.standard_error = 0.0
        text = emit_result(result, "text")
        assert "price: 4.467\n" in text
        assert "CI" not in text

    def test_csv_shape(self):
        lines = emit_result(self._result(), "csv").strip().splitlines()
        assert lines[0] == "engine,price,standard_error,ci95_halfwidth,n_paths,wall_total_ms"
        fields = lines[1].split(",")
        assert fields[0] == "parallel"
        assert float(fields[1]) == 4.4671234

    def test_json_round_trips_full_precision(self):
        data = json.loads(emit_result(self._result(), "json"))
        rebuilt = PricingResult.from_dict(data)
        assert rebuilt.price == 4.4671234
        assert rebuilt.standard_error == 0.0091
        assert rebuilt.config["spot"] == 36.0


class TestCommands:
    def test_price_european_text(self, capsys):
        assert main(["price-european"]) == 0
        out = capsys.readouterr().out
        assert "engine: european" in out
        assert "price: 3.844" in out

    @staticmethod
    def _printed_price(out: str) -> float:
        line = next(l for l in out.splitlines() if l.startswith("price:"))
        return float(line.split()[1])

    def test_price_fd_reduced_grid(self, capsys):
        rc = main(["price-fd", "--fd_time_steps=400", "--fd_space_steps=100"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "engine: fd" in out
        assert self._printed_price(out) == pytest.approx(4.486, abs=0.02)

    def test_price_fd_bermudan(self, capsys):
        rc = main([
            "price-fd", "--fd_exercise=bermudan", "--fd_time_steps=400",
            "--fd_space_steps=100", "--dates_per_year=4",
        ])
        assert rc == 0
        out = capsys.readouterr().out
        # Quarterly exercise loses value against the American contract.
        price = self._printed_price(out)
        assert 4.2 < price < 4.486

    def test_price_lsm_small(self, capsys):
        assert main(["price-lsm", "--paths=2000", "--seed=0"]) == 0
        out = capsys.readouterr().out
        assert "engine: lsm" in out

    def test_price_parallel_with_artifacts(self, tmp_path, capsys):
        out_dir = tmp_path / "run"
        rc = main([
            "price-parallel", "--paths=2000", "--iterations=4",
            "--out", str(out_dir), "--format=json",
        ])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["engine"] == "parallel"

        result = json.loads((out_dir / "result.json").read_text())
        assert result["price"] == payload["price"]

        trace_lines = (out_dir / "trace.csv").read_text().strip().splitlines()
        assert trace_lines[0] == "iteration,running_price,running_se,boundary_mid,wall_ms"
        assert len(trace_lines) == 5
        # Full-precision floats: the artifact reproduces the result exactly.
        last_price = float(trace_lines[-1].split(",")[1])
        assert last_price == payload["price"]

        boundary_lines = (out_dir / "boundary.csv").read_text().strip().splitlines()
        assert boundary_lines[0] == "time,boundary"
        assert len(boundary_lines) == 50

    def test_warm_start_round_trip(self, tmp_path, capsys):
        coeffs = tmp_path / "warm.json"
        assert main([
            "price-parallel", "--paths=2000", "--iterations=4",
            "--save_coefficients", str(coeffs),
        ]) == 0
        capsys.readouterr()
        assert coeffs.exists()
        rc = main([
            "price-parallel", "--paths=2000", "--iterations=4", "--seed=1",
            "--bootstrap=warm", "--warm_start", str(coeffs),
        ])
        assert rc == 0
        assert "price:" in capsys.readouterr().out

    def test_warm_start_basis_mismatch_is_config_error(self, tmp_path, capsys):
        coeffs = tmp_path / "warm.json"
        assert main([
            "price-parallel", "--paths=2000", "--iterations=4",
            "--save_coefficients", str(coeffs),
        ]) == 0
        capsys.readouterr()
        rc = main([
            "price-parallel", "--paths=2000", "--iterations=4", "--group_size=5",
            "--bootstrap=warm", "--warm_start", str(coeffs),
        ])
        assert rc == 2
        assert "fingerprint" in capsys.readouterr().err

    def test_missing_warm_file_is_config_error(self, tmp_path, capsys):
        rc = main([
            "price-parallel", "--paths=2000", "--iterations=4",
            "--bootstrap=warm", "--warm_start", str(tmp_path / "absent.json"),
        ])
        assert rc == 2

    @pytest.mark.skipif(kernels.BACKEND != "numba", reason="PSOR needs numba")
    def test_numerical_failure_exit_code(self, capsys):
        rc = main([
            "price-fd", "--fd_method=psor", "--fd_time_steps=200",
            "--fd_space_steps=100", "--psor_tol=1e-14", "--psor_max_iter=1",
        ])
        assert rc == 3
        assert "numerical failure" in capsys.readouterr().err

    def test_converge_with_artifacts(self, tmp_path, capsys):
        out_dir = tmp_path / "study"
        rc = main([
            "converge", "--points=1000,2000,4000", "--repeats=2",
            "--iterations=4", "--out", str(out_dir),
        ])
        assert rc == 0
        out = capsys.readouterr().out
        assert "log-log slope" in out

        with open(out_dir / "converge.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 6
        assert set(rows[0]) == {"axis_value", "repeat", "price", "se_internal", "wall_ms"}
        for p in (1000, 2000, 4000):
            for r in (0, 1):
                assert (out_dir / f"converge_trace_paths_{p}_r{r}.csv").exists()

    def test_table_small(self, tmp_path, capsys):
        out_dir = tmp_path / "table"
        rc = main([
            "table", "--paths=2000", "--iterations=4", "--dates_per_year=10",
            "--fd_time_steps=400", "--fd_space_steps=100", "--out", str(out_dir),
        ])
        assert rc == 0
        out = capsys.readouterr().out
        assert "Parallel" in out and "FD" in out

        with open(out_dir / "table.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 20
        assert list(rows[0]) == TABLE_CSV_COLUMNS
        benchmark = [
            r for r in rows
            if float(r["spot"]) == 36.0 and float(r["vol"]) == 0.2 and float(r["maturity"]) == 1.0
        ]
        assert len(benchmark) == 1
        assert not math.isnan(float(benchmark[0]["parallel_price"]))
        # Sorted by spot, then vol, then maturity.
        keys = [(float(r["spot"]), float(r["vol"]), float(r["maturity"])) for r in rows]
        assert keys == sorted(keys)
