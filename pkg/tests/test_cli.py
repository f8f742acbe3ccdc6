"""Config parsing and the command-line front end (run in-process)."""

import json

import numpy as np
import pytest

from phasegate.cli import EXIT_CONFIG, EXIT_DATA, EXIT_OK, main
from phasegate.config import RunConfig, load_run_config, run_config_from_dict
from phasegate.errors import ConfigError
from phasegate.experiment import DEFAULT_PHASES
from phasegate.metrics import read_merit_csv


class TestRunConfig:
    def test_defaults(self):
        cfg = RunConfig()
        assert cfg.plan.phases == DEFAULT_PHASES
        assert cfg.noise.visibility == 1.0
        assert cfg.seed is None
        assert cfg.feed_forward is True
        assert cfg.emit == ("counts", "choi", "states", "report")

    def test_nested_overrides(self):
        cfg = run_config_from_dict(
            {
                "plan": {"phases": [0.0, 1.0], "bases": ["Z", "X", "Y"]},
                "noise": {"visibility": 0.9, "n_intervals": 2},
                "seed": 11,
                "emit": ["counts"],
            }
        )
        assert cfg.plan.phases == (0.0, 1.0)
        assert cfg.noise.visibility == 0.9
        assert cfg.noise.pair_rate == 1000.0  # untouched default
        assert cfg.seed == 11 and cfg.emit == ("counts",)

    @pytest.mark.parametrize(
        "data, fragment",
        [
            ({"pair_rate": 1.0}, "pair_rate"),
            ({"noise": {"pairrate": 1.0}}, "pairrate"),
            ({"plan": {"states": ["0"]}}, "states"),
            ({"plan": ["not", "a", "dict"]}, "plan"),
            ({"seed": "tomorrow"}, "seed"),
            ({"emit": ["counts", "everything"]}, "everything"),
            ({"emit": ["counts", "counts"]}, "duplicates"),
            ({"feed_forward": 1}, "feed_forward"),
        ],
    )
    def test_rejections_name_the_problem(self, data, fragment):
        with pytest.raises(ConfigError, match=fragment):
            run_config_from_dict(data)

    def test_require_seed(self):
        with pytest.raises(ConfigError, match="seed"):
            RunConfig().require_seed()
        assert RunConfig(seed=4).require_seed() == 4

    def test_load_file_round_trip(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"seed": 9, "noise": {"pair_rate": 50.0}}))
        cfg = load_run_config(path)
        assert cfg.seed == 9 and cfg.noise.pair_rate == 50.0

    def test_load_file_errors(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_run_config(tmp_path / "absent.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_run_config(bad)


@pytest.fixture()
def small_config(tmp_path):
    """Config file for a fast but fully realistic one-phase run."""
    path = tmp_path / "cfg.json"
    path.write_text(
        json.dumps(
            {
                "plan": {"phases": [np.pi / 4]},
                "noise": {
                    "eta_p0": 0.55, "eta_d0": 0.55, "eta_d1": 0.55, "eta_p1": 0.50,
                    "dark_quad": 400.0, "dark_single": 180.0,
                    "visibility": 0.95, "phase_sigma": np.pi / 200,
                    "pair_rate": 2500.0, "n_intervals": 2,
                },
                "seed": 123,
            }
        )
    )
    return str(path)


class TestCli:
    def test_simulate_unseeded_is_a_config_error(self, tmp_path, capsys):
        assert main(["simulate", "--out", str(tmp_path)]) == EXIT_CONFIG
        assert "seed" in capsys.readouterr().err

    def test_simulate_default_grid(self, tmp_path, capsys):
        assert main(["simulate", "--seed", "3", "--out", str(tmp_path)]) == EXIT_OK
        lines = (tmp_path / "counts.csv").read_text().splitlines()
        # 7 phases x 6 states x 3 bases x 4 detector pairs x 12 intervals
        assert len(lines) == 1 + 6048
        assert lines[0] == "phase,input_state,basis,program_detector,data_detector,interval,count"
        assert "6048 records" in capsys.readouterr().out

    def test_simulate_byte_determinism(self, tmp_path):
        for sub in ("a", "b"):
            assert main(["simulate", "--seed", "3", "--out", str(tmp_path / sub)]) == EXIT_OK
        a = (tmp_path / "a" / "counts.csv").read_bytes()
        b = (tmp_path / "b" / "counts.csv").read_bytes()
        assert a == b
        assert main(["simulate", "--seed", "4", "--out", str(tmp_path / "c")]) == EXIT_OK
        assert (tmp_path / "c" / "counts.csv").read_bytes() != a

    def test_staged_matches_one_shot_pipeline(self, small_config, tmp_path, capsys):
        staged = str(tmp_path / "staged")
        counts = f"{staged}/counts.csv"
        assert main(["simulate", "--config", small_config, "--out", staged]) == EXIT_OK
        assert main(["reconstruct", counts, "--config", small_config, "--out", staged]) == EXIT_OK
        assert main(["reconstruct", counts, "--config", small_config, "--out", staged,
                     "--no-feed-forward"]) == EXIT_OK
        assert main(["report", "--out", staged]) == EXIT_OK
        assert "F_chi" in capsys.readouterr().out

        oneshot = str(tmp_path / "oneshot")
        assert main(["pipeline", "--config", small_config, "--out", oneshot]) == EXIT_OK

        def rows(d):
            got = read_merit_csv(f"{d}/report.csv")
            return sorted(got, key=lambda r: (r.feed_forward_active, r.phi))

        for a, b in zip(rows(staged), rows(oneshot), strict=True):
            assert a.feed_forward_active == b.feed_forward_active
            assert a.phi == pytest.approx(b.phi, abs=1e-9)
            for field in ("F_chi", "F_av", "F_min", "P_av", "P_min"):
                assert getattr(a, field) == pytest.approx(getattr(b, field), abs=1e-9)
            assert a.success_probability == pytest.approx(b.success_probability, abs=1e-7)

    def test_emit_flag_restricts_outputs(self, small_config, tmp_path):
        out = tmp_path / "emit"
        assert main(["pipeline", "--config", small_config, "--out", str(out),
                     "--emit", "counts,report"]) == EXIT_OK
        names = sorted(p.name for p in out.iterdir())
        assert names == ["counts.csv", "report.csv", "report.txt"]

    def test_no_feed_forward_pipeline(self, small_config, tmp_path):
        out = tmp_path / "noff"
        assert main(["pipeline", "--config", small_config, "--out", str(out),
                     "--no-feed-forward"]) == EXIT_OK
        rows = read_merit_csv(out / "report.csv")
        assert rows and all(not r.feed_forward_active for r in rows)
        assert all(abs(r.success_probability - 0.25) < 0.02 for r in rows)

    def test_unknown_emit_entry(self, tmp_path, capsys):
        code = main(["simulate", "--seed", "1", "--out", str(tmp_path), "--emit", "verything"])
        assert code == EXIT_CONFIG
        assert "verything" in capsys.readouterr().err

    def test_bad_config_json(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"noise": {"pair_rate": -3}}')
        assert main(["simulate", "--config", str(bad), "--seed", "1"]) == EXIT_CONFIG
        assert "pair_rate" in capsys.readouterr().err

    def test_reconstruct_missing_and_truncated_csv(self, tmp_path, capsys):
        assert main(["reconstruct", str(tmp_path / "nope.csv")]) == EXIT_DATA
        short = tmp_path / "short.csv"
        short.write_text("phase,input_state,basis,program_detector,data_detector,interval,count\n"
                         "0,0,Z,D_p0,D_d0,0,5\n")
        assert main(["reconstruct", str(short), "--out", str(tmp_path)]) == EXIT_DATA
        capsys.readouterr()

    def test_report_on_empty_dir(self, tmp_path, capsys):
        assert main(["report", "--out", str(tmp_path)]) == EXIT_DATA
        assert "choi" in capsys.readouterr().err

    def test_report_warns_on_variant_phase_mismatch(self, small_config, tmp_path, capsys):
        out = tmp_path / "warn"
        assert main(["pipeline", "--config", small_config, "--out", str(out)]) == EXIT_OK
        for path in list(out.iterdir()):
            if "_ff_p00" in path.name:
                text = path.read_text().replace("phase 0.7853", "phase 2.7853")
                (out / path.name.replace("_p00", "_p01")).write_text(text)
        capsys.readouterr()
        assert main(["report", "--out", str(out)]) == EXIT_OK
        assert "differ" in capsys.readouterr().err
