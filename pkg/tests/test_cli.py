import json
import math

import numpy as np
import pytest

from paraep.cli import (EXIT_IO, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main)


def read_csv(path):
    """(header, data rows, trailer dict) of one of our CSV files."""
    header = None
    rows = []
    trailer = {}
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body and header is not None:
                key, _, val = body.partition("=")
                trailer[key.strip()] = val.strip()
            continue
        if header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    return header, rows, trailer


class TestEigenCommand:
    def test_block_formula_values(self, tmp_path, capsys):
        rc = main(["eigen", "--g", "0.5", "--f", "0.5", "--kappa", "1",
                   "--gamma", "0.25", "--outdir", str(tmp_path)])
        assert rc == EXIT_OK
        header, rows, _ = read_csv(tmp_path / "eigen.csv")
        assert header == ["g", "f", "kappa", "gamma", "phi", "delta1",
                          "delta2", "re_lambda_1", "re_lambda_2",
                          "re_lambda_3", "re_lambda_4", "im_lambda_1",
                          "im_lambda_2", "im_lambda_3", "im_lambda_4"]
        vals = [float(x) for x in rows[0]]
        res = sorted(vals[7:11])
        root = math.sqrt(0.75)
        assert res[0] == pytest.approx(-root, abs=1e-9)
        assert res[1] == pytest.approx(-root, abs=1e-9)
        assert res[2] == pytest.approx(root, abs=1e-9)
        assert all(abs(v + 0.25) < 1e-9 for v in vals[11:15])

    def test_provenance_header(self, tmp_path):
        main(["eigen", "--outdir", str(tmp_path)])
        text = (tmp_path / "eigen.csv").read_text()
        lines = text.splitlines()
        assert lines[0].startswith("# paraep 0.1.0 experiment=eigen")
        assert lines[1].startswith("# config_hash=")
        assert lines[2].startswith("# config={")


class TestConfigIngestion:
    def test_config_file_applies(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"g": 0.5, "f": 0.5, "kappa": 1.0,
                                   "gamma": 0.25}))
        rc = main(["eigen", "--config", str(cfg), "--outdir", str(tmp_path)])
        assert rc == EXIT_OK
        _, rows, _ = read_csv(tmp_path / "eigen.csv")
        assert float(rows[0][0]) == 0.5

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"g": 0.5}))
        main(["eigen", "--config", str(cfg), "--g", "0.75",
              "--outdir", str(tmp_path)])
        _, rows, _ = read_csv(tmp_path / "eigen.csv")
        assert float(rows[0][0]) == 0.75

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"g": 0.5, "bogus_knob": 1}))
        rc = main(["eigen", "--config", str(cfg), "--outdir", str(tmp_path)])
        assert rc == EXIT_USAGE

    def test_malformed_json_rejected(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text("{not json")
        rc = main(["eigen", "--config", str(cfg), "--outdir", str(tmp_path)])
        assert rc == EXIT_USAGE

    def test_invalid_parameter_value(self, tmp_path):
        rc = main(["eigen", "--gamma", "-1", "--outdir", str(tmp_path)])
        assert rc == EXIT_USAGE


class TestExitCodes:
    def test_usage_error_unknown_command(self):
        with pytest.raises(SystemExit) as exc:
            main(["no-such-command"])
        assert exc.value.code == EXIT_USAGE

    def test_no_command_prints_help(self, capsys):
        assert main([]) == EXIT_USAGE
        assert "figure" in capsys.readouterr().out

    def test_numerical_failure_exit_code(self, tmp_path):
        # above-threshold squeezing request diverges -> numerical failure
        rc = main(["squeeze", "--g", "1.2", "--f", "1.2", "--kappa", "1",
                   "--gamma", "0.25", "--outdir", str(tmp_path)])
        assert rc == EXIT_NUMERICAL

    def test_io_error_exit_code(self, tmp_path):
        target = tmp_path / "blocked"
        target.write_text("a file, not a directory")
        rc = main(["eigen", "--outdir", str(target)])
        assert rc == EXIT_IO


class TestSimulate:
    def test_zero_state_zero_trajectory(self, tmp_path):
        rc = main(["simulate", "--g", "1.5", "--f", "0.4", "--kappa", "1",
                   "--gamma", "0.25", "--gs", "0.3", "--horizon", "50",
                   "--samples", "128", "--outdir", str(tmp_path)])
        assert rc == EXIT_OK
        _, rows, _ = read_csv(tmp_path / "simulate.csv")
        data = np.array([[float(x) for x in r] for r in rows])
        assert np.all(data[:, 1:] == 0.0)

    def test_seeded_run_classifies(self, tmp_path):
        rc = main(["simulate", "--g", "1.5", "--f", "0.4", "--kappa", "1",
                   "--gamma", "0.25", "--gs", "0.3", "--horizon", "3000",
                   "--samples", "2048", "--seed-amplitude", "1e-6",
                   "--outdir", str(tmp_path)])
        assert rc == EXIT_OK
        _, _, trailer = read_csv(tmp_path / "simulate.csv")
        assert trailer["regime"] == "nondegenerate"


class TestThresholdCommand:
    def test_balanced_threshold(self, tmp_path):
        rc = main(["threshold", "--kappa", "1", "--gamma", "0.25",
                   "--outdir", str(tmp_path)])
        assert rc == EXIT_OK
        _, rows, _ = read_csv(tmp_path / "threshold.csv")
        assert float(rows[0][0]) == pytest.approx(math.sqrt(1.0625), abs=1e-6)
        assert rows[0][1] == "1"


class TestEPCommands:
    def test_ep_find_second_order(self, tmp_path):
        rc = main(["ep-find", "--order", "2", "--kappa", "1", "--gamma",
                   "0.25", "--outdir", str(tmp_path)])
        assert rc == EXIT_OK
        header, rows, _ = read_csv(tmp_path / "ep.csv")
        row = dict(zip(header, rows[0]))
        assert float(row["g"]) == pytest.approx(1.0, abs=1e-6)

    def test_ep_scaling_slope_in_trailer(self, tmp_path):
        rc = main(["ep-scaling", "--order", "2", "--kappa", "1", "--gamma",
                   "0.25", "--outdir", str(tmp_path)])
        assert rc == EXIT_OK
        _, rows, trailer = read_csv(tmp_path / "ep_scaling.csv")
        assert float(trailer["slope"]) == pytest.approx(0.5, abs=0.05)
        assert len(rows) == 13


class TestFigurePresets:
    def test_unknown_figure_rejected(self):
        with pytest.raises(SystemExit) as exc:
            main(["figure", "9z"])
        assert exc.value.code == EXIT_USAGE

    def test_fig4b_slope_summary(self, tmp_path):
        rc = main(["figure", "4b", "--outdir", str(tmp_path)])
        assert rc == EXIT_OK
        _, rows, trailer = read_csv(tmp_path / "fig4b.csv")
        assert float(trailer["slope"]) == pytest.approx(0.5, abs=0.05)

    def test_fig2a_reruns_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["figure", "2a", "--outdir", str(out1)])
        main(["figure", "2a", "--outdir", str(out2)])
        assert (out1 / "fig2a.csv").read_bytes() == \
               (out2 / "fig2a.csv").read_bytes()

    def test_svg_emission(self, tmp_path):
        rc = main(["figure", "2a", "--outdir", str(tmp_path), "--svg"])
        assert rc == EXIT_OK
        svg = (tmp_path / "fig2a.svg").read_text()
        assert svg.startswith("<svg")
        assert "polyline" in svg


class TestPhaseDiagramCommand:
    def test_row_count_matches_grid(self, tmp_path):
        rc = main(["phase-diagram", "--axis1", "phi:0:3.14:3",
                   "--axis2", "fg:1.2:1.5:2", "--gamma", "0.25", "--kappa",
                   "1", "--gs", "0.3", "--horizon", "800",
                   "--samples", "1024", "--outdir", str(tmp_path)])
        assert rc == EXIT_OK
        _, rows, _ = read_csv(tmp_path / "phase_diagram.csv")
        assert len(rows) == 6


class TestRemainingCommands:
    def test_floquet_scan(self, tmp_path):
        rc = main(["floquet", "--kappa", "1", "--gamma", "0.25", "--F", "2.5",
                   "--omega", "10", "--g0-lo", "0.8", "--g0-hi", "1.4",
                   "--n", "7", "--outdir", str(tmp_path)])
        assert rc == EXIT_OK
        _, rows, trailer = read_csv(tmp_path / "floquet.csv")
        assert len(rows) == 7
        assert float(trailer["fep_g0"]) == pytest.approx(1.0634, abs=1e-3)

    def test_encircle_verdicts(self, tmp_path):
        for direction, returns in (("cw", "True"), ("ccw", "False")):
            rc = main(["encircle", "--kappa", "1", "--gamma", "0.25",
                       "--direction", direction, "--n-windows", "128",
                       "--outdir", str(tmp_path)])
            assert rc == EXIT_OK
            _, rows, trailer = read_csv(tmp_path / "encircle.csv")
            assert trailer["returns_to_start"] == returns
            assert len(rows) == 129

    def test_squeeze_spectrum(self, tmp_path):
        rc = main(["squeeze", "--g", "0.9", "--f", "0.9", "--kappa", "1",
                   "--gamma", "0.1", "--rho", "0.9", "--n-omega", "61",
                   "--outdir", str(tmp_path)])
        assert rc == EXIT_OK
        _, rows, trailer = read_csv(tmp_path / "squeeze.csv")
        assert len(rows) == 61
        assert float(trailer["min_s"]) < 1.0

    def test_mc_squeeze_small(self, tmp_path):
        rc = main(["mc-squeeze", "--g", "0.5", "--f", "0.5", "--kappa", "1",
                   "--gamma", "0.25", "--rho", "0.9", "--seed", "7",
                   "--duration", "300", "--ensemble", "4",
                   "--nperseg", "4096", "--outdir", str(tmp_path)])
        assert rc == EXIT_OK
        header, rows, trailer = read_csv(tmp_path / "mc_squeeze.csv")
        assert header[:5] == ["omega", "psd_x1", "psd_y1", "psd_x2", "psd_y2"]
        assert "rms_rel_x1" in trailer
