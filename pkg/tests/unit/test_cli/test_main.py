"""
Unit tests for the command-line entry point.

Tests cover:
- Override precedence (shortcut flags over --set over the config file)
- Exit status: 0 qualified, 2 not qualified, 1 error
- evaluate, compare, subsample and apply output files
"""
import pytest

from src.cli.commands import _failure
from src.cli.main import EXIT_ERROR, EXIT_NOT_QUALIFIED, EXIT_QUALIFIED, build_parser, collect_overrides, run
from src.core.exceptions import DataFormatError, ErrorCode
from src.repositories.matrix_repository import read_csv_array
from src.services.result_objects import EvaluateResult

pytestmark = pytest.mark.usefixtures("restore_root_logger")


def base_args(rank5_csv, out) -> list[str]:
    return [
        "--data", str(rank5_csv),
        "--out", str(out),
        "--threads", "2",
        "--set", "id_column=0",
        "--set", "latent_dim_to=8",
        "--set", "latent_dim_by=1",
    ]


class TestCollectOverrides:

    @pytest.mark.unit
    def test_shortcut_wins_over_set(self):
        args = build_parser().parse_args(["evaluate", "--set", "seed=2", "--set", "learn=dwt", "--seed", "3", "--verbose"])

        overrides = collect_overrides(args)

        assert overrides == {"seed": "3", "learn": "dwt", "verbose": "true"}

    @pytest.mark.unit
    def test_sizes_only_on_subsample(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["evaluate", "--sizes", "10,5"])


class TestEvaluate:

    @pytest.mark.unit
    def test_qualified_exit_zero(self, rank5_csv, tmp_path, capsys):
        out = tmp_path / "run"

        status = run(["evaluate", *base_args(rank5_csv, out)])

        assert status == EXIT_QUALIFIED
        assert "qualifying dimension 5, compression ratio 6:1" in capsys.readouterr().out
        for name in ("summary.csv", "metadata.txt", "codec.clrc", "summary_plot.svg", "heatmap.svg",
                     "distribution_plot.svg", "train_validation_ratio.csv", "reconstruction_1d.svg"):
            assert (out / name).is_file(), name

    @pytest.mark.unit
    def test_not_qualified_exit_two(self, rank5_csv, tmp_path, capsys):
        status = run(["evaluate", *base_args(rank5_csv, tmp_path / "run"), "--set", "latent_dim_to=3"])

        assert status == EXIT_NOT_QUALIFIED
        assert "criterion not met" in capsys.readouterr().out
        assert not (tmp_path / "run" / "codec.clrc").exists()

    @pytest.mark.unit
    def test_unknown_key_exit_one(self, rank5_csv, tmp_path, capsys):
        status = run(["evaluate", *base_args(rank5_csv, tmp_path / "run"), "--set", "tolerance=0.1"])

        assert status == EXIT_ERROR
        assert "unknown config key 'tolerance'" in capsys.readouterr().err

    @pytest.mark.unit
    def test_missing_data_exit_one(self, tmp_path, capsys):
        status = run(["evaluate", "--out", str(tmp_path / "run")])

        assert status == EXIT_ERROR
        assert "no data file configured" in capsys.readouterr().err

    @pytest.mark.unit
    def test_unreadable_data_exit_one(self, tmp_path, capsys):
        status = run(["evaluate", "--data", str(tmp_path / "absent.csv"), "--out", str(tmp_path / "run")])

        assert status == EXIT_ERROR
        assert "file not found" in capsys.readouterr().err

    @pytest.mark.unit
    def test_config_file(self, rank5_csv, tmp_path, capsys):
        config = tmp_path / "run.cfg"
        config.write_text(
            f"data = {rank5_csv}\nid_column = 0\nlatent_dim_to = 6\nlatent_dim_by = 1\nout = {tmp_path / 'cfg'}\n",
            encoding="utf-8",
        )

        status = run(["evaluate", "--config", str(config), "--threads", "1"])

        assert status == EXIT_QUALIFIED
        assert (tmp_path / "cfg" / "summary.csv").is_file()


class TestCompareAndSubsample:

    @pytest.mark.unit
    def test_compare_ranks_pca_first(self, rank5_csv, tmp_path, capsys):
        out = tmp_path / "cmp"

        status = run(["compare", *base_args(rank5_csv, out), "--learn", "pca,dwt"])

        ranking = (out / "ranking.txt").read_text(encoding="utf-8").splitlines()
        assert status == EXIT_QUALIFIED
        assert ranking[0].startswith("1. pca: qualifying dimension 5")
        assert ranking[1].startswith("2. dwt")
        assert (out / "pca" / "summary.csv").is_file()
        assert (out / "dwt" / "summary.csv").is_file()

    @pytest.mark.unit
    def test_compare_needs_two_learners(self, rank5_csv, tmp_path, capsys):
        status = run(["compare", *base_args(rank5_csv, tmp_path / "cmp")])

        assert status == EXIT_ERROR
        assert "at least two learners" in capsys.readouterr().err

    @pytest.mark.unit
    def test_subsample_directories(self, rank5_csv, tmp_path, capsys):
        out = tmp_path / "sub"

        status = run(["subsample", *base_args(rank5_csv, out), "--sizes", "30,15"])

        assert status == EXIT_QUALIFIED
        assert (out / "n30_pca" / "summary.csv").is_file()
        assert (out / "n15_pca" / "metadata.txt").is_file()
        assert (out / "summary_grid.svg").is_file()
        assert capsys.readouterr().out.splitlines()[0].startswith("N=30 pca")

    @pytest.mark.unit
    def test_subsample_sizes_must_descend(self, rank5_csv, tmp_path, capsys):
        status = run(["subsample", *base_args(rank5_csv, tmp_path / "sub"), "--sizes", "15,30"])

        assert status == EXIT_ERROR
        assert "strictly descending" in capsys.readouterr().err


class TestApply:

    @pytest.fixture
    def codec_path(self, rank5_csv, tmp_path):
        out = tmp_path / "run"
        assert run(["evaluate", *base_args(rank5_csv, out)]) == EXIT_QUALIFIED
        return out / "codec.clrc"

    @pytest.mark.unit
    def test_roundtrip_with_losses(self, codec_path, rank5_csv, tmp_path, capsys):
        target = tmp_path / "recon.csv"

        status = run(["apply", "--codec", str(codec_path), "--data", str(rank5_csv), "--out", str(target), "--id-column", "0"])

        assert status == EXIT_QUALIFIED
        original, ids, _ = read_csv_array(rank5_csv, id_column=0)
        reconstruction, recon_ids, _ = read_csv_array(target, id_column=0)
        losses, _, header = read_csv_array(tmp_path / "recon_losses.csv", id_column=0)
        assert recon_ids == ids
        assert reconstruction.shape == original.shape
        assert header == ["id", "sq_corr_loss", "press"]
        assert losses.max() < 1e-10

    @pytest.mark.unit
    def test_encode_then_decode(self, codec_path, rank5_csv, tmp_path, capsys):
        latent = tmp_path / "latent.csv"
        decoded = tmp_path / "decoded.csv"

        assert run(["apply", "--codec", str(codec_path), "--data", str(rank5_csv), "--direction", "encode",
                    "--out", str(latent), "--id-column", "0"]) == EXIT_QUALIFIED
        assert run(["apply", "--codec", str(codec_path), "--data", str(latent), "--direction", "decode",
                    "--out", str(decoded), "--id-column", "0"]) == EXIT_QUALIFIED

        z, _, z_header = read_csv_array(latent, id_column=0)
        assert z.shape == (60, 5)
        assert z_header == ["id", "z1", "z2", "z3", "z4", "z5"]
        assert read_csv_array(decoded, id_column=0)[0].shape == (60, 32)

    @pytest.mark.unit
    def test_wrong_width_exit_one(self, codec_path, rank5_csv, tmp_path, capsys):
        status = run(["apply", "--codec", str(codec_path), "--data", str(rank5_csv), "--direction", "decode",
                      "--out", str(tmp_path / "x.csv"), "--id-column", "0"])

        assert status == EXIT_ERROR
        assert "columns for decode" in capsys.readouterr().err


class TestFailureMapping:

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "exc, code",
        [
            (DataFormatError("bad cell"), ErrorCode.DATA_FORMAT),
            (FileNotFoundError(2, "missing", "x.csv"), ErrorCode.NOT_FOUND),
            (PermissionError(13, "denied"), ErrorCode.IO_ERROR),
            (RuntimeError("boom"), ErrorCode.INTERNAL_ERROR),
        ],
    )
    def test_error_codes(self, exc, code):
        result = _failure(EvaluateResult, exc, "evaluate failed")

        assert not result.success
        assert result.error_code is code
        assert result.report is None
