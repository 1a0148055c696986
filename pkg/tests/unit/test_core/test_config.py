"""
Unit tests for process settings, logging setup and exceptions.

Tests cover:
- CLARE_* environment variables
- Thread budget resolution
- JSON log formatting
- Error codes carried by exceptions
"""
import json
import logging

import pytest
from pydantic import ValidationError

from src.core.config import Settings
from src.core.exceptions import (
    ConfigError,
    ErrorCode,
    LearnerError,
    LearnerFitError,
    ShapeError,
)
from src.core.logging_config import UTCJsonFormatter, configure_logging


class TestSettings:

    @pytest.mark.unit
    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("CLARE_LOG_FORMAT", "JSON")
        monkeypatch.setenv("CLARE_THREADS", "3")

        settings = Settings(_env_file=None)

        assert settings.is_json_logging
        assert settings.resolved_threads == 3

    @pytest.mark.unit
    def test_zero_threads_means_all_cores(self, monkeypatch, mocker):
        monkeypatch.delenv("CLARE_THREADS", raising=False)
        mocker.patch("src.core.config.os.cpu_count", return_value=6)

        assert Settings(_env_file=None).resolved_threads == 6

    @pytest.mark.unit
    def test_bad_log_format(self, monkeypatch):
        monkeypatch.setenv("CLARE_LOG_FORMAT", "xml")

        with pytest.raises(ValidationError):
            Settings(_env_file=None)


class TestLogging:

    @pytest.mark.unit
    def test_json_formatter(self):
        record = logging.LogRecord("clare.test", logging.WARNING, __file__, 1, "fold %d", (2,), None)

        entry = json.loads(UTCJsonFormatter().format(record))

        assert entry["level"] == "WARNING"
        assert entry["logger"] == "clare.test"
        assert entry["message"] == "fold 2"
        assert entry["timestamp"].endswith("Z")

    @pytest.mark.unit
    def test_configure_logging_replaces_handlers(self):
        root = logging.getLogger()
        saved = (root.level, list(root.handlers))
        try:
            configure_logging(level="debug", json_format=True)

            assert root.level == logging.DEBUG
            assert len(root.handlers) == 1
            assert isinstance(root.handlers[0].formatter, UTCJsonFormatter)
        finally:
            root.setLevel(saved[0])
            root.handlers[:] = saved[1]


class TestExceptions:

    @pytest.mark.unit
    def test_shape_error_message(self):
        exc = ShapeError("encode output", (4, 3), (4, 2))

        assert "expected (4, 3), got (4, 2)" in str(exc)
        assert exc.error_code is ErrorCode.SHAPE_MISMATCH

    @pytest.mark.unit
    def test_learner_fit_error_names_task(self):
        exc = LearnerFitError("ae", k=12, fold=3, cause=LearnerError("diverged at epoch 7"))

        assert isinstance(exc, LearnerError)
        assert "K=12" in str(exc) and "fold=3" in str(exc)
        assert "epoch 7" in str(exc)

    @pytest.mark.unit
    def test_learner_fit_error_refit(self):
        exc = LearnerFitError("pca", k=5, fold=None, cause=ValueError("boom"))

        assert "full-data refit" in str(exc)

    @pytest.mark.unit
    def test_config_error_line(self):
        exc = ConfigError("unknown config key 'folsd'", key="folsd", line=4)

        assert str(exc).startswith("line 4: ")
        assert exc.error_code is ErrorCode.CONFIG_ERROR
