"""
Unit tests for ConfigManager.

Tests the hierarchical configuration loading system and dataclass-based config.
"""

import json
import shutil
import tempfile
from pathlib import Path
from unittest.mock import patch

import pytest

from src.rlra.core.config_manager import (
    ConfigManager,
    KernelConfig,
    ReportConfig,
    RlraConfig,
    SketchConfig,
    UIConfig,
    get_config,
    get_config_manager,
)


class TestConfigDataclasses:
    """Test configuration dataclasses."""

    def test_sketch_config_defaults(self):
        config = SketchConfig()
        assert (config.p, config.q, config.s) == (5, 1, 1)
        assert (config.block, config.max_blocks) == (10, 10)
        assert config.vnum == "qr"
        assert config.seed == 0

    def test_kernel_config_defaults(self):
        config = KernelConfig()
        assert config.threads == 1
        assert config.eig_max_sweeps == 30
        assert config.svd_max_sweeps == 60
        assert config.dense_oracle_limit == 2000

    def test_report_config_defaults(self):
        config = ReportConfig()
        assert config.spectral_iters == 100
        assert config.float_format == ".17g"
        assert config.relative_tol is False

    def test_ui_config_defaults(self):
        config = UIConfig()
        assert config.progress_mode == "simple"
        assert config.log_level == "INFO"
        assert config.verbose_errors is False

    def test_config_initialization(self):
        config = RlraConfig()
        assert isinstance(config.sketch, SketchConfig)
        assert isinstance(config.kernels, KernelConfig)
        assert isinstance(config.report, ReportConfig)
        assert isinstance(config.ui, UIConfig)


class TestConfigManager:
    """Test ConfigManager functionality."""

    @pytest.fixture
    def temp_dirs(self):
        """Create temporary directories for testing."""
        project_root = tempfile.mkdtemp()
        config_dir = Path(project_root) / "config"
        config_dir.mkdir()
        user_dir = tempfile.mkdtemp()

        yield project_root, config_dir, user_dir

        shutil.rmtree(project_root, ignore_errors=True)
        shutil.rmtree(user_dir, ignore_errors=True)

    @pytest.fixture
    def config_manager(self, temp_dirs):
        """Create ConfigManager with temp directories."""
        project_root, _, user_dir = temp_dirs
        return ConfigManager(project_root=Path(project_root), user_config_dir=Path(user_dir))

    def test_config_manager_initialization(self, config_manager, temp_dirs):
        project_root, _, user_dir = temp_dirs
        assert config_manager.project_root == Path(project_root)
        assert config_manager.config_dir == Path(project_root) / "config"
        assert config_manager.user_config_dir == Path(user_dir)

    def test_load_default_config(self, config_manager):
        config = config_manager.load_config()
        assert isinstance(config, RlraConfig)
        assert config.sketch.p == 5
        assert config.kernels.threads == 1

    def test_load_project_config(self, config_manager, temp_dirs):
        """Test loading project-specific configuration."""
        _, config_dir, _ = temp_dirs
        project_config = {
            "version": "1.0.0",
            "sketch": {"q": 2, "block": 20},
            "kernels": {"threads": 4},
        }
        (config_dir / "test.json").write_text(json.dumps(project_config))

        config = config_manager.load_config(project_config="test.json")

        assert config.sketch.q == 2
        assert config.sketch.block == 20
        assert config.kernels.threads == 4
        # Other values should be defaults
        assert config.sketch.p == 5

    def test_default_json_is_picked_up(self, config_manager, temp_dirs):
        _, config_dir, _ = temp_dirs
        (config_dir / "default.json").write_text(json.dumps({"report": {"spectral_iters": 40}}))
        assert config_manager.load_config().report.spectral_iters == 40

    def test_load_user_config(self, config_manager, temp_dirs):
        _, _, user_dir = temp_dirs
        (Path(user_dir) / "settings.json").write_text(json.dumps({"ui": {"log_level": "DEBUG"}}))
        assert config_manager.load_config().ui.log_level == "DEBUG"

    def test_cli_overrides(self, config_manager):
        config = config_manager.load_config(cli_overrides={"sketch": {"seed": 42}, "kernels": {"threads": 3}})
        assert config.sketch.seed == 42
        assert config.kernels.threads == 3

    def test_config_precedence(self, config_manager, temp_dirs):
        """Defaults < project < user < CLI."""
        _, config_dir, user_dir = temp_dirs
        (config_dir / "test.json").write_text(json.dumps({"sketch": {"p": 7, "q": 3}}))
        (Path(user_dir) / "settings.json").write_text(json.dumps({"sketch": {"p": 9}, "ui": {"log_level": "WARNING"}}))

        config = config_manager.load_config(project_config="test.json", cli_overrides={"sketch": {"p": 11}})

        assert config.sketch.p == 11
        assert config.ui.log_level == "WARNING"
        assert config.sketch.q == 3

    def test_environment_threads_beat_cli(self, config_manager, monkeypatch):
        monkeypatch.setenv("RLRA_THREADS", "6")
        config = config_manager.load_config(cli_overrides={"kernels": {"threads": 2}})
        assert config.kernels.threads == 6

    def test_non_integer_environment_threads_ignored(self, config_manager, monkeypatch):
        monkeypatch.setenv("RLRA_THREADS", "many")
        config = config_manager.load_config(cli_overrides={"kernels": {"threads": 2}})
        assert config.kernels.threads == 2

    def test_environment_log_level(self, config_manager, monkeypatch):
        monkeypatch.setenv("RLRA_LOG_LEVEL", "debug")
        assert config_manager.load_config().ui.log_level == "DEBUG"

    def test_unknown_keys_ignored(self, config_manager, caplog):
        config = config_manager.load_config(cli_overrides={"sketch": {"oversample": 3}})
        assert config.sketch.p == 5
        assert "oversample" in caplog.text

    def test_loading_leaves_user_settings_untouched(self, config_manager, temp_dirs):
        _, _, user_dir = temp_dirs
        config_manager.load_config(cli_overrides={"sketch": {"vnum": "bbt"}})
        assert not (Path(user_dir) / "settings.json").exists()

    def test_validate_config(self, config_manager):
        config = config_manager.load_config()
        assert config_manager.validate_config(config) == []

        config.sketch.s = 0
        config.sketch.vnum = "lu"
        config.kernels.threads = 0
        config.report.spectral_iters = 10
        config.ui.progress_mode = "fancy"
        issues = config_manager.validate_config(config)
        assert any("period s" in issue for issue in issues)
        assert any("vnum" in issue for issue in issues)
        assert any("threads" in issue for issue in issues)
        assert any("spectral_iters" in issue for issue in issues)
        assert any("progress_mode" in issue for issue in issues)

    @patch('platform.system')
    def test_user_config_dir_linux(self, mock_system, temp_dirs):
        mock_system.return_value = "Linux"
        with patch.dict('os.environ', {'XDG_CONFIG_HOME': '/home/test/.config'}):
            manager = ConfigManager(project_root=Path(temp_dirs[0]))
            assert manager._get_user_config_dir() == Path("/home/test/.config/rlra-toolkit")

    @patch('platform.system')
    def test_user_config_dir_macos(self, mock_system, temp_dirs):
        mock_system.return_value = "Darwin"
        manager = ConfigManager(project_root=Path(temp_dirs[0]))
        assert "Library/Application Support/rlra-toolkit" in str(manager._get_user_config_dir())

    def test_merge_configs(self, config_manager):
        base = {"sketch": {"p": 5, "q": 1}, "ui": {"log_level": "INFO"}}
        override = {"sketch": {"p": 8}, "report": {"spectral_iters": 30}}

        merged = config_manager._merge_configs(base, override)

        assert merged["sketch"] == {"p": 8, "q": 1}
        assert merged["ui"]["log_level"] == "INFO"
        assert merged["report"]["spectral_iters"] == 30

    def test_invalid_json_handling(self, config_manager, temp_dirs):
        _, config_dir, _ = temp_dirs
        (config_dir / "invalid.json").write_text("{ invalid json }")
        config = config_manager.load_config(project_config="invalid.json")
        assert config.sketch.p == 5

    def test_missing_config_file(self, config_manager, caplog):
        config = config_manager.load_config(project_config="nonexistent.json")
        assert config.sketch.p == 5
        assert "not found" in caplog.text


class TestGlobalManager:
    """Test the process-wide manager."""

    def test_get_config_singleton(self):
        assert get_config_manager() is get_config_manager()

    def test_get_config_convenience(self):
        config = get_config(sketch={"seed": 5})
        assert isinstance(config, RlraConfig)
        assert config.sketch.seed == 5

    def test_shipped_profiles_are_valid(self):
        manager = get_config_manager()
        for name in ("default.json", "development.json", "production.json"):
            assert manager.validate_config(manager.load_config(project_config=name)) == []
