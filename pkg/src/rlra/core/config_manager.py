"""
Centralized Configuration Management

Manages all configuration sources:
- Default settings
- Project configs (config/*.json)
- User settings (~/.config/rlra-toolkit/)
- Environment (RLRA_THREADS, RLRA_LOG_LEVEL)
- CLI overrides
"""

import json
import logging
import os
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from .constants import (
    CSV_FLOAT_FORMAT,
    DEFAULT_BLOCK_SIZE,
    DEFAULT_MAX_BLOCKS,
    DEFAULT_ORTH_PERIOD,
    DEFAULT_OVERSAMPLING,
    DEFAULT_POWER_ITERS,
    DEFAULT_SEED,
    DEFAULT_SPECTRAL_ITERS,
    DEFAULT_THREADS,
    DENSE_ORACLE_LIMIT,
    JACOBI_EIG_MAX_SWEEPS,
    JACOBI_SVD_MAX_SWEEPS,
    LOG_LEVEL_ENV_VAR,
    PARALLEL_MIN_COLUMNS,
    THREADS_ENV_VAR,
)

VALID_VNUMS = ("qr", "bbt")
VALID_PROGRESS_MODES = ("none", "simple")
VALID_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class SketchConfig:
    """Randomized sampling defaults"""
    p: int = DEFAULT_OVERSAMPLING
    q: int = DEFAULT_POWER_ITERS
    s: int = DEFAULT_ORTH_PERIOD
    block: int = DEFAULT_BLOCK_SIZE
    max_blocks: int = DEFAULT_MAX_BLOCKS
    vnum: str = "qr"
    seed: int = DEFAULT_SEED


@dataclass
class KernelConfig:
    """Dense kernel settings"""
    threads: int = DEFAULT_THREADS
    parallel_min_columns: int = PARALLEL_MIN_COLUMNS
    eig_max_sweeps: int = JACOBI_EIG_MAX_SWEEPS
    svd_max_sweeps: int = JACOBI_SVD_MAX_SWEEPS
    dense_oracle_limit: int = DENSE_ORACLE_LIMIT


@dataclass
class ReportConfig:
    """Error report settings"""
    spectral_iters: int = DEFAULT_SPECTRAL_ITERS
    report_seed: int = DEFAULT_SEED
    float_format: str = CSV_FLOAT_FORMAT
    relative_tol: bool = False


@dataclass
class UIConfig:
    """User interface configuration"""
    progress_mode: str = "simple"
    log_level: str = "INFO"
    verbose_errors: bool = False


@dataclass
class RlraConfig:
    """Complete configuration for the toolkit"""
    sketch: SketchConfig = field(default_factory=SketchConfig)
    kernels: KernelConfig = field(default_factory=KernelConfig)
    report: ReportConfig = field(default_factory=ReportConfig)
    ui: UIConfig = field(default_factory=UIConfig)


_SECTIONS = {
    "sketch": SketchConfig,
    "kernels": KernelConfig,
    "report": ReportConfig,
    "ui": UIConfig,
}


class ConfigManager:
    """
    Centralized configuration manager with hierarchical loading:
    1. Default settings
    2. Project configs (config/*.json)
    3. User settings (~/.config/rlra-toolkit/settings.json)
    4. Environment variables
    5. CLI arguments (RLRA_THREADS still wins for the thread count)
    """

    def __init__(self, project_root: Optional[Path] = None, user_config_dir: Optional[Path] = None):
        self.logger = logging.getLogger(__name__)

        if project_root is None:
            current = Path(__file__).parent
            while current != current.parent:
                if (current / "pyproject.toml").exists():
                    project_root = current
                    break
                current = current.parent
            else:
                project_root = Path.cwd()

        self.project_root = project_root
        self.config_dir = project_root / "config"
        self.user_config_dir = user_config_dir or self._get_user_config_dir()

        self._config: Optional[RlraConfig] = None

        self.logger.debug(f"ConfigManager initialized (project root: {self.project_root}, "
                          f"user config: {self.user_config_dir})")

    def _get_user_config_dir(self) -> Path:
        """Get platform-appropriate user config directory"""
        system = platform.system()

        if system == "Windows":
            base = Path(os.environ.get("APPDATA", "~"))
        elif system == "Darwin":
            base = Path("~/Library/Application Support")
        else:
            base = Path(os.environ.get("XDG_CONFIG_HOME", "~/.config"))

        return (base / "rlra-toolkit").expanduser()

    def load_config(self,
                    project_config: Optional[str] = None,
                    user_overrides: Optional[Dict] = None,
                    cli_overrides: Optional[Dict] = None) -> RlraConfig:
        """
        Load configuration from all sources with proper precedence.

        Args:
            project_config: Project config file name under config/ or a path
            user_overrides: User-specific settings
            cli_overrides: Command-line argument overrides (nested by section)

        Returns:
            Complete configuration object
        """
        config_dict = asdict(RlraConfig())

        if project_config:
            project_config_path = Path(project_config)
            if not project_config_path.is_absolute() and not project_config_path.exists():
                project_config_path = self.config_dir / project_config
        else:
            project_config_path = self.config_dir / "default.json"

        if project_config_path.exists():
            config_dict = self._merge_configs(config_dict, self._load_json_config(project_config_path))
            self.logger.debug(f"Loaded project config: {project_config_path}")
        elif project_config:
            self.logger.warning(f"Project config not found: {project_config_path}")

        user_config_path = self.user_config_dir / "settings.json"
        if user_config_path.exists():
            config_dict = self._merge_configs(config_dict, self._load_json_config(user_config_path))
            self.logger.debug(f"Loaded user config: {user_config_path}")

        if user_overrides:
            config_dict = self._merge_configs(config_dict, user_overrides)

        env_overrides = self._environment_overrides()
        log_level = env_overrides.get("ui", {}).get("log_level")
        if log_level:
            config_dict = self._merge_configs(config_dict, {"ui": {"log_level": log_level}})

        if cli_overrides:
            config_dict = self._merge_configs(config_dict, cli_overrides)
            self.logger.debug("Applied CLI overrides")

        # The environment thread count overrides --threads.
        if "kernels" in env_overrides:
            config_dict = self._merge_configs(config_dict, {"kernels": env_overrides["kernels"]})

        self._config = self._dict_to_config(config_dict)
        return self._config

    def _environment_overrides(self) -> Dict[str, Dict[str, Any]]:
        overrides: Dict[str, Dict[str, Any]] = {}
        threads = os.environ.get(THREADS_ENV_VAR)
        if threads:
            try:
                overrides["kernels"] = {"threads": int(threads)}
            except ValueError:
                self.logger.warning(f"Ignoring non-integer {THREADS_ENV_VAR}={threads!r}")
        log_level = os.environ.get(LOG_LEVEL_ENV_VAR)
        if log_level:
            overrides["ui"] = {"log_level": log_level.upper()}
        return overrides

    def _load_json_config(self, config_path: Path) -> Dict[str, Any]:
        """Load JSON configuration file"""
        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                data = json.load(f)
            if not isinstance(data, dict):
                raise ValueError("top level must be an object")
            return data
        except Exception as e:
            self.logger.error(f"Failed to load config {config_path}: {e}")
            return {}

    def _merge_configs(self, base: Dict, override: Dict) -> Dict:
        """Deep merge configuration dictionaries"""
        result = base.copy()

        for key, value in override.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._merge_configs(result[key], value)
            else:
                result[key] = value

        return result

    def _dict_to_config(self, config_dict: Dict) -> RlraConfig:
        """Convert dictionary to config dataclass, ignoring unknown keys"""
        sections = {}
        for name, section_type in _SECTIONS.items():
            values = config_dict.get(name, {}) or {}
            known = {key: value for key, value in values.items()
                     if key in section_type.__dataclass_fields__}
            unknown = set(values) - set(known)
            if unknown:
                self.logger.warning(f"Ignoring unknown {name} settings: {sorted(unknown)}")
            sections[name] = section_type(**known)
        return RlraConfig(**sections)

    def get_config(self) -> RlraConfig:
        """Get current configuration (load if not already loaded)"""
        if self._config is None:
            self._config = self.load_config()
        return self._config

    def validate_config(self, config: RlraConfig) -> List[str]:
        """Validate configuration and return list of issues"""
        issues = []

        sketch = config.sketch
        if sketch.p < 0:
            issues.append("oversampling p must be nonnegative")
        if sketch.q < 0:
            issues.append("power iterations q must be nonnegative")
        if sketch.s < 1:
            issues.append("orthonormalization period s must be at least 1")
        if sketch.block < 1:
            issues.append("block size must be at least 1")
        if sketch.max_blocks < 1:
            issues.append("max_blocks must be at least 1")
        if sketch.vnum not in VALID_VNUMS:
            issues.append(f"vnum must be one of {VALID_VNUMS}")
        if not 0 <= sketch.seed < 2 ** 64:
            issues.append("seed must be a 64-bit unsigned integer")

        kernels = config.kernels
        if kernels.threads < 1:
            issues.append("threads must be at least 1")
        if kernels.parallel_min_columns < 1:
            issues.append("parallel_min_columns must be at least 1")
        if kernels.eig_max_sweeps < 1 or kernels.svd_max_sweeps < 1:
            issues.append("Jacobi sweep caps must be at least 1")
        if kernels.dense_oracle_limit < 1:
            issues.append("dense_oracle_limit must be at least 1")

        if config.report.spectral_iters < 20:
            issues.append("spectral_iters must be at least 20")

        if config.ui.progress_mode not in VALID_PROGRESS_MODES:
            issues.append(f"progress_mode must be one of {VALID_PROGRESS_MODES}")
        if config.ui.log_level.upper() not in VALID_LOG_LEVELS:
            issues.append(f"log_level must be one of {VALID_LOG_LEVELS}")

        return issues


# Global config manager instance
_config_manager: Optional[ConfigManager] = None


def get_config_manager() -> ConfigManager:
    """Get global config manager instance"""
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager


def get_config(project_config: Optional[str] = None, **overrides) -> RlraConfig:
    """Convenience function to get configuration"""
    manager = get_config_manager()
    return manager.load_config(project_config=project_config, cli_overrides=overrides)
