"""
Configuration management for the renewable energy allocation simulator.
Handles environment variables, optional key=value config files and defaults.

Precedence: command-line flags > config file > environment > defaults.
"""

import os
from pathlib import Path
from typing import Dict, Optional, Union

from dotenv import dotenv_values, load_dotenv

from core.models import Params
from core.queue_dynamics import validate_params

ENV_PREFIX = "ENERGY_SIM_"

# Experiment constants used when nothing else is configured
DEFAULTS: Dict[str, str] = {
    "V": "100",
    "A_MAX": "175",
    "S_MAX": "90",
    "GAMMA_MAX": "180",
    "X_MAX": "400",
    "P_MAX": "200",
    "SLOTS": "26496",
    "SEED": "0",
    "GENERATOR": "iid",
    "POLICY": "lyapunov",
    "FRAME_T": "1,10,100",
    "SLOT_MINUTES": "10",
    "OUT_DIR": "./results",
    "CHECK_DRIFT": "true",
    "LOG_LEVEL": "INFO",
    "DEMAND": "linear",
    "REALIZATION": "deterministic",
    "MAX_WORKERS": "4",
}


def normalize_key(key: str) -> str:
    """'x-max', 'x_max' and 'X_MAX' all name the same setting."""
    key = key.strip()
    if key.upper().startswith(ENV_PREFIX):
        key = key[len(ENV_PREFIX):]
    return key.replace("-", "_").upper()


class Config:
    """Application configuration management."""

    def __init__(self, config_file: Optional[Union[str, Path]] = None, load_env: bool = True):
        if load_env:
            self._load_env_file()
        self._file_values: Dict[str, str] = {}
        if config_file is not None:
            self.load_file(config_file)

    def _load_env_file(self):
        """Load environment variables from .env file if it exists."""
        env_file = Path('.env')
        if env_file.exists():
            # Values already in the environment win
            load_dotenv(env_file, override=False)

    def load_file(self, config_file: Union[str, Path]):
        """Read a plain-text key=value file (# comments and blank lines ignored)."""
        path = Path(config_file)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        for key, value in dotenv_values(path).items():
            if value is not None:
                self._file_values[normalize_key(key)] = value.strip()

    def get(self, key: str, default: Optional[Union[str, int, float, bool]] = None) -> Optional[str]:
        """Get configuration value with optional default."""
        name = normalize_key(key)
        # empty values count as unset
        if self._file_values.get(name):
            return self._file_values[name]
        env_value = os.getenv(ENV_PREFIX + name, "").strip()
        if env_value:
            return env_value
        if default is not None:
            return str(default)
        return DEFAULTS.get(name)

    def get_bool(self, key: str, default: bool = False) -> bool:
        """Get boolean configuration value."""
        value = self.get(key, str(default)).lower()
        return value in ('true', '1', 'yes', 'on')

    def get_int(self, key: str, default: int = 0) -> int:
        """Get integer configuration value."""
        try:
            return int(self.get(key, str(default)))
        except (ValueError, TypeError):
            return default

    def get_float(self, key: str, default: Optional[float] = None) -> Optional[float]:
        """Get float configuration value; None when unset and no default."""
        raw = self.get(key, None if default is None else repr(default))
        if raw is None or raw == "":
            return None
        try:
            return float(raw)
        except ValueError:
            raise ValueError(f"configuration value {normalize_key(key)}={raw!r} is not a number")

    # Algorithm parameters
    @property
    def V(self) -> float:
        return self.get_float('V')

    @property
    def a_max(self) -> float:
        return self.get_float('A_MAX')

    @property
    def epsilon(self) -> float:
        # defaults to a_max / 2, the mean of integer-uniform demand
        value = self.get_float('EPSILON')
        return self.a_max / 2.0 if value is None else value

    @property
    def x_max(self) -> float:
        return self.get_float('X_MAX')

    @property
    def s_max(self) -> float:
        return self.get_float('S_MAX')

    @property
    def gamma_max(self) -> float:
        return self.get_float('GAMMA_MAX')

    @property
    def p_max(self) -> float:
        return self.get_float('P_MAX')

    def to_params(self, **overrides: Optional[float]) -> Params:
        """Validated parameter set; non-None overrides replace configured values."""
        values = {
            "V": self.V,
            "epsilon": None,
            "x_max": self.x_max,
            "a_max": self.a_max,
            "s_max": self.s_max,
            "gamma_max": self.gamma_max,
            "p_max": self.p_max,
        }
        for name, value in overrides.items():
            if value is not None:
                values[name] = value
        if values["epsilon"] is None:
            configured = self.get_float('EPSILON')
            values["epsilon"] = values["a_max"] / 2.0 if configured is None else configured
        return validate_params(Params(**values))

    # Simulation settings
    @property
    def slots(self) -> int:
        return self.get_int('SLOTS', 26496)

    @property
    def seed(self) -> int:
        return self.get_int('SEED', 0)

    @property
    def generator(self) -> str:
        return self.get('GENERATOR')

    @property
    def policy(self) -> str:
        return self.get('POLICY')

    @property
    def frame_T(self) -> list:
        raw = self.get('FRAME_T')
        return [int(value) for value in raw.split(",") if value.strip()]

    @property
    def slot_minutes(self) -> int:
        return self.get_int('SLOT_MINUTES', 10)

    @property
    def out_dir(self) -> str:
        return self.get('OUT_DIR')

    @property
    def check_drift(self) -> bool:
        return self.get_bool('CHECK_DRIFT', True)

    @property
    def demand(self) -> str:
        return self.get('DEMAND')

    @property
    def realization(self) -> str:
        return self.get('REALIZATION')

    @property
    def max_workers(self) -> int:
        return self.get_int('MAX_WORKERS', 4)

    # Logging Configuration
    @property
    def log_level(self) -> str:
        return self.get('LOG_LEVEL', 'INFO')


class DevelopmentConfig(Config):
    """Development-specific configuration."""

    def __init__(self, config_file: Optional[Union[str, Path]] = None):
        super().__init__(config_file)
        os.environ.setdefault(ENV_PREFIX + 'LOG_LEVEL', 'DEBUG')


class TestingConfig(Config):
    """Testing-specific configuration: short runs, no .env."""

    def __init__(self, config_file: Optional[Union[str, Path]] = None):
        super().__init__(config_file, load_env=False)
        self._file_values.setdefault('SLOTS', '2000')
        self._file_values.setdefault('OUT_DIR', './test_results')


def get_config(config_file: Optional[Union[str, Path]] = None) -> Config:
    """Configuration with an optional key=value file layered on top."""
    return Config(config_file)


def get_config_by_name(config_name: str, config_file: Optional[Union[str, Path]] = None) -> Config:
    """Get configuration by name."""
    configs = {
        'development': DevelopmentConfig,
        'testing': TestingConfig,
        'default': Config,
    }

    config_class = configs.get(config_name, Config)
    return config_class(config_file)
