import configparser
import os
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from src.models.run_config import RunConfig
from src.utils.errors import ConfigError
from src.utils.logger import get_logger, set_level

load_dotenv()
logger = get_logger(__name__)

DEFAULTS = {
    "LAB_LOG_LEVEL": "INFO",
    "LAB_OUTPUT_DIR": "results",
    "LAB_FFT_WORKERS": 1,
    "LAB_DEFAULT_SEED": 7,
}


def _int_setting(name: str) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return DEFAULTS[name]
    try:
        return int(raw)
    except ValueError:
        logger.warning(
            "Ignoring malformed integer setting", setting=name, value=raw
        )
        return DEFAULTS[name]


def get_config():
    """Get process configuration from environment variables.
    Values from a local .env file are loaded first; missing keys fall back to defaults."""
    config = {
        "LAB_LOG_LEVEL": os.getenv("LAB_LOG_LEVEL", DEFAULTS["LAB_LOG_LEVEL"]).upper(),
        "LAB_OUTPUT_DIR": os.getenv("LAB_OUTPUT_DIR", DEFAULTS["LAB_OUTPUT_DIR"]),
        "LAB_FFT_WORKERS": _int_setting("LAB_FFT_WORKERS"),
        "LAB_DEFAULT_SEED": _int_setting("LAB_DEFAULT_SEED"),
    }

    if config["LAB_FFT_WORKERS"] == 0:
        logger.warning("LAB_FFT_WORKERS=0 is not valid, using 1")
        config["LAB_FFT_WORKERS"] = 1

    try:
        set_level(config["LAB_LOG_LEVEL"])
    except ValueError:
        logger.warning("Ignoring unknown log level", value=config["LAB_LOG_LEVEL"])
        config["LAB_LOG_LEVEL"] = DEFAULTS["LAB_LOG_LEVEL"]
        set_level(config["LAB_LOG_LEVEL"])

    logger.debug("Loaded configuration", log_level=config["LAB_LOG_LEVEL"])
    return config


def read_config_file(path: Path, subcommand: str) -> Dict[str, str]:
    """Flat key = value pairs of [common] overlaid with [<subcommand>]."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}", "config") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}", "config") from exc
    values: Dict[str, str] = {}
    for section in ("common", subcommand):
        if parser.has_section(section):
            values.update(parser.items(section))
    return values


def load_run_config(
    subcommand: str,
    config: Dict[str, Any],
    path: Optional[Path] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> RunConfig:
    """Defaults from the environment, then the config file, then flag overrides.

    Raises pydantic.ValidationError on out-of-range or unknown keys.
    """
    values: Dict[str, Any] = {
        "output_dir": config["LAB_OUTPUT_DIR"],
        "seed": config["LAB_DEFAULT_SEED"],
    }
    if path is not None:
        values.update(read_config_file(path, subcommand))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    values["subcommand"] = subcommand
    return RunConfig(**values)
