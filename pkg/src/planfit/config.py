"""Service configuration with CLI > environment > config-file precedence."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path

from .catalog import bundled_catalog_path

ENV_PREFIX = "PLANFIT_"

_ENV_KEYS = {
    "provider_mode": "PLANFIT_PROVIDER_MODE",
    "model_name": "PLANFIT_MODEL",
    "data_dir": "PLANFIT_DATA_DIR",
    "catalog_path": "PLANFIT_CATALOG",
    "endpoint": "PLANFIT_ENDPOINT",
    "host": "PLANFIT_HOST",
    "port": "PLANFIT_PORT",
    "credentials_env": "PLANFIT_CREDENTIALS_ENV",
}


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8400
    data_dir: str = ""  # empty: in-memory only
    provider_mode: str = "template"
    model_name: str = "gpt-4"
    endpoint: str = ""
    # name of the env var holding the remote credential
    credentials_env: str = "PLANFIT_API_KEY"
    catalog_path: str = str(bundled_catalog_path())

    @property
    def api_key(self) -> str:
        return os.environ.get(self.credentials_env, "")


def load_config(
    cli_overrides: dict | None = None,
    env: dict | None = None,
    config_file: str | Path | None = None,
) -> ServiceConfig:
    """Merge defaults < config file < environment < CLI flags."""
    env = os.environ if env is None else env
    values: dict = {}

    if config_file:
        data = json.loads(Path(config_file).read_text(encoding="utf-8"))
        values.update({k: v for k, v in data.items() if v is not None})

    for attr, key in _ENV_KEYS.items():
        if key in env and env[key] != "":
            values[attr] = env[key]

    for key, value in (cli_overrides or {}).items():
        if value is not None:
            values[key] = value

    known = {f.name for f in fields(ServiceConfig)}
    values = {k: v for k, v in values.items() if k in known}
    if "port" in values:
        values["port"] = int(values["port"])
    return ServiceConfig(**values)
