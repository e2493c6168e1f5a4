"""Service configuration: TOML file with environment-variable overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from ..errors import InvalidParams

CONFIG_ENV = "LECTERN_CONFIG"

# setting name -> environment variable
ENV_VARS = {
    "host": "LECTERN_HOST",
    "port": "LECTERN_PORT",
    "storage_path": "LECTERN_STORAGE",
    "model_path": "LECTERN_MODEL_PATH",
    "workers": "LECTERN_WORKERS",
    "default_backend": "LECTERN_DEFAULT_BACKEND",
    "inference_timeout": "LECTERN_INFERENCE_TIMEOUT",
}


@dataclass(frozen=True)
class Settings:
    host: str = "127.0.0.1"
    port: int = 5000
    storage_path: str = "lectern.db"
    model_path: str | None = None
    workers: int = os.cpu_count() or 1
    default_backend: str | None = None
    inference_timeout: float = 120.0

    @property
    def backend(self) -> str:
        """Embedder backend used when a request does not name one."""
        if self.default_backend:
            return self.default_backend
        return "transformer" if self.model_path else "hashed"

    @classmethod
    def load(cls, config_path: str | os.PathLike | None = None, env=None) -> Settings:
        env = os.environ if env is None else env
        values: dict = {}
        path = config_path or env.get(CONFIG_ENV)
        if path:
            with open(Path(path).expanduser(), "rb") as fh:
                data = tomllib.load(fh)
            data = data.get("server", data)
            known = {f.name for f in fields(cls)}
            values.update({k: v for k, v in data.items() if k in known})
        for name, var in ENV_VARS.items():
            if env.get(var):
                values[name] = env[var]
        return cls().with_values(**values)

    def with_values(self, **values) -> Settings:
        casts = {"port": int, "workers": int, "inference_timeout": float}
        try:
            cleaned = {k: casts[k](v) if k in casts else v for k, v in values.items() if v is not None}
        except (TypeError, ValueError) as exc:
            raise InvalidParams(f"bad setting value: {exc}") from None
        settings = replace(self, **cleaned)
        if settings.workers < 1:
            raise InvalidParams("workers must be positive")
        return settings
