"""Flat key=value config files.

Recognized keys: port, data_dir, challenge_ttl_s, provider,
provider.remote.endpoint, provider.remote.credential_env,
provider.remote.timeout_ms. Lines starting with '#' and blank lines are
ignored. The remote credential itself comes only from the environment.
"""

from __future__ import annotations

from .errors import ValidationError

DEFAULTS = {
    "port": "8570",
    "data_dir": "",
    "challenge_ttl_s": "120",
    "provider": "procedural",
}


def parse_config_text(text: str) -> dict[str, str]:
    cfg = dict(DEFAULTS)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno} is not key=value: {raw!r}")
        key, _, value = line.partition("=")
        cfg[key.strip()] = value.strip()
    return cfg


def load_config(path: str | None) -> dict[str, str]:
    if path is None:
        return dict(DEFAULTS)
    with open(path) as f:
        return parse_config_text(f.read())
