"""Size limits and the optional key=value config file."""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

FORMATS = ("json", "csv", "dot", "text")


@dataclass(frozen=True)
class Config:
    enumeration_cap: int = 10**7
    potts_capacity: int = 2**20
    smith_dim_limit: int = 16
    output_format: str = "text"

    def __post_init__(self):
        for name in ("enumeration_cap", "potts_capacity", "smith_dim_limit"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.output_format not in FORMATS:
            raise ValueError(f"output_format must be one of {FORMATS}")


DEFAULT = Config()


def parse_config_text(text: str, base: Config = DEFAULT) -> Config:
    """Read `key = value` lines; `#` starts a comment."""
    known = {f.name: f.type for f in fields(Config)}
    updates = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        updates[key] = value if key == "output_format" else int(value)
    return replace(base, **updates)


def load_config(path: str | None = None) -> Config:
    if path is None:
        return DEFAULT
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def thread_cap() -> int | None:
    """Value of PARTALG_THREADS, if set to a positive integer."""
    raw = os.environ.get("PARTALG_THREADS", "").strip()
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError:
        return None
    return value if value > 0 else None
