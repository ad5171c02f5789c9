"""Numeric tolerance record shared by every module.

The values can be overridden through the ``ORACLE_GEOM_TOL`` environment
variable, either as a JSON object (``{"side": 1e-8}``) or as a comma list
(``side=1e-8,box=1e5``).  The override is read once, at import time.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace

ENV_VAR = "ORACLE_GEOM_TOL"


@dataclass(frozen=True)
class Tolerances:
    side: float = 1e-9  # on-plane band after unit normalization
    dedup: float = 1e-7  # vertex dedup / nudge size
    box: float = 1e6  # half-width M of the bounding box [-M, M]^d
    lex: float = 1e-3  # lexicographic weight for feasibility-only LPs


def parse_override(text: str) -> dict[str, float]:
    text = text.strip()
    if not text:
        return {}
    if text.startswith("{"):
        raw = json.loads(text)
    else:
        raw = {}
        for item in text.split(","):
            key, _, value = item.partition("=")
            raw[key.strip()] = value
    known = {f.name for f in fields(Tolerances)}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown tolerance keys in {ENV_VAR}: {sorted(unknown)}")
    return {k: float(v) for k, v in raw.items()}


def _from_env() -> Tolerances:
    return replace(Tolerances(), **parse_override(os.environ.get(ENV_VAR, "")))


TOL = _from_env()


def set_tolerances(**overrides: float) -> Tolerances:
    """Replace the global record (used by tests and the CLI)."""
    global TOL
    TOL = replace(TOL, **overrides)
    return TOL
