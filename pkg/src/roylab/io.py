"""Deterministic CSV and JSON writers for run outputs.

All floats are written with a fixed shortest-round-trip format and Unix
line endings so identical results serialize to identical bytes no matter
which thread produced them.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import pandas as pd

FLOAT_FORMAT = "%.12g"


class OutputError(OSError):
    pass


def write_csv(frame: pd.DataFrame, path: str | Path) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT,
                     lineterminator="\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def read_csv(path: str | Path) -> pd.DataFrame:
    path = Path(path)
    try:
        return pd.read_csv(path)
    except FileNotFoundError as exc:
        raise OutputError(f"missing input file {path}") from exc
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc}") from exc


def write_json(obj, path: str | Path) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def read_json(path: str | Path):
    path = Path(path)
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise OutputError(f"missing input file {path}") from exc
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc}") from exc


def resolve_threads(explicit: int | None) -> int:
    """Thread count from the flag, the environment, or a single thread."""
    if explicit is not None and explicit > 0:
        return explicit
    env = os.environ.get("ROYLAB_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise OutputError(f"ROYLAB_THREADS must be an integer, got {env!r}")
        if n > 0:
            return n
    return 1
