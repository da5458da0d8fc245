"""Small helpers shared by everything that emits result files."""

from __future__ import annotations

import hashlib
import json
import os


def format_float(x: float) -> str:
    """Shortest decimal string that round-trips the float64 exactly."""
    return repr(float(x))


def atomic_write_text(path, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see a
    half-written file and a crashed run leaves no truncated output."""
    path = os.fspath(path)
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"failed writing {path}: {exc}") from exc


def sha256_of_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


def write_json(path, payload) -> None:
    """Deterministic JSON emission: sorted keys, trailing newline, atomic."""
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
