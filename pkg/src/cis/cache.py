"""Tiny persistent result cache: one JSON file per record.

The cache key is the SHA-256 of the canonical JSON of (quantity, params,
tool version), so any change to inputs or to the package version is a
miss.  Writes go through a temporary file and an atomic rename; unreadable
or malformed entries are reported on stderr and treated as misses.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional

ENV_VAR = "CIS_CACHE_DIR"
DEFAULT_DIR = ".cis-cache"


def cache_dir() -> Path:
    return Path(os.environ.get(ENV_VAR) or DEFAULT_DIR)


def _key_path(quantity: str, params: dict, version: str) -> Path:
    canonical = json.dumps(
        {"quantity": quantity, "params": params, "version": version},
        sort_keys=True,
        separators=(",", ":"),
        default=str,
    )
    digest = hashlib.sha256(canonical.encode()).hexdigest()
    return cache_dir() / f"{digest}.json"


def cache_get(quantity: str, params: dict, version: str) -> Optional[dict]:
    """Stored record for this key, or None on miss or corruption."""
    path = _key_path(quantity, params, version)
    if not path.is_file():
        return None
    try:
        with open(path, encoding="utf-8") as fh:
            record = json.load(fh)
        if not isinstance(record, dict) or record.get("quantity") != quantity:
            raise ValueError("record does not match its key")
        return record
    except (OSError, ValueError) as exc:
        print(f"warning: ignoring corrupt cache entry {path}: {exc}", file=sys.stderr)
        return None


def cache_put(quantity: str, params: dict, version: str, record: dict) -> None:
    """Persist a record; failures are warnings, never errors."""
    path = _key_path(quantity, params, version)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(record, fh, sort_keys=True)
            os.replace(tmp, path)  # atomic on POSIX; readers never see partial writes
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as exc:
        print(f"warning: could not write cache entry {path}: {exc}", file=sys.stderr)
