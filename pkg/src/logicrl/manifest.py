"""Run manifests: provenance records written beside every CLI output.

The manifest carries digests of every input that affects results plus the
effective configuration, so a rerun can be checked against the original.
Timestamps live only here; output artifacts themselves stay byte-identical
across reruns with the same inputs and seeds.
"""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Optional, Sequence

from . import __version__


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def config_digest(config: Mapping) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def write_manifest(
    out_path: str | Path,
    command: str,
    config: Mapping,
    master_seed: Optional[int],
    inputs: Sequence[str | Path],
    outputs: Sequence[str | Path],
    started_at: str,
) -> Path:
    """Write `<out>.manifest.json` beside the primary output."""
    manifest = {
        "command": command,
        "tool_version": __version__,
        "config": dict(config),
        "config_digest": config_digest(config),
        "master_seed": master_seed,
        "inputs": {str(p): file_digest(p) for p in inputs if Path(p).exists()},
        "outputs": {str(p): file_digest(p) for p in outputs if Path(p).exists()},
        "started_at": started_at,
        "finished_at": utc_now(),
    }
    path = Path(str(out_path) + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
